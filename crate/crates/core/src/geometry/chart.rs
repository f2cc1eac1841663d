use crate::error::{Error, Result};
use crate::geometry::lattice::Lattice;
use crate::sig::Signature;

/// Named metric presets selectable from configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum ChartPreset {
    Flat,
    /// g = exp(2 phi) eta with a smooth periodic profile of the given
    /// amplitude.
    Conformal {
        amplitude: f64,
    },
    /// Round two-sphere patch of the given radius, coordinates (theta, phi)
    /// with theta offset away from the poles. Invariants are evaluated on
    /// interior sites only.
    Sphere2 {
        radius: f64,
    },
}

impl ChartPreset {
    pub fn parse(name: &str, param: f64) -> Result<Self> {
        match name {
            "flat" => Ok(ChartPreset::Flat),
            "conformal" => Ok(ChartPreset::Conformal { amplitude: param }),
            "sphere2" => Ok(ChartPreset::Sphere2 { radius: param }),
            other => Err(Error::Chart(format!("unknown chart preset '{other}'"))),
        }
    }

    pub fn names() -> &'static [&'static str] {
        &["flat", "conformal", "sphere2"]
    }
}

/// Lattice chart with a metric field. Tensor components are stored in the
/// orthonormal frame; the frame, Christoffel symbols and frame connection
/// coefficients are computed once at construction.
#[derive(Debug)]
pub struct MetricChart {
    pub lat: Lattice,
    pub sig: Signature,
    pub preset: ChartPreset,
    /// True when the metric is honestly periodic across the wrap.
    pub periodic: bool,
    /// g_{mu nu} per site, coordinate basis.
    g: Vec<f64>,
    g_inv: Vec<f64>,
    sqrt_det: Vec<f64>,
    /// Frame E^mu_a: column a is the a-th orthonormal vector field.
    frame: Vec<f64>,
    frame_inv: Vec<f64>,
    /// Gamma^k_{ij} per site.
    christoffel: Vec<f64>,
    /// Frame connection coefficients omega_{a,bc}, antisymmetric in (b,c):
    /// nabla_{e_a} e_c = eta^{bb} omega_{a,bc} e_b (stored fully lowered).
    spin_omega: Vec<f64>,
    theta0: f64,
}

impl MetricChart {
    pub fn n(&self) -> usize {
        self.sig.dim()
    }

    pub fn sites(&self) -> std::ops::Range<usize> {
        self.lat.sites()
    }

    #[inline]
    pub fn g_at(&self, x: usize) -> &[f64] {
        let n = self.n();
        &self.g[x * n * n..(x + 1) * n * n]
    }

    #[inline]
    pub fn g_inv_at(&self, x: usize) -> &[f64] {
        let n = self.n();
        &self.g_inv[x * n * n..(x + 1) * n * n]
    }

    #[inline]
    pub fn frame_at(&self, x: usize) -> &[f64] {
        let n = self.n();
        &self.frame[x * n * n..(x + 1) * n * n]
    }

    #[inline]
    pub fn frame_inv_at(&self, x: usize) -> &[f64] {
        let n = self.n();
        &self.frame_inv[x * n * n..(x + 1) * n * n]
    }

    /// E^mu_a at site x.
    #[inline]
    pub fn e(&self, x: usize, mu: usize, a: usize) -> f64 {
        self.frame_at(x)[mu * self.n() + a]
    }

    /// (E^{-1})^a_mu at site x.
    #[inline]
    pub fn e_inv(&self, x: usize, a: usize, mu: usize) -> f64 {
        self.frame_inv_at(x)[a * self.n() + mu]
    }

    #[inline]
    pub fn christoffel(&self, x: usize, k: usize, i: usize, j: usize) -> f64 {
        let n = self.n();
        self.christoffel[((x * n + k) * n + i) * n + j]
    }

    /// Lowered frame connection coefficient omega_{a,bc}.
    #[inline]
    pub fn omega(&self, x: usize, a: usize, b: usize, c: usize) -> f64 {
        let n = self.n();
        self.spin_omega[((x * n + a) * n + b) * n + c]
    }

    /// Raised-first-slot coefficient omega_a{}^b{}_c.
    #[inline]
    pub fn omega_raised(&self, x: usize, a: usize, b: usize, c: usize) -> f64 {
        self.sig.eta(b) * self.omega(x, a, b, c)
    }

    /// Structure coefficients c_{ab}{}^c of the orthonormal frame,
    /// [e_a, e_b] = c_{ab}{}^c e_c, from the torsion-free connection.
    #[inline]
    pub fn struct_coeff(&self, x: usize, a: usize, b: usize, c: usize) -> f64 {
        self.omega_raised(x, a, c, b) - self.omega_raised(x, b, c, a)
    }

    /// Integration weight: prod(h) * sqrt|det g|.
    #[inline]
    pub fn weight(&self, x: usize) -> f64 {
        self.h_cell() * self.sqrt_det[x]
    }

    #[inline]
    pub fn h_cell(&self) -> f64 {
        self.lat.h.iter().product()
    }

    pub fn is_flat_preset(&self) -> bool {
        matches!(self.preset, ChartPreset::Flat)
    }

    /// Sites unaffected by the wrap seam: all of them on periodic charts.
    /// The sphere patch wraps cleanly along phi (the metric is constant
    /// there) but not along theta, so the margin applies to axis 0 only.
    pub fn interior_sites(&self, margin: usize) -> Vec<usize> {
        if self.periodic {
            self.sites().collect()
        } else {
            self.sites()
                .filter(|&x| {
                    let c = self.lat.coords(x)[0];
                    c >= margin && c + margin < self.lat.dims[0]
                })
                .collect()
        }
    }

    /// Directional derivative e_a(f) of a per-site scalar slice accessor.
    pub fn frame_derivative<F: Fn(usize) -> f64>(&self, x: usize, a: usize, f: F) -> f64 {
        let mut acc = 0.0;
        for mu in 0..self.n() {
            let e = self.e(x, mu, a);
            if e == 0.0 {
                continue;
            }
            let fp = f(self.lat.shift(x, mu, 1));
            let fm = f(self.lat.shift(x, mu, -1));
            acc += e * (fp - fm) / (2.0 * self.lat.h[mu]);
        }
        acc
    }

    /// Coordinate derivative d f / d x^mu by centered differences.
    #[inline]
    pub fn coord_derivative<F: Fn(usize) -> f64>(&self, x: usize, mu: usize, f: F) -> f64 {
        let fp = f(self.lat.shift(x, mu, 1));
        let fm = f(self.lat.shift(x, mu, -1));
        (fp - fm) / (2.0 * self.lat.h[mu])
    }

    /// Fourth-order coordinate derivative; used by the curvature path so
    /// the metric-derivative truncation does not dominate there.
    #[inline]
    pub fn coord_derivative4<F: Fn(usize) -> f64>(&self, x: usize, mu: usize, f: F) -> f64 {
        let f2p = f(self.lat.shift(x, mu, 2));
        let fp = f(self.lat.shift(x, mu, 1));
        let fm = f(self.lat.shift(x, mu, -1));
        let f2m = f(self.lat.shift(x, mu, -2));
        (-f2p + 8.0 * fp - 8.0 * fm + f2m) / (12.0 * self.lat.h[mu])
    }

    /// Physical coordinate of a site along axis mu (sphere charts offset
    /// theta away from the pole).
    pub fn coordinate(&self, x: usize, mu: usize) -> f64 {
        let c = self.lat.coords(x)[mu] as f64 * self.lat.h[mu];
        if mu == 0 {
            if let ChartPreset::Sphere2 { .. } = self.preset {
                return self.theta0 + c;
            }
        }
        c
    }

    /// Same chart with the orthonormal frame rotated globally by `o`
    /// (columns mix as E' = E O). The metric, Christoffels and connection
    /// coefficients are rebuilt; `o` must preserve eta.
    pub fn with_rotated_frame(&self, o: &[f64]) -> Result<Self> {
        let n = self.n();
        if o.len() != n * n {
            return Err(Error::Chart("rotation must be n x n".into()));
        }
        let lat = self.lat.clone();
        let mut frame = vec![0.0; self.frame.len()];
        for x in 0..lat.len() {
            for mu in 0..n {
                for a in 0..n {
                    let mut acc = 0.0;
                    for b in 0..n {
                        acc += self.e(x, mu, b) * o[b * n + a];
                    }
                    frame[x * n * n + mu * n + a] = acc;
                }
            }
        }
        let mut chart = MetricChart {
            lat,
            sig: self.sig,
            preset: self.preset.clone(),
            periodic: self.periodic,
            g: self.g.clone(),
            g_inv: vec![0.0; self.g_inv.len()],
            sqrt_det: vec![0.0; self.sqrt_det.len()],
            frame,
            frame_inv: vec![0.0; self.frame_inv.len()],
            christoffel: vec![0.0; self.christoffel.len()],
            spin_omega: vec![0.0; self.spin_omega.len()],
            theta0: self.theta0,
        };
        chart.finish()?;
        Ok(chart)
    }

    pub fn build(preset: ChartPreset, lat: Lattice, sig: Signature) -> Result<Self> {
        let n = sig.dim();
        if lat.n_axes() != n {
            return Err(Error::Chart(format!(
                "lattice rank {} does not match signature dimension {}",
                lat.n_axes(),
                n
            )));
        }
        if let ChartPreset::Sphere2 { radius } = preset {
            if n != 2 {
                return Err(Error::Chart("sphere2 preset needs n = 2".into()));
            }
            if sig != Signature::new(2, 0, sig.eps)? {
                return Err(Error::Chart("sphere2 preset needs signature (2,0)".into()));
            }
            if radius <= 0.0 {
                return Err(Error::Chart("sphere2 radius must be positive".into()));
            }
        }
        if let ChartPreset::Conformal { amplitude } = preset {
            if !amplitude.is_finite() {
                return Err(Error::Chart("conformal amplitude must be finite".into()));
            }
        }

        let sites = lat.len();
        let theta0 = 1.0;
        let mut g = vec![0.0; sites * n * n];
        let mut frame = vec![0.0; sites * n * n];
        let periodic = !matches!(preset, ChartPreset::Sphere2 { .. });

        for x in 0..sites {
            let gx = &mut g[x * n * n..(x + 1) * n * n];
            let ex = &mut frame[x * n * n..(x + 1) * n * n];
            match preset {
                ChartPreset::Flat => {
                    for a in 0..n {
                        gx[a * n + a] = sig.eta(a);
                        ex[a * n + a] = 1.0;
                    }
                }
                ChartPreset::Conformal { amplitude } => {
                    let coords = lat.coords(x);
                    let phi: f64 = (0..n)
                        .map(|mu| {
                            amplitude
                                * (2.0 * std::f64::consts::PI * coords[mu] as f64
                                    / lat.dims[mu] as f64)
                                    .sin()
                        })
                        .sum();
                    for a in 0..n {
                        gx[a * n + a] = (2.0 * phi).exp() * sig.eta(a);
                        ex[a * n + a] = (-phi).exp();
                    }
                }
                ChartPreset::Sphere2 { radius } => {
                    let theta = theta0 + lat.coords(x)[0] as f64 * lat.h[0];
                    gx[0] = radius * radius;
                    gx[3] = radius * radius * theta.sin() * theta.sin();
                    ex[0] = 1.0 / radius;
                    ex[3] = 1.0 / (radius * theta.sin());
                }
            }
        }

        let mut chart = MetricChart {
            lat,
            sig,
            preset,
            periodic,
            g,
            g_inv: vec![0.0; sites * n * n],
            sqrt_det: vec![0.0; sites],
            frame,
            frame_inv: vec![0.0; sites * n * n],
            christoffel: vec![0.0; sites * n * n * n],
            spin_omega: vec![0.0; sites * n * n * n],
            theta0,
        };
        chart.finish()?;
        Ok(chart)
    }

    fn finish(&mut self) -> Result<()> {
        let n = self.n();
        let sites = self.lat.len();

        // Inverse metric, volume density, inverse frame.
        for x in 0..sites {
            let gm = nalgebra::DMatrix::from_row_slice(n, n, self.g_at(x));
            let det = gm.determinant();
            if det.abs() < 1e-14 {
                return Err(Error::Chart(format!("degenerate metric at site {x}")));
            }
            self.sqrt_det[x] = det.abs().sqrt();
            let gi = gm
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Chart(format!("metric not invertible at site {x}")))?;
            let em = nalgebra::DMatrix::from_row_slice(n, n, self.frame_at(x));
            let ei = em
                .try_inverse()
                .ok_or_else(|| Error::Chart(format!("frame not invertible at site {x}")))?;
            for i in 0..n {
                for j in 0..n {
                    self.g_inv[x * n * n + i * n + j] = gi[(i, j)];
                    self.frame_inv[x * n * n + i * n + j] = ei[(i, j)];
                }
            }
        }

        // Frame orthonormality E^T g E = eta.
        for x in 0..sites {
            for a in 0..n {
                for b in 0..n {
                    let mut acc = 0.0;
                    for mu in 0..n {
                        for nu in 0..n {
                            acc += self.e(x, mu, a) * self.g_at(x)[mu * n + nu] * self.e(x, nu, b);
                        }
                    }
                    let expect = if a == b { self.sig.eta(a) } else { 0.0 };
                    if (acc - expect).abs() > 1e-10 {
                        return Err(Error::Chart(format!(
                            "frame not orthonormal at site {x}: ({a},{b}) -> {acc}"
                        )));
                    }
                }
            }
        }

        // Christoffel symbols from fourth-order differences of the metric.
        // The flat preset stays exactly zero.
        if !self.is_flat_preset() {
            for x in 0..sites {
                for k in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            let mut acc = 0.0;
                            for l in 0..n {
                                let dgi = self.coord_derivative4(x, i, |y| self.g_at(y)[l * n + j]);
                                let dgj = self.coord_derivative4(x, j, |y| self.g_at(y)[l * n + i]);
                                let dgl = self.coord_derivative4(x, l, |y| self.g_at(y)[i * n + j]);
                                acc += 0.5 * self.g_inv_at(x)[k * n + l] * (dgi + dgj - dgl);
                            }
                            self.christoffel[((x * n + k) * n + i) * n + j] = acc;
                        }
                    }
                }
            }
        }

        // Frame connection coefficients omega_{a,bc} from the frame and the
        // Christoffel cache, antisymmetrized in (b,c) so that metricity in
        // frame components is exact.
        if !self.is_flat_preset() {
            let mut omega = vec![0.0; sites * n * n * n];
            for x in 0..sites {
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            // omega_a{}^b{}_c = (E^-1)^b_nu [ e_a(E^nu_c)
                            //   + E^mu_a Gamma^nu_{mu sigma} E^sigma_c ]
                            let mut acc = 0.0;
                            for nu in 0..n {
                                let de = self.frame_derivative(x, a, |y| self.e(y, nu, c));
                                let mut gterm = 0.0;
                                for mu in 0..n {
                                    for s in 0..n {
                                        gterm += self.e(x, mu, a)
                                            * self.christoffel(x, nu, mu, s)
                                            * self.e(x, s, c);
                                    }
                                }
                                acc += self.e_inv(x, b, nu) * (de + gterm);
                            }
                            // lower the middle slot
                            omega[((x * n + a) * n + b) * n + c] = self.sig.eta(b) * acc;
                        }
                    }
                }
            }
            for x in 0..sites {
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..b {
                            let i1 = ((x * n + a) * n + b) * n + c;
                            let i2 = ((x * n + a) * n + c) * n + b;
                            let anti = 0.5 * (omega[i1] - omega[i2]);
                            self.spin_omega[i1] = anti;
                            self.spin_omega[i2] = -anti;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
