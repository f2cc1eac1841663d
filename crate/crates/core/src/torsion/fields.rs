use crate::error::{Error, Result};
use crate::geometry::{KForm, MetricChart};
use crate::sig::Signature;
use rand::Rng;

/// Lattice torsion potential A in Omega^1(M, Lambda^2 T*M):
/// per-site n x n x n array, antisymmetric in the last two frame indices.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionPotential {
    pub n: usize,
    pub sites: usize,
    pub data: Vec<f64>,
}

/// Torsion tensor T in Omega^2(M, TM) components, antisymmetric in the
/// first two frame indices.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionTensor {
    pub n: usize,
    pub sites: usize,
    pub data: Vec<f64>,
}

macro_rules! site_tensor3 {
    ($ty:ident) => {
        impl $ty {
            pub fn zeros(chart: &MetricChart) -> Self {
                let n = chart.n();
                $ty {
                    n,
                    sites: chart.lat.len(),
                    data: vec![0.0; chart.lat.len() * n * n * n],
                }
            }

            #[inline]
            pub fn get(&self, x: usize, i: usize, j: usize, k: usize) -> f64 {
                self.data[((x * self.n + i) * self.n + j) * self.n + k]
            }

            #[inline]
            pub fn set(&mut self, x: usize, i: usize, j: usize, k: usize, v: f64) {
                self.data[((x * self.n + i) * self.n + j) * self.n + k] = v;
            }

            pub fn check_shape(&self, chart: &MetricChart) -> Result<()> {
                if self.n != chart.n() || self.sites != chart.lat.len() {
                    return Err(Error::LatticeMismatch(format!(
                        "field ({} sites, n={}) vs chart ({} sites, n={})",
                        self.sites,
                        self.n,
                        chart.lat.len(),
                        chart.n()
                    )));
                }
                Ok(())
            }

            pub fn norm_inf(&self) -> f64 {
                self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
            }

            pub fn axpy(&mut self, a: f64, other: &Self) {
                for (x, y) in self.data.iter_mut().zip(&other.data) {
                    *x += a * y;
                }
            }

            pub fn scale(&mut self, a: f64) {
                for x in self.data.iter_mut() {
                    *x *= a;
                }
            }
        }
    };
}

site_tensor3!(TorsionPotential);
site_tensor3!(TorsionTensor);

impl TorsionPotential {
    /// Validating constructor: rejects arrays that are not exactly
    /// antisymmetric in the last two slots.
    pub fn new(chart: &MetricChart, data: Vec<f64>) -> Result<Self> {
        let n = chart.n();
        let sites = chart.lat.len();
        if data.len() != sites * n * n * n {
            return Err(Error::DimensionMismatch("torsion potential length".into()));
        }
        let a = TorsionPotential { n, sites, data };
        for x in 0..sites {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if a.get(x, i, j, k) != -a.get(x, i, k, j) {
                            return Err(Error::InvalidInput(format!(
                                "potential not antisymmetric at site {x}, ({i},{j},{k})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(a)
    }

    pub fn random<R: Rng>(chart: &MetricChart, rng: &mut R, amplitude: f64) -> Self {
        let n = chart.n();
        let mut a = Self::zeros(chart);
        for x in 0..a.sites {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..j {
                        let v = amplitude * rng.gen_range(-1.0..1.0);
                        a.set(x, i, j, k, v);
                        a.set(x, i, k, j, -v);
                    }
                }
            }
        }
        a
    }

    /// Spatially constant potential from one n x n x n array (antisymmetric
    /// in the last two slots).
    pub fn constant(chart: &MetricChart, block: &[f64]) -> Result<Self> {
        let n = chart.n();
        if block.len() != n * n * n {
            return Err(Error::DimensionMismatch("constant potential block".into()));
        }
        let data: Vec<f64> = (0..chart.lat.len())
            .flat_map(|_| block.iter().cloned())
            .collect();
        Self::new(chart, data)
    }
}

impl TorsionTensor {
    pub fn new(chart: &MetricChart, data: Vec<f64>) -> Result<Self> {
        let n = chart.n();
        let sites = chart.lat.len();
        if data.len() != sites * n * n * n {
            return Err(Error::DimensionMismatch("torsion tensor length".into()));
        }
        let t = TorsionTensor { n, sites, data };
        for x in 0..sites {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if t.get(x, i, j, k) != -t.get(x, j, i, k) {
                            return Err(Error::InvalidInput(format!(
                                "torsion tensor not antisymmetric at site {x}, ({i},{j},{k})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(t)
    }
}

/// tau_A(u, v) = A(u) v - A(v) u in frame components.
pub fn torsion_from_potential(chart: &MetricChart, a: &TorsionPotential) -> Result<TorsionTensor> {
    a.check_shape(chart)?;
    let n = a.n;
    let mut t = TorsionTensor::zeros(chart);
    for x in 0..a.sites {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    t.set(x, i, j, k, a.get(x, i, j, k) - a.get(x, j, i, k));
                }
            }
        }
    }
    Ok(t)
}

/// Inversion 2 g(A(u)v, w) = g(tau(u)v, w) - g(tau(v)w, u) + g(tau(w)u, v).
pub fn potential_from_torsion(chart: &MetricChart, t: &TorsionTensor) -> Result<TorsionPotential> {
    t.check_shape(chart)?;
    let n = t.n;
    let mut a = TorsionPotential::zeros(chart);
    for x in 0..t.sites {
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    let val = 0.5 * (t.get(x, u, v, w) - t.get(x, v, w, u) + t.get(x, w, u, v));
                    a.set(x, u, v, w, val);
                }
            }
        }
    }
    Ok(a)
}

/// Contraction tr tau(v): one-form with components sum_j eta^jj T[i][j][j].
pub fn trace_torsion(chart: &MetricChart, t: &TorsionTensor) -> Result<KForm> {
    t.check_shape(chart)?;
    let n = t.n;
    let mut out = KForm::zeros(chart, 1);
    for x in 0..t.sites {
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += chart.sig.eta(j) * t.get(x, i, j, j);
            }
            out.set(x, &[i], acc);
        }
    }
    Ok(out)
}

/// Commutator of two so-endomorphisms in lowered components
/// m[j][k] = g(M e_j, e_k):
/// [P, Q][j][k] = sum_m eta^mm (Q[j][m] P[m][k] - P[j][m] Q[m][k]).
pub fn so_commutator(sig: &Signature, n: usize, p: &[f64], q: &[f64], out: &mut [f64]) {
    for j in 0..n {
        for k in 0..n {
            let mut acc = 0.0;
            for m in 0..n {
                acc += sig.eta(m) * (q[j * n + m] * p[m * n + k] - p[j * n + m] * q[m * n + k]);
            }
            out[j * n + k] = acc;
        }
    }
}

/// Metric connection nabla^g = nabla^LC + A: per-site frame coefficients
/// Omega_{a,bc} = g(nabla_a e_c, e_b).
#[derive(Debug, Clone)]
pub struct SoConnection {
    pub n: usize,
    pub sites: usize,
    /// lowered coefficients [x][a][b][c]
    pub coef: Vec<f64>,
}

impl SoConnection {
    #[inline]
    pub fn lowered(&self, x: usize, a: usize, b: usize, c: usize) -> f64 {
        self.coef[((x * self.n + a) * self.n + b) * self.n + c]
    }

    /// so-matrix of the rotation part in the m[j][k] = g(M e_j, e_k)
    /// convention: m[j][k] = Omega_{a,kj}.
    pub fn so_matrix(&self, x: usize, a: usize, out: &mut [f64]) {
        for j in 0..self.n {
            for k in 0..self.n {
                out[j * self.n + k] = self.lowered(x, a, k, j);
            }
        }
    }
}
