use crate::error::Result;
use crate::geometry::MetricChart;
use crate::torsion::fields::{so_commutator, SoConnection, TorsionPotential};

/// Torsion field strength F[a][b][j][k], antisymmetric in (a,b) and (j,k).
#[derive(Debug, Clone)]
pub struct TorsionFieldStrength {
    pub n: usize,
    pub sites: usize,
    pub data: Vec<f64>,
}

impl TorsionFieldStrength {
    pub fn zeros(chart: &MetricChart) -> Self {
        let n = chart.n();
        TorsionFieldStrength {
            n,
            sites: chart.lat.len(),
            data: vec![0.0; chart.lat.len() * n * n * n * n],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, a: usize, b: usize, j: usize, k: usize) -> f64 {
        let n = self.n;
        self.data[(((x * n + a) * n + b) * n + j) * n + k]
    }

    #[inline]
    pub fn set(&mut self, x: usize, a: usize, b: usize, j: usize, k: usize, v: f64) {
        let n = self.n;
        self.data[(((x * n + a) * n + b) * n + j) * n + k] = v;
    }

    pub fn norm_inf(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// ||F||^2(x) = - tr F_{ab} F^{ab} = sum_{ab,jk} eta^aa eta^bb eta^jj
    /// eta^kk F_{abjk}^2, all pairs counted.
    pub fn norm2_density(&self, chart: &MetricChart, x: usize) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let e = chart.sig.eta(a) * chart.sig.eta(b) * chart.sig.eta(j)
                            * chart.sig.eta(k);
                        let f = self.get(x, a, b, j, k);
                        acc += e * f * f;
                    }
                }
            }
        }
        acc
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Forward,
    Adjoint,
}

/// Shared kernel for the covariant exterior derivative
/// (d_A X)_{ab} = (nabla_a X)_b - (nabla_b X)_a + [A_a, X_b] - [A_b, X_a]
/// on so-valued one-forms, and for its exact adjoint under the lattice
/// inner products. Both directions walk the identical contribution list;
/// the adjoint scatters with the ratio of inner-product weights, which is
/// what makes <d_A X, Y> = <X, delta_A Y> hold to rounding.
fn one_two_kernel(
    chart: &MetricChart,
    twist: Option<&TorsionPotential>,
    input: &[f64],
    mode: Mode,
) -> Vec<f64> {
    let n = chart.n();
    let sites = chart.lat.len();
    let nn = n * n;
    let one_len = n * nn;
    let two_len = nn * nn;
    let mut out = vec![0.0; sites * if mode == Mode::Forward { two_len } else { one_len }];

    let one_idx = |x: usize, a: usize, j: usize, k: usize| ((x * n + a) * n + j) * n + k;
    let two_idx =
        |x: usize, a: usize, b: usize, j: usize, k: usize| (((x * n + a) * n + b) * n + j) * n + k;

    // inner-product weights over full index ranges
    let w1 = |x: usize, a: usize, j: usize, k: usize| {
        chart.weight(x)
            * chart.sig.eta(a)
            * 0.5
            * chart.sig.eta(j)
            * chart.sig.eta(k)
    };
    let w2 = |x: usize, a: usize, b: usize, j: usize, k: usize| {
        chart.weight(x)
            * 0.5
            * chart.sig.eta(a)
            * chart.sig.eta(b)
            * 0.5
            * chart.sig.eta(j)
            * chart.sig.eta(k)
    };

    for x in 0..sites {
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                for j in 0..n {
                    for k in 0..n {
                        if j == k {
                            continue;
                        }
                        // contributions to out2[x, a, b, j, k] of the form
                        // coeff * in1[src_site, c0, c1, c2]; (sgn, lead) runs
                        // over the +(nabla_a X)_b и -(nabla_b X)_a halves.
                        let mut acc = 0.0;
                        let emit = |src: usize,
                                        c0: usize,
                                        c1: usize,
                                        c2: usize,
                                        coeff: f64,
                                        out: &mut Vec<f64>,
                                        acc: &mut f64| {
                            match mode {
                                Mode::Forward => {
                                    *acc += coeff * input[one_idx(src, c0, c1, c2)];
                                }
                                Mode::Adjoint => {
                                    let ratio = w2(x, a, b, j, k) / w1(src, c0, c1, c2);
                                    out[one_idx(src, c0, c1, c2)] +=
                                        coeff * ratio * input[two_idx(x, a, b, j, k)];
                                }
                            }
                        };

                        for (lead, other, sgn) in [(a, b, 1.0), (b, a, -1.0)] {
                            // e_lead derivative of X[other][j][k]
                            for mu in 0..n {
                                let e = chart.e(x, mu, lead);
                                if e != 0.0 {
                                    let c = sgn * e / (2.0 * chart.lat.h[mu]);
                                    let sp = chart.lat.shift(x, mu, 1);
                                    let sm = chart.lat.shift(x, mu, -1);
                                    emit(sp, other, j, k, c, &mut out, &mut acc);
                                    emit(sm, other, j, k, -c, &mut out, &mut acc);
                                }
                            }
                            if !chart.is_flat_preset() {
                                for c in 0..n {
                                    // form index rotation
                                    let wf = chart.omega_raised(x, lead, c, other);
                                    if wf != 0.0 {
                                        emit(x, c, j, k, -sgn * wf, &mut out, &mut acc);
                                    }
                                    // so index rotations
                                    let wj = chart.omega_raised(x, lead, c, j);
                                    if wj != 0.0 {
                                        emit(x, other, c, k, -sgn * wj, &mut out, &mut acc);
                                    }
                                    let wk = chart.omega_raised(x, lead, c, k);
                                    if wk != 0.0 {
                                        emit(x, other, j, c, -sgn * wk, &mut out, &mut acc);
                                    }
                                }
                            }
                            // twist: [A_lead, X_other]_{jk}
                            //   = sum_m eta^mm (X[other][j][m] A[lead][m][k]
                            //                 - A[lead][j][m] X[other][m][k])
                            if let Some(pot) = twist {
                                for m in 0..n {
                                    let em = chart.sig.eta(m);
                                    let c1 = sgn * em * pot.get(x, lead, m, k);
                                    if c1 != 0.0 {
                                        emit(x, other, j, m, c1, &mut out, &mut acc);
                                    }
                                    let c2 = -sgn * em * pot.get(x, lead, j, m);
                                    if c2 != 0.0 {
                                        emit(x, other, m, k, c2, &mut out, &mut acc);
                                    }
                                }
                            }
                        }
                        if mode == Mode::Forward {
                            out[two_idx(x, a, b, j, k)] = acc;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Covariant exterior derivative of an so-valued one-form with the
/// Levi-Civita connection plus optional potential twist.
pub fn d_a_one_form(
    chart: &MetricChart,
    twist: Option<&TorsionPotential>,
    x: &TorsionPotential,
) -> Result<TorsionFieldStrength> {
    x.check_shape(chart)?;
    let data = one_two_kernel(chart, twist, &x.data, Mode::Forward);
    Ok(TorsionFieldStrength {
        n: chart.n(),
        sites: chart.lat.len(),
        data,
    })
}

/// Exact adjoint of `d_a_one_form` under the lattice inner products.
pub fn delta_a_two_form(
    chart: &MetricChart,
    twist: Option<&TorsionPotential>,
    y: &TorsionFieldStrength,
) -> Result<TorsionPotential> {
    let data = one_two_kernel(chart, twist, &y.data, Mode::Adjoint);
    let mut out = TorsionPotential::zeros(chart);
    out.data = data;
    Ok(out)
}

/// F_A = d_LC A + [A wedge A]/2: componentwise
/// F_{ab} = (d_LC A)_{ab} + [A_a, A_b].
pub fn field_strength(chart: &MetricChart, a: &TorsionPotential) -> Result<TorsionFieldStrength> {
    a.check_shape(chart)?;
    let n = chart.n();
    let mut f = d_a_one_form(chart, None, a)?;
    let mut pa = vec![0.0; n * n];
    let mut pb = vec![0.0; n * n];
    let mut com = vec![0.0; n * n];
    for x in chart.sites() {
        for ai in 0..n {
            for bi in 0..n {
                if ai == bi {
                    continue;
                }
                for j in 0..n {
                    for k in 0..n {
                        pa[j * n + k] = a.get(x, ai, j, k);
                        pb[j * n + k] = a.get(x, bi, j, k);
                    }
                }
                so_commutator(&chart.sig, n, &pa, &pb, &mut com);
                for j in 0..n {
                    for k in 0..n {
                        let v = f.get(x, ai, bi, j, k) + com[j * n + k];
                        f.set(x, ai, bi, j, k, v);
                    }
                }
            }
        }
    }
    Ok(f)
}

/// Frame coefficients of the metric connection nabla^LC + A.
pub fn metric_connection(chart: &MetricChart, a: &TorsionPotential) -> Result<SoConnection> {
    a.check_shape(chart)?;
    let n = chart.n();
    let sites = chart.lat.len();
    let mut coef = vec![0.0; sites * n * n * n];
    for x in 0..sites {
        for i in 0..n {
            for b in 0..n {
                for c in 0..n {
                    // Omega_{a,bc} = omega_{a,bc} + g(A(e_a) e_c, e_b)
                    coef[((x * n + i) * n + b) * n + c] =
                        chart.omega(x, i, b, c) + a.get(x, i, c, b);
                }
            }
        }
    }
    Ok(SoConnection { n, sites, coef })
}

/// Curvature of a frame connection from its coefficient fields:
/// F(e_a, e_b) = e_a(M_b) - e_b(M_a) + [M_a, M_b] - c_{ab}{}^c M_c,
/// returned in the F[a][b][j][k] = g(F(e_a,e_b) e_j, e_k) convention.
pub fn connection_curvature(chart: &MetricChart, conn: &SoConnection) -> TorsionFieldStrength {
    let n = chart.n();
    let mut out = TorsionFieldStrength::zeros(chart);
    let mut ma = vec![0.0; n * n];
    let mut mb = vec![0.0; n * n];
    let mut com = vec![0.0; n * n];
    for x in chart.sites() {
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                conn.so_matrix(x, a, &mut ma);
                conn.so_matrix(x, b, &mut mb);
                so_commutator(&chart.sig, n, &ma, &mb, &mut com);
                for j in 0..n {
                    for k in 0..n {
                        let da = chart.frame_derivative(x, a, |y| {
                            let mut m = vec![0.0; n * n];
                            conn.so_matrix(y, b, &mut m);
                            m[j * n + k]
                        });
                        let db = chart.frame_derivative(x, b, |y| {
                            let mut m = vec![0.0; n * n];
                            conn.so_matrix(y, a, &mut m);
                            m[j * n + k]
                        });
                        let mut cterm = 0.0;
                        if !chart.is_flat_preset() {
                            for c in 0..n {
                                let sc = chart.struct_coeff(x, a, b, c);
                                if sc != 0.0 {
                                    let mut m = vec![0.0; n * n];
                                    conn.so_matrix(x, c, &mut m);
                                    cterm += sc * m[j * n + k];
                                }
                            }
                        }
                        out.set(x, a, b, j, k, da - db + com[j * n + k] - cterm);
                    }
                }
            }
        }
    }
    out
}

/// Sup norm of the covariant Bianchi combination d_A F_A over the given
/// sites: sum_cyclic (nabla_a F)_{bc} + [A_a, F_{bc}].
pub fn bianchi_residual(
    chart: &MetricChart,
    a: &TorsionPotential,
    f: &TorsionFieldStrength,
    sites: &[usize],
) -> f64 {
    let n = chart.n();
    let mut worst: f64 = 0.0;
    let mut pa = vec![0.0; n * n];
    let mut pf = vec![0.0; n * n];
    let mut com = vec![0.0; n * n];

    // covariant derivative component (nabla_l F)_{bc, jk}
    let cov = |x: usize, l: usize, b: usize, c: usize, j: usize, k: usize| -> f64 {
        let mut acc = chart.frame_derivative(x, l, |y| f.get(y, b, c, j, k));
        if !chart.is_flat_preset() {
            for m in 0..n {
                acc -= chart.omega_raised(x, l, m, b) * f.get(x, m, c, j, k);
                acc -= chart.omega_raised(x, l, m, c) * f.get(x, b, m, j, k);
                acc -= chart.omega_raised(x, l, m, j) * f.get(x, b, c, m, k);
                acc -= chart.omega_raised(x, l, m, k) * f.get(x, b, c, j, m);
            }
        }
        acc
    };

    for &x in sites {
        for a0 in 0..n {
            for b0 in (a0 + 1)..n {
                for c0 in (b0 + 1)..n {
                    for j in 0..n {
                        for k in (j + 1)..n {
                            let mut acc = 0.0;
                            for (l, b, c) in [(a0, b0, c0), (b0, c0, a0), (c0, a0, b0)] {
                                acc += cov(x, l, b, c, j, k);
                                for jj in 0..n {
                                    for kk in 0..n {
                                        pa[jj * n + kk] = a.get(x, l, jj, kk);
                                        pf[jj * n + kk] = f.get(x, b, c, jj, kk);
                                    }
                                }
                                so_commutator(&chart.sig, n, &pa, &pf, &mut com);
                                acc += com[j * n + k];
                            }
                            worst = worst.max(acc.abs());
                        }
                    }
                }
            }
        }
    }
    worst
}

pub fn so_one_inner(chart: &MetricChart, x: &TorsionPotential, y: &TorsionPotential) -> f64 {
    let n = chart.n();
    let mut acc = 0.0;
    for s in chart.sites() {
        let w = chart.weight(s);
        for a in 0..n {
            for j in 0..n {
                for k in 0..n {
                    acc += w
                        * chart.sig.eta(a)
                        * 0.5
                        * chart.sig.eta(j)
                        * chart.sig.eta(k)
                        * x.get(s, a, j, k)
                        * y.get(s, a, j, k);
                }
            }
        }
    }
    acc
}

pub fn so_one_norm(chart: &MetricChart, x: &TorsionPotential) -> f64 {
    so_one_inner(chart, x, x).abs().sqrt()
}

pub fn so_two_inner(
    chart: &MetricChart,
    x: &TorsionFieldStrength,
    y: &TorsionFieldStrength,
) -> f64 {
    let n = chart.n();
    let mut acc = 0.0;
    for s in chart.sites() {
        let w = chart.weight(s);
        for a in 0..n {
            for b in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        acc += w
                            * 0.25
                            * chart.sig.eta(a)
                            * chart.sig.eta(b)
                            * chart.sig.eta(j)
                            * chart.sig.eta(k)
                            * x.get(s, a, b, j, k)
                            * y.get(s, a, b, j, k);
                    }
                }
            }
        }
    }
    acc
}

pub fn so_two_norm(chart: &MetricChart, x: &TorsionFieldStrength) -> f64 {
    so_two_inner(chart, x, x).abs().sqrt()
}
