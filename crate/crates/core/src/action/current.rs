use crate::error::Result;
use crate::geometry::MetricChart;
use crate::spinor::{GammaRep, TwistedSpinorField};
use crate::torsion::TorsionPotential;
use num_complex::Complex64;

/// Spin current J[k][i][j] = Re <psi_i, gamma_k psi_j>_S with lowered legs
/// psi_i = eta_ii psi^i and gamma_k = eta_kk gamma^k. Antisymmetric in
/// (i, j) because the Clifford action is anti-hermitian. Stored with the
/// same per-site n^3 layout as a torsion potential.
#[derive(Debug, Clone)]
pub struct SpinCurrent {
    pub field: TorsionPotential,
}

pub fn spin_current(
    chart: &MetricChart,
    gamma: &GammaRep,
    psi: &TwistedSpinorField,
) -> Result<SpinCurrent> {
    psi.check_shape(chart)?;
    let n = chart.n();
    let d = gamma.d;
    let mut out = TorsionPotential::zeros(chart);
    for x in chart.sites() {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let eta = chart.sig.eta(k) * chart.sig.eta(i) * chart.sig.eta(j);
                    // <psi^i, gamma^k psi^j> = psi^i{}^dagger H gamma^k psi^j
                    let mut acc = Complex64::new(0.0, 0.0);
                    for a in 0..d {
                        for b in 0..d {
                            for c in 0..d {
                                acc += psi.get(x, i, a).conj()
                                    * gamma.hermitian_form[(a, b)]
                                    * gamma.gammas[k][(b, c)]
                                    * psi.get(x, j, c);
                            }
                        }
                    }
                    out.set(x, k, i, j, eta * acc.re);
                }
            }
        }
    }
    // antisymmetry in (i, j) holds by anti-hermiticity; enforce the exact
    // storage invariant against rounding asymmetry
    for x in chart.sites() {
        for k in 0..n {
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = 0.5 * (out.get(x, k, i, j) - out.get(x, k, j, i));
                    out.set(x, k, i, j, v);
                    out.set(x, k, j, i, -v);
                }
            }
        }
    }
    Ok(SpinCurrent { field: out })
}
