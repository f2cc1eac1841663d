use crate::action::current::{spin_current, SpinCurrent};
use crate::action::total::CouplingForm;
use crate::error::Result;
use crate::geometry::MetricChart;
use crate::spinor::{DiracEnv, DiracOperator, GammaRep, TwistedSpinorField};
use crate::torsion::{delta_a_two_form, field_strength, TorsionPotential};
use num_complex::Complex64;

/// Analytic gradient of the discrete total action.
///
/// `grad_a` is defined against the independent components: for a variation
/// dA, dS = sum_x sum_{k, i<j} grad_a[x][k][i][j] dA[x][k][i][j].
/// `grad_psi` represents dS = Re sum conj(grad_psi) dpsi over all complex
/// entries.
pub struct ActionGradient {
    pub grad_a: TorsionPotential,
    pub grad_psi: TwistedSpinorField,
}

/// Gradient of the total action in the given coupling form:
/// grad_A = w eta_k eta_i eta_j [ 8 lambda_t (delta_A F_A) - 2 kappa J ],
/// grad_psi = 2 w eta_leg H (D_A psi).
pub fn action_gradient(
    chart: &MetricChart,
    gamma: &GammaRep,
    a: &TorsionPotential,
    psi: &TwistedSpinorField,
    form: CouplingForm,
    g: f64,
) -> Result<ActionGradient> {
    let kappa = form.fermion_coupling(g);
    let lam = form.torsion_coefficient(chart.n(), gamma.d, g);
    gradient_with_coefficients(chart, gamma, a, psi, kappa, lam)
}

fn gradient_with_coefficients(
    chart: &MetricChart,
    gamma: &GammaRep,
    a: &TorsionPotential,
    psi: &TwistedSpinorField,
    kappa: f64,
    lam: f64,
) -> Result<ActionGradient> {
    a.check_shape(chart)?;
    psi.check_shape(chart)?;
    let n = chart.n();

    let f = field_strength(chart, a)?;
    let delta_f = delta_a_two_form(chart, Some(a), &f)?;
    let j = spin_current(chart, gamma, psi)?;

    let mut grad_a = TorsionPotential::zeros(chart);
    for x in chart.sites() {
        let w = chart.weight(x);
        for k in 0..n {
            for i in 0..n {
                for jj in 0..n {
                    if i == jj {
                        continue;
                    }
                    let eta = chart.sig.eta(k) * chart.sig.eta(i) * chart.sig.eta(jj);
                    let v = w
                        * eta
                        * (8.0 * lam * delta_f.get(x, k, i, jj)
                            - 2.0 * kappa * j.field.get(x, k, i, jj));
                    grad_a.set(x, k, i, jj, v);
                }
            }
        }
    }

    // fermion gradient: 2 w eta_leg H (D_A psi)
    let env = DiracEnv::new(chart, gamma);
    let op = DiracOperator::quantized_connection(Some(a.clone()), kappa);
    let dpsi = op.apply(&env, psi)?;
    let mut grad_psi = TwistedSpinorField::zeros(chart, gamma);
    for x in chart.sites() {
        let w = chart.weight(x);
        for leg in 0..n {
            let eta = chart.sig.eta(leg);
            for al in 0..gamma.d {
                let mut acc = Complex64::new(0.0, 0.0);
                for b in 0..gamma.d {
                    acc += gamma.hermitian_form[(al, b)] * dpsi.get(x, leg, b);
                }
                grad_psi.set(x, leg, al, acc * Complex64::new(2.0 * w * eta, 0.0));
            }
        }
    }
    Ok(ActionGradient { grad_a, grad_psi })
}

/// Euclidean objective driven by the static solver:
/// E(A) = sum_x w [ 1/4 ||F_A||^2
///       + g sum_{kij} eta_k eta_i eta_j A_{kij} J_{kij} ].
/// Its stationarity condition is exactly delta_A F_A + g J = 0; relative
/// to the Lorentzian-form breakdown the matter coupling enters with the
/// flipped sign of the Euclidean continuation.
pub fn solver_objective(
    chart: &MetricChart,
    a: &TorsionPotential,
    j: &SpinCurrent,
    g: f64,
) -> Result<f64> {
    a.check_shape(chart)?;
    let n = chart.n();
    let f = field_strength(chart, a)?;
    let mut acc = 0.0;
    for x in chart.sites() {
        let w = chart.weight(x);
        acc += 0.25 * w * f.norm2_density(chart, x);
        let mut cpl = 0.0;
        for k in 0..n {
            for i in 0..n {
                for jj in 0..n {
                    cpl += chart.sig.eta(k)
                        * chart.sig.eta(i)
                        * chart.sig.eta(jj)
                        * a.get(x, k, i, jj)
                        * j.field.get(x, k, i, jj);
                }
            }
        }
        acc += w * g * cpl;
    }
    Ok(acc)
}

/// Gradient of `solver_objective` against independent (i < j) components:
/// grad[x][k][i][j] = 2 w eta_k eta_i eta_j (delta_A F_A + g J)[x][k][i][j].
/// Also returns the raw residual field delta_A F_A + g J.
pub fn solver_gradient(
    chart: &MetricChart,
    a: &TorsionPotential,
    j: &SpinCurrent,
    g: f64,
) -> Result<(TorsionPotential, TorsionPotential)> {
    let n = chart.n();
    let f = field_strength(chart, a)?;
    let mut residual = delta_a_two_form(chart, Some(a), &f)?;
    residual.axpy(g, &j.field);
    let mut grad = TorsionPotential::zeros(chart);
    for x in chart.sites() {
        let w = chart.weight(x);
        for k in 0..n {
            for i in 0..n {
                for jj in 0..n {
                    if i == jj {
                        continue;
                    }
                    let eta = chart.sig.eta(k) * chart.sig.eta(i) * chart.sig.eta(jj);
                    grad.set(x, k, i, jj, 2.0 * w * eta * residual.get(x, k, i, jj));
                }
            }
        }
    }
    Ok((grad, residual))
}
