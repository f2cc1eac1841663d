use crate::dynamics::solver::SolverConfig;
use crate::error::{Error, Result};
use crate::geometry::MetricChart;
use crate::spinor::{DiracEnv, DiracOperator, GammaRep, TwistedSpinorField};
use num_complex::Complex64;

pub struct DiracSolveReport {
    pub psi: TwistedSpinorField,
    /// Least-squares residual ||D psi - chi|| per iteration (plain l2),
    /// non-increasing for the normal-equation conjugate gradient.
    pub residuals: Vec<f64>,
    pub converged: bool,
}

/// Solve D psi = chi by conjugate gradient on the normal equations
/// (CGLS). With `chi = None` the solve relaxes a random start toward the
/// kernel sector under the constraint ||psi|| = 1.
pub fn solve_dirac(
    chart: &MetricChart,
    gamma: &GammaRep,
    op: &DiracOperator,
    chi: Option<&TwistedSpinorField>,
    psi0: &TwistedSpinorField,
    cfg: &SolverConfig,
) -> Result<DiracSolveReport> {
    cfg.validate()?;
    if !chart.is_flat_preset() {
        return Err(Error::Chart(
            "least-squares Dirac solve is implemented for flat charts".into(),
        ));
    }
    let env = DiracEnv::new(chart, gamma);
    match chi {
        Some(rhs) => cgls(chart, &env, op, rhs, psi0, cfg),
        None => kernel_relax(chart, &env, op, psi0, cfg),
    }
}

fn cgls(
    chart: &MetricChart,
    env: &DiracEnv,
    op: &DiracOperator,
    rhs: &TwistedSpinorField,
    psi0: &TwistedSpinorField,
    cfg: &SolverConfig,
) -> Result<DiracSolveReport> {
    let mut psi = psi0.clone();
    // r = chi - D psi, s = D^dagger r
    let mut r = rhs.clone();
    let dpsi = op.apply(env, &psi)?;
    r.axpy(Complex64::new(-1.0, 0.0), &dpsi);
    let mut s = op.apply_adjoint_plain(env, &r)?;
    let mut p = s.clone();
    let mut snorm2 = s.dot_plain(&s).re;
    let mut residuals = vec![r.norm_plain()];
    let mut converged = residuals[0] <= cfg.tol;

    for _ in 0..cfg.max_iter {
        if converged {
            break;
        }
        let dp = op.apply(env, &p)?;
        let dp2 = dp.dot_plain(&dp).re;
        if dp2 == 0.0 {
            break;
        }
        let alpha = snorm2 / dp2;
        psi.axpy(Complex64::new(alpha, 0.0), &p);
        r.axpy(Complex64::new(-alpha, 0.0), &dp);
        let res = r.norm_plain();
        residuals.push(res);
        if !res.is_finite() {
            return Err(Error::Numerical("dirac solve diverged".into()));
        }
        if res <= cfg.tol {
            converged = true;
            break;
        }
        s = op.apply_adjoint_plain(env, &r)?;
        let snew = s.dot_plain(&s).re;
        let beta = snew / snorm2;
        snorm2 = snew;
        // p = s + beta p
        let mut pnew = s.clone();
        pnew.axpy(Complex64::new(beta, 0.0), &p);
        p = pnew;
    }
    let _ = chart;
    Ok(DiracSolveReport {
        psi,
        residuals,
        converged,
    })
}

/// Normalized relaxation toward the kernel: projected gradient descent on
/// ||D psi||^2 with the norm pinned to one.
fn kernel_relax(
    chart: &MetricChart,
    env: &DiracEnv,
    op: &DiracOperator,
    psi0: &TwistedSpinorField,
    cfg: &SolverConfig,
) -> Result<DiracSolveReport> {
    let mut psi = psi0.clone();
    let nrm = psi.norm_plain();
    if nrm == 0.0 {
        return Err(Error::InvalidInput(
            "kernel relaxation needs a nonzero start".into(),
        ));
    }
    psi.scale(Complex64::new(1.0 / nrm, 0.0));
    let mut residuals = Vec::new();
    let mut converged = false;
    // conservative fixed step below the operator-norm bound of D^dagger D
    let hmin = chart.lat.h.iter().cloned().fold(f64::INFINITY, f64::min);
    let bound = {
        let n = chart.n() as f64;
        let deriv = n / (hmin * hmin);
        let pot = op.coupling.abs()
            * op.potential
                .as_ref()
                .map(|p| p.norm_inf() * n)
                .unwrap_or(0.0);
        2.0 * (deriv.sqrt() + pot + 1.0).powi(2)
    };
    let step = 1.0 / bound;
    for _ in 0..cfg.max_iter {
        let dpsi = op.apply(env, &psi)?;
        let res = dpsi.norm_plain();
        residuals.push(res);
        if res <= cfg.tol {
            converged = true;
            break;
        }
        let grad = op.apply_adjoint_plain(env, &dpsi)?;
        psi.axpy(Complex64::new(-step, 0.0), &grad);
        let nrm = psi.norm_plain();
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::Numerical(
                "kernel relaxation collapsed to zero".into(),
            ));
        }
        psi.scale(Complex64::new(1.0 / nrm, 0.0));
    }
    Ok(DiracSolveReport {
        psi,
        residuals,
        converged,
    })
}
