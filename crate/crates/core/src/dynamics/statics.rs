use crate::action::{solver_gradient, solver_objective, spin_current, SpinCurrent};
use crate::dynamics::solver::{minimizer_by_name, SolverConfig};
use crate::error::{Error, Result};
use crate::geometry::MetricChart;
use crate::spinor::{GammaRep, TwistedSpinorField};
use crate::torsion::{so_one_norm, TorsionPotential};

#[derive(Debug, Clone)]
pub struct StaticHistoryRow {
    pub iter: usize,
    pub action: f64,
    pub residual: f64,
}

pub struct StaticSolveReport {
    pub a_star: TorsionPotential,
    pub history: Vec<StaticHistoryRow>,
    pub converged: bool,
    pub final_residual: f64,
    pub iterations: usize,
}

fn pack(a: &TorsionPotential, n: usize) -> Vec<f64> {
    let mut x = Vec::with_capacity(a.sites * n * n * (n - 1) / 2);
    for s in 0..a.sites {
        for k in 0..n {
            for i in 0..n {
                for j in (i + 1)..n {
                    x.push(a.get(s, k, i, j));
                }
            }
        }
    }
    x
}

fn unpack(x: &[f64], a: &mut TorsionPotential, n: usize) {
    let mut it = x.iter();
    for s in 0..a.sites {
        for k in 0..n {
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = *it.next().expect("packed length");
                    a.set(s, k, i, j, v);
                    a.set(s, k, j, i, -v);
                }
            }
        }
    }
}

/// Minimize the Euclidean static objective over the torsion potential with
/// the spinor field held fixed as a source. Terminates when the
/// field-equation residual ||delta_A F_A + g J|| drops below `cfg.tol`.
/// The returned action history is non-increasing for the line-searched
/// methods.
pub fn solve_static(
    chart: &MetricChart,
    gamma: &GammaRep,
    a0: &TorsionPotential,
    psi: &TwistedSpinorField,
    g: f64,
    cfg: &SolverConfig,
) -> Result<StaticSolveReport> {
    cfg.validate()?;
    a0.check_shape(chart)?;
    psi.check_shape(chart)?;
    let current = spin_current(chart, gamma, psi)?;
    solve_static_with_source(chart, a0, &current, g, cfg)
}

/// Source-mode solve against a precomputed spin current.
pub fn solve_static_with_source(
    chart: &MetricChart,
    a0: &TorsionPotential,
    current: &SpinCurrent,
    g: f64,
    cfg: &SolverConfig,
) -> Result<StaticSolveReport> {
    cfg.validate()?;
    let n = chart.n();
    let mut method = minimizer_by_name(&cfg.method)?;
    let mut a = a0.clone();
    let mut x = pack(&a, n);

    let mut work = TorsionPotential::zeros(chart);
    let mut eval = |xs: &[f64], grad_out: &mut [f64]| -> f64 {
        unpack(xs, &mut work, n);
        let value = solver_objective(chart, &work, current, g).expect("objective");
        let (grad_field, _res) = solver_gradient(chart, &work, current, g).expect("gradient");
        let packed = pack(&grad_field, n);
        grad_out.copy_from_slice(&packed);
        value
    };

    let mut history = Vec::new();
    let mut converged = false;
    let mut final_residual = f64::INFINITY;
    let mut iterations = 0;

    for iter in 0..=cfg.max_iter {
        unpack(&x, &mut a, n);
        let (_, residual_field) = solver_gradient(chart, &a, current, g)?;
        let residual = so_one_norm(chart, &residual_field);
        let action = solver_objective(chart, &a, current, g)?;
        if !residual.is_finite() || !action.is_finite() {
            return Err(Error::Numerical(format!(
                "static solve diverged at iteration {iter}: action {action}, residual {residual}"
            )));
        }
        history.push(StaticHistoryRow {
            iter,
            action,
            residual,
        });
        final_residual = residual;
        iterations = iter;
        if residual <= cfg.tol {
            converged = true;
            break;
        }
        if iter == cfg.max_iter {
            break;
        }
        method.step(&mut eval, &mut x, cfg);
    }
    unpack(&x, &mut a, n);
    Ok(StaticSolveReport {
        a_star: a,
        history,
        converged,
        final_residual,
        iterations,
    })
}
