use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Solver selection and termination parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: String,
    pub tol: f64,
    pub max_iter: usize,
    /// Initial trial step for line searches, the fixed step otherwise.
    pub step: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method: "nonlinear_cg".to_string(),
            tol: 1e-8,
            max_iter: 10_000,
            step: 0.25,
            seed: 1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Config("solver tol must be positive".into()));
        }
        if self.max_iter < 1 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        if !(self.step > 0.0) {
            return Err(Error::Config("step must be positive".into()));
        }
        minimizer_by_name(&self.method)?;
        Ok(())
    }
}

pub struct StepOutcome {
    pub value: f64,
    pub grad_norm: f64,
    pub accepted: bool,
}

/// One descent strategy. Implementations keep their own internal state
/// (search directions, previous gradients) between `step` calls.
pub trait Minimizer {
    fn name(&self) -> &'static str;
    /// Advance `x` by one iteration using the objective/gradient closure.
    /// The closure writes the gradient into its second argument and
    /// returns the objective value.
    fn step(
        &mut self,
        f: &mut dyn FnMut(&[f64], &mut [f64]) -> f64,
        x: &mut [f64],
        cfg: &SolverConfig,
    ) -> StepOutcome;
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Backtracking line search along `dir` from `x0`; returns the accepted
/// step (0 when no decrease was found down to the floor).
fn backtrack(
    f: &mut dyn FnMut(&[f64], &mut [f64]) -> f64,
    x0: &[f64],
    f0: f64,
    g0_dot_dir: f64,
    dir: &[f64],
    t0: f64,
    scratch_x: &mut [f64],
    scratch_g: &mut [f64],
) -> (f64, f64) {
    let mut t = t0;
    let c1 = 1e-4;
    for _ in 0..40 {
        for (xi, (x0i, di)) in scratch_x.iter_mut().zip(x0.iter().zip(dir)) {
            *xi = x0i + t * di;
        }
        let ft = f(scratch_x, scratch_g);
        if ft <= f0 + c1 * t * g0_dot_dir && ft.is_finite() {
            return (t, ft);
        }
        t *= 0.5;
    }
    (0.0, f0)
}

/// Steepest descent with Armijo backtracking.
pub struct GradientDescent {
    grad: Vec<f64>,
    last_step: f64,
}

impl GradientDescent {
    pub fn new() -> Self {
        GradientDescent {
            grad: Vec::new(),
            last_step: 0.0,
        }
    }
}

impl Default for GradientDescent {
    fn default() -> Self {
        Self::new()
    }
}

impl Minimizer for GradientDescent {
    fn name(&self) -> &'static str {
        "gradient_descent"
    }

    fn step(
        &mut self,
        f: &mut dyn FnMut(&[f64], &mut [f64]) -> f64,
        x: &mut [f64],
        cfg: &SolverConfig,
    ) -> StepOutcome {
        let nvar = x.len();
        self.grad.resize(nvar, 0.0);
        let f0 = f(x, &mut self.grad);
        let gnorm = norm(&self.grad);
        if gnorm == 0.0 {
            return StepOutcome {
                value: f0,
                grad_norm: 0.0,
                accepted: true,
            };
        }
        let dir: Vec<f64> = self.grad.iter().map(|g| -g).collect();
        let t0 = if self.last_step > 0.0 {
            2.0 * self.last_step
        } else {
            cfg.step / gnorm.max(1.0)
        };
        let mut sx = vec![0.0; nvar];
        let mut sg = vec![0.0; nvar];
        let (t, ft) = backtrack(f, x, f0, -gnorm * gnorm, &dir, t0, &mut sx, &mut sg);
        if t > 0.0 {
            x.copy_from_slice(&sx);
            self.last_step = t;
        }
        StepOutcome {
            value: ft,
            grad_norm: gnorm,
            accepted: t > 0.0,
        }
    }
}

/// Polak-Ribiere conjugate gradient with automatic restarts and Armijo
/// backtracking.
pub struct NonlinearCg {
    prev_grad: Vec<f64>,
    dir: Vec<f64>,
    last_step: f64,
}

impl NonlinearCg {
    pub fn new() -> Self {
        NonlinearCg {
            prev_grad: Vec::new(),
            dir: Vec::new(),
            last_step: 0.0,
        }
    }
}

impl Default for NonlinearCg {
    fn default() -> Self {
        Self::new()
    }
}

impl Minimizer for NonlinearCg {
    fn name(&self) -> &'static str {
        "nonlinear_cg"
    }

    fn step(
        &mut self,
        f: &mut dyn FnMut(&[f64], &mut [f64]) -> f64,
        x: &mut [f64],
        cfg: &SolverConfig,
    ) -> StepOutcome {
        let nvar = x.len();
        let mut grad = vec![0.0; nvar];
        let f0 = f(x, &mut grad);
        let gnorm = norm(&grad);
        if gnorm == 0.0 {
            return StepOutcome {
                value: f0,
                grad_norm: 0.0,
                accepted: true,
            };
        }
        if self.dir.len() != nvar {
            self.prev_grad = vec![0.0; nvar];
            self.dir = vec![0.0; nvar];
            self.last_step = 0.0;
        }
        let prev_norm2 = dot(&self.prev_grad, &self.prev_grad);
        let mut beta = 0.0;
        if prev_norm2 > 0.0 {
            let num: f64 = grad
                .iter()
                .zip(&self.prev_grad)
                .map(|(g, p)| g * (g - p))
                .sum();
            beta = (num / prev_norm2).max(0.0);
        }
        let mut dir: Vec<f64> = grad
            .iter()
            .zip(&self.dir)
            .map(|(g, d)| -g + beta * d)
            .collect();
        let mut slope = dot(&grad, &dir);
        if slope >= 0.0 {
            // not a descent direction: restart
            dir = grad.iter().map(|g| -g).collect();
            slope = -gnorm * gnorm;
        }
        let t0 = if self.last_step > 0.0 {
            2.0 * self.last_step
        } else {
            cfg.step / gnorm.max(1.0)
        };
        let mut sx = vec![0.0; nvar];
        let mut sg = vec![0.0; nvar];
        let (t, ft) = backtrack(f, x, f0, slope, &dir, t0, &mut sx, &mut sg);
        if t > 0.0 {
            x.copy_from_slice(&sx);
            self.last_step = t;
            self.prev_grad = grad.clone();
            self.dir = dir;
        } else {
            self.prev_grad = vec![0.0; nvar];
            self.dir = vec![0.0; nvar];
        }
        StepOutcome {
            value: ft,
            grad_norm: gnorm,
            accepted: t > 0.0,
        }
    }
}

/// Fixed-step relaxation x <- x - step * grad.
pub struct FixedPointStep {
    grad: Vec<f64>,
}

impl FixedPointStep {
    pub fn new() -> Self {
        FixedPointStep { grad: Vec::new() }
    }
}

impl Default for FixedPointStep {
    fn default() -> Self {
        Self::new()
    }
}

impl Minimizer for FixedPointStep {
    fn name(&self) -> &'static str {
        "fixed_point"
    }

    fn step(
        &mut self,
        f: &mut dyn FnMut(&[f64], &mut [f64]) -> f64,
        x: &mut [f64],
        cfg: &SolverConfig,
    ) -> StepOutcome {
        let nvar = x.len();
        self.grad.resize(nvar, 0.0);
        let f0 = f(x, &mut self.grad);
        for (xi, g) in x.iter_mut().zip(&self.grad) {
            *xi -= cfg.step * g;
        }
        StepOutcome {
            value: f0,
            grad_norm: norm(&self.grad),
            accepted: true,
        }
    }
}

type MinimizerFactory = fn() -> Box<dyn Minimizer>;

fn registry() -> BTreeMap<&'static str, MinimizerFactory> {
    let mut m: BTreeMap<&'static str, MinimizerFactory> = BTreeMap::new();
    m.insert("gradient_descent", || Box::new(GradientDescent::new()));
    m.insert("nonlinear_cg", || Box::new(NonlinearCg::new()));
    m.insert("fixed_point", || Box::new(FixedPointStep::new()));
    m
}

pub fn minimizer_names() -> Vec<&'static str> {
    registry().keys().cloned().collect()
}

pub fn minimizer_by_name(name: &str) -> Result<Box<dyn Minimizer>> {
    registry()
        .get(name)
        .map(|f| f())
        .ok_or_else(|| Error::Config(format!("unknown solver method '{name}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(x: &[f64], g: &mut [f64]) -> f64 {
        // f = x0^2 + 10 x1^2
        g[0] = 2.0 * x[0];
        g[1] = 20.0 * x[1];
        x[0] * x[0] + 10.0 * x[1] * x[1]
    }

    #[test]
    fn all_registered_methods_minimize_a_quadratic() {
        for name in minimizer_names() {
            let mut m = minimizer_by_name(name).unwrap();
            let cfg = SolverConfig {
                method: name.to_string(),
                tol: 1e-10,
                max_iter: 500,
                step: 0.05,
                seed: 0,
            };
            let mut x = vec![1.0, 1.0];
            let mut f = quad;
            for _ in 0..cfg.max_iter {
                let out = m.step(&mut f, &mut x, &cfg);
                if out.grad_norm < 1e-9 {
                    break;
                }
            }
            assert!(
                x[0].abs() < 1e-4 && x[1].abs() < 1e-4,
                "{name} ended at {x:?}"
            );
        }
    }

    #[test]
    fn unknown_method_rejected() {
        assert!(minimizer_by_name("newton_krylov").is_err());
        let cfg = SolverConfig {
            method: "nope".into(),
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
