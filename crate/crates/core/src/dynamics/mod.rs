//! Solvers for the coupled field equations: the static Yang-Mills-like
//! torsion equation with spinor source, least-squares Dirac solves, and
//! linearized torsion wave evolution.

mod dirac_solve;
mod solver;
mod statics;
mod wave;
mod weak;

pub use dirac_solve::{solve_dirac, DiracSolveReport};
pub use solver::{
    minimizer_by_name, minimizer_names, FixedPointStep, GradientDescent, Minimizer, NonlinearCg,
    SolverConfig, StepOutcome,
};
pub use statics::{solve_static, solve_static_with_source, StaticHistoryRow, StaticSolveReport};
pub use wave::{cfl_limit, discrete_dispersion, evolve_wave, synchronize_velocity, EvolutionState, WaveReport};
pub use weak::{weak_coupling_report, WeakCouplingReport};
