//! Discretized functionals: the universal and total Dirac actions, the
//! torsion Yang-Mills term, the spin current, and the analytic variational
//! gradient of the discrete total action.

mod current;
mod gradient;
mod total;
mod universal;

pub use current::{spin_current, SpinCurrent};
pub use gradient::{action_gradient, solver_gradient, solver_objective, ActionGradient};
pub use total::{total_action, ActionBreakdown, CouplingForm};
pub use universal::{universal_action, universal_action_closed_form, UniversalActionReport};
