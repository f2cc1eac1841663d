//! Gamma representations, twisted spinor fields, covariant derivatives,
//! Dirac operators and their first/second order decompositions.

mod bochner;
mod dirac;
mod field;
mod gamma;

pub use bochner::{
    bochner_cov_at, bochner_cov_at_off, bochner_decompose, bochner_laplacian_at,
    bochner_laplacian_at_off, second_order_decompose,
    trace_v_both_sides, zero_order_residual, BochnerDecomposition, SecondOrderDecomposition,
};
pub use dirac::{
    covariant_at, leg_to_fiber, potential_leg_matrix, spinor_to_fiber, twister,
    twister_contraction, DiracEnv, DiracOperator, SpinorOneForm, ZeroOrderPart,
};
pub use field::{fiber_pair, lattice_pair, TwistedSpinorField};
pub use gamma::GammaRep;
