//! Lattice charts with a metric field: orthonormal frames, Levi-Civita
//! connection, curvature by finite differences, exterior calculus with an
//! exactly adjoint codifferential, Hodge star and discrete integration.

mod chart;
mod curvature;
mod forms;
mod lattice;

pub use chart::{ChartPreset, MetricChart};
pub use curvature::{riemann_frame, riemann_lowered_at, scalar_curvature};
pub use forms::{
    codifferential, d_exterior, eta_product, hodge_star, integrate, kform_inner, kform_norm,
    multi_indices, perm_sign, KForm, ScalarField,
};
pub use lattice::Lattice;
