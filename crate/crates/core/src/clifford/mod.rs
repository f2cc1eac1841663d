//! Exact finite-dimensional Clifford/Grassmann algebra over a signature
//! (p, q), the symbol map between them, the quantization map on End-valued
//! forms, the canonical one-form and the associated projection pair.

mod multivector;
mod oneform;
mod symbol;

pub use multivector::{blade_grade, blade_product, Multivector};
pub use oneform::{ext_theta, project_pq, quantize_one_form, theta, EndValuedOneForm};
pub use symbol::{gamma_cl_apply, gamma_cl_vector_apply, SymbolMap};
