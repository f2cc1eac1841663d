//! Torsion potentials, torsion tensors, the inversion formula, general
//! metric connections and the torsion field strength.
//!
//! Component conventions, used verbatim everywhere in this crate:
//!   A[i][j][k] = g(A(e_i) e_j, e_k)          (antisymmetric in j,k)
//!   T[i][j][k] = g(tau(e_i, e_j), e_k)       (antisymmetric in i,j)
//!   F[a][b][j][k] = g(F(e_a, e_b) e_j, e_k)  (antisymmetric in a,b and j,k)
//! All indices are orthonormal-frame indices; raising/lowering is the
//! diagonal eta of the signature.

mod fields;
mod strength;

pub use fields::{
    potential_from_torsion, so_commutator, torsion_from_potential, trace_torsion, SoConnection,
    TorsionPotential, TorsionTensor,
};
pub use strength::{
    bianchi_residual, connection_curvature, d_a_one_form, delta_a_two_form, field_strength,
    metric_connection, so_one_inner, so_one_norm, so_two_inner, so_two_norm, TorsionFieldStrength,
};
