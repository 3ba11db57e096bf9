//! Matrices and load vectors of the discrete advection form, the
//! stabilizations and the weak boundary penalties.
//!
//! All matrices are indexed `(test dof, trial dof)`, i.e. entry `(i, j)` is
//! `form(φ_j, ψ_i)`. Element and face integrals use Gauss rules of
//! exactness `2k + 2` by default; coefficients are evaluated pointwise.

mod forms;
mod rhs;

pub use forms::{
    assemble_advection, assemble_boundary_penalty, assemble_cip, assemble_dg_jump, assemble_gls,
    cip_face_weight, BoundarySide, GlsVariant,
};
pub(crate) use rhs::data_boundary_side;
pub use rhs::{
    assemble_load, assemble_rhs, boundary_data_vector, data_energy, gls_data_vector,
    stabilization_data, RhsTarget,
};

use crate::space::{Continuity, FiniteElementSpace};
use crate::{Error, Result};

/// Default quadrature exactness for assembly with polynomial degree `k`.
pub fn assembly_exactness(degree: usize) -> usize {
    2 * degree + 2
}

pub(crate) fn require(
    space: &FiniteElementSpace,
    continuity: Continuity,
    method: &'static str,
) -> Result<()> {
    if space.continuity() != continuity {
        return Err(Error::IncompatibleSpace {
            method,
            required: match continuity {
                Continuity::Continuous => "continuous",
                Continuity::Discontinuous => "discontinuous",
            },
        });
    }
    Ok(())
}
