use super::CsrMatrix;
use crate::{Error, Result};

/// Monolithic saddle-point matrix `[[A, S_a], [−S_p, Aᵀ]]`.
///
/// Unknowns are ordered with all primal dofs first, then all dual dofs, so
/// entry `(n + i, j)` is `−S_p(i, j)` and entry `(n + i, n + j)` is `A(j, i)`.
pub fn compose_block(a: &CsrMatrix, s_a: &CsrMatrix, s_p: &CsrMatrix) -> Result<CsrMatrix> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{}",
            n,
            a.ncols()
        )));
    }
    for (name, s) in [("S_a", s_a), ("S_p", s_p)] {
        if (s.nrows(), s.ncols()) != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "{name} is {}x{}, expected {n}x{n}",
                s.nrows(),
                s.ncols()
            )));
        }
    }
    let mut t = Vec::with_capacity(2 * a.nnz() + s_a.nnz() + s_p.nnz());
    t.extend(a.triplets());
    t.extend(s_a.triplets().map(|(i, j, v)| (i, n + j, v)));
    t.extend(s_p.triplets().map(|(i, j, v)| (n + i, j, -v)));
    t.extend(a.triplets().map(|(i, j, v)| (n + j, n + i, v)));
    Ok(CsrMatrix::from_triplets(2 * n, 2 * n, t))
}

pub fn concat(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().chain(b).copied().collect()
}
