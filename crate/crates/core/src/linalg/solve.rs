use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Col;

use super::{norm2, CsrMatrix};
use crate::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Relative residual target `‖Mx − b‖ ≤ tol ‖b‖` (absolute when `b = 0`).
    pub tol: f64,
    /// Iterative refinement steps reusing the factorization.
    pub max_refinements: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOLERANCE,
            max_refinements: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub x: Vec<f64>,
    /// Achieved relative residual.
    pub residual: f64,
}

pub fn solve(m: &CsrMatrix, b: &[f64], tol: f64) -> Result<Vec<f64>> {
    solve_with(
        m,
        b,
        SolveOptions {
            tol,
            ..Default::default()
        },
    )
    .map(|r| r.x)
}

fn relative_residual(m: &CsrMatrix, x: &[f64], b: &[f64], scale: f64) -> (Vec<f64>, f64) {
    let r: Vec<f64> = m.matvec(x).iter().zip(b).map(|(ax, b)| b - ax).collect();
    let res = norm2(&r) / scale;
    (r, res)
}

/// Sparse LU with partial pivoting followed by iterative refinement.
pub fn solve_with(m: &CsrMatrix, b: &[f64], opts: SolveOptions) -> Result<SolveReport> {
    let n = m.nrows();
    if m.ncols() != n || b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix {}x{} with right-hand side of length {}",
            n,
            m.ncols(),
            b.len()
        )));
    }
    if !m.is_finite() {
        return Err(Error::Singular("matrix has non-finite entries".into()));
    }
    let bnorm = norm2(b);
    let scale = if bnorm > 0.0 { bnorm } else { 1.0 };
    if bnorm == 0.0 {
        return Ok(SolveReport {
            x: vec![0.0; n],
            residual: 0.0,
        });
    }

    let triplets: Vec<_> = m
        .triplets()
        .map(|(i, j, v)| Triplet::new(i, j, v))
        .collect();
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Singular(format!("could not build sparse matrix: {e:?}")))?;
    let lu = mat
        .sp_lu()
        .map_err(|e| Error::Singular(format!("LU factorization failed: {e:?}")))?;

    let solve_col = |rhs: &[f64]| -> Vec<f64> {
        let col = Col::from_fn(n, |i| rhs[i]);
        let sol = lu.solve(&col);
        (0..n).map(|i| sol[i]).collect()
    };

    let mut x = solve_col(b);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular(
            "LU factorization produced non-finite values (zero pivot)".into(),
        ));
    }
    let (mut r, mut res) = relative_residual(m, &x, b, scale);
    for _ in 0..opts.max_refinements {
        if res <= opts.tol {
            break;
        }
        let dx = solve_col(&r);
        let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + d).collect();
        let (r2, res2) = relative_residual(m, &trial, b, scale);
        if res2.is_nan() || res2 >= res {
            break;
        }
        x = trial;
        r = r2;
        res = res2;
    }
    if !res.is_finite() {
        return Err(Error::Singular("residual is not finite".into()));
    }
    if res > opts.tol {
        return Err(Error::NotConverged {
            residual: res,
            tol: opts.tol,
        });
    }
    Ok(SolveReport { x, residual: res })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Lcg;

    #[test]
    fn identity() {
        let b = vec![1.0, -2.0, 3.5];
        assert_eq!(solve(&CsrMatrix::identity(3), &b, 1e-12).unwrap(), b);
    }

    #[test]
    fn two_by_two() {
        let m = CsrMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let x = solve(&m, &[3.0, 4.0], 1e-12).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonally_dominant_manufactured() {
        let n = 100;
        let mut rng = Lcg::new(21);
        let mut t = Vec::new();
        let mut rowsum = vec![0.0; n];
        for _ in 0..500 {
            let i = (rng.next_u64() % n as u64) as usize;
            let j = (rng.next_u64() % n as u64) as usize;
            if i != j {
                let v = 2.0 * rng.next_f64() - 1.0;
                rowsum[i] += v.abs();
                t.push((i, j, v));
            }
        }
        for (i, s) in rowsum.iter().enumerate() {
            t.push((i, i, s + 1.0 + rng.next_f64()));
        }
        let m = CsrMatrix::from_triplets(n, n, t);
        let b = m.matvec(&vec![1.0; n]);
        let r = solve_with(&m, &b, SolveOptions::default()).unwrap();
        assert!(r.residual <= 1e-12);
        assert!(r.x.iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let m = CsrMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        assert_eq!(solve(&m, &[0.0, 0.0], 1e-12).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn singular_is_reported() {
        let m = CsrMatrix::from_dense(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let err = solve(&m, &[1.0, 2.0], 1e-12).unwrap_err();
        assert!(
            matches!(err, Error::Singular(_) | Error::NotConverged { .. }),
            "{err:?}"
        );
        let m = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0)]);
        assert!(solve(&m, &[1.0, 1.0], 1e-12).is_err());
    }
}
