use std::io::{self, Write};

use crate::{Error, Result};

/// Compressed sparse row matrix with sorted, unique column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Accumulates `(row, col, value)` contributions; duplicates are summed.
#[derive(Debug, Clone, Default)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries.push((row, col, value));
    }

    /// Scatters a dense block `block[i * cols.len() + j]`.
    pub fn add_block(&mut self, rows: &[usize], cols: &[usize], block: &[f64]) {
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                self.push(r, c, block[i * cols.len() + j]);
            }
        }
    }

    pub fn build(self) -> CsrMatrix {
        CsrMatrix::from_triplets(self.nrows, self.ncols, self.entries)
    }
}

impl CsrMatrix {
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut entries: Vec<(usize, usize, f64)>,
    ) -> Self {
        // stable sort keeps summation order deterministic
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            assert!(
                r < nrows && c < ncols,
                "triplet ({r}, {c}) outside {nrows}x{ncols}"
            );
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::from_triplets(nrows, ncols, Vec::new())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect())
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let ncols = rows.first().map_or(0, Vec::len);
        let mut t = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(rows.len(), ncols, t)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[range.clone()], &self.values[range])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    /// Iterates stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (c, v) = self.row(i);
            c.iter().zip(v).map(move |(&j, &x)| (i, j, x))
        })
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| {
                let (c, v) = self.row(i);
                c.iter().zip(v).map(|(&j, a)| a * x[j]).sum()
            })
            .collect()
    }

    /// `Aᵀ x`.
    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![0.0; self.ncols];
        for (i, j, a) in self.triplets() {
            y[j] += a * x[i];
        }
        y
    }

    /// `xᵀ A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.bilinear_form(x, x)
    }

    /// `yᵀ A x`.
    pub fn bilinear_form(&self, y: &[f64], x: &[f64]) -> f64 {
        super::dot(y, &self.matvec(x))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.triplets().map(|(i, j, v)| (j, i, v)).collect(),
        )
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= alpha);
        m
    }

    /// `self + alpha · other`.
    pub fn add_scaled(&self, other: &Self, alpha: f64) -> Result<Self> {
        if (self.nrows, self.ncols) != (other.nrows, other.ncols) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let t = self
            .triplets()
            .chain(other.triplets().map(|(i, j, v)| (i, j, alpha * v)))
            .collect();
        Ok(Self::from_triplets(self.nrows, self.ncols, t))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, 1.0)
    }

    /// `max |A − Aᵀ|` over all entries.
    pub fn max_asymmetry(&self) -> f64 {
        self.triplets()
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, j, v) in self.triplets() {
            d[i][j] = v;
        }
        d
    }

    /// Matrix Market coordinate format (1-based indices).
    pub fn write_matrix_market(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for (i, j, v) in self.triplets() {
            writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Lcg;

    fn random_sparse(n: usize, m: usize, seed: u64) -> (CsrMatrix, Vec<Vec<f64>>) {
        let mut rng = Lcg::new(seed);
        let mut dense = vec![vec![0.0; m]; n];
        let mut t = Vec::new();
        for _ in 0..3 * n {
            let i = (rng.next_u64() % n as u64) as usize;
            let j = (rng.next_u64() % m as u64) as usize;
            let v = 2.0 * rng.next_f64() - 1.0;
            dense[i][j] += v;
            t.push((i, j, v));
        }
        (CsrMatrix::from_triplets(n, m, t), dense)
    }

    #[test]
    fn duplicates_are_summed_and_columns_sorted() {
        let m = CsrMatrix::from_triplets(
            2,
            3,
            vec![(0, 2, 1.0), (0, 0, 2.0), (0, 2, 0.5), (1, 1, 3.0)],
        );
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.row(0).0, &[0, 2]);
        assert_eq!(m.get(0, 2), 1.5);
        assert_eq!(m.get(1, 0), 0.0);
    }

    #[test]
    fn matvec_matches_dense_reference() {
        for (n, m, seed) in [(50, 50, 1), (17, 33, 2), (1, 1, 3)] {
            let (a, d) = random_sparse(n, m, seed);
            let mut rng = Lcg::new(seed + 10);
            let x: Vec<f64> = (0..m).map(|_| rng.next_f64()).collect();
            let y = a.matvec(&x);
            for i in 0..n {
                let r: f64 = (0..m).map(|j| d[i][j] * x[j]).sum();
                assert!((y[i] - r).abs() < 1e-13);
            }
            let z: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
            let yt = a.matvec_transpose(&z);
            let at = a.transpose().matvec(&z);
            for j in 0..m {
                assert!((yt[j] - at[j]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn arithmetic() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 2.0], vec![0.0, 3.0]]);
        let b = CsrMatrix::identity(2);
        let c = a.add_scaled(&b, 2.0).unwrap();
        assert_eq!(c.to_dense(), vec![vec![3.0, 2.0], vec![0.0, 5.0]]);
        assert_eq!(a.max_asymmetry(), 2.0);
        assert!(a.add(&CsrMatrix::identity(3)).is_err());
        assert_eq!(a.quadratic_form(&[1.0, 1.0]), 6.0);
    }

    #[test]
    fn matrix_market_output() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, -2.5]]);
        let mut buf = Vec::new();
        a.write_matrix_market(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[1], "2 2 2");
        assert!(lines[3].starts_with("2 2 -2.5"));
    }
}
