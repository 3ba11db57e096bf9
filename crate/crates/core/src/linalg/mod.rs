//! Sparse matrices, block composition and direct solves.

mod block;
mod csr;
mod solve;

pub use block::{compose_block, concat};
pub use csr::{CsrMatrix, TripletBuilder};
pub use solve::{solve, solve_with, SolveOptions, SolveReport, DEFAULT_TOLERANCE};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
