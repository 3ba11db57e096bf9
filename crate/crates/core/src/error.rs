use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("nonconforming mesh: edge ({0}, {1}) is shared by {2} triangles")]
    Nonconforming(usize, usize, usize),

    #[error("unsupported polynomial degree {0}, expected 1 or 2")]
    UnsupportedDegree(usize),

    #[error("unsupported quadrature exactness {0}, expected 1..=8")]
    UnsupportedQuadrature(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{method} stabilization requires a {required} space")]
    IncompatibleSpace {
        method: &'static str,
        required: &'static str,
    },

    #[error("trial and test spaces live on different meshes")]
    MeshMismatch,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("linear solve stalled at relative residual {residual:.3e} (tolerance {tol:.1e})")]
    NotConverged { residual: f64, tol: f64 },

    #[error("problem case has no exact solution")]
    MissingExactSolution,

    #[error("exact solution is not contained in the discrete space")]
    NotRepresentable,
}
