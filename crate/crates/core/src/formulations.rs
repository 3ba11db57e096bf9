//! The standard stabilized method and the primal–dual method.
//!
//! Standard: find `u_h` with `a_h(u_h, v) + s_p(u_h, v) = (f, v) + s_p(u, v)`.
//!
//! Primal–dual: find `(u_h, z_h)` with
//!
//! ```text
//! a_h(u_h, w) + s_a(z_h, w) = (f, w)
//! a_h(v, z_h) − s_p(u_h, v) = −s_p(u, v)
//! ```
//!
//! which in matrix form is `[[A, S_a], [−S_p, Aᵀ]] (U; Z) = (F; −G)`.
//! `s_p` is the method term plus the boundary penalty on the data side,
//! `s_a` the (adjoint) method term plus the penalty on the whole boundary.

use crate::assembly::{
    self, assemble_advection, assemble_boundary_penalty, assemble_cip, assemble_dg_jump,
    assemble_gls, BoundarySide, GlsVariant,
};
use crate::cases::{DataSide, ProblemCase};
use crate::linalg::{self, compose_block, concat, CsrMatrix, SolveOptions};
use crate::space::{Continuity, FiniteElementSpace};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Galerkin least squares.
    Gls,
    /// Continuous interior penalty on gradient jumps.
    Cip,
    /// Discontinuous Galerkin with jump penalty.
    Dg,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Self::Gls => "GLS",
            Self::Cip => "CIP",
            Self::Dg => "DG",
        }
    }

    pub fn continuity(self) -> Continuity {
        match self {
            Self::Gls | Self::Cip => Continuity::Continuous,
            Self::Dg => Continuity::Discontinuous,
        }
    }

    /// Default method parameter for polynomial degree `k`.
    pub fn default_gamma(self, degree: usize) -> f64 {
        match (self, degree) {
            (Self::Cip, 1) => 0.01,
            (Self::Cip, _) => 0.001,
            (Self::Gls, _) => 0.1,
            (Self::Dg, _) => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    Standard,
    PrimalDual,
}

impl Formulation {
    pub fn default_gamma_bc(self) -> f64 {
        match self {
            Self::Standard => 1.0,
            Self::PrimalDual => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilizationConfig {
    pub method: Method,
    /// Method parameter; negative values are allowed.
    pub gamma: f64,
    pub gamma_bc: f64,
    pub formulation: Formulation,
    pub data_side: DataSide,
}

impl StabilizationConfig {
    pub fn defaults(method: Method, formulation: Formulation, degree: usize) -> Self {
        Self {
            method,
            gamma: method.default_gamma(degree),
            gamma_bc: formulation.default_gamma_bc(),
            formulation,
            data_side: DataSide::Inflow,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_gamma_bc(mut self, gamma_bc: f64) -> Self {
        self.gamma_bc = gamma_bc;
        self
    }

    pub fn with_data_side(mut self, side: DataSide) -> Self {
        self.data_side = side;
        self
    }

    pub fn check_space(&self, space: &FiniteElementSpace) -> Result<()> {
        assembly::require(space, self.method.continuity(), self.method.name())
    }
}

/// Assembled matrices and vectors of one discrete problem.
#[derive(Debug, Clone)]
pub struct Operators {
    /// `a_h` with rows indexed by test functions.
    pub advection: CsrMatrix,
    pub s_p: CsrMatrix,
    /// Only assembled for the primal–dual formulation.
    pub s_a: Option<CsrMatrix>,
    /// `(f, ψ_i)`.
    pub load: Vec<f64>,
    /// `s_p(u, ψ_i)` through data.
    pub data: Vec<f64>,
}

impl Operators {
    pub fn assemble(
        case: &ProblemCase,
        space: &FiniteElementSpace,
        config: &StabilizationConfig,
    ) -> Result<Self> {
        config.check_space(space)?;
        let coeffs = case.coefficients();
        let advection = assemble_advection(space, space, &coeffs)?;
        let method_term = |variant| -> Result<CsrMatrix> {
            match config.method {
                Method::Gls => assemble_gls(space, &coeffs, config.gamma, variant),
                Method::Cip => assemble_cip(space, &coeffs, config.gamma),
                Method::Dg => assemble_dg_jump(space, &coeffs, config.gamma),
            }
        };
        let primal = method_term(GlsVariant::Primal)?;
        let bc_side = assembly::data_boundary_side(config.data_side);
        let s_p = primal.add(&assemble_boundary_penalty(
            space,
            &coeffs,
            config.gamma_bc,
            bc_side,
        )?)?;
        let s_a = match config.formulation {
            Formulation::Standard => None,
            Formulation::PrimalDual => {
                let adjoint = if config.method == Method::Gls {
                    method_term(GlsVariant::Adjoint)?
                } else {
                    primal
                };
                let bc =
                    assemble_boundary_penalty(space, &coeffs, config.gamma_bc, BoundarySide::Both)?;
                Some(adjoint.add(&bc)?)
            }
        };
        let load = assembly::assemble_load(space, |p| case.source(p))?;
        let data = assembly::stabilization_data(space, case, config)?;
        Ok(Self {
            advection,
            s_p,
            s_a,
            load,
            data,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub u: Vec<f64>,
    /// Dual variable, primal–dual formulation only.
    pub z: Option<Vec<f64>>,
    pub operators: Operators,
    pub config: StabilizationConfig,
    /// Relative residual of the linear solve.
    pub residual: f64,
}

impl Solution {
    /// Number of unknowns of the linear system.
    pub fn system_size(&self) -> usize {
        self.u.len() + self.z.as_ref().map_or(0, Vec::len)
    }
}

fn expect_formulation(config: &StabilizationConfig, f: Formulation) -> Result<()> {
    if config.formulation != f {
        return Err(Error::InvalidParameter(format!(
            "expected {f:?} formulation, config has {:?}",
            config.formulation
        )));
    }
    Ok(())
}

/// Solves `(A + S_p) U = F + G`.
pub fn solve_standard(
    case: &ProblemCase,
    space: &FiniteElementSpace,
    config: &StabilizationConfig,
) -> Result<Solution> {
    solve_standard_with(case, space, config, SolveOptions::default())
}

pub fn solve_standard_with(
    case: &ProblemCase,
    space: &FiniteElementSpace,
    config: &StabilizationConfig,
    opts: SolveOptions,
) -> Result<Solution> {
    expect_formulation(config, Formulation::Standard)?;
    let ops = Operators::assemble(case, space, config)?;
    let m = ops.advection.add(&ops.s_p)?;
    let rhs: Vec<f64> = ops.load.iter().zip(&ops.data).map(|(f, g)| f + g).collect();
    let report = linalg::solve_with(&m, &rhs, opts)?;
    Ok(Solution {
        u: report.x,
        z: None,
        operators: ops,
        config: *config,
        residual: report.residual,
    })
}

/// Solves the coupled primal–dual system.
pub fn solve_primal_dual(
    case: &ProblemCase,
    space: &FiniteElementSpace,
    config: &StabilizationConfig,
) -> Result<Solution> {
    solve_primal_dual_with(case, space, config, SolveOptions::default())
}

pub fn solve_primal_dual_with(
    case: &ProblemCase,
    space: &FiniteElementSpace,
    config: &StabilizationConfig,
    opts: SolveOptions,
) -> Result<Solution> {
    expect_formulation(config, Formulation::PrimalDual)?;
    let ops = Operators::assemble(case, space, config)?;
    let s_a = ops.s_a.as_ref().expect("primal-dual operators carry s_a");
    let m = compose_block(&ops.advection, s_a, &ops.s_p)?;
    let neg_data: Vec<f64> = ops.data.iter().map(|g| -g).collect();
    let rhs = concat(&ops.load, &neg_data);
    let report = linalg::solve_with(&m, &rhs, opts)?;
    let n = space.num_dofs();
    let mut u = report.x;
    let z = u.split_off(n);
    Ok(Solution {
        u,
        z: Some(z),
        operators: ops,
        config: *config,
        residual: report.residual,
    })
}

/// Data on the outflow boundary: same machinery with the primal boundary
/// penalty moved to the outflow part.
pub fn solve_data_assimilation(
    case: &ProblemCase,
    space: &FiniteElementSpace,
    config: &StabilizationConfig,
) -> Result<Solution> {
    if config.data_side != DataSide::Outflow {
        return Err(Error::InvalidParameter(
            "data assimilation needs data on the outflow side".into(),
        ));
    }
    solve(case, space, config)
}

/// Dispatches on `config.formulation`.
pub fn solve(
    case: &ProblemCase,
    space: &FiniteElementSpace,
    config: &StabilizationConfig,
) -> Result<Solution> {
    solve_with(case, space, config, SolveOptions::default())
}

pub fn solve_with(
    case: &ProblemCase,
    space: &FiniteElementSpace,
    config: &StabilizationConfig,
    opts: SolveOptions,
) -> Result<Solution> {
    match config.formulation {
        Formulation::Standard => solve_standard_with(case, space, config, opts),
        Formulation::PrimalDual => solve_primal_dual_with(case, space, config, opts),
    }
}

/// Relative defect of `|z_h|²_{S_a} + |u_h|²_{S_p} = (f, z_h) + s_p(u, u_h)`.
pub fn check_partial_coercivity(sol: &Solution) -> Result<f64> {
    let (Some(z), Some(s_a)) = (&sol.z, &sol.operators.s_a) else {
        return Err(Error::InvalidParameter(
            "partial coercivity needs a primal-dual solution".into(),
        ));
    };
    let ops = &sol.operators;
    let lhs = s_a.quadratic_form(z) + ops.s_p.quadratic_form(&sol.u);
    let rhs = linalg::dot(&ops.load, z) + linalg::dot(&ops.data, &sol.u);
    Ok((lhs - rhs).abs() / rhs.abs().max(1.0))
}

/// Galerkin orthogonality defects for an exact solution contained in the
/// discrete space.
///
/// Primal–dual: `r1 = max_i |a_h(u − u_h, ψ_i) − s_a(z_h, ψ_i)|`,
/// `r2 = max_i |a_h(ψ_i, z_h) − s_p(u_h − u, ψ_i)|`. Standard:
/// `r1 = max_i |a_h(u − u_h, ψ_i) + s_p(u − u_h, ψ_i)|` and `r2 = 0`.
pub fn check_galerkin_orthogonality(
    sol: &Solution,
    case: &ProblemCase,
    space: &FiniteElementSpace,
) -> Result<(f64, f64)> {
    let exact = case.exact.ok_or(Error::MissingExactSolution)?;
    match exact.polynomial_degree() {
        Some(d) if d <= space.degree() => {}
        _ => return Err(Error::NotRepresentable),
    }
    let u = space.interpolate(&|p| exact.value(p));
    let err: Vec<f64> = u.iter().zip(&sol.u).map(|(a, b)| a - b).collect();
    let ops = &sol.operators;
    let a_err = ops.advection.matvec(&err);
    let max_abs = |v: Vec<f64>| v.into_iter().fold(0.0, |m: f64, x| m.max(x.abs()));
    match (&sol.z, &ops.s_a) {
        (Some(z), Some(s_a)) => {
            let sz = s_a.matvec(z);
            let r1 = max_abs(a_err.iter().zip(&sz).map(|(a, s)| a - s).collect());
            let atz = ops.advection.matvec_transpose(z);
            let sp_err = ops.s_p.matvec(&err);
            // s_p(u_h − u, ψ) = −s_p(err, ψ)
            let r2 = max_abs(atz.iter().zip(&sp_err).map(|(a, s)| a + s).collect());
            Ok((r1, r2))
        }
        _ => {
            let sp_err = ops.s_p.matvec(&err);
            Ok((
                max_abs(a_err.iter().zip(&sp_err).map(|(a, s)| a + s).collect()),
                0.0,
            ))
        }
    }
}
