//! Error norms, seminorms, convergence studies and parameter sweeps.

use crate::assembly;
use crate::cases::{ProblemCase, Velocity};
use crate::formulations::{self, Formulation, Method, Solution, StabilizationConfig};
use crate::linalg::{self, CsrMatrix};
use crate::mesh::{Mesh, Perturbation};
use crate::space::{face_points, ElementValues, FiniteElementSpace};
use crate::{Error, Point, Result};

/// Quadrature exactness of the error norms.
pub fn error_exactness(degree: usize) -> usize {
    2 * degree + 4
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Integrates `f(x, u_h(x), ∇u_h(x))` over the mesh.
fn integrate(
    space: &FiniteElementSpace,
    coeffs: &[f64],
    f: impl Fn(Point, f64, Point) -> f64,
) -> Result<f64> {
    if coeffs.len() != space.num_dofs() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for {} dofs",
            coeffs.len(),
            space.num_dofs()
        )));
    }
    let mut ev = ElementValues::for_space(space, error_exactness(space.degree()))?;
    let mut local = vec![0.0; space.local_dim()];
    let mut total = 0.0;
    for e in 0..space.mesh().num_triangles() {
        ev.reinit(&space.geometry(e));
        for (l, &d) in local.iter_mut().zip(space.element_dofs(e)) {
            *l = coeffs[d];
        }
        for q in 0..ev.num_points() {
            let (v, g) = ev.function(q, &local);
            total += ev.weights[q] * f(ev.points[q], v, g);
        }
    }
    Ok(total)
}

/// `‖v_h‖` of a finite element function.
pub fn l2_norm(space: &FiniteElementSpace, coeffs: &[f64]) -> Result<f64> {
    Ok(integrate(space, coeffs, |_, v, _| v * v)?.sqrt())
}

/// `‖u − u_h‖`.
pub fn l2_error(u_h: &[f64], case: &ProblemCase, space: &FiniteElementSpace) -> Result<f64> {
    let exact = case.exact.ok_or(Error::MissingExactSolution)?;
    Ok(integrate(space, u_h, |x, v, _| (exact.value(x) - v).powi(2))?.sqrt())
}

/// `‖h^{1/2} |β|^{-1/2} β·∇(u − u_h)‖` with the global mesh size `h`.
pub fn sd_error(u_h: &[f64], case: &ProblemCase, space: &FiniteElementSpace) -> Result<f64> {
    let exact = case.exact.ok_or(Error::MissingExactSolution)?;
    let h = space.mesh().mesh_size();
    let sq = integrate(space, u_h, |x, _, g| {
        let ge = exact.gradient(x);
        let d = dot(case.beta(x), [ge[0] - g[0], ge[1] - g[1]]);
        h * d * d / case.speed(x)
    })?;
    Ok(sq.sqrt())
}

/// `‖|β·n|^{1/2} (u − u_h)‖_{∂Ω}`.
pub fn boundary_error(u_h: &[f64], case: &ProblemCase, space: &FiniteElementSpace) -> Result<f64> {
    let exact = case.exact.ok_or(Error::MissingExactSolution)?;
    let nloc = space.local_dim();
    let (mut vals, mut grads) = (vec![0.0; nloc], vec![[0.0; 2]; nloc]);
    let mut total = 0.0;
    for face in space.faces().boundary_faces() {
        let dofs = space.element_dofs(face.element);
        let (pts, wts) = face_points(
            face.endpoints[0],
            face.endpoints[1],
            error_exactness(space.degree()),
        );
        for (x, w) in pts.iter().zip(&wts) {
            space.basis_at(face.element, *x, &mut vals, &mut grads);
            let uh: f64 = vals.iter().zip(dofs).map(|(p, &d)| p * u_h[d]).sum();
            total += w * dot(case.beta(*x), face.normal).abs() * (exact.value(*x) - uh).powi(2);
        }
    }
    Ok(total.sqrt())
}

/// `sqrt(max(xᵀSx, 0))`.
pub fn stab_seminorm(x: &[f64], s: &CsrMatrix) -> Result<f64> {
    if x.len() != s.ncols() || s.nrows() != s.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against {}x{} matrix",
            x.len(),
            s.nrows(),
            s.ncols()
        )));
    }
    Ok(s.quadratic_form(x).max(0.0).sqrt())
}

/// `|u − u_h|_{S_p}` evaluated through data: `s_p(u_h, u_h) − 2 s_p(u, u_h) + s_p(u, u)`.
pub fn sp_error(sol: &Solution, case: &ProblemCase, space: &FiniteElementSpace) -> Result<f64> {
    let ops = &sol.operators;
    let uu = assembly::data_energy(space, case, &sol.config)?;
    let sq = ops.s_p.quadratic_form(&sol.u) - 2.0 * linalg::dot(&ops.data, &sol.u) + uu;
    Ok(sq.max(0.0).sqrt())
}

/// Error quantities of one solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelErrors {
    pub l2: f64,
    pub sd: f64,
    pub boundary: f64,
    pub sp: f64,
    pub z_l2: Option<f64>,
    pub z_sa: Option<f64>,
    /// Relative defect of the partial coercivity identity (primal–dual only).
    pub coercivity_defect: Option<f64>,
}

pub fn solution_errors(
    sol: &Solution,
    case: &ProblemCase,
    space: &FiniteElementSpace,
) -> Result<LevelErrors> {
    let (z_l2, z_sa, coercivity_defect) = match (&sol.z, &sol.operators.s_a) {
        (Some(z), Some(s_a)) => (
            Some(l2_norm(space, z)?),
            Some(stab_seminorm(z, s_a)?),
            Some(formulations::check_partial_coercivity(sol)?),
        ),
        _ => (None, None, None),
    };
    Ok(LevelErrors {
        l2: l2_error(&sol.u, case, space)?,
        sd: sd_error(&sol.u, case, space)?,
        boundary: boundary_error(&sol.u, case, space)?,
        sp: sp_error(sol, case, space)?,
        z_l2,
        z_sa,
        coercivity_defect,
    })
}

/// One level of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecord {
    pub level: u32,
    pub cells_per_side: usize,
    pub h: f64,
    /// Size of the linear system.
    pub dofs: usize,
    /// `Err` holds the message of a failed solve.
    pub outcome: std::result::Result<LevelErrors, String>,
}

impl LevelRecord {
    pub fn errors(&self) -> Option<&LevelErrors> {
        self.outcome.as_ref().ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub records: Vec<LevelRecord>,
    /// `l2_rates[i]` is the rate between records `i − 1` and `i`; `None`
    /// for the first record and next to gaps.
    pub l2_rates: Vec<Option<f64>>,
    pub sd_rates: Vec<Option<f64>>,
}

/// Observed order between two levels, `log₂(e_a / e_b) / (N_b − N_a)`.
pub fn rate(e_a: f64, e_b: f64, level_a: u32, level_b: u32) -> Option<f64> {
    if !(e_a > 0.0 && e_b > 0.0) || level_b <= level_a {
        return None;
    }
    Some((e_a / e_b).log2() / f64::from(level_b - level_a))
}

/// Rates between consecutive entries; `None` where either error is missing.
pub fn consecutive_rates(levels: &[u32], errors: &[Option<f64>]) -> Vec<Option<f64>> {
    (0..errors.len())
        .map(|i| {
            if i == 0 {
                return None;
            }
            rate(errors[i - 1]?, errors[i]?, levels[i - 1], levels[i])
        })
        .collect()
}

/// Least-squares slope of `−log₂ e` against `N`.
pub fn ls_slope(levels: &[u32], errors: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = levels
        .iter()
        .zip(errors)
        .filter(|(_, e)| **e > 0.0)
        .map(|(&n, &e)| (f64::from(n), -e.log2()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

fn mean(v: &[Option<f64>]) -> Option<f64> {
    let xs: Vec<f64> = v.iter().flatten().copied().collect();
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

impl ErrorReport {
    pub fn from_records(records: Vec<LevelRecord>) -> Self {
        let levels: Vec<u32> = records.iter().map(|r| r.level).collect();
        let l2: Vec<Option<f64>> = records.iter().map(|r| r.errors().map(|e| e.l2)).collect();
        let sd: Vec<Option<f64>> = records.iter().map(|r| r.errors().map(|e| e.sd)).collect();
        Self {
            l2_rates: consecutive_rates(&levels, &l2),
            sd_rates: consecutive_rates(&levels, &sd),
            records,
        }
    }

    pub fn levels(&self) -> Vec<u32> {
        self.records.iter().map(|r| r.level).collect()
    }

    pub fn mean_l2_rate(&self) -> Option<f64> {
        mean(&self.l2_rates)
    }

    pub fn mean_sd_rate(&self) -> Option<f64> {
        mean(&self.sd_rates)
    }

    /// Least-squares L² slope over the last three successful levels.
    pub fn l2_tail_slope(&self) -> Option<f64> {
        self.tail_slope(|e| e.l2)
    }

    pub fn sd_tail_slope(&self) -> Option<f64> {
        self.tail_slope(|e| e.sd)
    }

    fn tail_slope(&self, pick: impl Fn(&LevelErrors) -> f64) -> Option<f64> {
        let ok: Vec<(u32, f64)> = self
            .records
            .iter()
            .filter_map(|r| r.errors().map(|e| (r.level, pick(e))))
            .collect();
        let tail = &ok[ok.len().saturating_sub(3)..];
        let (lv, ev): (Vec<u32>, Vec<f64>) = tail.iter().copied().unzip();
        ls_slope(&lv, &ev)
    }

    pub fn record(&self, level: u32) -> Option<&LevelRecord> {
        self.records.iter().find(|r| r.level == level)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LevelRecord> {
        self.records.iter().filter(|r| r.outcome.is_err())
    }
}

/// Solves on one mesh and measures the errors.
pub fn solve_level(
    case: &ProblemCase,
    config: &StabilizationConfig,
    degree: usize,
    mesh: Mesh,
) -> Result<(FiniteElementSpace, Solution, LevelErrors)> {
    let space = FiniteElementSpace::on_mesh(mesh, config.method.continuity(), degree)?;
    let sol = formulations::solve(case, &space, config)?;
    let errors = solution_errors(&sol, case, &space)?;
    Ok((space, sol, errors))
}

fn study_level(
    case: &ProblemCase,
    config: &StabilizationConfig,
    degree: usize,
    level: u32,
    perturbation: Option<Perturbation>,
) -> LevelRecord {
    let n = 1usize << level.min(16);
    let mut record = LevelRecord {
        level,
        cells_per_side: n,
        h: f64::NAN,
        dofs: 0,
        outcome: Err(String::new()),
    };
    let mesh = match Mesh::build_level(level, perturbation) {
        Ok(m) => m,
        Err(e) => {
            record.outcome = Err(e.to_string());
            return record;
        }
    };
    record.h = mesh.mesh_size();
    record.outcome = solve_level(case, config, degree, mesh)
        .map(|(_, sol, errs)| {
            record.dofs = sol.system_size();
            errs
        })
        .map_err(|e| e.to_string());
    record
}

/// Runs the solver on meshes with `2^N` cells per side for each `N` in
/// `levels`. Failed levels are kept as gaps. Levels run on separate
/// threads; the report is ordered by level.
pub fn convergence_study(
    case: &ProblemCase,
    config: &StabilizationConfig,
    degree: usize,
    levels: &[u32],
    perturbation: Option<Perturbation>,
) -> Result<ErrorReport> {
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "levels must be strictly ascending".into(),
        ));
    }
    if case.exact.is_none() {
        return Err(Error::MissingExactSolution);
    }
    let records = std::thread::scope(|s| {
        let handles: Vec<_> = levels
            .iter()
            .map(|&level| s.spawn(move || study_level(case, config, degree, level, perturbation)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("convergence study worker panicked"))
            .collect()
    });
    Ok(ErrorReport::from_records(records))
}

/// One entry of a robustness sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub eps: f64,
    pub gamma: f64,
    pub formulation: Formulation,
    pub outcome: std::result::Result<LevelErrors, String>,
}

impl SweepEntry {
    pub fn sd_error(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|e| e.sd)
    }
}

/// CIP on the smooth solution with the oscillating velocity, for every
/// `(ε, γ, formulation)` on an `n × n` mesh. Failed solves are recorded.
pub fn robustness_sweep(
    eps: &[f64],
    gammas: &[f64],
    n: usize,
    degree: usize,
    formulations: &[Formulation],
) -> Result<Vec<SweepEntry>> {
    if let Some(e) = eps.iter().find(|e| !e.is_finite() || **e <= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {e}"
        )));
    }
    let mesh = Mesh::build_structured(n, None)?;
    let space = FiniteElementSpace::on_mesh(mesh, Method::Cip.continuity(), degree)?;
    let mut jobs = Vec::new();
    for &e in eps {
        for &g in gammas {
            for &f in formulations {
                jobs.push((e, g, f));
            }
        }
    }
    let space = &space;
    Ok(std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(e, g, f)| {
                s.spawn(move || {
                    let case = ProblemCase::smooth(Velocity::Oscillating { eps: e });
                    let config =
                        StabilizationConfig::defaults(Method::Cip, f, degree).with_gamma(g);
                    let outcome = formulations::solve(&case, space, &config)
                        .and_then(|sol| solution_errors(&sol, &case, space))
                        .map_err(|err| err.to_string());
                    SweepEntry {
                        eps: e,
                        gamma: g,
                        formulation: f,
                        outcome,
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    }))
}
