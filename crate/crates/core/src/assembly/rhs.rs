use super::forms::BoundarySide;
use super::{assembly_exactness, require};
use crate::cases::{DataSide, ProblemCase};
use crate::formulations::{Formulation, Method, StabilizationConfig};
use crate::space::{face_points, Continuity, ElementValues, FiniteElementSpace};
use crate::{Point, Result};

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// `(f, ψ_i)` for every test function.
pub fn assemble_load(space: &FiniteElementSpace, f: impl Fn(Point) -> f64) -> Result<Vec<f64>> {
    let mut ev = ElementValues::for_space(space, assembly_exactness(space.degree()))?;
    let mut out = vec![0.0; space.num_dofs()];
    for e in 0..space.mesh().num_triangles() {
        ev.reinit(&space.geometry(e));
        for q in 0..ev.num_points() {
            let fw = ev.weights[q] * f(ev.points[q]);
            for (i, &d) in space.element_dofs(e).iter().enumerate() {
                out[d] += fw * ev.value(q, i);
            }
        }
    }
    Ok(out)
}

/// GLS data term `(f, γ h |β|⁻¹ (β·∇ψ_i + σψ_i))`, i.e. `s_GLS(u, ψ_i)`.
pub fn gls_data_vector(
    space: &FiniteElementSpace,
    case: &ProblemCase,
    gamma: f64,
) -> Result<Vec<f64>> {
    require(space, Continuity::Continuous, "GLS")?;
    let coeffs = case.coefficients();
    let h = space.mesh().mesh_size();
    let mut ev = ElementValues::for_space(space, assembly_exactness(space.degree()))?;
    let mut out = vec![0.0; space.num_dofs()];
    for e in 0..space.mesh().num_triangles() {
        ev.reinit(&space.geometry(e));
        for q in 0..ev.num_points() {
            let x = ev.points[q];
            let (b, s) = (coeffs.beta(x), coeffs.sigma(x));
            let fw = ev.weights[q] * gamma * h / coeffs.speed(x) * case.source(x);
            for (i, &d) in space.element_dofs(e).iter().enumerate() {
                out[d] += fw * (dot(b, ev.grad(q, i)) + s * ev.value(q, i));
            }
        }
    }
    Ok(out)
}

/// `∫_∂Ω γ |(β·n)_±| g ψ_i ds`.
pub fn boundary_data_vector(
    space: &FiniteElementSpace,
    case: &ProblemCase,
    gamma: f64,
    side: BoundarySide,
) -> Result<Vec<f64>> {
    let n = space.local_dim();
    let (mut vals, mut grads) = (vec![0.0; n], vec![[0.0; 2]; n]);
    let mut out = vec![0.0; space.num_dofs()];
    for face in space.faces().boundary_faces() {
        let (pts, wts) = face_points(
            face.endpoints[0],
            face.endpoints[1],
            assembly_exactness(space.degree()),
        );
        for (x, w) in pts.iter().zip(&wts) {
            let weight =
                w * gamma * side.weight(dot(case.beta(*x), face.normal)) * case.boundary_value(*x);
            if weight == 0.0 {
                continue;
            }
            space.basis_at(face.element, *x, &mut vals, &mut grads);
            for (i, &d) in space.element_dofs(face.element).iter().enumerate() {
                out[d] += weight * vals[i];
            }
        }
    }
    Ok(out)
}

pub(crate) fn data_boundary_side(side: DataSide) -> BoundarySide {
    match side {
        DataSide::Inflow => BoundarySide::Inflow,
        DataSide::Outflow => BoundarySide::Outflow,
    }
}

/// `s_p(u, ψ_i)` expressed through data: the GLS source term (GLS only;
/// CIP and DG penalties vanish on the smooth exact solution) plus the
/// boundary penalty against `g` on the data side.
pub fn stabilization_data(
    space: &FiniteElementSpace,
    case: &ProblemCase,
    config: &StabilizationConfig,
) -> Result<Vec<f64>> {
    let mut g = boundary_data_vector(
        space,
        case,
        config.gamma_bc,
        data_boundary_side(config.data_side),
    )?;
    if config.method == Method::Gls {
        let gls = gls_data_vector(space, case, config.gamma)?;
        g.iter_mut().zip(gls).for_each(|(a, b)| *a += b);
    }
    Ok(g)
}

/// `s_p(u, u)` expressed through data, the constant term of `|u − u_h|²_{S_p}`.
pub fn data_energy(
    space: &FiniteElementSpace,
    case: &ProblemCase,
    config: &StabilizationConfig,
) -> Result<f64> {
    let k = space.degree();
    let side = data_boundary_side(config.data_side);
    let mut total = 0.0;
    for face in space.faces().boundary_faces() {
        let (pts, wts) = face_points(face.endpoints[0], face.endpoints[1], assembly_exactness(k));
        for (x, w) in pts.iter().zip(&wts) {
            let g = case.boundary_value(*x);
            total += w * config.gamma_bc * side.weight(dot(case.beta(*x), face.normal)) * g * g;
        }
    }
    if config.method == Method::Gls {
        let h = space.mesh().mesh_size();
        let mut ev = ElementValues::for_space(space, assembly_exactness(k))?;
        for e in 0..space.mesh().num_triangles() {
            ev.reinit(&space.geometry(e));
            for q in 0..ev.num_points() {
                let x = ev.points[q];
                total += ev.weights[q] * config.gamma * h / case.speed(x) * case.source(x).powi(2);
            }
        }
    }
    Ok(total)
}

/// Which right-hand side to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsTarget {
    /// First equation of the primal–dual system: `(f, w_h)`.
    PrimalEquation,
    /// Second equation of the primal–dual system: `−s_p(u, v_h)`.
    DualEquation,
    /// Standard stabilized method: `(f, v_h) + s_p(u, v_h)`.
    Standard,
}

pub fn assemble_rhs(
    space: &FiniteElementSpace,
    case: &ProblemCase,
    config: &StabilizationConfig,
    target: RhsTarget,
) -> Result<Vec<f64>> {
    match target {
        RhsTarget::PrimalEquation => assemble_load(space, |p| case.source(p)),
        RhsTarget::DualEquation => Ok(stabilization_data(space, case, config)?
            .into_iter()
            .map(|v| -v)
            .collect()),
        RhsTarget::Standard => {
            let mut f = assemble_load(space, |p| case.source(p))?;
            let g = stabilization_data(space, case, config)?;
            f.iter_mut().zip(g).for_each(|(a, b)| *a += b);
            Ok(f)
        }
    }
}

impl RhsTarget {
    pub fn for_formulation(formulation: Formulation) -> &'static [RhsTarget] {
        match formulation {
            Formulation::Standard => &[RhsTarget::Standard],
            Formulation::PrimalDual => &[RhsTarget::PrimalEquation, RhsTarget::DualEquation],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::Velocity;
    use crate::mesh::Mesh;
    use crate::space::QuadratureRule;

    fn space(n: usize, k: usize) -> FiniteElementSpace {
        FiniteElementSpace::on_mesh(
            Mesh::build_structured(n, None).unwrap(),
            Continuity::Continuous,
            k,
        )
        .unwrap()
    }

    #[test]
    fn zero_data_gives_zero_vectors() {
        let s = space(3, 1);
        let case = ProblemCase::zero(Velocity::Quartic);
        for method in [Method::Gls, Method::Cip] {
            let cfg = StabilizationConfig::defaults(method, Formulation::PrimalDual, 1);
            for t in [
                RhsTarget::PrimalEquation,
                RhsTarget::DualEquation,
                RhsTarget::Standard,
            ] {
                assert!(assemble_rhs(&s, &case, &cfg, t)
                    .unwrap()
                    .iter()
                    .all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn load_partition_of_unity() {
        for k in [1, 2] {
            let s = space(4, k);
            let f = assemble_load(&s, |_| 1.0).unwrap();
            assert!((f.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gls_data_term_matches_direct_quadrature() {
        // f = 1, β = (1, 0), σ = 0: entry i is γ h ∫ ∂ₓψ_i
        let s = space(3, 1);
        let case = ProblemCase {
            manufactured_source: false,
            ..ProblemCase::polynomial([1.0, 0.0], 0.0, [0.0; 6])
        };
        // source is zero unless manufactured; use a linear u with ∂ₓu = 1
        let case = ProblemCase {
            exact: Some(crate::cases::ExactSolution::Quadratic([
                0.0, 1.0, 0.0, 0.0, 0.0, 0.0,
            ])),
            manufactured_source: true,
            ..case
        };
        assert_eq!(case.source([0.3, 0.4]), 1.0);
        let gamma = 0.2;
        let v = gls_data_vector(&s, &case, gamma).unwrap();
        let h = s.mesh().mesh_size();
        // independent route: centroid rule per element is exact for constants
        let rule = QuadratureRule::new(1).unwrap();
        let mut direct = vec![0.0; s.num_dofs()];
        for e in 0..s.mesh().num_triangles() {
            let geo = s.geometry(e);
            let area = s.mesh().area(e);
            for (xi, w) in rule.points.iter().zip(&rule.weights) {
                let (vals, grads) = crate::space::eval_basis(1, *xi);
                let _ = vals;
                for (i, &d) in s.element_dofs(e).iter().enumerate() {
                    let g = geo.physical_gradient(grads[i]);
                    direct[d] += w * 2.0 * area * gamma * h * g[0];
                }
            }
        }
        for (a, b) in v.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-14);
        }
        let total: f64 = v.iter().sum();
        assert!(total.abs() < 1e-14);
    }

    #[test]
    fn boundary_data_selects_side() {
        let s = space(4, 1);
        let case = ProblemCase::polynomial([1.0, 0.0], 0.0, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let inflow = boundary_data_vector(&s, &case, 2.0, BoundarySide::Inflow).unwrap();
        let outflow = boundary_data_vector(&s, &case, 2.0, BoundarySide::Outflow).unwrap();
        assert!((inflow.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        assert!((outflow.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        for (i, p) in s.dof_coords().iter().enumerate() {
            if p[0] != 0.0 {
                assert_eq!(inflow[i], 0.0);
            }
            if p[0] != 1.0 {
                assert_eq!(outflow[i], 0.0);
            }
        }
    }
}
