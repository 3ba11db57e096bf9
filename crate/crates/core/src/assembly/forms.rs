use super::{assembly_exactness, require};
use crate::cases::Coefficients;
use crate::linalg::{CsrMatrix, TripletBuilder};
use crate::mesh::InteriorFace;
use crate::space::{face_points, Continuity, ElementValues, FiniteElementSpace};
use crate::{Error, Point, Result};

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Element term `(β·∇u + σu, v)_h` plus, for discontinuous trial spaces,
/// `−Σ_F ∫_F (β·n_F) [u] {v}` with `[u] = u⁻ − u⁺`.
pub fn assemble_advection(
    trial: &FiniteElementSpace,
    test: &FiniteElementSpace,
    coeffs: &Coefficients,
) -> Result<CsrMatrix> {
    if !trial.same_mesh(test) {
        return Err(Error::MeshMismatch);
    }
    let kmax = trial.degree().max(test.degree());
    let q = assembly_exactness(kmax);
    let mut ev_u = ElementValues::for_space(trial, q)?;
    let mut ev_v = ElementValues::for_space(test, q)?;
    let (nu, nv) = (trial.local_dim(), test.local_dim());
    let mut out = TripletBuilder::new(test.num_dofs(), trial.num_dofs());
    let mut block = vec![0.0; nv * nu];

    for e in 0..trial.mesh().num_triangles() {
        let geo = trial.geometry(e);
        ev_u.reinit(&geo);
        ev_v.reinit(&geo);
        block.fill(0.0);
        for qp in 0..ev_u.num_points() {
            let x = ev_u.points[qp];
            let (b, s, w) = (coeffs.beta(x), coeffs.sigma(x), ev_u.weights[qp]);
            for j in 0..nu {
                let lu = dot(b, ev_u.grad(qp, j)) + s * ev_u.value(qp, j);
                for i in 0..nv {
                    block[i * nu + j] += w * lu * ev_v.value(qp, i);
                }
            }
        }
        out.add_block(test.element_dofs(e), trial.element_dofs(e), &block);
    }

    if trial.continuity() == Continuity::Discontinuous {
        let qf = assembly_exactness(kmax);
        let mut su = FaceSides::new(trial);
        let mut sv = FaceSides::new(test);
        let mut block = vec![0.0; 4 * nu * nv];
        for face in trial.faces().interior_faces() {
            let (pts, wts) = face_points(face.endpoints[0], face.endpoints[1], qf);
            let rows = sv.dofs(face);
            let cols = su.dofs(face);
            block.fill(0.0);
            for (x, w) in pts.iter().zip(&wts) {
                let bn = dot(coeffs.beta(*x), face.normal);
                su.eval(face, *x);
                sv.eval(face, *x);
                for j in 0..2 * nu {
                    let jump = su.jump[j];
                    if jump == 0.0 {
                        continue;
                    }
                    for i in 0..2 * nv {
                        block[i * 2 * nu + j] -= w * bn * jump * sv.avg[i];
                    }
                }
            }
            out.add_block(&rows, &cols, &block);
        }
    }
    Ok(out.build())
}

/// Values and gradients of the basis functions of both elements adjacent
/// to an interior face, laid out as `[minus dofs, plus dofs]`.
pub(crate) struct FaceSides<'a> {
    space: &'a FiniteElementSpace,
    nloc: usize,
    vals: Vec<f64>,
    grads: Vec<Point>,
    /// `[φ]` of each local function (`φ⁻` or `−φ⁺`).
    pub jump: Vec<f64>,
    /// `{φ}`.
    pub avg: Vec<f64>,
    /// `[∇φ]`.
    pub grad_jump: Vec<Point>,
}

impl<'a> FaceSides<'a> {
    pub fn new(space: &'a FiniteElementSpace) -> Self {
        let nloc = space.local_dim();
        Self {
            space,
            nloc,
            vals: vec![0.0; nloc],
            grads: vec![[0.0; 2]; nloc],
            jump: vec![0.0; 2 * nloc],
            avg: vec![0.0; 2 * nloc],
            grad_jump: vec![[0.0; 2]; 2 * nloc],
        }
    }

    pub fn dofs(&self, face: &InteriorFace) -> Vec<usize> {
        let mut d = self.space.element_dofs(face.elements[0]).to_vec();
        d.extend_from_slice(self.space.element_dofs(face.elements[1]));
        d
    }

    pub fn eval(&mut self, face: &InteriorFace, x: Point) {
        let n = self.nloc;
        for (side, &e) in face.elements.iter().enumerate() {
            self.space.basis_at(e, x, &mut self.vals, &mut self.grads);
            let sign = if side == 0 { 1.0 } else { -1.0 };
            for i in 0..n {
                let k = side * n + i;
                self.jump[k] = sign * self.vals[i];
                self.avg[k] = 0.5 * self.vals[i];
                self.grad_jump[k] = [sign * self.grads[i][0], sign * self.grads[i][1]];
            }
        }
    }
}

/// Which residual a GLS term penalizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlsVariant {
    /// `L u = β·∇u + σu`.
    Primal,
    /// `L* z = −∇·(βz) + σz = −β·∇z + (σ − ∇·β) z`.
    Adjoint,
}

/// `(γ h |β|⁻¹ L u, L w)` with the global mesh size `h`.
pub fn assemble_gls(
    space: &FiniteElementSpace,
    coeffs: &Coefficients,
    gamma: f64,
    variant: GlsVariant,
) -> Result<CsrMatrix> {
    require(space, Continuity::Continuous, "GLS")?;
    let h = space.mesh().mesh_size();
    let mut ev = ElementValues::for_space(space, assembly_exactness(space.degree()))?;
    let n = space.local_dim();
    let mut out = TripletBuilder::new(space.num_dofs(), space.num_dofs());
    let mut block = vec![0.0; n * n];
    let mut l = vec![0.0; n];
    for e in 0..space.mesh().num_triangles() {
        ev.reinit(&space.geometry(e));
        block.fill(0.0);
        for qp in 0..ev.num_points() {
            let x = ev.points[qp];
            let b = coeffs.beta(x);
            let s = coeffs.sigma(x);
            let tau = gamma * h / coeffs.speed(x);
            for (i, li) in l.iter_mut().enumerate() {
                *li = match variant {
                    GlsVariant::Primal => dot(b, ev.grad(qp, i)) + s * ev.value(qp, i),
                    GlsVariant::Adjoint => {
                        -dot(b, ev.grad(qp, i)) + (s - coeffs.div_beta(x)) * ev.value(qp, i)
                    }
                };
            }
            let w = ev.weights[qp] * tau;
            for i in 0..n {
                for j in 0..n {
                    block[i * n + j] += w * l[i] * l[j];
                }
            }
        }
        out.add_block(space.element_dofs(e), space.element_dofs(e), &block);
    }
    Ok(out.build())
}

/// `‖β_h·n_F‖_{L∞(F)}` for the nodal P1 interpolant `β_h`; it is affine
/// along `F`, so the maximum is attained at an endpoint.
pub fn cip_face_weight(coeffs: &Coefficients, face: &InteriorFace) -> f64 {
    face.endpoints
        .iter()
        .map(|&p| dot(coeffs.beta(p), face.normal).abs())
        .fold(0.0, f64::max)
}

/// `Σ_F ∫_F γ h_F² ‖β_h·n_F‖_{L∞(F)} [∇u]·[∇w]`, `h_F` the face length.
pub fn assemble_cip(
    space: &FiniteElementSpace,
    coeffs: &Coefficients,
    gamma: f64,
) -> Result<CsrMatrix> {
    require(space, Continuity::Continuous, "CIP")?;
    let n2 = 2 * space.local_dim();
    let mut sides = FaceSides::new(space);
    let mut out = TripletBuilder::new(space.num_dofs(), space.num_dofs());
    let mut block = vec![0.0; n2 * n2];
    let q = assembly_exactness(space.degree());
    for face in space.faces().interior_faces() {
        let scale = gamma * face.length * face.length * cip_face_weight(coeffs, face);
        let dofs = sides.dofs(face);
        let (pts, wts) = face_points(face.endpoints[0], face.endpoints[1], q);
        block.fill(0.0);
        for (x, w) in pts.iter().zip(&wts) {
            sides.eval(face, *x);
            for i in 0..n2 {
                for j in 0..n2 {
                    block[i * n2 + j] += w * scale * dot(sides.grad_jump[i], sides.grad_jump[j]);
                }
            }
        }
        out.add_block(&dofs, &dofs, &block);
    }
    Ok(out.build())
}

/// `Σ_F ∫_F γ |β·n_F| [u][w]`.
pub fn assemble_dg_jump(
    space: &FiniteElementSpace,
    coeffs: &Coefficients,
    gamma: f64,
) -> Result<CsrMatrix> {
    require(space, Continuity::Discontinuous, "DG")?;
    let n2 = 2 * space.local_dim();
    let mut sides = FaceSides::new(space);
    let mut out = TripletBuilder::new(space.num_dofs(), space.num_dofs());
    let mut block = vec![0.0; n2 * n2];
    let q = assembly_exactness(space.degree());
    for face in space.faces().interior_faces() {
        let dofs = sides.dofs(face);
        let (pts, wts) = face_points(face.endpoints[0], face.endpoints[1], q);
        block.fill(0.0);
        for (x, w) in pts.iter().zip(&wts) {
            let weight = w * gamma * dot(coeffs.beta(*x), face.normal).abs();
            sides.eval(face, *x);
            for i in 0..n2 {
                for j in 0..n2 {
                    block[i * n2 + j] += weight * sides.jump[i] * sides.jump[j];
                }
            }
        }
        out.add_block(&dofs, &dofs, &block);
    }
    Ok(out.build())
}

/// Part of `∂Ω` a boundary penalty acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundarySide {
    /// Weight `|(β·n)₋|`, `(a)₋ = min(a, 0)`.
    Inflow,
    /// Weight `(β·n)₊`.
    Outflow,
    /// Weight `|β·n|`.
    Both,
}

impl BoundarySide {
    pub fn weight(self, beta_n: f64) -> f64 {
        match self {
            Self::Inflow => (-beta_n).max(0.0),
            Self::Outflow => beta_n.max(0.0),
            Self::Both => beta_n.abs(),
        }
    }
}

/// `∫_∂Ω γ |(β·n)_±| u v ds`.
pub fn assemble_boundary_penalty(
    space: &FiniteElementSpace,
    coeffs: &Coefficients,
    gamma: f64,
    side: BoundarySide,
) -> Result<CsrMatrix> {
    let n = space.local_dim();
    let (mut vals, mut grads) = (vec![0.0; n], vec![[0.0; 2]; n]);
    let mut out = TripletBuilder::new(space.num_dofs(), space.num_dofs());
    let mut block = vec![0.0; n * n];
    let q = assembly_exactness(space.degree());
    for face in space.faces().boundary_faces() {
        let (pts, wts) = face_points(face.endpoints[0], face.endpoints[1], q);
        block.fill(0.0);
        for (x, w) in pts.iter().zip(&wts) {
            let weight = w * gamma * side.weight(dot(coeffs.beta(*x), face.normal));
            if weight == 0.0 {
                continue;
            }
            space.basis_at(face.element, *x, &mut vals, &mut grads);
            for i in 0..n {
                for j in 0..n {
                    block[i * n + j] += weight * vals[i] * vals[j];
                }
            }
        }
        let dofs = space.element_dofs(face.element);
        out.add_block(dofs, dofs, &block);
    }
    Ok(out.build())
}
