//! Lagrange finite element spaces of degree 1 and 2.

mod basis;
mod quadrature;

pub use basis::{eval_basis, local_dim, reference_nodes};
pub use quadrature::{gauss_legendre, segment_rule, QuadratureRule};

use std::sync::Arc;

use crate::mesh::{FaceSet, Mesh};
use crate::{Error, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Continuity {
    Continuous,
    Discontinuous,
}

/// Anything that can be evaluated at a point of the plane.
pub trait ScalarField {
    fn value(&self, p: Point) -> f64;
}

impl<F: Fn(Point) -> f64> ScalarField for F {
    fn value(&self, p: Point) -> f64 {
        self(p)
    }
}

/// Affine map from the reference triangle onto an element.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub origin: Point,
    /// Columns are the edge vectors `p1 − p0` and `p2 − p0`.
    pub jacobian: [[f64; 2]; 2],
    pub det: f64,
    /// `J⁻ᵀ`, maps reference gradients to physical gradients.
    pub inv_transpose: [[f64; 2]; 2],
}

impl ElementGeometry {
    pub fn new(p: [Point; 3]) -> Self {
        let j = [
            [p[1][0] - p[0][0], p[2][0] - p[0][0]],
            [p[1][1] - p[0][1], p[2][1] - p[0][1]],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let inv_transpose = [
            [j[1][1] / det, -j[1][0] / det],
            [-j[0][1] / det, j[0][0] / det],
        ];
        Self {
            origin: p[0],
            jacobian: j,
            det,
            inv_transpose,
        }
    }

    pub fn map(&self, xi: Point) -> Point {
        let j = &self.jacobian;
        [
            self.origin[0] + j[0][0] * xi[0] + j[0][1] * xi[1],
            self.origin[1] + j[1][0] * xi[0] + j[1][1] * xi[1],
        ]
    }

    pub fn inverse_map(&self, x: Point) -> Point {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        // J⁻¹ = (J⁻ᵀ)ᵀ
        let it = &self.inv_transpose;
        [
            it[0][0] * d[0] + it[1][0] * d[1],
            it[0][1] * d[0] + it[1][1] * d[1],
        ]
    }

    pub fn physical_gradient(&self, g: Point) -> Point {
        let it = &self.inv_transpose;
        [
            it[0][0] * g[0] + it[0][1] * g[1],
            it[1][0] * g[0] + it[1][1] * g[1],
        ]
    }
}

#[derive(Debug, Clone)]
pub struct FiniteElementSpace {
    mesh: Arc<Mesh>,
    faces: Arc<FaceSet>,
    continuity: Continuity,
    degree: usize,
    num_dofs: usize,
    element_dofs: Vec<usize>,
    dof_coords: Vec<Point>,
}

impl FiniteElementSpace {
    /// Builds the space on `mesh`. Continuous dofs are numbered vertices
    /// first (vertex index), then edge midpoints (vertex count + edge id);
    /// discontinuous dofs are `element · local_dim + local index`.
    pub fn new(
        mesh: Arc<Mesh>,
        faces: Arc<FaceSet>,
        continuity: Continuity,
        degree: usize,
    ) -> Result<Self> {
        if !(1..=2).contains(&degree) {
            return Err(Error::UnsupportedDegree(degree));
        }
        let nloc = local_dim(degree);
        let ne = mesh.num_triangles();
        let mut element_dofs = Vec::with_capacity(ne * nloc);
        let (num_dofs, dof_coords) = match continuity {
            Continuity::Continuous => {
                let nv = mesh.num_vertices();
                let mut coords = mesh.vertices().to_vec();
                if degree == 2 {
                    coords.resize(nv + faces.num_edges(), [0.0; 2]);
                }
                for (e, t) in mesh.triangles().iter().enumerate() {
                    element_dofs.extend_from_slice(t);
                    if degree == 2 {
                        let edges = faces.element_edges(e);
                        for k in 0..3 {
                            let (a, b) = (mesh.vertices()[t[k]], mesh.vertices()[t[(k + 1) % 3]]);
                            coords[nv + edges[k]] = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
                            element_dofs.push(nv + edges[k]);
                        }
                    }
                }
                (coords.len(), coords)
            }
            Continuity::Discontinuous => {
                let nodes = reference_nodes(degree);
                let mut coords = Vec::with_capacity(ne * nloc);
                for e in 0..ne {
                    let geo = ElementGeometry::new(mesh.triangle_points(e));
                    for (i, xi) in nodes.iter().enumerate() {
                        element_dofs.push(e * nloc + i);
                        coords.push(geo.map(*xi));
                    }
                }
                (ne * nloc, coords)
            }
        };
        Ok(Self {
            mesh,
            faces,
            continuity,
            degree,
            num_dofs,
            element_dofs,
            dof_coords,
        })
    }

    /// Convenience constructor that builds the face set itself.
    pub fn on_mesh(mesh: Mesh, continuity: Continuity, degree: usize) -> Result<Self> {
        let faces = FaceSet::build(&mesh)?;
        Self::new(Arc::new(mesh), Arc::new(faces), continuity, degree)
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn faces(&self) -> &FaceSet {
        &self.faces
    }

    pub fn continuity(&self) -> Continuity {
        self.continuity
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_dofs(&self) -> usize {
        self.num_dofs
    }

    pub fn local_dim(&self) -> usize {
        local_dim(self.degree)
    }

    pub fn element_dofs(&self, e: usize) -> &[usize] {
        let n = self.local_dim();
        &self.element_dofs[e * n..(e + 1) * n]
    }

    pub fn dof_coords(&self) -> &[Point] {
        &self.dof_coords
    }

    pub fn same_mesh(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh) || *self.mesh == *other.mesh
    }

    pub fn geometry(&self, e: usize) -> ElementGeometry {
        ElementGeometry::new(self.mesh.triangle_points(e))
    }

    /// Lagrange interpolant: nodal values at the dof coordinates.
    pub fn interpolate(&self, f: &impl ScalarField) -> Vec<f64> {
        self.dof_coords.iter().map(|&p| f.value(p)).collect()
    }

    /// Value and physical gradient of the finite element function `coeffs`
    /// at the reference point `xi` of element `e`.
    pub fn evaluate(&self, coeffs: &[f64], e: usize, xi: Point) -> (f64, Point) {
        let (v, g) = eval_basis(self.degree, xi);
        let geo = self.geometry(e);
        let mut value = 0.0;
        let mut grad = [0.0; 2];
        for (i, &dof) in self.element_dofs(e).iter().enumerate() {
            let c = coeffs[dof];
            value += c * v[i];
            let pg = geo.physical_gradient(g[i]);
            grad[0] += c * pg[0];
            grad[1] += c * pg[1];
        }
        (value, grad)
    }

    /// Basis values and physical gradients of element `e` at the physical
    /// point `x` (which should lie on the closure of `e`).
    pub fn basis_at(&self, e: usize, x: Point, values: &mut [f64], grads: &mut [Point]) {
        let geo = self.geometry(e);
        basis::eval_basis_into(self.degree, geo.inverse_map(x), values, grads);
        for g in grads.iter_mut() {
            *g = geo.physical_gradient(*g);
        }
    }
}

/// Basis tabulation at the quadrature points of one element, reused across
/// elements through [`ElementValues::reinit`].
#[derive(Debug, Clone)]
pub struct ElementValues {
    rule: QuadratureRule,
    ref_grads: Vec<Point>,
    nloc: usize,
    /// Physical quadrature points.
    pub points: Vec<Point>,
    /// Quadrature weights scaled by `|det J|`.
    pub weights: Vec<f64>,
    /// `values[q * nloc + i]`; affine maps leave these unchanged.
    pub values: Vec<f64>,
    /// Physical gradients, same layout as `values`.
    pub grads: Vec<Point>,
}

impl ElementValues {
    pub fn new(degree: usize, rule: QuadratureRule) -> Self {
        let nloc = local_dim(degree);
        let nq = rule.len();
        let mut ref_values = vec![0.0; nq * nloc];
        let mut ref_grads = vec![[0.0; 2]; nq * nloc];
        for (q, xi) in rule.points.iter().enumerate() {
            basis::eval_basis_into(
                degree,
                *xi,
                &mut ref_values[q * nloc..(q + 1) * nloc],
                &mut ref_grads[q * nloc..(q + 1) * nloc],
            );
        }
        Self {
            values: ref_values,
            grads: ref_grads.clone(),
            points: vec![[0.0; 2]; nq],
            weights: vec![0.0; nq],
            rule,
            ref_grads,
            nloc,
        }
    }

    pub fn for_space(space: &FiniteElementSpace, exactness: usize) -> Result<Self> {
        Ok(Self::new(space.degree(), QuadratureRule::new(exactness)?))
    }

    pub fn reinit(&mut self, geo: &ElementGeometry) {
        let det = geo.det.abs();
        for (q, xi) in self.rule.points.iter().enumerate() {
            self.points[q] = geo.map(*xi);
            self.weights[q] = self.rule.weights[q] * det;
        }
        for (g, r) in self.grads.iter_mut().zip(&self.ref_grads) {
            *g = geo.physical_gradient(*r);
        }
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn nloc(&self) -> usize {
        self.nloc
    }

    pub fn value(&self, q: usize, i: usize) -> f64 {
        self.values[q * self.nloc + i]
    }

    pub fn grad(&self, q: usize, i: usize) -> Point {
        self.grads[q * self.nloc + i]
    }

    /// Value and gradient of a finite element function at point `q`.
    pub fn function(&self, q: usize, local_coeffs: &[f64]) -> (f64, Point) {
        let mut v = 0.0;
        let mut g = [0.0; 2];
        for (i, c) in local_coeffs.iter().enumerate() {
            v += c * self.value(q, i);
            let gi = self.grad(q, i);
            g[0] += c * gi[0];
            g[1] += c * gi[1];
        }
        (v, g)
    }
}

/// Quadrature points on a face: physical points and weights (scaled by the
/// face length), Gauss–Legendre with the given exactness.
pub fn face_points(a: Point, b: Point, exactness: usize) -> (Vec<Point>, Vec<f64>) {
    let (t, w) = segment_rule(exactness);
    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
    let pts = t
        .iter()
        .map(|&s| [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])])
        .collect();
    (pts, w.iter().map(|w| w * len).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{Lcg, Perturbation};

    fn space(n: usize, c: Continuity, k: usize) -> FiniteElementSpace {
        FiniteElementSpace::on_mesh(Mesh::build_structured(n, None).unwrap(), c, k).unwrap()
    }

    #[test]
    fn dof_counts() {
        assert_eq!(space(2, Continuity::Continuous, 1).num_dofs(), 9);
        assert_eq!(space(2, Continuity::Discontinuous, 1).num_dofs(), 24);
        assert_eq!(space(2, Continuity::Continuous, 2).num_dofs(), 25);
        assert_eq!(space(2, Continuity::Discontinuous, 2).num_dofs(), 48);
        let mesh = Mesh::build_structured(2, None).unwrap();
        assert_eq!(
            FiniteElementSpace::on_mesh(mesh, Continuity::Continuous, 3).unwrap_err(),
            Error::UnsupportedDegree(3)
        );
    }

    #[test]
    fn every_dof_is_referenced() {
        for c in [Continuity::Continuous, Continuity::Discontinuous] {
            for k in [1, 2] {
                let s = space(3, c, k);
                let mut hit = vec![false; s.num_dofs()];
                for e in 0..s.mesh().num_triangles() {
                    for &d in s.element_dofs(e) {
                        hit[d] = true;
                    }
                }
                assert!(hit.into_iter().all(|h| h));
            }
        }
    }

    #[test]
    fn interpolation_reproduces_affine_functions() {
        let f = |p: Point| p[0] + 2.0 * p[1];
        let mesh = Mesh::build_structured(
            5,
            Some(Perturbation {
                amplitude: 0.2,
                seed: 11,
            }),
        )
        .unwrap();
        for c in [Continuity::Continuous, Continuity::Discontinuous] {
            for k in [1, 2] {
                let s = FiniteElementSpace::on_mesh(mesh.clone(), c, k).unwrap();
                let u = s.interpolate(&f);
                let mut ev = ElementValues::for_space(&s, 2 * k + 2).unwrap();
                let mut local = vec![0.0; s.local_dim()];
                for e in 0..s.mesh().num_triangles() {
                    ev.reinit(&s.geometry(e));
                    for (l, &d) in local.iter_mut().zip(s.element_dofs(e)) {
                        *l = u[d];
                    }
                    for q in 0..ev.num_points() {
                        let (v, g) = ev.function(q, &local);
                        assert!((v - f(ev.points[q])).abs() < 1e-13);
                        assert!((g[0] - 1.0).abs() < 1e-12 && (g[1] - 2.0).abs() < 1e-12);
                    }
                }
                // random points in random elements
                let mut rng = Lcg::new(5);
                for _ in 0..50 {
                    let e = (rng.next_u64() % s.mesh().num_triangles() as u64) as usize;
                    let (a, b) = (rng.next_f64(), rng.next_f64());
                    let xi = if a + b <= 1.0 {
                        [a, b]
                    } else {
                        [1.0 - a, 1.0 - b]
                    };
                    let (v, _) = s.evaluate(&u, e, xi);
                    assert!((v - f(s.geometry(e).map(xi))).abs() < 1e-14);
                }
            }
        }
    }

    fn l2_interp_error(n: usize) -> f64 {
        let s = space(n, Continuity::Continuous, 1);
        let f = |p: Point| p[0] * p[0];
        let u = s.interpolate(&f);
        let mut ev = ElementValues::for_space(&s, 6).unwrap();
        let mut err = 0.0;
        let mut local = [0.0; 3];
        for e in 0..s.mesh().num_triangles() {
            ev.reinit(&s.geometry(e));
            for (l, &d) in local.iter_mut().zip(s.element_dofs(e)) {
                *l = u[d];
            }
            for q in 0..ev.num_points() {
                let (v, _) = ev.function(q, &local);
                err += ev.weights[q] * (v - f(ev.points[q])).powi(2);
            }
        }
        err.sqrt()
    }

    #[test]
    fn p1_interpolation_error_is_second_order() {
        let (e4, e8) = (l2_interp_error(4), l2_interp_error(8));
        let h = 2f64.sqrt() / 4.0;
        // |x²|_{H²} = 2
        assert!(e4 <= h * h * 2.0);
        let rate = (e4 / e8).log2();
        assert!((rate - 2.0).abs() < 0.05, "rate {rate}");
    }

    #[test]
    fn continuous_basis_agrees_across_edges() {
        for k in [1, 2] {
            let s = space(3, Continuity::Continuous, k);
            let nloc = s.local_dim();
            let (mut vm, mut gm) = (vec![0.0; nloc], vec![[0.0; 2]; nloc]);
            let (mut vp, mut gp) = (vec![0.0; nloc], vec![[0.0; 2]; nloc]);
            for face in s.faces().interior_faces() {
                let (pts, _) = face_points(face.endpoints[0], face.endpoints[1], 6);
                let [em, ep] = face.elements;
                for x in pts {
                    s.basis_at(em, x, &mut vm, &mut gm);
                    s.basis_at(ep, x, &mut vp, &mut gp);
                    for (i, &d) in s.element_dofs(em).iter().enumerate() {
                        let other = s.element_dofs(ep).iter().position(|&o| o == d);
                        let v_other = other.map_or(0.0, |j| vp[j]);
                        assert!((vm[i] - v_other).abs() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn geometry_round_trip() {
        let geo = ElementGeometry::new([[0.1, 0.2], [0.7, 0.3], [0.2, 0.9]]);
        let xi = [0.3, 0.25];
        let back = geo.inverse_map(geo.map(xi));
        assert!((back[0] - xi[0]).abs() < 1e-15 && (back[1] - xi[1]).abs() < 1e-15);
    }
}
