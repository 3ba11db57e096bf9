use std::collections::HashMap;

use super::{BoundaryMarker, Mesh};
use crate::{Error, Point, Result};

/// Edge shared by two triangles. `elements[0]` is the minus side and always
/// has the smaller index; `normal` is the outward normal of the minus side.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorFace {
    pub elements: [usize; 2],
    /// Local edge index of the face within each element.
    pub local_edges: [usize; 2],
    pub vertices: [usize; 2],
    pub endpoints: [Point; 2],
    pub normal: Point,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFace {
    pub element: usize,
    pub local_edge: usize,
    pub vertices: [usize; 2],
    pub endpoints: [Point; 2],
    /// Outward unit normal of the domain.
    pub normal: Point,
    pub length: f64,
    pub marker: BoundaryMarker,
}

/// Face connectivity of a mesh.
///
/// Local edge `k` of a triangle joins its local vertices `k` and `(k+1) % 3`.
/// Every edge gets a global id: interior faces are numbered first, then
/// boundary faces, each in order of first appearance in the triangle list.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceSet {
    interior: Vec<InteriorFace>,
    boundary: Vec<BoundaryFace>,
    element_edges: Vec<[usize; 3]>,
}

/// Outward unit normal and length of the segment `a → b` traversed
/// counterclockwise around its triangle.
pub(crate) fn outward_normal(a: Point, b: Point) -> (Point, f64) {
    let t = [b[0] - a[0], b[1] - a[1]];
    let len = t[0].hypot(t[1]);
    ([t[1] / len, -t[0] / len], len)
}

impl FaceSet {
    pub fn build(mesh: &Mesh) -> Result<Self> {
        let mut slots: HashMap<(usize, usize), usize> = HashMap::new();
        let mut owners: Vec<Vec<(usize, usize)>> = Vec::new();
        for (e, t) in mesh.triangles().iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let slot = *slots.entry(key).or_insert_with(|| {
                    owners.push(Vec::with_capacity(2));
                    owners.len() - 1
                });
                owners[slot].push((e, k));
            }
        }

        let verts = mesh.vertices();
        let mut interior = Vec::new();
        let mut boundary = Vec::new();
        // (is_interior, index within its list) per slot
        let mut kind = Vec::with_capacity(owners.len());
        for list in &owners {
            let (e, k) = list[0];
            let t = mesh.triangles()[e];
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let (normal, length) = outward_normal(verts[a], verts[b]);
            match list.len() {
                1 => {
                    let marker =
                        BoundaryMarker::of_segment(verts[a], verts[b]).ok_or_else(|| {
                            Error::InvalidMesh(format!(
                                "boundary edge ({a}, {b}) is not on the unit square boundary"
                            ))
                        })?;
                    kind.push((false, boundary.len()));
                    boundary.push(BoundaryFace {
                        element: e,
                        local_edge: k,
                        vertices: [a, b],
                        endpoints: [verts[a], verts[b]],
                        normal,
                        length,
                        marker,
                    });
                }
                2 => {
                    let (ep, kp) = list[1];
                    let tp = mesh.triangles()[ep];
                    if (tp[kp], tp[(kp + 1) % 3]) != (b, a) {
                        return Err(Error::InvalidMesh(format!(
                            "triangles {e} and {ep} traverse edge ({a}, {b}) with the same orientation"
                        )));
                    }
                    kind.push((true, interior.len()));
                    interior.push(InteriorFace {
                        elements: [e, ep],
                        local_edges: [k, kp],
                        vertices: [a, b],
                        endpoints: [verts[a], verts[b]],
                        normal,
                        length,
                    });
                }
                count => return Err(Error::Nonconforming(a.min(b), a.max(b), count)),
            }
        }

        let n_int = interior.len();
        let mut element_edges = vec![[0usize; 3]; mesh.num_triangles()];
        for (slot, list) in owners.iter().enumerate() {
            let (is_int, idx) = kind[slot];
            let id = if is_int { idx } else { n_int + idx };
            for &(e, k) in list {
                element_edges[e][k] = id;
            }
        }
        Ok(Self {
            interior,
            boundary,
            element_edges,
        })
    }

    pub fn interior_faces(&self) -> &[InteriorFace] {
        &self.interior
    }

    pub fn boundary_faces(&self) -> &[BoundaryFace] {
        &self.boundary
    }

    pub fn num_edges(&self) -> usize {
        self.interior.len() + self.boundary.len()
    }

    /// Global edge ids of the three local edges of element `e`.
    pub fn element_edges(&self, e: usize) -> [usize; 3] {
        self.element_edges[e]
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary.iter().map(|f| f.length).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Perturbation;

    #[test]
    fn face_counts() {
        let f = FaceSet::build(&Mesh::build_structured(1, None).unwrap()).unwrap();
        assert_eq!((f.interior_faces().len(), f.boundary_faces().len()), (1, 4));
        let f = FaceSet::build(&Mesh::build_structured(2, None).unwrap()).unwrap();
        assert_eq!((f.interior_faces().len(), f.boundary_faces().len()), (8, 8));
        // n² diagonals + 2 n (n − 1) grid lines inside, 4 n on the boundary
        let n = 7;
        let f = FaceSet::build(&Mesh::build_structured(n, None).unwrap()).unwrap();
        assert_eq!(f.interior_faces().len(), n * n + 2 * n * (n - 1));
        assert_eq!(f.boundary_faces().len(), 4 * n);
    }

    #[test]
    fn perimeter_and_normals() {
        for perturb in [
            None,
            Some(Perturbation {
                amplitude: 0.25,
                seed: 3,
            }),
        ] {
            let mesh = Mesh::build_structured(9, perturb).unwrap();
            let f = FaceSet::build(&mesh).unwrap();
            assert!((f.boundary_length() - 4.0).abs() < 1e-12);
            for face in f.interior_faces() {
                assert!(face.elements[0] < face.elements[1]);
                assert!((face.normal[0].hypot(face.normal[1]) - 1.0).abs() < 1e-14);
                assert!(face.length > 0.0);
                // normal points away from the minus element's barycenter
                let p = mesh.triangle_points(face.elements[0]);
                let c = [
                    (p[0][0] + p[1][0] + p[2][0]) / 3.0,
                    (p[0][1] + p[1][1] + p[2][1]) / 3.0,
                ];
                let m = face.endpoints[0];
                assert!((m[0] - c[0]) * face.normal[0] + (m[1] - c[1]) * face.normal[1] > 0.0);
            }
            for face in f.boundary_faces() {
                let expected = match face.marker {
                    BoundaryMarker::Left => [-1.0, 0.0],
                    BoundaryMarker::Right => [1.0, 0.0],
                    BoundaryMarker::Bottom => [0.0, -1.0],
                    BoundaryMarker::Top => [0.0, 1.0],
                };
                assert!((face.normal[0] - expected[0]).abs() < 1e-14);
                assert!((face.normal[1] - expected[1]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn element_edges_cover_all_ids() {
        let mesh = Mesh::build_structured(3, None).unwrap();
        let f = FaceSet::build(&mesh).unwrap();
        let mut seen = vec![0; f.num_edges()];
        for e in 0..mesh.num_triangles() {
            for id in f.element_edges(e) {
                seen[id] += 1;
            }
        }
        let n_int = f.interior_faces().len();
        assert!(seen[..n_int].iter().all(|&c| c == 2));
        assert!(seen[n_int..].iter().all(|&c| c == 1));
    }

    #[test]
    fn rejects_edge_shared_by_three_triangles() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.5, 1.0], [0.5, 0.5]];
        let mesh = Mesh::from_raw(v, vec![[0, 1, 2], [0, 1, 3], [0, 1, 2]]).unwrap();
        assert!(matches!(
            FaceSet::build(&mesh),
            Err(Error::Nonconforming(0, 1, 3))
        ));
    }
}
