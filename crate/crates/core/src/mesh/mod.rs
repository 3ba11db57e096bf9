//! Conforming triangulations of the unit square.
//!
//! Meshes are structured: an `n × n` grid of squares, each cut along the
//! lower-left to upper-right diagonal. Interior vertices may be displaced by
//! a deterministic pseudo-random offset (see [`Lcg`]) to break the symmetry
//! of the structured pattern.

mod faces;

pub use faces::{BoundaryFace, FaceSet, InteriorFace};

use crate::{Error, Point, Result};

/// Side of the unit square a boundary edge lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryMarker {
    Left,
    Right,
    Bottom,
    Top,
}

impl BoundaryMarker {
    /// Classifies a segment lying on the boundary of the unit square.
    pub fn of_segment(a: Point, b: Point) -> Option<Self> {
        const TOL: f64 = 1e-14;
        if a[0].abs() < TOL && b[0].abs() < TOL {
            Some(Self::Left)
        } else if (a[0] - 1.0).abs() < TOL && (b[0] - 1.0).abs() < TOL {
            Some(Self::Right)
        } else if a[1].abs() < TOL && b[1].abs() < TOL {
            Some(Self::Bottom)
        } else if (a[1] - 1.0).abs() < TOL && (b[1] - 1.0).abs() < TOL {
            Some(Self::Top)
        } else {
            None
        }
    }
}

/// Random displacement of interior vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    /// Maximum offset per coordinate, relative to the cell width `1/n`.
    pub amplitude: f64,
    pub seed: u64,
}

/// 64-bit linear congruential generator (Knuth's MMIX constants).
///
/// `state ← state · 6364136223846793005 + 1442695040888963407 (mod 2⁶⁴)`;
/// a uniform sample in `[0, 1)` is the top 53 bits of the new state times
/// `2⁻⁵³`. The generator is seeded with the raw seed value.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.state
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    level: Option<u32>,
    cells_per_side: Option<usize>,
}

fn signed_area(p: [Point; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
}

fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl Mesh {
    /// Builds the structured `n × n` mesh of the unit square.
    ///
    /// Vertex `(i, j)` (column `i`, row `j`) has index `j (n + 1) + i`. Cell
    /// `(i, j)` yields the triangles `(v00, v10, v11)` and `(v00, v11, v01)`,
    /// both counterclockwise, with element indices `2 (j n + i)` and
    /// `2 (j n + i) + 1`. When perturbed, interior vertices are visited in
    /// index order and each receives an x and then a y offset
    /// `amplitude / n · (2ξ − 1)` with `ξ` drawn from [`Lcg`].
    pub fn build_structured(n: usize, perturb: Option<Perturbation>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMesh(
                "number of cells per side must be positive".into(),
            ));
        }
        if let Some(p) = perturb {
            if !(0.0..0.3).contains(&p.amplitude) {
                return Err(Error::InvalidMesh(format!(
                    "perturbation amplitude {} outside [0, 0.3)",
                    p.amplitude
                )));
            }
        }
        let np = n + 1;
        let width = 1.0 / n as f64;
        let mut vertices = Vec::with_capacity(np * np);
        for j in 0..np {
            for i in 0..np {
                vertices.push([i as f64 * width, j as f64 * width]);
            }
        }
        if let Some(p) = perturb {
            let mut rng = Lcg::new(p.seed);
            let scale = p.amplitude * width;
            for j in 1..n {
                for i in 1..n {
                    let v = &mut vertices[j * np + i];
                    v[0] += scale * (2.0 * rng.next_f64() - 1.0);
                    v[1] += scale * (2.0 * rng.next_f64() - 1.0);
                }
            }
        }
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let v00 = j * np + i;
                let v10 = v00 + 1;
                let v01 = v00 + np;
                let v11 = v01 + 1;
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }
        let mut mesh = Self::from_raw(vertices, triangles)?;
        mesh.level = n.is_power_of_two().then(|| n.trailing_zeros());
        mesh.cells_per_side = Some(n);
        mesh.check_quasi_uniform()?;
        Ok(mesh)
    }

    /// Builds the mesh of level `N`, i.e. `2^N` cells per side.
    pub fn build_level(level: u32, perturb: Option<Perturbation>) -> Result<Self> {
        if level > 16 {
            return Err(Error::InvalidMesh(format!(
                "refinement level {level} is too large"
            )));
        }
        Self::build_structured(1usize << level, perturb)
    }

    /// Wraps arbitrary vertex/triangle lists after checking orientation and
    /// that every vertex lies in the closed unit square.
    pub fn from_raw(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        for (k, v) in vertices.iter().enumerate() {
            if !(0.0..=1.0).contains(&v[0]) || !(0.0..=1.0).contains(&v[1]) {
                return Err(Error::InvalidMesh(format!(
                    "vertex {k} at {v:?} outside the unit square"
                )));
            }
        }
        for (e, t) in triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {e} references a missing vertex"
                )));
            }
            let area = signed_area([vertices[t[0]], vertices[t[1]], vertices[t[2]]]);
            if area <= 0.0 {
                return Err(Error::InvalidMesh(format!(
                    "triangle {e} has non-positive signed area {area:e}"
                )));
            }
        }
        Ok(Self {
            vertices,
            triangles,
            level: None,
            cells_per_side: None,
        })
    }

    fn check_quasi_uniform(&self) -> Result<()> {
        let (lo, hi) = (0..self.num_triangles())
            .map(|e| self.diameter(e))
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| {
                (lo.min(d), hi.max(d))
            });
        if hi > 4.0 * lo {
            return Err(Error::InvalidMesh(format!(
                "element diameters range over [{lo:e}, {hi:e}], ratio above 4"
            )));
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Refinement index `N` when the mesh was built with `2^N` cells per side.
    pub fn level(&self) -> Option<u32> {
        self.level
    }

    pub fn cells_per_side(&self) -> Option<usize> {
        self.cells_per_side
    }

    pub fn triangle_points(&self, e: usize) -> [Point; 3] {
        let t = self.triangles[e];
        [
            self.vertices[t[0]],
            self.vertices[t[1]],
            self.vertices[t[2]],
        ]
    }

    pub fn area(&self, e: usize) -> f64 {
        signed_area(self.triangle_points(e))
    }

    /// Longest edge of triangle `e`.
    pub fn diameter(&self, e: usize) -> f64 {
        let p = self.triangle_points(e);
        distance(p[0], p[1])
            .max(distance(p[1], p[2]))
            .max(distance(p[2], p[0]))
    }

    /// Global mesh size `h = max_K diam(K)`.
    pub fn mesh_size(&self) -> f64 {
        (0..self.num_triangles())
            .map(|e| self.diameter(e))
            .fold(0.0, f64::max)
    }
}
