//! Velocity fields, manufactured solutions and boundary data.

use crate::space::ScalarField;
use crate::{Error, Point, Result};

/// Lower bound applied to `|β|` wherever it appears in a denominator.
pub const DEFAULT_SPEED_FLOOR: f64 = 1e-10;

/// A vector field with analytic divergence.
pub trait VectorField {
    fn value(&self, p: Point) -> Point;
    fn divergence(&self, p: Point) -> f64;
}

/// The velocity fields used by the test problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Velocity {
    /// `β₁ = (−(x+1)⁴ + y, −8(y − x))`.
    Quartic,
    /// `β₂ = −100 (x + y, y − x)`.
    Spiral,
    /// `β₃ = (10 atan((y − ½)/ε) − x²/ε, sin(x/ε) + sin(y/ε))`.
    Oscillating {
        eps: f64,
    },
    Constant(Point),
}

impl Velocity {
    /// Velocity by numeric id `1..=3`; `eps` only matters for id 3.
    pub fn from_id(id: u32, eps: f64) -> Result<Self> {
        match id {
            1 => Ok(Self::Quartic),
            2 => Ok(Self::Spiral),
            3 if eps > 0.0 && eps.is_finite() => Ok(Self::Oscillating { eps }),
            3 => Err(Error::InvalidParameter(format!(
                "velocity 3 needs epsilon > 0, got {eps}"
            ))),
            _ => Err(Error::InvalidParameter(format!("unknown velocity id {id}"))),
        }
    }
}

impl VectorField for Velocity {
    fn value(&self, [x, y]: Point) -> Point {
        match *self {
            Self::Quartic => [-(x + 1.0).powi(4) + y, -8.0 * (y - x)],
            Self::Spiral => [-100.0 * (x + y), -100.0 * (y - x)],
            Self::Oscillating { eps } => [
                10.0 * ((y - 0.5) / eps).atan() - x * x / eps,
                (x / eps).sin() + (y / eps).sin(),
            ],
            Self::Constant(b) => b,
        }
    }

    fn divergence(&self, [x, y]: Point) -> f64 {
        match *self {
            Self::Quartic => -4.0 * (x + 1.0).powi(3) - 8.0,
            Self::Spiral => -200.0,
            Self::Oscillating { eps } => -2.0 * x / eps + (y / eps).cos() / eps,
            Self::Constant(_) => 0.0,
        }
    }
}

/// `max(|β(x)|, floor)`.
pub fn clamped_speed(beta: &impl VectorField, x: Point, floor: f64) -> f64 {
    let b = beta.value(x);
    b[0].hypot(b[1]).max(floor)
}

/// Zero-order coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reaction {
    /// `σ = ∇·β` (transport in conservation form).
    Divergence,
    Constant(f64),
}

/// Exact solutions with analytic gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExactSolution {
    /// `u = 30 x (1 − x) y (1 − y)`.
    Bubble,
    /// `c₀ + c₁x + c₂y + c₃x² + c₄xy + c₅y²`.
    Quadratic([f64; 6]),
}

impl ExactSolution {
    pub fn value(&self, [x, y]: Point) -> f64 {
        match *self {
            Self::Bubble => 30.0 * x * (1.0 - x) * y * (1.0 - y),
            Self::Quadratic(c) => {
                c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y
            }
        }
    }

    pub fn gradient(&self, [x, y]: Point) -> Point {
        match *self {
            Self::Bubble => [
                30.0 * (1.0 - 2.0 * x) * y * (1.0 - y),
                30.0 * x * (1.0 - x) * (1.0 - 2.0 * y),
            ],
            Self::Quadratic(c) => [
                c[1] + 2.0 * c[3] * x + c[4] * y,
                c[2] + c[4] * x + 2.0 * c[5] * y,
            ],
        }
    }

    /// Polynomial degree, when the solution is a polynomial.
    pub fn polynomial_degree(&self) -> Option<usize> {
        match *self {
            Self::Bubble => None,
            Self::Quadratic(c) => Some(if c[3..].iter().any(|&v| v != 0.0) {
                2
            } else if c[1] != 0.0 || c[2] != 0.0 {
                1
            } else {
                0
            }),
        }
    }
}

/// Boundary data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryData {
    /// Trace of the exact solution.
    Exact,
    /// `g = 1` where `x > 0.8` and `y < 0.5`, zero elsewhere.
    Window,
    Zero,
}

/// Which part of the boundary carries the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DataSide {
    #[default]
    Inflow,
    Outflow,
}

/// The operator coefficients `β` and `σ`, without any data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub velocity: Velocity,
    pub reaction: Reaction,
    pub speed_floor: f64,
}

impl Coefficients {
    pub fn new(velocity: Velocity, reaction: Reaction) -> Self {
        Self {
            velocity,
            reaction,
            speed_floor: DEFAULT_SPEED_FLOOR,
        }
    }

    /// Constant `β` and `σ`.
    pub fn constant(beta: Point, sigma: f64) -> Self {
        Self::new(Velocity::Constant(beta), Reaction::Constant(sigma))
    }

    pub fn beta(&self, p: Point) -> Point {
        self.velocity.value(p)
    }

    pub fn div_beta(&self, p: Point) -> f64 {
        self.velocity.divergence(p)
    }

    pub fn sigma(&self, p: Point) -> f64 {
        match self.reaction {
            Reaction::Divergence => self.velocity.divergence(p),
            Reaction::Constant(s) => s,
        }
    }

    pub fn speed(&self, p: Point) -> f64 {
        clamped_speed(&self.velocity, p, self.speed_floor)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemCase {
    pub name: String,
    pub velocity: Velocity,
    pub reaction: Reaction,
    pub exact: Option<ExactSolution>,
    /// Manufactured source `β·∇u + σu` when true, zero otherwise.
    pub manufactured_source: bool,
    pub boundary: BoundaryData,
    pub data_side: DataSide,
    pub speed_floor: f64,
}

impl ProblemCase {
    /// Smooth bubble solution in conservation form with the given velocity.
    pub fn smooth(velocity: Velocity) -> Self {
        Self {
            name: "smooth".into(),
            velocity,
            reaction: Reaction::Divergence,
            exact: Some(ExactSolution::Bubble),
            manufactured_source: true,
            boundary: BoundaryData::Exact,
            data_side: DataSide::Inflow,
            speed_floor: DEFAULT_SPEED_FLOOR,
        }
    }

    /// Smooth case selected by velocity id (`eps` used by id 3).
    pub fn smooth_case(velocity_id: u32, eps: f64) -> Result<Self> {
        Ok(Self::smooth(Velocity::from_id(velocity_id, eps)?))
    }

    /// `β₂`, `f = 0` and window boundary data; no exact solution.
    pub fn discontinuous() -> Self {
        Self {
            name: "discontinuous".into(),
            velocity: Velocity::Spiral,
            reaction: Reaction::Divergence,
            exact: None,
            manufactured_source: false,
            boundary: BoundaryData::Window,
            data_side: DataSide::Inflow,
            speed_floor: DEFAULT_SPEED_FLOOR,
        }
    }

    /// Polynomial solution with constant coefficients; the source and the
    /// boundary data are manufactured from it.
    pub fn polynomial(beta: Point, sigma: f64, coeffs: [f64; 6]) -> Self {
        Self {
            name: "polynomial".into(),
            velocity: Velocity::Constant(beta),
            reaction: Reaction::Constant(sigma),
            exact: Some(ExactSolution::Quadratic(coeffs)),
            manufactured_source: true,
            boundary: BoundaryData::Exact,
            data_side: DataSide::Inflow,
            speed_floor: DEFAULT_SPEED_FLOOR,
        }
    }

    /// `f = 0`, `g = 0`, exact solution `u = 0`.
    pub fn zero(velocity: Velocity) -> Self {
        Self {
            name: "zero".into(),
            velocity,
            reaction: Reaction::Divergence,
            exact: Some(ExactSolution::Quadratic([0.0; 6])),
            manufactured_source: true,
            boundary: BoundaryData::Zero,
            data_side: DataSide::Inflow,
            speed_floor: DEFAULT_SPEED_FLOOR,
        }
    }

    pub fn with_data_side(mut self, side: DataSide) -> Self {
        self.data_side = side;
        self
    }

    pub fn coefficients(&self) -> Coefficients {
        Coefficients {
            velocity: self.velocity,
            reaction: self.reaction,
            speed_floor: self.speed_floor,
        }
    }

    pub fn beta(&self, p: Point) -> Point {
        self.velocity.value(p)
    }

    pub fn sigma(&self, p: Point) -> f64 {
        self.coefficients().sigma(p)
    }

    pub fn speed(&self, p: Point) -> f64 {
        clamped_speed(&self.velocity, p, self.speed_floor)
    }

    pub fn source(&self, p: Point) -> f64 {
        match (self.manufactured_source, self.exact) {
            (true, Some(u)) => {
                let b = self.beta(p);
                let g = u.gradient(p);
                b[0] * g[0] + b[1] * g[1] + self.sigma(p) * u.value(p)
            }
            _ => 0.0,
        }
    }

    pub fn boundary_value(&self, p: Point) -> f64 {
        match self.boundary {
            BoundaryData::Exact => self.exact.map_or(0.0, |u| u.value(p)),
            BoundaryData::Window => {
                if p[0] > 0.8 && p[1] < 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
            BoundaryData::Zero => 0.0,
        }
    }

    pub fn exact_value(&self, p: Point) -> Option<f64> {
        self.exact.map(|u| u.value(p))
    }

    pub fn exact_gradient(&self, p: Point) -> Option<Point> {
        self.exact.map(|u| u.gradient(p))
    }

    pub fn exact_field(&self) -> Option<impl ScalarField + '_> {
        self.exact.map(|u| move |p: Point| u.value(p))
    }
}
