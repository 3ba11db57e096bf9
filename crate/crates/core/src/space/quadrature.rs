use crate::{Error, Point, Result};

/// Quadrature on the reference triangle `(0,0), (1,0), (0,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub exactness: usize,
}

/// Gauss–Legendre nodes and weights on `[0, 1]` with `m` points.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Chebyshev-like initial guess for the i-th root on [-1, 1]
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map from [-1, 1] to [0, 1]
        nodes[i] = 0.5 * (1.0 - x);
        nodes[m - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[m - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule on `[0, 1]` exact for polynomials of degree `d`.
pub fn segment_rule(exactness: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_legendre(exactness / 2 + 1)
}

impl QuadratureRule {
    /// Collapsed (conical product) Gauss rule exact for total degree `d ≤ 8`.
    ///
    /// `∫_T f = ∫₀¹∫₀¹ f(s, t(1−s)) (1−s) dt ds`; the `s` integrand has
    /// degree `d + 1` and needs `⌊(d+1)/2⌋ + 1` points, `t` needs `⌊d/2⌋ + 1`.
    pub fn new(exactness: usize) -> Result<Self> {
        if !(1..=8).contains(&exactness) {
            return Err(Error::UnsupportedQuadrature(exactness));
        }
        let (s_nodes, s_weights) = gauss_legendre(exactness.div_ceil(2) + 1);
        let (t_nodes, t_weights) = gauss_legendre(exactness / 2 + 1);
        let mut points = Vec::with_capacity(s_nodes.len() * t_nodes.len());
        let mut w = Vec::with_capacity(points.capacity());
        for (s, ws) in s_nodes.iter().zip(&s_weights) {
            for (t, wt) in t_nodes.iter().zip(&t_weights) {
                points.push([*s, t * (1.0 - s)]);
                w.push(ws * wt * (1.0 - s));
            }
        }
        Ok(Self {
            points,
            weights: w,
            exactness,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn exact_on_monomials() {
        for d in 1..=8 {
            let rule = QuadratureRule::new(d).unwrap();
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 0.5).abs() <= 1e-15, "d={d}: {total}");
            for a in 0..=d as u32 {
                for b in 0..=(d as u32 - a) {
                    let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                    let approx: f64 = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    assert!((approx - exact).abs() < 1e-15, "d={d} x^{a} y^{b}");
                }
            }
        }
    }

    #[test]
    fn spot_values() {
        let r2 = QuadratureRule::new(2).unwrap();
        let int = |r: &QuadratureRule, f: &dyn Fn(Point) -> f64| -> f64 {
            r.points
                .iter()
                .zip(&r.weights)
                .map(|(p, w)| w * f(*p))
                .sum()
        };
        assert!((int(&r2, &|_| 1.0) - 0.5).abs() < 1e-15);
        assert!((int(&r2, &|p| p[0]) - 1.0 / 6.0).abs() < 1e-15);
        let r4 = QuadratureRule::new(4).unwrap();
        assert!((int(&r4, &|p| p[0] * p[0] * p[1] * p[1]) - 1.0 / 180.0).abs() < 1e-16);
    }

    #[test]
    fn rejects_out_of_range() {
        assert_eq!(QuadratureRule::new(9), Err(Error::UnsupportedQuadrature(9)));
        assert!(QuadratureRule::new(0).is_err());
    }

    #[test]
    fn segment_rule_is_exact() {
        for d in 0..=10usize {
            let (x, w) = segment_rule(d);
            for p in 0..=d as i32 {
                let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
                assert!(
                    (approx - 1.0 / (p as f64 + 1.0)).abs() < 1e-15,
                    "d={d} p={p}"
                );
            }
        }
    }
}
