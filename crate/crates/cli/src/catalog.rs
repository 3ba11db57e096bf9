//! The `list-cases` catalog.

use std::fmt::Write as _;

use transport_fem::formulations::{Formulation, Method};

pub fn catalog() -> String {
    let mut s = String::new();
    s.push_str("Velocity fields (case.velocity):\n");
    s.push_str("  1  beta1 = (-(x+1)^4 + y, -8(y - x)), inf div = -40\n");
    s.push_str("  2  beta2 = -100 (x + y, y - x)\n");
    s.push_str("  3  beta3(eps) = (10 atan((y - 1/2)/eps) - x^2/eps, sin(x/eps) + sin(y/eps)), needs case.eps\n");
    s.push('\n');
    s.push_str("Cases (case.name), all in conservation form div(beta u) = f:\n");
    s.push_str("  smooth         u = 30 x(1-x) y(1-y), ||u|| = 1, with velocity 1, 2 or 3\n");
    s.push_str("  discontinuous  beta2, f = 0, g = 1 where x > 0.8 and y < 0.5, else 0; no exact solution\n");
    s.push_str("  zero           f = 0, g = 0, u = 0\n");
    s.push_str("  polynomial     constant beta and sigma, quadratic u given by coeffs\n");
    s.push('\n');
    s.push_str("Default parameters:\n");
    for (label, method) in [
        ("gamma_CIP", Method::Cip),
        ("gamma_GLS", Method::Gls),
        ("gamma_DG", Method::Dg),
    ] {
        let _ = writeln!(
            s,
            "  {label:<10} k=1: {}   k=2: {}",
            method.default_gamma(1),
            method.default_gamma(2)
        );
    }
    let _ = writeln!(
        s,
        "  gamma_bc   primal-dual: {}   standard: {}",
        Formulation::PrimalDual.default_gamma_bc(),
        Formulation::Standard.default_gamma_bc()
    );
    s.push_str("gamma_GLS has no established default; 0.1 is this implementation's choice.\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_cases_and_defaults() {
        let c = catalog();
        for needle in ["beta1", "beta2", "beta3(eps)", "smooth", "discontinuous"] {
            assert!(c.contains(needle), "{needle}");
        }
        assert!(c.contains("gamma_CIP  k=1: 0.01"));
        assert!(c.contains("primal-dual: 0.5"));
    }
}
