//! Nodal Lagrange bases on the reference triangle.
//!
//! Local numbering: vertex functions first, then (for degree 2) the
//! midpoint of local edge `k`, which joins vertices `k` and `(k+1) % 3`.

use crate::Point;

/// Number of local basis functions of degree `k`.
pub const fn local_dim(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Lagrange nodes of the reference element in local order.
pub fn reference_nodes(degree: usize) -> Vec<Point> {
    let mut nodes = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    if degree == 2 {
        nodes.extend([[0.5, 0.0], [0.5, 0.5], [0.0, 0.5]]);
    }
    nodes
}

/// Values and reference gradients of all local basis functions at `xi`.
pub fn eval_basis(degree: usize, xi: Point) -> (Vec<f64>, Vec<Point>) {
    let n = local_dim(degree);
    let mut values = vec![0.0; n];
    let mut grads = vec![[0.0; 2]; n];
    eval_basis_into(degree, xi, &mut values, &mut grads);
    (values, grads)
}

pub(crate) fn eval_basis_into(degree: usize, xi: Point, values: &mut [f64], grads: &mut [Point]) {
    let lam = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
    let dlam = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    match degree {
        1 => {
            values[..3].copy_from_slice(&lam);
            grads[..3].copy_from_slice(&dlam);
        }
        2 => {
            for i in 0..3 {
                values[i] = lam[i] * (2.0 * lam[i] - 1.0);
                let s = 4.0 * lam[i] - 1.0;
                grads[i] = [s * dlam[i][0], s * dlam[i][1]];
            }
            for k in 0..3 {
                let (a, b) = (k, (k + 1) % 3);
                values[3 + k] = 4.0 * lam[a] * lam[b];
                grads[3 + k] = [
                    4.0 * (dlam[a][0] * lam[b] + lam[a] * dlam[b][0]),
                    4.0 * (dlam[a][1] * lam[b] + lam[a] * dlam[b][1]),
                ];
            }
        }
        _ => panic!("unsupported degree {degree}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn p1_barycenter_and_gradients() {
        let (v, g) = eval_basis(1, [1.0 / 3.0, 1.0 / 3.0]);
        for x in v {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(g, vec![[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn lagrange_property() {
        for k in [1, 2] {
            for (j, node) in reference_nodes(k).into_iter().enumerate() {
                let (v, _) = eval_basis(k, node);
                for (i, x) in v.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((x - expected).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn p2_gradient_matches_finite_differences() {
        let xi = [0.23, 0.41];
        let (_, g) = eval_basis(2, xi);
        let h = 1e-6;
        for d in 0..2 {
            let mut xp = xi;
            let mut xm = xi;
            xp[d] += h;
            xm[d] -= h;
            let (vp, _) = eval_basis(2, xp);
            let (vm, _) = eval_basis(2, xm);
            for i in 0..6 {
                assert!(((vp[i] - vm[i]) / (2.0 * h) - g[i][d]).abs() < 1e-8);
            }
        }
    }

    proptest! {
        #[test]
        fn partition_of_unity(a in 0.0f64..1.0, b in 0.0f64..1.0, k in 1usize..=2) {
            let xi = if a + b <= 1.0 { [a, b] } else { [1.0 - a, 1.0 - b] };
            let (v, g) = eval_basis(k, xi);
            prop_assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            let gx: f64 = g.iter().map(|g| g[0]).sum();
            let gy: f64 = g.iter().map(|g| g[1]).sum();
            prop_assert!(gx.abs() < 1e-13 && gy.abs() < 1e-13);
        }
    }
}
