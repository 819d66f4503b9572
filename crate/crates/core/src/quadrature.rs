//! Gauss-Hermite quadrature rules.
//!
//! Nodes and weights for integrals against exp(-x^2) via Golub-Welsch: the
//! Jacobi matrix of the Hermite recurrence is symmetric tridiagonal with
//! zero diagonal and off-diagonal sqrt(k/2); its eigenvalues are the nodes
//! and the squared first eigenvector components scale the total mass
//! sqrt(pi) into weights. Rules are symmetrized so odd moments vanish
//! exactly.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::PI;

/// Nodes (ascending) and weights of the n-point rule for
/// `integral f(x) exp(-x^2) dx ~= sum w_i f(x_i)`. Exact for polynomials of
/// degree 2n - 1.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::usage("quadrature order must be >= 1"));
    }
    if n == 1 {
        return Ok((vec![0.0], vec![PI.sqrt()]));
    }
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eigen = SymmetricEigen::new(jacobi);
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eigen.eigenvectors[(0, i)];
            (eigen.eigenvalues[i], PI.sqrt() * v0 * v0)
        })
        .collect();
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));
    // Enforce the exact +/- symmetry of the rule.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = (rule[j].0 - rule[i].0) / 2.0;
        let w = (rule[i].1 + rule[j].1) / 2.0;
        rule[i] = (-x, w);
        rule[j] = (x, w);
    }
    if n % 2 == 1 {
        rule[n / 2].0 = 0.0;
    }
    Ok(rule.into_iter().unzip())
}

/// Expectation of `f` under a standard normal: `E[f(Z)], Z ~ N(0, 1)`,
/// computed as `(1/sqrt(pi)) sum w_i f(sqrt(2) x_i)`.
pub fn normal_expectation(order: usize, f: impl Fn(f64) -> f64) -> Result<f64> {
    let (nodes, weights) = gauss_hermite(order)?;
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        acc += w * f(std::f64::consts::SQRT_2 * x);
    }
    Ok(acc / PI.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn moment(nodes: &[f64], weights: &[f64], p: u32) -> f64 {
        nodes
            .iter()
            .zip(weights)
            .map(|(x, w)| w * x.powi(p as i32))
            .sum()
    }

    #[test]
    fn low_moments_match_closed_forms() {
        let (nodes, weights) = gauss_hermite(16).unwrap();
        let root_pi = PI.sqrt();
        assert_relative_eq!(moment(&nodes, &weights, 0), root_pi, max_relative = 1e-13);
        assert_relative_eq!(
            moment(&nodes, &weights, 2),
            root_pi / 2.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            moment(&nodes, &weights, 4),
            3.0 * root_pi / 4.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn polynomials_up_to_degree_2n_minus_1_are_exact() {
        let n = 8;
        let (nodes, weights) = gauss_hermite(n).unwrap();
        // Even moments of exp(-x^2): sqrt(pi) (2k-1)!! / 2^k; odd are 0.
        let mut expect = PI.sqrt();
        for k in 0..n {
            let p = 2 * k as u32;
            assert_relative_eq!(moment(&nodes, &weights, p), expect, max_relative = 1e-12);
            assert!(moment(&nodes, &weights, p + 1).abs() <= 1e-12 * expect);
            expect *= (2 * k + 1) as f64 / 2.0;
        }
    }

    #[test]
    fn nodes_are_sorted_and_symmetric() {
        let (nodes, weights) = gauss_hermite(31).unwrap();
        for w in nodes.windows(2) {
            assert!(w[0] < w[1]);
        }
        for i in 0..nodes.len() {
            let j = nodes.len() - 1 - i;
            assert_eq!(nodes[i], -nodes[j]);
            assert_eq!(weights[i], weights[j]);
        }
        assert_eq!(nodes[15], 0.0);
    }

    #[test]
    fn doubling_the_order_changes_smooth_integrals_below_1e_10() {
        // The integrand family behind binary-alphabet mutual information.
        let f = |x: f64| (1.0f64 + x).cosh().ln() - 0.3 * x;
        let a = normal_expectation(64, f).unwrap();
        let b = normal_expectation(128, f).unwrap();
        assert!((a - b).abs() < 1e-10, "order drift {}", (a - b).abs());
    }

    #[test]
    fn normal_expectation_of_square_is_one() {
        let v = normal_expectation(32, |x| x * x).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_order_is_rejected() {
        assert!(gauss_hermite(0).is_err());
    }
}
