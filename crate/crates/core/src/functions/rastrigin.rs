use std::f64::consts::TAU;

use super::{ConstantSource, TestProblem};
use crate::expr::Expr;
use crate::geometry::Domain;
use crate::linalg::Matrix;
use crate::problem::{KnownMinimum, LipschitzConstants, Problem};

/// `sum_i alpha_i (1 - cos(theta x_i)) + delta ||x||^2` on `[-a, a]^d`.
///
/// Constants: `L1 = ||alpha|| |theta| + 2 |delta| sqrt(d) a`,
/// `L2 = ||alpha|| theta^2 + 2 |delta|`, `L3 = ||alpha|| |theta|^3`.
pub fn rastrigin_family(alpha: &[f64], theta: f64, delta: f64, a: f64) -> TestProblem {
    assert!(a > 0.0, "half-width must be positive");
    assert!(alpha.iter().all(|v| v.is_finite()), "alpha must be finite");
    let d = alpha.len();
    let norm = alpha.iter().map(|v| v * v).sum::<f64>().sqrt();
    let constants = LipschitzConstants {
        l1: Some(norm * theta.abs() + 2.0 * delta.abs() * (d as f64).sqrt() * a),
        l2: Some(norm * theta * theta + 2.0 * delta.abs()),
        l3: Some(norm * theta.abs().powi(3)),
    };

    let (af, ag, ah) = (alpha.to_vec(), alpha.to_vec(), alpha.to_vec());
    let domain = Domain::symmetric(d, a).expect("valid domain");
    let mut problem = Problem::new("rastrigin", domain, move |x: &[f64]| {
        x.iter()
            .zip(&af)
            .map(|(xi, ai)| ai * (1.0 - (theta * xi).cos()) + delta * xi * xi)
            .sum()
    })
    .with_gradient(move |x| {
        x.iter()
            .zip(&ag)
            .map(|(xi, ai)| ai * theta * (theta * xi).sin() + 2.0 * delta * xi)
            .collect()
    })
    .with_hessian(move |x| {
        let diag: Vec<f64> = x
            .iter()
            .zip(&ah)
            .map(|(xi, ai)| ai * theta * theta * (theta * xi).cos() + 2.0 * delta)
            .collect();
        Matrix::from_diagonal(&diag)
    })
    .with_constants(constants);

    // with nonnegative weights and delta > 0 the origin is the unique minimizer
    if delta > 0.0 && alpha.iter().all(|v| *v >= 0.0) {
        problem = problem
            .with_unconstrained(true)
            .with_known_minimum(KnownMinimum {
                value: 0.0,
                location: Some(vec![0.0; d]),
                source: "closed form".into(),
            });
    }
    TestProblem {
        problem,
        constants: ConstantSource::Analytic,
        expr: Some(rastrigin_expr(alpha, theta, delta)),
        citation: "Rastrigin-type function with weights alpha",
    }
}

/// Standard Rastrigin: `alpha_i = 10`, `theta = 2 pi`, `delta = 1`, `a = 5.12`.
pub fn rastrigin_standard(d: usize) -> TestProblem {
    rastrigin_family(&vec![10.0; d], TAU, 1.0, 5.12)
}

pub fn rastrigin_expr(alpha: &[f64], theta: f64, delta: f64) -> Expr {
    alpha
        .iter()
        .enumerate()
        .map(|(i, &ai)| {
            let x = Expr::var(i);
            ai * (1.0 - (theta * x.clone()).cos()) + delta * x.powi(2)
        })
        .fold(Expr::constant(0.0), |acc, t| acc + t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_values() {
        let t = rastrigin_standard(2);
        let p = &t.problem;
        assert_eq!(p.eval(&[0.0, 0.0]), 0.0);
        let c = p.constants();
        assert!((c.l1.unwrap() - 103.34).abs() < 0.01, "{:?}", c.l1);
        assert!((c.l2.unwrap() - 560.31).abs() < 0.01, "{:?}", c.l2);
        assert!((c.l3.unwrap() - 3507.9).abs() < 0.1, "{:?}", c.l3);
        assert!(p.is_unconstrained());
    }

    #[test]
    fn pure_quadratic() {
        let t = rastrigin_family(&[0.0, 0.0], TAU, 1.0, 1.0);
        let c = t.problem.constants();
        assert_eq!(c.l2, Some(2.0));
        assert_eq!(c.l3, Some(0.0));
        assert_eq!(t.problem.eval(&[0.5, -0.5]), 0.5);
    }

    #[test]
    fn expr_matches_closure() {
        let alpha = [0.3, 0.9, 0.1];
        let t = rastrigin_family(&alpha, TAU, -1.0, 5.12);
        let e = t.expr.unwrap();
        for x in [[0.1, -2.0, 4.9], [5.12, 5.12, -5.12], [1.3, 0.0, -0.7]] {
            assert!((e.eval(&x) - t.problem.eval(&x)).abs() < 1e-12);
        }
        assert!(!t.problem.is_unconstrained());
    }
}
