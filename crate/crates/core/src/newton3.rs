//! Third-order quasi-lower bound from certified Newton iterations.
//!
//! For a cube with center `x0` and radius `r`, the objective is regularized
//! as `f^(x) = f(x) + (lambda_bar/2) ||x - x0||^2` with
//! `lambda_bar = max(0, 5 L3 r - lambda_min(H(x0)))`. If the cube holds a
//! global minimizer, `f^` is strongly convex on the `2r` ball and Newton's
//! method from `x0` stays within the radii `r_0 = r`,
//! `r_{k+1} = r_k^2 / (2r)` of the regularized minimizer. Any violation of
//! those radii therefore certifies that no minimizer is present.

use crate::geometry::Cube;
use crate::linalg::{symmetric_eigenvalues, Cholesky};
use crate::problem::{Constant, Problem, RuleError, RuleOutcome, ThirdOrderInfo, Work};

pub const MAX_NEWTON_ITERATIONS: u32 = 100;

/// `eps_newton = eps / 200`.
pub fn newton_tolerance(eps: f64) -> f64 {
    eps / 200.0
}

/// `lambda_bar = max(0, 5 L3 r - lambda_min)`.
pub fn regularization(lambda_min: f64, l3: f64, r: f64) -> f64 {
    (5.0 * l3 * r - lambda_min).max(0.0)
}

/// First `n` radii `r_0 = r, r_{k+1} = r_k^2 / (2r)`.
pub fn radii(r: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut rk = r;
    for _ in 0..n {
        out.push(rk);
        rk = rk * rk / (2.0 * r);
    }
    out
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Third-order rule. Cubes whose `2r` ball leaves the domain get `-inf`.
pub fn rule_qbnb3(p: &Problem, c: &Cube, eps: f64) -> Result<RuleOutcome, RuleError> {
    let l3 = p.require(Constant::L3)?;
    let x0 = c.center().to_vec();
    let r = c.radius();
    let f0 = p.eval_checked(&x0)?;
    let mut work = Work {
        f_evals: 1,
        ..Work::default()
    };
    if !c.ball2r_inside(p.domain()) {
        return Ok(RuleOutcome::unbounded(x0, f0, 3, work));
    }
    let h0 = p.hessian(&x0)?;
    work.h_evals += 1;
    let eig = symmetric_eigenvalues(&h0);
    let (lambda_min, lambda_max) = (eig[0], eig[eig.len() - 1]);
    let slack = 1e-12 * (1.0 + r);

    let eps_n = newton_tolerance(eps);
    let mut info = ThirdOrderInfo {
        lambda_min,
        lambda_bar: 0.0,
        eps_newton: eps_n,
        iterations: 0,
    };
    let finish = |mut o: RuleOutcome, info: ThirdOrderInfo| {
        o.third = Some(info);
        Ok(o)
    };

    if lambda_min < -l3 * r - slack {
        return finish(RuleOutcome::eliminated(x0, f0, 3, work), info);
    }

    let lambda_bar = regularization(lambda_min, l3, r);
    info.lambda_bar = lambda_bar;
    let big_m = lambda_max + lambda_bar + 2.0 * l3 * r;
    let fhat = |x: &[f64], fx: f64| fx + 0.5 * lambda_bar * dist(x, &x0).powi(2);

    let mut x = x0.clone();
    let mut fx = f0;
    let mut rk = r;
    let mut k = 0u32;
    loop {
        if 0.5 * big_m * rk * rk <= eps_n {
            let qlb = fhat(&x, fx) - 0.5 * lambda_bar * r * r - eps_n;
            info.iterations = k;
            work.newton_iterations = k as u64;
            return finish(RuleOutcome::bounded(qlb, x, fx, 3, work), info);
        }
        if k >= MAX_NEWTON_ITERATIONS {
            info.iterations = k;
            work.newton_iterations = k as u64;
            return finish(RuleOutcome::unbounded(x, fx, 3, work), info);
        }

        let mut g = p.gradient(&x)?;
        work.g_evals += 1;
        let mut hk = if k == 0 {
            h0.clone()
        } else {
            work.h_evals += 1;
            p.hessian(&x)?
        };
        for i in 0..g.len() {
            g[i] += lambda_bar * (x[i] - x0[i]);
        }
        hk.add_diagonal(lambda_bar);

        let step = match Cholesky::factor(&hk) {
            Ok(ch) => ch.solve(&g),
            Err(_) => {
                info.iterations = k;
                work.newton_iterations = k as u64;
                // Regularized Hessian is at least 3 L3 r on the 2r ball; a
                // failed factorization only certifies anything if that
                // margin is resolvable at the pivot threshold.
                let margin = 3.0 * l3 * r;
                let o = if margin > 1e-8 * hk.frobenius_norm() {
                    RuleOutcome::eliminated(x, fx, 3, work)
                } else {
                    RuleOutcome::unbounded(x, fx, 3, work)
                };
                return finish(o, info);
            }
        };
        let next: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a - s).collect();
        let r_next = rk * rk / (2.0 * r);
        k += 1;
        let moved = dist(&next, &x);
        let drift = dist(&next, &x0);
        if moved > rk + r_next + slack || drift > r_next + r + slack {
            info.iterations = k;
            work.newton_iterations = k as u64;
            return finish(RuleOutcome::eliminated(x0.clone(), f0, 3, work), info);
        }
        x = next;
        fx = p.eval_checked(&x)?;
        work.f_evals += 1;
        rk = r_next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;
    use crate::linalg::Matrix;
    use crate::problem::BoundStatus;

    fn sphere() -> Problem {
        Problem::new(
            "sphere",
            Domain::symmetric(2, 1.0).unwrap(),
            |x: &[f64]| x.iter().map(|v| v * v).sum(),
        )
        .with_gradient(|x| x.iter().map(|v| 2.0 * v).collect())
        .with_hessian(|x| Matrix::from_diagonal(&vec![2.0; x.len()]))
        .with_l3(0.0)
    }

    #[test]
    fn radius_sequence() {
        assert_eq!(radii(1.0, 4), vec![1.0, 0.5, 0.125, 0.0078125]);
    }

    #[test]
    fn regularization_weight() {
        assert_eq!(regularization(-1.0, 2.0, 0.5), 6.0);
        assert_eq!(regularization(2.0, 0.0, 0.1), 0.0);
    }

    #[test]
    fn quadratic_is_exact_up_to_tolerance() {
        let p = sphere();
        let c = Cube::new(vec![0.0, 0.0], vec![0.1, 0.1]).unwrap();
        let eps = 1e-8;
        let o = rule_qbnb3(&p, &c, eps).unwrap();
        assert_eq!(o.status, BoundStatus::Bounded);
        assert_eq!(o.gap(), newton_tolerance(eps));
        assert_eq!(o.third.unwrap().lambda_bar, 0.0);

        let off = Cube::new(vec![0.05, -0.03], vec![0.1, 0.1]).unwrap();
        let o = rule_qbnb3(&p, &off, eps).unwrap();
        assert_eq!(o.status, BoundStatus::Bounded);
        assert!(o.value.abs() < 1e-20);
        assert!(o.qlb <= 0.0);
    }

    #[test]
    fn negative_curvature_eliminates() {
        let p = Problem::new("saddle", Domain::symmetric(1, 10.0).unwrap(), |x| {
            -2.5 * x[0] * x[0]
        })
        .with_gradient(|x| vec![-5.0 * x[0]])
        .with_hessian(|_| Matrix::from_diagonal(&[-5.0]))
        .with_l3(1.0);
        let c = Cube::new(vec![0.0], vec![1.0]).unwrap();
        let o = rule_qbnb3(&p, &c, 1e-8).unwrap();
        assert_eq!(o.status, BoundStatus::Eliminated);
        assert_eq!(o.qlb, f64::INFINITY);
    }

    #[test]
    fn far_minimizer_is_certified_absent() {
        // minimizer at 0.5, cube around 0 of radius 0.1: Newton jumps too far
        let p = Problem::new("shift", Domain::symmetric(1, 2.0).unwrap(), |x| {
            (x[0] - 0.5).powi(2)
        })
        .with_gradient(|x| vec![2.0 * (x[0] - 0.5)])
        .with_hessian(|_| Matrix::from_diagonal(&[2.0]))
        .with_l3(0.0);
        let c = Cube::new(vec![0.0], vec![0.1]).unwrap();
        let o = rule_qbnb3(&p, &c, 1e-8).unwrap();
        assert_eq!(o.status, BoundStatus::Eliminated);
    }

    #[test]
    fn boundary_cube_is_unbounded() {
        let p = sphere();
        let c = Cube::new(vec![0.9, 0.0], vec![0.1, 0.1]).unwrap();
        assert_eq!(
            rule_qbnb3(&p, &c, 1e-8).unwrap().status,
            BoundStatus::Unbounded
        );
    }

    #[test]
    fn deterministic() {
        let p = sphere();
        let c = Cube::new(vec![0.01, 0.02], vec![0.05, 0.05]).unwrap();
        assert_eq!(rule_qbnb3(&p, &c, 1e-6).unwrap(), rule_qbnb3(&p, &c, 1e-6).unwrap());
    }
}
