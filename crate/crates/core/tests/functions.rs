mod common;

use std::f64::consts::TAU;

use qbnb::expr::Derivatives;
use qbnb::functions::{
    dixon_szego, random_rastrigin_like, rastrigin_family, rastrigin_standard, shifted_quadratic,
    DixonSzego, TestProblem,
};
use qbnb::Problem;

use common::{fd_gradient, grid_polish, rel_err, Lcg};

fn catalog() -> Vec<TestProblem> {
    let mut v = vec![
        shifted_quadratic(),
        rastrigin_standard(2),
        rastrigin_standard(3),
        rastrigin_family(&[0.4, 1.3], 3.0, -0.5, 2.0),
        random_rastrigin_like(3, 1.0),
        random_rastrigin_like(3, -1.0),
    ];
    v.extend(DixonSzego::ALL.into_iter().map(dixon_szego));
    v
}

fn check_oracles(p: &Problem, seed: u64) {
    let mut rng = Lcg::new(seed);
    let f = |x: &[f64]| p.eval(x);
    for _ in 0..100 {
        let x = rng.point(p.domain());
        let scale = p.domain().diameter();
        let h = 1e-6 * scale;
        let g = p.gradient(&x).unwrap();
        let fd = fd_gradient(&f, &x, h);
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        for i in 0..x.len() {
            let err = (g[i] - fd[i]).abs() / (1.0 + gnorm);
            assert!(err < 1e-5, "{} grad[{i}] at {x:?}: {} vs {}", p.name(), g[i], fd[i]);
        }
        let hess = p.hessian(&x).unwrap();
        let hnorm = hess.frobenius_norm();
        for j in 0..x.len() {
            let mut a = x.clone();
            let mut b = x.clone();
            a[j] += h;
            b[j] -= h;
            let ga = p.gradient(&a).unwrap();
            let gb = p.gradient(&b).unwrap();
            for i in 0..x.len() {
                let fd = (ga[i] - gb[i]) / (2.0 * h);
                let err = (hess[(i, j)] - fd).abs() / (1.0 + hnorm);
                assert!(err < 1e-5, "{} hess[{i},{j}] at {x:?}: {} vs {fd}", p.name(), hess[(i, j)]);
            }
        }
    }
}

#[test]
fn oracles_agree_with_finite_differences() {
    for (k, t) in catalog().iter().enumerate() {
        check_oracles(&t.problem, 100 + k as u64);
    }
}

#[test]
fn compiled_oracles_agree_with_expressions() {
    let mut rng = Lcg::new(5);
    for t in catalog() {
        let e = t.expr.as_ref().expect("catalog problems carry an expression");
        for _ in 0..100 {
            let x = rng.point(t.problem.domain());
            assert!(rel_err(e.eval(&x), t.problem.eval(&x)) < 1e-12, "{}", t.problem.name());
        }
    }
}

#[test]
fn tabulated_minima_match_grid_oracle() {
    for f in DixonSzego::ALL {
        let t = dixon_szego(f);
        let p = &t.problem;
        let (v, x) = grid_polish(|x| p.eval(x), p.domain(), 1_000_000, 64);
        let known = p.known_minimum().unwrap().value;
        assert!((v - known).abs() < 1e-6, "{f}: oracle {v} at {x:?}, tabulated {known}");
    }
}

#[test]
fn rastrigin_minimum_is_origin() {
    let t = rastrigin_standard(2);
    let p = &t.problem;
    let (v, x) = grid_polish(|x| p.eval(x), p.domain(), 1_000_000, 16);
    assert!(v.abs() < 1e-12 && x.iter().all(|c| c.abs() < 1e-6), "{v} at {x:?}");
    let km = p.known_minimum().unwrap();
    assert_eq!(km.value, 0.0);
    assert_eq!(km.location.as_deref(), Some(&[0.0, 0.0][..]));

    let q = shifted_quadratic();
    let (v, x) = grid_polish(|x| q.problem.eval(x), q.problem.domain(), 1_000_000, 4);
    assert!(v < 1e-20 && (x[0] - 0.3).abs() < 1e-9);
}

#[test]
fn random_inner_family_minimized_at_origin() {
    for seed in 1..=10 {
        let t = random_rastrigin_like(seed, 1.0);
        let p = &t.problem;
        assert_eq!(p.eval(&[0.0; 3]), 0.0);
        let (v, _) = grid_polish(|x| p.eval(x), p.domain(), 200_000, 16);
        assert!(v > -1e-12, "seed {seed}: {v}");
    }
}

#[test]
fn random_boundary_family_minimum_lies_on_the_boundary() {
    for seed in 1..=10 {
        let t = random_rastrigin_like(seed, -1.0);
        let p = &t.problem;
        let (v, x) = grid_polish(|x| p.eval(x), p.domain(), 1_000_000, 32);
        assert!(x.iter().any(|c| (c.abs() - 5.12).abs() < 1e-9), "seed {seed}: {x:?}");
        // the minimum is attained at a vertex for these parameters
        let corner = x.iter().map(|c| 5.12 * c.signum()).collect::<Vec<_>>();
        assert!((p.eval(&corner) - v).abs() < 1e-9, "seed {seed}");
    }
}

#[test]
fn seeded_alphas_are_reproducible_and_distinct() {
    let a = random_rastrigin_like(1, 1.0).problem;
    let b = random_rastrigin_like(1, 1.0).problem;
    let c = random_rastrigin_like(2, 1.0).problem;
    let x = [1.1, -0.4, 2.5];
    assert_eq!(a.eval(&x).to_bits(), b.eval(&x).to_bits());
    assert_ne!(a.eval(&x), c.eval(&x));
}

/// Largest `|a_i (theta)^k trig(theta x_i) + extra|` over a grid: the
/// operator norm of a diagonal derivative tensor.
fn rastrigin_grid_norms(alpha: &[f64], theta: f64, delta: f64, a: f64, n: usize) -> [f64; 3] {
    let mut m = [0.0f64; 3];
    let d = alpha.len();
    let mut idx = vec![0usize; d];
    loop {
        let x: Vec<f64> = idx.iter().map(|&k| -a + 2.0 * a * k as f64 / (n - 1) as f64).collect();
        let g: f64 = x
            .iter()
            .zip(alpha)
            .map(|(xi, ai)| (ai * theta * (theta * xi).sin() + 2.0 * delta * xi).powi(2))
            .sum::<f64>()
            .sqrt();
        let h = x
            .iter()
            .zip(alpha)
            .map(|(xi, ai)| (ai * theta * theta * (theta * xi).cos() + 2.0 * delta).abs())
            .fold(0.0, f64::max);
        let t = x
            .iter()
            .zip(alpha)
            .map(|(xi, ai)| (ai * theta.powi(3) * (theta * xi).sin()).abs())
            .fold(0.0, f64::max);
        m[0] = m[0].max(g);
        m[1] = m[1].max(h);
        m[2] = m[2].max(t);
        let mut k = 0;
        loop {
            if k == d {
                return m;
            }
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[test]
fn analytic_rastrigin_constants_dominate_grid() {
    let cases: Vec<(Vec<f64>, f64)> = vec![
        (vec![10.0, 10.0], 1.0),
        (vec![0.3, 0.8, 0.5], -1.0),
        (vec![0.9, 0.1, 0.6], 1.0),
    ];
    for (alpha, delta) in cases {
        let t = rastrigin_family(&alpha, TAU, delta, 5.12);
        let c = t.problem.constants();
        let n = if alpha.len() == 2 { 1000 } else { 100 };
        let m = rastrigin_grid_norms(&alpha, TAU, delta, 5.12, n);
        assert!(c.l1.unwrap() >= m[0], "{alpha:?}: L1 {:?} < {}", c.l1, m[0]);
        assert!(c.l2.unwrap() >= m[1], "{alpha:?}: L2 {:?} < {}", c.l2, m[1]);
        assert!(c.l3.unwrap() >= m[2], "{alpha:?}: L3 {:?} < {}", c.l3, m[2]);
    }
}

#[test]
fn interval_constants_dominate_sampled_norms() {
    for f in DixonSzego::ALL {
        let t = dixon_szego(f);
        let p = &t.problem;
        let c = p.constants();
        let derivs = Derivatives::new(t.expr.as_ref().unwrap(), p.dim(), 3).unwrap();
        let budget = match p.dim() {
            2 => 250_000,
            3 | 4 => 60_000,
            _ => 15_000,
        };
        let mut rng = Lcg::new(17);
        let mut m = [0.0f64; 3];
        for _ in 0..budget {
            let x = rng.point(p.domain());
            for (s, slot) in m.iter_mut().enumerate() {
                *slot = slot.max(derivs.norm_at(s as u8 + 1, &x).unwrap());
            }
        }
        let bounds = [c.l1.unwrap(), c.l2.unwrap(), c.l3.unwrap()];
        for s in 0..3 {
            assert!(bounds[s] >= m[s], "{f}: L{} = {} < sampled {}", s + 1, bounds[s], m[s]);
        }
    }
}
