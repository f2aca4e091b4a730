mod common;

use qbnb::convex::ConvexConfig;
use qbnb::functions::{
    dixon_szego, random_rastrigin_like, rastrigin_standard, shifted_quadratic, DixonSzego,
};
use qbnb::linalg::Matrix;
use qbnb::newton3::{newton_tolerance, rule_qbnb3};
use qbnb::rules::{
    rule_alphabb, rule_constrained_qbnb2, rule_lipschitz, rule_lipschitz_gradient, rule_qbnb2,
};
use qbnb::search::{solve_with_observer, SearchConfig};
use qbnb::{Algorithm, BoundStatus, Cube, Domain, Problem};

use common::{grid_polish, Lcg};

fn dominance_set() -> Vec<Problem> {
    vec![
        rastrigin_standard(2).problem,
        rastrigin_standard(3).problem,
        random_rastrigin_like(4, 1.0).problem,
        dixon_szego(DixonSzego::Branin).problem,
        dixon_szego(DixonSzego::Camelback).problem,
        dixon_szego(DixonSzego::Hartman3).problem,
        dixon_szego(DixonSzego::Shekel5).problem,
    ]
}

#[test]
fn gradient_rule_never_beats_second_order_rule() {
    let mut rng = Lcg::new(11);
    let mut checked = 0;
    for p in dominance_set() {
        for _ in 0..1000 {
            let c = rng.subcube(p.domain(), 40);
            let lg = rule_lipschitz_gradient(&p, &c).unwrap();
            let q2 = rule_qbnb2(&p, &c).unwrap();
            let tol = 1e-12 * (1.0 + q2.qlb.abs());
            assert!(lg.qlb <= q2.qlb + tol, "{}: {} > {}", p.name(), lg.qlb, q2.qlb);
            let g = p.gradient(c.center()).unwrap();
            if g.iter().all(|v| *v == 0.0) {
                assert!((lg.qlb - q2.qlb).abs() <= tol);
            } else {
                assert!(lg.qlb < q2.qlb);
            }
            checked += 1;
        }
    }
    assert!(checked >= 5000);
}

#[test]
fn rules_coincide_at_stationary_centers() {
    // the root cube of a symmetric Rastrigin domain is centered at the origin
    let p = rastrigin_standard(2).problem;
    let c = Cube::from_domain(p.domain()).unwrap();
    let lg = rule_lipschitz_gradient(&p, &c).unwrap();
    let q2 = rule_qbnb2(&p, &c).unwrap();
    assert_eq!(lg.qlb, q2.qlb);
}

/// Closed containment with an absolute slack for accumulated midpoint rounding.
fn holds(c: &Cube, x: &[f64]) -> bool {
    x.iter()
        .zip(c.center().iter().zip(c.half_edge()))
        .all(|(xi, (ci, hi))| (xi - ci).abs() <= hi + 1e-12 * (1.0 + xi.abs()))
}

/// Random sub-cubes that contain `x`, found by descending towards it.
fn cubes_around(domain: &Domain, x: &[f64], rng: &mut Lcg, n: usize, depth: usize) -> Vec<Cube> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let target = (rng.next() * (depth + 1) as f64) as usize;
        let mut c = Cube::from_domain(domain).unwrap();
        for _ in 0..target {
            let (a, b) = c.bisect_longest();
            c = if holds(&a, x) && (!holds(&b, x) || rng.next() < 0.5) {
                a
            } else {
                b
            };
        }
        assert!(holds(&c, x));
        out.push(c);
    }
    out
}

struct Known {
    problem: Problem,
    x: Vec<f64>,
    f: f64,
}

fn known_minimizers() -> Vec<Known> {
    let mut v = Vec::new();
    for t in [rastrigin_standard(2), shifted_quadratic(), random_rastrigin_like(6, 1.0)] {
        let x = t.problem.known_minimum().unwrap().location.clone().unwrap();
        let f = t.problem.eval(&x);
        v.push(Known { problem: t.problem, x, f });
    }
    for p in [
        dixon_szego(DixonSzego::Branin).problem,
        dixon_szego(DixonSzego::Camelback).problem,
        dixon_szego(DixonSzego::Hartman3).problem,
        random_rastrigin_like(6, -1.0).problem,
    ] {
        let (f, x) = grid_polish(|x| p.eval(x), p.domain(), 200_000, 16);
        v.push(Known { problem: p, x, f });
    }
    v
}

#[test]
fn quasi_bounds_hold_on_cubes_with_a_minimizer() {
    let mut rng = Lcg::new(23);
    let eps = 1e-8;
    for k in known_minimizers() {
        let p = &k.problem;
        for c in cubes_around(p.domain(), &k.x, &mut rng, 300, 50) {
            for algo in Algorithm::ALL {
                if algo.validate(p).is_err() {
                    continue;
                }
                let o = algo.bound(p, &c, eps).unwrap();
                assert_ne!(o.status, BoundStatus::Eliminated, "{algo} eliminated a minimizer cube of {}", p.name());
                if o.status == BoundStatus::Bounded {
                    assert!(
                        o.qlb <= k.f + 1e-12 * (1.0 + k.f.abs()),
                        "{algo} on {}: qlb {} > f* {} (r = {})",
                        p.name(),
                        o.qlb,
                        k.f,
                        c.radius()
                    );
                }
            }
        }
    }
}

#[test]
fn second_order_rule_breaks_on_boundary_minima() {
    // flagging a constrained problem as unconstrained makes the plain rule
    // overshoot the true minimum on the corner cubes
    let t = random_rastrigin_like(6, -1.0);
    let p = t.problem.clone().with_unconstrained(true);
    let (f, x) = grid_polish(|x| p.eval(x), p.domain(), 200_000, 16);
    let mut rng = Lcg::new(3);
    let over = cubes_around(p.domain(), &x, &mut rng, 200, 40)
        .iter()
        .filter(|c| rule_qbnb2(&p, c).unwrap().qlb > f)
        .count();
    assert!(over > 0);
    assert!(rule_qbnb2(&t.problem, &Cube::from_domain(p.domain()).unwrap()).is_err());
}

#[test]
fn gap_orders() {
    let mut rng = Lcg::new(31);
    for p in dominance_set() {
        let c2 = p.constants();
        let (l1, l2) = (c2.l1.unwrap(), c2.l2.unwrap());
        for _ in 0..500 {
            let c = rng.subcube(p.domain(), 40);
            let r = c.radius();
            let q2 = rule_qbnb2(&p, &c).unwrap();
            let exact = 0.5 * l2 * r * r;
            assert!((q2.gap() - exact).abs() <= 1e-12 * (1.0 + q2.value.abs() + exact));
            let cq = rule_constrained_qbnb2(&p, &c).unwrap();
            if cq.status == BoundStatus::Bounded {
                assert!(cq.gap() <= 0.5 * l2 * 4.0 * r * r * (1.0 + 1e-12) + 1e-12);
            }
            let l = rule_lipschitz(&p, &c).unwrap();
            assert!(l.gap() <= 2.0 * l1 * r * (1.0 + 1e-12));
        }
    }
}

#[test]
fn constrained_rule_unbounded_on_wide_cubes() {
    let p = rastrigin_standard(2).problem;
    let root = Cube::from_domain(p.domain()).unwrap();
    assert_eq!(rule_constrained_qbnb2(&p, &root).unwrap().status, BoundStatus::Unbounded);
    let (a, _) = root.bisect_longest();
    // a half of the domain still spans the full width in the other coordinate
    assert_eq!(rule_constrained_qbnb2(&p, &a).unwrap().status, BoundStatus::Unbounded);
    let (aa, _) = a.bisect_longest();
    assert_eq!(rule_constrained_qbnb2(&p, &aa).unwrap().status, BoundStatus::Bounded);
}

fn convex_quadratic(shift: [f64; 2]) -> Problem {
    // 2x^2 + xy + y^2 shifted, Hessian [[4, 1], [1, 2]]
    let dom = Domain::symmetric(2, 2.0).unwrap();
    Problem::new("convex", dom, move |x| {
        let (u, v) = (x[0] - shift[0], x[1] - shift[1]);
        2.0 * u * u + u * v + v * v
    })
    .with_gradient(move |x| {
        let (u, v) = (x[0] - shift[0], x[1] - shift[1]);
        vec![4.0 * u + v, u + 2.0 * v]
    })
    .with_hessian(|_| Matrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 2.0]]))
    .with_l1(40.0)
    .with_l2(4.5)
    .with_l3(0.0)
}

#[test]
fn alphabb_is_exact_on_convex_instances() {
    let mut rng = Lcg::new(41);
    let default = ConvexConfig::for_eps(1e-8);
    // run the solver to stationarity so its tolerance is negligible
    let tight = ConvexConfig {
        objective_tol: 0.0,
        grad_tol: 1e-12,
        ..default
    };
    for shift in [[0.3, -0.2], [1.9, 1.9], [-3.0, 0.5]] {
        let p = convex_quadratic(shift);
        for _ in 0..40 {
            let c = rng.subcube(p.domain(), 8);
            let (m, _) = grid_polish(|x| p.eval(x), &c.to_domain(), 10_000, 4);
            let loose = rule_alphabb(&p, &c, &default).unwrap();
            assert_eq!(loose.status, BoundStatus::Bounded);
            assert!(loose.qlb <= m + 1e-12, "qlb {} above min {m}", loose.qlb);
            let o = rule_alphabb(&p, &c, &tight).unwrap();
            assert_eq!(o.status, BoundStatus::Bounded);
            assert!(o.qlb <= m + 1e-12, "qlb {} above min {m}", o.qlb);
            assert!(m - o.qlb <= 1e-9, "qlb {} vs min {m}", o.qlb);
        }
    }
}

#[test]
fn third_order_outcomes_satisfy_gap_and_containment() {
    let eps = 1e-8;
    let eps_n = newton_tolerance(eps);
    let runs = [
        (rastrigin_standard(2).problem, Algorithm::QBnB23, 200),
        (rastrigin_standard(2).problem, Algorithm::QBnB3, 24),
        (dixon_szego(DixonSzego::Camelback).problem, Algorithm::QBnB23, 200),
        (dixon_szego(DixonSzego::Branin).problem, Algorithm::QBnB3, 30),
    ];
    let mut seen = 0usize;
    for (p, algo, generations) in runs {
        let l3 = p.constants().l3.unwrap();
        let mut obs = |c: &Cube, o: &qbnb::RuleOutcome| {
            if o.order != 3 || o.status != BoundStatus::Bounded {
                return;
            }
            let r = c.radius();
            assert!(o.gap() <= 3.0 * l3 * r.powi(3) + eps_n + 1e-12, "gap {} at r {r}", o.gap());
            let drift = o
                .sample
                .iter()
                .zip(c.center())
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(drift <= 2.0 * r * (1.0 + 1e-12));
            assert!(p.domain().contains(&o.sample));
            seen += 1;
        };
        let cfg = SearchConfig::new(eps).with_max_generations(generations);
        solve_with_observer(&p, algo, &cfg, &mut obs).unwrap();
    }
    assert!(seen > 100, "only {seen} third-order cubes");
}

#[test]
fn third_order_gap_is_exactly_newton_slack_near_minimizer() {
    let p = rastrigin_standard(2).problem;
    let eps = 1e-8;
    let eps_n = newton_tolerance(eps);
    let mut rng = Lcg::new(9);
    let mut exact = 0;
    for _ in 0..200 {
        // small cubes around the origin, where lambda_min >= 5 L3 r
        let h = rng.uniform(1e-5, 2e-3);
        let center = vec![rng.uniform(-h, h), rng.uniform(-h, h)];
        let c = Cube::new(center, vec![h, h]).unwrap();
        let o = rule_qbnb3(&p, &c, eps).unwrap();
        let info = o.third.unwrap();
        assert_eq!(o.status, BoundStatus::Bounded);
        assert_eq!(info.lambda_bar, 0.0);
        assert!((o.gap() - eps_n).abs() <= 1e-15, "gap {} vs {eps_n}", o.gap());
        exact += 1;
    }
    assert_eq!(exact, 200);
}

#[test]
fn rules_are_deterministic() {
    let p = dixon_szego(DixonSzego::Hartman3).problem;
    let mut rng = Lcg::new(2);
    for _ in 0..50 {
        let c = rng.subcube(p.domain(), 30);
        for algo in Algorithm::ALL {
            let a = algo.bound(&p, &c, 1e-8).unwrap();
            let b = algo.bound(&p, &c, 1e-8).unwrap();
            assert_eq!(a.qlb.to_bits(), b.qlb.to_bits());
            assert_eq!(a.sample, b.sample);
            assert_eq!(a.status, b.status);
        }
    }
}
