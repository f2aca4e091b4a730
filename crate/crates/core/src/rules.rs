//! Sampling and quasi-lower-bound rules.
//!
//! Each rule maps a cube to a sample point and a value `qlb` that must not
//! exceed `f_*` whenever the cube contains a global minimizer. Classical
//! lower bounds (Lipschitz, Lipschitz-gradient, alphaBB) satisfy this on
//! every cube.

use std::fmt;
use std::str::FromStr;

use crate::convex::{minimize_box, ConvexConfig};
use crate::geometry::Cube;
use crate::linalg::symmetric_eigenvalues;
use crate::newton3::rule_qbnb3;
use crate::problem::{Constant, Oracle, Problem, RuleError, RuleOutcome, Work};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Lipschitz,
    LipschitzGradient,
    AlphaBB,
    QBnB2,
    ConstrainedQBnB2,
    QBnB3,
    QBnB23,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Lipschitz,
        Algorithm::LipschitzGradient,
        Algorithm::AlphaBB,
        Algorithm::QBnB2,
        Algorithm::ConstrainedQBnB2,
        Algorithm::QBnB3,
        Algorithm::QBnB23,
    ];

    /// Short name used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Lipschitz => "lipschitz",
            Algorithm::LipschitzGradient => "lipgrad",
            Algorithm::AlphaBB => "alphabb",
            Algorithm::QBnB2 => "qbnb2",
            Algorithm::ConstrainedQBnB2 => "cqbnb2",
            Algorithm::QBnB3 => "qbnb3",
            Algorithm::QBnB23 => "qbnb23",
        }
    }

    /// Checks that `p` carries every constant, oracle and flag the rule uses.
    pub fn validate(self, p: &Problem) -> Result<(), RuleError> {
        let need_grad = || {
            if p.has_gradient() {
                Ok(())
            } else {
                Err(RuleError::MissingOracle(Oracle::Gradient))
            }
        };
        let need_hess = || {
            if p.has_hessian() {
                Ok(())
            } else {
                Err(RuleError::MissingOracle(Oracle::Hessian))
            }
        };
        let need_free = || {
            if p.is_unconstrained() {
                Ok(())
            } else {
                Err(RuleError::ConstraintViolation)
            }
        };
        match self {
            Algorithm::Lipschitz => p.require(Constant::L1).map(drop),
            Algorithm::LipschitzGradient => {
                p.require(Constant::L2)?;
                need_grad()
            }
            Algorithm::AlphaBB => {
                p.require(Constant::L3)?;
                need_grad()?;
                need_hess()
            }
            Algorithm::QBnB2 => {
                p.require(Constant::L2)?;
                need_free()
            }
            Algorithm::ConstrainedQBnB2 => p.require(Constant::L2).map(drop),
            Algorithm::QBnB3 => {
                p.require(Constant::L3)?;
                need_grad()?;
                need_hess()
            }
            Algorithm::QBnB23 => {
                p.require(Constant::L2)?;
                p.require(Constant::L3)?;
                need_free()?;
                need_grad()?;
                need_hess()
            }
        }
    }

    /// Sample and quasi-lower bound for one cube. `eps` is the target
    /// accuracy of the search, used by the rules that solve a subproblem.
    pub fn bound(self, p: &Problem, c: &Cube, eps: f64) -> Result<RuleOutcome, RuleError> {
        match self {
            Algorithm::Lipschitz => rule_lipschitz(p, c),
            Algorithm::LipschitzGradient => rule_lipschitz_gradient(p, c),
            Algorithm::AlphaBB => rule_alphabb(p, c, &ConvexConfig::for_eps(eps)),
            Algorithm::QBnB2 => rule_qbnb2(p, c),
            Algorithm::ConstrainedQBnB2 => rule_constrained_qbnb2(p, c),
            Algorithm::QBnB3 => rule_qbnb3(p, c, eps),
            Algorithm::QBnB23 => match select_rule_qbnb23(p, c)? {
                RuleChoice::SecondOrder => rule_qbnb2(p, c),
                RuleChoice::ThirdOrder => rule_qbnb3(p, c, eps),
            },
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownAlgorithm(pub String);

impl fmt::Display for UnknownAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown algorithm '{}'", self.0)
    }
}

impl std::error::Error for UnknownAlgorithm {}

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| UnknownAlgorithm(s.to_string()))
    }
}

fn work(f: u64, g: u64, h: u64) -> Work {
    Work {
        f_evals: f,
        g_evals: g,
        h_evals: h,
        ..Work::default()
    }
}

/// `qlb = f(x_C) - L1 r`.
pub fn rule_lipschitz(p: &Problem, c: &Cube) -> Result<RuleOutcome, RuleError> {
    let l1 = p.require(Constant::L1)?;
    let x = c.center().to_vec();
    let fx = p.eval_checked(&x)?;
    Ok(RuleOutcome::bounded(fx - l1 * c.radius(), x, fx, 1, work(1, 0, 0)))
}

/// Minimum over the cube of the linear model minus `(L2/2) r^2`, sampled at
/// the minimizing corner.
pub fn rule_lipschitz_gradient(p: &Problem, c: &Cube) -> Result<RuleOutcome, RuleError> {
    let l2 = p.require(Constant::L2)?;
    let x0 = c.center();
    let g = p.gradient(x0)?;
    let f0 = p.eval_checked(x0)?;
    let h = c.half_edge();
    let linear: f64 = g.iter().zip(h).map(|(gi, hi)| gi.abs() * hi).sum();
    let r = c.radius();
    let qlb = f0 - linear - 0.5 * l2 * r * r;
    let corner: Vec<f64> = (0..c.dim())
        .map(|i| {
            let sign = if g[i] < 0.0 { -1.0 } else { 1.0 };
            x0[i] - h[i] * sign
        })
        .collect();
    let fc = p.eval_checked(&corner)?;
    Ok(RuleOutcome::bounded(qlb, corner, fc, 2, work(2, 1, 0)))
}

/// `qlb = f(x_C) - (L2/2) r^2`; valid only for unconstrained problems.
pub fn rule_qbnb2(p: &Problem, c: &Cube) -> Result<RuleOutcome, RuleError> {
    let l2 = p.require(Constant::L2)?;
    if !p.is_unconstrained() {
        return Err(RuleError::ConstraintViolation);
    }
    let x = c.center().to_vec();
    let fx = p.eval_checked(&x)?;
    let r = c.radius();
    Ok(RuleOutcome::bounded(fx - 0.5 * l2 * r * r, x, fx, 2, work(1, 0, 0)))
}

/// Second-order quasi-bound that stays valid when the minimizer lies on the
/// boundary of the domain. Faces shared with the domain are sampled on the
/// boundary; cubes spanning half the domain or more in any coordinate get
/// `-inf`.
pub fn rule_constrained_qbnb2(p: &Problem, c: &Cube) -> Result<RuleOutcome, RuleError> {
    let l2 = p.require(Constant::L2)?;
    let dom = p.domain();
    let d = c.dim();
    let mut x = vec![0.0; d];
    let mut penalty = 0.0;
    for i in 0..d {
        let (a, b) = (dom.lower()[i], dom.upper()[i]);
        let (ci, di) = (c.lower(i), c.upper(i));
        let width = b - a;
        if di - ci >= width - 1e-12 * width {
            let center = c.center().to_vec();
            let fx = p.eval_checked(&center)?;
            return Ok(RuleOutcome::unbounded(center, fx, 2, work(1, 0, 0)));
        }
        let tol = 1e-12 * width;
        x[i] = if (ci - a).abs() <= tol {
            a
        } else if (di - b).abs() <= tol {
            b
        } else {
            c.center()[i]
        };
        penalty += (x[i] - ci).powi(2).max((x[i] - di).powi(2));
    }
    let fx = p.eval_checked(&x)?;
    Ok(RuleOutcome::bounded(fx - 0.5 * l2 * penalty, x, fx, 2, work(1, 0, 0)))
}

/// Convex underestimator `f(x) + alpha (x - u)^T (x - l)` minimized by
/// projected gradient descent; `alpha` comes from `lambda_min(H(x_C)) - L3 r`.
pub fn rule_alphabb(p: &Problem, c: &Cube, cvx: &ConvexConfig) -> Result<RuleOutcome, RuleError> {
    let l3 = p.require(Constant::L3)?;
    let x0 = c.center();
    let h = p.hessian(x0)?;
    let lambda_min = symmetric_eigenvalues(&h)[0];
    let m = lambda_min - l3 * c.radius();
    let alpha = alphabb_alpha(m);
    let d = c.dim();
    let lo: Vec<f64> = (0..d).map(|i| c.lower(i)).collect();
    let hi: Vec<f64> = (0..d).map(|i| c.upper(i)).collect();

    // oracle failures inside the solver surface as NaN and are caught below
    let under = |x: &[f64]| {
        let pen: f64 = (0..d).map(|i| (x[i] - hi[i]) * (x[i] - lo[i])).sum();
        p.eval(x) + alpha * pen
    };
    let under_grad = |x: &[f64]| match p.gradient(x) {
        Ok(mut g) => {
            for i in 0..d {
                g[i] += alpha * (2.0 * x[i] - hi[i] - lo[i]);
            }
            g
        }
        Err(_) => vec![f64::NAN; d],
    };
    let res = minimize_box(&under, &under_grad, &lo, &hi, x0, cvx);
    let fx = p.eval_checked(&res.x)?;
    if !res.value.is_finite() || !res.slack.is_finite() {
        return Err(RuleError::NonFinite(res.x));
    }
    let mut w = work(
        res.evaluations as u64 + 1,
        res.gradient_evaluations as u64,
        1,
    );
    w.convex_iterations = res.iterations as u64;

    if !res.converged {
        // fall back to the Lipschitz-gradient bound, or give up on the cube
        return match p.constants().l2 {
            Some(_) if p.has_gradient() => {
                let lg = rule_lipschitz_gradient(p, c)?;
                w += lg.work;
                Ok(RuleOutcome::bounded(lg.qlb, res.x, fx, 2, w))
            }
            _ => Ok(RuleOutcome::unbounded(res.x, fx, 2, w)),
        };
    }
    Ok(RuleOutcome::bounded(res.value - res.slack, res.x, fx, 2, w))
}

/// `alpha = max(0, -m/2)` for a lower bound `m` on the Hessian spectrum.
pub fn alphabb_alpha(m: f64) -> f64 {
    (-0.5 * m).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleChoice {
    SecondOrder,
    ThirdOrder,
}

/// Third order when the `2r` ball stays in the domain and the second-order
/// gap `(L2/2) r^2` is at least the third-order one `3 L3 r^3`.
pub fn select_rule_qbnb23(p: &Problem, c: &Cube) -> Result<RuleChoice, RuleError> {
    let l2 = p.require(Constant::L2)?;
    let l3 = p.require(Constant::L3)?;
    let inside = c.ball2r_inside(p.domain());
    let small = l3 == 0.0 || c.radius() <= l2 / (6.0 * l3);
    Ok(if inside && small {
        RuleChoice::ThirdOrder
    } else {
        RuleChoice::SecondOrder
    })
}
