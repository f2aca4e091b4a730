//! Benchmark problems: the Rastrigin family with closed-form constants, the
//! Dixon-Szego set with interval-derived constants, and seeded generators.

mod dixon_szego;
mod random;
mod rastrigin;

pub use dixon_szego::{dixon_szego, DixonSzego};
pub use random::{random_rastrigin_like, SplitMix64};
pub use rastrigin::{rastrigin_expr, rastrigin_family, rastrigin_standard};

use crate::expr::{BoundError, Derivatives, Expr};
use crate::geometry::Domain;
use crate::linalg::Matrix;
use crate::problem::{LipschitzConstants, Problem};

/// How the Lipschitz constants of a test problem were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantSource {
    Analytic,
    Interval,
}

/// A [`Problem`] together with notes on where its numbers come from.
#[derive(Debug, Clone)]
pub struct TestProblem {
    pub problem: Problem,
    pub constants: ConstantSource,
    /// Symbolic form of the objective, when one exists.
    pub expr: Option<Expr>,
    pub citation: &'static str,
}

/// `(x - 0.3)^2` on `[-1, 1]`, minimizer `0.3`.
pub fn shifted_quadratic() -> TestProblem {
    let dom = Domain::new(vec![-1.0], vec![1.0]).expect("valid domain");
    let problem = Problem::new("quadratic", dom, |x| (x[0] - 0.3).powi(2))
        .with_gradient(|x| vec![2.0 * (x[0] - 0.3)])
        .with_hessian(|_| Matrix::from_diagonal(&[2.0]))
        .with_constants(LipschitzConstants {
            l1: Some(2.6),
            l2: Some(2.0),
            l3: Some(0.0),
        })
        .with_unconstrained(true)
        .with_known_minimum(crate::problem::KnownMinimum {
            value: 0.0,
            location: Some(vec![0.3]),
            source: "closed form".into(),
        });
    let x = Expr::var(0);
    TestProblem {
        problem,
        constants: ConstantSource::Analytic,
        expr: Some((x - 0.3).powi(2)),
        citation: "shifted quadratic",
    }
}

/// Builds a problem whose oracles are compiled from symbolic derivatives
/// and whose `L1..L3` are interval bounds over the domain.
pub fn problem_from_expr(name: &str, f: &Expr, domain: Domain) -> Result<Problem, BoundError> {
    let d = domain.dim();
    let derivs = Derivatives::new(f, d, 3)?;
    let constants = LipschitzConstants {
        l1: Some(derivs.bound(&domain, 1)?),
        l2: Some(derivs.bound(&domain, 2)?),
        l3: Some(derivs.bound(&domain, 3)?),
    };
    let f_tape = derivs.tape(0);
    let g_tape = derivs.tape(1);
    let h_tape = derivs.tape(2);
    let index: Vec<(usize, usize)> = derivs
        .hessian_entries()
        .iter()
        .map(|(i, j, _)| (*i, *j))
        .collect();
    Ok(Problem::new(name, domain, move |x| f_tape.eval(x))
        .with_gradient(move |x| {
            let mut g = vec![0.0; d];
            g_tape.eval_into(x, &mut g);
            g
        })
        .with_hessian(move |x| {
            let mut vals = vec![0.0; index.len()];
            h_tape.eval_into(x, &mut vals);
            let mut m = Matrix::zeros(d);
            for (&(i, j), v) in index.iter().zip(vals) {
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
            m
        })
        .with_constants(constants))
}
