//! `bounds` subcommand: interval Lipschitz constant of a parsed expression,
//! cross-checked against the largest derivative norm on a sample grid.

use std::fmt;

use qbnb::expr::{parse, BoundError, Derivatives};
use qbnb::Domain;

use crate::BenchError;

/// Grid points used for the cross-check.
pub const GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub expr: String,
    pub domain: Domain,
    pub order: u8,
    pub bound: f64,
    pub grid_max: f64,
    pub grid_points: usize,
}

impl BoundReport {
    pub fn sound(&self) -> bool {
        self.bound >= self.grid_max
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "expr: {}", self.expr)?;
        let pairs: Vec<String> = self
            .domain
            .lower()
            .iter()
            .zip(self.domain.upper())
            .map(|(a, b)| format!("[{a}, {b}]"))
            .collect();
        writeln!(f, "domain: {}", pairs.join(" x "))?;
        writeln!(f, "L{} = {}", self.order, self.bound)?;
        writeln!(f, "grid_max = {} ({} points)", self.grid_max, self.grid_points)?;
        writeln!(f, "sound = {}", self.sound())
    }
}

/// Parses `lo,hi` pairs separated by `;` or simply listed in sequence. A
/// single pair is repeated for every variable of the expression.
pub fn parse_domain(text: &str, dim: usize) -> Result<Domain, BenchError> {
    let nums: Vec<f64> = text
        .split([',', ';'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| BenchError::Config(format!("bad number '{s}' in domain")))
        })
        .collect::<Result<_, _>>()?;
    if nums.is_empty() || nums.len() % 2 != 0 {
        return Err(BenchError::Config(format!(
            "domain must list lo,hi pairs, got {} numbers",
            nums.len()
        )));
    }
    let mut pairs: Vec<(f64, f64)> = nums.chunks(2).map(|c| (c[0], c[1])).collect();
    if pairs.len() == 1 && dim > 1 {
        pairs = vec![pairs[0]; dim];
    }
    if pairs.len() < dim {
        return Err(BenchError::Config(format!(
            "expression uses {dim} variables but the domain has {}",
            pairs.len()
        )));
    }
    Domain::from_pairs(&pairs).map_err(|e| BenchError::Config(e.to_string()))
}

fn bound_error(e: BoundError) -> BenchError {
    match e {
        BoundError::Domain(d) => BenchError::Oracle(d.to_string()),
        other => BenchError::Config(other.to_string()),
    }
}

/// Largest order-`s` derivative norm over a regular grid of about `budget`
/// points.
pub fn grid_max(derivs: &Derivatives, domain: &Domain, order: u8, budget: usize) -> (f64, usize) {
    let d = domain.dim();
    let n = ((budget as f64).powf(1.0 / d as f64).floor() as usize).max(2);
    let tape = derivs.tape(order);
    let weights = derivs.weights(order);
    let mut vals = vec![0.0; weights.len()];
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    let (lo, hi) = (domain.lower(), domain.upper());
    let mut best = 0.0f64;
    let mut count = 0;
    loop {
        for i in 0..d {
            x[i] = (lo[i] + (hi[i] - lo[i]) * idx[i] as f64 / (n - 1) as f64).min(hi[i]);
        }
        tape.eval_into(&x, &mut vals);
        let norm = vals
            .iter()
            .zip(&weights)
            .map(|(v, w)| w * v * v)
            .sum::<f64>()
            .sqrt();
        best = best.max(norm);
        count += 1;
        let mut k = 0;
        loop {
            if k == d {
                return (best, count);
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

pub fn compute(expr: &str, domain: &str, order: u8, budget: usize) -> Result<BoundReport, BenchError> {
    if !(1..=3).contains(&order) {
        return Err(BenchError::Config(format!("order must be 1, 2 or 3, got {order}")));
    }
    let e = parse(expr).map_err(|err| BenchError::Config(format!("parse error: {err}")))?;
    let dom = parse_domain(domain, e.arity().max(1))?;
    let derivs = Derivatives::new(&e, dom.dim(), order).map_err(bound_error)?;
    let bound = derivs.bound(&dom, order).map_err(bound_error)?;
    let (grid_max, grid_points) = grid_max(&derivs, &dom, order, budget);
    Ok(BoundReport {
        expr: e.to_string(),
        domain: dom,
        order,
        bound,
        grid_max,
        grid_points,
    })
}

/// Full `bounds` subcommand.
pub fn cmd_bounds(expr: &str, domain: &str, order: u8) -> Result<i32, BenchError> {
    let report = compute(expr, domain, order, GRID_POINTS)?;
    print!("{report}");
    Ok(0)
}
