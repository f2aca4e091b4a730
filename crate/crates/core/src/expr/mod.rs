//! Expression trees with symbolic differentiation, interval evaluation and a
//! compiled point evaluator.
//!
//! Constructors simplify as they build: constants fold, `0` and `1`
//! identities disappear and constant factors are pulled to the left of a
//! product. This is all the simplification the crate performs; it is enough to
//! keep third-derivative trees of the benchmark functions small.

mod lipschitz;
mod parse;
mod tape;

use std::fmt;
use std::ops;
use std::sync::Arc;

use crate::geometry::Domain;
use crate::interval::{DomainError, Interval};

pub use lipschitz::{lipschitz_bound, BoundError, Derivatives};
pub use parse::{parse, ParseError};
pub use tape::Tape;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(usize),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Neg(Expr),
    Pow(Expr, u32),
    Sin(Expr),
    Cos(Expr),
    Exp(Expr),
    Sqrt(Expr),
}

/// Shared, immutable expression tree.
#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl Expr {
    fn wrap(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(c: f64) -> Self {
        Self::wrap(Node::Const(c))
    }

    /// Variable `x_{index+1}` (zero-based index).
    pub fn var(index: usize) -> Self {
        Self::wrap(Node::Var(index))
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    fn is_const(&self, v: f64) -> bool {
        self.as_const() == Some(v)
    }

    pub fn powi(&self, n: u32) -> Expr {
        match (n, self.node()) {
            (0, _) => Expr::constant(1.0),
            (1, _) => self.clone(),
            (_, Node::Const(c)) => Expr::constant(c.powi(n as i32)),
            (_, Node::Pow(base, m)) => base.powi(n * m),
            _ => Self::wrap(Node::Pow(self.clone(), n)),
        }
    }

    pub fn sin(&self) -> Expr {
        match self.as_const() {
            Some(c) => Expr::constant(c.sin()),
            None => Self::wrap(Node::Sin(self.clone())),
        }
    }

    pub fn cos(&self) -> Expr {
        match self.as_const() {
            Some(c) => Expr::constant(c.cos()),
            None => Self::wrap(Node::Cos(self.clone())),
        }
    }

    pub fn exp(&self) -> Expr {
        match self.as_const() {
            Some(c) => Expr::constant(c.exp()),
            None => Self::wrap(Node::Exp(self.clone())),
        }
    }

    pub fn sqrt(&self) -> Expr {
        match self.as_const() {
            Some(c) if c >= 0.0 => Expr::constant(c.sqrt()),
            _ => Self::wrap(Node::Sqrt(self.clone())),
        }
    }

    /// One plus the largest variable index, or 0 for a constant tree.
    pub fn arity(&self) -> usize {
        match self.node() {
            Node::Const(_) => 0,
            Node::Var(i) => i + 1,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.arity().max(b.arity())
            }
            Node::Neg(a)
            | Node::Pow(a, _)
            | Node::Sin(a)
            | Node::Cos(a)
            | Node::Exp(a)
            | Node::Sqrt(a) => a.arity(),
        }
    }

    /// Number of nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        1 + match self.node() {
            Node::Const(_) | Node::Var(_) => 0,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.size() + b.size()
            }
            Node::Neg(a)
            | Node::Pow(a, _)
            | Node::Sin(a)
            | Node::Cos(a)
            | Node::Exp(a)
            | Node::Sqrt(a) => a.size(),
        }
    }

    /// Point evaluation by tree walk. Use [`Tape`] in hot loops.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self.node() {
            Node::Const(c) => *c,
            Node::Var(i) => x[*i],
            Node::Add(a, b) => a.eval(x) + b.eval(x),
            Node::Sub(a, b) => a.eval(x) - b.eval(x),
            Node::Mul(a, b) => a.eval(x) * b.eval(x),
            Node::Div(a, b) => a.eval(x) / b.eval(x),
            Node::Neg(a) => -a.eval(x),
            Node::Pow(a, n) => a.eval(x).powi(*n as i32),
            Node::Sin(a) => a.eval(x).sin(),
            Node::Cos(a) => a.eval(x).cos(),
            Node::Exp(a) => a.eval(x).exp(),
            Node::Sqrt(a) => a.eval(x).sqrt(),
        }
    }

    /// Enclosure of the range of the expression over the box `x`.
    pub fn eval_interval(&self, x: &[Interval]) -> Result<Interval, DomainError> {
        let r = match self.node() {
            Node::Const(c) => Interval::point(*c),
            Node::Var(i) => x[*i],
            Node::Add(a, b) => a.eval_interval(x)? + b.eval_interval(x)?,
            Node::Sub(a, b) => a.eval_interval(x)? - b.eval_interval(x)?,
            Node::Mul(a, b) => {
                // Constant factors scale exactly; skip the general product.
                match (a.as_const(), b.as_const()) {
                    (Some(c), _) => scale(b.eval_interval(x)?, c),
                    (_, Some(c)) => scale(a.eval_interval(x)?, c),
                    _ => a.eval_interval(x)? * b.eval_interval(x)?,
                }
            }
            Node::Div(a, b) => a.eval_interval(x)?.div(b.eval_interval(x)?)?,
            Node::Neg(a) => -a.eval_interval(x)?,
            Node::Pow(a, n) => a.eval_interval(x)?.powi(*n),
            Node::Sin(a) => a.eval_interval(x)?.sin(),
            Node::Cos(a) => a.eval_interval(x)?.cos(),
            Node::Exp(a) => a.eval_interval(x)?.exp(),
            Node::Sqrt(a) => a.eval_interval(x)?.sqrt()?,
        };
        if r.lo.is_nan() || r.hi.is_nan() {
            return Err(DomainError::NonFinite);
        }
        Ok(r)
    }

    /// Interval evaluation over a [`Domain`].
    pub fn eval_domain(&self, domain: &Domain) -> Result<Interval, DomainError> {
        let boxes = domain_intervals(domain);
        self.eval_interval(&boxes)
    }

    /// Symbolic partial derivative with respect to variable `i` (zero-based).
    pub fn diff(&self, i: usize) -> Expr {
        match self.node() {
            Node::Const(_) => Expr::constant(0.0),
            Node::Var(j) => Expr::constant(if *j == i { 1.0 } else { 0.0 }),
            Node::Add(a, b) => a.diff(i) + b.diff(i),
            Node::Sub(a, b) => a.diff(i) - b.diff(i),
            Node::Mul(a, b) => a.diff(i) * b.clone() + a.clone() * b.diff(i),
            Node::Div(a, b) => {
                let da = a.diff(i);
                let db = b.diff(i);
                if db.is_const(0.0) {
                    da / b.clone()
                } else {
                    // (a/b)' = (a' - (a/b) b') / b keeps one power of b in the
                    // denominator, which interval evaluation handles far better
                    // than b^2 at higher orders
                    (da - self.clone() * db) / b.clone()
                }
            }
            Node::Neg(a) => -a.diff(i),
            Node::Pow(a, n) => Expr::constant(*n as f64) * a.powi(n - 1) * a.diff(i),
            Node::Sin(a) => a.cos() * a.diff(i),
            Node::Cos(a) => -(a.sin() * a.diff(i)),
            Node::Exp(a) => self.clone() * a.diff(i),
            Node::Sqrt(a) => a.diff(i) / (Expr::constant(2.0) * self.clone()),
        }
    }

    pub fn compile(&self) -> Tape {
        Tape::compile(self)
    }
}

pub(crate) fn domain_intervals(domain: &Domain) -> Vec<Interval> {
    domain
        .lower()
        .iter()
        .zip(domain.upper())
        .map(|(&lo, &hi)| Interval::new(lo, hi))
        .collect()
}

fn scale(v: Interval, c: f64) -> Interval {
    let a = v.lo * c;
    let b = v.hi * c;
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    // Exact when c is a power of two; widen anyway.
    Interval::new(lo, hi) + Interval::point(0.0)
}

impl From<f64> for Expr {
    fn from(c: f64) -> Self {
        Expr::constant(c)
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a + b),
            (Some(a), _) if a == 0.0 => rhs,
            (_, Some(b)) if b == 0.0 => self,
            _ => match rhs.node() {
                Node::Neg(inner) => self - inner.clone(),
                _ => Expr::wrap(Node::Add(self, rhs)),
            },
        }
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a - b),
            (Some(a), _) if a == 0.0 => -rhs,
            (_, Some(b)) if b == 0.0 => self,
            _ => match rhs.node() {
                Node::Neg(inner) => self + inner.clone(),
                _ => Expr::wrap(Node::Sub(self, rhs)),
            },
        }
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a * b),
            (Some(a), _) if a == 0.0 => Expr::constant(0.0),
            (_, Some(b)) if b == 0.0 => Expr::constant(0.0),
            (Some(a), _) if a == 1.0 => rhs,
            (_, Some(b)) if b == 1.0 => self,
            (Some(a), _) if a == -1.0 => -rhs,
            (_, Some(b)) if b == -1.0 => -self,
            // constants to the left
            (None, Some(_)) => rhs * self,
            (Some(a), None) => match rhs.node() {
                Node::Mul(l, r) if l.as_const().is_some() => {
                    Expr::constant(a * l.as_const().unwrap()) * r.clone()
                }
                Node::Neg(inner) => Expr::constant(-a) * inner.clone(),
                _ => Expr::wrap(Node::Mul(self, rhs)),
            },
            (None, None) => match (self.node(), rhs.node()) {
                (Node::Neg(a), Node::Neg(b)) => a.clone() * b.clone(),
                (Node::Neg(a), _) => -(a.clone() * rhs),
                (_, Node::Neg(b)) => -(self * b.clone()),
                (Node::Mul(l, r), _) if l.as_const().is_some() => {
                    l.clone() * (r.clone() * rhs)
                }
                (_, Node::Mul(l, r)) if l.as_const().is_some() => {
                    l.clone() * (self * r.clone())
                }
                _ => Expr::wrap(Node::Mul(self, rhs)),
            },
        }
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) if b != 0.0 => Expr::constant(a / b),
            (Some(a), _) if a == 0.0 => Expr::constant(0.0),
            (_, Some(b)) if b == 1.0 => self,
            (_, Some(b)) if b != 0.0 => Expr::constant(1.0 / b) * self,
            _ => Expr::wrap(Node::Div(self, rhs)),
        }
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self.node() {
            Node::Const(c) => Expr::constant(-c),
            Node::Neg(inner) => inner.clone(),
            Node::Mul(l, r) if l.as_const().is_some() => {
                Expr::constant(-l.as_const().unwrap()) * r.clone()
            }
            _ => Expr::wrap(Node::Neg(self)),
        }
    }
}

macro_rules! scalar_ops {
    ($($tr:ident $method:ident),*) => {$(
        impl ops::$tr<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                ops::$tr::$method(self, Expr::constant(rhs))
            }
        }
        impl ops::$tr<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                ops::$tr::$method(Expr::constant(self), rhs)
            }
        }
    )*};
}

scalar_ops!(Add add, Sub sub, Mul mul, Div div);

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write!(f, "{c}"),
            Node::Var(i) => write!(f, "x{}", i + 1),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "({a} * {b})"),
            Node::Div(a, b) => write!(f, "({a} / {b})"),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Pow(a, n) => write!(f, "({a}^{n})"),
            Node::Sin(a) => write!(f, "sin({a})"),
            Node::Cos(a) => write!(f, "cos({a})"),
            Node::Exp(a) => write!(f, "exp({a})"),
            Node::Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
