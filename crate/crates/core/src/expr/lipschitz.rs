//! Certified Lipschitz constants from interval enclosures of derivatives.
//!
//! For order `s` the bound is the square root of the sum, over all order-`s`
//! partial derivatives, of the squared magnitude of each derivative's interval
//! enclosure on the domain. That is an upper bound of `sup ||grad f||_2`
//! (s=1), `sup ||H||_F` (s=2) or the Frobenius norm of the third-derivative
//! tensor (s=3); the last two dominate the operator norms the bounding rules
//! need. Symmetric entries are evaluated once and weighted by their
//! multiplicity.

use thiserror::Error;

use super::{domain_intervals, Expr, Tape};
use crate::geometry::Domain;
use crate::interval::DomainError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("derivative order must be 1, 2 or 3, got {0}")]
    InvalidOrder(u8),
    #[error("expression uses {arity} variables but the domain has {dim}")]
    Dimension { arity: usize, dim: usize },
}

/// Symbolic derivatives of an expression up to a fixed order, keeping only
/// the unique entries of the symmetric Hessian and third-derivative tensor.
#[derive(Debug, Clone)]
pub struct Derivatives {
    dim: usize,
    f: Expr,
    gradient: Vec<Expr>,
    /// `(i, j, d2f/dxi dxj)` for `i <= j`
    hessian: Vec<(usize, usize, Expr)>,
    /// `(i, j, k, d3f)` for `i <= j <= k`
    third: Vec<(usize, usize, usize, Expr)>,
}

impl Derivatives {
    pub fn new(f: &Expr, dim: usize, order: u8) -> Result<Self, BoundError> {
        if order > 3 {
            return Err(BoundError::InvalidOrder(order));
        }
        if f.arity() > dim {
            return Err(BoundError::Dimension {
                arity: f.arity(),
                dim,
            });
        }
        let mut d = Derivatives {
            dim,
            f: f.clone(),
            gradient: Vec::new(),
            hessian: Vec::new(),
            third: Vec::new(),
        };
        if order >= 1 {
            d.gradient = (0..dim).map(|i| f.diff(i)).collect();
        }
        if order >= 2 {
            for i in 0..dim {
                for j in i..dim {
                    d.hessian.push((i, j, d.gradient[i].diff(j)));
                }
            }
        }
        if order >= 3 {
            for (i, j, h) in &d.hessian {
                for k in *j..dim {
                    d.third.push((*i, *j, k, h.diff(k)));
                }
            }
        }
        Ok(d)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn objective(&self) -> &Expr {
        &self.f
    }

    pub fn gradient(&self) -> &[Expr] {
        &self.gradient
    }

    /// Unique Hessian entries as `(i, j, expr)` with `i <= j`.
    pub fn hessian_entries(&self) -> &[(usize, usize, Expr)] {
        &self.hessian
    }

    pub fn third_entries(&self) -> &[(usize, usize, usize, Expr)] {
        &self.third
    }

    /// Weighted list of the unique entries of a given order.
    fn entries(&self, order: u8) -> Vec<(f64, &Expr)> {
        match order {
            1 => self.gradient.iter().map(|e| (1.0, e)).collect(),
            2 => self
                .hessian
                .iter()
                .map(|(i, j, e)| (if i == j { 1.0 } else { 2.0 }, e))
                .collect(),
            _ => self
                .third
                .iter()
                .map(|(i, j, k, e)| (permutations(*i, *j, *k), e))
                .collect(),
        }
    }

    /// Interval bound of the order-`s` derivative norm over `domain`.
    pub fn bound(&self, domain: &Domain, order: u8) -> Result<f64, BoundError> {
        self.check_order(order)?;
        if domain.dim() != self.dim {
            return Err(BoundError::Dimension {
                arity: self.dim,
                dim: domain.dim(),
            });
        }
        let boxes = domain_intervals(domain);
        let mut sum = 0.0;
        for (weight, e) in self.entries(order) {
            let r = e.eval_interval(&boxes)?;
            if !r.is_finite() {
                return Err(DomainError::NonFinite.into());
            }
            sum += weight * r.mag() * r.mag();
        }
        // round the final sum and root upward
        Ok(sum.sqrt() * (1.0 + 1e-12))
    }

    /// Point value of the order-`s` derivative norm, for sampling checks.
    pub fn norm_at(&self, order: u8, x: &[f64]) -> Result<f64, BoundError> {
        self.check_order(order)?;
        let sum: f64 = self
            .entries(order)
            .iter()
            .map(|(w, e)| w * e.eval(x).powi(2))
            .sum();
        Ok(sum.sqrt())
    }

    /// Multiplicity of each unique order-`s` entry, aligned with [`Self::tape`].
    pub fn weights(&self, order: u8) -> Vec<f64> {
        self.entries(order).iter().map(|(w, _)| *w).collect()
    }

    /// Compiled tape of the order-`s` unique entries, in entry order.
    pub fn tape(&self, order: u8) -> Tape {
        match order {
            0 => Tape::compile(&self.f),
            1 => Tape::compile_many(&self.gradient),
            2 => Tape::compile_many(
                &self.hessian.iter().map(|(_, _, e)| e.clone()).collect::<Vec<_>>(),
            ),
            _ => Tape::compile_many(
                &self
                    .third
                    .iter()
                    .map(|(_, _, _, e)| e.clone())
                    .collect::<Vec<_>>(),
            ),
        }
    }

    fn check_order(&self, order: u8) -> Result<(), BoundError> {
        let available = match order {
            1 => !self.gradient.is_empty(),
            2 => !self.hessian.is_empty(),
            3 => !self.third.is_empty(),
            _ => return Err(BoundError::InvalidOrder(order)),
        };
        if available {
            Ok(())
        } else {
            Err(BoundError::InvalidOrder(order))
        }
    }
}

fn permutations(i: usize, j: usize, k: usize) -> f64 {
    if i == j && j == k {
        1.0
    } else if i == j || j == k || i == k {
        3.0
    } else {
        6.0
    }
}

/// Lipschitz constant `L_order` of `e` valid on all of `domain`.
pub fn lipschitz_bound(e: &Expr, domain: &Domain, order: u8) -> Result<f64, BoundError> {
    if !(1..=3).contains(&order) {
        return Err(BoundError::InvalidOrder(order));
    }
    Derivatives::new(e, domain.dim(), order)?.bound(domain, order)
}
