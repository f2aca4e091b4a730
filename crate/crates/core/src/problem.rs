//! Problem description and the per-cube rule outcome.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::geometry::Domain;
use crate::linalg::Matrix;

pub type ObjectiveFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type HessianFn = Arc<dyn Fn(&[f64]) -> Matrix + Send + Sync>;

/// Lipschitz constants of `f`, its gradient and its Hessian over the domain.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LipschitzConstants {
    pub l1: Option<f64>,
    pub l2: Option<f64>,
    pub l3: Option<f64>,
}

/// Which Lipschitz constant a rule needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    L1,
    L2,
    L3,
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constant::L1 => "L1",
            Constant::L2 => "L2",
            Constant::L3 => "L3",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oracle {
    Gradient,
    Hessian,
}

impl fmt::Display for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Oracle::Gradient => "gradient",
            Oracle::Hessian => "hessian",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuleError {
    #[error("missing Lipschitz constant {0}")]
    MissingConstant(Constant),
    #[error("missing {0} oracle")]
    MissingOracle(Oracle),
    #[error("rule requires a problem flagged as unconstrained")]
    ConstraintViolation,
    #[error("objective returned a non-finite value at {0:?}")]
    NonFinite(Vec<f64>),
}

/// Known global minimum, with a note on where the number came from.
#[derive(Debug, Clone, PartialEq)]
pub struct KnownMinimum {
    pub value: f64,
    pub location: Option<Vec<f64>>,
    pub source: String,
}

/// Objective over a box domain with optional oracles and constants.
#[derive(Clone)]
pub struct Problem {
    name: String,
    domain: Domain,
    objective: ObjectiveFn,
    gradient: Option<GradientFn>,
    hessian: Option<HessianFn>,
    constants: LipschitzConstants,
    unconstrained: bool,
    known_minimum: Option<KnownMinimum>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("gradient", &self.gradient.is_some())
            .field("hessian", &self.hessian.is_some())
            .field("constants", &self.constants)
            .field("unconstrained", &self.unconstrained)
            .field("known_minimum", &self.known_minimum)
            .finish()
    }
}

impl Problem {
    pub fn new<F>(name: impl Into<String>, domain: Domain, objective: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            domain,
            objective: Arc::new(objective),
            gradient: None,
            hessian: None,
            constants: LipschitzConstants::default(),
            unconstrained: false,
            known_minimum: None,
        }
    }

    pub fn with_gradient<G>(mut self, g: G) -> Self
    where
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.gradient = Some(Arc::new(g));
        self
    }

    pub fn with_hessian<H>(mut self, h: H) -> Self
    where
        H: Fn(&[f64]) -> Matrix + Send + Sync + 'static,
    {
        self.hessian = Some(Arc::new(h));
        self
    }

    pub fn with_l1(mut self, l1: f64) -> Self {
        self.constants.l1 = Some(l1);
        self
    }

    pub fn with_l2(mut self, l2: f64) -> Self {
        self.constants.l2 = Some(l2);
        self
    }

    pub fn with_l3(mut self, l3: f64) -> Self {
        self.constants.l3 = Some(l3);
        self
    }

    pub fn with_constants(mut self, c: LipschitzConstants) -> Self {
        self.constants = c;
        self
    }

    /// Caller asserts that the minimum over the box equals the infimum over
    /// an open neighbourhood of it.
    pub fn with_unconstrained(mut self, flag: bool) -> Self {
        self.unconstrained = flag;
        self
    }

    pub fn with_known_minimum(mut self, m: KnownMinimum) -> Self {
        self.known_minimum = Some(m);
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn constants(&self) -> LipschitzConstants {
        self.constants
    }

    pub fn is_unconstrained(&self) -> bool {
        self.unconstrained
    }

    pub fn known_minimum(&self) -> Option<&KnownMinimum> {
        self.known_minimum.as_ref()
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn has_hessian(&self) -> bool {
        self.hessian.is_some()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.objective)(x)
    }

    /// `f(x)`, rejecting NaN and infinities.
    pub fn eval_checked(&self, x: &[f64]) -> Result<f64, RuleError> {
        let v = self.eval(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(RuleError::NonFinite(x.to_vec()))
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, RuleError> {
        let g = self
            .gradient
            .as_ref()
            .ok_or(RuleError::MissingOracle(Oracle::Gradient))?;
        let v = g(x);
        if v.iter().all(|c| c.is_finite()) {
            Ok(v)
        } else {
            Err(RuleError::NonFinite(x.to_vec()))
        }
    }

    pub fn hessian(&self, x: &[f64]) -> Result<Matrix, RuleError> {
        let h = self
            .hessian
            .as_ref()
            .ok_or(RuleError::MissingOracle(Oracle::Hessian))?;
        let m = h(x);
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                if !m[(i, j)].is_finite() {
                    return Err(RuleError::NonFinite(x.to_vec()));
                }
            }
        }
        Ok(m)
    }

    pub fn require(&self, c: Constant) -> Result<f64, RuleError> {
        match c {
            Constant::L1 => self.constants.l1,
            Constant::L2 => self.constants.l2,
            Constant::L3 => self.constants.l3,
        }
        .ok_or(RuleError::MissingConstant(c))
    }
}

/// Oracle and solver work spent on one or more cubes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Work {
    pub f_evals: u64,
    pub g_evals: u64,
    pub h_evals: u64,
    pub newton_iterations: u64,
    pub convex_iterations: u64,
}

impl std::ops::AddAssign for Work {
    fn add_assign(&mut self, o: Work) {
        self.f_evals += o.f_evals;
        self.g_evals += o.g_evals;
        self.h_evals += o.h_evals;
        self.newton_iterations += o.newton_iterations;
        self.convex_iterations += o.convex_iterations;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundStatus {
    /// Finite quasi-lower bound.
    Bounded,
    /// Certified to hold no global minimizer; `qlb = +inf`.
    Eliminated,
    /// No useful bound; `qlb = -inf`.
    Unbounded,
}

/// Details of a third-order bound computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThirdOrderInfo {
    pub lambda_min: f64,
    pub lambda_bar: f64,
    pub eps_newton: f64,
    pub iterations: u32,
}

/// Result of applying a bounding rule to one cube.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleOutcome {
    pub qlb: f64,
    pub sample: Vec<f64>,
    /// `f(sample)`, used for the upper bound.
    pub value: f64,
    pub status: BoundStatus,
    pub work: Work,
    /// Convergence order of the rule that produced the bound.
    pub order: u8,
    pub third: Option<ThirdOrderInfo>,
}

impl RuleOutcome {
    pub fn bounded(qlb: f64, sample: Vec<f64>, value: f64, order: u8, work: Work) -> Self {
        Self {
            qlb,
            sample,
            value,
            status: BoundStatus::Bounded,
            work,
            order,
            third: None,
        }
    }

    pub fn unbounded(sample: Vec<f64>, value: f64, order: u8, work: Work) -> Self {
        Self {
            qlb: f64::NEG_INFINITY,
            sample,
            value,
            status: BoundStatus::Unbounded,
            work,
            order,
            third: None,
        }
    }

    pub fn eliminated(sample: Vec<f64>, value: f64, order: u8, work: Work) -> Self {
        Self {
            qlb: f64::INFINITY,
            sample,
            value,
            status: BoundStatus::Eliminated,
            work,
            order,
            third: None,
        }
    }

    /// `f(sample) - qlb`.
    pub fn gap(&self) -> f64 {
        self.value - self.qlb
    }
}
