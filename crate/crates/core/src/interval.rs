//! Closed real intervals with outward-inflated arithmetic.
//!
//! Instead of switching hardware rounding modes, every elementary operation
//! widens its result by a relative `2^-40` plus an absolute `1e-30`. That is
//! far larger than the few ulps of error an IEEE operation can introduce, so
//! the enclosure stays sound for the magnitudes this crate works with.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Relative widening applied per elementary operation.
pub const REL_INFLATION: f64 = 1.0 / (1u64 << 40) as f64;
/// Absolute widening applied per elementary operation.
pub const ABS_INFLATION: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("division by an interval containing zero: [{0}, {1}]")]
    DivisionByZero(f64, f64),
    #[error("square root of an interval reaching below zero: [{0}, {1}]")]
    NegativeSqrt(f64, f64),
    #[error("non-finite interval bound")]
    NonFinite,
}

#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

fn down(x: f64, scale: f64) -> f64 {
    x - x.abs() * REL_INFLATION * scale - ABS_INFLATION
}

fn up(x: f64, scale: f64) -> f64 {
    x + x.abs() * REL_INFLATION * scale + ABS_INFLATION
}

impl Interval {
    /// Panics if `lo > hi` or either bound is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "invalid interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// `max(|lo|, |hi|)`.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    fn inflated(lo: f64, hi: f64, scale: f64) -> Self {
        Self {
            lo: down(lo, scale),
            hi: up(hi, scale),
        }
    }

    pub fn div(self, rhs: Interval) -> Result<Interval, DomainError> {
        if rhs.lo <= 0.0 && rhs.hi >= 0.0 {
            return Err(DomainError::DivisionByZero(rhs.lo, rhs.hi));
        }
        let c = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        Ok(hull(c))
    }

    pub fn powi(self, n: u32) -> Interval {
        match n {
            0 => Interval::point(1.0),
            1 => self,
            _ => {
                let a = self.lo.powi(n as i32);
                let b = self.hi.powi(n as i32);
                let scale = n as f64;
                if n % 2 == 1 || self.lo >= 0.0 {
                    Self::inflated(a, b, scale)
                } else if self.hi <= 0.0 {
                    Self::inflated(b, a, scale)
                } else {
                    Interval {
                        lo: 0.0,
                        hi: up(a.max(b), scale),
                    }
                }
            }
        }
    }

    pub fn exp(self) -> Interval {
        let lo = down(self.lo.exp(), 4.0).max(0.0);
        Interval {
            lo,
            hi: up(self.hi.exp(), 4.0),
        }
    }

    pub fn sqrt(self) -> Result<Interval, DomainError> {
        // Values below zero by no more than the accumulated absolute widening
        // are treated as zero.
        if self.lo < -1e3 * ABS_INFLATION {
            return Err(DomainError::NegativeSqrt(self.lo, self.hi));
        }
        let lo = down(self.lo.max(0.0).sqrt(), 4.0).max(0.0);
        Ok(Interval {
            lo,
            hi: up(self.hi.sqrt(), 4.0),
        })
    }

    pub fn sin(self) -> Interval {
        // sin(x) = cos(x - pi/2)
        self.periodic(FRAC_PI_2, f64::sin)
    }

    pub fn cos(self) -> Interval {
        self.periodic(0.0, f64::cos)
    }

    /// Range of a unit-amplitude sinusoid whose maxima sit at
    /// `phase + 2 k pi` and minima at `phase + pi + 2 k pi`.
    fn periodic(self, phase: f64, f: fn(f64) -> f64) -> Interval {
        if !self.is_finite() || self.width() >= TAU {
            return Interval::new(-1.0, 1.0);
        }
        // Widen the critical-point search slightly; a false positive only
        // loosens the enclosure.
        let slack = 1e-9 * (1.0 + self.mag());
        let lo = self.lo - slack;
        let hi = self.hi + slack;
        let has_crit = |offset: f64| {
            let k = ((lo - offset) / TAU).ceil();
            offset + k * TAU <= hi
        };
        let (a, b) = (f(self.lo), f(self.hi));
        let mut rlo = a.min(b);
        let mut rhi = a.max(b);
        if has_crit(phase) {
            rhi = 1.0;
        }
        if has_crit(phase + PI) {
            rlo = -1.0;
        }
        // libm sin/cos are accurate to about 1 ulp; scale the widening with the
        // argument magnitude to cover range reduction error as well.
        let scale = 4.0 + self.mag();
        Interval {
            lo: down(rlo, scale).max(-1.0),
            hi: up(rhi, scale).min(1.0),
        }
    }
}

fn hull(c: [f64; 4]) -> Interval {
    let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Interval::inflated(lo, hi, 1.0)
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval::inflated(self.lo + rhs.lo, self.hi + rhs.hi, 1.0)
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval::inflated(self.lo - rhs.hi, self.hi - rhs.lo, 1.0)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        hull([
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ])
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
