//! Axis-aligned cubes and boxes.
//!
//! A [`Cube`] is stored as a center plus a half-edge vector; a [`Domain`] is
//! the same region written as lower/upper corners. Every cube produced by
//! [`Cube::bisect_longest`] carries a [`PathId`] recording its bisection
//! history, which gives it a stable identity and a total order used by the
//! search driver for deterministic reductions.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// Maximum bisection depth a [`PathId`] can record.
pub const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("dimension must be at least 1")]
    EmptyDimension,
    #[error("mismatched lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("coordinate {index}: lower {lower} exceeds upper {upper}")]
    Inverted { index: usize, lower: f64, upper: f64 },
    #[error("coordinate {index}: non-finite or non-positive extent")]
    Degenerate { index: usize },
}

/// Closed box `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, GeometryError> {
        if lower.is_empty() {
            return Err(GeometryError::EmptyDimension);
        }
        if lower.len() != upper.len() {
            return Err(GeometryError::LengthMismatch(lower.len(), upper.len()));
        }
        for (index, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(GeometryError::Degenerate { index });
            }
            if lo > hi {
                return Err(GeometryError::Inverted {
                    index,
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok(Self { lower, upper })
    }

    /// `[-a, a]^dim`.
    pub fn symmetric(dim: usize, a: f64) -> Result<Self, GeometryError> {
        Self::new(vec![-a; dim], vec![a; dim])
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self, GeometryError> {
        let (lower, upper) = pairs.iter().copied().unzip();
        Self::new(lower, upper)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| 0.5 * (lo + hi))
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&xi, (&lo, &hi))| lo <= xi && xi <= hi)
    }

    /// Clamp `x` into the box, coordinate-wise.
    pub fn project(&self, x: &mut [f64]) {
        for ((xi, &lo), &hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *xi = xi.clamp(lo, hi);
        }
    }

    pub fn diameter(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.width(i).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Bisection history of a cube: bit `k` is 0 if the `k`-th split took the
/// lower half and 1 for the upper half. The root has length 0.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PathId {
    words: [u64; MAX_DEPTH / 64],
    len: u16,
}

impl PathId {
    pub const ROOT: PathId = PathId {
        words: [0; MAX_DEPTH / 64],
        len: 0,
    };

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_root(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, k: usize) -> bool {
        assert!(k < self.len(), "bit {k} out of range");
        self.words[k / 64] >> (63 - k % 64) & 1 == 1
    }

    /// Returns the path extended by one step, or `None` past [`MAX_DEPTH`].
    pub fn child(&self, upper: bool) -> Option<PathId> {
        let k = self.len();
        if k >= MAX_DEPTH {
            return None;
        }
        let mut next = *self;
        if upper {
            next.words[k / 64] |= 1 << (63 - k % 64);
        }
        next.len += 1;
        Some(next)
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |k| self.bit(k))
    }
}

impl Default for PathId {
    fn default() -> Self {
        Self::ROOT
    }
}

// Lexicographic on the bit string; a proper prefix sorts first.
impl Ord for PathId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.words
            .cmp(&other.words)
            .then_with(|| self.len.cmp(&other.len))
    }
}

impl PartialOrd for PathId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for PathId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PathId(")?;
        if self.is_root() {
            write!(f, "root")?;
        }
        for b in self.bits() {
            write!(f, "{}", b as u8)?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for PathId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_root() {
            return write!(f, "-");
        }
        for b in self.bits() {
            write!(f, "{}", b as u8)?;
        }
        Ok(())
    }
}

/// Axis-aligned cube `{x : |x_i - center_i| <= half_edge_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cube {
    center: Vec<f64>,
    half_edge: Vec<f64>,
    path: PathId,
}

impl Cube {
    pub fn new(center: Vec<f64>, half_edge: Vec<f64>) -> Result<Self, GeometryError> {
        if center.is_empty() {
            return Err(GeometryError::EmptyDimension);
        }
        if center.len() != half_edge.len() {
            return Err(GeometryError::LengthMismatch(center.len(), half_edge.len()));
        }
        for (index, (&c, &h)) in center.iter().zip(&half_edge).enumerate() {
            if !c.is_finite() || !h.is_finite() || h <= 0.0 {
                return Err(GeometryError::Degenerate { index });
            }
        }
        Ok(Self {
            center,
            half_edge,
            path: PathId::ROOT,
        })
    }

    /// The cube spanning a non-degenerate domain.
    pub fn from_domain(domain: &Domain) -> Result<Self, GeometryError> {
        let half_edge = (0..domain.dim()).map(|i| 0.5 * domain.width(i)).collect();
        Self::new(domain.center(), half_edge)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn half_edge(&self) -> &[f64] {
        &self.half_edge
    }

    pub fn path(&self) -> PathId {
        self.path
    }

    pub fn depth(&self) -> usize {
        self.path.len()
    }

    /// Euclidean norm of the half-edge vector.
    pub fn radius(&self) -> f64 {
        self.half_edge.iter().map(|h| h * h).sum::<f64>().sqrt()
    }

    pub fn lower(&self, i: usize) -> f64 {
        self.center[i] - self.half_edge[i]
    }

    pub fn upper(&self, i: usize) -> f64 {
        self.center[i] + self.half_edge[i]
    }

    pub fn to_domain(&self) -> Domain {
        let lower = (0..self.dim()).map(|i| self.lower(i)).collect();
        let upper = (0..self.dim()).map(|i| self.upper(i)).collect();
        Domain { lower, upper }
    }

    /// Index of the longest edge, lowest index on ties.
    pub fn longest_edge(&self) -> usize {
        let mut best = 0;
        for (i, &h) in self.half_edge.iter().enumerate().skip(1) {
            if h > self.half_edge[best] {
                best = i;
            }
        }
        best
    }

    /// Split along the longest edge into `(lower half, upper half)`.
    ///
    /// Panics if the cube is already at [`MAX_DEPTH`].
    pub fn bisect_longest(&self) -> (Cube, Cube) {
        let k = self.longest_edge();
        let h = 0.5 * self.half_edge[k];
        let mut half_edge = self.half_edge.clone();
        half_edge[k] = h;

        let mut lo_center = self.center.clone();
        lo_center[k] -= h;
        let mut hi_center = self.center.clone();
        hi_center[k] += h;

        let depth_exceeded = "cube bisected beyond MAX_DEPTH";
        let lo = Cube {
            center: lo_center,
            half_edge: half_edge.clone(),
            path: self.path.child(false).expect(depth_exceeded),
        };
        let hi = Cube {
            center: hi_center,
            half_edge,
            path: self.path.child(true).expect(depth_exceeded),
        };
        (lo, hi)
    }

    /// Closed containment with a relative slack of `rel_tol * half_edge`.
    pub fn contains(&self, x: &[f64], rel_tol: f64) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.center.iter().zip(&self.half_edge))
                .all(|(&xi, (&c, &h))| (xi - c).abs() <= h * (1.0 + rel_tol))
    }

    /// Whether the closed ball of radius `2 r` around the center lies in `domain`.
    pub fn ball2r_inside(&self, domain: &Domain) -> bool {
        let reach = 2.0 * self.radius();
        self.center
            .iter()
            .zip(domain.lower().iter().zip(domain.upper()))
            .all(|(&c, (&lo, &hi))| c - reach >= lo && c + reach <= hi)
    }
}
