//! Possibility distributions and their α-cuts.
//!
//! A [`PossibilityDist`] is a piecewise-linear membership function given by
//! knots ordered in `x`. Memberships rise from 0 to a core at 1 and fall back
//! to 0. Vertical segments (repeated `x`) are allowed, which lets pure
//! intervals and clamped expert levels be represented exactly.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PossibilityError {
    #[error("alpha level {0} is outside [0, 1]")]
    AlphaDomain(f64),
    #[error("invalid possibility distribution: {0}")]
    Invalid(String),
    #[error("expert intervals are not nested: {0}")]
    NotNested(String),
    #[error("duplicate confidence level {0}")]
    DuplicateConfidence(f64),
}

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Builds `[lo, hi]`, rejecting reversed or NaN bounds.
    pub fn new(lo: f64, hi: f64) -> Result<Self, PossibilityError> {
        if lo <= hi {
            Ok(Self { lo, hi })
        } else {
            Err(PossibilityError::Invalid(format!("interval [{lo}, {hi}] has lo > hi")))
        }
    }

    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// True when `other` lies inside `self`.
    pub fn encloses(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Piecewise-linear, unimodal possibility distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct PossibilityDist {
    knots: Vec<(f64, f64)>,
}

impl PossibilityDist {
    /// Builds a distribution from raw `(x, membership)` knots.
    ///
    /// Knots must be ordered by `x`, start and end at membership 0, and
    /// rise to exactly 1 before falling.
    pub fn from_knots(knots: Vec<(f64, f64)>) -> Result<Self, PossibilityError> {
        let invalid = |msg: String| Err(PossibilityError::Invalid(msg));
        if knots.len() < 2 {
            return invalid("at least two knots are required".into());
        }
        for &(x, m) in &knots {
            if !x.is_finite() {
                return invalid(format!("knot position {x} is not finite"));
            }
            if !(0.0..=1.0).contains(&m) {
                return invalid(format!("membership {m} is outside [0, 1]"));
            }
        }
        if knots.windows(2).any(|w| w[1].0 < w[0].0) {
            return invalid("knots are not ordered by x".into());
        }
        if knots[0].1 != 0.0 || knots[knots.len() - 1].1 != 0.0 {
            return invalid("first and last knots must have membership 0".into());
        }
        let Some(peak) = knots.iter().position(|k| k.1 == 1.0) else {
            return invalid("maximum membership must equal 1".into());
        };
        if knots[..=peak].windows(2).any(|w| w[1].1 < w[0].1)
            || knots[peak..].windows(2).any(|w| w[1].1 > w[0].1)
        {
            return invalid("membership must rise to 1 then fall (unimodal)".into());
        }
        Ok(Self { knots })
    }

    pub fn triangular(a: f64, core: f64, b: f64) -> Result<Self, PossibilityError> {
        if !(a <= core && core <= b) {
            return Err(PossibilityError::Invalid(format!(
                "triangular requires a <= core <= b, got ({a}, {core}, {b})"
            )));
        }
        Self::from_knots(vec![(a, 0.0), (core, 1.0), (b, 0.0)])
    }

    pub fn trapezoidal(a: f64, core_lo: f64, core_hi: f64, b: f64) -> Result<Self, PossibilityError> {
        if !(a <= core_lo && core_lo <= core_hi && core_hi <= b) {
            return Err(PossibilityError::Invalid(format!(
                "trapezoidal requires a <= core_lo <= core_hi <= b, got ({a}, {core_lo}, {core_hi}, {b})"
            )));
        }
        Self::from_knots(vec![(a, 0.0), (core_lo, 1.0), (core_hi, 1.0), (b, 0.0)])
    }

    /// Builds a distribution from expert intervals with confidence levels.
    ///
    /// Confidence `c` is attached to the cut at `α = 1 - c`. Between given
    /// levels the branches are linear; beyond the extreme levels they are
    /// clamped, so the outermost interval becomes the support and the
    /// innermost one the core.
    pub fn from_nested_intervals(pairs: &[(Interval, f64)]) -> Result<Self, PossibilityError> {
        if pairs.is_empty() {
            return Err(PossibilityError::Invalid("no expert intervals given".into()));
        }
        let mut levels: Vec<(f64, Interval)> = Vec::with_capacity(pairs.len());
        for &(iv, c) in pairs {
            if !(0.0..=1.0).contains(&c) {
                return Err(PossibilityError::Invalid(format!("confidence {c} is outside [0, 1]")));
            }
            if !(iv.lo <= iv.hi) || !iv.lo.is_finite() || !iv.hi.is_finite() {
                return Err(PossibilityError::Invalid(format!("bad expert interval {iv}")));
            }
            levels.push((1.0 - c, iv));
        }
        levels.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = levels.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(PossibilityError::DuplicateConfidence(1.0 - w[0].0));
        }
        if let Some(w) = levels.windows(2).find(|w| !w[0].1.encloses(&w[1].1)) {
            return Err(PossibilityError::NotNested(format!(
                "{} (confidence {}) does not contain {} (confidence {})",
                w[0].1,
                1.0 - w[0].0,
                w[1].1,
                1.0 - w[1].0
            )));
        }

        let mut left: Vec<(f64, f64)> = Vec::with_capacity(levels.len() + 2);
        let (first_alpha, outer) = levels[0];
        if first_alpha > 0.0 {
            left.push((outer.lo, 0.0));
        }
        left.extend(levels.iter().map(|(a, iv)| (iv.lo, *a)));
        let (last_alpha, inner) = levels[levels.len() - 1];
        if last_alpha < 1.0 {
            left.push((inner.lo, 1.0));
        }

        let mut right: Vec<(f64, f64)> = Vec::with_capacity(levels.len() + 2);
        if last_alpha < 1.0 {
            right.push((inner.hi, 1.0));
        }
        right.extend(levels.iter().rev().map(|(a, iv)| (iv.hi, *a)));
        if first_alpha > 0.0 {
            right.push((outer.hi, 0.0));
        }

        // The core appears at the end of `left` and the start of `right`; keep
        // both so a non-degenerate core stays a plateau.
        let mut knots = left;
        knots.extend(right);
        knots.dedup();
        Self::from_knots(knots)
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Closure of the set where the membership is positive.
    pub fn support(&self) -> Interval {
        Interval {
            lo: self.knots[0].0,
            hi: self.knots[self.knots.len() - 1].0,
        }
    }

    /// Value of π at `x`; 0 outside the support.
    pub fn membership(&self, x: f64) -> f64 {
        let support = self.support();
        if !support.contains(x) {
            return 0.0;
        }
        let mut best = 0.0_f64;
        for w in self.knots.windows(2) {
            let ((x0, m0), (x1, m1)) = (w[0], w[1]);
            if x < x0 || x > x1 {
                continue;
            }
            let m = if x == x0 {
                m0.max(if x1 == x0 { m1 } else { m0 })
            } else if x == x1 {
                m1
            } else {
                m0 + (x - x0) / (x1 - x0) * (m1 - m0)
            };
            best = best.max(m);
        }
        best
    }

    /// The α-cut `{x : π(x) ≥ α}`, with the support returned at α = 0.
    pub fn alpha_cut(&self, alpha: f64) -> Result<Interval, PossibilityError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(PossibilityError::AlphaDomain(alpha));
        }
        let k = &self.knots;
        // Memberships start at 0 and reach 1, so both scans always hit.
        let i = k.iter().position(|p| p.1 >= alpha).unwrap_or(0);
        let lo = if i == 0 || k[i].1 == alpha {
            k[i].0
        } else {
            interpolate(k[i - 1], k[i], alpha)
        };
        let j = k.iter().rposition(|p| p.1 >= alpha).unwrap_or(k.len() - 1);
        let hi = if j == k.len() - 1 || k[j].1 == alpha {
            k[j].0
        } else {
            interpolate(k[j + 1], k[j], alpha)
        };
        Ok(Interval { lo, hi })
    }
}

/// Position on the segment from `below` (membership < α) to `above`
/// (membership ≥ α) where the membership equals α.
fn interpolate(below: (f64, f64), above: (f64, f64), alpha: f64) -> f64 {
    let t = (alpha - below.1) / (above.1 - below.1);
    below.0 + t * (above.0 - below.0)
}
