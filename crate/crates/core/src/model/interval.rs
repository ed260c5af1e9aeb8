//! Natural interval extensions of the model operators.
//!
//! Endpoints are evaluated with the same floating-point operations as the
//! point evaluator, so a degenerate input gives back the point value exactly.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::EvalError;
use crate::possibility::Interval;

fn hull(values: &[f64]) -> Result<Interval, EvalError> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(EvalError::NonFinite);
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Interval { lo, hi })
}

pub(super) fn add(a: Interval, b: Interval) -> Interval {
    Interval { lo: a.lo + b.lo, hi: a.hi + b.hi }
}

pub(super) fn sub(a: Interval, b: Interval) -> Interval {
    Interval { lo: a.lo - b.hi, hi: a.hi - b.lo }
}

pub(super) fn neg(a: Interval) -> Interval {
    Interval { lo: -a.hi, hi: -a.lo }
}

pub(super) fn mul(a: Interval, b: Interval) -> Result<Interval, EvalError> {
    hull(&[a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi])
}

pub(super) fn div(a: Interval, b: Interval) -> Result<Interval, EvalError> {
    if b.contains(0.0) {
        return Err(EvalError::DivisionByZero);
    }
    hull(&[a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi])
}

pub(super) fn powi(a: Interval, n: i32) -> Result<Interval, EvalError> {
    if n == 0 {
        return Ok(Interval::point(1.0));
    }
    if n < 0 && a.contains(0.0) {
        return Err(EvalError::DivisionByZero);
    }
    let (l, h) = (a.lo.powi(n), a.hi.powi(n));
    if n % 2 != 0 {
        // odd powers are monotone on each side of zero
        return hull(&[l, h]);
    }
    if a.lo >= 0.0 || a.hi <= 0.0 {
        hull(&[l, h])
    } else {
        // even positive power over an interval straddling zero
        Ok(Interval { lo: 0.0, hi: l.max(h) })
    }
}

pub(super) fn exp(a: Interval) -> Interval {
    Interval { lo: a.lo.exp(), hi: a.hi.exp() }
}

pub(super) fn ln(a: Interval) -> Result<Interval, EvalError> {
    if a.lo <= 0.0 {
        return Err(EvalError::Domain(format!("ln over {a} touches values <= 0")));
    }
    Ok(Interval { lo: a.lo.ln(), hi: a.hi.ln() })
}

pub(super) fn sqrt(a: Interval) -> Result<Interval, EvalError> {
    if a.lo < 0.0 {
        return Err(EvalError::Domain(format!("sqrt over {a} reaches negative values")));
    }
    Ok(Interval { lo: a.lo.sqrt(), hi: a.hi.sqrt() })
}

pub(super) fn abs(a: Interval) -> Interval {
    if a.lo >= 0.0 {
        a
    } else if a.hi <= 0.0 {
        neg(a)
    } else {
        Interval { lo: 0.0, hi: (-a.lo).max(a.hi) }
    }
}

pub(super) fn min(a: Interval, b: Interval) -> Interval {
    Interval { lo: a.lo.min(b.lo), hi: a.hi.min(b.hi) }
}

pub(super) fn max(a: Interval, b: Interval) -> Interval {
    Interval { lo: a.lo.max(b.lo), hi: a.hi.max(b.hi) }
}

/// True when some `offset + 2kπ` lies in `a`.
fn hits_phase(a: Interval, offset: f64) -> bool {
    let k = ((a.lo - offset) / TAU).ceil();
    offset + k * TAU <= a.hi
}

pub(super) fn sin(a: Interval) -> Result<Interval, EvalError> {
    if !a.lo.is_finite() || !a.hi.is_finite() {
        return Err(EvalError::NonFinite);
    }
    if a.width() >= TAU {
        return Ok(Interval { lo: -1.0, hi: 1.0 });
    }
    let mut r = hull(&[a.lo.sin(), a.hi.sin()])?;
    if hits_phase(a, FRAC_PI_2) {
        r.hi = 1.0;
    }
    if hits_phase(a, -FRAC_PI_2) {
        r.lo = -1.0;
    }
    Ok(r)
}

pub(super) fn cos(a: Interval) -> Result<Interval, EvalError> {
    if !a.lo.is_finite() || !a.hi.is_finite() {
        return Err(EvalError::NonFinite);
    }
    if a.width() >= TAU {
        return Ok(Interval { lo: -1.0, hi: 1.0 });
    }
    let mut r = hull(&[a.lo.cos(), a.hi.cos()])?;
    if hits_phase(a, 0.0) {
        r.hi = 1.0;
    }
    if hits_phase(a, PI) {
        r.lo = -1.0;
    }
    Ok(r)
}
