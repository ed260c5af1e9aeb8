//! Order-statistics sample sizing (Wilks).
//!
//! With `n` i.i.d. draws, the `m`-th largest exceeds the `γ`-quantile unless
//! fewer than `m` draws land above it, so its coverage confidence is a
//! binomial tail with success probability `1 - γ`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrderStatsError {
    #[error("quantile level {0} must lie in (0, 1)")]
    QuantileLevel(f64),
    #[error("confidence {0} must lie in (0, 1)")]
    Confidence(f64),
    #[error("rank {rank} is outside 1..={n}")]
    Rank { rank: usize, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Sample maximum bounds the quantile from above.
    Upper,
    /// Sample minimum bounds the quantile from below.
    Lower,
    /// `[min, max]` covers at least a `γ` fraction of the population.
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilksQuery {
    gamma_s: f64,
    gamma_a: f64,
    side: Side,
}

impl WilksQuery {
    pub fn new(gamma_s: f64, gamma_a: f64, side: Side) -> Result<Self, OrderStatsError> {
        if !(gamma_s > 0.0 && gamma_s < 1.0) {
            return Err(OrderStatsError::QuantileLevel(gamma_s));
        }
        if !(gamma_a > 0.0 && gamma_a < 1.0) {
            return Err(OrderStatsError::Confidence(gamma_a));
        }
        Ok(Self { gamma_s, gamma_a, side })
    }

    pub fn gamma_s(&self) -> f64 {
        self.gamma_s
    }

    pub fn gamma_a(&self) -> f64 {
        self.gamma_a
    }

    pub fn side(&self) -> Side {
        self.side
    }
}

/// Confidence reached by the extreme order statistic(s) with `n` draws.
pub fn extreme_confidence(n: usize, gamma_s: f64, side: Side) -> f64 {
    let n_f = n as f64;
    match side {
        Side::Upper => 1.0 - gamma_s.powf(n_f),
        Side::Lower => 1.0 - (1.0 - gamma_s).powf(n_f),
        Side::TwoSided if n < 2 => 0.0,
        Side::TwoSided => {
            1.0 - gamma_s.powf(n_f) - n_f * (1.0 - gamma_s) * gamma_s.powf(n_f - 1.0)
        }
    }
}

/// Smallest sample size meeting the query with the sample extreme(s) as bound.
pub fn wilks_min_size(q: &WilksQuery) -> usize {
    let closed_form = |level: f64| ((1.0 - q.gamma_a).ln() / level.ln()).ceil().max(1.0) as usize;
    let mut n = match q.side {
        Side::Upper => closed_form(q.gamma_s),
        Side::Lower => closed_form(1.0 - q.gamma_s),
        Side::TwoSided => 2,
    };
    // Settle rounding in the closed form and walk the two-sided case.
    while n > 1 && extreme_confidence(n - 1, q.gamma_s, q.side) >= q.gamma_a {
        n -= 1;
    }
    while extreme_confidence(n, q.gamma_s, q.side) < q.gamma_a {
        n += 1;
    }
    n
}

fn ln_choose(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Log of `P(Bin(n, 1-γ) = k)`.
fn ln_pmf(n: usize, k: usize, gamma_s: f64) -> f64 {
    ln_choose(n, k) + k as f64 * (1.0 - gamma_s).ln() + (n - k) as f64 * gamma_s.ln()
}

/// Confidence that the `rank_from_top`-th largest of `n` draws is at least
/// the `gamma_s`-quantile.
pub fn wilks_confidence(n: usize, rank_from_top: usize, gamma_s: f64) -> Result<f64, OrderStatsError> {
    if rank_from_top == 0 || rank_from_top > n {
        return Err(OrderStatsError::Rank { rank: rank_from_top, n });
    }
    if !(gamma_s > 0.0 && gamma_s < 1.0) {
        return Err(OrderStatsError::QuantileLevel(gamma_s));
    }
    let terms: Vec<f64> = (0..rank_from_top).map(|k| ln_pmf(n, k, gamma_s)).collect();
    let peak = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let below = peak.exp() * terms.iter().map(|t| (t - peak).exp()).sum::<f64>();
    Ok((1.0 - below).clamp(0.0, 1.0))
}

/// Deepest rank from the top whose confidence still reaches `gamma_a`.
pub fn wilks_best_rank(n: usize, gamma_s: f64, gamma_a: f64) -> Option<usize> {
    if n == 0 || !(gamma_s > 0.0 && gamma_s < 1.0) {
        return None;
    }
    // Confidence falls with rank, so accumulate the binomial CDF term by term.
    let mut below = 0.0;
    let mut best = None;
    for m in 1..=n {
        below += ln_pmf(n, m - 1, gamma_s).exp();
        if 1.0 - below >= gamma_a {
            best = Some(m);
        } else {
            break;
        }
    }
    best
}
