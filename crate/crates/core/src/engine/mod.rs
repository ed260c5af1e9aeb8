//! Turns the decision maker's triplet into a sampling plan and runs it.

mod io;
mod propagate;

pub use io::{read_sample, write_sample, SampleSidecar};
pub use propagate::{
    propagate, propagate_with, CountingEvaluator, Evaluator, ExecMode, ModelEvaluator,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{GammaE, GammaS, StudyConfig};
use crate::orderstats::{wilks_best_rank, wilks_confidence, wilks_min_size, Side, WilksQuery};
use crate::possibility::Interval;
use crate::probability::{open_unit, ProbabilityError, SamplingDesign, Streams};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("{0}")]
    Validation(String),
    #[error("plan was built for config {plan} but the config digest is {config}")]
    DigestMismatch { plan: String, config: String },
    #[error("every one of the {0} model evaluations failed")]
    AllFailed(usize),
    #[error(transparent)]
    Probability(#[from] ProbabilityError),
    #[error("sample file: {0}")]
    Io(String),
}

/// α levels to evaluate, per sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaSchedule {
    Fixed { alpha: f64 },
    /// One independent uniform α per sample.
    RandomAlpha { alphas: Vec<f64> },
    Dual,
    /// Evenly spaced levels including 0 and 1.
    Grid { levels: Vec<f64> },
}

const DUAL_LEVELS: [f64; 2] = [0.0, 1.0];

impl AlphaSchedule {
    pub fn alphas_for(&self, sample_index: usize) -> &[f64] {
        match self {
            AlphaSchedule::Fixed { alpha } => std::slice::from_ref(alpha),
            AlphaSchedule::RandomAlpha { alphas } => std::slice::from_ref(&alphas[sample_index]),
            AlphaSchedule::Dual => &DUAL_LEVELS,
            AlphaSchedule::Grid { levels } => levels,
        }
    }

    pub fn levels_per_sample(&self) -> usize {
        match self {
            AlphaSchedule::Fixed { .. } | AlphaSchedule::RandomAlpha { .. } => 1,
            AlphaSchedule::Dual => 2,
            AlphaSchedule::Grid { levels } => levels.len(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AlphaSchedule::Fixed { .. } => "fixed",
            AlphaSchedule::RandomAlpha { .. } => "random_alpha",
            AlphaSchedule::Dual => "dual",
            AlphaSchedule::Grid { .. } => "grid",
        }
    }
}

/// `levels` evenly spaced α values from 0 to 1 inclusive.
pub fn grid_levels(levels: usize) -> Vec<f64> {
    let steps = (levels - 1) as f64;
    (0..levels).map(|i| i as f64 / steps).collect()
}

/// What propagation will do, and what it will cost, fixed before it runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub sample_size: usize,
    pub alpha_schedule: AlphaSchedule,
    /// Exactly the number of model evaluations `propagate` performs.
    pub eval_count: usize,
    pub rank_from_top: Option<usize>,
    pub achieved_confidence: Option<f64>,
    pub seed: u64,
    pub config_digest: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Derives sample size, α schedule and evaluation budget from the triplet.
pub fn plan(config: &StudyConfig) -> Result<Plan, EngineError> {
    let triplet = config.triplet;
    let mut warnings = Vec::new();
    let (sample_size, rank_from_top, achieved_confidence) = match (triplet.gamma_a, triplet.gamma_s) {
        (Some(_), GammaS::Cdf) => {
            return Err(EngineError::Validation(
                "gamma_a needs a quantile level for gamma_s, not \"cdf\"".into(),
            ))
        }
        (Some(gamma_a), GammaS::Quantile(gamma_s)) => {
            let query = WilksQuery::new(gamma_s, gamma_a, Side::Upper)
                .map_err(|e| EngineError::Validation(e.to_string()))?;
            let minimal = wilks_min_size(&query);
            let n = config.sample_size.unwrap_or(minimal);
            let rank = wilks_best_rank(n, gamma_s, gamma_a).ok_or_else(|| {
                EngineError::Validation(format!(
                    "sample_size {n} is below the minimum {minimal} for gamma_s={gamma_s}, gamma_a={gamma_a}"
                ))
            })?;
            let confidence = wilks_confidence(n, rank, gamma_s).expect("rank within 1..=n");
            if config.sampling == SamplingDesign::Lhs {
                warnings.push("order-statistic confidence assumes simple random sampling; design is lhs".into());
            }
            (n, Some(rank), Some(confidence))
        }
        (None, _) => {
            let n = config.sample_size.ok_or_else(|| {
                EngineError::Validation("gamma_a is \"none\" so an explicit sample_size is required".into())
            })?;
            (n, None, None)
        }
    };
    if config.correlation.is_some() && sample_size < config.aleatory_count() + 1 {
        return Err(EngineError::Validation(format!(
            "sample size {sample_size} is too small to induce correlation among {} parameters",
            config.aleatory_count()
        )));
    }

    let alpha_schedule = match triplet.gamma_e {
        GammaE::Fixed { alpha } => AlphaSchedule::Fixed { alpha },
        GammaE::RandomAlpha => {
            let mut rng = Streams::new(config.seed).alpha();
            AlphaSchedule::RandomAlpha { alphas: (0..sample_size).map(|_| open_unit(&mut rng)).collect() }
        }
        GammaE::Dual => AlphaSchedule::Dual,
        GammaE::Grid { levels } => AlphaSchedule::Grid { levels: grid_levels(levels) },
    };
    let eval_count = sample_size * alpha_schedule.levels_per_sample();
    Ok(Plan {
        sample_size,
        alpha_schedule,
        eval_count,
        rank_from_top,
        achieved_confidence,
        seed: config.seed,
        config_digest: config.digest().to_string(),
        warnings,
    })
}

/// Result of one model evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Ok(Interval),
    /// Evaluation failed; carries the failure kind tag.
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub sample_index: usize,
    pub alpha: f64,
    pub outcome: Outcome,
}

impl Record {
    pub fn interval(&self) -> Option<Interval> {
        match self.outcome {
            Outcome::Ok(iv) => Some(iv),
            Outcome::Failed(_) => None,
        }
    }
}

/// Propagated random fuzzy output: `N` samples, each with one record per scheduled α.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzySample {
    pub records: Vec<Record>,
    pub plan: Plan,
    pub config_digest: String,
}

impl FuzzySample {
    pub fn failure_count(&self) -> usize {
        self.records.iter().filter(|r| matches!(r.outcome, Outcome::Failed(_))).count()
    }

    /// Distinct α levels present, ascending.
    pub fn levels(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.records.iter().map(|r| r.alpha).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(triplet: &str, extra: &str) -> StudyConfig {
        StudyConfig::from_json(&format!(
            r#"{{
                "parameters": [
                    {{"name": "x1", "aleatory": {{"kind": "uniform", "lo": 0, "hi": 1}}}},
                    {{"name": "e1", "epistemic": {{"kind": "triangular", "a": 0, "core": 1, "b": 2}}}}
                ],
                "model": "x1 + e1",
                "triplet": {triplet}
                {extra}
            }}"#
        ))
        .unwrap()
    }

    #[test]
    fn wilks_plan() {
        let p = plan(&config(r#"{"gamma_s": 0.95, "gamma_e": 0, "gamma_a": 0.99}"#, "")).unwrap();
        assert_eq!((p.sample_size, p.eval_count, p.rank_from_top), (90, 90, Some(1)));
        assert!(p.achieved_confidence.unwrap() >= 0.99);
    }

    #[test]
    fn budgets() {
        let cases = [
            (r#"{"kind": "random_alpha"}"#, 100),
            (r#"{"kind": "dual"}"#, 200),
            (r#"{"kind": "grid", "levels": 21}"#, 2100),
        ];
        for (ge, want) in cases {
            let t = format!(r#"{{"gamma_s": "cdf", "gamma_e": {ge}, "gamma_a": "none"}}"#);
            let p = plan(&config(&t, r#", "sample_size": 100"#)).unwrap();
            assert_eq!(p.eval_count, want, "{ge}");
        }
    }

    #[test]
    fn grid_spacing() {
        let g = grid_levels(21);
        assert_eq!(g.len(), 21);
        assert_eq!((g[0], g[1], g[20]), (0.0, 0.05, 1.0));
    }

    #[test]
    fn missing_sample_size() {
        let r = plan(&config(r#"{"gamma_s": "cdf", "gamma_e": {"kind": "dual"}, "gamma_a": "none"}"#, ""));
        assert!(matches!(r, Err(EngineError::Validation(_))));
        let r = plan(&config(r#"{"gamma_s": "cdf", "gamma_e": {"kind": "dual"}, "gamma_a": 0.9}"#, ""));
        assert!(matches!(r, Err(EngineError::Validation(_))));
    }

    #[test]
    fn imposed_budget_uses_best_rank() {
        let t = r#"{"gamma_s": 0.95, "gamma_e": 0, "gamma_a": 0.95}"#;
        let p = plan(&config(t, r#", "sample_size": 124"#)).unwrap();
        assert_eq!((p.sample_size, p.rank_from_top), (124, Some(3)));
        assert!(plan(&config(t, r#", "sample_size": 58"#)).is_err());
    }

    #[test]
    fn random_alphas_follow_seed() {
        let t = r#"{"gamma_s": "cdf", "gamma_e": {"kind": "random_alpha"}, "gamma_a": "none"}"#;
        let a = plan(&config(t, r#", "sample_size": 10, "seed": 3"#)).unwrap();
        let b = plan(&config(t, r#", "sample_size": 10, "seed": 3"#)).unwrap();
        let c = plan(&config(t, r#", "sample_size": 10, "seed": 4"#)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.alpha_schedule, c.alpha_schedule);
    }

    #[test]
    fn plan_json_round_trip_is_exact() {
        let t = r#"{"gamma_s": "cdf", "gamma_e": {"kind": "random_alpha"}, "gamma_a": "none"}"#;
        let p = plan(&config(t, r#", "sample_size": 500, "seed": 11"#)).unwrap();
        let back: Plan = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        let w = plan(&config(r#"{"gamma_s": 0.95, "gamma_e": 0, "gamma_a": 0.99}"#, "")).unwrap();
        let back: Plan = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
        assert_eq!(back.achieved_confidence.map(f64::to_bits), w.achieved_confidence.map(f64::to_bits));
    }
}
