use std::sync::atomic::{AtomicUsize, Ordering};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::{EngineError, FuzzySample, Outcome, Plan, Record};
use crate::config::{EpistemicEval, ParameterLaw, StudyConfig};
use crate::model::{EvalError, ModelAst};
use crate::possibility::Interval;
use crate::probability::{induce_rank_correlation, sample_with, Streams};

/// Computes the model image of one box given per-variable-slot intervals.
pub trait Evaluator: Sync {
    fn evaluate(&self, slots: &[Interval]) -> Result<Interval, EvalError>;
}

/// Evaluates the parsed model with the configured epistemic strategy.
pub struct ModelEvaluator<'a> {
    ast: &'a ModelAst,
    strategy: EpistemicEval,
    vertex_limit: usize,
}

impl<'a> ModelEvaluator<'a> {
    pub fn new(ast: &'a ModelAst, strategy: EpistemicEval, vertex_limit: usize) -> Self {
        Self { ast, strategy, vertex_limit }
    }

    pub fn for_config(config: &'a StudyConfig) -> Self {
        Self::new(&config.model, config.epistemic_eval, config.vertex_limit)
    }
}

impl Evaluator for ModelEvaluator<'_> {
    fn evaluate(&self, slots: &[Interval]) -> Result<Interval, EvalError> {
        match self.strategy {
            EpistemicEval::Interval => self.ast.interval_over(slots),
            EpistemicEval::Vertex => self.ast.vertex_over(slots, self.vertex_limit),
        }
    }
}

/// Wraps an evaluator and counts calls.
pub struct CountingEvaluator<E> {
    inner: E,
    calls: AtomicUsize,
}

impl<E: Evaluator> CountingEvaluator<E> {
    pub fn new(inner: E) -> Self {
        Self { inner, calls: AtomicUsize::new(0) }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }
}

impl<E: Evaluator> Evaluator for CountingEvaluator<E> {
    fn evaluate(&self, slots: &[Interval]) -> Result<Interval, EvalError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.evaluate(slots)
    }
}

/// How the (sample, α) evaluations are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    /// Uses rayon when the `parallel` feature is on, otherwise sequential.
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

enum Binding {
    Aleatory(usize),
    Epistemic(usize),
}

/// Runs the plan with the config's model and strategy.
pub fn propagate(plan: &Plan, config: &StudyConfig) -> Result<FuzzySample, EngineError> {
    propagate_with(plan, config, &ModelEvaluator::for_config(config), ExecMode::default())
}

pub fn propagate_with(
    plan: &Plan,
    config: &StudyConfig,
    evaluator: &dyn Evaluator,
    mode: ExecMode,
) -> Result<FuzzySample, EngineError> {
    if plan.config_digest != config.digest() {
        return Err(EngineError::DigestMismatch {
            plan: plan.config_digest.clone(),
            config: config.digest().to_string(),
        });
    }
    let n = plan.sample_size;
    let streams = Streams::new(plan.seed);

    let mut columns = Vec::new();
    let mut possibilities = Vec::new();
    let mut by_name = std::collections::HashMap::new();
    for p in &config.parameters {
        match &p.law {
            ParameterLaw::Aleatory(dist) => {
                by_name.insert(p.name.as_str(), Binding::Aleatory(columns.len()));
                columns.push(sample_with(config.sampling, dist, &mut streams.parameter(&p.name), n)?);
            }
            ParameterLaw::Epistemic(dist) => {
                by_name.insert(p.name.as_str(), Binding::Epistemic(possibilities.len()));
                possibilities.push(dist);
            }
        }
    }
    if let Some(spec) = &config.correlation {
        columns = induce_rank_correlation(&columns, spec, &mut streams.correlation())?;
    }
    let bindings: Vec<&Binding> = config
        .model
        .variables()
        .iter()
        .map(|v| by_name.get(v.as_str()).expect("model variables validated at load"))
        .collect();

    let jobs: Vec<(usize, f64)> = (0..n)
        .flat_map(|i| plan.alpha_schedule.alphas_for(i).iter().map(move |&a| (i, a)))
        .collect();
    let run = |&(sample_index, alpha): &(usize, f64)| {
        let slots: Vec<Interval> = bindings
            .iter()
            .map(|b| match **b {
                Binding::Aleatory(k) => Interval::point(columns[k][sample_index]),
                Binding::Epistemic(l) => possibilities[l].alpha_cut(alpha).expect("scheduled alpha in [0, 1]"),
            })
            .collect();
        let outcome = match evaluator.evaluate(&slots) {
            Ok(iv) => Outcome::Ok(iv),
            Err(e) => Outcome::Failed(e.kind().to_string()),
        };
        Record { sample_index, alpha, outcome }
    };

    let records: Vec<Record> = match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => jobs.par_iter().map(run).collect(),
        _ => jobs.iter().map(run).collect(),
    };

    let sample = FuzzySample { records, plan: plan.clone(), config_digest: config.digest().to_string() };
    if sample.failure_count() == sample.records.len() {
        return Err(EngineError::AllFailed(sample.records.len()));
    }
    Ok(sample)
}
