//! Decision-ready summaries of a propagated sample.

use std::io::Write;
use std::path::Path;

use thiserror::Error;

use crate::engine::{AlphaSchedule, FuzzySample, Plan};
use crate::probability::{empirical_cdf, ProbabilityError, StepFunction};

#[derive(Debug, Error)]
pub enum PostprocessError {
    #[error("no records at alpha={alpha}; available levels: {available:?}")]
    NoRecordsAt { alpha: f64, available: Vec<f64> },
    #[error("every record at alpha={0} failed")]
    AllFailedAt(f64),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0} evaluation failure(s) present; the rank guarantee needs a complete sample")]
    FailuresPresent(usize),
    #[error(transparent)]
    Probability(#[from] ProbabilityError),
    #[error("writing p-box: {0}")]
    Io(#[from] std::io::Error),
}

/// Pair of cumulated bounds `f_low ≤ f_up` on the output distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct PBox {
    /// Built from interval upper endpoints.
    pub f_low: StepFunction,
    /// Built from interval lower endpoints.
    pub f_up: StepFunction,
    pub label: String,
    pub records: usize,
    pub failures: usize,
}

impl PBox {
    fn from_intervals(
        bounds: impl Iterator<Item = Option<(f64, f64)>>,
        label: String,
    ) -> Result<Option<Self>, ProbabilityError> {
        let (mut los, mut his, mut failures) = (Vec::new(), Vec::new(), 0);
        for b in bounds {
            match b {
                Some((lo, hi)) => {
                    los.push(lo);
                    his.push(hi);
                }
                None => failures += 1,
            }
        }
        if los.is_empty() {
            return Ok(None);
        }
        Ok(Some(Self {
            f_low: empirical_cdf(&his)?,
            f_up: empirical_cdf(&los)?,
            label,
            records: los.len(),
            failures,
        }))
    }

    /// Rows `(x, f_low(x), f_up(x))` at every jump of either bound.
    pub fn rows(&self) -> Vec<(f64, f64, f64)> {
        let mut xs: Vec<f64> =
            self.f_low.jumps().iter().chain(self.f_up.jumps()).map(|j| j.0).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs.into_iter().map(|x| (x, self.f_low.eval(x), self.f_up.eval(x))).collect()
    }

    /// Writes `x,f_low,f_up` CSV.
    pub fn write_csv(&self, path: &Path) -> Result<(), PostprocessError> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "x,f_low,f_up")?;
        for (x, lo, up) in self.rows() {
            writeln!(f, "{x},{lo},{up}")?;
        }
        f.flush()?;
        Ok(())
    }

    /// Largest gap between either pair of bounds.
    pub fn sup_distance(&self, other: &PBox) -> f64 {
        self.f_low.sup_distance(&other.f_low).max(self.f_up.sup_distance(&other.f_up))
    }
}

/// P-box of the N intervals produced at one α level.
pub fn pbox_at_alpha(sample: &FuzzySample, alpha: f64) -> Result<PBox, PostprocessError> {
    let at: Vec<_> = sample.records.iter().filter(|r| r.alpha == alpha).collect();
    if at.is_empty() {
        return Err(PostprocessError::NoRecordsAt { alpha, available: sample.levels() });
    }
    PBox::from_intervals(at.iter().map(|r| r.interval().map(|iv| (iv.lo, iv.hi))), format!("alpha={alpha}"))?
        .ok_or(PostprocessError::AllFailedAt(alpha))
}

/// Mean p-box over α: pooled records for random α, pointwise average for a grid.
pub fn mean_pbox(sample: &FuzzySample) -> Result<PBox, PostprocessError> {
    match &sample.plan.alpha_schedule {
        AlphaSchedule::RandomAlpha { .. } => {
            let bounds = sample.records.iter().map(|r| r.interval().map(|iv| (iv.lo, iv.hi)));
            PBox::from_intervals(bounds, "mean".into())?
                .ok_or_else(|| PostprocessError::Unsupported("every record failed".into()))
        }
        AlphaSchedule::Grid { levels } => {
            let slices = levels.iter().map(|&a| pbox_at_alpha(sample, a)).collect::<Result<Vec<_>, _>>()?;
            let lows: Vec<&StepFunction> = slices.iter().map(|p| &p.f_low).collect();
            let ups: Vec<&StepFunction> = slices.iter().map(|p| &p.f_up).collect();
            Ok(PBox {
                f_low: StepFunction::average(&lows)?,
                f_up: StepFunction::average(&ups)?,
                label: "mean".into(),
                records: slices.iter().map(|p| p.records).sum(),
                failures: slices.iter().map(|p| p.failures).sum(),
            })
        }
        other => Err(PostprocessError::Unsupported(format!(
            "mean p-box is undefined for a {} schedule; use random_alpha or grid",
            other.kind()
        ))),
    }
}

/// Pessimistic (α = 0) and optimistic (α = 1) p-boxes.
pub fn double_pair(sample: &FuzzySample) -> Result<(PBox, PBox), PostprocessError> {
    let mut pessimistic = pbox_at_alpha(sample, 0.0)?;
    pessimistic.label = "alpha=0 pessimistic".into();
    let mut optimistic = pbox_at_alpha(sample, 1.0)?;
    optimistic.label = "alpha=1 optimistic".into();
    Ok((pessimistic, optimistic))
}

/// One p-box per α level present, ascending.
pub fn alpha_slices(sample: &FuzzySample) -> Result<Vec<PBox>, PostprocessError> {
    sample.levels().into_iter().map(|a| pbox_at_alpha(sample, a)).collect()
}

/// The `rank_from_top`-th largest upper endpoint, an upper bound on the
/// γS-quantile of the α-cut upper response with confidence at least γA.
///
/// Failed records make this refuse unless `failures_as_infinite` is set, in
/// which case they count as `+∞`.
pub fn percentile_bound(
    sample: &FuzzySample,
    plan: &Plan,
    failures_as_infinite: bool,
) -> Result<f64, PostprocessError> {
    let rank = plan
        .rank_from_top
        .ok_or_else(|| PostprocessError::Unsupported("plan has no rank; gamma_a was \"none\"".into()))?;
    if !matches!(plan.alpha_schedule, AlphaSchedule::Fixed { .. }) {
        return Err(PostprocessError::Unsupported(format!(
            "percentile bound needs a fixed-alpha schedule, not {}",
            plan.alpha_schedule.kind()
        )));
    }
    let failures = sample.failure_count();
    if failures > 0 && !failures_as_infinite {
        return Err(PostprocessError::FailuresPresent(failures));
    }
    let mut highs: Vec<f64> =
        sample.records.iter().map(|r| r.interval().map_or(f64::INFINITY, |iv| iv.hi)).collect();
    if rank == 0 || rank > highs.len() {
        return Err(PostprocessError::Unsupported(format!("rank {rank} exceeds {} records", highs.len())));
    }
    highs.sort_by(|a, b| b.total_cmp(a));
    Ok(highs[rank - 1])
}
