//! Aleatory parameters: laws, seeded sampling, empirical CDFs and rank
//! correlation.

mod correlation;
mod dist;
mod ecdf;
pub mod normal;

pub use correlation::{induce_rank_correlation, ranks, spearman, RankCorrelationSpec};
pub use dist::ProbabilityDist;
pub use ecdf::{empirical_cdf, StepFunction};

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProbabilityError {
    #[error("probability level {0} is outside (0, 1)")]
    Domain(f64),
    #[error("{0}")]
    Invalid(String),
    #[error("correlation matrix is not positive semi-definite (smallest eigenvalue {0:.3e})")]
    NotPositiveSemiDefinite(f64),
    #[error("{n} samples are too few to induce correlation among {k} columns (need at least {})", k + 1)]
    TooFewSamples { n: usize, k: usize },
}

/// Sampling design for the aleatory columns.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingDesign {
    /// Simple random sampling; the only design order-statistic sizes hold for.
    #[default]
    Srs,
    /// Latin hypercube, one stratum per draw.
    Lhs,
}

/// Independent random substreams derived from one seed.
///
/// Parameter streams are keyed by parameter name, so adding or reordering
/// parameters leaves existing columns untouched.
#[derive(Debug, Clone, Copy)]
pub struct Streams {
    seed: u64,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn parameter(&self, name: &str) -> ChaCha8Rng {
        self.keyed(&format!("parameter:{name}"))
    }

    /// Stream used for random α levels.
    pub fn alpha(&self) -> ChaCha8Rng {
        self.keyed("rafu:alpha")
    }

    /// Stream used for the score permutations of rank-correlation induction.
    pub fn correlation(&self) -> ChaCha8Rng {
        self.keyed("rafu:correlation")
    }

    fn keyed(&self, key: &str) -> ChaCha8Rng {
        let digest = Sha256::digest(key.as_bytes());
        let stream = u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"));
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Uniform draw on the open interval (0, 1).
pub fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// `n` i.i.d. draws by inverse transform.
pub fn sample<R: RngCore + ?Sized>(dist: &ProbabilityDist, rng: &mut R, n: usize) -> Result<Vec<f64>, ProbabilityError> {
    (0..n).map(|_| dist.inverse_cdf(open_unit(rng))).collect()
}

/// `n` Latin-hypercube draws: one uniform per stratum, strata shuffled.
pub fn sample_lhs<R: RngCore + ?Sized>(
    dist: &ProbabilityDist,
    rng: &mut R,
    n: usize,
) -> Result<Vec<f64>, ProbabilityError> {
    let mut strata: Vec<usize> = (0..n).collect();
    strata.shuffle(rng);
    let below_one = 1.0 - f64::EPSILON / 2.0;
    strata
        .into_iter()
        .map(|s| {
            let u = ((s as f64 + open_unit(rng)) / n as f64).min(below_one);
            dist.inverse_cdf(u)
        })
        .collect()
}

pub fn sample_with<R: RngCore + ?Sized>(
    design: SamplingDesign,
    dist: &ProbabilityDist,
    rng: &mut R,
    n: usize,
) -> Result<Vec<f64>, ProbabilityError> {
    match design {
        SamplingDesign::Srs => sample(dist, rng, n),
        SamplingDesign::Lhs => sample_lhs(dist, rng, n),
    }
}
