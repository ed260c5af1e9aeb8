use super::normal::{standard_normal_cdf, standard_normal_quantile};
use super::ProbabilityError;

/// Probability law of an aleatory parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbabilityDist {
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, sd: f64 },
    LogNormal { log_mean: f64, log_sd: f64 },
    Triangular { a: f64, mode: f64, b: f64 },
    /// Sorted atoms, each with mass `1/n`.
    Empirical(Vec<f64>),
}

impl ProbabilityDist {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self, ProbabilityError> {
        check_finite(&[lo, hi])?;
        if lo < hi {
            Ok(Self::Uniform { lo, hi })
        } else {
            Err(ProbabilityError::Invalid(format!("uniform requires lo < hi, got ({lo}, {hi})")))
        }
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self, ProbabilityError> {
        check_finite(&[mean, sd])?;
        if sd > 0.0 {
            Ok(Self::Normal { mean, sd })
        } else {
            Err(ProbabilityError::Invalid(format!("normal requires sd > 0, got {sd}")))
        }
    }

    pub fn lognormal(log_mean: f64, log_sd: f64) -> Result<Self, ProbabilityError> {
        check_finite(&[log_mean, log_sd])?;
        if log_sd > 0.0 {
            Ok(Self::LogNormal { log_mean, log_sd })
        } else {
            Err(ProbabilityError::Invalid(format!("lognormal requires log_sd > 0, got {log_sd}")))
        }
    }

    pub fn triangular(a: f64, mode: f64, b: f64) -> Result<Self, ProbabilityError> {
        check_finite(&[a, mode, b])?;
        if a <= mode && mode <= b && a < b {
            Ok(Self::Triangular { a, mode, b })
        } else {
            Err(ProbabilityError::Invalid(format!(
                "triangular requires a <= mode <= b and a < b, got ({a}, {mode}, {b})"
            )))
        }
    }

    pub fn empirical(mut values: Vec<f64>) -> Result<Self, ProbabilityError> {
        if values.is_empty() {
            return Err(ProbabilityError::Invalid("empirical law needs at least one value".into()));
        }
        check_finite(&values)?;
        values.sort_by(f64::total_cmp);
        Ok(Self::Empirical(values))
    }

    /// F⁻¹(u) for `0 < u < 1`. The empirical law returns the smallest atom
    /// `x` with `F(x) ≥ u`.
    pub fn inverse_cdf(&self, u: f64) -> Result<f64, ProbabilityError> {
        if !(u > 0.0 && u < 1.0) {
            return Err(ProbabilityError::Domain(u));
        }
        Ok(match *self {
            Self::Uniform { lo, hi } => lo + u * (hi - lo),
            Self::Normal { mean, sd } => mean + sd * standard_normal_quantile(u),
            Self::LogNormal { log_mean, log_sd } => (log_mean + log_sd * standard_normal_quantile(u)).exp(),
            Self::Triangular { a, mode, b } => {
                let split = (mode - a) / (b - a);
                if u < split {
                    a + (u * (b - a) * (mode - a)).sqrt()
                } else {
                    b - ((1.0 - u) * (b - a) * (b - mode)).sqrt()
                }
            }
            Self::Empirical(ref values) => {
                let n = values.len();
                let mut k = ((u * n as f64).ceil() as usize).clamp(1, n);
                // Guard against u*n rounding up past an exact multiple of 1/n.
                while k > 1 && (k - 1) as f64 / n as f64 >= u {
                    k -= 1;
                }
                values[k - 1]
            }
        })
    }

    /// F(x).
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Self::Normal { mean, sd } => standard_normal_cdf((x - mean) / sd),
            Self::LogNormal { log_mean, log_sd } => {
                if x <= 0.0 {
                    0.0
                } else {
                    standard_normal_cdf((x.ln() - log_mean) / log_sd)
                }
            }
            Self::Triangular { a, mode, b } => {
                if x <= a {
                    0.0
                } else if x >= b {
                    1.0
                } else if x <= mode {
                    (x - a) * (x - a) / ((b - a) * (mode - a))
                } else {
                    1.0 - (b - x) * (b - x) / ((b - a) * (b - mode))
                }
            }
            Self::Empirical(ref values) => {
                values.partition_point(|&v| v <= x) as f64 / values.len() as f64
            }
        }
    }
}

fn check_finite(values: &[f64]) -> Result<(), ProbabilityError> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(ProbabilityError::Invalid(format!("parameter {v} is not finite"))),
        None => Ok(()),
    }
}
