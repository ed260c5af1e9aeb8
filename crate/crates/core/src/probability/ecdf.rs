use super::ProbabilityError;

/// Right-continuous, non-decreasing step function starting at 0.
///
/// Stored as jump points `(x, F(x))`; `F` is 0 left of the first jump and
/// holds its value until the next one.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    jumps: Vec<(f64, f64)>,
}

impl StepFunction {
    /// Builds from jump points sorted strictly by `x` with non-decreasing values.
    pub fn from_jumps(jumps: Vec<(f64, f64)>) -> Result<Self, ProbabilityError> {
        if jumps.windows(2).any(|w| !(w[0].0 < w[1].0) || w[1].1 < w[0].1) {
            return Err(ProbabilityError::Invalid("step jumps must be strictly ordered and non-decreasing".into()));
        }
        if jumps.iter().any(|j| !(0.0..=1.0).contains(&j.1)) {
            return Err(ProbabilityError::Invalid("step values must lie in [0, 1]".into()));
        }
        Ok(Self { jumps })
    }

    pub fn jumps(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.jumps.partition_point(|j| j.0 <= x) {
            0 => 0.0,
            i => self.jumps[i - 1].1,
        }
    }

    /// Sup-norm distance, exact: both functions are constant between merged jumps.
    pub fn sup_distance(&self, other: &StepFunction) -> f64 {
        merged_points(&[self, other])
            .into_iter()
            .map(|x| (self.eval(x) - other.eval(x)).abs())
            .fold(0.0, f64::max)
    }

    /// Pointwise equal-weight average, evaluated on the merged jump set.
    pub fn average(functions: &[&StepFunction]) -> Result<Self, ProbabilityError> {
        if functions.is_empty() {
            return Err(ProbabilityError::Invalid("cannot average zero step functions".into()));
        }
        let n = functions.len() as f64;
        let jumps = merged_points(functions)
            .into_iter()
            .map(|x| (x, (functions.iter().map(|f| f.eval(x)).sum::<f64>() / n).min(1.0)))
            .collect();
        Ok(Self { jumps })
    }
}

fn merged_points(functions: &[&StepFunction]) -> Vec<f64> {
    let mut xs: Vec<f64> = functions.iter().flat_map(|f| f.jumps.iter().map(|j| j.0)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Empirical CDF, `F(x) = #{v ≤ x} / n`.
pub fn empirical_cdf(values: &[f64]) -> Result<StepFunction, ProbabilityError> {
    if values.is_empty() {
        return Err(ProbabilityError::Invalid("empirical CDF of an empty sample".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(ProbabilityError::Invalid("empirical CDF of a sample containing NaN".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut jumps: Vec<(f64, f64)> = Vec::new();
    for (i, &x) in sorted.iter().enumerate() {
        let f = (i + 1) as f64 / n;
        match jumps.last_mut() {
            Some(last) if last.0 == x => last.1 = f,
            _ => jumps.push((x, f)),
        }
    }
    Ok(StepFunction { jumps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let f = empirical_cdf(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(f.eval(2.0), 2.0 / 3.0);
        let f = empirical_cdf(&[5.0]).unwrap();
        assert_eq!(f.eval(4.999), 0.0);
        assert_eq!(f.eval(5.0), 1.0);
        let f = empirical_cdf(&[2.0, 2.0, 2.0]).unwrap();
        assert_eq!(f.eval(2.0), 1.0);
        assert_eq!(f.jumps().len(), 1);
    }

    #[test]
    fn empty_rejected() {
        assert!(empirical_cdf(&[]).is_err());
    }

    #[test]
    fn average_and_distance() {
        let a = empirical_cdf(&[0.0]).unwrap();
        let b = empirical_cdf(&[1.0]).unwrap();
        let m = StepFunction::average(&[&a, &b]).unwrap();
        assert_eq!(m.eval(-1.0), 0.0);
        assert_eq!(m.eval(0.5), 0.5);
        assert_eq!(m.eval(1.0), 1.0);
        assert_eq!(a.sup_distance(&b), 1.0);
        assert_eq!(m.sup_distance(&a), 0.5);
        assert_eq!(a.sup_distance(&a), 0.0);
    }
}
