//! Rank-correlation induction by Iman–Conover reordering.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::Rng;

use super::normal::standard_normal_quantile;
use super::ProbabilityError;

const PSD_TOLERANCE: f64 = 1e-10;

/// Target Spearman matrix over the aleatory parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RankCorrelationSpec {
    matrix: Vec<Vec<f64>>,
}

impl RankCorrelationSpec {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self, ProbabilityError> {
        let k = matrix.len();
        if k == 0 || matrix.iter().any(|row| row.len() != k) {
            return Err(ProbabilityError::Invalid("correlation matrix must be square and non-empty".into()));
        }
        for i in 0..k {
            if matrix[i][i] != 1.0 {
                return Err(ProbabilityError::Invalid(format!("diagonal entry ({i}, {i}) is not 1")));
            }
            for j in 0..k {
                let v = matrix[i][j];
                if !(-1.0..=1.0).contains(&v) {
                    return Err(ProbabilityError::Invalid(format!("entry ({i}, {j}) = {v} is outside [-1, 1]")));
                }
                if v != matrix[j][i] {
                    return Err(ProbabilityError::Invalid(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        let min_eig = SymmetricEigen::new(to_dmatrix(&matrix)).eigenvalues.min();
        if min_eig < -PSD_TOLERANCE {
            return Err(ProbabilityError::NotPositiveSemiDefinite(min_eig));
        }
        Ok(Self { matrix })
    }

    pub fn identity(k: usize) -> Self {
        let matrix = (0..k).map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }
}

fn to_dmatrix(m: &[Vec<f64>]) -> DMatrix<f64> {
    let k = m.len();
    DMatrix::from_fn(k, k, |i, j| m[i][j])
}

/// Reorders each column so the sample rank correlation approximates `spec`.
///
/// Each output column is a permutation of the matching input column.
pub fn induce_rank_correlation<R: Rng + ?Sized>(
    columns: &[Vec<f64>],
    spec: &RankCorrelationSpec,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>, ProbabilityError> {
    let k = columns.len();
    if k != spec.dim() {
        return Err(ProbabilityError::Invalid(format!(
            "{k} columns but correlation matrix is {0}x{0}",
            spec.dim()
        )));
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let n = columns[0].len();
    if columns.iter().any(|c| c.len() != n) {
        return Err(ProbabilityError::Invalid("columns differ in length".into()));
    }
    if n < k + 1 {
        return Err(ProbabilityError::TooFewSamples { n, k });
    }

    // van der Waerden scores, standardised to unit variance
    let mut scores: Vec<f64> = (1..=n).map(|i| standard_normal_quantile(i as f64 / (n as f64 + 1.0))).collect();
    let sd = (scores.iter().map(|s| s * s).sum::<f64>() / n as f64).sqrt();
    scores.iter_mut().for_each(|s| *s /= sd);

    let mut score_matrix = DMatrix::<f64>::zeros(n, k);
    for j in 0..k {
        let mut col = scores.clone();
        col.shuffle(rng);
        for (i, v) in col.into_iter().enumerate() {
            score_matrix[(i, j)] = v;
        }
    }

    // Pearson correlation on normal scores that yields the requested Spearman.
    let target = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            1.0
        } else {
            2.0 * (std::f64::consts::PI * spec.matrix[i][j] / 6.0).sin()
        }
    });
    let eig = SymmetricEigen::new(target);
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let target_factor = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals);

    let sample_cov = score_matrix.transpose() * &score_matrix / n as f64;
    let sample_chol = sample_cov
        .cholesky()
        .ok_or_else(|| ProbabilityError::Invalid("score matrix is singular".into()))?;
    let whitening = sample_chol
        .l()
        .try_inverse()
        .ok_or_else(|| ProbabilityError::Invalid("score matrix is singular".into()))?;
    let reordered = score_matrix * whitening.transpose() * target_factor.transpose();

    let mut out = Vec::with_capacity(k);
    for (j, column) in columns.iter().enumerate() {
        let mut sorted = column.clone();
        sorted.sort_by(f64::total_cmp);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| reordered[(a, j)].total_cmp(&reordered[(b, j)]));
        let mut col = vec![0.0; n];
        for (rank, &row) in order.iter().enumerate() {
            col[row] = sorted[rank];
        }
        out.push(col);
    }
    Ok(out)
}

/// Average ranks (1-based), ties sharing their mean rank.
pub fn ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation of two equally long samples.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va * vb).sqrt()
}
