//! Distribution-level semantic metrics over pre-extracted features.
//!
//! FAD is the Fréchet distance between Gaussian fits of two embedding sets,
//! `‖μ₁−μ₂‖² + Tr(Σ₁ + Σ₂ − 2(Σ₁Σ₂)^{1/2})`. The trace of the matrix square
//! root is taken from the eigenvalues of the symmetric matrix
//! `Σ₁^{1/2} Σ₂ Σ₁^{1/2}`, which shares its spectrum with `Σ₁Σ₂`.
//!
//! KLD is `D_KL(gt ‖ gen)` between class-probability vectors after flooring
//! every entry at `epsilon` and renormalizing.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_KLD_EPSILON: f64 = 1e-6;
const SYMMETRY_TOL: f64 = 1e-9;
const PSD_TOL: f64 = 1e-8;
const NEGATIVE_DISTANCE_TOL: f64 = 1e-6;

/// `n × d` matrix of pooled embeddings, one row per frame or clip.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    features: DMatrix<f64>,
}

impl FeatureSet {
    /// Builds from row-major data.
    pub fn from_rows(data: &[f64], n: usize, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("feature dimension must be at least 1".into()));
        }
        if data.len() != n * d {
            return Err(Error::DimensionMismatch(format!(
                "{} values cannot form a {n}x{d} feature matrix",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite feature at row {}, column {}",
                i / d,
                i % d
            )));
        }
        Ok(Self {
            features: DMatrix::from_row_slice(n, d, data),
        })
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.features
    }

    /// True when there are too few rows for a full-rank covariance.
    pub fn is_rank_deficient(&self) -> bool {
        self.n() < self.dim() + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStats {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
}

impl GaussianStats {
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if covariance.nrows() != d || covariance.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "mean has {d} entries but covariance is {}x{}",
                covariance.nrows(),
                covariance.ncols()
            )));
        }
        if mean.iter().chain(covariance.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("statistics must be finite".into()));
        }
        for i in 0..d {
            for j in 0..i {
                if (covariance[(i, j)] - covariance[(j, i)]).abs() > SYMMETRY_TOL {
                    return Err(Error::InvalidInput(format!("covariance is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { mean, covariance })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }
}

/// Sample mean and unbiased sample covariance.
pub fn gaussian_stats(fs: &FeatureSet) -> Result<GaussianStats> {
    let n = fs.n();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let x = fs.matrix();
    let mean = x.row_mean().transpose();
    let mut centered = x.clone();
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    let mut cov = centered.transpose() * &centered / (n as f64 - 1.0);
    // exact symmetry, the product is symmetric only up to rounding
    let d = cov.nrows();
    for i in 0..d {
        for j in 0..i {
            let v = 0.5 * (cov[(i, j)] + cov[(j, i)]);
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    GaussianStats::new(mean, cov)
}

/// Eigenvalues of a symmetric matrix, with slightly negative values clamped
/// to zero and clearly negative ones rejected.
fn psd_eigen(m: DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    let mut eig = SymmetricEigen::new(m);
    let scale = eig.eigenvalues.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    for v in eig.eigenvalues.iter_mut() {
        if *v < -PSD_TOL * scale {
            return Err(Error::NotPositiveSemiDefinite { eigenvalue: *v });
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(eig)
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn sqrt_psd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = psd_eigen(symmetrize(m))?;
    let root = eig.eigenvalues.map(f64::sqrt);
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&root) * eig.eigenvectors.transpose())
}

pub fn frechet_distance(a: &GaussianStats, b: &GaussianStats) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "statistics have dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let diff = &a.mean - &b.mean;
    let mean_term = diff.dot(&diff);

    psd_eigen(b.covariance.clone())?;
    let root_a = sqrt_psd(&a.covariance)?;
    let inner = symmetrize(&(&root_a * &b.covariance * &root_a));
    let trace_sqrt: f64 = psd_eigen(inner)?.eigenvalues.iter().map(|v| v.sqrt()).sum();

    let distance = mean_term + a.covariance.trace() + b.covariance.trace() - 2.0 * trace_sqrt;
    if distance < 0.0 {
        if distance > -NEGATIVE_DISTANCE_TOL {
            return Ok(0.0);
        }
        return Err(Error::NotPositiveSemiDefinite { eigenvalue: distance });
    }
    Ok(distance)
}

/// FAD between two embedding sets.
pub fn fad(gen: &FeatureSet, gt: &FeatureSet) -> Result<f64> {
    frechet_distance(&gaussian_stats(gen)?, &gaussian_stats(gt)?)
}

/// Mean of the per-channel FADs over the four (W, X, Y, Z) channels.
pub fn fad_avg(per_channel: &[(FeatureSet, FeatureSet)]) -> Result<f64> {
    if per_channel.len() != 4 {
        return Err(Error::InvalidInput(format!(
            "channel-average FAD needs four channel pairs, got {}",
            per_channel.len()
        )));
    }
    let mut total = 0.0;
    for (gen, gt) in per_channel {
        total += fad(gen, gt)?;
    }
    Ok(total / 4.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassDistribution {
    probabilities: Vec<f64>,
}

impl ClassDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidInput("class distribution is empty".into()));
        }
        if let Some(i) = probabilities.iter().position(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidInput(format!("probability at index {i} is negative or non-finite")));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidInput(format!("probabilities sum to {sum}, expected 1")));
        }
        Ok(Self { probabilities })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    fn smoothed(&self, epsilon: f64) -> Vec<f64> {
        let floored: Vec<f64> = self.probabilities.iter().map(|p| p.max(epsilon)).collect();
        let sum: f64 = floored.iter().sum();
        floored.into_iter().map(|p| p / sum).collect()
    }
}

/// `D_KL(gt ‖ gen)` with `epsilon` flooring and renormalization.
pub fn kld(gen: &ClassDistribution, gt: &ClassDistribution, epsilon: f64) -> Result<f64> {
    if gen.len() != gt.len() {
        return Err(Error::DimensionMismatch(format!(
            "class distributions have {} and {} classes",
            gen.len(),
            gt.len()
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} must be in (0, 1)")));
    }
    let p = gt.smoothed(epsilon);
    let q = gen.smoothed(epsilon);
    let value: f64 = p.iter().zip(&q).map(|(p, q)| p * (p / q).ln()).sum();
    Ok(value.max(0.0))
}

/// Mean KLD over paired clips.
pub fn mean_kld(pairs: &[(ClassDistribution, ClassDistribution)], epsilon: f64) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("no clip pairs given".into()));
    }
    let mut total = 0.0;
    for (gen, gt) in pairs {
        total += kld(gen, gt, epsilon)?;
    }
    Ok(total / pairs.len() as f64)
}
