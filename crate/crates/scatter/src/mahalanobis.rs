//! Robust Mahalanobis distance, its reference laws, and goodness of fit.
//!
//! For Gaussian data the squared distance built on the true scatter matrix
//! follows `(1/2) chi^2_{2m}`; plugging in the SCM turns it into a scaled
//! Beta prime, `K beta'(m, K - m + 1)`, which contracts back to the
//! chi-square law as `K` grows. The deviation statistic of
//! [`scaled_distance_deviation`] measures how far a robust-estimator
//! distance sits from the coupled SCM distance, on the scale of the
//! true-scatter distance.

use crate::asymptotics::AsymCoeffs;
use crate::numkit::{ln_beta, ln_gamma, reg_incomplete_beta, reg_incomplete_gamma_p, ComplexVector, HermitianMatrix};
use crate::{Error, Result};

/// Which matrix produced a distance sample.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSource {
    TrueScatter,
    Scm,
    MEstimator { name: String, sigma: f64 },
}

/// One squared-distance draw tagged with its matrix source.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSample {
    pub value: f64,
    pub source: MatrixSource,
}

impl DistanceSample {
    pub fn new(value: f64, source: MatrixSource) -> Result<Self> {
        if value < 0.0 {
            return Err(Error::Parameter(format!("squared distance must be nonnegative, got {value}")));
        }
        Ok(Self { value, source })
    }
}

/// Reference distribution for squared Mahalanobis distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefDistribution {
    /// `(1/2) chi^2_{2m}`, i.e. a Gamma with shape `m` and unit scale.
    ScaledChiSq { m: usize },
    /// `K X` with `X ~ beta'(m, K - m + 1)`.
    ScaledBetaPrime { m: usize, k: usize },
}

/// Validated constructor for [`RefDistribution`].
pub fn ref_distribution(kind: RefDistribution) -> Result<RefDistribution> {
    match kind {
        RefDistribution::ScaledChiSq { m } => {
            if m == 0 {
                return Err(Error::Parameter("scaled chi-square needs m >= 1".into()));
            }
        }
        RefDistribution::ScaledBetaPrime { m, k } => {
            if m == 0 {
                return Err(Error::Parameter("scaled Beta prime needs m >= 1".into()));
            }
            if k < m + 1 {
                return Err(Error::Parameter(format!("scaled Beta prime needs K >= m + 1, got K={k} m={m}")));
            }
        }
    }
    Ok(kind)
}

impl RefDistribution {
    pub fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            RefDistribution::ScaledChiSq { m } => {
                let a = m as f64;
                ((a - 1.0) * x.ln() - x - ln_gamma(a)).exp()
            }
            RefDistribution::ScaledBetaPrime { m, k } => {
                // Density of K X at x: (1/K) f_X(x/K), assembled in log
                // space so that B(m, K-m+1) cannot overflow at K ~ 1e3+.
                let a = m as f64;
                let b = (k - m + 1) as f64;
                let u = x / k as f64;
                ((a - 1.0) * u.ln() - (a + b) * u.ln_1p() - ln_beta(a, b) - (k as f64).ln()).exp()
            }
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        match *self {
            RefDistribution::ScaledChiSq { m } => reg_incomplete_gamma_p(m as f64, x),
            RefDistribution::ScaledBetaPrime { m, k } => {
                let u = x / k as f64;
                reg_incomplete_beta(m as f64, (k - m + 1) as f64, u / (1.0 + u))
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            RefDistribution::ScaledChiSq { m } => m as f64,
            // beta'(a, b) has mean a/(b-1); scaled by K.
            RefDistribution::ScaledBetaPrime { m, k } => (k * m) as f64 / (k - m) as f64,
        }
    }
}

/// Squared Mahalanobis distance `z^H M^{-1} z` (real and nonnegative).
pub fn mahalanobis_sq(z: &ComplexVector, scatter: &HermitianMatrix) -> Result<f64> {
    if z.dim() != scatter.dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector dim {} vs scatter dim {}",
            z.dim(),
            scatter.dim()
        )));
    }
    Ok(scatter.cholesky()?.quadratic_form(z))
}

/// The deviation variance of the distance statistic: `phi = sigma1 + sigma2`.
pub fn phi_variance(coeffs: &AsymCoeffs) -> f64 {
    coeffs.sigma1 + coeffs.sigma2
}

/// One trial of the deviation statistic at a fixed test point `z`:
/// `sqrt(K) (z^H (sigma M_rob)^{-1} z - z^H M_ref^{-1} z) / (z^H M_true^{-1} z)`.
pub fn scaled_distance_deviation(
    z: &ComplexVector,
    m_rob: &HermitianMatrix,
    sigma: f64,
    m_ref: &HermitianMatrix,
    m_true: &HermitianMatrix,
    k: usize,
) -> Result<f64> {
    if sigma <= 0.0 || sigma.is_nan() {
        return Err(Error::Parameter(format!("sigma must be positive, got {sigma}")));
    }
    let d_rob = mahalanobis_sq(z, &m_rob.scaled(sigma))?;
    let d_ref = mahalanobis_sq(z, m_ref)?;
    let d_true = mahalanobis_sq(z, m_true)?;
    if d_true == 0.0 {
        return Err(Error::DegenerateInput("test point has zero true-scatter distance".into()));
    }
    Ok((k as f64).sqrt() * (d_rob - d_ref) / d_true)
}

/// Kolmogorov-Smirnov statistic `sup |F_emp - F_ref|` against a reference
/// distribution. Requires at least 10 samples.
pub fn ks_statistic(samples: &[f64], dist: &RefDistribution) -> Result<f64> {
    if samples.len() < 10 {
        return Err(Error::Parameter(format!("KS needs at least 10 samples, got {}", samples.len())));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("distance samples must not be NaN"));
    let n = sorted.len() as f64;
    let mut ks: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let f = dist.cdf(*x)?;
        let hi = (i + 1) as f64 / n;
        let lo = i as f64 / n;
        ks = ks.max((f - hi).abs()).max((f - lo).abs());
    }
    Ok(ks)
}
