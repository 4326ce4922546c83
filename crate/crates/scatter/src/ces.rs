//! Sampling from compound-Gaussian CES models.
//!
//! Every supported model factors as `z = sqrt(tau) x` with `x ~ CN(0, M)`
//! Gaussian and `tau` an independent positive texture, so a batch of CES
//! draws comes paired with the fictive Gaussian batch built from the same
//! cores. That coupling is what the downstream covariance comparisons rely
//! on, and it is exact here by construction: the same `x_k` buffer is
//! scaled entrywise to produce `z_k`.
//!
//! Randomness is counter-based: `RngStream` holds a `(seed, stream_id)`
//! pair mapped onto independent ChaCha streams, so trial `i` can use stream
//! `i` and parallel execution order cannot change results.

use crate::numkit::{reg_incomplete_beta, reg_incomplete_gamma_p, ComplexVector, HermitianMatrix};
use crate::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

/// CES distribution family. All kinds are compound-Gaussian: the texture is
/// independent of the Gaussian core.
#[derive(Debug, Clone, PartialEq)]
pub enum CESModel {
    /// Circular complex Gaussian (texture identically 1).
    Gaussian,
    /// Complex multivariate t with `nu` degrees of freedom; the texture is
    /// inverse-gamma `IG(nu/2, nu/2)`.
    StudentT { nu: f64 },
    /// Clean Gaussian samples contaminated by a fixed fraction of
    /// t-distributed outliers sharing the same scatter matrix.
    GaussianOutlierMixture { nu: f64, contamination: f64 },
}

impl CESModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CESModel::Gaussian => Ok(()),
            CESModel::StudentT { nu } => {
                if nu > 0.0 && nu.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Parameter(format!("Student-t needs 0 < nu < inf, got {nu}")))
                }
            }
            CESModel::GaussianOutlierMixture { nu, contamination } => {
                if !(nu > 0.0 && nu.is_finite()) {
                    return Err(Error::Parameter(format!("mixture needs 0 < nu < inf, got {nu}")));
                }
                if !(0.0 < contamination && contamination < 1.0) {
                    return Err(Error::Parameter(format!(
                        "contamination must be in (0,1), got {contamination}"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// A reproducible randomness source: `(seed, stream_id)` selects one ChaCha
/// stream. Identical pairs reproduce identical draws regardless of thread
/// scheduling; a single stream must not be shared across threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream_id: 0 }
    }

    /// Derive a child stream; `tag` values form a tree of independent
    /// streams under splitmix mixing.
    pub fn child(self, tag: u64) -> Self {
        Self { seed: self.seed, stream_id: splitmix64(self.stream_id ^ splitmix64(tag)) }
    }

    /// Instantiate the generator for this stream.
    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// `K` coupled draws: CES observations `z_k = sqrt(tau_k) x_k` and the
/// fictive Gaussian observations `x_k = A n_k`, sharing the cores `n_k`.
#[derive(Debug, Clone)]
pub struct CoupledBatch {
    pub m: usize,
    pub k: usize,
    /// Standard complex Gaussian cores `n_k`.
    pub cores: Vec<ComplexVector>,
    /// Positive textures; identically 1 for the Gaussian kind.
    pub textures: Vec<f64>,
    /// Observed CES samples.
    pub z: Vec<ComplexVector>,
    /// Fictive Gaussian samples (`CN(0, M)`).
    pub x: Vec<ComplexVector>,
    /// Cholesky factor `A` with `A A^H = M`.
    pub chol_factor: crate::numkit::ComplexMatrix,
    /// Number of contaminated samples (mixture kind only).
    pub outlier_count: Option<usize>,
}

/// One standard complex Gaussian core `n ~ CN(0, I)`: real and imaginary
/// parts independent with variance 1/2 each.
pub fn sample_complex_gaussian_core(m: usize, stream: RngStream) -> ComplexVector {
    let mut rng = stream.rng();
    gaussian_core_with(m, &mut rng)
}

fn gaussian_core_with(m: usize, rng: &mut ChaCha8Rng) -> ComplexVector {
    const HALF_SQRT: f64 = std::f64::consts::FRAC_1_SQRT_2;
    let mut data = Vec::with_capacity(m);
    for _ in 0..m {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        data.push(Complex64::new(re * HALF_SQRT, im * HALF_SQRT));
    }
    ComplexVector::from_vec(data)
}

/// One texture draw for the model: 1 for Gaussian, `IG(nu/2, nu/2)` for
/// Student-t; for the mixture this is the *outlier* texture (batch sampling
/// decides which samples are contaminated).
pub fn sample_texture(model: &CESModel, stream: RngStream) -> f64 {
    let mut rng = stream.rng();
    match *model {
        CESModel::Gaussian => 1.0,
        CESModel::StudentT { nu } | CESModel::GaussianOutlierMixture { nu, .. } => {
            inverse_gamma_texture(nu, &mut rng)
        }
    }
}

fn inverse_gamma_texture(nu: f64, rng: &mut ChaCha8Rng) -> f64 {
    // 1/tau ~ Gamma(shape nu/2, rate nu/2); valid for every shape > 0.
    let gamma = Gamma::new(nu / 2.0, 2.0 / nu).expect("validated nu");
    let g: f64 = gamma.sample(rng);
    1.0 / g
}

/// Draw `K` coupled samples from the model with scatter matrix `M`.
///
/// Cores are drawn first, then textures; for the mixture kind exactly
/// `round(contamination * K)` samples carry outlier textures, at positions
/// drawn uniformly without replacement.
pub fn sample_coupled_batch(
    model: &CESModel,
    scatter: &HermitianMatrix,
    k: usize,
    stream: RngStream,
) -> Result<CoupledBatch> {
    model.validate()?;
    if k == 0 {
        return Err(Error::Parameter("batch needs K >= 1".into()));
    }
    let m = scatter.dim();
    let chol = scatter.cholesky()?;
    let a = chol.factor();
    let mut rng = stream.rng();

    let mut cores = Vec::with_capacity(k);
    let mut x = Vec::with_capacity(k);
    for _ in 0..k {
        let n = gaussian_core_with(m, &mut rng);
        let xi = a.mul_vector(&n);
        cores.push(n);
        x.push(xi);
    }

    let mut textures = vec![1.0; k];
    let mut outlier_count = None;
    match *model {
        CESModel::Gaussian => {}
        CESModel::StudentT { nu } => {
            for t in textures.iter_mut() {
                *t = inverse_gamma_texture(nu, &mut rng);
            }
        }
        CESModel::GaussianOutlierMixture { nu, contamination } => {
            let n_out = ((contamination * k as f64).round() as usize).min(k);
            // Partial Fisher-Yates: the first n_out entries of the permuted
            // index array are the outlier positions.
            let mut idx: Vec<usize> = (0..k).collect();
            for i in 0..n_out {
                let j = rng.gen_range(i..k);
                idx.swap(i, j);
            }
            for &pos in &idx[..n_out] {
                textures[pos] = inverse_gamma_texture(nu, &mut rng);
            }
            outlier_count = Some(n_out);
        }
    }

    let z: Vec<ComplexVector> = x
        .iter()
        .zip(&textures)
        .map(|(xi, &tau)| {
            if tau == 1.0 {
                xi.clone()
            } else {
                xi.scaled(tau.sqrt())
            }
        })
        .collect();

    Ok(CoupledBatch { m, k, cores, textures, z, x, chol_factor: a, outlier_count })
}

/// Distribution handle for the modular variate `t = z^H M^{-1} z`.
///
/// Gaussian: `(1/2) chi^2_{2m}` (a Gamma with shape `m`, unit scale);
/// Student-t: `m F_{2m,nu}`, realized by sampling as `tau * (1/2)
/// chi^2_{2m}`; mixture: the corresponding two-component mixture.
#[derive(Debug, Clone)]
pub struct ModularVariate {
    model: CESModel,
    m: usize,
}

/// Build the modular variate distribution for `(model, m)`.
pub fn modular_variate_distribution(model: &CESModel, m: usize) -> Result<ModularVariate> {
    model.validate()?;
    if m == 0 {
        return Err(Error::Parameter("dimension must be positive".into()));
    }
    Ok(ModularVariate { model: model.clone(), m })
}

impl ModularVariate {
    pub fn dim(&self) -> usize {
        self.m
    }

    /// CDF of the modular variate.
    pub fn cdf(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        let m = self.m as f64;
        match self.model {
            CESModel::Gaussian => reg_incomplete_gamma_p(m, t),
            CESModel::StudentT { nu } => student_modular_cdf(m, nu, t),
            CESModel::GaussianOutlierMixture { nu, contamination } => {
                let clean = reg_incomplete_gamma_p(m, t)?;
                let dirty = student_modular_cdf(m, nu, t)?;
                Ok((1.0 - contamination) * clean + contamination * dirty)
            }
        }
    }

    /// One draw, advancing the supplied generator.
    pub fn sample_with(&self, rng: &mut ChaCha8Rng) -> f64 {
        let gamma = Gamma::new(self.m as f64, 1.0).expect("m >= 1");
        let t2: f64 = gamma.sample(rng);
        match self.model {
            CESModel::Gaussian => t2,
            CESModel::StudentT { nu } => inverse_gamma_texture(nu, rng) * t2,
            CESModel::GaussianOutlierMixture { nu, contamination } => {
                if rng.gen::<f64>() < contamination {
                    inverse_gamma_texture(nu, rng) * t2
                } else {
                    t2
                }
            }
        }
    }

    /// `n` draws from a dedicated stream.
    pub fn sample_many(&self, n: usize, stream: RngStream) -> Vec<f64> {
        let mut rng = stream.rng();
        (0..n).map(|_| self.sample_with(&mut rng)).collect()
    }

    /// Coupled draw `(t1, t2)` with `t2 ~ (1/2) chi^2_{2m}` and
    /// `t1 = tau t2` sharing the texture split of the model.
    pub fn sample_coupled_with(&self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let gamma = Gamma::new(self.m as f64, 1.0).expect("m >= 1");
        let t2: f64 = gamma.sample(rng);
        let tau = match self.model {
            CESModel::Gaussian => 1.0,
            CESModel::StudentT { nu } => inverse_gamma_texture(nu, rng),
            CESModel::GaussianOutlierMixture { nu, contamination } => {
                if rng.gen::<f64>() < contamination {
                    inverse_gamma_texture(nu, rng)
                } else {
                    1.0
                }
            }
        };
        (tau * t2, t2)
    }
}

/// CDF of `m F_{2m,nu}`: `I_{2t/(2t+nu)}(m, nu/2)`.
fn student_modular_cdf(m: f64, nu: f64, t: f64) -> Result<f64> {
    reg_incomplete_beta(m, nu / 2.0, 2.0 * t / (2.0 * t + nu))
}
