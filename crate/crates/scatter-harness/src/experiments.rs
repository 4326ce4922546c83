//! The figure experiments: coupled Monte Carlo sweeps.

use crate::config::{Experiment, ExperimentConfig, PanelEstimator, TestPointLaw, ZMode};
use crate::{init_thread_pool, HarnessError, Result};
use rayon::prelude::*;
use scatter::asymptotics::{
    build_structured_cov, coeffs_closed_form, coeffs_monte_carlo, empirical_asymptotic_cov, AsymCoeffs,
};
use scatter::ces::{sample_coupled_batch, CESModel, RngStream};
use scatter::estimators::{m_estimate, scm, WeightKind, WeightSpec, DEFAULT_MAX_ITER, DEFAULT_TOL};
use scatter::mahalanobis::{ks_statistic, mahalanobis_sq, scaled_distance_deviation, RefDistribution};
use scatter::numkit::{toeplitz_scatter, ComplexMatrix, ComplexVector, HermitianMatrix};
use serde::Serialize;
use std::collections::BTreeMap;

/// Stream tags partitioning the seed space of one experiment.
const TAG_TRIALS: u64 = 1;
const TAG_SIGMA: u64 = 2;
const TAG_TESTPOINT: u64 = 3;
const TAG_COEFFS: u64 = 4;

/// Trials per parallel work unit; results are merged in trial order so the
/// outcome does not depend on the worker count.
const CHUNK: usize = 64;

/// Monte Carlo draws for coefficient tables used as theory references.
const COEFF_MC_DRAWS: usize = 1_000_000;

/// One output record: a grid value, a named quantity, its Monte Carlo
/// estimate with standard error, and the matching theory value if any.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub grid: f64,
    pub quantity: String,
    pub empirical: f64,
    pub stderr: f64,
    pub theory: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub version: String,
    pub config: ExperimentConfig,
    /// Derived quantities worth echoing (consistency factors, run counts,
    /// contamination counts), keyed deterministically.
    pub notes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub rows: Vec<Row>,
    pub metadata: Metadata,
}

impl ExperimentResult {
    fn new(config: &ExperimentConfig) -> Self {
        Self {
            rows: Vec::new(),
            metadata: Metadata {
                version: env!("CARGO_PKG_VERSION").to_string(),
                config: config.clone(),
                notes: BTreeMap::new(),
            },
        }
    }
}

/// Run `runs` independent trials in fixed-size chunks, in parallel, and
/// return the per-trial outputs in trial order.
fn run_trials<T, F>(runs: usize, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let bounds: Vec<(usize, usize)> =
        (0..runs).step_by(CHUNK).map(|lo| (lo, (lo + CHUNK).min(runs))).collect();
    let chunks: std::result::Result<Vec<Vec<T>>, HarnessError> = bounds
        .par_iter()
        .map(|&(lo, hi)| (lo..hi).map(&trial).collect())
        .collect();
    Ok(chunks?.into_iter().flatten().collect())
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Sample variance with its large-sample standard error
/// `sqrt((m4 - s^4 (n-3)/(n-1)) / n)`.
fn variance_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m4 = 0.0;
    for v in values {
        let d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    let var = m2 / (n - 1.0);
    m4 /= n;
    let se_sq = (m4 - var * var * (n - 3.0) / (n - 1.0)) / n;
    (var, se_sq.max(0.0).sqrt())
}

fn trial_stream(seed: u64, grid_index: usize, trial: usize) -> RngStream {
    RngStream::new(seed).child(TAG_TRIALS).child(grid_index as u64).child(trial as u64)
}

fn converged_estimate(
    samples: &[ComplexVector],
    w: &WeightSpec,
) -> Result<scatter::estimators::FixedPointReport> {
    let rep = m_estimate(samples, w, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    if !rep.converged {
        return Err(HarnessError::Numeric(scatter::Error::Solver(format!(
            "fixed point did not converge within {DEFAULT_MAX_ITER} iterations (residual {:.3e})",
            rep.residual
        ))));
    }
    Ok(rep)
}

/// Mean of `|D_pq|^2` over the off-diagonal positions `p != q`; scaled by
/// `K` this estimates the d2 entry class of the asymptotic covariance when
/// the scatter matrix is the identity.
fn offdiag_sq_mean(d: &ComplexMatrix) -> f64 {
    let m = d.rows();
    let mut acc = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                acc += d.get(i, j).norm_sqr();
            }
        }
    }
    acc / (m * m - m) as f64
}

/// Consistency factor for an estimator on a model: exact where known,
/// otherwise the fixed-seed Monte Carlo solver.
fn consistency_sigma(w: &WeightSpec, model: &CESModel, m: usize, stream: RngStream) -> Result<f64> {
    match w.known_sigma(model) {
        Some(s) => Ok(s),
        None => Ok(scatter::estimators::solve_sigma(w, model, m, stream)?),
    }
}

/// Convergence of the empirical covariance of
/// `sqrt(K) vec(sigma M_hat - M_hat_SCM)` toward the theory matrix, over a
/// K sweep with `10 K` trials per point by default.
pub fn run_fig1(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    init_thread_pool();
    cfg.validate()?;
    let mut result = ExperimentResult::new(cfg);
    let m = cfg.m;
    let model = CESModel::StudentT { nu: cfg.nu };
    let w = WeightSpec::new(WeightKind::StudentT { nu: cfg.nu }, m)?;
    let scatter_true = toeplitz_scatter(cfg.rho, m)?;
    let coeffs = coeffs_closed_form(&w, &model, m)?;
    let sigma = coeffs.sigma;
    let theory = build_structured_cov(&scatter_true, coeffs.sigma1, coeffs.sigma2, false).sigma;
    let grid = cfg.k_grid.clone().unwrap_or_else(ExperimentConfig::default_fig1_k_grid);

    for (g, &k) in grid.iter().enumerate() {
        let runs = cfg.runs.unwrap_or(10 * k);
        let trials: Vec<(HermitianMatrix, HermitianMatrix)> = run_trials(runs, |i| {
            let stream = trial_stream(cfg.seed, g, i);
            let batch = sample_coupled_batch(&model, &scatter_true, k, stream)?;
            let rep = converged_estimate(&batch.z, &w)?;
            let m_scm = scm(&batch.x)?;
            Ok((rep.estimate.scaled(sigma), m_scm))
        })?;
        let (sigma_emp, _) = empirical_asymptotic_cov(&trials, k)?;
        let value = (&sigma_emp - &theory).frobenius_norm();

        // Delete-one-group jackknife over near-equal trial groups.
        let groups = 32.min(trials.len() / 2).max(2);
        let group_size = trials.len().div_ceil(groups);
        let mut group_norms = Vec::with_capacity(groups);
        for gi in 0..groups {
            let lo = gi * group_size;
            let hi = ((gi + 1) * group_size).min(trials.len());
            if hi <= lo {
                continue;
            }
            let (sig_g, _) = empirical_asymptotic_cov(&trials[lo..hi], k)?;
            let n_total = trials.len() as f64;
            let n_g = (hi - lo) as f64;
            let loo = &sigma_emp.scaled(n_total / (n_total - n_g)) - &sig_g.scaled(n_g / (n_total - n_g));
            group_norms.push((&loo - &theory).frobenius_norm());
        }
        let gn = group_norms.len() as f64;
        let gmean = group_norms.iter().sum::<f64>() / gn;
        let se = ((gn - 1.0) / gn * group_norms.iter().map(|v| (v - gmean) * (v - gmean)).sum::<f64>())
            .sqrt();

        result.rows.push(Row {
            grid: k as f64,
            quantity: "sigma_emp_minus_theory_fnorm".into(),
            empirical: value,
            stderr: se,
            theory: Some(0.0),
        });
        result.metadata.notes.insert(format!("runs_k{k}"), runs.to_string());
    }
    result.metadata.notes.insert("sigma".into(), sigma.to_string());
    result.metadata.notes.insert("sigma1_theory".into(), coeffs.sigma1.to_string());
    result.metadata.notes.insert("sigma2_theory".into(), coeffs.sigma2.to_string());
    Ok(result)
}

/// The empirical d2 entry class versus dimension, for the true-scatter and
/// coupled-SCM centerings of each estimator in the panel.
pub fn run_fig2(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    init_thread_pool();
    cfg.validate()?;
    let panel_b = matches!(cfg.experiment, Experiment::Fig2b);
    let mut result = ExperimentResult::new(cfg);
    let grid = cfg.m_grid.clone().unwrap_or_else(ExperimentConfig::default_fig2_m_grid);
    let k = cfg.k;
    let runs = cfg.runs.unwrap_or(10_000);
    let second_name = if panel_b { "huber" } else { "student" };

    for (g, &m) in grid.iter().enumerate() {
        let model = if panel_b {
            CESModel::GaussianOutlierMixture { nu: cfg.nu, contamination: cfg.contamination }
        } else {
            CESModel::StudentT { nu: cfg.nu }
        };
        let tyler = WeightSpec::new(WeightKind::Tyler, m)?;
        let second = if panel_b {
            WeightSpec::new(WeightKind::Huber { q: cfg.q }, m)?
        } else {
            WeightSpec::new(WeightKind::StudentT { nu: cfg.nu }, m)?
        };
        let base = RngStream::new(cfg.seed);
        let sigma_second =
            consistency_sigma(&second, &model, m, base.child(TAG_SIGMA).child(g as u64))?;
        let tyler_coeffs = coeffs_closed_form(&tyler, &model, m)?;
        let second_coeffs: AsymCoeffs = if panel_b {
            coeffs_monte_carlo(&second, &model, m, COEFF_MC_DRAWS, base.child(TAG_COEFFS).child(g as u64))?
        } else {
            coeffs_closed_form(&second, &model, m)?
        };
        let identity = HermitianMatrix::identity(m);
        let id_mat = identity.as_matrix();
        let trials: Vec<[f64; 5]> = run_trials(runs, |i| {
            let stream = trial_stream(cfg.seed, g, i);
            let batch = sample_coupled_batch(&model, &identity, k, stream)?;
            let m_scm = scm(&batch.x)?;
            let m_tyler = converged_estimate(&batch.z, &tyler)?.estimate;
            let m_second = converged_estimate(&batch.z, &second)?.estimate.scaled(sigma_second);
            let scm_mat = m_scm.as_matrix();
            let tyler_mat = m_tyler.as_matrix();
            let second_mat = m_second.as_matrix();
            Ok([
                offdiag_sq_mean(&(&scm_mat - &id_mat)),
                offdiag_sq_mean(&(&tyler_mat - &id_mat)),
                offdiag_sq_mean(&(&second_mat - &id_mat)),
                offdiag_sq_mean(&(&tyler_mat - &scm_mat)),
                offdiag_sq_mean(&(&second_mat - &scm_mat)),
            ])
        })?;

        let series = [
            ("d2_scm".to_string(), 1.0),
            ("d2_tyler".to_string(), tyler_coeffs.theta1),
            (format!("d2_{second_name}"), second_coeffs.theta1),
            ("d2_tyler_scm".to_string(), tyler_coeffs.sigma1),
            (format!("d2_{second_name}_scm"), second_coeffs.sigma1),
        ];
        for (idx, (quantity, theory)) in series.iter().enumerate() {
            let values: Vec<f64> = trials.iter().map(|t| t[idx] * k as f64).collect();
            let (mean, se) = mean_se(&values);
            result.rows.push(Row {
                grid: m as f64,
                quantity: quantity.clone(),
                empirical: mean,
                stderr: se,
                theory: Some(*theory),
            });
        }
        result.metadata.notes.insert(format!("sigma_{second_name}_m{m}"), sigma_second.to_string());
    }
    result.metadata.notes.insert("runs".into(), runs.to_string());
    Ok(result)
}

/// Scaled empirical variance of the robust Mahalanobis distance deviation,
/// centered on the coupled SCM distance and on the true-scatter distance.
pub fn run_fig3(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    init_thread_pool();
    cfg.validate()?;
    let mut result = ExperimentResult::new(cfg);
    let m = cfg.m;
    let (model, w) = match cfg.estimator {
        PanelEstimator::Tyler => (CESModel::StudentT { nu: cfg.nu }, WeightSpec::new(WeightKind::Tyler, m)?),
        PanelEstimator::Huber => (
            CESModel::GaussianOutlierMixture { nu: cfg.nu, contamination: cfg.contamination },
            WeightSpec::new(WeightKind::Huber { q: cfg.q }, m)?,
        ),
    };
    let scatter_true = toeplitz_scatter(cfg.rho, m)?;
    let base = RngStream::new(cfg.seed);
    let sigma = consistency_sigma(&w, &model, m, base.child(TAG_SIGMA))?;
    let coeffs = match cfg.estimator {
        PanelEstimator::Tyler => coeffs_closed_form(&w, &model, m)?,
        PanelEstimator::Huber => coeffs_monte_carlo(&w, &model, m, COEFF_MC_DRAWS, base.child(TAG_COEFFS))?,
    };
    let phi = coeffs.sigma1 + coeffs.sigma2;
    let theta_sum = coeffs.theta1 + coeffs.theta2;

    // Fixed test point, drawn once per experiment from the data model.
    let z_fixed = sample_coupled_batch(&model, &scatter_true, 1, base.child(TAG_TESTPOINT))?
        .z
        .swap_remove(0);

    let grid = cfg.k_grid.clone().unwrap_or_else(ExperimentConfig::default_fig3_k_grid);
    let runs = cfg.runs.unwrap_or(10_000);
    for (g, &k) in grid.iter().enumerate() {
        let trials: Vec<(f64, f64)> = run_trials(runs, |i| {
            let stream = trial_stream(cfg.seed, g, i);
            let z_trial;
            let z = match cfg.z_mode {
                ZMode::Fixed => &z_fixed,
                ZMode::Marginal => {
                    z_trial =
                        sample_coupled_batch(&model, &scatter_true, 1, stream.child(1))?.z.swap_remove(0);
                    &z_trial
                }
            };
            let batch = sample_coupled_batch(&model, &scatter_true, k, stream.child(2))?;
            let rep = converged_estimate(&batch.z, &w)?;
            let m_scm = scm(&batch.x)?;
            let vs_scm = scaled_distance_deviation(z, &rep.estimate, sigma, &m_scm, &scatter_true, k)?;
            let vs_true =
                scaled_distance_deviation(z, &rep.estimate, sigma, &scatter_true, &scatter_true, k)?;
            Ok((vs_scm, vs_true))
        })?;
        let scm_stats: Vec<f64> = trials.iter().map(|t| t.0).collect();
        let true_stats: Vec<f64> = trials.iter().map(|t| t.1).collect();
        let (var_scm, se_scm) = variance_se(&scm_stats);
        let (var_true, se_true) = variance_se(&true_stats);
        result.rows.push(Row {
            grid: k as f64,
            quantity: "var_robust_vs_scm".into(),
            empirical: var_scm,
            stderr: se_scm,
            theory: Some(phi),
        });
        result.rows.push(Row {
            grid: k as f64,
            quantity: "var_robust_vs_true".into(),
            empirical: var_true,
            stderr: se_true,
            theory: Some(theta_sum),
        });
    }
    result.metadata.notes.insert("sigma".into(), sigma.to_string());
    result.metadata.notes.insert("phi_theory".into(), phi.to_string());
    result.metadata.notes.insert("runs".into(), runs.to_string());
    Ok(result)
}

/// Distribution of the robust squared Mahalanobis distance at small K:
/// histogram against the scaled Beta prime and scaled chi-square laws,
/// with both KS statistics.
pub fn run_fig4(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    init_thread_pool();
    cfg.validate()?;
    let mut result = ExperimentResult::new(cfg);
    let m = cfg.m;
    let k = cfg.k;
    let model = CESModel::StudentT { nu: cfg.nu };
    let w = WeightSpec::new(WeightKind::StudentT { nu: cfg.nu }, m)?;
    let scatter_true = toeplitz_scatter(cfg.rho, m)?;
    let runs = cfg.runs.unwrap_or(10_000);

    let distances: Vec<f64> = run_trials(runs, |i| {
        let stream = trial_stream(cfg.seed, 0, i);
        let z = match cfg.test_point {
            TestPointLaw::Model => {
                sample_coupled_batch(&model, &scatter_true, 1, stream.child(1))?.z.swap_remove(0)
            }
            TestPointLaw::Clean => {
                sample_coupled_batch(&CESModel::Gaussian, &scatter_true, 1, stream.child(1))?
                    .z
                    .swap_remove(0)
            }
        };
        let batch = sample_coupled_batch(&model, &scatter_true, k, stream.child(2))?;
        let rep = converged_estimate(&batch.z, &w)?;
        Ok(mahalanobis_sq(&z, &rep.estimate)?)
    })?;

    let beta_prime = scatter::mahalanobis::ref_distribution(RefDistribution::ScaledBetaPrime { m, k })?;
    let chi = scatter::mahalanobis::ref_distribution(RefDistribution::ScaledChiSq { m })?;
    let ks_bp = ks_statistic(&distances, &beta_prime)?;
    let ks_chi = ks_statistic(&distances, &chi)?;
    // Asymptotic null sd of the one-sample KS statistic.
    let ks_se = 0.26 / (runs as f64).sqrt();

    let max = distances.iter().cloned().fold(0.0f64, f64::max);
    let width = max / cfg.bins as f64;
    let mut counts = vec![0usize; cfg.bins];
    for &d in &distances {
        let idx = ((d / width) as usize).min(cfg.bins - 1);
        counts[idx] += 1;
    }
    for (b, &count) in counts.iter().enumerate() {
        let center = (b as f64 + 0.5) * width;
        let density = count as f64 / (runs as f64 * width);
        let p = count as f64 / runs as f64;
        let se = (p * (1.0 - p) / runs as f64).sqrt() / width;
        result.rows.push(Row {
            grid: center,
            quantity: "delta2_density".into(),
            empirical: density,
            stderr: se,
            theory: Some(beta_prime.pdf(center)),
        });
        result.rows.push(Row {
            grid: center,
            quantity: "delta2_density_vs_chisq".into(),
            empirical: density,
            stderr: se,
            theory: Some(chi.pdf(center)),
        });
    }
    result.rows.push(Row {
        grid: 0.0,
        quantity: "ks_scaled_beta_prime".into(),
        empirical: ks_bp,
        stderr: ks_se,
        theory: None,
    });
    result.rows.push(Row {
        grid: 0.0,
        quantity: "ks_scaled_chisq".into(),
        empirical: ks_chi,
        stderr: ks_se,
        theory: None,
    });
    let (mean, mean_se_v) = mean_se(&distances);
    result.rows.push(Row {
        grid: 0.0,
        quantity: "delta2_mean".into(),
        empirical: mean,
        stderr: mean_se_v,
        theory: Some(beta_prime.mean()),
    });
    result.metadata.notes.insert("runs".into(), runs.to_string());
    result.metadata.notes.insert("bin_width".into(), width.to_string());
    Ok(result)
}

/// Dispatch an experiment config to its runner.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    match cfg.experiment {
        Experiment::Fig1 => run_fig1(cfg),
        Experiment::Fig2a | Experiment::Fig2b => run_fig2(cfg),
        Experiment::Fig3 => run_fig3(cfg),
        Experiment::Fig4 => run_fig4(cfg),
    }
}
