//! Experiment configuration and validation.

use crate::{HarnessError, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Fig1,
    Fig2a,
    Fig2b,
    Fig3,
    Fig4,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig1 => "fig1",
            Experiment::Fig2a => "fig2a",
            Experiment::Fig2b => "fig2b",
            Experiment::Fig3 => "fig3",
            Experiment::Fig4 => "fig4",
        }
    }
}

/// Robust estimator driving an experiment panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PanelEstimator {
    Tyler,
    Huber,
}

/// Test-point handling for the distance experiments: held fixed across
/// trials, or redrawn each trial (marginal mode).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZMode {
    Fixed,
    Marginal,
}

/// Law of the distance test point: the data model itself, or the clean
/// Gaussian sharing the same scatter matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestPointLaw {
    Model,
    Clean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Full experiment configuration. Defaults mirror the reference runs:
/// `nu = 2`, `rho = 0`, `q = 0.95`, 5% contamination, `K = 1000`.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub m: usize,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_grid: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_grid: Option<Vec<usize>>,
    pub nu: f64,
    pub rho: f64,
    pub q: f64,
    pub contamination: f64,
    /// Monte Carlo runs; `None` selects the experiment default
    /// (`10 K` per grid point for the convergence sweep, `1e4` otherwise).
    pub runs: Option<usize>,
    pub seed: u64,
    pub estimator: PanelEstimator,
    pub z_mode: ZMode,
    pub test_point: TestPointLaw,
    pub bins: usize,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        let (m, k) = match experiment {
            Experiment::Fig1 => (5, 1000),
            Experiment::Fig2a | Experiment::Fig2b => (10, 1000),
            Experiment::Fig3 => (10, 1000),
            Experiment::Fig4 => (10, 100),
        };
        Self {
            experiment,
            m,
            k,
            k_grid: None,
            m_grid: None,
            nu: 2.0,
            rho: 0.0,
            q: 0.95,
            contamination: 0.05,
            runs: None,
            seed: 0,
            estimator: PanelEstimator::Tyler,
            z_mode: ZMode::Fixed,
            test_point: TestPointLaw::Model,
            bins: 60,
        }
    }

    /// Default K sweep for the convergence experiment: 36 points spaced
    /// geometrically from 10 to 4924.
    pub fn default_fig1_k_grid() -> Vec<usize> {
        let lo = 10.0f64;
        let hi = 4924.0f64;
        let n = 36;
        let ratio = (hi / lo).powf(1.0 / (n as f64 - 1.0));
        let mut grid: Vec<usize> = (0..n).map(|i| (lo * ratio.powi(i)).round() as usize).collect();
        grid.dedup();
        grid
    }

    /// Default dimension sweep: 3, 5, 10, 20, ..., 100.
    pub fn default_fig2_m_grid() -> Vec<usize> {
        let mut grid = vec![3, 5, 10];
        grid.extend((2..=10).map(|i| i * 10));
        grid
    }

    /// Default K sweep for the distance-variance experiment.
    pub fn default_fig3_k_grid() -> Vec<usize> {
        vec![20, 53, 141, 376, 1000]
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(HarnessError::Config(format!("m must be >= 2, got {}", self.m)));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(HarnessError::Config(format!("nu must be positive and finite, got {}", self.nu)));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(HarnessError::Config(format!("rho must be in [0,1), got {}", self.rho)));
        }
        if !(0.0 < self.q && self.q < 1.0) {
            return Err(HarnessError::Config(format!("q must be in (0,1), got {}", self.q)));
        }
        if !(0.0 < self.contamination && self.contamination < 1.0) {
            return Err(HarnessError::Config(format!(
                "contamination must be in (0,1), got {}",
                self.contamination
            )));
        }
        if let Some(runs) = self.runs {
            if runs < 100 {
                return Err(HarnessError::Config(format!(
                    "figure experiments need runs >= 100, got {runs}"
                )));
            }
        }
        if self.bins < 2 {
            return Err(HarnessError::Config(format!("bins must be >= 2, got {}", self.bins)));
        }
        let check_k = |k: usize| -> Result<()> {
            if k <= self.m {
                return Err(HarnessError::Config(format!("need K > m, got K={k} m={}", self.m)));
            }
            Ok(())
        };
        match self.experiment {
            Experiment::Fig1 | Experiment::Fig3 => {
                for &k in self.k_grid.as_deref().unwrap_or(&[self.k]) {
                    check_k(k)?;
                }
            }
            Experiment::Fig2a | Experiment::Fig2b => {
                if self.rho != 0.0 {
                    return Err(HarnessError::Config(
                        "the d2 extraction of the dimension sweep requires an identity scatter (rho = 0)"
                            .into(),
                    ));
                }
                for &m in self.m_grid.as_deref().unwrap_or(&[self.m]) {
                    if m < 2 {
                        return Err(HarnessError::Config(format!("m grid entries must be >= 2, got {m}")));
                    }
                    if self.k <= m {
                        return Err(HarnessError::Config(format!(
                            "need K > m for every grid entry, got K={} m={m}",
                            self.k
                        )));
                    }
                }
            }
            Experiment::Fig4 => check_k(self.k)?,
        }
        Ok(())
    }
}
