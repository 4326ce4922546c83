//! Coefficient tables for the `coeffs` subcommand: closed form where
//! available, Monte Carlo otherwise, with replicate-based standard errors
//! for the Monte Carlo route.

use crate::experiments::{ExperimentResult, Metadata, Row};
use crate::{HarnessError, Result};
use scatter::asymptotics::{coeffs_closed_form, coeffs_monte_carlo, AsymCoeffs, CoeffSource};
use scatter::ces::{CESModel, RngStream};
use scatter::estimators::WeightSpec;
use scatter::Error;
use std::collections::BTreeMap;

/// Number of independent replicates used to attach standard errors to
/// Monte Carlo coefficient estimates.
const REPLICATES: usize = 8;

type Getter = fn(&AsymCoeffs) -> f64;

pub struct CoeffsRequest {
    pub weight: WeightSpec,
    pub model: CESModel,
    pub m: usize,
    pub mc_draws: usize,
    pub seed: u64,
}

pub struct CoeffsOutput {
    pub coeffs: AsymCoeffs,
    pub rows: Vec<Row>,
    /// Standard errors keyed like the row quantities (empty for closed form).
    pub stderr: BTreeMap<String, f64>,
}

/// Compute the coefficient set, preferring the closed form and falling
/// back to Monte Carlo when none exists for the pair.
pub fn coeffs_table(req: &CoeffsRequest) -> Result<CoeffsOutput> {
    let closed = coeffs_closed_form(&req.weight, &req.model, req.m);
    let (coeffs, stderr) = match closed {
        Ok(c) => (c, BTreeMap::new()),
        Err(Error::Unsupported(_)) => {
            let base = RngStream::new(req.seed);
            let point = coeffs_monte_carlo(&req.weight, &req.model, req.m, req.mc_draws, base.child(1))?;
            // Replicates at n/REPLICATES draws each estimate the spread of
            // disjoint-seed reruns; dividing by sqrt(REPLICATES) rescales to
            // the full-n standard error.
            let rep_draws = (req.mc_draws / REPLICATES).max(100);
            let mut reps: Vec<AsymCoeffs> = Vec::with_capacity(REPLICATES);
            for r in 0..REPLICATES {
                reps.push(coeffs_monte_carlo(
                    &req.weight,
                    &req.model,
                    req.m,
                    rep_draws,
                    base.child(100 + r as u64),
                )?);
            }
            let mut se = BTreeMap::new();
            let fields: [(&str, Getter); 11] = [
                ("sigma", |c| c.sigma),
                ("a", |c| c.a),
                ("b", |c| c.b),
                ("c", |c| c.c),
                ("theta1", |c| c.theta1),
                ("theta2", |c| c.theta2),
                ("gamma1", |c| c.gamma1),
                ("gamma2", |c| c.gamma2),
                ("sigma1", |c| c.sigma1),
                ("sigma2", |c| c.sigma2),
                ("phi", |c| c.sigma1 + c.sigma2),
            ];
            for (name, get) in fields {
                let vals: Vec<f64> = reps.iter().map(get).collect();
                let mean = vals.iter().sum::<f64>() / vals.len() as f64;
                let var =
                    vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (vals.len() as f64 - 1.0);
                se.insert(name.to_string(), (var / REPLICATES as f64).sqrt());
            }
            (point, se)
        }
        Err(e) => return Err(HarnessError::Numeric(e)),
    };

    let mut rows = Vec::new();
    let entries: [(&str, f64); 11] = [
        ("sigma", coeffs.sigma),
        ("a", coeffs.a),
        ("b", coeffs.b),
        ("c", coeffs.c),
        ("theta1", coeffs.theta1),
        ("theta2", coeffs.theta2),
        ("gamma1", coeffs.gamma1),
        ("gamma2", coeffs.gamma2),
        ("sigma1", coeffs.sigma1),
        ("sigma2", coeffs.sigma2),
        ("phi", coeffs.sigma1 + coeffs.sigma2),
    ];
    for (name, value) in entries {
        rows.push(Row {
            grid: req.m as f64,
            quantity: name.to_string(),
            empirical: value,
            stderr: stderr.get(name).copied().unwrap_or(0.0),
            theory: None,
        });
    }
    Ok(CoeffsOutput { coeffs, rows, stderr })
}

/// Human-readable table plus a result envelope for file output.
pub fn coeffs_result(req: &CoeffsRequest, cfg_echo: crate::config::ExperimentConfig) -> Result<(CoeffsOutput, ExperimentResult)> {
    let out = coeffs_table(req)?;
    let source = match out.coeffs.source {
        CoeffSource::ClosedForm => "closed_form".to_string(),
        CoeffSource::MonteCarlo { draws, seed } => format!("monte_carlo(draws={draws},seed={seed})"),
    };
    let mut notes = BTreeMap::new();
    notes.insert("source".into(), source);
    let result = ExperimentResult {
        rows: out.rows.clone(),
        metadata: Metadata {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: cfg_echo,
            notes,
        },
    };
    Ok((out, result))
}
