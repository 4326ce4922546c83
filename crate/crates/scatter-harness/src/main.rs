//! Command-line driver for the scatter experiments.

use clap::{Args, Parser, Subcommand, ValueEnum};
use scatter::ces::{sample_coupled_batch, CESModel, RngStream};
use scatter::estimators::{m_estimate, WeightKind, WeightSpec, DEFAULT_MAX_ITER, DEFAULT_TOL};
use scatter::numkit::toeplitz_scatter;
use scatter_harness::config::{Experiment, ExperimentConfig, OutputFormat, PanelEstimator, TestPointLaw, ZMode};
use scatter_harness::experiments::{run_experiment, ExperimentResult};
use scatter_harness::{coeffs, io, HarnessError};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "scatter",
    version,
    about = "Robust scatter-matrix estimation experiments: coupled Monte Carlo sweeps, coefficient tables, estimation on sample files"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Convergence of the empirical deviation covariance over a K sweep
    Fig1(FigArgs),
    /// d2 entry class versus dimension, Student-t data (Tyler + Student)
    Fig2a(FigArgs),
    /// d2 entry class versus dimension, contaminated data (Tyler + Huber)
    Fig2b(FigArgs),
    /// Scaled variance of the robust Mahalanobis distance over a K sweep
    Fig3(Fig3Args),
    /// Distribution of the robust Mahalanobis distance at small K
    Fig4(Fig4Args),
    /// Print the asymptotic coefficient table for an estimator/model pair
    Coeffs(CoeffsArgs),
    /// Estimate a scatter matrix from a sample file
    Estimate(EstimateArgs),
    /// Draw samples from a CES model and write them to a file
    Sample(SampleArgs),
}

#[derive(Args, Clone)]
struct FigArgs {
    /// Data dimension
    #[arg(long)]
    m: Option<usize>,
    /// Samples per trial
    #[arg(long = "K")]
    k: Option<usize>,
    /// Student-t degrees of freedom (data model / outliers)
    #[arg(long)]
    nu: Option<f64>,
    /// Toeplitz correlation of the true scatter matrix
    #[arg(long)]
    rho: Option<f64>,
    /// Huber clipping quantile
    #[arg(long)]
    q: Option<f64>,
    /// Outlier fraction for the mixture model
    #[arg(long)]
    contamination: Option<f64>,
    /// Monte Carlo runs (default: 10*K per point for fig1, 10000 otherwise)
    #[arg(long)]
    runs: Option<usize>,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated K grid (fig1/fig3)
    #[arg(long = "k-grid", value_delimiter = ',')]
    k_grid: Option<Vec<usize>>,
    /// Comma-separated m grid (fig2 panels)
    #[arg(long = "m-grid", value_delimiter = ',')]
    m_grid: Option<Vec<usize>>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Args, Clone)]
struct Fig3Args {
    #[command(flatten)]
    common: FigArgs,
    /// Panel estimator
    #[arg(long, value_enum, default_value = "tyler")]
    estimator: EstimatorArg,
    /// Test point handling: fixed across trials, or redrawn per trial
    #[arg(long = "z-mode", value_enum, default_value = "fixed")]
    z_mode: ZModeArg,
}

#[derive(Args, Clone)]
struct Fig4Args {
    #[command(flatten)]
    common: FigArgs,
    /// Law of the test point: the data model, or clean Gaussian
    #[arg(long = "test-point", value_enum, default_value = "model")]
    test_point: TestPointArg,
    /// Histogram bins
    #[arg(long, default_value_t = 60)]
    bins: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Tyler,
    Huber,
    Student,
    Scm,
}

#[derive(Clone, Copy, ValueEnum)]
enum ZModeArg {
    Fixed,
    Marginal,
}

#[derive(Clone, Copy, ValueEnum)]
enum TestPointArg {
    Model,
    Clean,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Gaussian,
    Student,
    Mixture,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleFormatArg {
    Bin,
    Csv,
}

#[derive(Args, Clone)]
struct CoeffsArgs {
    /// Estimator family
    #[arg(long, value_enum)]
    estimator: EstimatorArg,
    /// Dimension
    #[arg(long)]
    m: usize,
    /// Degrees of freedom (Student weight and/or Student data)
    #[arg(long)]
    nu: Option<f64>,
    /// Huber clipping quantile
    #[arg(long, default_value_t = 0.95)]
    q: f64,
    /// Data model (defaults to the estimator's natural model)
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    /// Outlier fraction for the mixture model
    #[arg(long, default_value_t = 0.05)]
    contamination: f64,
    /// Monte Carlo draws when no closed form exists
    #[arg(long = "mc-draws", default_value_t = 1_000_000)]
    mc_draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Args, Clone)]
struct EstimateArgs {
    /// Sample file (binary with SCATSAM1 magic, or CSV of re,im pairs)
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    estimator: EstimatorArg,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long, default_value_t = 0.95)]
    q: f64,
    /// Relative Frobenius convergence tolerance
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long = "max-iter", default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Output path for the JSON report (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SampleArgs {
    #[arg(long, value_enum, default_value = "gaussian")]
    model: ModelArg,
    #[arg(long, default_value_t = 10)]
    m: usize,
    #[arg(long = "K", default_value_t = 1000)]
    k: usize,
    #[arg(long, default_value_t = 2.0)]
    nu: f64,
    #[arg(long, default_value_t = 0.05)]
    contamination: f64,
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Destination file
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "bin")]
    format: SampleFormatArg,
}

fn main() {
    let cli = Cli::parse();
    scatter_harness::init_thread_pool();
    let started = Instant::now();
    let outcome = match cli.cmd {
        Cmd::Fig1(a) => run_figure(Experiment::Fig1, a, None, None),
        Cmd::Fig2a(a) => run_figure(Experiment::Fig2a, a, None, None),
        Cmd::Fig2b(a) => run_figure(Experiment::Fig2b, a, None, None),
        Cmd::Fig3(a) => {
            let est = a.estimator;
            let zm = a.z_mode;
            run_figure(Experiment::Fig3, a.common, Some((est, zm)), None)
        }
        Cmd::Fig4(a) => {
            let tp = a.test_point;
            let bins = a.bins;
            run_figure(Experiment::Fig4, a.common, None, Some((tp, bins)))
        }
        Cmd::Coeffs(a) => run_coeffs(a),
        Cmd::Estimate(a) => run_estimate(a),
        Cmd::Sample(a) => run_sample(a),
    };
    match outcome {
        Ok(()) => {
            eprintln!("done in {:.1}s", started.elapsed().as_secs_f64());
        }
        Err(e) => {
            eprintln!("{}", e.error_record());
            std::process::exit(e.exit_code());
        }
    }
}

fn build_config(
    experiment: Experiment,
    args: &FigArgs,
    fig3: Option<(EstimatorArg, ZModeArg)>,
    fig4: Option<(TestPointArg, usize)>,
) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = ExperimentConfig::new(experiment);
    if let Some(m) = args.m {
        cfg.m = m;
        if matches!(experiment, Experiment::Fig2a | Experiment::Fig2b) && args.m_grid.is_none() {
            cfg.m_grid = Some(vec![m]);
        }
    }
    if let Some(k) = args.k {
        cfg.k = k;
        if matches!(experiment, Experiment::Fig1 | Experiment::Fig3) && args.k_grid.is_none() {
            cfg.k_grid = Some(vec![k]);
        }
    }
    if let Some(nu) = args.nu {
        cfg.nu = nu;
    }
    if let Some(rho) = args.rho {
        cfg.rho = rho;
    }
    if let Some(q) = args.q {
        cfg.q = q;
    }
    if let Some(c) = args.contamination {
        cfg.contamination = c;
    }
    cfg.runs = args.runs;
    cfg.seed = args.seed;
    cfg.k_grid = args.k_grid.clone().or(cfg.k_grid);
    cfg.m_grid = args.m_grid.clone().or(cfg.m_grid);
    if let Some((est, zm)) = fig3 {
        cfg.estimator = match est {
            EstimatorArg::Tyler => PanelEstimator::Tyler,
            EstimatorArg::Huber => PanelEstimator::Huber,
            _ => {
                return Err(HarnessError::Config(
                    "fig3 panels are defined for the tyler and huber estimators".into(),
                ))
            }
        };
        cfg.z_mode = match zm {
            ZModeArg::Fixed => ZMode::Fixed,
            ZModeArg::Marginal => ZMode::Marginal,
        };
    }
    if let Some((tp, bins)) = fig4 {
        cfg.test_point = match tp {
            TestPointArg::Model => TestPointLaw::Model,
            TestPointArg::Clean => TestPointLaw::Clean,
        };
        cfg.bins = bins;
    }
    Ok(cfg)
}

fn run_figure(
    experiment: Experiment,
    args: FigArgs,
    fig3: Option<(EstimatorArg, ZModeArg)>,
    fig4: Option<(TestPointArg, usize)>,
) -> Result<(), HarnessError> {
    let cfg = build_config(experiment, &args, fig3, fig4)?;
    let result = run_experiment(&cfg)?;
    emit_result(&result, args.out.as_deref(), args.format)
}

fn emit_result(
    result: &ExperimentResult,
    out: Option<&std::path::Path>,
    format: OutputFormat,
) -> Result<(), HarnessError> {
    let rendered = match format {
        OutputFormat::Csv => io::result_to_csv(result),
        OutputFormat::Json => io::result_to_json(result)?,
    };
    match out {
        Some(path) => std::fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn weight_from_args(
    estimator: EstimatorArg,
    m: usize,
    nu: Option<f64>,
    q: f64,
) -> Result<WeightSpec, HarnessError> {
    let kind = match estimator {
        EstimatorArg::Tyler => WeightKind::Tyler,
        EstimatorArg::Scm => WeightKind::Scm,
        EstimatorArg::Huber => WeightKind::Huber { q },
        EstimatorArg::Student => WeightKind::StudentT {
            nu: nu.ok_or_else(|| HarnessError::Config("the student estimator needs --nu".into()))?,
        },
    };
    Ok(WeightSpec::new(kind, m)?)
}

fn model_from_args(
    model: Option<ModelArg>,
    estimator: EstimatorArg,
    nu: Option<f64>,
    contamination: f64,
) -> Result<CESModel, HarnessError> {
    let chosen = model.unwrap_or(match estimator {
        EstimatorArg::Student => ModelArg::Student,
        _ => ModelArg::Gaussian,
    });
    Ok(match chosen {
        ModelArg::Gaussian => CESModel::Gaussian,
        ModelArg::Student => CESModel::StudentT {
            nu: nu.ok_or_else(|| HarnessError::Config("the student model needs --nu".into()))?,
        },
        ModelArg::Mixture => CESModel::GaussianOutlierMixture {
            nu: nu.unwrap_or(2.0),
            contamination,
        },
    })
}

fn run_coeffs(args: CoeffsArgs) -> Result<(), HarnessError> {
    let weight = weight_from_args(args.estimator, args.m, args.nu, args.q)?;
    let model = model_from_args(args.model, args.estimator, args.nu, args.contamination)?;
    let req = coeffs::CoeffsRequest {
        weight,
        model,
        m: args.m,
        mc_draws: args.mc_draws,
        seed: args.seed,
    };
    let mut cfg_echo = ExperimentConfig::new(Experiment::Fig2a);
    cfg_echo.m = args.m;
    cfg_echo.nu = args.nu.unwrap_or(cfg_echo.nu);
    cfg_echo.q = args.q;
    cfg_echo.contamination = args.contamination;
    cfg_echo.seed = args.seed;
    let (out, result) = coeffs::coeffs_result(&req, cfg_echo)?;
    println!("coefficient table (m = {}):", args.m);
    for row in &out.rows {
        match out.stderr.get(&row.quantity) {
            Some(se) if *se > 0.0 => println!("  {:>7} = {:<22} (se {:.3e})", row.quantity, row.empirical, se),
            _ => println!("  {:>7} = {}", row.quantity, row.empirical),
        }
    }
    if let Some(path) = args.out.as_deref() {
        emit_result(&result, Some(path), args.format)?;
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct EstimateReport {
    estimator: String,
    m: usize,
    k: usize,
    iterations: usize,
    residual: f64,
    converged: bool,
    /// Row-major entries as (re, im) pairs.
    matrix: Vec<Vec<(f64, f64)>>,
}

fn run_estimate(args: EstimateArgs) -> Result<(), HarnessError> {
    let samples = io::read_samples(&args.input)?;
    let m = samples[0].dim();
    let weight = weight_from_args(args.estimator, m, args.nu, args.q)?;
    let report = m_estimate(&samples, &weight, args.tol, args.max_iter)?;
    let matrix: Vec<Vec<(f64, f64)>> = (0..m)
        .map(|i| (0..m).map(|j| (report.estimate.get(i, j).re, report.estimate.get(i, j).im)).collect())
        .collect();
    let out = EstimateReport {
        estimator: format!("{:?}", weight.kind()),
        m,
        k: samples.len(),
        iterations: report.iterations,
        residual: report.residual,
        converged: report.converged,
        matrix,
    };
    let mut rendered = serde_json::to_string_pretty(&out)
        .map_err(|e| HarnessError::Format(format!("json encoding failed: {e}")))?;
    rendered.push('\n');
    match args.out.as_deref() {
        Some(path) => std::fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    if !report.converged {
        return Err(HarnessError::Numeric(scatter::Error::Solver(format!(
            "fixed point did not converge within {} iterations (residual {:.3e})",
            args.max_iter, report.residual
        ))));
    }
    Ok(())
}

fn run_sample(args: SampleArgs) -> Result<(), HarnessError> {
    let model = match args.model {
        ModelArg::Gaussian => CESModel::Gaussian,
        ModelArg::Student => CESModel::StudentT { nu: args.nu },
        ModelArg::Mixture => CESModel::GaussianOutlierMixture {
            nu: args.nu,
            contamination: args.contamination,
        },
    };
    let scatter = toeplitz_scatter(args.rho, args.m).map_err(HarnessError::Numeric)?;
    let batch = sample_coupled_batch(&model, &scatter, args.k, RngStream::new(args.seed))
        .map_err(HarnessError::Numeric)?;
    match args.format {
        SampleFormatArg::Bin => io::write_samples_binary(&args.out, &batch.z)?,
        SampleFormatArg::Csv => io::write_samples_csv(&args.out, &batch.z)?,
    }
    eprintln!(
        "wrote {} samples of dimension {} to {} (model {:?}, seed {})",
        args.k,
        args.m,
        args.out.display(),
        model,
        args.seed
    );
    Ok(())
}
