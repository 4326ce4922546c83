//! Experiment driver for the scatter estimation library: coupled Monte
//! Carlo sweeps with reproducible seeding and CSV/JSON outputs.
//!
//! Trials are embarrassingly parallel. Each trial draws from its own
//! counter-based RNG stream keyed by `(seed, grid index, trial index)` and
//! results are merged in trial order, so outputs are byte-identical for a
//! given config and seed regardless of worker count (`SCATTER_THREADS`
//! caps the pool).

pub mod coeffs;
pub mod config;
pub mod experiments;
pub mod io;

use std::fmt;
use std::sync::Once;

/// Harness-level errors: configuration problems exit with code 2, numeric
/// and I/O failures with code 1.
#[derive(Debug)]
pub enum HarnessError {
    Config(String),
    Numeric(scatter::Error),
    Io(std::io::Error),
    Format(String),
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Config(msg) => write!(f, "configuration error: {msg}"),
            HarnessError::Numeric(e) => write!(f, "numeric failure: {e}"),
            HarnessError::Io(e) => write!(f, "io error: {e}"),
            HarnessError::Format(msg) => write!(f, "format error: {msg}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<scatter::Error> for HarnessError {
    fn from(e: scatter::Error) -> Self {
        HarnessError::Numeric(e)
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e)
    }
}

impl HarnessError {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            _ => 1,
        }
    }

    /// Machine-readable error record for stderr.
    pub fn error_record(&self) -> String {
        let kind = match self {
            HarnessError::Config(_) => "config",
            HarnessError::Numeric(_) => "numeric",
            HarnessError::Io(_) => "io",
            HarnessError::Format(_) => "format",
        };
        format!("{{\"error\":{{\"kind\":\"{}\",\"message\":{}}}}}", kind, json_escape(&self.to_string()))
    }
}

fn json_escape(s: &str) -> String {
    serde_json::to_string(s).unwrap_or_else(|_| "\"<unprintable>\"".into())
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Apply the `SCATTER_THREADS` worker cap once per process.
pub fn init_thread_pool() {
    static INIT: Once = Once::new();
    INIT.call_once(|| {
        if let Ok(v) = std::env::var("SCATTER_THREADS") {
            if let Ok(n) = v.parse::<usize>() {
                if n >= 1 {
                    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
                }
            }
        }
    });
}
