//! Experiment-grid runner for selscope: configuration, parallel replicate
//! execution with per-replicate CSV output, and statistical analysis of the
//! results.

pub mod analyze;
pub mod config;
mod error;
pub mod runner;

pub use analyze::{analyze, AnalysisReport, AnalyzeOptions, ComparisonRow, Metric};
pub use config::{parse_config, ExperimentConfig};
pub use error::CliError;
pub use runner::{run_experiment, RunSummary};

use selscope::diagnostics::DiagnosticKind;
use selscope::selection::SchemeKind;

/// The diagnostic and scheme catalogs as printable text.
pub fn describe() -> String {
    let mut out = String::from("Diagnostics:\n");
    for d in DiagnosticKind::ALL {
        out += &format!("  {:<34}{}\n", d.name(), d.description());
    }
    out += "\nSelection schemes:\n";
    for s in SchemeKind::ALL {
        out += &format!("  {:<34}{}\n", s.name(), s.description());
    }
    out
}
