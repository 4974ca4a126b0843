//! Treatment-grid execution and result persistence.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use selscope::diagnostics::DiagnosticKind;
use selscope::evolve::run_replicate;
use selscope::metrics::GenerationRecord;
use selscope::selection::SchemeKind;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const MANIFEST_NAME: &str = "manifest.txt";

pub const CSV_HEADER: [&str; 7] = [
    "generation",
    "best_performance",
    "best_total_fitness",
    "satisfactory_trait_coverage",
    "activation_gene_coverage",
    "largest_valley_reached",
    "archive_size",
];

/// One CSV row. `None` fields are written as empty strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub generation: usize,
    pub best_performance: f64,
    pub best_total_fitness: f64,
    pub satisfactory_trait_coverage: usize,
    pub activation_gene_coverage: Option<usize>,
    pub largest_valley_reached: Option<usize>,
    pub archive_size: Option<usize>,
}

impl From<&GenerationRecord> for CsvRow {
    fn from(r: &GenerationRecord) -> Self {
        Self {
            generation: r.generation,
            best_performance: r.best_performance,
            best_total_fitness: r.best_total_fitness,
            satisfactory_trait_coverage: r.satisfactory_trait_coverage,
            activation_gene_coverage: r.activation_gene_coverage,
            largest_valley_reached: r.largest_valley_reached,
            archive_size: r.archive_size,
        }
    }
}

/// One (diagnostic, scheme, replicate) cell of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Job {
    pub diagnostic: DiagnosticKind,
    pub scheme: SchemeKind,
    pub replicate: usize,
}

impl Job {
    pub fn file_name(&self) -> String {
        replicate_file_name(self.diagnostic, self.scheme, self.replicate)
    }
}

pub fn replicate_file_name(diagnostic: DiagnosticKind, scheme: SchemeKind, replicate: usize) -> String {
    format!("{diagnostic}__{scheme}__rep{replicate}.csv")
}

/// Inverse of [`replicate_file_name`].
pub fn parse_file_name(name: &str) -> Option<(DiagnosticKind, SchemeKind, usize)> {
    let stem = name.strip_suffix(".csv")?;
    let mut parts = stem.split("__");
    let d = parts.next()?.parse().ok()?;
    let s = parts.next()?.parse().ok()?;
    let r = parts.next()?.strip_prefix("rep")?.parse().ok()?;
    parts.next().is_none().then_some((d, s, r))
}

/// Every job in the grid, diagnostic-major.
pub fn jobs(cfg: &ExperimentConfig) -> Vec<Job> {
    let mut out = Vec::with_capacity(cfg.diagnostics.len() * cfg.schemes.len() * cfg.replicates);
    for &diagnostic in &cfg.diagnostics {
        for &scheme in &cfg.schemes {
            for replicate in 0..cfg.replicates {
                out.push(Job {
                    diagnostic,
                    scheme,
                    replicate,
                });
            }
        }
    }
    out
}

pub fn write_records<W: Write>(out: W, records: &[GenerationRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CsvRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows(path: &Path) -> Result<Vec<CsvRow>, CliError> {
    let csv_err = |e: csv::Error| CliError::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = r.headers().map_err(csv_err)?;
    if header.iter().ne(CSV_HEADER) {
        return Err(CliError::Csv {
            path: path.to_path_buf(),
            message: format!("unexpected header, expected {}", CSV_HEADER.join(",")),
        });
    }
    r.deserialize().collect::<Result<_, _>>().map_err(csv_err)
}

/// Outcome of one job.
#[derive(Debug, Clone, PartialEq)]
pub struct JobOutcome {
    pub job: Job,
    pub seed: u64,
    pub path: PathBuf,
    /// `None` on success.
    pub error: Option<String>,
}

fn run_job(cfg: &ExperimentConfig, job: Job) -> JobOutcome {
    let rc = cfg.replicate_config(job.diagnostic, job.scheme, job.replicate);
    let seed = rc.seed;
    let path = cfg.output_dir.join(job.file_name());
    let error = (|| -> Result<(), String> {
        let result = run_replicate(rc).map_err(|e| e.to_string())?;
        let file = File::create(&path).map_err(|e| e.to_string())?;
        write_records(BufWriter::new(file), &result.records).map_err(|e| e.to_string())
    })()
    .err();
    JobOutcome { job, seed, path, error }
}

fn write_manifest(cfg: &ExperimentConfig, outcomes: &[JobOutcome]) -> Result<PathBuf, CliError> {
    let path = cfg.output_dir.join(MANIFEST_NAME);
    let io = |e| CliError::io(&path, e);
    let mut w = BufWriter::new(File::create(&path).map_err(io)?);
    let failed = outcomes.iter().filter(|o| o.error.is_some()).count();
    if failed > 0 {
        writeln!(w, "# PARTIAL: {failed} of {} replicates failed", outcomes.len()).map_err(io)?;
    }
    write!(w, "{}", cfg.to_text()).map_err(io)?;
    writeln!(w, "\n# file,seed,status").map_err(io)?;
    for o in outcomes {
        let status = o.error.as_deref().unwrap_or("ok");
        writeln!(w, "# {},{},{}", o.job.file_name(), o.seed, status).map_err(io)?;
    }
    w.flush().map_err(io)?;
    Ok(path)
}

/// Per-job outcomes, in grid order, returned by [`run_experiment`].
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub manifest: PathBuf,
    pub outcomes: Vec<JobOutcome>,
}

/// Runs every replicate of the grid on a worker pool and writes one CSV per
/// replicate plus a manifest. Any failed replicate makes the whole run an
/// error after the (partial) manifest has been written.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary, CliError> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.output_dir).map_err(|e| CliError::io(&cfg.output_dir, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::io(&cfg.output_dir, std::io::Error::other(e)))?;
    let outcomes: Vec<JobOutcome> = pool.install(|| jobs(cfg).into_par_iter().map(|j| run_job(cfg, j)).collect());
    let manifest = write_manifest(cfg, &outcomes)?;
    if let Some(bad) = outcomes.iter().find(|o| o.error.is_some()) {
        return Err(CliError::io(
            &bad.path,
            std::io::Error::other(bad.error.clone().unwrap_or_default()),
        ));
    }
    Ok(RunSummary { manifest, outcomes })
}
