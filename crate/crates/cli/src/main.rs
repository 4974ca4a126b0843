use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use selscope_cli::analyze::write_comparisons;
use selscope_cli::{analyze, describe, parse_config, run_experiment, AnalyzeOptions, CliError, Metric};

#[derive(Parser)]
#[command(name = "selscope", version, about = "Run and analyze selection-scheme diagnostic experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a diagnostic x scheme x replicate grid
    Run(RunArgs),
    /// Compare end-of-run metrics across schemes
    Analyze(AnalyzeArgs),
    /// Print the diagnostic and scheme catalogs
    Describe,
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` config file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "diagnostic")]
    diagnostics: Vec<String>,
    #[arg(long = "scheme")]
    schemes: Vec<String>,
    #[arg(long)]
    replicates: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    pop_size: Option<String>,
    #[arg(long)]
    generations: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    /// Record every n-th generation (the last is always recorded)
    #[arg(long)]
    stride: Option<String>,
    #[arg(long)]
    output_dir: Option<String>,
    /// Worker threads; 0 uses every core
    #[arg(long)]
    workers: Option<String>,
    /// Count novelty archive members in performance and coverage
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    include_archive: Option<String>,
    /// Any other config key, as key=value
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl RunArgs {
    fn overrides(&self) -> Result<Vec<(String, String)>, CliError> {
        let mut out = Vec::new();
        if !self.diagnostics.is_empty() {
            out.push(("diagnostic".to_string(), self.diagnostics.join(",")));
        }
        if !self.schemes.is_empty() {
            out.push(("scheme".to_string(), self.schemes.join(",")));
        }
        for (key, value) in [
            ("replicates", &self.replicates),
            ("seed", &self.seed),
            ("pop_size", &self.pop_size),
            ("generations", &self.generations),
            ("dim", &self.dim),
            ("stride", &self.stride),
            ("output_dir", &self.output_dir),
            ("workers", &self.workers),
            ("include_archive", &self.include_archive),
        ] {
            if let Some(v) = value {
                out.push((key.to_string(), v.clone()));
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| selscope::ConfigError::invalid("set", format!("expected KEY=VALUE, got `{kv}`")))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(out)
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Directory holding replicate CSVs
    dir: PathBuf,
    #[arg(long, default_value = "best_total_fitness")]
    metric: String,
    #[arg(long = "diagnostic")]
    diagnostics: Vec<String>,
    #[arg(long = "scheme")]
    schemes: Vec<String>,
    /// Write comparisons here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: RunArgs) -> Result<(), CliError> {
    let cfg = parse_config(args.config.as_deref(), &args.overrides()?)?;
    let summary = run_experiment(&cfg)?;
    eprintln!(
        "wrote {} replicate files and {}",
        summary.outcomes.len(),
        summary.manifest.display()
    );
    Ok(())
}

fn run_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let metric: Metric = args.metric.parse()?;
    let opts = AnalyzeOptions {
        diagnostics: args.diagnostics.iter().map(|s| s.parse()).collect::<Result<_, _>>()?,
        schemes: args.schemes.iter().map(|s| s.parse()).collect::<Result<_, _>>()?,
    };
    let report = analyze(&args.dir, metric, &opts)?;
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    let written = match &args.out {
        Some(path) => {
            let f = File::create(path).map_err(|e| CliError::io(path, e))?;
            write_comparisons(BufWriter::new(f), &report.rows).map_err(|e| (path.clone(), e))
        }
        None => write_comparisons(io::stdout().lock(), &report.rows).map_err(|e| (PathBuf::from("<stdout>"), e)),
    };
    written.map_err(|(path, e)| CliError::Csv {
        path,
        message: e.to_string(),
    })?;
    if !report.skipped.is_empty() {
        for (path, why) in &report.skipped {
            eprintln!("skipped {}: {why}", path.display());
        }
        return Err(CliError::SkippedFiles(report.skipped.into_iter().map(|(p, _)| p).collect()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Analyze(args) => run_analyze(args),
        Command::Describe => {
            print!("{}", describe());
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
