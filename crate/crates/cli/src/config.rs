//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comment
//! diagnostic = exploitation-rate, valley-crossing
//! scheme = all
//! replicates = 10
//! generations = 5000
//! ```
//!
//! Command-line flags are applied as further `key = value` pairs after the
//! file, so they always win.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use selscope::diagnostics::DiagnosticKind;
use selscope::evolve::ReplicateConfig;
use selscope::genome::MutationParams;
use selscope::selection::{NoveltyParams, SchemeKind};
use selscope::ConfigError;

use crate::error::CliError;

pub const KEYS: [&str; 22] = [
    "diagnostic",
    "scheme",
    "replicates",
    "seed",
    "output_dir",
    "workers",
    "pop_size",
    "generations",
    "dim",
    "stride",
    "mutation_rate",
    "mutation_stddev",
    "init_min",
    "init_max",
    "truncation_size",
    "tournament_size",
    "sigma",
    "alpha",
    "normalize_distance",
    "novelty_k",
    "novelty_pmin",
    "include_archive",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub diagnostics: Vec<DiagnosticKind>,
    pub schemes: Vec<SchemeKind>,
    pub replicates: usize,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    /// 0 means one worker per available core.
    pub workers: usize,
    pub pop_size: usize,
    pub generations: usize,
    pub dim: usize,
    pub stride: usize,
    pub mutation: MutationParams,
    pub init_range: (f64, f64),
    pub truncation_size: usize,
    pub tournament_size: usize,
    pub sigma: f64,
    pub alpha: f64,
    pub normalize_distance: bool,
    pub novelty_k: usize,
    pub novelty_pmin: f64,
    pub include_archive: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let base = ReplicateConfig::new(DiagnosticKind::ExploitationRate, SchemeKind::Truncation);
        let novelty = NoveltyParams::default();
        Self {
            diagnostics: DiagnosticKind::ALL.to_vec(),
            schemes: SchemeKind::ALL.to_vec(),
            replicates: 50,
            base_seed: 0,
            output_dir: PathBuf::from("results"),
            workers: 0,
            pop_size: base.pop_size,
            generations: base.generations,
            dim: base.dim,
            stride: base.record_stride,
            mutation: base.mutation,
            init_range: base.init_range,
            truncation_size: base.scheme.truncation_size,
            tournament_size: base.scheme.tournament_size,
            sigma: base.scheme.sigma,
            alpha: base.scheme.alpha,
            normalize_distance: base.scheme.normalize_distance,
            novelty_k: novelty.k,
            novelty_pmin: novelty.initial_pmin,
            include_archive: base.include_archive,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError::invalid(key, format!("cannot parse `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(ConfigError::invalid(key, format!("expected true or false, got `{value}`"))),
    }
}

fn parse_list<T: FromStr<Err = ConfigError> + PartialEq + Copy>(
    key: &str,
    value: &str,
    all: &[T],
) -> Result<Vec<T>, ConfigError> {
    if value.trim() == "all" {
        return Ok(all.to_vec());
    }
    let mut out = Vec::new();
    for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let item = name.parse()?;
        if !out.contains(&item) {
            out.push(item);
        }
    }
    if out.is_empty() {
        return Err(ConfigError::invalid(key, "list is empty"));
    }
    Ok(out)
}

impl ExperimentConfig {
    /// Applies one setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "diagnostic" => self.diagnostics = parse_list(key, value, &DiagnosticKind::ALL)?,
            "scheme" => self.schemes = parse_list(key, value, &SchemeKind::ALL)?,
            "replicates" => self.replicates = parse_num(key, value)?,
            "seed" => self.base_seed = parse_num(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "workers" => self.workers = parse_num(key, value)?,
            "pop_size" => self.pop_size = parse_num(key, value)?,
            "generations" => self.generations = parse_num(key, value)?,
            "dim" => self.dim = parse_num(key, value)?,
            "stride" => self.stride = parse_num(key, value)?,
            "mutation_rate" => self.mutation.per_gene_rate = parse_num(key, value)?,
            "mutation_stddev" => self.mutation.step_stddev = parse_num(key, value)?,
            "init_min" => self.init_range.0 = parse_num(key, value)?,
            "init_max" => self.init_range.1 = parse_num(key, value)?,
            "truncation_size" => self.truncation_size = parse_num(key, value)?,
            "tournament_size" => self.tournament_size = parse_num(key, value)?,
            "sigma" => self.sigma = parse_num(key, value)?,
            "alpha" => self.alpha = parse_num(key, value)?,
            "normalize_distance" => self.normalize_distance = parse_bool(key, value)?,
            "novelty_k" => self.novelty_k = parse_num(key, value)?,
            "novelty_pmin" => self.novelty_pmin = parse_num(key, value)?,
            "include_archive" => self.include_archive = parse_bool(key, value)?,
            _ => {
                return Err(ConfigError::UnknownName {
                    what: "config key",
                    name: key.to_string(),
                    valid: KEYS.join(", "),
                })
            }
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError::invalid(
                    format!("line {}", lineno + 1),
                    format!("expected `key = value`, got `{line}`"),
                )
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    /// The configuration of one replicate.
    pub fn replicate_config(&self, diagnostic: DiagnosticKind, scheme: SchemeKind, replicate: usize) -> ReplicateConfig {
        let mut c = ReplicateConfig::new(diagnostic, scheme);
        c.pop_size = self.pop_size;
        c.generations = self.generations;
        c.dim = self.dim;
        c.record_stride = self.stride;
        c.mutation = self.mutation;
        c.init_range = self.init_range;
        c.include_archive = self.include_archive;
        c.seed = replicate_seed(self.base_seed, treatment_index(diagnostic, scheme), replicate);
        c.scheme.truncation_size = self.truncation_size;
        c.scheme.tournament_size = self.tournament_size;
        c.scheme.sigma = self.sigma;
        c.scheme.alpha = self.alpha;
        c.scheme.normalize_distance = self.normalize_distance;
        c.scheme.novelty.k = self.novelty_k;
        c.scheme.novelty.initial_pmin = self.novelty_pmin;
        c
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.replicates == 0 {
            return Err(ConfigError::invalid("replicates", "must be at least 1"));
        }
        if self.diagnostics.is_empty() {
            return Err(ConfigError::invalid("diagnostic", "list is empty"));
        }
        if self.schemes.is_empty() {
            return Err(ConfigError::invalid("scheme", "list is empty"));
        }
        if self.init_range.0 >= self.init_range.1 {
            return Err(ConfigError::invalid(
                "init_max",
                format!("{} must exceed init_min {}", self.init_range.1, self.init_range.0),
            ));
        }
        for &d in &self.diagnostics {
            for &s in &self.schemes {
                self.replicate_config(d, s, 0).validate()?;
            }
        }
        Ok(())
    }

    /// Every setting as `key = value` lines, readable by [`apply_text`](Self::apply_text).
    pub fn to_text(&self) -> String {
        let names = |v: Vec<&str>| v.join(", ");
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("diagnostic", names(self.diagnostics.iter().map(|d| d.name()).collect()));
        put("scheme", names(self.schemes.iter().map(|s| s.name()).collect()));
        put("replicates", self.replicates.to_string());
        put("seed", self.base_seed.to_string());
        put("output_dir", self.output_dir.display().to_string());
        put("workers", self.workers.to_string());
        put("pop_size", self.pop_size.to_string());
        put("generations", self.generations.to_string());
        put("dim", self.dim.to_string());
        put("stride", self.stride.to_string());
        put("mutation_rate", self.mutation.per_gene_rate.to_string());
        put("mutation_stddev", self.mutation.step_stddev.to_string());
        put("init_min", self.init_range.0.to_string());
        put("init_max", self.init_range.1.to_string());
        put("truncation_size", self.truncation_size.to_string());
        put("tournament_size", self.tournament_size.to_string());
        put("sigma", self.sigma.to_string());
        put("alpha", self.alpha.to_string());
        put("normalize_distance", self.normalize_distance.to_string());
        put("novelty_k", self.novelty_k.to_string());
        put("novelty_pmin", self.novelty_pmin.to_string());
        put("include_archive", self.include_archive.to_string());
        out
    }
}

/// Reads an optional config file, applies `overrides` in order, and
/// validates the result.
pub fn parse_config(file: Option<&Path>, overrides: &[(String, String)]) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        cfg.apply_text(&text)?;
    }
    for (k, v) in overrides {
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Position of a treatment in the full 8 x 8 grid. Stable no matter which
/// subset of the grid is being run.
pub fn treatment_index(diagnostic: DiagnosticKind, scheme: SchemeKind) -> u64 {
    let d = DiagnosticKind::ALL.iter().position(|&k| k == diagnostic).expect("listed");
    let s = SchemeKind::ALL.iter().position(|&k| k == scheme).expect("listed");
    (d * SchemeKind::ALL.len() + s) as u64
}

/// SplitMix64 finalizer. A bijection on `u64`.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `base + splitmix64(treatment << 32 | replicate)`. Distinct for distinct
/// (treatment, replicate) pairs while replicate < 2^32.
pub fn replicate_seed(base: u64, treatment: u64, replicate: usize) -> u64 {
    let r = replicate as u64;
    assert!(r < 1 << 32, "replicate index too large");
    base.wrapping_add(splitmix64(treatment << 32 | r))
}
