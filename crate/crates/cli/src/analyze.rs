//! Statistical comparison of end-of-run metrics across schemes.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use selscope::diagnostics::DiagnosticKind;
use selscope::selection::SchemeKind;
use selscope::stats::{bonferroni, kruskal_wallis, wilcoxon_rank_sum, Alternative, SampleGroup, ALPHA};
use selscope::ConfigError;
use serde::Serialize;

use crate::error::CliError;
use crate::runner::{parse_file_name, read_rows, CsvRow, MANIFEST_NAME};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    BestPerformance,
    BestTotalFitness,
    SatisfactoryTraitCoverage,
    ActivationGeneCoverage,
    LargestValleyReached,
    ArchiveSize,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::BestPerformance,
        Metric::BestTotalFitness,
        Metric::SatisfactoryTraitCoverage,
        Metric::ActivationGeneCoverage,
        Metric::LargestValleyReached,
        Metric::ArchiveSize,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::BestPerformance => "best_performance",
            Metric::BestTotalFitness => "best_total_fitness",
            Metric::SatisfactoryTraitCoverage => "satisfactory_trait_coverage",
            Metric::ActivationGeneCoverage => "activation_gene_coverage",
            Metric::LargestValleyReached => "largest_valley_reached",
            Metric::ArchiveSize => "archive_size",
        }
    }

    /// Value in `row`, `None` when the metric does not apply.
    pub fn value(self, row: &CsvRow) -> Option<f64> {
        match self {
            Metric::BestPerformance => Some(row.best_performance),
            Metric::BestTotalFitness => Some(row.best_total_fitness),
            Metric::SatisfactoryTraitCoverage => Some(row.satisfactory_trait_coverage as f64),
            Metric::ActivationGeneCoverage => row.activation_gene_coverage.map(|v| v as f64),
            Metric::LargestValleyReached => row.largest_valley_reached.map(|v| v as f64),
            Metric::ArchiveSize => row.archive_size.map(|v| v as f64),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| ConfigError::UnknownName {
                what: "metric",
                name: s.to_string(),
                valid: Metric::ALL.map(|m| m.name()).join(", "),
            })
    }
}

/// One output line. Omnibus rows have `group_b = "*"`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub group_a: String,
    pub group_b: String,
    pub metric: String,
    pub statistic: f64,
    pub p_raw: f64,
    pub p_adjusted: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, Default)]
pub struct AnalysisReport {
    pub rows: Vec<ComparisonRow>,
    /// Files that were expected or found but could not be used.
    pub skipped: Vec<(PathBuf, String)>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct AnalyzeOptions {
    /// Restrict to these diagnostics (all when empty).
    pub diagnostics: Vec<DiagnosticKind>,
    /// Restrict to these schemes (all when empty).
    pub schemes: Vec<SchemeKind>,
}

type Groups = BTreeMap<usize, BTreeMap<usize, BTreeMap<usize, f64>>>;

fn index_of<T: PartialEq>(all: &[T], x: &T) -> usize {
    all.iter().position(|a| a == x).expect("listed")
}

/// File names the manifest in `dir` says should exist.
fn manifest_files(dir: &Path) -> Vec<String> {
    let Ok(text) = std::fs::read_to_string(dir.join(MANIFEST_NAME)) else {
        return Vec::new();
    };
    text.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split(',').next())
        .filter(|name| parse_file_name(name).is_some())
        .map(str::to_string)
        .collect()
}

/// Collects the final-row metric of every replicate file in `dir`, keyed by
/// diagnostic, scheme and replicate index.
fn collect(dir: &Path, metric: Metric, opts: &AnalyzeOptions, report: &mut AnalysisReport) -> Result<Groups, CliError> {
    let wanted = |d: DiagnosticKind, s: SchemeKind| {
        (opts.diagnostics.is_empty() || opts.diagnostics.contains(&d)) && (opts.schemes.is_empty() || opts.schemes.contains(&s))
    };
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|n| parse_file_name(n).is_some())
        .collect();
    names.sort();
    for expected in manifest_files(dir) {
        if names.binary_search(&expected).is_err() {
            report.skipped.push((dir.join(&expected), "listed in manifest but missing".into()));
        }
    }

    let mut groups = Groups::new();
    for name in names {
        let (d, s, r) = parse_file_name(&name).expect("filtered");
        if !wanted(d, s) {
            continue;
        }
        let path = dir.join(&name);
        let rows = match read_rows(&path) {
            Ok(rows) => rows,
            Err(e) => {
                report.skipped.push((path, e.to_string()));
                continue;
            }
        };
        let Some(last) = rows.last() else {
            report.skipped.push((path, "no data rows".into()));
            continue;
        };
        match metric.value(last) {
            Some(v) => {
                groups
                    .entry(index_of(&DiagnosticKind::ALL, &d))
                    .or_default()
                    .entry(index_of(&SchemeKind::ALL, &s))
                    .or_default()
                    .insert(r, v);
            }
            None => report.notes.push(format!("{name}: {metric} does not apply, ignored")),
        }
    }
    Ok(groups)
}

fn compare(diagnostic: DiagnosticKind, metric: Metric, groups: Vec<SampleGroup>, report: &mut AnalysisReport) {
    if groups.len() < 2 {
        report
            .notes
            .push(format!("{diagnostic}: fewer than two schemes with {metric}, nothing to compare"));
        return;
    }
    let omnibus = match kruskal_wallis(&groups) {
        Ok(t) => t,
        Err(e) => {
            report.notes.push(format!("{diagnostic}: {e}"));
            return;
        }
    };
    report.rows.push(ComparisonRow {
        group_a: diagnostic.to_string(),
        group_b: "*".into(),
        metric: metric.to_string(),
        statistic: omnibus.statistic,
        p_raw: omnibus.p_value,
        p_adjusted: omnibus.p_value,
        significant: omnibus.p_value < ALPHA,
    });
    if omnibus.p_value >= ALPHA {
        return;
    }

    let mut pairs = Vec::new();
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            let t = wilcoxon_rank_sum(&groups[i], &groups[j], Alternative::TwoSided).expect("groups are checked non-empty and finite");
            pairs.push((i, j, t));
        }
    }
    let adjusted = bonferroni(&pairs.iter().map(|(_, _, t)| t.p_value).collect::<Vec<_>>());
    for ((i, j, t), p_adj) in pairs.into_iter().zip(adjusted) {
        report.rows.push(ComparisonRow {
            group_a: groups[i].label.clone(),
            group_b: groups[j].label.clone(),
            metric: metric.to_string(),
            statistic: t.statistic,
            p_raw: t.p_value,
            p_adjusted: p_adj,
            significant: p_adj < ALPHA,
        });
    }
}

/// Per diagnostic: Kruskal-Wallis across schemes on the end-of-run `metric`;
/// when significant, every pairwise rank-sum test with Bonferroni
/// adjustment. Group labels are `<diagnostic>/<scheme>`.
pub fn analyze(dir: &Path, metric: Metric, opts: &AnalyzeOptions) -> Result<AnalysisReport, CliError> {
    let mut report = AnalysisReport::default();
    let groups = collect(dir, metric, opts, &mut report)?;
    for (d, by_scheme) in groups {
        let diagnostic = DiagnosticKind::ALL[d];
        let samples = by_scheme
            .into_iter()
            .map(|(s, reps)| {
                SampleGroup::new(
                    format!("{diagnostic}/{}", SchemeKind::ALL[s]),
                    reps.into_values().collect(),
                )
            })
            .collect();
        compare(diagnostic, metric, samples, &mut report);
    }
    Ok(report)
}

pub fn write_comparisons<W: Write>(out: W, rows: &[ComparisonRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["group_a", "group_b", "metric", "statistic", "p_raw", "p_adjusted", "significant"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_names_round_trip() {
        for m in Metric::ALL {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
        }
        let e = "generation".parse::<Metric>().unwrap_err().to_string();
        assert!(e.contains("best_total_fitness"));
    }

    #[test]
    fn empty_output_still_has_header() {
        let mut buf = Vec::new();
        write_comparisons(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "group_a,group_b,metric,statistic,p_raw,p_adjusted,significant\n"
        );
    }
}
