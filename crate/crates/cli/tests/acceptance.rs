//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any failed.
//!
//! The evolutionary criteria (1 to 4) run at desk scale: N = 128, D = 20,
//! 5000 generations, 10 replicates per treatment.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use selscope::diagnostics::{
    activation_gene, contradictory_objectives, exploitation_rate, multipath_exploration, ordered_exploitation, sawtooth,
    DiagnosticKind, DiagnosticSpec, SawtoothParams,
};
use selscope::evolve::{Replicate, ReplicateConfig};
use selscope::genome::{Genotype, Individual, Phenotype};
use selscope::metrics::is_satisfactory_solution;
use selscope::selection::{
    novelty_select, stochastic_remainder, tournament_select, NoveltyArchive, NoveltyParams, SchemeKind,
};
use selscope::stats::{bonferroni, kruskal_wallis, wilcoxon_rank_sum, Alternative, SampleGroup};
use selscope_cli::config::{replicate_seed, treatment_index};
use selscope_cli::{run_experiment, ExperimentConfig};

const POP: usize = 128;
const DIM: usize = 20;
const GENERATIONS: usize = 5000;
const REPLICATES: usize = 10;
const SEED: u64 = 2022;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

// ---------------------------------------------------------------- helpers

#[derive(Debug, Clone, Copy)]
struct RunSummary {
    /// First generation with a satisfactory solution.
    satisfactory_at: Option<usize>,
    /// Best performance seen in any generation.
    best_performance: f64,
    final_satisfactory_coverage: usize,
    final_activation_coverage: usize,
}

fn desk_config(d: DiagnosticKind, s: SchemeKind, rep: usize) -> ReplicateConfig {
    ReplicateConfig {
        pop_size: POP,
        dim: DIM,
        generations: GENERATIONS,
        seed: replicate_seed(SEED, treatment_index(d, s), rep),
        ..ReplicateConfig::new(d, s)
    }
}

fn run_one(d: DiagnosticKind, s: SchemeKind, rep: usize, stop_when_satisfied: bool) -> RunSummary {
    let mut r = Replicate::new(desk_config(d, s, rep)).expect("desk config is valid");
    let mut best = f64::NEG_INFINITY;
    let mut satisfactory_at = None;
    loop {
        let rec = r.record();
        best = best.max(rec.best_performance);
        if satisfactory_at.is_none() && r.population().iter().any(|i| is_satisfactory_solution(&i.phenotype)) {
            satisfactory_at = Some(r.generation());
            if stop_when_satisfied {
                break;
            }
        }
        if r.generation() == GENERATIONS {
            break;
        }
        r.step();
    }
    let rec = r.record();
    RunSummary {
        satisfactory_at,
        best_performance: best,
        final_satisfactory_coverage: rec.satisfactory_trait_coverage,
        final_activation_coverage: rec.activation_gene_coverage.unwrap_or(0),
    }
}

fn run_treatments(d: DiagnosticKind, schemes: &[SchemeKind], stop_when_satisfied: bool) -> BTreeMap<SchemeKind, Vec<RunSummary>> {
    let jobs: Vec<(SchemeKind, usize)> = schemes
        .iter()
        .flat_map(|&s| (0..REPLICATES).map(move |r| (s, r)))
        .collect();
    let results: Vec<(SchemeKind, RunSummary)> = jobs
        .into_par_iter()
        .map(|(s, r)| (s, run_one(d, s, r, stop_when_satisfied)))
        .collect();
    let mut out: BTreeMap<SchemeKind, Vec<RunSummary>> = BTreeMap::new();
    for (s, r) in results {
        out.entry(s).or_default().push(r);
    }
    out
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

fn rank_sum_p(a: &[f64], b: &[f64]) -> f64 {
    wilcoxon_rank_sum(&SampleGroup::new("a", a.to_vec()), &SampleGroup::new("b", b.to_vec()), Alternative::TwoSided)
        .expect("non-empty finite samples")
        .p_value
}

/// `a` beats `b`: larger median and rank-sum p < 0.05.
fn beats(a: &[f64], b: &[f64]) -> (bool, f64) {
    let p = rank_sum_p(a, b);
    (median(a) > median(b) && p < 0.05, p)
}

fn fmt_vals(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}").trim_end_matches('0').trim_end_matches('.').to_string()).collect();
    format!("[{}]", parts.join(" "))
}

// ---------------------------------------------------------------- criteria

fn criterion_1() -> Outcome {
    let schemes = [SchemeKind::Truncation, SchemeKind::Tournament, SchemeKind::Lexicase];
    let mut pass = true;
    let mut detail = String::new();
    for d in [DiagnosticKind::ExploitationRate, DiagnosticKind::OrderedExploitation] {
        let runs = run_treatments(d, &schemes, true);
        // unreached replicates rank last
        let gens: Vec<Vec<f64>> = schemes
            .iter()
            .map(|s| {
                runs[s]
                    .iter()
                    .map(|r| r.satisfactory_at.map_or(GENERATIONS as f64 + 1.0, |g| g as f64))
                    .collect()
            })
            .collect();
        let _ = write!(detail, "{d}:");
        for (s, g) in schemes.iter().zip(&gens) {
            let reached = runs[s].iter().filter(|r| r.satisfactory_at.is_some()).count();
            pass &= reached >= 9;
            let _ = write!(detail, " {s} {reached}/10 median {};", median(g));
        }
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            // smaller generation counts are better here
            let p = rank_sum_p(&gens[i], &gens[j]);
            let ok = median(&gens[i]) < median(&gens[j]) && p < 0.05;
            pass &= ok;
            let _ = write!(detail, " {}<{} p={p:.2e};", schemes[i], schemes[j]);
        }
        detail.push(' ');
    }
    outcome(pass, detail)
}

fn criteria_2_and_3() -> (Outcome, Outcome) {
    let runs = run_treatments(DiagnosticKind::ContradictoryObjectives, &SchemeKind::ALL, false);
    let sat = |s: SchemeKind| -> Vec<f64> { runs[&s].iter().map(|r| r.final_satisfactory_coverage as f64).collect() };
    let act = |s: SchemeKind| -> Vec<f64> { runs[&s].iter().map(|r| r.final_activation_coverage as f64).collect() };

    let mut pass2 = true;
    let mut d2 = String::new();
    for s in [SchemeKind::Truncation, SchemeKind::Tournament] {
        let collapsed = runs[&s].iter().filter(|r| r.final_activation_coverage == 1).count();
        pass2 &= collapsed >= 9;
        let _ = write!(d2, "{s} single activation gene {collapsed}/10; ");
    }
    let order = [SchemeKind::NondominatedSorting, SchemeKind::Lexicase, SchemeKind::FitnessSharingPhenotypic];
    for s in order {
        let _ = write!(d2, "{s} coverage {}; ", fmt_vals(&sat(s)));
    }
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        let (ok, p) = beats(&sat(order[i]), &sat(order[j]));
        pass2 &= ok;
        let _ = write!(d2, "{}>{} p={p:.2e}; ", order[i], order[j]);
    }

    let novelty = SchemeKind::NoveltySearch;
    let zero = runs[&novelty].iter().all(|r| r.final_satisfactory_coverage == 0);
    let mut pass3 = zero;
    let mut d3 = format!(
        "novelty satisfactory traits {}; novelty activation coverage {}; ",
        fmt_vals(&sat(novelty)),
        fmt_vals(&act(novelty))
    );
    for s in SchemeKind::ALL.into_iter().filter(|&s| s != novelty) {
        let (ok, p) = beats(&act(novelty), &act(s));
        pass3 &= ok;
        let _ = write!(d3, "vs {s} median {} p={p:.2e}; ", median(&act(s)));
    }
    (outcome(pass2, d2), outcome(pass3, d3))
}

fn criterion_4() -> Outcome {
    let runs = run_treatments(DiagnosticKind::ValleyCrossing, &SchemeKind::ALL, false);
    let perf = |s: SchemeKind| -> Vec<f64> { runs[&s].iter().map(|r| r.best_performance).collect() };
    let sharing = [SchemeKind::FitnessSharingGenotypic, SchemeKind::FitnessSharingPhenotypic];
    let mut pass = true;
    let mut detail = String::from("median best performance:");
    for s in SchemeKind::ALL {
        let _ = write!(detail, " {s} {:.2};", median(&perf(s)));
    }
    for a in sharing {
        for b in SchemeKind::ALL.into_iter().filter(|s| !sharing.contains(s)) {
            let (ok, p) = beats(&perf(a), &perf(b));
            pass &= ok;
            if !ok {
                let _ = write!(detail, " {a} not above {b} (p={p:.2e});");
            }
        }
    }
    let p = rank_sum_p(&perf(SchemeKind::Lexicase), &perf(SchemeKind::Random));
    pass &= p > 0.05;
    let _ = write!(detail, " lexicase vs random p={p:.2e}");
    outcome(pass, detail)
}

fn criterion_5() -> Outcome {
    // independent peak list: 8 + k(k+1)/2
    let peaks: Vec<f64> = (0..14).map(|k| 8.0 + (k * (k + 1) / 2) as f64).collect();
    let oracle = |v: f64| -> f64 {
        match peaks.iter().rev().find(|&&p| p <= v) {
            None => v,
            Some(&p) => p - (v - p),
        }
    };
    let params = SawtoothParams::default();
    let mut pass = true;
    let mut problems = Vec::new();
    for &p in &peaks {
        if sawtooth(p, &params) != p {
            pass = false;
            problems.push(format!("peak {p} not fixed"));
        }
    }
    let mut mismatches = 0;
    let mut bad_order = 0;
    let mut bad_equality = 0;
    for i in 0..=10_000 {
        let v = i as f64 / 100.0;
        let s = sawtooth(v, &params);
        if s.to_bits() != oracle(v).to_bits() {
            mismatches += 1;
        }
        if s > v {
            bad_order += 1;
        }
        let expect_equal = v <= 8.0 || peaks.contains(&v);
        if (s == v) != expect_equal {
            bad_equality += 1;
        }
    }
    pass &= mismatches == 0 && bad_order == 0 && bad_equality == 0;
    problems.push(format!(
        "10001 grid points: {mismatches} oracle mismatches, {bad_order} above identity, {bad_equality} equality violations"
    ));
    outcome(pass, problems.join("; "))
}

fn criterion_6() -> Outcome {
    fn oracle_activation(g: &[f64]) -> usize {
        let top = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        g.iter().position(|&x| x == top).unwrap()
    }
    fn oracle_er(g: &[f64]) -> Vec<f64> {
        g.to_vec()
    }
    fn oracle_oe(g: &[f64]) -> Vec<f64> {
        (0..g.len())
            .map(|i| if (0..i).all(|j| g[j] >= g[j + 1]) { g[i] } else { 0.0 })
            .collect()
    }
    fn oracle_co(g: &[f64]) -> Vec<f64> {
        let a = oracle_activation(g);
        (0..g.len()).map(|i| if i == a { g[i] } else { 0.0 }).collect()
    }
    fn oracle_mpe(g: &[f64]) -> Vec<f64> {
        let a = oracle_activation(g);
        (0..g.len())
            .map(|i| if i >= a && (a..i).all(|j| g[j] >= g[j + 1]) { g[i] } else { 0.0 })
            .collect()
    }

    let mut checked = 0;
    let mut failures = 0;
    for dim in 1..=5u32 {
        for code in 0..4usize.pow(dim) {
            let genes: Vec<f64> = (0..dim).map(|k| ((code / 4usize.pow(k)) % 4) as f64).collect();
            let g = Genotype::new(genes.clone()).unwrap();
            let (co, co_a) = contradictory_objectives(&g);
            let (mpe, mpe_a) = multipath_exploration(&g);
            let a = oracle_activation(&genes);
            let ok = exploitation_rate(&g).traits() == oracle_er(&genes).as_slice()
                && ordered_exploitation(&g).traits() == oracle_oe(&genes).as_slice()
                && co.traits() == oracle_co(&genes).as_slice()
                && mpe.traits() == oracle_mpe(&genes).as_slice()
                && activation_gene(&g) == a
                && co_a == a
                && mpe_a == a;
            checked += 1;
            if !ok {
                failures += 1;
            }
        }
    }
    outcome(
        failures == 0,
        format!("{checked} genotypes (D = 1..5) x 4 diagnostics, {failures} mismatches"),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut pass = true;
    let mut detail = String::new();

    // stochastic remainder: 2000 calls of 5 draws each
    let weights = [0.4, 1.3, 2.9, 0.0, 4.6];
    let total: f64 = weights.iter().sum();
    let mut counts = [0usize; 5];
    for _ in 0..2000 {
        for i in stochastic_remainder(&weights, 5, &mut rng) {
            counts[i] += 1;
        }
    }
    let draws = 10_000.0;
    let mut worst: f64 = 0.0;
    for (w, &c) in weights.iter().zip(&counts) {
        let p = w / total;
        let sd = (draws * p * (1.0 - p)).sqrt();
        let dev = (c as f64 - draws * p).abs();
        let z = if sd > 0.0 { dev / sd } else if dev == 0.0 { 0.0 } else { f64::INFINITY };
        worst = worst.max(z);
    }
    pass &= worst <= 3.0;
    let _ = write!(detail, "stochastic remainder counts {counts:?}, worst deviation {worst:.2} sd; ");

    let spec = DiagnosticSpec::new(DiagnosticKind::ExploitationRate);
    let pop: Vec<Individual> = [0.0, 100.0]
        .iter()
        .map(|&x| spec.evaluate(&Genotype::new(vec![x]).unwrap()))
        .collect();
    let picks = tournament_select(&pop, 2, 10_000, &mut rng);
    let frac = picks.iter().filter(|&&i| i == 1).count() as f64 / 10_000.0;
    pass &= (frac - 0.75).abs() <= 0.02;
    let _ = write!(detail, "tournament ts=2 better chosen {frac:.4}; ");

    let params = NoveltyParams {
        k: 1,
        initial_pmin: 1e9,
        save_period: usize::MAX,
        ..NoveltyParams::default()
    };
    let pop: Vec<Individual> = [[0.0, 0.0], [30.0, 40.0]]
        .iter()
        .map(|x| spec.evaluate(&Genotype::new(x.to_vec()).unwrap()))
        .collect();
    // the archive copy of member 0 makes its novelty 0 while member 1 scores 50
    let mut archive = NoveltyArchive::with_entries(&params, vec![Phenotype::new(vec![0.0, 0.0])]);
    let picks = novelty_select(&pop, &params, &mut archive, 10_000, &mut rng);
    let frac = picks.iter().filter(|&&i| i == 1).count() as f64 / 10_000.0;
    pass &= (frac - 0.75).abs() <= 0.02;
    let _ = write!(detail, "novelty tournament more novel chosen {frac:.4}");
    outcome(pass, detail)
}

fn criterion_8() -> Outcome {
    let mut pass = true;
    let mut detail = String::new();
    let w = wilcoxon_rank_sum(
        &SampleGroup::new("a", vec![1.0, 2.0, 3.0]),
        &SampleGroup::new("b", vec![4.0, 5.0, 6.0]),
        Alternative::TwoSided,
    )
    .unwrap();
    // 2 of the C(6,3) = 20 equally likely splits are as extreme
    pass &= w.statistic == 0.0 && (w.p_value - 2.0 / 20.0).abs() < 1e-12;
    let _ = write!(detail, "rank-sum U={} p={}; ", w.statistic, w.p_value);

    let kw = kruskal_wallis(&[
        SampleGroup::new("a", vec![1.0, 2.0, 3.0]),
        SampleGroup::new("b", vec![4.0, 5.0, 6.0]),
        SampleGroup::new("c", vec![7.0, 8.0, 9.0]),
    ])
    .unwrap();
    // chi-square with 2 df has survival exp(-x/2)
    let oracle = (-7.2f64 / 2.0).exp();
    pass &= (kw.statistic - 7.2).abs() < 1e-9 && (kw.p_value - oracle).abs() < 1e-3;
    let _ = write!(detail, "Kruskal-Wallis H={:.6} p={:.6} (oracle {oracle:.6}); ", kw.statistic, kw.p_value);

    let b = bonferroni(&[0.6, 0.9]);
    let b2 = bonferroni(&[0.01, 0.04]);
    pass &= b == vec![1.0, 1.0] && (b2[0] - 0.02).abs() < 1e-15 && (b2[1] - 0.08).abs() < 1e-15;
    let _ = write!(detail, "Bonferroni [0.6, 0.9] -> {b:?}");
    outcome(pass, detail)
}

fn smoke_grid(dir: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.apply_text("replicates = 1\npop_size = 32\ndim = 10\ngenerations = 200\nseed = 9")
        .unwrap();
    cfg.output_dir = dir.to_path_buf();
    cfg
}

fn criterion_9() -> Outcome {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let summary = run_experiment(&smoke_grid(a.path())).expect("smoke grid runs");
    let elapsed = start.elapsed().as_secs_f64();
    let mut cfg = smoke_grid(b.path());
    cfg.workers = 1;
    run_experiment(&cfg).expect("smoke grid reruns");

    let mut differing = 0;
    for o in &summary.outcomes {
        let name = o.job.file_name();
        if std::fs::read(a.path().join(&name)).ok() != std::fs::read(b.path().join(&name)).ok() {
            differing += 1;
        }
    }
    let treatments = summary.outcomes.len();
    outcome(
        treatments == 64 && differing == 0 && elapsed < 300.0,
        format!(
            "{treatments} treatments in {elapsed:.1}s on {} worker(s); {differing} CSVs differ on rerun",
            rayon::current_num_threads()
        ),
    )
}

fn main() {
    // `cargo test -- --list` and similar probes should not trigger the full run
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let start = Instant::now();
    let mut results = vec![
        ("1 exploitation ordering", criterion_1()),
    ];
    let (c2, c3) = criteria_2_and_3();
    results.push(("2 contradictory-objectives collapse", c2));
    results.push(("3 novelty extremes", c3));
    results.push(("4 valley crossing", criterion_4()));
    results.push(("5 sawtooth correctness", criterion_5()));
    results.push(("6 diagnostic oracles", criterion_6()));
    results.push(("7 selection distributions", criterion_7()));
    results.push(("8 stats oracles", criterion_8()));
    results.push(("9 determinism and smoke grid", criterion_9()));

    let mut failed = 0;
    for (name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {name}: {tag}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed ({:.0}s)",
        results.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
