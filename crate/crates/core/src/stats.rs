//! Nonparametric significance testing for comparing replicate outcomes.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use thiserror::Error;

/// Significance level for all comparisons.
pub const ALPHA: f64 = 0.05;

/// Largest combined sample size for which the rank-sum test enumerates the
/// exact null distribution (tie-free samples only).
pub const EXACT_MAX_TOTAL: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("sample `{0}` is empty")]
    EmptySample(String),
    #[error("need at least {needed} groups, got {got}")]
    TooFewGroups { needed: usize, got: usize },
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("sample `{0}` contains a non-finite value")]
    NonFinite(String),
}

/// Replicate outcomes for one treatment.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGroup {
    pub label: String,
    pub values: Vec<f64>,
}

impl SampleGroup {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            values,
        }
    }

    fn check(&self) -> Result<(), StatsError> {
        if self.values.is_empty() {
            return Err(StatsError::EmptySample(self.label.clone()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite(self.label.clone()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Alternative {
    #[default]
    TwoSided,
    /// First sample tends to be smaller.
    Less,
    /// First sample tends to be larger.
    Greater,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankSumMethod {
    /// Exact when tie-free and the combined size is at most the threshold.
    Auto { exact_max_total: usize },
    Exact,
    Normal,
}

impl Default for RankSumMethod {
    fn default() -> Self {
        RankSumMethod::Auto {
            exact_max_total: EXACT_MAX_TOTAL,
        }
    }
}

/// Mid-ranks (1-based) of `values`, plus the sizes of every tie block.
pub fn mid_ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        if end - start > 1 {
            ties.push(end - start);
        }
        start = end;
    }
    (ranks, ties)
}

fn tie_sum(ties: &[usize]) -> f64 {
    ties.iter().map(|&t| (t * t * t - t) as f64).sum()
}

fn clamp_p(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

/// Kruskal-Wallis H test with tie correction and a chi-square p-value.
pub fn kruskal_wallis(groups: &[SampleGroup]) -> Result<TestResult, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups {
            needed: 2,
            got: groups.len(),
        });
    }
    for g in groups {
        g.check()?;
    }
    let pooled: Vec<f64> = groups.iter().flat_map(|g| g.values.iter().copied()).collect();
    let n = pooled.len();
    if n < 3 {
        return Err(StatsError::TooFewObservations { needed: 3, got: n });
    }
    let (ranks, ties) = mid_ranks(&pooled);
    let nf = n as f64;
    let correction = 1.0 - tie_sum(&ties) / (nf * nf * nf - nf);
    if correction <= 0.0 {
        // every observation identical
        return Ok(TestResult {
            statistic: 0.0,
            p_value: 1.0,
        });
    }

    let mut offset = 0;
    let mut sum_sq = 0.0;
    for g in groups {
        let r: f64 = ranks[offset..offset + g.values.len()].iter().sum();
        sum_sq += r * r / g.values.len() as f64;
        offset += g.values.len();
    }
    let h = ((12.0 / (nf * (nf + 1.0)) * sum_sq - 3.0 * (nf + 1.0)) / correction).max(0.0);
    let df = (groups.len() - 1) as f64;
    let chi = ChiSquared::new(df).expect("positive degrees of freedom");
    Ok(TestResult {
        statistic: h,
        p_value: clamp_p(chi.sf(h)),
    })
}

/// Number of ways to pick `m` of the ranks `1..=total` for every possible
/// rank sum, indexed by `sum - m(m+1)/2` (that is, by U).
fn exact_u_counts(m: usize, total: usize) -> Vec<f64> {
    let max_u = m * (total - m);
    // counts[k][u]: subsets of size k of the ranks seen so far with statistic u
    let mut counts = vec![vec![0.0; max_u + 1]; m + 1];
    counts[0][0] = 1.0;
    for rank in 1..=total {
        for k in (1..=m.min(rank)).rev() {
            // adding rank r as the k-th smallest element contributes r - k to U
            let shift = rank - k;
            for u in (shift..=max_u).rev() {
                counts[k][u] += counts[k - 1][u - shift];
            }
        }
    }
    counts.swap_remove(m)
}

/// Wilcoxon rank-sum (Mann-Whitney U) test. The statistic is U for `a`.
pub fn wilcoxon_rank_sum(
    a: &SampleGroup,
    b: &SampleGroup,
    alternative: Alternative,
) -> Result<TestResult, StatsError> {
    wilcoxon_rank_sum_with(a, b, alternative, RankSumMethod::default())
}

pub fn wilcoxon_rank_sum_with(
    a: &SampleGroup,
    b: &SampleGroup,
    alternative: Alternative,
    method: RankSumMethod,
) -> Result<TestResult, StatsError> {
    a.check()?;
    b.check()?;
    let (na, nb) = (a.values.len(), b.values.len());
    let pooled: Vec<f64> = a.values.iter().chain(&b.values).copied().collect();
    let (ranks, ties) = mid_ranks(&pooled);
    let rank_sum_a: f64 = ranks[..na].iter().sum();
    let u = rank_sum_a - (na * (na + 1)) as f64 / 2.0;

    let exact = match method {
        RankSumMethod::Exact => true,
        RankSumMethod::Normal => false,
        RankSumMethod::Auto { exact_max_total } => ties.is_empty() && na + nb <= exact_max_total,
    };
    let p = if exact {
        exact_p(u, na, nb, alternative)
    } else {
        normal_p(u, na, nb, &ties, alternative)
    };
    Ok(TestResult {
        statistic: u,
        p_value: clamp_p(p),
    })
}

fn exact_p(u: f64, na: usize, nb: usize, alternative: Alternative) -> f64 {
    let counts = exact_u_counts(na, na + nb);
    let total: f64 = counts.iter().sum();
    // mid-rank U can be fractional under ties; compare against integer support
    let lower: f64 = counts
        .iter()
        .enumerate()
        .filter(|(k, _)| *k as f64 <= u + 1e-9)
        .map(|(_, c)| c)
        .sum::<f64>()
        / total;
    let upper: f64 = counts
        .iter()
        .enumerate()
        .filter(|(k, _)| *k as f64 >= u - 1e-9)
        .map(|(_, c)| c)
        .sum::<f64>()
        / total;
    match alternative {
        Alternative::Less => lower,
        Alternative::Greater => upper,
        Alternative::TwoSided => (2.0 * lower.min(upper)).min(1.0),
    }
}

fn normal_p(u: f64, na: usize, nb: usize, ties: &[usize], alternative: Alternative) -> f64 {
    let (fa, fb) = (na as f64, nb as f64);
    let n = fa + fb;
    let mean = fa * fb / 2.0;
    let var = fa * fb / 12.0 * ((n + 1.0) - tie_sum(ties) / (n * (n - 1.0)).max(1.0));
    if var <= 0.0 {
        return 1.0;
    }
    let sd = var.sqrt();
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    match alternative {
        Alternative::Less => std_normal.cdf((u - mean + 0.5) / sd),
        Alternative::Greater => std_normal.sf((u - mean - 0.5) / sd),
        Alternative::TwoSided => {
            let z = ((u - mean).abs() - 0.5).max(0.0) / sd;
            2.0 * std_normal.sf(z).min(0.5)
        }
    }
}

/// Bonferroni adjustment: each p multiplied by the number of comparisons,
/// capped at 1.
pub fn bonferroni(p_values: &[f64]) -> Vec<f64> {
    let m = p_values.len() as f64;
    p_values.iter().map(|p| (p * m).min(1.0)).collect()
}
