use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::random_select;
use crate::genome::{Individual, GENE_MAX};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimilarityMetric {
    Genotypic,
    Phenotypic,
}

/// Sharing kernel `1 - (d / sigma)^alpha` inside the radius, 0 outside.
/// A zero radius disables sharing entirely.
pub fn sharing_kernel(d: f64, sigma: f64, alpha: f64) -> f64 {
    debug_assert!(d >= 0.0);
    if sigma > 0.0 && d < sigma {
        1.0 - (d / sigma).powf(alpha)
    } else {
        0.0
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn coordinates(ind: &Individual, metric: SimilarityMetric) -> &[f64] {
    match metric {
        SimilarityMetric::Genotypic => ind.genotype.genes(),
        SimilarityMetric::Phenotypic => ind.phenotype.traits(),
    }
}

/// Largest possible distance between two vectors of `dim` values in [0, 100].
pub(crate) fn diameter(dim: usize) -> f64 {
    GENE_MAX * (dim as f64).sqrt()
}

/// Niche counts for the members `subset` of `pop`, computed only among
/// themselves. Self-similarity contributes 1 unless sharing is disabled.
pub(crate) fn niche_counts_among(
    pop: &[Individual],
    subset: &[usize],
    metric: SimilarityMetric,
    sigma: f64,
    alpha: f64,
    normalize: bool,
) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0; subset.len()];
    }
    let scale = match subset.first() {
        Some(&i) if normalize => diameter(coordinates(&pop[i], metric).len()),
        _ => 1.0,
    };
    let mut m = vec![1.0; subset.len()];
    for a in 0..subset.len() {
        let xa = coordinates(&pop[subset[a]], metric);
        for b in a + 1..subset.len() {
            let d = euclidean(xa, coordinates(&pop[subset[b]], metric)) / scale;
            let s = sharing_kernel(d, sigma, alpha);
            m[a] += s;
            m[b] += s;
        }
    }
    m
}

/// Niche count of every member of `pop`.
pub fn niche_counts(
    pop: &[Individual],
    metric: SimilarityMetric,
    sigma: f64,
    alpha: f64,
    normalize: bool,
) -> Vec<f64> {
    let all: Vec<usize> = (0..pop.len()).collect();
    niche_counts_among(pop, &all, metric, sigma, alpha, normalize)
}

/// Niche count of member `x`: the kernel summed over the whole population.
pub fn niche_count(
    x: usize,
    pop: &[Individual],
    metric: SimilarityMetric,
    sigma: f64,
    alpha: f64,
    normalize: bool,
) -> f64 {
    if sigma <= 0.0 {
        return 1.0;
    }
    let xs = coordinates(&pop[x], metric);
    let scale = if normalize { diameter(xs.len()) } else { 1.0 };
    pop.iter()
        .map(|y| sharing_kernel(euclidean(xs, coordinates(y, metric)) / scale, sigma, alpha))
        .sum()
}

/// Stochastic remainder selection with replacement.
///
/// Member i is owed `n * w_i / sum(w)` slots. The integer part is granted
/// outright; the rest are drawn in proportion to the fractional parts.
/// Negative weights count as zero, and an all-zero vector falls back to
/// uniform draws.
pub fn stochastic_remainder<R: Rng + ?Sized>(weights: &[f64], n: usize, rng: &mut R) -> Vec<usize> {
    assert!(!weights.is_empty());
    let w: Vec<f64> = weights.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = w.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return random_select(w.len(), n, rng);
    }

    let expected: Vec<f64> = w.iter().map(|&x| n as f64 * x / total).collect();
    let mut parents = Vec::with_capacity(n);
    for (i, e) in expected.iter().enumerate() {
        let whole = (e.floor() as usize).min(n - parents.len());
        parents.extend(std::iter::repeat_n(i, whole));
    }

    let remaining = n - parents.len();
    if remaining > 0 {
        let fractions: Vec<f64> = expected.iter().map(|e| e - e.floor()).collect();
        // rounding can leave a slot with no fractional mass; fall back to raw weights
        let dist = WeightedIndex::new(&fractions)
            .or_else(|_| WeightedIndex::new(&w))
            .expect("positive total weight");
        parents.extend((0..remaining).map(|_| dist.sample(rng)));
    }
    parents
}

/// Fitness sharing: total fitness divided by niche count, then stochastic
/// remainder selection on the shared values.
pub fn fitness_sharing_select<R: Rng + ?Sized>(
    pop: &[Individual],
    metric: SimilarityMetric,
    sigma: f64,
    alpha: f64,
    normalize: bool,
    n: usize,
    rng: &mut R,
) -> Vec<usize> {
    let m = niche_counts(pop, metric, sigma, alpha, normalize);
    let shared: Vec<f64> = pop
        .iter()
        .zip(&m)
        .map(|(ind, m)| ind.total_fitness / m)
        .collect();
    stochastic_remainder(&shared, n, rng)
}
