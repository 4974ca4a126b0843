//! Per-generation data tracking.

use std::collections::BTreeSet;

use crate::diagnostics::{DiagnosticSpec, SawtoothParams};
use crate::genome::{Genotype, Individual, Phenotype, GENE_MAX};

/// Fraction of the upper bound a trait must reach to count as satisfactory.
pub const SATISFACTORY_FRACTION: f64 = 0.99;

/// One recorded generation. Fields that do not apply to the diagnostic or
/// scheme are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Average trait of the best individual.
    pub best_performance: f64,
    pub best_total_fitness: f64,
    pub satisfactory_trait_coverage: usize,
    pub activation_gene_coverage: Option<usize>,
    pub largest_valley_reached: Option<usize>,
    pub archive_size: Option<usize>,
}

/// Sum of traits divided by dimensionality.
pub fn performance(ph: &Phenotype) -> f64 {
    ph.sum() / ph.len() as f64
}

pub fn is_satisfactory(v: f64) -> bool {
    v >= SATISFACTORY_FRACTION * GENE_MAX
}

/// Every trait satisfactory.
pub fn is_satisfactory_solution(ph: &Phenotype) -> bool {
    ph.traits().iter().all(|&t| is_satisfactory(t))
}

/// Trait indices that are satisfactory in at least one of `phenotypes`.
pub fn satisfactory_traits<'a>(phenotypes: impl IntoIterator<Item = &'a Phenotype>) -> BTreeSet<usize> {
    phenotypes
        .into_iter()
        .flat_map(|ph| {
            ph.traits()
                .iter()
                .enumerate()
                .filter(|(_, &t)| is_satisfactory(t))
                .map(|(i, _)| i)
        })
        .collect()
}

pub fn satisfactory_trait_coverage(pop: &[Individual]) -> usize {
    satisfactory_traits(pop.iter().map(|i| &i.phenotype)).len()
}

/// Distinct activation genes across the population, or `None` when the
/// diagnostic does not define them.
pub fn activation_gene_coverage(pop: &[Individual]) -> Option<usize> {
    let genes: Option<BTreeSet<usize>> = pop.iter().map(|i| i.activation_gene).collect();
    genes.map(|g| g.len())
}

/// Index of the last sawtooth peak reached by any gene, i.e. the number of
/// valleys fully crossed. `None` while every gene is below the first peak.
pub fn largest_valley_reached(best: &Genotype, p: &SawtoothParams) -> Option<usize> {
    let top = best.genes().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    p.last_peak_index(top)
}

/// Index of the highest total fitness, lowest index on ties.
pub fn best_index(pop: &[Individual]) -> usize {
    let mut best = 0;
    for (i, ind) in pop.iter().enumerate().skip(1) {
        if ind.total_fitness > pop[best].total_fitness {
            best = i;
        }
    }
    best
}

/// Assembles the record for one generation.
///
/// When `archive` is given its phenotypes compete for best performance and
/// contribute to satisfactory-trait coverage; the archive size is reported
/// either way through `archive_size`.
pub fn snapshot(
    pop: &[Individual],
    generation: usize,
    spec: &DiagnosticSpec,
    archive: Option<&[Phenotype]>,
    archive_size: Option<usize>,
) -> GenerationRecord {
    assert!(!pop.is_empty());
    let best = &pop[best_index(pop)];
    let mut best_phenotype = &best.phenotype;
    let mut best_total = best.total_fitness;
    let mut coverage = satisfactory_traits(pop.iter().map(|i| &i.phenotype));
    if let Some(archive) = archive {
        for ph in archive {
            let total = ph.sum();
            if total > best_total {
                best_total = total;
                best_phenotype = ph;
            }
        }
        coverage.extend(satisfactory_traits(archive));
    }

    GenerationRecord {
        generation,
        best_performance: performance(best_phenotype),
        best_total_fitness: best_total,
        satisfactory_trait_coverage: coverage.len(),
        activation_gene_coverage: if spec.kind().has_activation_gene() {
            activation_gene_coverage(pop)
        } else {
            None
        },
        largest_valley_reached: spec
            .sawtooth()
            .and_then(|p| largest_valley_reached(&best.genotype, p)),
        archive_size,
    }
}
