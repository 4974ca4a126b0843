//! Generational loop: evaluate, record, select, reproduce.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::{DiagnosticKind, DiagnosticSpec};
use crate::error::ConfigError;
use crate::genome::{mutate, random_genotype, MutationParams, Population};
use crate::metrics::{is_satisfactory_solution, snapshot, GenerationRecord};
use crate::selection::{SchemeKind, SchemeParams, Selector};

/// RNG driving one replicate. Initialization, selection, and mutation all
/// draw from it in a fixed order.
pub type ReplicateRng = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateConfig {
    pub diagnostic: DiagnosticSpec,
    pub scheme: SchemeParams,
    pub pop_size: usize,
    pub generations: usize,
    pub dim: usize,
    pub mutation: MutationParams,
    pub init_range: (f64, f64),
    pub seed: u64,
    pub record_stride: usize,
    /// Let novelty archive phenotypes count toward performance and coverage.
    pub include_archive: bool,
}

impl ReplicateConfig {
    pub fn new(diagnostic: DiagnosticKind, scheme: SchemeKind) -> Self {
        Self {
            diagnostic: DiagnosticSpec::new(diagnostic),
            scheme: SchemeParams::new(scheme),
            pop_size: 512,
            generations: 50_000,
            dim: 100,
            mutation: MutationParams::default(),
            init_range: (0.0, 1.0),
            seed: 0,
            record_stride: 1,
            include_archive: true,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.pop_size == 0 {
            return Err(ConfigError::invalid("pop_size", "must be at least 1"));
        }
        if self.generations == 0 {
            return Err(ConfigError::invalid("generations", "must be at least 1"));
        }
        if self.dim == 0 {
            return Err(ConfigError::invalid("dim", "must be at least 1"));
        }
        if self.record_stride == 0 {
            return Err(ConfigError::invalid("stride", "must be at least 1"));
        }
        let (lo, hi) = self.init_range;
        if !(lo < hi && lo >= 0.0 && hi <= 100.0) {
            return Err(ConfigError::invalid(
                "init_range",
                format!("[{lo}, {hi}) is not a non-empty sub-interval of [0, 100]"),
            ));
        }
        self.mutation.validate()?;
        self.scheme.validate(self.pop_size)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateResult {
    pub records: Vec<GenerationRecord>,
    /// First generation holding a solution with every trait satisfactory.
    pub satisfactory_generation: Option<usize>,
    pub final_population: Population,
}

impl ReplicateResult {
    pub fn final_record(&self) -> &GenerationRecord {
        self.records.last().expect("every replicate records generation 0")
    }
}

/// Produces the next generation: select `N` parents, mutate a copy of each,
/// and evaluate the offspring.
pub fn run_generation<R: Rng + ?Sized>(
    pop: &Population,
    diagnostic: &DiagnosticSpec,
    mutation: &MutationParams,
    selector: &mut Selector,
    rng: &mut R,
) -> Population {
    let parents = selector.select(pop, pop.len(), rng);
    parents
        .into_iter()
        .map(|p| diagnostic.evaluate(&mutate(&pop[p].genotype, mutation, rng)))
        .collect()
}

/// A replicate in progress.
#[derive(Debug, Clone)]
pub struct Replicate {
    config: ReplicateConfig,
    selector: Selector,
    rng: ReplicateRng,
    population: Population,
    generation: usize,
}

impl Replicate {
    /// Seeds the RNG and evaluates a random initial population.
    pub fn new(config: ReplicateConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let mut rng = ReplicateRng::seed_from_u64(config.seed);
        let (lo, hi) = config.init_range;
        let population = (0..config.pop_size)
            .map(|_| random_genotype(config.dim, lo, hi, &mut rng).map(|g| config.diagnostic.evaluate(&g)))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            selector: Selector::new(config.scheme.clone()),
            config,
            rng,
            population,
            generation: 0,
        })
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn selector(&self) -> &Selector {
        &self.selector
    }

    pub fn step(&mut self) {
        self.population = run_generation(
            &self.population,
            &self.config.diagnostic,
            &self.config.mutation,
            &mut self.selector,
            &mut self.rng,
        );
        self.generation += 1;
    }

    pub fn record(&self) -> GenerationRecord {
        let archive = self.selector.archive();
        snapshot(
            &self.population,
            self.generation,
            &self.config.diagnostic,
            archive
                .filter(|_| self.config.include_archive)
                .map(|a| a.entries()),
            archive.map(|a| a.len()),
        )
    }

    fn has_satisfactory_solution(&self) -> bool {
        self.population
            .iter()
            .any(|i| is_satisfactory_solution(&i.phenotype))
    }

    /// Runs every remaining generation and collects the results.
    pub fn run(mut self) -> ReplicateResult {
        let total = self.config.generations;
        let stride = self.config.record_stride;
        let mut records = Vec::with_capacity(total / stride + 2);
        let mut satisfactory_generation = None;
        loop {
            let g = self.generation;
            if satisfactory_generation.is_none() && self.has_satisfactory_solution() {
                satisfactory_generation = Some(g);
            }
            if g.is_multiple_of(stride) || g == total {
                records.push(self.record());
            }
            if g == total {
                break;
            }
            self.step();
        }
        ReplicateResult {
            records,
            satisfactory_generation,
            final_population: self.population,
        }
    }
}

/// Runs a whole replicate from its configuration.
pub fn run_replicate(config: ReplicateConfig) -> Result<ReplicateResult, ConfigError> {
    Ok(Replicate::new(config)?.run())
}
