//! Parent selection schemes.
//!
//! Every scheme maps an evaluated population onto `n` parent indices,
//! drawn with replacement.

mod lexicase;
mod nsga;
mod novelty;
mod sharing;
mod simple;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::ConfigError;
use crate::genome::Individual;

pub use lexicase::{lexicase_select, lexicase_survivors};
pub use nsga::{dominates, nondominated_fronts, nsga_select, nsga_shared_fitness, FrontAssignment};
pub use novelty::{novelty_scores, novelty_select, NoveltyArchive, NoveltyParams};
pub use sharing::{
    fitness_sharing_select, niche_count, niche_counts, sharing_kernel, stochastic_remainder,
    SimilarityMetric,
};
pub use simple::{random_select, tournament_select, truncation_select};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    Truncation,
    Tournament,
    FitnessSharingGenotypic,
    FitnessSharingPhenotypic,
    Lexicase,
    NondominatedSorting,
    NoveltySearch,
    Random,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 8] = [
        SchemeKind::Truncation,
        SchemeKind::Tournament,
        SchemeKind::FitnessSharingGenotypic,
        SchemeKind::FitnessSharingPhenotypic,
        SchemeKind::Lexicase,
        SchemeKind::NondominatedSorting,
        SchemeKind::NoveltySearch,
        SchemeKind::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Truncation => "truncation",
            SchemeKind::Tournament => "tournament",
            SchemeKind::FitnessSharingGenotypic => "sharing-genotypic",
            SchemeKind::FitnessSharingPhenotypic => "sharing-phenotypic",
            SchemeKind::Lexicase => "lexicase",
            SchemeKind::NondominatedSorting => "nsga",
            SchemeKind::NoveltySearch => "novelty",
            SchemeKind::Random => "random",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            SchemeKind::Truncation => "top `tr` by total fitness each get an equal share of offspring",
            SchemeKind::Tournament => "best total fitness out of `ts` uniform draws",
            SchemeKind::FitnessSharingGenotypic => {
                "stochastic remainder on fitness shared by genotype distance"
            }
            SchemeKind::FitnessSharingPhenotypic => {
                "stochastic remainder on fitness shared by phenotype distance"
            }
            SchemeKind::Lexicase => "filter by shuffled traits, keeping only the best on each",
            SchemeKind::NondominatedSorting => {
                "nondominated fronts with phenotypic sharing inside each front"
            }
            SchemeKind::NoveltySearch => "size-2 tournaments on k-nearest novelty with an archive",
            SchemeKind::Random => "uniform random parents (control)",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ConfigError::UnknownName {
                what: "scheme",
                name: s.to_string(),
                valid: SchemeKind::ALL.map(|k| k.name()).join(", "),
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeParams {
    pub kind: SchemeKind,
    /// Truncation size.
    pub truncation_size: usize,
    /// Tournament size.
    pub tournament_size: usize,
    /// Sharing radius, as a fraction of the search-space diameter when
    /// `normalize_distance` is set.
    pub sigma: f64,
    /// Sharing kernel shape.
    pub alpha: f64,
    pub normalize_distance: bool,
    pub novelty: NoveltyParams,
}

impl SchemeParams {
    pub fn new(kind: SchemeKind) -> Self {
        Self {
            kind,
            truncation_size: 8,
            tournament_size: 8,
            sigma: 0.3,
            alpha: 1.0,
            normalize_distance: true,
            novelty: NoveltyParams::default(),
        }
    }

    pub fn validate(&self, pop_size: usize) -> Result<(), ConfigError> {
        if !(1..=pop_size).contains(&self.truncation_size) {
            return Err(ConfigError::invalid(
                "truncation_size",
                format!("{} must lie in [1, {pop_size}]", self.truncation_size),
            ));
        }
        if !(1..=pop_size).contains(&self.tournament_size) {
            return Err(ConfigError::invalid(
                "tournament_size",
                format!("{} must lie in [1, {pop_size}]", self.tournament_size),
            ));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(ConfigError::invalid("sigma", format!("{} must be >= 0", self.sigma)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(ConfigError::invalid("alpha", format!("{} must be > 0", self.alpha)));
        }
        self.novelty.validate()
    }
}

/// A configured scheme plus whatever state it carries across generations.
#[derive(Debug, Clone)]
pub struct Selector {
    params: SchemeParams,
    archive: Option<NoveltyArchive>,
}

impl Selector {
    pub fn new(params: SchemeParams) -> Self {
        let archive = (params.kind == SchemeKind::NoveltySearch)
            .then(|| NoveltyArchive::new(&params.novelty));
        Self { params, archive }
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    /// Novelty archive, when the scheme keeps one.
    pub fn archive(&self) -> Option<&NoveltyArchive> {
        self.archive.as_ref()
    }

    pub fn select<R: Rng + ?Sized>(
        &mut self,
        pop: &[Individual],
        n: usize,
        rng: &mut R,
    ) -> Vec<usize> {
        let p = &self.params;
        match p.kind {
            SchemeKind::Truncation => truncation_select(pop, p.truncation_size, n, rng),
            SchemeKind::Tournament => tournament_select(pop, p.tournament_size, n, rng),
            SchemeKind::FitnessSharingGenotypic => fitness_sharing_select(
                pop,
                SimilarityMetric::Genotypic,
                p.sigma,
                p.alpha,
                p.normalize_distance,
                n,
                rng,
            ),
            SchemeKind::FitnessSharingPhenotypic => fitness_sharing_select(
                pop,
                SimilarityMetric::Phenotypic,
                p.sigma,
                p.alpha,
                p.normalize_distance,
                n,
                rng,
            ),
            SchemeKind::Lexicase => lexicase_select(pop, n, rng),
            SchemeKind::NondominatedSorting => {
                nsga_select(pop, p.sigma, p.alpha, p.normalize_distance, n, rng)
            }
            SchemeKind::NoveltySearch => {
                let archive = self
                    .archive
                    .as_mut()
                    .expect("novelty selector always owns an archive");
                novelty_select(pop, &p.novelty, archive, n, rng)
            }
            SchemeKind::Random => random_select(pop.len(), n, rng),
        }
    }
}

/// Index of the maximum of `values`, with ties broken uniformly at random.
pub(crate) fn argmax_random_tie<R: Rng + ?Sized>(
    candidates: impl IntoIterator<Item = usize>,
    value: impl Fn(usize) -> f64,
    rng: &mut R,
) -> usize {
    let mut best = None;
    let mut best_val = f64::NEG_INFINITY;
    let mut ties = 0u32;
    for i in candidates {
        let v = value(i);
        if best.is_none() || v > best_val {
            best = Some(i);
            best_val = v;
            ties = 1;
        } else if v == best_val {
            ties += 1;
            if rng.random_range(0..ties) == 0 {
                best = Some(i);
            }
        }
    }
    best.expect("argmax over an empty candidate set")
}
