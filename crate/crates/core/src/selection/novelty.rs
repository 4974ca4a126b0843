use rand::Rng;

use super::argmax_random_tie;
use super::sharing::euclidean;
use crate::error::ConfigError;
use crate::genome::{Individual, Phenotype};

#[derive(Debug, Clone, PartialEq)]
pub struct NoveltyParams {
    /// Neighbors averaged in a novelty score.
    pub k: usize,
    /// Starting archive admission threshold.
    pub initial_pmin: f64,
    /// A random phenotype is archived with probability `1 / save_period` per generation.
    pub save_period: usize,
    /// More admissions than this in one generation raise the threshold.
    pub burst_limit: usize,
    pub raise_factor: f64,
    /// Generations without an admission before the threshold is lowered.
    pub stall_window: usize,
    pub decay_factor: f64,
    pub tournament_size: usize,
}

impl Default for NoveltyParams {
    fn default() -> Self {
        Self {
            k: 15,
            initial_pmin: 10.0,
            save_period: 200,
            burst_limit: 4,
            raise_factor: 1.25,
            stall_window: 500,
            decay_factor: 0.95,
            tournament_size: 2,
        }
    }
}

impl NoveltyParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.k == 0 {
            return Err(ConfigError::invalid("novelty_k", "must be at least 1"));
        }
        if !(self.initial_pmin > 0.0 && self.initial_pmin.is_finite()) {
            return Err(ConfigError::invalid("novelty_pmin", "must be positive"));
        }
        if self.save_period == 0 || self.stall_window == 0 || self.tournament_size == 0 {
            return Err(ConfigError::invalid(
                "novelty",
                "save period, stall window and tournament size must be at least 1",
            ));
        }
        if !(self.raise_factor > 0.0 && self.decay_factor > 0.0) {
            return Err(ConfigError::invalid("novelty", "threshold factors must be positive"));
        }
        Ok(())
    }
}

/// Per-replicate novelty state: an append-only phenotype archive and its
/// adaptive admission threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct NoveltyArchive {
    pmin: f64,
    entries: Vec<Phenotype>,
    generations_since_add: usize,
}

impl NoveltyArchive {
    pub fn new(params: &NoveltyParams) -> Self {
        Self::with_entries(params, Vec::new())
    }

    pub fn with_entries(params: &NoveltyParams, entries: Vec<Phenotype>) -> Self {
        Self {
            pmin: params.initial_pmin,
            entries,
            generations_since_add: 0,
        }
    }

    pub fn pmin(&self) -> f64 {
        self.pmin
    }

    pub fn entries(&self) -> &[Phenotype] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Admits every phenotype scoring above the threshold, adapts the
    /// threshold, and occasionally archives a random member.
    pub fn update<R: Rng + ?Sized>(
        &mut self,
        pop: &[Individual],
        scores: &[f64],
        params: &NoveltyParams,
        rng: &mut R,
    ) {
        let pmin = self.pmin;
        let before = self.entries.len();
        self.entries.extend(
            pop.iter()
                .zip(scores)
                .filter(|(_, &s)| s > pmin)
                .map(|(ind, _)| ind.phenotype.clone()),
        );
        let added = self.entries.len() - before;

        if added > params.burst_limit {
            self.pmin *= params.raise_factor;
        }
        if added > 0 {
            self.generations_since_add = 0;
        } else {
            self.generations_since_add += 1;
            if self.generations_since_add >= params.stall_window {
                self.pmin *= params.decay_factor;
                self.generations_since_add = 0;
            }
        }

        if rng.random_bool(1.0 / params.save_period as f64) {
            let pick = rng.random_range(0..pop.len());
            self.entries.push(pop[pick].phenotype.clone());
        }
    }
}

/// Mean distance from each member to its `k` nearest phenotypes among the
/// rest of the population and the archive.
pub fn novelty_scores(pop: &[Individual], archive: &[Phenotype], k: usize) -> Vec<f64> {
    let n = pop.len();
    let mut pairwise = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = euclidean(pop[i].phenotype.traits(), pop[j].phenotype.traits());
            pairwise[i * n + j] = d;
            pairwise[j * n + i] = d;
        }
    }

    let mut dists = Vec::with_capacity(n + archive.len());
    (0..n)
        .map(|i| {
            dists.clear();
            dists.extend((0..n).filter(|&j| j != i).map(|j| pairwise[i * n + j]));
            let x = pop[i].phenotype.traits();
            dists.extend(archive.iter().map(|a| euclidean(x, a.traits())));
            if dists.is_empty() {
                return 0.0;
            }
            let take = k.min(dists.len());
            if take < dists.len() {
                dists.select_nth_unstable_by(take - 1, f64::total_cmp);
            }
            dists[..take].iter().sum::<f64>() / take as f64
        })
        .collect()
}

/// Scores the population, updates the archive, then runs `n` novelty
/// tournaments.
pub fn novelty_select<R: Rng + ?Sized>(
    pop: &[Individual],
    params: &NoveltyParams,
    archive: &mut NoveltyArchive,
    n: usize,
    rng: &mut R,
) -> Vec<usize> {
    let scores = novelty_scores(pop, archive.entries(), params.k);
    archive.update(pop, &scores, params, rng);
    let mut entrants = vec![0usize; params.tournament_size];
    (0..n)
        .map(|_| {
            for e in entrants.iter_mut() {
                *e = rng.random_range(0..pop.len());
            }
            argmax_random_tie(entrants.iter().copied(), |i| scores[i], rng)
        })
        .collect()
}
