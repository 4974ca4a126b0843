use rand::Rng;

use super::sharing::{niche_counts_among, stochastic_remainder, SimilarityMetric};
use crate::genome::{Individual, Phenotype};

/// Factor applied to a front's smallest shared fitness to obtain the dummy
/// fitness of the next front.
pub const FRONT_DECAY: f64 = 0.99;

/// Nondominated fronts plus the shared fitness each member ends up with.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontAssignment {
    /// Front 0 is the nondominated set.
    pub fronts: Vec<Vec<usize>>,
    pub shared_fitness: Vec<f64>,
}

/// Pareto dominance: `x` is no worse on every trait and better on one.
pub fn dominates(x: &Phenotype, y: &Phenotype) -> bool {
    assert_eq!(x.len(), y.len(), "phenotype length mismatch");
    let mut strictly = false;
    for (a, b) in x.traits().iter().zip(y.traits()) {
        if a < b {
            return false;
        }
        strictly |= a > b;
    }
    strictly
}

/// Peels the population into successive nondominated fronts.
pub fn nondominated_fronts(pop: &[Individual]) -> Vec<Vec<usize>> {
    let n = pop.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if dominates(&pop[i].phenotype, &pop[j].phenotype) {
                dominates_list[i].push(j);
                dominated_by[j] += 1;
            } else if dominates(&pop[j].phenotype, &pop[i].phenotype) {
                dominates_list[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Front ranking with phenotypic sharing inside each front.
///
/// Front 0 starts from a dummy fitness equal to the population size; each
/// later front starts just below the smallest shared fitness of the front
/// before it.
pub fn nsga_shared_fitness(
    pop: &[Individual],
    sigma: f64,
    alpha: f64,
    normalize: bool,
) -> FrontAssignment {
    let fronts = nondominated_fronts(pop);
    let mut shared_fitness = vec![0.0; pop.len()];
    let mut dummy = pop.len() as f64;
    for front in &fronts {
        let m = niche_counts_among(pop, front, SimilarityMetric::Phenotypic, sigma, alpha, normalize);
        let mut lowest = f64::INFINITY;
        for (&i, m) in front.iter().zip(&m) {
            let f = dummy / m;
            shared_fitness[i] = f;
            lowest = lowest.min(f);
        }
        dummy = FRONT_DECAY * lowest;
    }
    FrontAssignment {
        fronts,
        shared_fitness,
    }
}

pub fn nsga_select<R: Rng + ?Sized>(
    pop: &[Individual],
    sigma: f64,
    alpha: f64,
    normalize: bool,
    n: usize,
    rng: &mut R,
) -> Vec<usize> {
    let assignment = nsga_shared_fitness(pop, sigma, alpha, normalize);
    stochastic_remainder(&assignment.shared_fitness, n, rng)
}
