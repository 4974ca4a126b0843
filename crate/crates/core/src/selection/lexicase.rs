use rand::seq::SliceRandom;
use rand::Rng;

use crate::genome::Individual;

/// Candidates left after filtering the whole population by `cases` in order.
pub fn lexicase_survivors(pop: &[Individual], cases: &[usize]) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..pop.len()).collect();
    filter_pool(pop, cases, &mut pool);
    pool
}

fn filter_pool(pop: &[Individual], cases: &[usize], pool: &mut Vec<usize>) {
    for &case in cases {
        if pool.len() <= 1 {
            break;
        }
        let best = pool
            .iter()
            .map(|&i| pop[i].phenotype.traits()[case])
            .fold(f64::NEG_INFINITY, f64::max);
        pool.retain(|&i| pop[i].phenotype.traits()[case] == best);
    }
}

/// Lexicase selection with one test case per trait.
///
/// For each parent the cases are shuffled and the candidate pool is
/// filtered down to those tied for the best trait value on each case in
/// turn (exact equality). Survivors of the last filter are chosen among
/// uniformly.
pub fn lexicase_select<R: Rng + ?Sized>(pop: &[Individual], n: usize, rng: &mut R) -> Vec<usize> {
    assert!(!pop.is_empty());
    let mut order: Vec<usize> = (0..pop[0].phenotype.len()).collect();
    let mut pool: Vec<usize> = Vec::with_capacity(pop.len());
    (0..n)
        .map(|_| {
            order.shuffle(rng);
            pool.clear();
            pool.extend(0..pop.len());
            filter_pool(pop, &order, &mut pool);
            pool[rng.random_range(0..pool.len())]
        })
        .collect()
}
