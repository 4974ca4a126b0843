use rand::seq::SliceRandom;
use rand::Rng;

use super::argmax_random_tie;
use crate::genome::Individual;

/// Gives the `tr` highest total-fitness individuals `n / tr` offspring each.
///
/// Fitness ties are settled randomly. When `tr` does not divide `n`, the
/// leftover slots go round-robin from the top rank down.
pub fn truncation_select<R: Rng + ?Sized>(
    pop: &[Individual],
    tr: usize,
    n: usize,
    rng: &mut R,
) -> Vec<usize> {
    assert!(
        (1..=pop.len()).contains(&tr),
        "truncation size {tr} outside [1, {}]",
        pop.len()
    );
    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.shuffle(rng);
    order.sort_by(|&a, &b| pop[b].total_fitness.total_cmp(&pop[a].total_fitness));
    let top = &order[..tr];

    let share = n / tr;
    let extra = n % tr;
    let mut parents = Vec::with_capacity(n);
    for (rank, &i) in top.iter().enumerate() {
        let slots = share + usize::from(rank < extra);
        parents.extend(std::iter::repeat_n(i, slots));
    }
    parents
}

/// Runs `n` tournaments of `ts` members sampled with replacement.
pub fn tournament_select<R: Rng + ?Sized>(
    pop: &[Individual],
    ts: usize,
    n: usize,
    rng: &mut R,
) -> Vec<usize> {
    assert!(ts >= 1 && !pop.is_empty());
    let mut entrants = vec![0usize; ts];
    (0..n)
        .map(|_| {
            for e in entrants.iter_mut() {
                *e = rng.random_range(0..pop.len());
            }
            argmax_random_tie(entrants.iter().copied(), |i| pop[i].total_fitness, rng)
        })
        .collect()
}

/// Uniform parents with replacement.
pub fn random_select<R: Rng + ?Sized>(pop_size: usize, n: usize, rng: &mut R) -> Vec<usize> {
    assert!(pop_size >= 1);
    (0..n).map(|_| rng.random_range(0..pop_size)).collect()
}
