//! Genome representation, initialization, and bounded point mutation.
//!
//! Genes live on the closed interval `[0, 100]`. Mutation adds a normal
//! step to a gene and reflects it back into range when it overshoots a bound.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::ConfigError;

/// Lower bound of every gene.
pub const GENE_MIN: f64 = 0.0;
/// Upper bound of every gene (and of every trait).
pub const GENE_MAX: f64 = 100.0;

/// Heritable state: one real value per trait.
#[derive(Debug, Clone, PartialEq)]
pub struct Genotype {
    genes: Vec<f64>,
}

impl Genotype {
    /// Builds a genotype, rejecting empty vectors and genes outside `[0, 100]`.
    pub fn new(genes: Vec<f64>) -> Result<Self, ConfigError> {
        if genes.is_empty() {
            return Err(ConfigError::invalid("dim", "genotype must have at least one gene"));
        }
        if let Some((i, g)) = genes
            .iter()
            .enumerate()
            .find(|(_, g)| !(GENE_MIN..=GENE_MAX).contains(*g))
        {
            return Err(ConfigError::invalid(
                "genes",
                format!("gene {i} = {g} is outside [{GENE_MIN}, {GENE_MAX}]"),
            ));
        }
        Ok(Self { genes })
    }

    pub fn genes(&self) -> &[f64] {
        &self.genes
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }
}

/// Evaluated trait vector produced by a diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct Phenotype {
    traits: Vec<f64>,
}

impl Phenotype {
    pub fn new(traits: Vec<f64>) -> Self {
        debug_assert!(traits.iter().all(|t| (-GENE_MAX..=GENE_MAX).contains(t)));
        Self { traits }
    }

    pub fn traits(&self) -> &[f64] {
        &self.traits
    }

    pub fn len(&self) -> usize {
        self.traits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traits.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.traits.iter().sum()
    }
}

/// An evaluated solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genotype: Genotype,
    pub phenotype: Phenotype,
    /// Sum of phenotype traits.
    pub total_fitness: f64,
    /// Highest gene (lowest index on ties), for diagnostics that define one.
    pub activation_gene: Option<usize>,
}

/// Fixed-size collection of evaluated individuals.
pub type Population = Vec<Individual>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutationParams {
    pub per_gene_rate: f64,
    pub step_stddev: f64,
}

impl Default for MutationParams {
    fn default() -> Self {
        Self {
            per_gene_rate: 0.007,
            step_stddev: 1.0,
        }
    }
}

impl MutationParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.per_gene_rate) {
            return Err(ConfigError::invalid(
                "mutation_rate",
                format!("{} is not a probability", self.per_gene_rate),
            ));
        }
        if !(self.step_stddev > 0.0 && self.step_stddev.is_finite()) {
            return Err(ConfigError::invalid(
                "mutation_stddev",
                format!("{} must be positive", self.step_stddev),
            ));
        }
        Ok(())
    }
}

/// Draws `dim` genes independently and uniformly from `[lo, hi)`.
pub fn random_genotype<R: Rng + ?Sized>(
    dim: usize,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> Result<Genotype, ConfigError> {
    if dim == 0 {
        return Err(ConfigError::invalid("dim", "must be at least 1"));
    }
    if !(lo < hi && lo >= GENE_MIN && hi <= GENE_MAX) {
        return Err(ConfigError::invalid(
            "init_range",
            format!("[{lo}, {hi}) is not a non-empty sub-interval of [{GENE_MIN}, {GENE_MAX}]"),
        ));
    }
    let genes = (0..dim).map(|_| rng.random_range(lo..hi)).collect();
    Ok(Genotype { genes })
}

/// Reflects `value` once across whichever bound it violates, then clamps.
///
/// A mutation to -0.7 becomes 0.7 and a mutation to 100.7 becomes 99.3.
pub fn rebound(value: f64, lo: f64, hi: f64) -> f64 {
    debug_assert!(hi > lo);
    let reflected = if value < lo {
        lo + (lo - value)
    } else if value > hi {
        hi - (value - hi)
    } else {
        value
    };
    reflected.clamp(lo, hi)
}

/// Copies `g`, perturbing each gene with probability `per_gene_rate`.
pub fn mutate<R: Rng + ?Sized>(g: &Genotype, params: &MutationParams, rng: &mut R) -> Genotype {
    let step = Normal::new(0.0, params.step_stddev).expect("step_stddev validated positive");
    let genes = g
        .genes
        .iter()
        .map(|&gene| {
            if rng.random_bool(params.per_gene_rate) {
                rebound(gene + step.sample(rng), GENE_MIN, GENE_MAX)
            } else {
                gene
            }
        })
        .collect();
    Genotype { genes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rebound_reflects_across_bounds() {
        assert!((rebound(-0.7, 0.0, 100.0) - 0.7).abs() < 1e-12);
        assert!((rebound(100.7, 0.0, 100.0) - 99.3).abs() < 1e-12);
        assert_eq!(rebound(50.0, 0.0, 100.0), 50.0);
        assert_eq!(rebound(0.0, 0.0, 100.0), 0.0);
        assert_eq!(rebound(100.0, 0.0, 100.0), 100.0);
        // overshoot past a full width is clamped
        assert_eq!(rebound(-250.0, 0.0, 100.0), 100.0);
    }

    #[test]
    fn random_genotype_respects_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_genotype(100, 0.0, 1.0, &mut rng).unwrap();
        assert_eq!(g.len(), 100);
        assert!(g.genes().iter().all(|&x| (0.0..1.0).contains(&x)));
    }

    #[test]
    fn random_genotype_rejects_empty_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(random_genotype(3, 0.0, 0.0, &mut rng).is_err());
        assert!(random_genotype(3, 1.0, 0.5, &mut rng).is_err());
        assert!(random_genotype(3, -1.0, 0.5, &mut rng).is_err());
        assert!(random_genotype(0, 0.0, 1.0, &mut rng).is_err());
    }

    #[test]
    fn random_genotype_is_seed_deterministic() {
        let a = random_genotype(5, 0.0, 1.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = random_genotype(5, 0.0, 1.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_rate_mutation_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_genotype(50, 0.0, 100.0, &mut rng).unwrap();
        let params = MutationParams {
            per_gene_rate: 0.0,
            step_stddev: 1.0,
        };
        assert_eq!(mutate(&g, &params, &mut rng), g);
    }

    #[test]
    fn tiny_variance_mutation_is_near_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = random_genotype(50, 10.0, 90.0, &mut rng).unwrap();
        let params = MutationParams {
            per_gene_rate: 1.0,
            step_stddev: 1e-12,
        };
        let m = mutate(&g, &params, &mut rng);
        for (a, b) in g.genes().iter().zip(m.genes()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn mutation_step_matches_half_normal_mean() {
        // E|N(0,1)| = sqrt(2/pi); genes start mid-range so rebound never fires
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = Genotype::new(vec![50.0; 10_000]).unwrap();
        let params = MutationParams {
            per_gene_rate: 1.0,
            step_stddev: 1.0,
        };
        let m = mutate(&g, &params, &mut rng);
        let mean: f64 = g
            .genes()
            .iter()
            .zip(m.genes())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 10_000.0;
        let expected = (2.0 / std::f64::consts::PI).sqrt();
        assert!((mean - expected).abs() / expected < 0.05, "mean {mean}");
    }

    #[test]
    fn mutation_params_validation() {
        assert!(MutationParams::default().validate().is_ok());
        assert!(MutationParams { per_gene_rate: 1.5, step_stddev: 1.0 }.validate().is_err());
        assert!(MutationParams { per_gene_rate: 0.1, step_stddev: 0.0 }.validate().is_err());
    }

    #[test]
    fn boundary_fuzz_never_escapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let params = MutationParams {
            per_gene_rate: 1.0,
            step_stddev: 1.0,
        };
        for start in [0.0, 100.0] {
            let g = Genotype::new(vec![start; 1_000_000]).unwrap();
            let m = mutate(&g, &params, &mut rng);
            assert!(m.genes().iter().all(|x| (GENE_MIN..=GENE_MAX).contains(x)));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rebound_is_identity_in_range(v in 0.0f64..=100.0) {
                prop_assert_eq!(rebound(v, 0.0, 100.0), v);
            }

            #[test]
            fn rebound_maps_extended_range_inside(v in -100.0f64..=200.0) {
                let r = rebound(v, 0.0, 100.0);
                prop_assert!((0.0..=100.0).contains(&r));
            }
        }
    }
}
