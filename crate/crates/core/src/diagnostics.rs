//! Genotype to phenotype translation functions.
//!
//! Four base diagnostics isolate exploitation, constrained exploitation,
//! contradictory objectives, and multi-path exploration. Each has a
//! valley-crossing variant that passes every would-be trait through a
//! sawtooth transform.

use std::fmt;
use std::str::FromStr;

use crate::error::ConfigError;
use crate::genome::{Genotype, Individual, Phenotype, GENE_MAX};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagnosticKind {
    ExploitationRate,
    OrderedExploitation,
    ContradictoryObjectives,
    MultiPathExploration,
    ValleyCrossing,
    OrderedExploitationValleys,
    ContradictoryObjectivesValleys,
    MultiPathValleys,
}

impl DiagnosticKind {
    pub const ALL: [DiagnosticKind; 8] = [
        DiagnosticKind::ExploitationRate,
        DiagnosticKind::OrderedExploitation,
        DiagnosticKind::ContradictoryObjectives,
        DiagnosticKind::MultiPathExploration,
        DiagnosticKind::ValleyCrossing,
        DiagnosticKind::OrderedExploitationValleys,
        DiagnosticKind::ContradictoryObjectivesValleys,
        DiagnosticKind::MultiPathValleys,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DiagnosticKind::ExploitationRate => "exploitation-rate",
            DiagnosticKind::OrderedExploitation => "ordered-exploitation",
            DiagnosticKind::ContradictoryObjectives => "contradictory-objectives",
            DiagnosticKind::MultiPathExploration => "multipath-exploration",
            DiagnosticKind::ValleyCrossing => "valley-crossing",
            DiagnosticKind::OrderedExploitationValleys => "ordered-exploitation-valleys",
            DiagnosticKind::ContradictoryObjectivesValleys => "contradictory-objectives-valleys",
            DiagnosticKind::MultiPathValleys => "multipath-valleys",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            DiagnosticKind::ExploitationRate => "every gene copied to its trait; pure hill climbing",
            DiagnosticKind::OrderedExploitation => {
                "leading non-increasing run of genes is expressed; constrained exploitation"
            }
            DiagnosticKind::ContradictoryObjectives => {
                "only the highest gene is expressed; one optimum per trait"
            }
            DiagnosticKind::MultiPathExploration => {
                "non-increasing run starting at the highest gene; gradients of differing length"
            }
            DiagnosticKind::ValleyCrossing => "exploitation rate with sawtooth valleys",
            DiagnosticKind::OrderedExploitationValleys => {
                "ordered exploitation with sawtooth valleys"
            }
            DiagnosticKind::ContradictoryObjectivesValleys => {
                "contradictory objectives with sawtooth valleys"
            }
            DiagnosticKind::MultiPathValleys => "multi-path exploration with sawtooth valleys",
        }
    }

    /// The underlying valley-free diagnostic.
    pub fn base(self) -> DiagnosticKind {
        match self {
            DiagnosticKind::ValleyCrossing => DiagnosticKind::ExploitationRate,
            DiagnosticKind::OrderedExploitationValleys => DiagnosticKind::OrderedExploitation,
            DiagnosticKind::ContradictoryObjectivesValleys => {
                DiagnosticKind::ContradictoryObjectives
            }
            DiagnosticKind::MultiPathValleys => DiagnosticKind::MultiPathExploration,
            base => base,
        }
    }

    pub fn has_valleys(self) -> bool {
        self.base() != self
    }

    pub fn has_activation_gene(self) -> bool {
        matches!(
            self.base(),
            DiagnosticKind::ContradictoryObjectives | DiagnosticKind::MultiPathExploration
        )
    }
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DiagnosticKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DiagnosticKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ConfigError::UnknownName {
                what: "diagnostic",
                name: s.to_string(),
                valid: DiagnosticKind::ALL.map(|k| k.name()).join(", "),
            })
    }
}

/// Peak gene values of the sawtooth for the default parameters.
pub const DEFAULT_PEAKS: [f64; 14] = [
    8.0, 9.0, 11.0, 14.0, 18.0, 23.0, 29.0, 36.0, 44.0, 53.0, 63.0, 74.0, 86.0, 99.0,
];

/// Sawtooth valley layout: identity up to `v_initial`, then peaks separated
/// by valleys of width 1, 2, 3, ... descending with slope -1.
#[derive(Debug, Clone, PartialEq)]
pub struct SawtoothParams {
    v_initial: f64,
    upper: f64,
    peaks: Vec<f64>,
}

impl SawtoothParams {
    pub fn new(v_initial: f64, upper: f64) -> Result<Self, ConfigError> {
        if !(v_initial > 0.0 && v_initial < upper) {
            return Err(ConfigError::invalid(
                "v_initial",
                format!("{v_initial} must lie in (0, {upper})"),
            ));
        }
        let peaks: Vec<f64> = (0u32..)
            .map(|k| v_initial + f64::from(k * (k + 1) / 2))
            .take_while(|&p| p <= upper)
            .collect();
        Ok(Self {
            v_initial,
            upper,
            peaks,
        })
    }

    pub fn v_initial(&self) -> f64 {
        self.v_initial
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn peaks(&self) -> &[f64] {
        &self.peaks
    }

    /// Index of the last peak at or below `v`, if any.
    pub fn last_peak_index(&self, v: f64) -> Option<usize> {
        self.peaks.partition_point(|&p| p <= v).checked_sub(1)
    }
}

impl Default for SawtoothParams {
    fn default() -> Self {
        let params = Self::new(8.0, GENE_MAX).expect("default sawtooth parameters are valid");
        assert_eq!(params.peaks, DEFAULT_PEAKS);
        params
    }
}

/// Sawtooth transform of a single would-be trait value.
pub fn sawtooth(v: f64, p: &SawtoothParams) -> f64 {
    assert!(
        (0.0..=p.upper).contains(&v),
        "sawtooth input {v} outside [0, {}]",
        p.upper
    );
    match p.last_peak_index(v) {
        None => v,
        Some(k) => {
            let peak = p.peaks[k];
            peak - (v - peak)
        }
    }
}

/// Trait i equals gene i.
pub fn exploitation_rate(g: &Genotype) -> Phenotype {
    Phenotype::new(g.genes().to_vec())
}

/// Length of the non-increasing run of `genes` starting at `start`.
fn non_increasing_run(genes: &[f64], start: usize) -> usize {
    1 + genes[start..]
        .windows(2)
        .take_while(|w| w[1] <= w[0])
        .count()
}

fn copy_region(genes: &[f64], start: usize, len: usize) -> Phenotype {
    let mut traits = vec![0.0; genes.len()];
    traits[start..start + len].copy_from_slice(&genes[start..start + len]);
    Phenotype::new(traits)
}

/// Expresses only the leading non-increasing prefix of the genotype.
pub fn ordered_exploitation(g: &Genotype) -> Phenotype {
    let genes = g.genes();
    copy_region(genes, 0, non_increasing_run(genes, 0))
}

/// Index of the highest gene; ties go to the lowest index.
pub fn activation_gene(g: &Genotype) -> usize {
    let genes = g.genes();
    let mut best = 0;
    for (i, &v) in genes.iter().enumerate().skip(1) {
        if v > genes[best] {
            best = i;
        }
    }
    best
}

/// Expresses only the highest gene.
pub fn contradictory_objectives(g: &Genotype) -> (Phenotype, usize) {
    let a = activation_gene(g);
    (copy_region(g.genes(), a, 1), a)
}

/// Expresses the non-increasing run that starts at the highest gene.
pub fn multipath_exploration(g: &Genotype) -> (Phenotype, usize) {
    let genes = g.genes();
    let a = activation_gene(g);
    (copy_region(genes, a, non_increasing_run(genes, a)), a)
}

/// Applies the sawtooth trait-wise. Inactive (zero) traits stay zero.
pub fn apply_valleys(base: &Phenotype, p: &SawtoothParams) -> Phenotype {
    Phenotype::new(base.traits().iter().map(|&t| sawtooth(t, p)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticSpec {
    kind: DiagnosticKind,
    sawtooth: Option<SawtoothParams>,
}

impl DiagnosticSpec {
    /// Spec for `kind`, with default sawtooth parameters for valley variants.
    pub fn new(kind: DiagnosticKind) -> Self {
        let sawtooth = kind.has_valleys().then(SawtoothParams::default);
        Self { kind, sawtooth }
    }

    pub fn with_sawtooth(kind: DiagnosticKind, params: SawtoothParams) -> Result<Self, ConfigError> {
        if !kind.has_valleys() {
            return Err(ConfigError::invalid(
                "diagnostic",
                format!("{kind} has no valleys to parameterize"),
            ));
        }
        Ok(Self {
            kind,
            sawtooth: Some(params),
        })
    }

    pub fn kind(&self) -> DiagnosticKind {
        self.kind
    }

    pub fn sawtooth(&self) -> Option<&SawtoothParams> {
        self.sawtooth.as_ref()
    }

    /// Translates a genotype and caches its aggregates.
    pub fn evaluate(&self, g: &Genotype) -> Individual {
        let (base, activation) = match self.kind.base() {
            DiagnosticKind::ExploitationRate => (exploitation_rate(g), None),
            DiagnosticKind::OrderedExploitation => (ordered_exploitation(g), None),
            DiagnosticKind::ContradictoryObjectives => {
                let (ph, a) = contradictory_objectives(g);
                (ph, Some(a))
            }
            DiagnosticKind::MultiPathExploration => {
                let (ph, a) = multipath_exploration(g);
                (ph, Some(a))
            }
            _ => unreachable!("base() always yields a valley-free diagnostic"),
        };
        let phenotype = match &self.sawtooth {
            Some(p) => apply_valleys(&base, p),
            None => base,
        };
        Individual {
            genotype: g.clone(),
            total_fitness: phenotype.sum(),
            phenotype,
            activation_gene: activation,
        }
    }
}
