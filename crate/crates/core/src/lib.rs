//! Diagnostic search spaces and selection schemes for studying how parent
//! selection trades off exploitation and exploration.
//!
//! The crate is organized bottom-up:
//!
//! - [`genome`]: bounded real-valued genotypes and point mutation
//! - [`diagnostics`]: the eight genotype-to-phenotype translation functions
//! - [`selection`]: truncation, tournament, fitness sharing, lexicase,
//!   nondominated sorting, novelty search, and a random control
//! - [`evolve`]: the generational loop for one replicate
//! - [`metrics`]: per-generation tracking
//! - [`stats`]: Kruskal-Wallis, Wilcoxon rank-sum, Bonferroni

pub mod diagnostics;
mod error;
pub mod evolve;
pub mod genome;
pub mod metrics;
pub mod selection;
pub mod stats;

pub use error::ConfigError;
