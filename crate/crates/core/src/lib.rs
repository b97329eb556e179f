//! Triadic closure in undirected multi-edge networks.
//!
//! The crate computes min-weighted shared-partner statistics and tests them
//! with two dyadic models: generalized hypergeometric ensembles
//! ([`ghype`]) and a dyad-independent Poisson count model ([`countmodel`]).

pub mod countmodel;
pub mod datasets;
pub mod error;
pub mod ghype;
pub mod mle;
pub mod multigraph;
pub mod quadrature;
pub mod report;
pub mod statistics;
pub mod synth;

pub use error::{Error, Result};
pub use mle::{Coefficient, FitResult};
pub use multigraph::{DegreeSequence, EdgeRow, MultiEdgeNetwork};
pub use statistics::{StatisticKind, StatisticMatrix, StatisticSpec};
