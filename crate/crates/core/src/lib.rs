//! Reaction-network analysis: exact classification of endotactic networks,
//! Birch points, mass-action simulation and jet experiments.

pub mod birch;
pub mod classify;
pub mod dynamics;
pub mod fixtures;
pub mod geometry;
pub mod graph;
pub mod jets;
pub mod network;
pub mod parse;
pub mod report;
pub mod stoich;
pub mod svg;

pub use network::{Complex, FloatNetwork, Interval, Reaction, ReactionNetwork, Species, Tempering};
pub use parse::{parse_network, ParseError, ParsedNetwork};
pub use stoich::{stoichiometric_subspace, InvariantPolyhedron, StoichiometryInfo};
pub use classify::{classify, ClassificationReport, ClassifyError, ClassifyOptions};
