//! Workbench for upper-tail concentration of weighted edge counts in random
//! induced subhypergraphs.
//!
//! The crate builds the standard additive-combinatorics example hypergraphs
//! (arithmetic progressions, Schur triples, additive quadruples, (r,s)-sums,
//! linear systems), computes the structural parameters that drive upper-tail
//! inequalities (maximum degrees `Δ_j`, average effects `μ_j`), evaluates a
//! family of tail bounds with every constant made explicit, runs the greedy
//! star-matching sparsification machinery, and validates all of it against
//! exact small-instance oracles and reproducible Monte Carlo simulation.

pub mod bounds;
pub mod error;
pub mod generators;
pub mod hypergraph;
pub mod numeric;
pub mod oracle;
pub mod pattern;
pub mod sampler;
pub mod sparsifier;
pub mod verify;

pub use error::{Error, Result};
pub use hypergraph::{Checklist, ChecklistItem, DegreeProfile, Hypergraph, MuProfile};
pub use pattern::{analyze_density, DensityReport, Exposure, Pattern, SubgraphModel};
pub use sampler::{evaluate_x, mc_tail, Outcome, Regime, TailEstimate, TailModel, Target};
