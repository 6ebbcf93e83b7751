//! Tolerance Schelling games.
//!
//! Agents of `λ` ordered types occupy nodes of a graph and weigh each
//! neighbour by a tolerance that depends only on the distance between the two
//! types in the ordering. This crate computes utilities and welfare exactly,
//! checks and enumerates jump equilibria, runs the constructive equilibrium
//! algorithms for grids and trees, and builds the lower-bound instances used
//! to reason about the price of anarchy and stability.

#![forbid(unsafe_code)]

pub mod constructions;
pub mod equilibrium;
pub mod game;
pub mod instances;
pub mod rational;
pub mod reference;
pub mod tolerance;
pub mod topology;

pub use equilibrium::{
    best_deviation, best_response_dynamics, enumerate_equilibria, is_equilibrium,
    optimal_welfare, price_ratios, DeviationWitness, DynamicsOutcome, DynamicsResult,
    EnumerationConfig, EquilibriumError, PriceReport,
};
pub use game::{social_welfare, utility, Assignment, GameError, GameInstance, Utility};
pub use rational::Rational;
pub use tolerance::{standard_tolerance, tolerance_sums, ToleranceError, ToleranceKind, ToleranceVector};
pub use topology::{NodeId, Topology, TopologyError};
