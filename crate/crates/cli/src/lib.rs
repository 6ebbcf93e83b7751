//! Command-line experiments for tolerance Schelling games.

pub mod commands;
pub mod file;
pub mod random;
pub mod sweep;
pub mod verify;

use schelling_core::constructions::ConstructionError;
use schelling_core::instances::InstanceError;
use schelling_core::rational::ParseRationalError;
use schelling_core::{EquilibriumError, GameError, ToleranceError, TopologyError};

pub use commands::{run, Cli};

/// Exit code for enumerations that exceed their budget.
pub const EXIT_BUDGET: i32 = 3;
/// Exit code for every other failure.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error("rational: {0}")]
    Rational(#[from] ParseRationalError),
    #[error("tolerance: {0}")]
    Tolerance(#[from] ToleranceError),
    #[error("topology: {0}")]
    Topology(#[from] TopologyError),
    #[error("game: {0}")]
    Game(#[from] GameError),
    #[error("instance: {0}")]
    Instance(#[from] InstanceError),
    #[error("construction: {0}")]
    Construction(#[from] ConstructionError),
    #[error("{tag}: {source}", tag = equilibrium_tag(.0), source = .0)]
    Equilibrium(#[from] EquilibriumError),
    #[error("verify: {0} criteria failed")]
    VerificationFailed(usize),
}

fn equilibrium_tag(e: &EquilibriumError) -> &'static str {
    match e {
        EquilibriumError::BudgetExceeded { .. } => "budget-exceeded",
        _ => "equilibrium",
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Equilibrium(EquilibriumError::BudgetExceeded { .. }) => EXIT_BUDGET,
            _ => EXIT_FAILURE,
        }
    }
}
