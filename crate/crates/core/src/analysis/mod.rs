//! Synthetic participants and the first-node choice analytics: per-person
//! choice grids, game-pair comparisons and the group proportion test.
//!
//! The human data these analytics were designed for is not available, so
//! every population here is simulated.

mod agent;
mod compare;
mod grid;
mod simulate;
mod stats;

use thiserror::Error;

pub use agent::{agent_decide, Agent, AgentKind, AgentSpec};
pub use compare::{compare_grids, compare_pair, percent, DifferenceClass, PairComparison, PairReport, Thresholds, FOCUS_MOVE};
pub use grid::{choice_grids, grids_to_csv, grids_to_svg, ChoiceGrid};
pub use simulate::{all_rows, run_participant, simulate_population, ParticipantLog};
pub use stats::{group_test, two_proportion_test, ProportionTest};

use crate::opponent::OpponentError;
use crate::session::SessionError;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("bad agent: {0}")]
    Agent(String),
    #[error("logs do not match the export schema: {0}")]
    Schema(String),
    #[error("bad thresholds: {0}")]
    Thresholds(String),
    #[error("degenerate sample: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error(transparent)]
    Opponent(#[from] OpponentError),
}

/// Game pairs compared in the results, in reporting order.
pub const STANDARD_PAIRS: [(crate::game::shipped::GameId, crate::game::shipped::GameId); 4] = {
    use crate::game::shipped::GameId::*;
    [(Game1, Game1Prime), (Game3, Game3Prime), (Game3, Game4), (Game1, Game2)]
};
