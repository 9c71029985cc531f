//! Game trees, solution concepts, opponent scheduling, experiment sessions
//! and analysis for sequential bargaining-style marble games.

pub mod game;
pub mod solver;
pub mod opponent;
pub mod session;
pub mod analysis;
