//! Solver and analysis toolkit for the zero-sum games a defender plays
//! against transferable adversarial-example attacks.
//!
//! The library ingests empirical accuracy-degradation tables, builds three
//! game families from them (Surrogate, Attack-and-Surrogate, Attack),
//! computes Nash and Stackelberg solutions, and derives transparency-cost,
//! mixed-strategy, and underestimation reports. Payoffs are attacker
//! utilities in percent degradation throughout; the defender's utility is
//! the 100-complement by the zero-sum convention.
//!
//! Everything is deterministic: identical inputs (and seeds, for the
//! fictitious-play dynamics) produce identical outputs.

pub mod analysis;
pub mod equilibria;
pub mod error;
pub mod game;
pub mod render;
pub mod scenario;
pub mod simplex;

pub use analysis::{
    as_game_summary, mixing_report, round2, simulate_game, solve_game_summary, transparency_report,
    underestimation_report, GameKind, GameSummary, MixingFilter, MixingReport, SimulationReport,
    TransparencyReport, UnderestimationReport,
};
pub use equilibria::{
    enumerate_equilibria, fictitious_play, solve_stackelberg_pure, transparency_cost,
    FictitiousPlayTrace, StackelbergSolution,
};
pub use error::{Error, Result, Violation};
pub use game::{EquilibriumSolution, MixedStrategy, SolutionKind, SolverMethod, ZeroSumGame};
pub use render::OutputFormat;
pub use scenario::{DefendedSurrogate, PayoffRecord, ScenarioTable, SurrogateClass, TargetClass};
pub use simplex::{solve_2x2_closed_form, solve_minimax, MinimaxResult, SolveStatus};
