//! Static analyses over compiled story graphs.
//!
//! [`exact_reachable`] abstracts meters away and lets every mini-game end
//! either way. [`trace_to`] instead plays concrete sessions, so its results
//! always replay in the runtime.

mod biolink;
mod reach;
mod report;
mod trace;

use thiserror::Error;

pub use biolink::{biolink_feasible, biolink_shortest, Feasibility};
pub use reach::{
    dead_nodes, dead_nodes_with, ending_coverage, ending_coverage_with, exact_reachable, exact_reachable_with,
    overapprox_reachable,
};
pub use report::{to_dot, Report};
pub use trace::{replay, trace_to, trace_to_with, Trace, TraceStep};

/// Default cap on explored states.
pub const DEFAULT_STATE_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("state budget of {0} exceeded")]
    StateBudgetExceeded(usize),
    #[error("node `{0}` is unreachable")]
    Unreachable(String),
}
