//! Allocation solvers: greedy seed selection under attention constraints,
//! randomized double greedy for the penalized objectives, budget-cap
//! post-processing, and a brute-force oracle for small ground sets.

mod double_greedy;
mod greedy;
mod oracle;

pub use double_greedy::{double_greedy_urmp, greedy_p2};
pub use greedy::{greedy_p1, greedy_rmp};
pub use oracle::{brute_force_opt, OracleObjective, MAX_ORACLE_PAIRS};

use crate::model::Allocation;
use crate::objectives::ObjectiveReport;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(
        "shift constant phi is insufficient: f' evaluated to {value}; \
         raise phi (or use auto) so the shifted objective stays nonnegative"
    )]
    PhiInsufficient { value: f64 },
    #[error("ground set of {size} pairs exceeds the brute-force cap of {max}")]
    GroundSetTooLarge { size: usize, max: usize },
}

/// Why a greedy run stopped adding pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// No feasible pair remained, or every remaining marginal was <= 0.
    Exhausted,
    /// Total revenue reached the sum of budgets.
    BudgetReached,
}

/// One greedy insertion: the user added to an ad, the marginal objective
/// gain at insertion time, and the global 0-based insertion step (per-ad
/// lists interleave; the step recovers the chronological order).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InsertionRecord {
    pub user: usize,
    pub gain: f64,
    pub step: usize,
}

/// What a solver did, in enough detail to drive the budget-cap
/// post-processing (which needs each ad's insertion order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverTrace {
    /// Per ad: users in insertion order with their marginal gains.
    pub insertions: Vec<Vec<InsertionRecord>>,
    pub stop_reason: StopReason,
    /// Per ad: the user deleted by post-processing, if any.
    pub removed: Vec<Option<usize>>,
}

impl SolverTrace {
    pub(crate) fn new(num_ads: usize, stop_reason: StopReason) -> Self {
        Self {
            insertions: vec![Vec::new(); num_ads],
            stop_reason,
            removed: vec![None; num_ads],
        }
    }
}

/// A solver's output: the allocation, its objective report, the trace, and
/// the rng seed consumed (None for deterministic solvers).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub allocation: Allocation,
    pub report: ObjectiveReport,
    pub trace: SolverTrace,
    pub rng_seed: Option<u64>,
}

/// Knobs for the greedy solvers.
#[derive(Debug, Clone, Copy)]
pub struct GreedyConfig {
    /// Lazy marginal re-evaluation with a max-priority queue (valid because
    /// revenue is submodular under a fixed ensemble). The naive full re-scan
    /// exists for differential testing; both produce identical results.
    pub lazy: bool,
    /// Keep adding zero-gain pairs while feasible, as the bare loop
    /// condition would. Off by default: zero-gain pairs waste attention
    /// budget and never help revenue.
    pub literal_stops: bool,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        Self {
            lazy: true,
            literal_stops: false,
        }
    }
}

/// Relative tolerance for detecting that an estimated revenue has reached a
/// cap. Estimates rarely hit a budget exactly in floating point; the exact
/// enumerator compares exactly.
const CAP_RELATIVE_TOLERANCE: f64 = 1e-9;

pub(crate) fn reached_cap(value: f64, cap: f64, exact_spread: bool) -> bool {
    if exact_spread {
        value >= cap
    } else {
        value >= cap - cap.abs() * CAP_RELATIVE_TOLERANCE
    }
}
