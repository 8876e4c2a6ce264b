//! Exhaustive search over all allocations of a small ground set. The
//! certification harness compares solver outputs against this optimum.

use super::{SolveResult, SolverError, SolverTrace, StopReason};
use crate::model::{Allocation, AttentionConstraints, Campaign};
use crate::objectives::{self, PenaltyParams};
use crate::propagation::SpreadEstimator;

/// Largest users x ads ground set the oracle enumerates (2^16 subsets).
pub const MAX_ORACLE_PAIRS: usize = 16;

/// Which objective the oracle maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleObjective {
    /// U: delivered revenue, folded back down past the budget.
    Utility,
    /// V: budget-capped revenue.
    Revenue,
    /// f = U - C + phi.
    ShiftedUtility,
    /// f' = V - C + phi.
    ShiftedRevenue,
}

/// Enumerate every subset of the (user, ad) ground set — optionally only
/// the independent ones — and return a maximizer of the objective.
///
/// Subsets are visited in increasing bitmask order with (user, ad)-ordered
/// bits and replaced only on strictly greater value, so ties resolve to the
/// lexicographically first subset. Deterministic throughout.
pub fn brute_force_opt(
    objective: OracleObjective,
    spread: &impl SpreadEstimator,
    campaign: &Campaign,
    constraints: &AttentionConstraints,
    params: &PenaltyParams,
    enforce_constraints: bool,
) -> Result<SolveResult, SolverError> {
    let num_users = spread.num_users();
    let num_ads = campaign.num_ads();
    let size = num_users * num_ads;
    if size > MAX_ORACLE_PAIRS {
        return Err(SolverError::GroundSetTooLarge {
            size,
            max: MAX_ORACLE_PAIRS,
        });
    }

    let evaluate = |alloc: &Allocation| -> f64 {
        match objective {
            OracleObjective::Utility => objectives::utility(alloc, campaign, spread),
            OracleObjective::Revenue => objectives::revenue(alloc, campaign, spread),
            OracleObjective::ShiftedUtility => {
                objectives::shifted_utility(alloc, campaign, constraints, params, spread)
            }
            OracleObjective::ShiftedRevenue => {
                objectives::shifted_revenue(alloc, campaign, constraints, params, spread)
            }
        }
    };

    let mut best: Option<(f64, Allocation)> = None;
    for mask in 0u32..1u32 << size {
        // Bit user * num_ads + ad, so mask order follows (user, ad) order.
        if enforce_constraints && !mask_is_independent(mask, num_users, num_ads, constraints) {
            continue;
        }
        let mut alloc = Allocation::empty(num_ads);
        for bit in 0..size {
            if mask >> bit & 1 == 1 {
                alloc.seed_sets[bit % num_ads].insert(bit / num_ads);
            }
        }
        let value = evaluate(&alloc);
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, alloc));
        }
    }

    let (_, allocation) = best.expect("the empty subset is always visited");
    let report = objectives::report(&allocation, campaign, constraints, params, spread);
    Ok(SolveResult {
        allocation,
        report,
        trace: SolverTrace::new(num_ads, StopReason::Exhausted),
        rng_seed: None,
    })
}

fn mask_is_independent(
    mask: u32,
    num_users: usize,
    num_ads: usize,
    constraints: &AttentionConstraints,
) -> bool {
    if (mask.count_ones() as usize) > constraints.overall() {
        return false;
    }
    for user in 0..num_users {
        let row = (mask >> (user * num_ads)) & ((1 << num_ads) - 1);
        if (row.count_ones() as usize) > constraints.kappa(user) {
            return false;
        }
    }
    true
}
