//! Randomized double greedy over the shifted revenue objective, and the
//! budget-cap post-processing pass for the penalized utility problem.

use super::{reached_cap, InsertionRecord, SolveResult, SolverError, SolverTrace, StopReason};
use crate::model::{Allocation, AttentionConstraints, Campaign};
use crate::objectives::{self, PenaltyParams};
use crate::propagation::SpreadEstimator;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Randomized double greedy for the shifted revenue f' = V - C + phi.
///
/// Ads are processed in index order. For ad t, a kept set grows from empty
/// while a pool shrinks from all users; each user in index order is either
/// committed to the kept set or discarded from the pool, with probability
/// proportional to the (clamped) marginal gains of the two options. During
/// ad t's pass, ads before t hold their final sets and ads after t are
/// empty. When both clamped gains are zero the user is added outright.
///
/// Requires f' >= 0 on every visited state; any negative evaluation aborts
/// with [`SolverError::PhiInsufficient`]. Auto-computed phi satisfies this
/// by construction.
pub fn double_greedy_urmp(
    spread: &impl SpreadEstimator,
    campaign: &Campaign,
    constraints: &AttentionConstraints,
    params: &PenaltyParams,
    rng_seed: u64,
) -> Result<SolveResult, SolverError> {
    let num_users = spread.num_users();
    let num_ads = campaign.num_ads();
    let mut rng = ChaCha12Rng::seed_from_u64(rng_seed);
    let mut ctx = Allocation::empty(num_ads);
    let mut insertions: Vec<Vec<InsertionRecord>> = vec![Vec::new(); num_ads];
    let mut step = 0usize;

    let eval = |ctx: &Allocation| -> Result<f64, SolverError> {
        let value = objectives::shifted_revenue(ctx, campaign, constraints, params, spread);
        if value < 0.0 {
            Err(SolverError::PhiInsufficient { value })
        } else {
            Ok(value)
        }
    };

    for (ad, ad_insertions) in insertions.iter_mut().enumerate() {
        let mut kept = std::collections::BTreeSet::new();
        let mut pool: std::collections::BTreeSet<usize> = (0..num_users).collect();
        for user in 0..num_users {
            ctx.seed_sets[ad] = kept.clone();
            let f_kept = eval(&ctx)?;
            ctx.seed_sets[ad].insert(user);
            let f_kept_plus = eval(&ctx)?;

            ctx.seed_sets[ad] = pool.clone();
            let f_pool = eval(&ctx)?;
            ctx.seed_sets[ad].remove(&user);
            let f_pool_minus = eval(&ctx)?;

            let add_gain = f_kept_plus - f_kept;
            let drop_gain = f_pool_minus - f_pool;
            let a = add_gain.max(0.0);
            let b = drop_gain.max(0.0);
            let take = if a + b == 0.0 {
                true
            } else {
                rng.gen::<f64>() < a / (a + b)
            };
            if take {
                kept.insert(user);
                ad_insertions.push(InsertionRecord {
                    user,
                    gain: add_gain,
                    step,
                });
                step += 1;
            } else {
                pool.remove(&user);
            }
        }
        debug_assert_eq!(kept, pool, "kept and pool must meet after the pass");
        ctx.seed_sets[ad] = kept;
    }

    let report = objectives::report(&ctx, campaign, constraints, params, spread);
    Ok(SolveResult {
        allocation: ctx,
        report,
        trace: SolverTrace {
            insertions,
            stop_reason: StopReason::Exhausted,
            removed: vec![None; num_ads],
        },
        rng_seed: Some(rng_seed),
    })
}

/// Double greedy followed by the budget-cap repair pass.
///
/// For each ad whose revenue sits at its budget, the seed with the smallest
/// marginal revenue contribution (ties: lowest user index) is removed iff
/// doing so does not decrease that ad's utility.
pub fn greedy_p2(
    spread: &impl SpreadEstimator,
    campaign: &Campaign,
    constraints: &AttentionConstraints,
    params: &PenaltyParams,
    rng_seed: u64,
) -> Result<SolveResult, SolverError> {
    let mut result = double_greedy_urmp(spread, campaign, constraints, params, rng_seed)?;
    let exact = spread.is_exact();
    for (ad, adv) in campaign.advertisers().iter().enumerate() {
        let set = result.allocation.seed_sets[ad].clone();
        if set.is_empty() {
            continue;
        }
        let delivered = adv.alpha * spread.spread(ad, &set);
        let ad_revenue = delivered.min(adv.budget);
        if !reached_cap(ad_revenue, adv.budget, exact) {
            continue;
        }
        // Smallest marginal revenue contribution; ascending iteration keeps
        // the lowest user index among ties.
        let mut weakest: Option<(f64, usize)> = None;
        for &user in &set {
            let mut without = set.clone();
            without.remove(&user);
            let revenue_without = (adv.alpha * spread.spread(ad, &without)).min(adv.budget);
            let margin = ad_revenue - revenue_without;
            if weakest.is_none_or(|(m, _)| margin < m) {
                weakest = Some((margin, user));
            }
        }
        let (_, user) = weakest.expect("set is nonempty");
        let mut without = set.clone();
        without.remove(&user);
        let utility_with = objectives::ad_utility(delivered, adv.budget);
        let utility_without =
            objectives::ad_utility(adv.alpha * spread.spread(ad, &without), adv.budget);
        if utility_without >= utility_with {
            result.allocation.seed_sets[ad] = without;
            result.trace.removed[ad] = Some(user);
        }
    }
    result.report = objectives::report(&result.allocation, campaign, constraints, params, spread);
    Ok(result)
}
