//! Greedy revenue maximization under the attention matroid, plus the
//! budget-cap post-processing pass that turns it into an allocation solver
//! for the utility objective.

use super::{reached_cap, GreedyConfig, InsertionRecord, SolveResult, SolverTrace, StopReason};
use crate::model::{Allocation, AttentionConstraints, Campaign};
use crate::objectives::{self, PenaltyParams};
use crate::propagation::SpreadEstimator;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Greedy capped-revenue maximization.
///
/// Starting from the empty allocation, repeatedly add the feasible
/// (user, ad) pair with the largest marginal revenue gain — ties broken by
/// lowest user index, then lowest ad index — until no feasible pair
/// remains, every remaining marginal is <= 0 (unless `literal_stops`), or
/// total revenue reaches the sum of budgets.
pub fn greedy_rmp(
    spread: &impl SpreadEstimator,
    campaign: &Campaign,
    constraints: &AttentionConstraints,
    config: &GreedyConfig,
) -> SolveResult {
    let mut state = GreedyState::new(spread, campaign, constraints);
    let stop_reason = if config.lazy {
        run_lazy(&mut state, config)
    } else {
        run_naive(&mut state, config)
    };

    let params = PenaltyParams::new(0.0, 0.0, 0.0).expect("zero params are valid");
    let report = objectives::report(&state.alloc, campaign, constraints, &params, spread);
    SolveResult {
        allocation: state.alloc,
        report,
        trace: SolverTrace {
            insertions: state.insertions,
            stop_reason,
            removed: vec![None; campaign.num_ads()],
        },
        rng_seed: None,
    }
}

/// Greedy revenue maximization followed by the budget-cap repair pass.
///
/// For each ad whose revenue sits at its budget, the chronologically last
/// inserted seed is removed iff doing so does not decrease that ad's
/// utility. With every ad needing at least two seeds to reach its budget,
/// the result carries a constant-factor utility guarantee.
pub fn greedy_p1(
    spread: &impl SpreadEstimator,
    campaign: &Campaign,
    constraints: &AttentionConstraints,
    config: &GreedyConfig,
) -> SolveResult {
    let mut result = greedy_rmp(spread, campaign, constraints, config);
    let exact = spread.is_exact();
    for (ad, adv) in campaign.advertisers().iter().enumerate() {
        let set = &result.allocation.seed_sets[ad];
        if set.is_empty() {
            continue;
        }
        let delivered = adv.alpha * spread.spread(ad, set);
        if !reached_cap(delivered.min(adv.budget), adv.budget, exact) {
            continue;
        }
        let last = match result.trace.insertions[ad].last() {
            Some(rec) => rec.user,
            None => continue,
        };
        let mut without = set.clone();
        without.remove(&last);
        let utility_with = objectives::ad_utility(delivered, adv.budget);
        let utility_without =
            objectives::ad_utility(adv.alpha * spread.spread(ad, &without), adv.budget);
        if utility_without >= utility_with {
            result.allocation.seed_sets[ad] = without;
            result.trace.removed[ad] = Some(last);
        }
    }
    let params = PenaltyParams::new(0.0, 0.0, 0.0).expect("zero params are valid");
    result.report = objectives::report(&result.allocation, campaign, constraints, &params, spread);
    result
}

struct GreedyState<'a, S: SpreadEstimator> {
    spread: &'a S,
    campaign: &'a Campaign,
    constraints: &'a AttentionConstraints,
    alloc: Allocation,
    /// Current per-ad capped revenue min(alpha * sigma, B).
    ad_revenue: Vec<f64>,
    user_load: Vec<usize>,
    total_load: usize,
    total_budget: f64,
    exact: bool,
    insertions: Vec<Vec<InsertionRecord>>,
}

impl<'a, S: SpreadEstimator> GreedyState<'a, S> {
    fn new(spread: &'a S, campaign: &'a Campaign, constraints: &'a AttentionConstraints) -> Self {
        let num_ads = campaign.num_ads();
        Self {
            spread,
            campaign,
            constraints,
            alloc: Allocation::empty(num_ads),
            ad_revenue: vec![0.0; num_ads],
            user_load: vec![0; spread.num_users()],
            total_load: 0,
            total_budget: campaign.total_budget(),
            exact: spread.is_exact(),
            insertions: vec![Vec::new(); num_ads],
        }
    }

    fn feasible(&self, user: usize) -> bool {
        self.user_load[user] < self.constraints.kappa(user)
            && self.total_load < self.constraints.overall()
    }

    fn budget_reached(&self) -> bool {
        reached_cap(
            self.ad_revenue.iter().sum::<f64>(),
            self.total_budget,
            self.exact,
        )
    }

    /// Marginal revenue gain of adding `user` to `ad`, with the new per-ad
    /// revenue it would produce.
    fn gain(&self, user: usize, ad: usize) -> (f64, f64) {
        let adv = self.campaign.ad(ad);
        let mut with = self.alloc.seed_sets[ad].clone();
        with.insert(user);
        let new_revenue = (adv.alpha * self.spread.spread(ad, &with)).min(adv.budget);
        (new_revenue - self.ad_revenue[ad], new_revenue)
    }

    fn insert(&mut self, user: usize, ad: usize, gain: f64, new_revenue: f64) {
        let step = self.total_load;
        self.alloc.seed_sets[ad].insert(user);
        self.ad_revenue[ad] = new_revenue;
        self.user_load[user] += 1;
        self.total_load += 1;
        self.insertions[ad].push(InsertionRecord { user, gain, step });
    }
}

/// One step per scan of every remaining feasible pair. Slower than the lazy
/// queue; kept as the differential-testing reference.
fn run_naive<S: SpreadEstimator>(state: &mut GreedyState<S>, config: &GreedyConfig) -> StopReason {
    let num_users = state.spread.num_users();
    let num_ads = state.campaign.num_ads();
    loop {
        if state.budget_reached() {
            return StopReason::BudgetReached;
        }
        let mut best: Option<(f64, usize, usize, f64)> = None;
        for user in 0..num_users {
            if !state.feasible(user) {
                continue;
            }
            for ad in 0..num_ads {
                if state.alloc.seed_sets[ad].contains(&user) {
                    continue;
                }
                let (gain, new_revenue) = state.gain(user, ad);
                // Strict > keeps the earliest (lowest user, then ad) among ties.
                if best.is_none_or(|(g, _, _, _)| gain > g) {
                    best = Some((gain, user, ad, new_revenue));
                }
            }
        }
        match best {
            None => return StopReason::Exhausted,
            Some((gain, _, _, _)) if !config.literal_stops && gain <= 0.0 => {
                return StopReason::Exhausted;
            }
            Some((gain, user, ad, new_revenue)) => state.insert(user, ad, gain, new_revenue),
        }
    }
}

/// Heap entry ordered by gain, then lowest user, then lowest ad, so that
/// `BinaryHeap::pop` yields exactly the pair the naive scan would select.
struct Candidate {
    gain: f64,
    user: usize,
    ad: usize,
    /// Version of the ad's seed set this gain was computed against.
    version: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .partial_cmp(&other.gain)
            .expect("marginal gains are finite")
            .then_with(|| other.user.cmp(&self.user))
            .then_with(|| other.ad.cmp(&self.ad))
    }
}

/// Lazy greedy: cached gains are upper bounds (revenue marginals only
/// shrink as an ad's set grows), so a popped candidate whose gain is
/// current for its ad's version is the true maximum. A pair's gain depends
/// only on its own ad's seed set, so insertions into one ad leave other
/// ads' cached gains fresh. Infeasible pops are dropped permanently: loads
/// only grow, so feasibility never returns.
fn run_lazy<S: SpreadEstimator>(state: &mut GreedyState<S>, config: &GreedyConfig) -> StopReason {
    let num_ads = state.campaign.num_ads();
    let mut version = vec![0usize; num_ads];
    let mut heap: BinaryHeap<Candidate> = BinaryHeap::new();
    for user in 0..state.spread.num_users() {
        for ad in 0..num_ads {
            let (gain, _) = state.gain(user, ad);
            heap.push(Candidate {
                gain,
                user,
                ad,
                version: 0,
            });
        }
    }

    loop {
        if state.budget_reached() {
            return StopReason::BudgetReached;
        }
        let selected = loop {
            let top = match heap.pop() {
                Some(c) => c,
                None => return StopReason::Exhausted,
            };
            if !state.feasible(top.user) {
                continue;
            }
            if top.version == version[top.ad] {
                break top;
            }
            let (gain, _) = state.gain(top.user, top.ad);
            heap.push(Candidate {
                gain,
                user: top.user,
                ad: top.ad,
                version: version[top.ad],
            });
        };
        if !config.literal_stops && selected.gain <= 0.0 {
            return StopReason::Exhausted;
        }
        // Recompute against the current set: the popped gain was computed
        // at the same version, so this returns the same value plus the new
        // per-ad revenue needed for the update.
        let (gain, new_revenue) = state.gain(selected.user, selected.ad);
        state.insert(selected.user, selected.ad, gain, new_revenue);
        version[selected.ad] += 1;
    }
}
