//! Scalar objectives over an allocation: utility, regret, capped revenue,
//! exponential attention penalties, and their shifted nonnegative variants.
//!
//! Every function takes the spread estimator as an argument, so the Monte
//! Carlo ensemble and the exact enumerator are interchangeable.

use crate::model::{Allocation, AttentionConstraints, Campaign};
use crate::propagation::SpreadEstimator;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ObjectiveError {
    #[error("penalty weight {what} must be >= 0, got {value}")]
    NegativeWeight { what: &'static str, value: f64 },
    #[error("shift constant phi must be >= 0, got {0}")]
    NegativePhi(f64),
}

/// Weights for the attention penalties and the shift constant that keeps
/// the shifted objectives nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub phi: f64,
}

impl PenaltyParams {
    pub fn new(lambda1: f64, lambda2: f64, phi: f64) -> Result<Self, ObjectiveError> {
        for (what, value) in [("lambda1", lambda1), ("lambda2", lambda2)] {
            if value.is_nan() || value < 0.0 {
                return Err(ObjectiveError::NegativeWeight { what, value });
            }
        }
        if phi.is_nan() || phi < 0.0 {
            return Err(ObjectiveError::NegativePhi(phi));
        }
        Ok(Self {
            lambda1,
            lambda2,
            phi,
        })
    }

    /// Penalty weights with phi computed by [`auto_phi`].
    pub fn with_auto_phi(
        lambda1: f64,
        lambda2: f64,
        campaign: &Campaign,
        constraints: &AttentionConstraints,
        spread: &impl SpreadEstimator,
    ) -> Result<Self, ObjectiveError> {
        let mut params = Self::new(lambda1, lambda2, 0.0)?;
        params.phi = auto_phi(campaign, constraints, lambda1, lambda2, spread);
        Ok(params)
    }
}

/// Utility of one ad: the delivered revenue while it is within budget, and
/// the budget minus the overshoot beyond it. Continuous at the budget;
/// negative once revenue exceeds twice the budget.
pub(crate) fn ad_utility(revenue: f64, budget: f64) -> f64 {
    if revenue <= budget {
        revenue
    } else {
        2.0 * budget - revenue
    }
}

/// U(S) = sum over ads of the per-ad utility. May be negative.
pub fn utility(alloc: &Allocation, campaign: &Campaign, spread: &impl SpreadEstimator) -> f64 {
    campaign
        .advertisers()
        .iter()
        .enumerate()
        .map(|(ad, adv)| {
            ad_utility(
                adv.alpha * spread.spread(ad, &alloc.seed_sets[ad]),
                adv.budget,
            )
        })
        .sum()
}

/// Total distance between delivered revenue and budget, summed over ads.
/// Always >= 0; minimizing it is the same as maximizing [`utility`], since
/// the two sum to the total budget.
pub fn regret(alloc: &Allocation, campaign: &Campaign, spread: &impl SpreadEstimator) -> f64 {
    campaign
        .advertisers()
        .iter()
        .enumerate()
        .map(|(ad, adv)| (adv.alpha * spread.spread(ad, &alloc.seed_sets[ad]) - adv.budget).abs())
        .sum()
}

/// V(S) = sum over ads of min(delivered revenue, budget): what advertisers
/// actually pay. Monotone and submodular in the assignment pairs.
pub fn revenue(alloc: &Allocation, campaign: &Campaign, spread: &impl SpreadEstimator) -> f64 {
    campaign
        .advertisers()
        .iter()
        .enumerate()
        .map(|(ad, adv)| (adv.alpha * spread.spread(ad, &alloc.seed_sets[ad])).min(adv.budget))
        .sum()
}

/// Exponential attention penalty, literally
/// lambda1 * sum_users exp(max(0, load_u - kappa_u)) +
/// lambda2 * exp(max(0, total - K)).
///
/// The exp(0) = 1 baseline terms are kept as written: a constant offset of
/// (num_users * lambda1 + lambda2) at zero violation that shifts every
/// allocation equally and changes no argmax.
pub fn penalty(
    alloc: &Allocation,
    constraints: &AttentionConstraints,
    params: &PenaltyParams,
) -> f64 {
    let (per_user, total) = alloc.attention_counts(constraints.num_users());
    penalty_from_counts(&per_user, total, constraints, params)
}

fn penalty_from_counts(
    per_user: &[usize],
    total: usize,
    constraints: &AttentionConstraints,
    params: &PenaltyParams,
) -> f64 {
    let individual: f64 = per_user
        .iter()
        .enumerate()
        .map(|(u, &load)| (load.saturating_sub(constraints.kappa(u)) as f64).exp())
        .sum();
    let overall = (total.saturating_sub(constraints.overall()) as f64).exp();
    params.lambda1 * individual + params.lambda2 * overall
}

/// f(S) = U(S) - C(S) + phi, evaluated as U + (phi - C).
pub fn shifted_utility(
    alloc: &Allocation,
    campaign: &Campaign,
    constraints: &AttentionConstraints,
    params: &PenaltyParams,
    spread: &impl SpreadEstimator,
) -> f64 {
    utility(alloc, campaign, spread) + (params.phi - penalty(alloc, constraints, params))
}

/// f'(S) = V(S) - C(S) + phi, evaluated as V + (phi - C).
///
/// With [`auto_phi`], phi >= C holds for every allocation even at the
/// floating-point level, so the result is nonnegative bit-for-bit.
pub fn shifted_revenue(
    alloc: &Allocation,
    campaign: &Campaign,
    constraints: &AttentionConstraints,
    params: &PenaltyParams,
    spread: &impl SpreadEstimator,
) -> f64 {
    revenue(alloc, campaign, spread) + (params.phi - penalty(alloc, constraints, params))
}

/// The shift constant that makes both shifted objectives nonnegative for
/// every allocation: the penalty of the everyone-gets-every-ad allocation
/// (the penalty's maximum, since both parts are nondecreasing) plus, per
/// ad, the worst possible utility shortfall max(0, alpha * sigma(V) - 2B).
pub fn auto_phi(
    campaign: &Campaign,
    constraints: &AttentionConstraints,
    lambda1: f64,
    lambda2: f64,
    spread: &impl SpreadEstimator,
) -> f64 {
    let num_users = constraints.num_users();
    let num_ads = campaign.num_ads();
    let params = PenaltyParams {
        lambda1,
        lambda2,
        phi: 0.0,
    };
    let per_user = vec![num_ads; num_users];
    let max_penalty = penalty_from_counts(&per_user, num_users * num_ads, constraints, &params);

    let everyone: BTreeSet<usize> = (0..num_users).collect();
    let worst_shortfall: f64 = campaign
        .advertisers()
        .iter()
        .enumerate()
        .map(|(ad, adv)| (adv.alpha * spread.spread(ad, &everyone) - 2.0 * adv.budget).max(0.0))
        .sum();

    max_penalty + worst_shortfall
}

/// Everything about one ad in an [`ObjectiveReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdObjectives {
    pub ad: usize,
    pub alpha: f64,
    pub budget: f64,
    pub sigma: f64,
    #[serde(rename = "U")]
    pub utility: f64,
    #[serde(rename = "V")]
    pub revenue: f64,
    pub regret: f64,
}

/// All scalar objectives of one allocation, evaluated together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveReport {
    pub sigma: f64,
    #[serde(rename = "U")]
    pub utility: f64,
    #[serde(rename = "V")]
    pub revenue: f64,
    pub regret: f64,
    #[serde(rename = "C")]
    pub penalty: f64,
    #[serde(rename = "f")]
    pub shifted_utility: f64,
    #[serde(rename = "f_prime")]
    pub shifted_revenue: f64,
    pub phi: f64,
    pub per_ad: Vec<AdObjectives>,
}

impl ObjectiveReport {
    /// C+(S) = C(S) + phi.
    pub fn penalty_plus(&self) -> f64 {
        self.penalty + self.phi
    }
}

/// Evaluate every objective of `alloc` at once.
pub fn report(
    alloc: &Allocation,
    campaign: &Campaign,
    constraints: &AttentionConstraints,
    params: &PenaltyParams,
    spread: &impl SpreadEstimator,
) -> ObjectiveReport {
    let per_ad: Vec<AdObjectives> = campaign
        .advertisers()
        .iter()
        .enumerate()
        .map(|(ad, adv)| {
            let sigma = spread.spread(ad, &alloc.seed_sets[ad]);
            let delivered = adv.alpha * sigma;
            AdObjectives {
                ad,
                alpha: adv.alpha,
                budget: adv.budget,
                sigma,
                utility: ad_utility(delivered, adv.budget),
                revenue: delivered.min(adv.budget),
                regret: (delivered - adv.budget).abs(),
            }
        })
        .collect();
    let utility: f64 = per_ad.iter().map(|a| a.utility).sum();
    let revenue: f64 = per_ad.iter().map(|a| a.revenue).sum();
    let regret: f64 = per_ad.iter().map(|a| a.regret).sum();
    let penalty = penalty(alloc, constraints, params);
    let shift = params.phi - penalty;
    ObjectiveReport {
        sigma: per_ad.iter().map(|a| a.sigma).sum(),
        utility,
        revenue,
        regret,
        penalty,
        shifted_utility: utility + shift,
        shifted_revenue: revenue + shift,
        phi: params.phi,
        per_ad,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Advertiser;
    use approx::assert_relative_eq;

    /// Estimator stub returning a fixed per-ad spread for any nonempty seed
    /// set (and 0 for the empty set).
    struct FixedSpread {
        num_users: usize,
        values: Vec<f64>,
    }

    impl SpreadEstimator for FixedSpread {
        fn num_users(&self) -> usize {
            self.num_users
        }
        fn num_ads(&self) -> usize {
            self.values.len()
        }
        fn spread(&self, ad: usize, seeds: &BTreeSet<usize>) -> f64 {
            if seeds.is_empty() {
                0.0
            } else {
                self.values[ad]
            }
        }
        fn is_exact(&self) -> bool {
            true
        }
    }

    fn campaign(ads: &[(f64, f64)]) -> Campaign {
        Campaign::new(
            ads.iter()
                .map(|&(alpha, budget)| Advertiser { alpha, budget })
                .collect(),
        )
        .unwrap()
    }

    fn seeded(num_ads: usize) -> Allocation {
        let mut alloc = Allocation::empty(num_ads);
        for set in &mut alloc.seed_sets {
            set.insert(0);
        }
        alloc
    }

    #[test]
    fn utility_below_budget_is_delivered_revenue() {
        let spread = FixedSpread {
            num_users: 10,
            values: vec![5.0],
        };
        assert_eq!(utility(&seeded(1), &campaign(&[(1.0, 10.0)]), &spread), 5.0);
    }

    #[test]
    fn utility_above_budget_subtracts_overshoot() {
        let spread = FixedSpread {
            num_users: 10,
            values: vec![7.0],
        };
        assert_eq!(utility(&seeded(1), &campaign(&[(2.0, 10.0)]), &spread), 6.0);
    }

    #[test]
    fn utility_branches_agree_at_the_budget() {
        let spread = FixedSpread {
            num_users: 10,
            values: vec![5.0],
        };
        // alpha * sigma == budget exactly.
        assert_eq!(
            utility(&seeded(1), &campaign(&[(2.0, 10.0)]), &spread),
            10.0
        );
    }

    #[test]
    fn regret_of_empty_allocation_is_total_budget() {
        let spread = FixedSpread {
            num_users: 10,
            values: vec![4.0, 9.0],
        };
        let c = campaign(&[(1.0, 3.0), (1.0, 5.0)]);
        assert_eq!(regret(&Allocation::empty(2), &c, &spread), 8.0);
    }

    #[test]
    fn regret_vanishes_when_revenue_meets_budget() {
        let spread = FixedSpread {
            num_users: 10,
            values: vec![3.0, 5.0],
        };
        let c = campaign(&[(1.0, 3.0), (1.0, 5.0)]);
        assert_eq!(regret(&seeded(2), &c, &spread), 0.0);
    }

    #[test]
    fn utility_plus_regret_is_total_budget() {
        // Both branches of the utility: ad 0 under budget, ad 1 over.
        let spread = FixedSpread {
            num_users: 10,
            values: vec![2.0, 8.0],
        };
        let c = campaign(&[(1.0, 3.0), (1.0, 5.0)]);
        let alloc = seeded(2);
        assert_relative_eq!(
            utility(&alloc, &c, &spread) + regret(&alloc, &c, &spread),
            c.total_budget(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn revenue_caps_at_budget() {
        let below = FixedSpread {
            num_users: 10,
            values: vec![5.0],
        };
        let above = FixedSpread {
            num_users: 10,
            values: vec![7.0],
        };
        assert_eq!(
            revenue(&Allocation::empty(1), &campaign(&[(1.0, 10.0)]), &below),
            0.0
        );
        assert_eq!(revenue(&seeded(1), &campaign(&[(1.0, 10.0)]), &below), 5.0);
        assert_eq!(revenue(&seeded(1), &campaign(&[(2.0, 10.0)]), &above), 10.0);
    }

    #[test]
    fn penalty_at_zero_violation_is_the_baseline() {
        let params = PenaltyParams::new(1.0, 1.0, 0.0).unwrap();
        let constraints = AttentionConstraints::uniform(2, 1, 5);
        assert_eq!(penalty(&Allocation::empty(2), &constraints, &params), 3.0);
    }

    #[test]
    fn penalty_counts_individual_violations() {
        let params = PenaltyParams::new(1.0, 1.0, 0.0).unwrap();
        let constraints = AttentionConstraints::new(vec![1, 1], 2);
        let mut alloc = Allocation::empty(2);
        alloc.seed_sets[0].insert(0);
        alloc.seed_sets[1].insert(0);
        // user 0 one over kappa, user 1 at zero, total at K.
        assert_relative_eq!(
            penalty(&alloc, &constraints, &params),
            1f64.exp() + 2.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn penalty_overall_part_alone() {
        let params = PenaltyParams::new(0.0, 1.0, 0.0).unwrap();
        let constraints = AttentionConstraints::uniform(3, 5, 0);
        let mut alloc = Allocation::empty(2);
        alloc.seed_sets[0].extend([0, 1]);
        alloc.seed_sets[1].insert(2);
        // K = 0, total = 3.
        assert_relative_eq!(
            penalty(&alloc, &constraints, &params),
            3f64.exp(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn shifted_objectives_differ_by_revenue_minus_utility() {
        let spread = FixedSpread {
            num_users: 4,
            values: vec![3.0, 9.0],
        };
        let c = campaign(&[(1.0, 5.0), (1.0, 4.0)]);
        let constraints = AttentionConstraints::uniform(4, 1, 3);
        let params = PenaltyParams::new(0.5, 0.25, 2.0).unwrap();
        let alloc = seeded(2);
        let f = shifted_utility(&alloc, &c, &constraints, &params, &spread);
        let fp = shifted_revenue(&alloc, &c, &constraints, &params, &spread);
        let gap = revenue(&alloc, &c, &spread) - utility(&alloc, &c, &spread);
        assert!(gap >= 0.0);
        assert_relative_eq!(fp - f, gap, max_relative = 1e-12);
    }

    #[test]
    fn shifted_utility_of_empty_allocation_without_penalties() {
        let spread = FixedSpread {
            num_users: 4,
            values: vec![3.0],
        };
        let c = campaign(&[(1.0, 5.0)]);
        let constraints = AttentionConstraints::uniform(4, 1, 3);
        let params = PenaltyParams::new(0.0, 0.0, 0.0).unwrap();
        assert_eq!(
            shifted_utility(&Allocation::empty(1), &c, &constraints, &params, &spread),
            0.0
        );
    }

    #[test]
    fn auto_phi_is_zero_when_nothing_can_go_negative() {
        // No penalties and alpha * sigma(everyone) <= 2B for every ad.
        let spread = FixedSpread {
            num_users: 3,
            values: vec![3.0],
        };
        let c = campaign(&[(1.0, 2.0)]);
        let constraints = AttentionConstraints::uniform(3, 1, 3);
        assert_eq!(auto_phi(&c, &constraints, 0.0, 0.0, &spread), 0.0);
    }

    #[test]
    fn auto_phi_covers_a_single_forced_violation() {
        let spread = FixedSpread {
            num_users: 1,
            values: vec![1.0],
        };
        let c = campaign(&[(1.0, 100.0)]);
        let constraints = AttentionConstraints::new(vec![0], 10);
        assert_relative_eq!(
            auto_phi(&c, &constraints, 1.0, 0.0, &spread),
            1f64.exp(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn report_is_internally_consistent() {
        let spread = FixedSpread {
            num_users: 5,
            values: vec![2.0, 8.0],
        };
        let c = campaign(&[(1.0, 3.0), (1.0, 5.0)]);
        let constraints = AttentionConstraints::uniform(5, 1, 4);
        let params = PenaltyParams::new(0.5, 0.5, 3.0).unwrap();
        let alloc = seeded(2);
        let r = report(&alloc, &c, &constraints, &params, &spread);
        assert_eq!(r.per_ad.len(), 2);
        assert_relative_eq!(r.utility + r.regret, c.total_budget(), max_relative = 1e-12);
        assert!(r.revenue >= r.utility);
        assert!(r.revenue <= c.total_budget());
        assert_relative_eq!(r.penalty_plus(), r.penalty + r.phi, max_relative = 1e-15);
        assert_relative_eq!(
            r.shifted_revenue - r.shifted_utility,
            r.revenue - r.utility,
            max_relative = 1e-12
        );
    }

    #[test]
    fn params_validate_signs() {
        assert!(PenaltyParams::new(-0.1, 0.0, 0.0).is_err());
        assert!(PenaltyParams::new(0.0, -0.1, 0.0).is_err());
        assert!(PenaltyParams::new(0.0, 0.0, -0.1).is_err());
        assert!(PenaltyParams::new(0.0, 0.0, 0.0).is_ok());
    }
}
