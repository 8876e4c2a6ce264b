//! Randomized certification of the solvers against the brute-force oracle.
//!
//! Generates small random instances, runs a solver and the oracle on each,
//! and checks the advertised approximation bounds: 1/2 for greedy revenue
//! maximization, 1/4 for the budgeted utility solver, and the statistical
//! 1/2 and 1/4 bounds for the randomized penalized solvers.
//!
//! Instances are built from dyadic values — probabilities in quarters,
//! prices in quarters, budgets in eighths, at most 10 edges per ad — so
//! exact-enumeration spreads, revenues, and utilities are exactly
//! representable and the deterministic ratio checks are free of rounding.

use crate::model::{
    Advertiser, AttentionConstraints, Campaign, Edge, HyperSocialGraph, ModelError,
};
use crate::objectives::PenaltyParams;
use crate::propagation::{ExactSpread, SpreadEstimator};
use crate::seeding;
use crate::solvers::{
    brute_force_opt, double_greedy_urmp, greedy_p1, greedy_p2, greedy_rmp, GreedyConfig,
    OracleObjective, SolverError,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::str::FromStr;

/// Which solver/bound pair to certify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    /// Greedy revenue maximization vs the revenue optimum; bound 1/2.
    Rmp,
    /// Budgeted utility solver vs the utility optimum; bound 1/4.
    P1,
    /// Randomized double greedy vs the shifted-revenue optimum; mean over
    /// seeded runs within 3 standard errors of 1/2.
    Urmp,
    /// Penalized utility solver vs the shifted-utility optimum; mean within
    /// 3 standard errors of 1/4.
    P2,
}

impl Problem {
    pub fn bound(self) -> f64 {
        match self {
            Problem::Rmp | Problem::Urmp => 0.5,
            Problem::P1 | Problem::P2 => 0.25,
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Problem::Urmp | Problem::P2)
    }

    pub fn name(self) -> &'static str {
        match self {
            Problem::Rmp => "rmp",
            Problem::P1 => "p1",
            Problem::Urmp => "urmp",
            Problem::P2 => "p2",
        }
    }
}

impl FromStr for Problem {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        match s {
            "rmp" => Ok(Problem::Rmp),
            "p1" => Ok(Problem::P1),
            "urmp" => Ok(Problem::Urmp),
            "p2" => Ok(Problem::P2),
            other => Err(ModelError::Invalid(format!(
                "unknown problem {:?} (expected rmp, p1, urmp, or p2)",
                other
            ))),
        }
    }
}

/// One generated certification instance.
pub struct CertInstance {
    pub graph: HyperSocialGraph,
    pub campaign: Campaign,
    pub constraints: AttentionConstraints,
    pub lambda1: f64,
    pub lambda2: f64,
}

/// Draw a random small instance for `problem`, deterministic per seed.
///
/// For the utility problems the budgets are raised above the best
/// single-seed delivery, so reaching any budget takes at least two seeds.
pub fn random_instance(problem: Problem, seed: u64) -> CertInstance {
    let mut rng = seeding::child_rng(seed, "cert-instance", &[]);
    let num_users = rng.gen_range(2..=5usize);
    let num_ads = rng.gen_range(1..=2usize);

    let all_pairs: Vec<(usize, usize)> = (0..num_users)
        .flat_map(|u| (0..num_users).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    let per_ad_edges: Vec<Vec<Edge>> = (0..num_ads)
        .map(|_| {
            let count = rng.gen_range(0..=all_pairs.len().min(10));
            let mut pairs = all_pairs.clone();
            pairs.shuffle(&mut rng);
            pairs[..count]
                .iter()
                .map(|&(src, dst)| Edge {
                    src,
                    dst,
                    prob: rng.gen_range(1..=4) as f64 / 4.0,
                })
                .collect()
        })
        .collect();
    let graph = HyperSocialGraph::new(num_users, per_ad_edges).expect("generated edges are valid");

    let alphas: Vec<f64> = (0..num_ads)
        .map(|_| rng.gen_range(1..=8) as f64 / 4.0)
        .collect();
    let mut budgets: Vec<f64> = (0..num_ads)
        .map(|_| rng.gen_range(2..=10 * num_users) as f64 / 8.0)
        .collect();

    if matches!(problem, Problem::P1 | Problem::P2) {
        let spread = ExactSpread::new(&graph).expect("generator stays within the exact cap");
        for ad in 0..num_ads {
            let best_single = (0..num_users)
                .map(|u| {
                    let single: BTreeSet<usize> = [u].into_iter().collect();
                    alphas[ad] * spread.spread(ad, &single)
                })
                .fold(0.0f64, f64::max);
            // Dyadic bump keeps the budget exactly representable while
            // putting it strictly above every single-seed delivery.
            budgets[ad] = best_single + rng.gen_range(1..=16 * num_users) as f64 / 8.0;
        }
    }

    let campaign = Campaign::new(
        alphas
            .into_iter()
            .zip(budgets)
            .map(|(alpha, budget)| Advertiser { alpha, budget })
            .collect(),
    )
    .expect("generated campaign is valid");

    let kappa: Vec<usize> = (0..num_users)
        .map(|_| match rng.gen_range(0..6u8) {
            0 => 0,
            1..=3 => 1,
            _ => num_ads,
        })
        .collect();
    let overall = rng.gen_range(1..=num_users * num_ads);
    let constraints = AttentionConstraints::new(kappa, overall);

    let lambda1 = rng.gen_range(1..=4) as f64 / 4.0;
    let lambda2 = rng.gen_range(1..=4) as f64 / 4.0;

    CertInstance {
        graph,
        campaign,
        constraints,
        lambda1,
        lambda2,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    pub problem: Problem,
    pub instances: usize,
    /// Seeded solver runs per instance; only the stochastic problems use it.
    pub trials: usize,
    pub seed: u64,
}

/// Outcome of one instance: solver value (mean over trials when
/// stochastic), oracle optimum, and whether the bound held.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceOutcome {
    pub index: usize,
    pub users: usize,
    pub ads: usize,
    pub solver_value: f64,
    pub oracle_value: f64,
    pub ratio: f64,
    pub std_error: f64,
    pub pass: bool,
}

/// Aggregate certification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub problem: String,
    pub bound: f64,
    pub instances: usize,
    pub trials: usize,
    pub seed: u64,
    pub min_ratio: f64,
    pub mean_ratio: f64,
    pub violations: usize,
    pub pass: bool,
    pub per_instance: Vec<InstanceOutcome>,
}

/// Run the certification harness. Instances run concurrently; each is
/// seeded from `(seed, index)`, so the report is identical however the work
/// is scheduled.
pub fn certify(opts: &CertifyOptions) -> Result<CertifyReport, SolverError> {
    let outcomes: Vec<InstanceOutcome> = (0..opts.instances)
        .into_par_iter()
        .map(|index| {
            let instance_seed = seeding::child_seed(opts.seed, "instance", &[index as u64]);
            certify_instance(opts, index, instance_seed)
        })
        .collect::<Result<_, _>>()?;

    let violations = outcomes.iter().filter(|o| !o.pass).count();
    let min_ratio = outcomes
        .iter()
        .map(|o| o.ratio)
        .fold(f64::INFINITY, f64::min);
    let mean_ratio = outcomes.iter().map(|o| o.ratio).sum::<f64>() / outcomes.len().max(1) as f64;
    Ok(CertifyReport {
        problem: opts.problem.name().to_string(),
        bound: opts.problem.bound(),
        instances: opts.instances,
        trials: opts.trials,
        seed: opts.seed,
        min_ratio,
        mean_ratio,
        violations,
        pass: violations == 0,
        per_instance: outcomes,
    })
}

fn certify_instance(
    opts: &CertifyOptions,
    index: usize,
    instance_seed: u64,
) -> Result<InstanceOutcome, SolverError> {
    let problem = opts.problem;
    let inst = random_instance(problem, instance_seed);
    let spread = ExactSpread::new(&inst.graph).expect("generator stays within the exact cap");
    let users = inst.graph.num_users();
    let ads = inst.graph.num_ads();
    let zero = PenaltyParams::new(0.0, 0.0, 0.0).expect("zero params are valid");

    let outcome = match problem {
        Problem::Rmp => {
            let greedy = greedy_rmp(
                &spread,
                &inst.campaign,
                &inst.constraints,
                &GreedyConfig::default(),
            );
            let oracle = brute_force_opt(
                OracleObjective::Revenue,
                &spread,
                &inst.campaign,
                &inst.constraints,
                &zero,
                true,
            )?;
            let solver_value = greedy.report.revenue;
            let oracle_value = oracle.report.revenue;
            InstanceOutcome {
                index,
                users,
                ads,
                solver_value,
                oracle_value,
                ratio: ratio_of(solver_value, oracle_value),
                std_error: 0.0,
                // Exact dyadic arithmetic: compare without tolerance.
                pass: 2.0 * solver_value >= oracle_value,
            }
        }
        Problem::P1 => {
            let greedy = greedy_p1(
                &spread,
                &inst.campaign,
                &inst.constraints,
                &GreedyConfig::default(),
            );
            let oracle = brute_force_opt(
                OracleObjective::Utility,
                &spread,
                &inst.campaign,
                &inst.constraints,
                &zero,
                true,
            )?;
            let solver_value = greedy.report.utility;
            let oracle_value = oracle.report.utility;
            InstanceOutcome {
                index,
                users,
                ads,
                solver_value,
                oracle_value,
                ratio: ratio_of(solver_value, oracle_value),
                std_error: 0.0,
                pass: 4.0 * solver_value >= oracle_value,
            }
        }
        Problem::Urmp | Problem::P2 => {
            let params = PenaltyParams::with_auto_phi(
                inst.lambda1,
                inst.lambda2,
                &inst.campaign,
                &inst.constraints,
                &spread,
            )
            .expect("generated weights are nonnegative");
            let (objective, bound) = match problem {
                Problem::Urmp => (OracleObjective::ShiftedRevenue, 0.5),
                _ => (OracleObjective::ShiftedUtility, 0.25),
            };
            let oracle = brute_force_opt(
                objective,
                &spread,
                &inst.campaign,
                &inst.constraints,
                &params,
                false,
            )?;
            let oracle_value = match problem {
                Problem::Urmp => oracle.report.shifted_revenue,
                _ => oracle.report.shifted_utility,
            };
            let values: Vec<f64> = (0..opts.trials)
                .into_par_iter()
                .map(|t| {
                    let run_seed = seeding::child_seed(instance_seed, "trial", &[t as u64]);
                    match problem {
                        Problem::Urmp => double_greedy_urmp(
                            &spread,
                            &inst.campaign,
                            &inst.constraints,
                            &params,
                            run_seed,
                        )
                        .map(|r| r.report.shifted_revenue),
                        _ => greedy_p2(
                            &spread,
                            &inst.campaign,
                            &inst.constraints,
                            &params,
                            run_seed,
                        )
                        .map(|r| r.report.shifted_utility),
                    }
                })
                .collect::<Result<_, _>>()?;
            let trials = values.len().max(1) as f64;
            let mean = values.iter().sum::<f64>() / trials;
            let variance = if values.len() > 1 {
                values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials - 1.0)
            } else {
                0.0
            };
            let std_error = (variance / trials).sqrt();
            InstanceOutcome {
                index,
                users,
                ads,
                solver_value: mean,
                oracle_value,
                ratio: ratio_of(mean, oracle_value),
                std_error,
                pass: mean >= bound * oracle_value - 3.0 * std_error,
            }
        }
    };
    Ok(outcome)
}

fn ratio_of(solver: f64, oracle: f64) -> f64 {
    if oracle == 0.0 {
        1.0
    } else {
        solver / oracle
    }
}
