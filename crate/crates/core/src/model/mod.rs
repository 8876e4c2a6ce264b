//! Domain types: the per-ad diffusion graph, advertiser campaigns, seed
//! allocations, and attention constraints.
//!
//! Users and ads are dense 0-based indices throughout. All values are
//! immutable after construction and safe to share across threads.

mod parse;
mod synth;

pub use parse::{parse_campaign, parse_constraints, parse_graph};
pub use synth::{generate_synthetic, SynthKind};

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// Validation and parsing errors for the domain types.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: probability {value} outside [0, 1]")]
    ProbabilityOutOfRange { line: usize, value: f64 },
    #[error("line {line}: duplicate edge ({src}, {dst}) for ad {ad}")]
    DuplicateEdge {
        line: usize,
        src: usize,
        dst: usize,
        ad: usize,
    },
    #[error("line {line}: {what} index {index} out of range (count is {limit})")]
    IndexOutOfRange {
        line: usize,
        what: &'static str,
        index: usize,
        limit: usize,
    },
    #[error("cannot infer sizes from an edgeless input without a `users=<n> ads=<m>` header")]
    MissingHeader,
    #[error("{0}")]
    Invalid(String),
}

/// A directed influence edge: `src` gets one chance to activate `dst` with
/// probability `prob` when the owning ad cascades.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub prob: f64,
}

/// One diffusion graph per ad over a shared user set.
///
/// Edge probabilities are stored per ad: two ads may share topology but
/// differ in how easily they spread. The user count may exceed the largest
/// referenced index, so isolated users are representable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HyperSocialGraph {
    num_users: usize,
    per_ad_edges: Vec<Vec<Edge>>,
}

impl HyperSocialGraph {
    /// Build a validated graph. Checks index ranges, probability ranges,
    /// and per-ad duplicate (src, dst) pairs.
    pub fn new(num_users: usize, per_ad_edges: Vec<Vec<Edge>>) -> Result<Self, ModelError> {
        for (ad, edges) in per_ad_edges.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for e in edges {
                if e.src >= num_users || e.dst >= num_users {
                    return Err(ModelError::Invalid(format!(
                        "edge ({}, {}) for ad {} references a user >= {}",
                        e.src, e.dst, ad, num_users
                    )));
                }
                if !(0.0..=1.0).contains(&e.prob) || e.prob.is_nan() {
                    return Err(ModelError::Invalid(format!(
                        "edge ({}, {}) for ad {} has probability {} outside [0, 1]",
                        e.src, e.dst, ad, e.prob
                    )));
                }
                if !seen.insert((e.src, e.dst)) {
                    return Err(ModelError::Invalid(format!(
                        "duplicate edge ({}, {}) for ad {}",
                        e.src, e.dst, ad
                    )));
                }
            }
        }
        Ok(Self {
            num_users,
            per_ad_edges,
        })
    }

    /// Duplicate a single edge list across `num_ads` ads (shared topology).
    pub fn shared_topology(
        num_users: usize,
        num_ads: usize,
        edges: Vec<Edge>,
    ) -> Result<Self, ModelError> {
        Self::new(num_users, vec![edges; num_ads])
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn num_ads(&self) -> usize {
        self.per_ad_edges.len()
    }

    /// Edges of one ad's diffusion graph, in input order.
    pub fn edges(&self, ad: usize) -> &[Edge] {
        &self.per_ad_edges[ad]
    }

    /// Serialize to the text edge-list format accepted by [`parse_graph`].
    /// `parse_graph(g.to_text())` reproduces an equivalent graph.
    pub fn to_text(&self) -> String {
        let mut out = format!("users={} ads={}\n", self.num_users, self.num_ads());
        for (ad, edges) in self.per_ad_edges.iter().enumerate() {
            for e in edges {
                out.push_str(&format!("{} {} {} {}\n", e.src, e.dst, ad, e.prob));
            }
        }
        out
    }
}

/// One advertiser: a price per engagement and a budget cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Advertiser {
    /// Price paid per engagement, > 0.
    pub alpha: f64,
    /// Maximum total payment, >= 0.
    pub budget: f64,
}

/// The ordered advertiser list; index in the list is the ad index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Campaign {
    advertisers: Vec<Advertiser>,
}

impl Campaign {
    pub fn new(advertisers: Vec<Advertiser>) -> Result<Self, ModelError> {
        for (i, a) in advertisers.iter().enumerate() {
            if a.alpha.is_nan() || a.alpha <= 0.0 {
                return Err(ModelError::Invalid(format!(
                    "ad {}: alpha must be > 0, got {}",
                    i, a.alpha
                )));
            }
            if a.budget.is_nan() || a.budget < 0.0 {
                return Err(ModelError::Invalid(format!(
                    "ad {}: budget must be >= 0, got {}",
                    i, a.budget
                )));
            }
        }
        Ok(Self { advertisers })
    }

    pub fn num_ads(&self) -> usize {
        self.advertisers.len()
    }

    pub fn advertisers(&self) -> &[Advertiser] {
        &self.advertisers
    }

    pub fn ad(&self, ad: usize) -> Advertiser {
        self.advertisers[ad]
    }

    /// Sum of all budgets.
    pub fn total_budget(&self) -> f64 {
        self.advertisers.iter().map(|a| a.budget).sum()
    }
}

/// Per-ad seed sets; equivalently the 0/1 user-by-ad assignment matrix,
/// where entry (i, j) is set iff user i is in `seed_sets[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    pub seed_sets: Vec<BTreeSet<usize>>,
}

impl Allocation {
    /// The empty allocation for `num_ads` ads.
    pub fn empty(num_ads: usize) -> Self {
        Self {
            seed_sets: vec![BTreeSet::new(); num_ads],
        }
    }

    pub fn num_ads(&self) -> usize {
        self.seed_sets.len()
    }

    /// Check every referenced user index against `num_users` and the ad
    /// count against `num_ads`.
    pub fn validate(&self, num_users: usize, num_ads: usize) -> Result<(), ModelError> {
        if self.seed_sets.len() != num_ads {
            return Err(ModelError::Invalid(format!(
                "allocation has {} seed sets but the campaign has {} ads",
                self.seed_sets.len(),
                num_ads
            )));
        }
        for (ad, set) in self.seed_sets.iter().enumerate() {
            if let Some(&u) = set.iter().next_back() {
                if u >= num_users {
                    return Err(ModelError::Invalid(format!(
                        "ad {} seeds user {} but the graph has {} users",
                        ad, u, num_users
                    )));
                }
            }
        }
        Ok(())
    }

    /// The assignment-matrix entry for (user, ad).
    pub fn assigned(&self, user: usize, ad: usize) -> bool {
        self.seed_sets[ad].contains(&user)
    }

    /// Per-user attention costs (how many ads each user is seeded for) and
    /// the grand total over all users and ads.
    pub fn attention_counts(&self, num_users: usize) -> (Vec<usize>, usize) {
        let mut per_user = vec![0usize; num_users];
        let mut total = 0usize;
        for set in &self.seed_sets {
            for &u in set {
                per_user[u] += 1;
                total += 1;
            }
        }
        (per_user, total)
    }

    /// All assigned (user, ad) pairs in (user, ad)-lexicographic order.
    pub fn assignment_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self
            .seed_sets
            .iter()
            .enumerate()
            .flat_map(|(ad, set)| set.iter().map(move |&u| (u, ad)))
            .collect();
        pairs.sort_unstable();
        pairs
    }
}

/// Per-user attention limits and the overall attention limit.
///
/// A per-user limit at or above the ad count never binds; there is no
/// separate "unbounded" encoding.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttentionConstraints {
    kappa: Vec<usize>,
    overall: usize,
}

impl AttentionConstraints {
    pub fn new(kappa: Vec<usize>, overall: usize) -> Self {
        Self { kappa, overall }
    }

    /// Uniform per-user limit for `num_users` users.
    pub fn uniform(num_users: usize, kappa: usize, overall: usize) -> Self {
        Self {
            kappa: vec![kappa; num_users],
            overall,
        }
    }

    pub fn num_users(&self) -> usize {
        self.kappa.len()
    }

    pub fn kappa(&self, user: usize) -> usize {
        self.kappa[user]
    }

    pub fn kappas(&self) -> &[usize] {
        &self.kappa
    }

    /// The overall attention limit K.
    pub fn overall(&self) -> usize {
        self.overall
    }
}
