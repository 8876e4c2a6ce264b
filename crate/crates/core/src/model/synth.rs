//! Synthetic test-instance generators.

use super::{Edge, HyperSocialGraph, ModelError};
use crate::seeding;
use rand::Rng;
use std::str::FromStr;

/// Shape of a generated graph.
///
/// `Chain`, `Star`, and `Isolated` duplicate the same deterministic
/// topology across every ad; `ErdosRenyi` samples each ad's edge set
/// independently (each ordered pair present with probability `prob`, then
/// labeled `prob`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    Chain,
    Star,
    ErdosRenyi,
    Isolated,
}

impl FromStr for SynthKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        match s {
            "chain" => Ok(Self::Chain),
            "star" => Ok(Self::Star),
            "erdos-renyi" => Ok(Self::ErdosRenyi),
            "isolated" => Ok(Self::Isolated),
            other => Err(ModelError::Invalid(format!(
                "unknown generator kind {:?} (expected chain, star, erdos-renyi, or isolated)",
                other
            ))),
        }
    }
}

/// Generate a synthetic graph; deterministic for a fixed seed.
pub fn generate_synthetic(
    kind: SynthKind,
    num_users: usize,
    num_ads: usize,
    prob: f64,
    rng_seed: u64,
) -> Result<HyperSocialGraph, ModelError> {
    if num_users < 1 || num_ads < 1 {
        return Err(ModelError::Invalid(
            "generator needs at least 1 user and 1 ad".into(),
        ));
    }
    if !(0.0..=1.0).contains(&prob) || prob.is_nan() {
        return Err(ModelError::Invalid(format!(
            "generator probability {} outside [0, 1]",
            prob
        )));
    }
    match kind {
        SynthKind::Isolated => HyperSocialGraph::shared_topology(num_users, num_ads, Vec::new()),
        SynthKind::Chain => {
            let edges = (0..num_users.saturating_sub(1))
                .map(|i| Edge {
                    src: i,
                    dst: i + 1,
                    prob,
                })
                .collect();
            HyperSocialGraph::shared_topology(num_users, num_ads, edges)
        }
        SynthKind::Star => {
            let edges = (1..num_users)
                .map(|i| Edge {
                    src: 0,
                    dst: i,
                    prob,
                })
                .collect();
            HyperSocialGraph::shared_topology(num_users, num_ads, edges)
        }
        SynthKind::ErdosRenyi => {
            let per_ad_edges = (0..num_ads)
                .map(|ad| {
                    let mut rng = seeding::child_rng(rng_seed, "erdos-renyi", &[ad as u64]);
                    let mut edges = Vec::new();
                    for src in 0..num_users {
                        for dst in 0..num_users {
                            if src != dst && rng.gen::<f64>() < prob {
                                edges.push(Edge { src, dst, prob });
                            }
                        }
                    }
                    edges
                })
                .collect();
            HyperSocialGraph::new(num_users, per_ad_edges)
        }
    }
}
