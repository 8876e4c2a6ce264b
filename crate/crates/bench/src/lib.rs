//! Instance builders shared by the benchmark suite.

use adalloc::model::{
    generate_synthetic, Advertiser, AttentionConstraints, Campaign, HyperSocialGraph, SynthKind,
};

pub struct BenchInstance {
    pub graph: HyperSocialGraph,
    pub campaign: Campaign,
    pub constraints: AttentionConstraints,
}

/// Erdos-Renyi instance with unit prices, budgets at a quarter of the user
/// count, per-user limit 1, and an overall limit of half the users.
pub fn er_instance(users: usize, ads: usize, prob: f64, seed: u64) -> BenchInstance {
    let graph = generate_synthetic(SynthKind::ErdosRenyi, users, ads, prob, seed)
        .expect("bench parameters are valid");
    let campaign = Campaign::new(
        (0..ads)
            .map(|_| Advertiser {
                alpha: 1.0,
                budget: users as f64 / 4.0,
            })
            .collect(),
    )
    .expect("bench campaign is valid");
    let constraints = AttentionConstraints::uniform(users, 1, (users / 2).max(1));
    BenchInstance {
        graph,
        campaign,
        constraints,
    }
}
