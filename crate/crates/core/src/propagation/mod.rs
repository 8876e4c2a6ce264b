//! Cascade simulation and spread estimation.
//!
//! Spread is estimated over a *fixed* ensemble of live-edge realizations:
//! each edge of ad `i` is kept independently with its probability, once per
//! sample, and the spread of a seed set is the mean reachable-set size
//! across samples. Freezing the randomness up front (common random numbers)
//! turns the estimate into a deterministic set function that is exactly
//! monotone and submodular, so greedy guarantees hold for the estimate
//! itself rather than only in expectation.

mod exact;

pub use exact::{ExactSpread, ExactSpreadError};

use crate::model::HyperSocialGraph;
use crate::seeding;
use rand::Rng;
use rayon::prelude::*;
use std::collections::BTreeSet;

/// An estimated expected engagement count for one ad and seed set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadEstimate {
    pub value: f64,
}

/// A deterministic per-ad spread function σ̂_i.
///
/// Implemented by the Monte Carlo [`LiveEdgeEnsemble`] and the enumerating
/// [`ExactSpread`]; objectives and solvers accept either interchangeably.
pub trait SpreadEstimator: Sync {
    fn num_users(&self) -> usize;

    fn num_ads(&self) -> usize;

    /// σ̂(seeds) for one ad: expected number of users engaged when `seeds`
    /// start the cascade. Seeds count themselves; the empty set spreads 0.
    fn spread(&self, ad: usize, seeds: &BTreeSet<usize>) -> f64;

    /// True when `spread` is an exact expectation rather than a sampled
    /// estimate. Cap-detection comparisons use exact equality in that case.
    fn is_exact(&self) -> bool {
        false
    }
}

/// Adjacency of one sampled live-edge realization, in CSR form.
#[derive(Debug, Clone)]
struct SampleAdjacency {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl SampleAdjacency {
    fn build(num_users: usize, live: &[(u32, u32)]) -> Self {
        let mut degree = vec![0u32; num_users];
        for &(src, _) in live {
            degree[src as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(num_users + 1);
        let mut acc = 0u32;
        offsets.push(0);
        for d in &degree {
            acc += d;
            offsets.push(acc);
        }
        let mut cursor: Vec<u32> = offsets[..num_users].to_vec();
        let mut targets = vec![0u32; live.len()];
        for &(src, dst) in live {
            targets[cursor[src as usize] as usize] = dst;
            cursor[src as usize] += 1;
        }
        Self { offsets, targets }
    }

    fn neighbors(&self, u: usize) -> &[u32] {
        &self.targets[self.offsets[u] as usize..self.offsets[u + 1] as usize]
    }

    fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.offsets.len() - 1)
            .flat_map(move |u| self.neighbors(u).iter().map(move |&v| (u as u32, v)))
    }

    /// Number of users reachable from `seeds` (seeds included), and
    /// optionally the set itself.
    fn reach_count(&self, seeds: &BTreeSet<usize>, visited: &mut [bool]) -> u64 {
        visited.fill(false);
        let mut stack: Vec<u32> = Vec::new();
        let mut count = 0u64;
        for &s in seeds {
            if !visited[s] {
                visited[s] = true;
                count += 1;
                stack.push(s as u32);
            }
        }
        while let Some(u) = stack.pop() {
            for &v in self.neighbors(u as usize) {
                if !visited[v as usize] {
                    visited[v as usize] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count
    }
}

/// A fixed set of sampled edge realizations, `R` per ad.
///
/// Construction fans out across (ad, sample) cells; each cell draws from
/// its own child rng of `(master seed, ad, sample)`, so the result is
/// independent of scheduling and identical however it is built.
///
/// For graphs of at most 64 users the per-sample single-source reach sets
/// are memoized as bitmasks; queries then reduce to OR + popcount and are
/// bit-identical to the BFS path.
pub struct LiveEdgeEnsemble {
    num_users: usize,
    num_samples: usize,
    /// samples[ad][r] — one realization per (ad, sample) cell.
    samples: Vec<Vec<SampleAdjacency>>,
    /// reach[ad][r][u] — users reachable from u in realization (ad, r);
    /// only for graphs with <= 64 users.
    reach: Option<Vec<Vec<Vec<u64>>>>,
}

const REACH_CACHE_MAX_USERS: usize = 64;

impl LiveEdgeEnsemble {
    /// Sample `num_samples` live-edge realizations per ad.
    pub fn sample(graph: &HyperSocialGraph, num_samples: usize, master_seed: u64) -> Self {
        assert!(num_samples >= 1, "need at least one sample");
        let num_users = graph.num_users();
        let samples: Vec<Vec<SampleAdjacency>> = (0..graph.num_ads())
            .map(|ad| {
                (0..num_samples)
                    .into_par_iter()
                    .map(|r| {
                        let mut rng =
                            seeding::child_rng(master_seed, "live-edge", &[ad as u64, r as u64]);
                        let live: Vec<(u32, u32)> = graph
                            .edges(ad)
                            .iter()
                            .filter(|e| rng.gen::<f64>() < e.prob)
                            .map(|e| (e.src as u32, e.dst as u32))
                            .collect();
                        SampleAdjacency::build(num_users, &live)
                    })
                    .collect()
            })
            .collect();

        let reach = (num_users <= REACH_CACHE_MAX_USERS).then(|| {
            samples
                .iter()
                .map(|per_ad| {
                    per_ad
                        .par_iter()
                        .map(|sample| closure_masks(num_users, sample))
                        .collect()
                })
                .collect()
        });

        Self {
            num_users,
            num_samples,
            samples,
            reach,
        }
    }

    pub fn num_samples(&self) -> usize {
        self.num_samples
    }

    /// Live edges of one realization, in (src, dst) order of the CSR walk.
    pub fn live_edges(&self, ad: usize, sample: usize) -> Vec<(usize, usize)> {
        self.samples[ad][sample]
            .edges()
            .map(|(s, d)| (s as usize, d as usize))
            .collect()
    }

    /// Sum over samples of |reach(seeds)| as an exact integer.
    ///
    /// `spread` is this total divided by R; property tests compare the
    /// integer form so that monotonicity and submodularity checks are free
    /// of rounding.
    pub fn reach_total(&self, ad: usize, seeds: &BTreeSet<usize>) -> u64 {
        if seeds.is_empty() {
            return 0;
        }
        if let Some(reach) = &self.reach {
            return reach[ad]
                .par_iter()
                .map(|masks| {
                    let mut m = 0u64;
                    for &s in seeds {
                        m |= masks[s];
                    }
                    u64::from(m.count_ones())
                })
                .sum();
        }
        self.samples[ad]
            .par_iter()
            .map_init(
                || vec![false; self.num_users],
                |visited, sample| sample.reach_count(seeds, visited),
            )
            .sum()
    }

    /// The spread estimate σ̂(seeds) = reach_total / R.
    pub fn estimate(&self, ad: usize, seeds: &BTreeSet<usize>) -> SpreadEstimate {
        SpreadEstimate {
            value: self.reach_total(ad, seeds) as f64 / self.num_samples as f64,
        }
    }
}

impl SpreadEstimator for LiveEdgeEnsemble {
    fn num_users(&self) -> usize {
        self.num_users
    }

    fn num_ads(&self) -> usize {
        self.samples.len()
    }

    fn spread(&self, ad: usize, seeds: &BTreeSet<usize>) -> f64 {
        self.estimate(ad, seeds).value
    }
}

/// Per-user reachable-set bitmasks for one realization (num_users <= 64).
fn closure_masks(num_users: usize, sample: &SampleAdjacency) -> Vec<u64> {
    let mut visited = vec![false; num_users];
    (0..num_users)
        .map(|u| {
            visited.fill(false);
            let mut mask = 0u64;
            let mut stack = vec![u as u32];
            visited[u] = true;
            mask |= 1u64 << u;
            while let Some(x) = stack.pop() {
                for &v in sample.neighbors(x as usize) {
                    if !visited[v as usize] {
                        visited[v as usize] = true;
                        mask |= 1u64 << v;
                        stack.push(v);
                    }
                }
            }
            mask
        })
        .collect()
}

/// Run one forward independent-cascade realization and return the final
/// active set.
///
/// Seeds are active at step 0; each newly active `u` gets one chance per
/// inactive out-neighbor `v`, succeeding with the edge probability. Used to
/// cross-validate the live-edge estimator: averaging the active-set size
/// over many rng seeds estimates the same expectation.
pub fn simulate_cascade(
    graph: &HyperSocialGraph,
    ad: usize,
    seeds: &BTreeSet<usize>,
    rng_seed: u64,
) -> BTreeSet<usize> {
    let mut rng = seeding::child_rng(rng_seed, "cascade", &[ad as u64]);
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); graph.num_users()];
    for e in graph.edges(ad) {
        adj[e.src].push((e.dst, e.prob));
    }
    let mut active: BTreeSet<usize> = seeds.clone();
    let mut frontier: Vec<usize> = seeds.iter().copied().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for u in frontier {
            for &(v, p) in &adj[u] {
                if !active.contains(&v) && rng.gen::<f64>() < p {
                    active.insert(v);
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    active
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_synthetic, SynthKind};

    fn chain(prob: f64) -> HyperSocialGraph {
        generate_synthetic(SynthKind::Chain, 3, 1, prob, 7).unwrap()
    }

    fn seeds(users: &[usize]) -> BTreeSet<usize> {
        users.iter().copied().collect()
    }

    #[test]
    fn all_live_when_probability_one() {
        let g = chain(1.0);
        let ens = LiveEdgeEnsemble::sample(&g, 20, 42);
        for r in 0..20 {
            assert_eq!(ens.live_edges(0, r), vec![(0, 1), (1, 2)]);
        }
    }

    #[test]
    fn all_dead_when_probability_zero() {
        let g = chain(0.0);
        let ens = LiveEdgeEnsemble::sample(&g, 20, 42);
        for r in 0..20 {
            assert!(ens.live_edges(0, r).is_empty());
        }
    }

    #[test]
    fn edge_frequency_concentrates_near_probability() {
        // Binomial(10000, 0.5): sd of the frequency is 0.005, so +/-0.02 is
        // a 4-sigma window around 0.5.
        let g = chain(0.5);
        let ens = LiveEdgeEnsemble::sample(&g, 10_000, 42);
        let live_01 = (0..10_000)
            .filter(|&r| ens.live_edges(0, r).contains(&(0, 1)))
            .count();
        let freq = live_01 as f64 / 10_000.0;
        assert!(
            (freq - 0.5).abs() <= 0.02,
            "frequency {} too far from 0.5",
            freq
        );
    }

    #[test]
    fn empty_seed_set_spreads_zero() {
        let g = chain(0.5);
        let ens = LiveEdgeEnsemble::sample(&g, 100, 42);
        assert_eq!(ens.estimate(0, &BTreeSet::new()).value, 0.0);
    }

    #[test]
    fn deterministic_cascade_reaches_whole_chain() {
        let g = chain(1.0);
        let ens = LiveEdgeEnsemble::sample(&g, 17, 42);
        assert_eq!(ens.estimate(0, &seeds(&[0])).value, 3.0);
    }

    #[test]
    fn half_probability_chain_matches_analytic_expectation() {
        // From v0: v0 always engaged; v1 with probability 1/2; v2 only when
        // both edges are live, probability 1/4. Expected spread 1.75.
        let g = chain(0.5);
        let ens = LiveEdgeEnsemble::sample(&g, 10_000, 42);
        let est = ens.estimate(0, &seeds(&[0])).value;
        assert!(
            (est - 1.75).abs() <= 0.05,
            "estimate {} too far from 1.75",
            est
        );
    }

    #[test]
    fn ensemble_is_reproducible() {
        let g = generate_synthetic(SynthKind::ErdosRenyi, 10, 2, 0.3, 5).unwrap();
        let a = LiveEdgeEnsemble::sample(&g, 50, 9);
        let b = LiveEdgeEnsemble::sample(&g, 50, 9);
        for ad in 0..2 {
            for r in 0..50 {
                assert_eq!(a.live_edges(ad, r), b.live_edges(ad, r));
            }
        }
        let s = seeds(&[0, 3, 7]);
        assert_eq!(a.reach_total(0, &s), b.reach_total(0, &s));
    }

    #[test]
    fn cached_and_bfs_paths_agree() {
        let g = generate_synthetic(SynthKind::ErdosRenyi, 12, 2, 0.25, 11).unwrap();
        let ens = LiveEdgeEnsemble::sample(&g, 64, 13);
        assert!(ens.reach.is_some());
        let mut visited = vec![false; g.num_users()];
        for ad in 0..2 {
            for s in [seeds(&[0]), seeds(&[1, 4]), seeds(&[0, 5, 9, 11])] {
                let via_cache = ens.reach_total(ad, &s);
                let via_bfs: u64 = ens.samples[ad]
                    .iter()
                    .map(|sample| sample.reach_count(&s, &mut visited))
                    .sum();
                assert_eq!(via_cache, via_bfs);
            }
        }
    }

    #[test]
    fn large_graphs_fall_back_to_bfs_queries() {
        // 70 users exceeds the bitmask reach cache.
        let g = generate_synthetic(SynthKind::Chain, 70, 1, 1.0, 7).unwrap();
        let ens = LiveEdgeEnsemble::sample(&g, 8, 3);
        assert!(ens.reach.is_none());
        assert_eq!(ens.estimate(0, &seeds(&[0])).value, 70.0);
        assert_eq!(ens.estimate(0, &seeds(&[69])).value, 1.0);
        assert_eq!(ens.estimate(0, &BTreeSet::new()).value, 0.0);
    }

    #[test]
    fn cascade_trivial_cases() {
        let g = chain(1.0);
        assert!(simulate_cascade(&g, 0, &BTreeSet::new(), 3).is_empty());
        assert_eq!(simulate_cascade(&g, 0, &seeds(&[0]), 3), seeds(&[0, 1, 2]));
    }

    #[test]
    fn cascade_mean_agrees_with_live_edge_estimate() {
        let g = chain(0.5);
        let ens = LiveEdgeEnsemble::sample(&g, 10_000, 42);
        let est = ens.estimate(0, &seeds(&[0])).value;
        let total: usize = (0..10_000u64)
            .map(|s| simulate_cascade(&g, 0, &seeds(&[0]), s).len())
            .sum();
        let mean = total as f64 / 10_000.0;
        assert!(
            (mean - est).abs() <= 0.05,
            "cascade mean {} vs estimate {}",
            mean,
            est
        );
    }
}
