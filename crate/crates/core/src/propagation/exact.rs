//! Exact spread by enumerating live-edge patterns.
//!
//! For an ad with k edges there are 2^k live/dead patterns; the exact
//! expected spread is the pattern-probability-weighted mean reach. This is
//! exponential in k and capped at 15 edges per ad — it exists to certify
//! the Monte Carlo estimator and the solvers on small instances, not to
//! scale.

use crate::model::{Edge, HyperSocialGraph};
use crate::propagation::SpreadEstimator;
use std::collections::BTreeSet;
use thiserror::Error;

/// Hard cap on edges per ad for exact enumeration.
pub const MAX_EXACT_EDGES: usize = 15;

const TABLE_MAX_USERS: usize = 16;
// Precompute a full seed-mask table only while 2^(users+edges) stays small.
const TABLE_MAX_WORK_LOG2: usize = 24;

#[derive(Debug, Error)]
pub enum ExactSpreadError {
    #[error("ad {ad} has {count} edges; exact enumeration is capped at {max} per ad")]
    TooManyEdges { ad: usize, count: usize, max: usize },
}

enum AdSpread {
    /// Spread for every seed mask, precomputed; index = seed bitmask.
    Table(Vec<f64>),
    /// Enumerate patterns on each query.
    PerQuery { edges: Vec<Edge>, num_users: usize },
}

/// Exact per-ad spread σ_i via live-edge pattern enumeration.
pub struct ExactSpread {
    num_users: usize,
    per_ad: Vec<AdSpread>,
}

impl ExactSpread {
    pub fn new(graph: &HyperSocialGraph) -> Result<Self, ExactSpreadError> {
        Self::build(graph, false)
    }

    fn build(graph: &HyperSocialGraph, force_per_query: bool) -> Result<Self, ExactSpreadError> {
        let n = graph.num_users();
        let per_ad = (0..graph.num_ads())
            .map(|ad| {
                let edges = graph.edges(ad);
                if edges.len() > MAX_EXACT_EDGES {
                    return Err(ExactSpreadError::TooManyEdges {
                        ad,
                        count: edges.len(),
                        max: MAX_EXACT_EDGES,
                    });
                }
                let tabulate = !force_per_query
                    && n <= TABLE_MAX_USERS
                    && n + edges.len() <= TABLE_MAX_WORK_LOG2;
                if tabulate {
                    Ok(AdSpread::Table(spread_table(n, edges)))
                } else {
                    Ok(AdSpread::PerQuery {
                        edges: edges.to_vec(),
                        num_users: n,
                    })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            num_users: n,
            per_ad,
        })
    }
}

impl SpreadEstimator for ExactSpread {
    fn num_users(&self) -> usize {
        self.num_users
    }

    fn num_ads(&self) -> usize {
        self.per_ad.len()
    }

    fn spread(&self, ad: usize, seeds: &BTreeSet<usize>) -> f64 {
        debug_assert!(seeds.iter().all(|&u| u < self.num_users));
        match &self.per_ad[ad] {
            AdSpread::Table(table) => {
                let mut mask = 0usize;
                for &u in seeds {
                    mask |= 1 << u;
                }
                table[mask]
            }
            AdSpread::PerQuery { edges, num_users } => {
                spread_by_enumeration(*num_users, edges, seeds)
            }
        }
    }

    fn is_exact(&self) -> bool {
        true
    }
}

/// Weight of one live/dead pattern: product over edges of p or (1 - p).
fn pattern_weight(edges: &[Edge], pattern: u32) -> f64 {
    let mut w = 1.0;
    for (b, e) in edges.iter().enumerate() {
        w *= if pattern >> b & 1 == 1 {
            e.prob
        } else {
            1.0 - e.prob
        };
    }
    w
}

/// Per-user reachability masks for the live subgraph of one pattern.
fn closure_rows(num_users: usize, edges: &[Edge], pattern: u32) -> Vec<u32> {
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); num_users];
    for (b, e) in edges.iter().enumerate() {
        if pattern >> b & 1 == 1 {
            adj[e.src].push(e.dst as u32);
        }
    }
    let mut rows = vec![0u32; num_users];
    let mut stack = Vec::new();
    for (u, row) in rows.iter_mut().enumerate() {
        let mut mask = 1u32 << u;
        stack.push(u as u32);
        while let Some(x) = stack.pop() {
            for &v in &adj[x as usize] {
                if mask >> v & 1 == 0 {
                    mask |= 1 << v;
                    stack.push(v);
                }
            }
        }
        *row = mask;
    }
    rows
}

/// σ(S) for every seed mask at once, accumulated pattern by pattern.
fn spread_table(num_users: usize, edges: &[Edge]) -> Vec<f64> {
    let size = 1usize << num_users;
    let mut table = vec![0.0f64; size];
    let mut reach = vec![0u32; size];
    for pattern in 0..(1u32 << edges.len()) {
        let w = pattern_weight(edges, pattern);
        let rows = closure_rows(num_users, edges, pattern);
        // reach[mask] = union of rows over mask's bits, built by peeling
        // the lowest bit so each mask costs O(1).
        for mask in 1..size {
            let low = mask.trailing_zeros() as usize;
            reach[mask] = reach[mask & (mask - 1)] | rows[low];
            table[mask] += w * f64::from(reach[mask].count_ones());
        }
    }
    table
}

/// σ(seeds) by direct pattern enumeration. Accumulates in the same pattern
/// order as [`spread_table`], so both paths produce identical floats.
fn spread_by_enumeration(num_users: usize, edges: &[Edge], seeds: &BTreeSet<usize>) -> f64 {
    if seeds.is_empty() {
        return 0.0;
    }
    let mut total = 0.0f64;
    let mut visited = vec![false; num_users];
    for pattern in 0..(1u32 << edges.len()) {
        let w = pattern_weight(edges, pattern);
        visited.fill(false);
        let mut count = 0u32;
        let mut stack: Vec<usize> = Vec::new();
        for &s in seeds {
            if !visited[s] {
                visited[s] = true;
                count += 1;
                stack.push(s);
            }
        }
        while let Some(u) = stack.pop() {
            for (b, e) in edges.iter().enumerate() {
                if pattern >> b & 1 == 1 && e.src == u && !visited[e.dst] {
                    visited[e.dst] = true;
                    count += 1;
                    stack.push(e.dst);
                }
            }
        }
        total += w * f64::from(count);
    }
    total
}
