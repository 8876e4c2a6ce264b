//! Seed-allocation solvers for social advertising campaigns.
//!
//! A platform assigns seed users to competing ads. Each ad spreads through
//! its own diffusion graph, each advertiser pays a fixed price per
//! engagement up to a budget, and the platform wants delivered revenue to
//! land on the budgets — neither under-delivering nor giving engagements
//! away for free — while respecting per-user and global attention limits.
//!
//! The crate is organized around that pipeline:
//!
//! - [`model`] — the hyper social graph (one edge set per ad), campaigns,
//!   allocations, attention constraints, plus file ingestion and synthetic
//!   instance generators.
//! - [`propagation`] — independent-cascade simulation and the fixed
//!   live-edge sample ensemble that makes spread estimates deterministic,
//!   monotone, and submodular, with an exact enumerator for small graphs.
//! - [`objectives`] — utility, regret, capped revenue, exponential
//!   attention penalties, and the shifted nonnegative objectives.
//! - [`feasibility`] — the matroid over (user, ad) assignment pairs induced
//!   by the attention constraints, with an exhaustive axiom verifier.
//! - [`solvers`] — greedy and randomized double-greedy allocation
//!   algorithms plus a brute-force oracle for small instances.
//! - [`certification`] — randomized harnesses that compare the solvers
//!   against the oracle and check the advertised approximation ratios.

pub mod certification;
pub mod feasibility;
pub mod model;
pub mod objectives;
pub mod propagation;
pub mod seeding;
pub mod solvers;

pub use feasibility::{can_add, is_independent, verify_matroid_axioms, AssignmentPair};
pub use model::{
    Advertiser, Allocation, AttentionConstraints, Campaign, Edge, HyperSocialGraph, ModelError,
    SynthKind,
};
pub use objectives::{ObjectiveReport, PenaltyParams};
pub use propagation::{
    simulate_cascade, ExactSpread, LiveEdgeEnsemble, SpreadEstimate, SpreadEstimator,
};
pub use solvers::{
    brute_force_opt, double_greedy_urmp, greedy_p1, greedy_p2, greedy_rmp, GreedyConfig,
    OracleObjective, SolveResult, SolverError, SolverTrace, StopReason,
};
