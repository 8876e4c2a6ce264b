//! Loading a problem instance (graph, campaign, constraints, spread
//! estimator) from CLI flags and files.

use crate::error::CliError;
use adalloc::model::{
    generate_synthetic, parse_campaign, parse_constraints, parse_graph, Allocation,
    AttentionConstraints, Campaign, HyperSocialGraph, SynthKind,
};
use adalloc::propagation::{ExactSpread, LiveEdgeEnsemble, SpreadEstimator};
use adalloc::seeding;
use clap::Args;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

/// Flags shared by every command that consumes an instance.
#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Graph file (edge-list format).
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,

    /// Generate the graph instead: `kind:users:ads:prob`, e.g. `chain:3:1:1.0`.
    #[arg(long, value_name = "SPEC", conflicts_with = "graph")]
    pub generate: Option<String>,

    /// Campaign file: one `ad alpha budget` line per ad.
    #[arg(long, value_name = "FILE")]
    pub campaign: PathBuf,

    /// Per-user attention limit: a uniform integer or a constraints file
    /// (lines `user kappa` plus one `K <value>` line).
    #[arg(long, value_name = "INT|FILE")]
    pub kappa: Option<String>,

    /// Overall attention limit; required with a uniform --kappa, overrides
    /// the file's K otherwise.
    #[arg(long = "K", value_name = "INT")]
    pub overall: Option<usize>,

    /// Live-edge samples per ad for the Monte Carlo spread estimator.
    #[arg(long, default_value_t = 10_000, value_name = "R")]
    pub samples: usize,

    /// Master seed; every random choice in the run derives from it.
    #[arg(long, default_value_t = 42, value_name = "N")]
    pub seed: u64,

    /// Exact spread by live-edge enumeration (needs <= 15 edges per ad).
    #[arg(long)]
    pub exact_spread: bool,
}

/// Either spread estimator behind one type, so solvers stay generic.
pub enum Estimator {
    Ensemble(LiveEdgeEnsemble),
    Exact(ExactSpread),
}

impl SpreadEstimator for Estimator {
    fn num_users(&self) -> usize {
        match self {
            Estimator::Ensemble(e) => e.num_users(),
            Estimator::Exact(e) => e.num_users(),
        }
    }

    fn num_ads(&self) -> usize {
        match self {
            Estimator::Ensemble(e) => e.num_ads(),
            Estimator::Exact(e) => e.num_ads(),
        }
    }

    fn spread(&self, ad: usize, seeds: &BTreeSet<usize>) -> f64 {
        match self {
            Estimator::Ensemble(e) => e.spread(ad, seeds),
            Estimator::Exact(e) => e.spread(ad, seeds),
        }
    }

    fn is_exact(&self) -> bool {
        matches!(self, Estimator::Exact(_))
    }
}

pub struct Instance {
    pub graph: HyperSocialGraph,
    pub campaign: Campaign,
    pub constraints: AttentionConstraints,
    pub estimator: Estimator,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn parse_generate_spec(spec: &str, seed: u64) -> Result<HyperSocialGraph, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 4 {
        return Err(CliError::usage(format!(
            "--generate expects kind:users:ads:prob, got {:?}",
            spec
        )));
    }
    let kind: SynthKind = parts[0].parse()?;
    let users: usize = parts[1]
        .parse()
        .map_err(|_| CliError::usage(format!("invalid user count {:?}", parts[1])))?;
    let ads: usize = parts[2]
        .parse()
        .map_err(|_| CliError::usage(format!("invalid ad count {:?}", parts[2])))?;
    let prob: f64 = parts[3]
        .parse()
        .map_err(|_| CliError::usage(format!("invalid probability {:?}", parts[3])))?;
    Ok(generate_synthetic(kind, users, ads, prob, seed)?)
}

impl InstanceArgs {
    pub fn load(&self) -> Result<Instance, CliError> {
        let graph = match (&self.graph, &self.generate) {
            (Some(path), None) => parse_graph(&read(path)?)?,
            (None, Some(spec)) => parse_generate_spec(spec, self.seed)?,
            _ => {
                return Err(CliError::usage(
                    "provide exactly one of --graph or --generate",
                ))
            }
        };

        let campaign = parse_campaign(&read(&self.campaign)?)?;
        if campaign.num_ads() != graph.num_ads() {
            return Err(CliError::validation(format!(
                "campaign has {} ads but the graph has {}",
                campaign.num_ads(),
                graph.num_ads()
            )));
        }

        let constraints = self.load_constraints(graph.num_users())?;

        let estimator = if self.exact_spread {
            Estimator::Exact(ExactSpread::new(&graph)?)
        } else {
            if self.samples == 0 {
                return Err(CliError::usage("--samples must be at least 1"));
            }
            Estimator::Ensemble(LiveEdgeEnsemble::sample(
                &graph,
                self.samples,
                seeding::child_seed(self.seed, "ensemble", &[]),
            ))
        };

        Ok(Instance {
            graph,
            campaign,
            constraints,
            estimator,
        })
    }

    fn load_constraints(&self, num_users: usize) -> Result<AttentionConstraints, CliError> {
        match &self.kappa {
            Some(value) => {
                if let Ok(uniform) = value.parse::<usize>() {
                    let overall = self.overall.ok_or_else(|| {
                        CliError::usage("a uniform --kappa needs --K for the overall limit")
                    })?;
                    Ok(AttentionConstraints::uniform(num_users, uniform, overall))
                } else {
                    let path = PathBuf::from(value);
                    let parsed = parse_constraints(&read(&path)?, num_users)?;
                    Ok(match self.overall {
                        Some(overall) => {
                            AttentionConstraints::new(parsed.kappas().to_vec(), overall)
                        }
                        None => parsed,
                    })
                }
            }
            None => Err(CliError::usage(
                "provide --kappa <int|file> (and --K for a uniform kappa)",
            )),
        }
    }
}

/// Accepts a solve output (anything with an `allocation` key), a bare
/// allocation object, or a plain list of seed lists.
pub fn load_allocation(path: &Path, graph: &HyperSocialGraph) -> Result<Allocation, CliError> {
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("{}: not valid JSON: {}", path.display(), e)))?;
    let candidate = if let Some(inner) = value.get("allocation") {
        inner.clone()
    } else {
        value
    };
    let alloc: Allocation = if candidate.get("seed_sets").is_some() {
        serde_json::from_value(candidate)
            .map_err(|e| CliError::validation(format!("invalid allocation object: {}", e)))?
    } else {
        let sets: Vec<BTreeSet<usize>> = serde_json::from_value(candidate).map_err(|e| {
            CliError::validation(format!("invalid allocation (expected seed lists): {}", e))
        })?;
        Allocation { seed_sets: sets }
    };
    alloc.validate(graph.num_users(), graph.num_ads())?;
    Ok(alloc)
}
