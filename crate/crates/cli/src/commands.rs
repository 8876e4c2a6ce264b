//! Subcommand implementations.

use crate::error::CliError;
use crate::instance::{load_allocation, Estimator, InstanceArgs};
use crate::output::{certify_csv, emit, report_csv, to_pretty_json, Format};
use adalloc::certification::{self, CertifyOptions, Problem};
use adalloc::model::{generate_synthetic, Advertiser, AttentionConstraints, Campaign, SynthKind};
use adalloc::objectives::{self, PenaltyParams};
use adalloc::propagation::LiveEdgeEnsemble;
use adalloc::seeding;
use adalloc::solvers::{
    brute_force_opt, double_greedy_urmp, greedy_p1, greedy_p2, greedy_rmp, GreedyConfig,
    OracleObjective, SolveResult,
};
use clap::{Args, Subcommand};
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Subcommand)]
pub enum Command {
    /// Write a synthetic graph file (chain, star, erdos-renyi, isolated).
    Gen(GenArgs),
    /// Run an allocation solver and emit the result.
    Solve(SolveArgs),
    /// Evaluate every objective of a given allocation.
    Eval(EvalArgs),
    /// Brute-force optimum of a small instance (ground set <= 16 pairs).
    Oracle(OracleArgs),
    /// Compare solvers against the oracle on random instances and check
    /// the approximation bounds.
    Certify(CertifyArgs),
    /// Time solver runs on a generated instance.
    Bench(BenchArgs),
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Gen(args) => gen(args),
        Command::Solve(args) => solve(args),
        Command::Eval(args) => eval(args),
        Command::Oracle(args) => oracle(args),
        Command::Certify(args) => certify(args),
        Command::Bench(args) => bench(args),
    }
}

fn parse_phi(raw: &str) -> Result<Option<f64>, CliError> {
    if raw == "auto" {
        return Ok(None);
    }
    raw.parse::<f64>()
        .map(Some)
        .map_err(|_| CliError::usage(format!("--phi expects a number or \"auto\", got {:?}", raw)))
}

/// Resolve the penalty parameters, computing phi when requested.
fn resolve_params(
    lambda1: f64,
    lambda2: f64,
    phi: &str,
    campaign: &Campaign,
    constraints: &AttentionConstraints,
    estimator: &Estimator,
) -> Result<PenaltyParams, CliError> {
    Ok(match parse_phi(phi)? {
        Some(value) => PenaltyParams::new(lambda1, lambda2, value)?,
        None => PenaltyParams::with_auto_phi(lambda1, lambda2, campaign, constraints, estimator)?,
    })
}

#[derive(Args)]
pub struct GenArgs {
    /// Graph shape: chain, star, erdos-renyi, or isolated.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    users: usize,
    #[arg(long)]
    ads: usize,
    /// Edge probability (and erdos-renyi density).
    #[arg(long, default_value_t = 0.5)]
    prob: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn gen(args: GenArgs) -> Result<(), CliError> {
    let kind: SynthKind = args.kind.parse()?;
    let graph = generate_synthetic(kind, args.users, args.ads, args.prob, args.seed)?;
    emit(&args.out, graph.to_text())
}

#[derive(Args)]
pub struct SolveArgs {
    /// Which problem to solve: rmp, p1, urmp, or p2.
    #[arg(long)]
    problem: String,
    #[command(flatten)]
    instance: InstanceArgs,
    /// Individual-attention penalty weight (urmp/p2).
    #[arg(long, default_value_t = 0.0)]
    lambda1: f64,
    /// Overall-attention penalty weight (urmp/p2).
    #[arg(long, default_value_t = 0.0)]
    lambda2: f64,
    /// Shift constant for the penalized objectives: a number or "auto".
    /// Required for urmp/p2, rejected otherwise.
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn solve(args: SolveArgs) -> Result<(), CliError> {
    let problem: Problem = args.problem.parse()?;
    let penalized = problem.is_stochastic();
    let phi = match (&args.phi, penalized) {
        (None, true) => {
            return Err(CliError::usage(
                "--phi <number|auto> is required for urmp and p2",
            ))
        }
        (Some(_), false) => return Err(CliError::usage("--phi applies only to urmp and p2")),
        (phi, _) => phi.clone(),
    };

    let inst = args.instance.load()?;
    let params = match &phi {
        Some(raw) => Some(resolve_params(
            args.lambda1,
            args.lambda2,
            raw,
            &inst.campaign,
            &inst.constraints,
            &inst.estimator,
        )?),
        None => None,
    };

    let solver_seed = seeding::child_seed(args.instance.seed, "solver", &[]);
    let result = match problem {
        Problem::Rmp => greedy_rmp(
            &inst.estimator,
            &inst.campaign,
            &inst.constraints,
            &GreedyConfig::default(),
        ),
        Problem::P1 => greedy_p1(
            &inst.estimator,
            &inst.campaign,
            &inst.constraints,
            &GreedyConfig::default(),
        ),
        Problem::Urmp => double_greedy_urmp(
            &inst.estimator,
            &inst.campaign,
            &inst.constraints,
            params.as_ref().expect("params resolved for urmp"),
            solver_seed,
        )?,
        Problem::P2 => greedy_p2(
            &inst.estimator,
            &inst.campaign,
            &inst.constraints,
            params.as_ref().expect("params resolved for p2"),
            solver_seed,
        )?,
    };

    let payload = match args.format {
        Format::Json => to_pretty_json(&solve_payload(
            "problem",
            problem.name(),
            &result,
            &args.instance,
            params.as_ref(),
        )),
        Format::Csv => report_csv(&result.report, &result.allocation),
    };
    emit(&args.out, payload)
}

/// The solve/oracle JSON shape: allocation, objective values, trace, the
/// master seed, and the resolved parameters.
fn solve_payload(
    selector_key: &str,
    selector: &str,
    result: &SolveResult,
    instance: &InstanceArgs,
    params: Option<&PenaltyParams>,
) -> serde_json::Value {
    json!({
        selector_key: selector,
        "allocation": result.allocation,
        "objective_values": result.report,
        "trace": result.trace,
        "seed": instance.seed,
        "params": {
            "samples": if instance.exact_spread { json!(null) } else { json!(instance.samples) },
            "exact_spread": instance.exact_spread,
            "lambda1": params.map(|p| p.lambda1),
            "lambda2": params.map(|p| p.lambda2),
            "phi": params.map(|p| p.phi),
            "solver_seed": result.rng_seed,
        }
    })
}

#[derive(Args)]
pub struct EvalArgs {
    /// Allocation to evaluate: a solve output, an allocation object, or a
    /// plain JSON list of per-ad seed lists.
    #[arg(long, value_name = "FILE")]
    alloc: PathBuf,
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 0.0)]
    lambda1: f64,
    #[arg(long, default_value_t = 0.0)]
    lambda2: f64,
    /// Shift constant: a number or "auto".
    #[arg(long, default_value = "auto")]
    phi: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn eval(args: EvalArgs) -> Result<(), CliError> {
    let inst = args.instance.load()?;
    let allocation = load_allocation(&args.alloc, &inst.graph)?;
    let params = resolve_params(
        args.lambda1,
        args.lambda2,
        &args.phi,
        &inst.campaign,
        &inst.constraints,
        &inst.estimator,
    )?;
    let report = objectives::report(
        &allocation,
        &inst.campaign,
        &inst.constraints,
        &params,
        &inst.estimator,
    );
    let payload = match args.format {
        Format::Json => to_pretty_json(&serde_json::to_value(&report).expect("report serializes")),
        Format::Csv => report_csv(&report, &allocation),
    };
    emit(&args.out, payload)
}

#[derive(Args)]
pub struct OracleArgs {
    /// Objective to maximize: U, V, f, or fprime.
    #[arg(long)]
    objective: String,
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 0.0)]
    lambda1: f64,
    #[arg(long, default_value_t = 0.0)]
    lambda2: f64,
    /// Shift constant (f/fprime only): a number or "auto".
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn oracle(args: OracleArgs) -> Result<(), CliError> {
    // U and V are maximized under the hard attention constraints; the
    // shifted objectives carry the constraints as soft penalties instead.
    let (objective, enforce, penalized) = match args.objective.as_str() {
        "U" => (OracleObjective::Utility, true, false),
        "V" => (OracleObjective::Revenue, true, false),
        "f" => (OracleObjective::ShiftedUtility, false, true),
        "fprime" => (OracleObjective::ShiftedRevenue, false, true),
        other => {
            return Err(CliError::usage(format!(
                "unknown objective {:?} (expected U, V, f, or fprime)",
                other
            )))
        }
    };
    let phi = match (&args.phi, penalized) {
        (None, true) => {
            return Err(CliError::usage(
                "--phi <number|auto> is required for objectives f and fprime",
            ))
        }
        (Some(_), false) => {
            return Err(CliError::usage(
                "--phi applies only to objectives f and fprime",
            ))
        }
        (phi, _) => phi.clone(),
    };

    let inst = args.instance.load()?;
    let params = match &phi {
        Some(raw) => resolve_params(
            args.lambda1,
            args.lambda2,
            raw,
            &inst.campaign,
            &inst.constraints,
            &inst.estimator,
        )?,
        None => PenaltyParams::new(0.0, 0.0, 0.0)?,
    };
    let result = brute_force_opt(
        objective,
        &inst.estimator,
        &inst.campaign,
        &inst.constraints,
        &params,
        enforce,
    )?;
    let payload = match args.format {
        Format::Json => to_pretty_json(&solve_payload(
            "objective",
            &args.objective,
            &result,
            &args.instance,
            phi.as_ref().map(|_| &params),
        )),
        Format::Csv => report_csv(&result.report, &result.allocation),
    };
    emit(&args.out, payload)
}

#[derive(Args)]
pub struct CertifyArgs {
    /// Which bound to certify: rmp, p1, urmp, or p2.
    #[arg(long)]
    problem: String,
    /// Number of random instances.
    #[arg(long, default_value_t = 100)]
    instances: usize,
    /// Seeded solver runs per instance (urmp/p2 only).
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn certify(args: CertifyArgs) -> Result<(), CliError> {
    let problem: Problem = args.problem.parse()?;
    let report = certification::certify(&CertifyOptions {
        problem,
        instances: args.instances,
        trials: args.trials,
        seed: args.seed,
    })?;
    let payload = match args.format {
        Format::Json => to_pretty_json(&serde_json::to_value(&report).expect("report serializes")),
        Format::Csv => certify_csv(&report),
    };
    emit(&args.out, payload)
}

#[derive(Args)]
pub struct BenchArgs {
    /// Problem to time: rmp, p1, urmp, or p2.
    #[arg(long)]
    problem: String,
    #[arg(long, default_value_t = 50)]
    users: usize,
    #[arg(long, default_value_t = 2)]
    ads: usize,
    /// Erdos-Renyi density / edge probability of the generated graph.
    #[arg(long, default_value_t = 0.05)]
    prob: f64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Timed runs.
    #[arg(long, default_value_t = 3)]
    repeat: usize,
    /// Uniform per-user attention limit.
    #[arg(long, default_value_t = 1)]
    kappa: usize,
    /// Overall attention limit; defaults to users / 2.
    #[arg(long = "K")]
    overall: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn bench(args: BenchArgs) -> Result<(), CliError> {
    let problem: Problem = args.problem.parse()?;
    if args.repeat == 0 {
        return Err(CliError::usage("--repeat must be at least 1"));
    }
    let graph = generate_synthetic(
        SynthKind::ErdosRenyi,
        args.users,
        args.ads,
        args.prob,
        args.seed,
    )?;
    let budget = args.users as f64 / 4.0;
    let campaign = Campaign::new(
        (0..args.ads)
            .map(|_| Advertiser { alpha: 1.0, budget })
            .collect(),
    )?;
    let overall = args.overall.unwrap_or_else(|| (args.users / 2).max(1));
    let constraints = AttentionConstraints::uniform(args.users, args.kappa, overall);
    let ensemble = LiveEdgeEnsemble::sample(
        &graph,
        args.samples.max(1),
        seeding::child_seed(args.seed, "ensemble", &[]),
    );
    let params = if problem.is_stochastic() {
        Some(PenaltyParams::with_auto_phi(
            0.25,
            0.25,
            &campaign,
            &constraints,
            &ensemble,
        )?)
    } else {
        None
    };
    let solver_seed = seeding::child_seed(args.seed, "solver", &[]);

    let mut times_ms = Vec::with_capacity(args.repeat);
    let mut last: Option<SolveResult> = None;
    for _ in 0..args.repeat {
        let start = Instant::now();
        let result = match problem {
            Problem::Rmp => {
                greedy_rmp(&ensemble, &campaign, &constraints, &GreedyConfig::default())
            }
            Problem::P1 => greedy_p1(&ensemble, &campaign, &constraints, &GreedyConfig::default()),
            Problem::Urmp => double_greedy_urmp(
                &ensemble,
                &campaign,
                &constraints,
                params.as_ref().expect("params set for urmp"),
                solver_seed,
            )?,
            Problem::P2 => greedy_p2(
                &ensemble,
                &campaign,
                &constraints,
                params.as_ref().expect("params set for p2"),
                solver_seed,
            )?,
        };
        times_ms.push(start.elapsed().as_secs_f64() * 1e3);
        last = Some(result);
    }
    let last = last.expect("at least one run");
    let objective_value = match problem {
        Problem::Rmp => last.report.revenue,
        Problem::P1 => last.report.utility,
        Problem::Urmp => last.report.shifted_revenue,
        Problem::P2 => last.report.shifted_utility,
    };
    let mean = times_ms.iter().sum::<f64>() / times_ms.len() as f64;
    let payload = to_pretty_json(&json!({
        "problem": problem.name(),
        "users": args.users,
        "ads": args.ads,
        "prob": args.prob,
        "samples": args.samples,
        "seed": args.seed,
        "repeat": args.repeat,
        "times_ms": times_ms,
        "min_ms": times_ms.iter().cloned().fold(f64::INFINITY, f64::min),
        "mean_ms": mean,
        "max_ms": times_ms.iter().cloned().fold(0.0f64, f64::max),
        "objective_value": objective_value,
    }));
    emit(&args.out, payload)
}
