use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use strucnet::decompose::{max_matching, scc_decompose};
use strucnet::design::{
    check_structural, composite_placement, hypothesis_report, minimal_placement, verify_composite,
    Placement, StructuralVerdict,
};
use strucnet::numeric::{kalman_mc, scale_to_spectral_radius, LinearSystem, SimConfig};
use strucnet::structmat::{
    random_weights, read_graph, size_cap_from_env, OutputPattern, Pattern, WeightRange, WeightedMatrix,
};
use strucnet::{Error, Mode};

#[derive(Parser)]
#[command(name = "strucnet", version, about = "Structural observability and controllability of networks and their Kronecker composites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Compact single-line JSON output.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Structural rank and exposable nodes of a network.
    Srank(GraphArgs),
    /// Strongly connected components with parent/child classification.
    Scc(GraphArgs),
    /// Minimal sensor (obs) or input (ctl) placement.
    Place(GraphArgs),
    /// Placement for a factor ⊗ replica composite.
    Compose(CompositeArgs),
    /// Check a measurement/input structure against a network or composite.
    Verify(VerifyArgs),
    /// Monte-Carlo Kalman filtering on a network or composite.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "obs")]
    mode: Mode,
}

#[derive(Args)]
struct CompositeArgs {
    #[arg(long)]
    factor: PathBuf,
    #[arg(long)]
    replica: PathBuf,
    #[arg(long, default_value = "obs")]
    mode: Mode,
}

/// Either `--graph` or `--factor` with `--replica`.
#[derive(Args)]
struct Target {
    #[arg(long, conflicts_with_all = ["factor", "replica"], required_unless_present_all = ["factor", "replica"])]
    graph: Option<PathBuf>,
    #[arg(long, requires = "replica")]
    factor: Option<PathBuf>,
    #[arg(long, requires = "factor")]
    replica: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    target: Target,
    /// Output pattern, placement or compose output JSON.
    #[arg(long)]
    hc: PathBuf,
    #[arg(long, default_value = "obs")]
    mode: Mode,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    target: Target,
    /// Measurement structure; computed from a minimal placement when omitted.
    #[arg(long)]
    hc: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    /// Process and measurement noise standard deviation.
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Spectral radius the random weights are scaled to.
    #[arg(long, default_value_t = 1.93)]
    rho: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

struct Outcome {
    value: Value,
    positive: bool,
}

fn main() -> ExitCode {
    // clap exits 2 on usage errors, which is reserved for negative verdicts here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli.command) {
        Ok(outcome) => {
            let text = if cli.json {
                serde_json::to_string(&outcome.value)
            } else {
                serde_json::to_string_pretty(&outcome.value)
            };
            println!("{}", text.expect("JSON values always serialize"));
            if outcome.positive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Srank(args) => srank(args),
        Command::Scc(args) => scc(args),
        Command::Place(args) => place(args),
        Command::Compose(args) => compose(args),
        Command::Verify(args) => verify(args),
        Command::Simulate(args) => simulate(args),
    }
}

fn load(path: &Path) -> Result<Pattern> {
    let graph = read_graph(path).with_context(|| format!("reading {}", path.display()))?;
    graph.pattern().with_context(|| format!("invalid graph {}", path.display()))
}

fn srank(args: &GraphArgs) -> Result<Outcome> {
    let p = load(&args.graph)?;
    let p = match args.mode {
        Mode::Observability => p,
        Mode::Controllability => p.transpose(),
    };
    let m = max_matching(&p, None, None)?;
    Ok(Outcome {
        value: json!({
            "mode": args.mode,
            "n": p.n(),
            "srank": m.srank,
            "deficiency": p.n() - m.srank,
            "exposable": m.exposable_cols,
        }),
        positive: true,
    })
}

fn scc(args: &GraphArgs) -> Result<Outcome> {
    let p = load(&args.graph)?;
    let report = scc_decompose(&p);
    Ok(Outcome {
        value: json!({
            "n": p.n(),
            "components": report.components,
            "parents": report.parents,
            "children": report.children,
            "condensation_edges": report.condensation_edges,
            "strongly_connected": report.is_strongly_connected(),
        }),
        positive: true,
    })
}

fn place(args: &GraphArgs) -> Result<Outcome> {
    let p = load(&args.graph)?;
    let placement = minimal_placement(&p, args.mode);
    let verdict = check_structural(&p, &placement.output_pattern(), args.mode)?;
    let mut value = serde_json::to_value(&placement)?;
    value["verdict"] = serde_json::to_value(&verdict)?;
    Ok(Outcome {
        value,
        positive: verdict.observable_or_controllable,
    })
}

fn compose(args: &CompositeArgs) -> Result<Outcome> {
    let factor = load(&args.factor)?;
    let replica = load(&args.replica)?;
    let h = minimal_placement(&replica, args.mode);
    match composite_placement(&factor, &replica, &h, size_cap_from_env()?) {
        Ok(c) => {
            let mut value = serde_json::to_value(&c)?;
            value["n"] = json!(c.hc.n());
            value["replica_placement"] = serde_json::to_value(&h)?;
            Ok(Outcome { value, positive: true })
        }
        Err(
            e @ (Error::NotFullSRank { .. } | Error::NotSelfDamped { .. } | Error::NotStronglyConnected { .. }),
        ) => Ok(Outcome {
            value: json!({
                "mode": args.mode,
                "error": e.to_string(),
                "report": hypothesis_report(&factor, &replica, args.mode),
            }),
            positive: false,
        }),
        Err(e) => Err(e.into()),
    }
}

enum Network {
    Single(Pattern),
    Composite(Pattern, Pattern),
}

impl Network {
    fn load(target: &Target) -> Result<Self> {
        match (&target.graph, &target.factor, &target.replica) {
            (Some(g), None, None) => Ok(Network::Single(load(g)?)),
            (None, Some(f), Some(r)) => Ok(Network::Composite(load(f)?, load(r)?)),
            _ => bail!("give either --graph or both --factor and --replica"),
        }
    }

    fn n(&self) -> usize {
        match self {
            Network::Single(p) => p.n(),
            Network::Composite(f, r) => f.n() * r.n(),
        }
    }

    fn check(&self, hc: &OutputPattern, mode: Mode) -> Result<StructuralVerdict> {
        Ok(match self {
            Network::Single(p) => check_structural(p, hc, mode)?,
            Network::Composite(f, r) => verify_composite(f, r, hc, mode, size_cap_from_env()?)?,
        })
    }

    fn pattern(&self) -> Result<Pattern> {
        Ok(match self {
            Network::Single(p) => p.clone(),
            Network::Composite(f, r) => f.kronecker_capped(r, size_cap_from_env()?)?,
        })
    }
}

/// Accepts a bare output pattern, a placement (`measured` + `n`) or compose
/// output (`hc` key).
fn read_output_pattern(path: &Path, n: usize) -> Result<OutputPattern> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let hc = if let Some(hc) = value.get("hc") {
        serde_json::from_value(hc.clone())?
    } else if value.get("measured").is_some() {
        let placement: Placement = serde_json::from_value(value)?;
        OutputPattern::dedicated(placement.n, &placement.nodes())?
    } else {
        serde_json::from_value::<OutputPattern>(value)
            .map_err(|e| anyhow!("{}: not an output pattern, placement or compose output ({e})", path.display()))?
    };
    if hc.n() != n {
        bail!("{} has {} columns, network has {n} states", path.display(), hc.n());
    }
    Ok(hc)
}

fn verify(args: &VerifyArgs) -> Result<Outcome> {
    let network = Network::load(&args.target)?;
    let hc = read_output_pattern(&args.hc, network.n())?;
    let verdict = network.check(&hc, args.mode)?;
    Ok(Outcome {
        positive: verdict.observable_or_controllable,
        value: serde_json::to_value(&verdict)?,
    })
}

fn simulate(args: &SimulateArgs) -> Result<Outcome> {
    let network = Network::load(&args.target)?;
    let hc = match &args.hc {
        Some(path) => read_output_pattern(path, network.n())?,
        None => match &network {
            Network::Single(p) => minimal_placement(p, Mode::Observability).output_pattern(),
            Network::Composite(f, r) => {
                let h = minimal_placement(r, Mode::Observability);
                composite_placement(f, r, &h, size_cap_from_env()?)?.hc
            }
        },
    };
    let pattern = network.pattern()?;
    let raw = random_weights(&pattern, args.seed, WeightRange::default())?;
    let a = scale_to_spectral_radius(&raw, args.rho)?;
    let sys = LinearSystem::new(a, WeightedMatrix::from_output_pattern(&hc), args.noise, args.noise)?;
    let cfg = SimConfig {
        steps: args.steps,
        trials: args.trials,
        seed: args.seed,
        threads: args.threads,
        ..SimConfig::default()
    };
    let result = kalman_mc(&sys, &cfg)?;
    if let Some(out) = &args.out {
        fs::write(out, result.to_csv()).with_context(|| format!("writing {}", out.display()))?;
    }
    let summary = result.summary();
    Ok(Outcome {
        positive: summary.bounded,
        value: json!({
            "rho": summary.rho,
            "bounded": summary.bounded,
            "final_msee": summary.final_msee,
            "steps": summary.steps,
            "trials": args.trials,
            "sensors": hc.nodes(),
        }),
    })
}
