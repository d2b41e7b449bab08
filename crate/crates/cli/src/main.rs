use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use orient_core::bench::{run_bench, SuiteSpec};
use orient_core::generate::{generate_instance, with_random_waiting, Profile};
use orient_core::io::{
    parse_instance, parse_policy, serialize_instance, serialize_policy, InstanceFile, PolicyFile, Problem, ProblemKind,
    Scalar,
};
use orient_core::knap::solve_p2p_knap;
use orient_core::oracles::{
    oracle_adaptive_stoch, oracle_knap_orient, oracle_nonadaptive_stoch, oracle_p2p_orienteering, oracle_time_windows,
    OracleLimits,
};
use orient_core::p2p::solve_p2p;
use orient_core::scalar::{parse_rational, Reward};
use orient_core::stoch::{randomized_policy_value, simulate_policy, solve_p2p_stoch};
use orient_core::time_windows::{
    check_tw_feasibility, compute_margin_params, simulate_tw_policy, solve_time_windows,
    solve_time_windows_stochastic,
};
use orient_core::{CountingMinExcess, ExactMinExcess, Rational};

#[derive(Parser)]
#[command(name = "orient", version, about = "Orienteering solvers, exact oracles and benchmarks")]
struct Cli {
    /// Seed for generators and samplers; defaults to the instance's seed, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Human-readable text.
    Table,
    /// Newline-delimited JSON records.
    Rows,
}

#[derive(Subcommand)]
enum Command {
    /// Run an approximation algorithm on an instance file.
    Solve(SolveArgs),
    /// Solve an instance exactly by brute force (small instances only).
    Oracle(OracleArgs),
    /// Monte Carlo estimate of a stochastic policy's expected reward.
    Simulate(SimulateArgs),
    /// Write a random instance.
    Gen(GenArgs),
    /// Compare algorithms against oracles over seeded suites.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolveKind {
    P2p,
    Knap,
    Stoch,
    Tw,
}

#[derive(Args)]
struct SolveArgs {
    kind: SolveKind,
    instance: PathBuf,
    /// Deadline slack for `tw`, e.g. `1/4` or `0.25`.
    #[arg(long, default_value = "1")]
    epsilon: String,
    /// Plan `tw` against the instance's random waiting times.
    #[arg(long)]
    stochastic: bool,
    /// List every claimed vertex of a `tw` solution with its window check.
    #[arg(long)]
    slack_report: bool,
    /// Replicates for `tw --stochastic` simulation.
    #[arg(long, default_value_t = 10_000)]
    replicates: u64,
    /// Also write the `stoch` policy to this file.
    #[arg(long)]
    policy_out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleKind {
    P2p,
    Knap,
    Stoch,
    Adaptive,
    Tw,
}

#[derive(Args)]
struct OracleArgs {
    kind: OracleKind,
    instance: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    instance: PathBuf,
    policy: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    replicates: u64,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_parser = parse_kind)]
    kind: ProblemKind,
    #[arg(long, short)]
    n: usize,
    #[arg(long, default_value = "random-euclidean-grid", value_parser = parse_profile)]
    profile: Profile,
    /// Give `tw` vertices random waiting times up to this size.
    #[arg(long)]
    waiting: Option<i64>,
}

#[derive(Args)]
struct BenchArgs {
    /// Built-in suites to run: p2p, knap, stoch, tw.
    #[arg(value_parser = parse_kind)]
    suites: Vec<ProblemKind>,
    /// JSON file with an array of suite specs.
    #[arg(long)]
    suite_file: Option<PathBuf>,
    /// Instances per built-in suite.
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Slack parameter for built-in `tw` suites.
    #[arg(long)]
    epsilon: Option<String>,
    /// Include wall-clock runtimes (makes output vary between runs).
    #[arg(long)]
    timings: bool,
}

fn parse_kind(s: &str) -> Result<ProblemKind, String> {
    s.parse()
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    s.parse()
}

/// Errors that map to exit code 2.
#[derive(Debug)]
struct UsageError(anyhow::Error);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(e: impl Into<anyhow::Error>) -> anyhow::Error {
    anyhow::Error::new(UsageError(e.into()))
}

struct Output {
    format: Format,
    text: String,
    failed: bool,
}

impl Output {
    fn new(format: Format) -> Self {
        Output { format, text: String::new(), failed: false }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn record(&mut self, v: Value) {
        self.line(v.to_string());
    }
}

fn load(path: &Path) -> anyhow::Result<InstanceFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
    parse_instance(&text).with_context(|| format!("{}", path.display())).map_err(usage)
}

fn rational_arg(name: &str, text: &str) -> anyhow::Result<Rational> {
    parse_rational(text).ok_or_else(|| usage(anyhow!("--{name}: not a number: {text:?}")))
}

fn names_of(ids: &[usize], names: &[&str]) -> Vec<String> {
    ids.iter().map(|&i| names[i].to_string()).collect()
}

fn exact(q: &Rational) -> Value {
    serde_json::to_value(Scalar(q.clone())).expect("scalars serialize")
}

fn approx(q: &Rational) -> String {
    let s = Scalar(q.clone()).to_string();
    if q.is_integer() {
        s
    } else {
        format!("{s} (~{:.6})", Reward::to_f64(q))
    }
}

fn solve(args: &SolveArgs, seed: Option<u64>, out: &mut Output) -> anyhow::Result<()> {
    let file = load(&args.instance)?;
    let seed = seed.or(file.seed).unwrap_or(0);
    let names = file.names();
    let problem = file.to_problem().map_err(usage)?;
    let solver = ExactMinExcess::default();
    match (args.kind, problem) {
        (SolveKind::P2p, Problem::P2p(inst)) => {
            let counting = CountingMinExcess::new(solver);
            let sol = solve_p2p(&inst, &counting)?;
            let route = sol.route(&inst.rewards);
            let walk = names_of(route.walk.vertices(), &names);
            let collected = names_of(&route.collected, &names);
            if out.format == Format::Rows {
                out.record(json!({
                    "kind": "p2p", "reward": exact(&route.reward), "length": sol.length, "budget": inst.budget,
                    "walk": walk, "collected": collected, "min_excess_calls": counting.calls(),
                }));
            } else {
                out.line(format!("reward     {}", approx(&route.reward)));
                out.line(format!("length     {} of budget {}", sol.length, inst.budget));
                out.line(format!("walk       {}", walk.join(" -> ")));
                out.line(format!("collected  {}", collected.join(", ")));
                out.line(format!("min-excess calls {}", counting.calls()));
            }
        }
        (SolveKind::Knap, Problem::Knap(inst)) => {
            let sol = solve_p2p_knap(&inst, &solver)?;
            let walk = names_of(sol.route.walk.vertices(), &names);
            let collected = names_of(&sol.route.collected, &names);
            let length = sol.route.walk.length(&inst.space);
            if out.format == Format::Rows {
                out.record(json!({
                    "kind": "knap", "reward": exact(&sol.route.reward), "length": length,
                    "budget": inst.travel_budget, "size": exact(&sol.size),
                    "knapsack_budget": exact(&inst.knapsack_budget), "theta": exact(&sol.theta),
                    "walk": walk, "collected": collected,
                }));
            } else {
                out.line(format!("reward     {}", approx(&sol.route.reward)));
                out.line(format!("length     {} of budget {}", length, inst.travel_budget));
                out.line(format!("size       {} of budget {}", approx(&sol.size), approx(&inst.knapsack_budget)));
                out.line(format!("theta      {}", approx(&sol.theta)));
                out.line(format!("walk       {}", walk.join(" -> ")));
                out.line(format!("collected  {}", collected.join(", ")));
            }
        }
        (SolveKind::Stoch, Problem::Stoch(inst)) => {
            let policy = solve_p2p_stoch(&inst, &solver)?;
            let value = randomized_policy_value(&inst, &policy, 100_000, seed)?;
            let policy_file = PolicyFile::from_policy(&policy, &names);
            if let Some(path) = &args.policy_out {
                fs::write(path, serialize_policy(&policy_file))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if out.format == Format::Rows {
                out.record(json!({
                    "kind": "stoch", "expected_reward": exact(&value.value), "std_error": value.std_error,
                    "policy": policy_file,
                }));
            } else {
                out.line(format!("expected reward  {}", approx(&value.value)));
                if let Some(se) = value.std_error {
                    out.line(format!("standard error   {se:.6}"));
                }
                out.line(format!("single vertex    {}", policy_file.single_vertex));
                out.line(format!("path jobs        {}", policy_file.path.join(", ")));
                out.line(format!("path walk        {}", policy_file.walk.join(" -> ")));
                out.line(format!(
                    "branch {} / inclusion {}",
                    policy_file.branch_probability, policy_file.inclusion_probability
                ));
            }
        }
        (SolveKind::Tw, Problem::Tw(inst)) => {
            let eps = rational_arg("epsilon", &args.epsilon)?;
            if eps <= Rational::from_integer(0.into()) {
                return Err(usage(anyhow!("--epsilon must be positive")));
            }
            let slack = Rational::from_integer(1.into()) + &eps;
            if args.stochastic {
                let plan = solve_time_windows_stochastic(&inst, &eps, solver, seed).map_err(usage)?;
                let sim = simulate_tw_policy(&inst, &plan, &eps, args.replicates, seed);
                if out.format == Format::Rows {
                    out.record(json!({
                        "kind": "tw", "stochastic": true, "planned_reward": exact(&plan.value),
                        "simulated_mean": sim.summary.mean, "std_error": sim.summary.std_error,
                        "replicates": sim.summary.replicates, "late_claims": sim.late_claims,
                        "segments": plan.segments.len(),
                    }));
                } else {
                    out.line(format!("planned reward   {}", approx(&plan.value)));
                    out.line(format!(
                        "simulated mean   {:.6} +/- {:.6} over {} runs",
                        sim.summary.mean, sim.summary.std_error, sim.summary.replicates
                    ));
                    out.line(format!("late claims      {}", sim.late_claims));
                }
                return Ok(());
            }
            let sol = solve_time_windows(&inst, &eps, solver)?;
            let verdicts = check_tw_feasibility(&sol.trace(), &inst, &slack);
            let late = verdicts.iter().filter(|v| !v.counted).count();
            let s = compute_margin_params(Reward::to_f64(&eps)).ok().map(|m| m.s);
            if out.format == Format::Rows {
                let report: Vec<Value> = verdicts
                    .iter()
                    .map(|v| {
                        json!({
                            "vertex": names[v.vertex], "time": exact(&v.time),
                            "release": inst.release[v.vertex], "deadline": inst.deadline[v.vertex],
                            "counted": v.counted,
                        })
                    })
                    .collect();
                let mut rec = json!({
                    "kind": "tw", "reward": exact(&sol.reward), "epsilon": exact(&eps), "margin_s": s,
                    "walk": names_of(sol.walk.vertices(), &names), "violations": late,
                });
                if args.slack_report {
                    rec["slack_report"] = Value::Array(report);
                }
                out.record(rec);
            } else {
                out.line(format!("reward     {}", approx(&sol.reward)));
                out.line(format!("epsilon    {} (s = {})", approx(&eps), s.map_or("-".into(), |s| s.to_string())));
                out.line(format!("walk       {}", names_of(sol.walk.vertices(), &names).join(" -> ")));
                out.line(format!("violations {late}"));
                if args.slack_report {
                    out.line(format!("{:<10} {:>14} {:>8} {:>8} {:>14}  ok", "vertex", "time", "release", "deadline", "slack limit"));
                    for v in &verdicts {
                        let limit = slack.clone() * Rational::from_integer(inst.deadline[v.vertex].into());
                        out.line(format!(
                            "{:<10} {:>14} {:>8} {:>8} {:>14}  {}",
                            names[v.vertex],
                            format!("{:.3}", Reward::to_f64(&v.time)),
                            inst.release[v.vertex],
                            inst.deadline[v.vertex],
                            format!("{:.3}", Reward::to_f64(&limit)),
                            if v.counted { "yes" } else { "NO" }
                        ));
                    }
                }
            }
            if late > 0 {
                out.failed = true;
            }
        }
        (kind, problem) => {
            let found = match problem {
                Problem::P2p(_) => "p2p",
                Problem::Knap(_) => "knap",
                Problem::Stoch(_) => "stoch",
                Problem::Tw(_) => "tw",
            };
            let wanted = kind.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
            return Err(usage(anyhow!("instance is of kind {found}, not {wanted}")));
        }
    }
    Ok(())
}

fn oracle(args: &OracleArgs, out: &mut Output) -> anyhow::Result<()> {
    let file = load(&args.instance)?;
    let names = file.names();
    let problem = file.to_problem().map_err(usage)?;
    let limits = OracleLimits::default();
    let (value, order): (Rational, Option<Vec<String>>) = match (args.kind, problem) {
        (OracleKind::P2p, Problem::P2p(inst)) => {
            let r = oracle_p2p_orienteering(&inst.space, &inst.rewards, inst.u, inst.v, inst.budget, &limits)?;
            (r.reward, Some(names_of(r.walk.vertices(), &names)))
        }
        (OracleKind::Knap, Problem::Knap(inst)) => {
            let r = oracle_knap_orient(&inst, &limits)?;
            (r.reward, Some(names_of(r.walk.vertices(), &names)))
        }
        (OracleKind::Stoch, Problem::Stoch(inst)) => {
            let r = oracle_nonadaptive_stoch(&inst, &limits)?;
            (r.value, Some(names_of(&r.order, &names)))
        }
        (OracleKind::Adaptive, Problem::Stoch(inst)) => (oracle_adaptive_stoch(&inst, &limits)?, None),
        (OracleKind::Tw, Problem::Tw(inst)) => {
            let r = oracle_time_windows(&inst, &limits)?;
            (r.reward, Some(names_of(&r.order, &names)))
        }
        _ => return Err(usage(anyhow!("oracle kind does not match the instance kind {}", file.kind))),
    };
    if out.format == Format::Rows {
        out.record(json!({ "kind": file.kind, "optimum": exact(&value), "order": order }));
    } else {
        out.line(format!("optimum  {}", approx(&value)));
        if let Some(order) = order {
            out.line(format!("order    {}", order.join(" -> ")));
        }
    }
    Ok(())
}

fn simulate(args: &SimulateArgs, seed: Option<u64>, out: &mut Output) -> anyhow::Result<()> {
    let file = load(&args.instance)?;
    let seed = seed.or(file.seed).unwrap_or(0);
    let names = file.names();
    let Problem::Stoch(inst) = file.to_problem().map_err(usage)? else {
        return Err(usage(anyhow!("simulate needs a stoch instance, got {}", file.kind)));
    };
    let text = fs::read_to_string(&args.policy)
        .with_context(|| format!("reading {}", args.policy.display()))
        .map_err(usage)?;
    let policy = parse_policy(&text).and_then(|p| p.to_policy(&names)).map_err(usage)?;
    if args.replicates == 0 {
        return Err(usage(anyhow!("--replicates must be positive")));
    }
    let sim = simulate_policy(&inst, &policy, args.replicates, seed);
    let exact_value = randomized_policy_value(&inst, &policy, args.replicates, seed)?;
    if out.format == Format::Rows {
        out.record(json!({
            "replicates": sim.replicates, "mean": sim.mean, "std_error": sim.std_error,
            "exact": exact(&exact_value.value), "seed": seed,
        }));
    } else {
        out.line(format!("mean       {:.6} +/- {:.6} over {} runs", sim.mean, sim.std_error, sim.replicates));
        out.line(format!("exact      {}", approx(&exact_value.value)));
    }
    Ok(())
}

fn generate(args: &GenArgs, seed: Option<u64>, out: &mut Output) -> anyhow::Result<()> {
    if args.n == 0 {
        return Err(usage(anyhow!("--n must be at least 1")));
    }
    let seed = seed.unwrap_or(0);
    let mut file = generate_instance(args.kind, args.n, seed, args.profile);
    if let Some(max) = args.waiting {
        if args.kind != ProblemKind::Tw || max < 0 {
            return Err(usage(anyhow!("--waiting takes a non-negative size and only applies to tw")));
        }
        file = with_random_waiting(file, seed, max);
    }
    out.text = serialize_instance(&file);
    Ok(())
}

fn bench(args: &BenchArgs, seed: Option<u64>, out: &mut Output) -> anyhow::Result<()> {
    let seed = seed.unwrap_or(0);
    let mut suites = Vec::new();
    if let Some(path) = &args.suite_file {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
        let mut from_file: Vec<SuiteSpec> =
            serde_json::from_str(&text).with_context(|| format!("{}", path.display())).map_err(usage)?;
        for s in &from_file {
            if s.profiles.is_empty() {
                return Err(usage(anyhow!("suite {:?} lists no profiles", s.name)));
            }
        }
        suites.append(&mut from_file);
    }
    for &kind in &args.suites {
        let mut suite = SuiteSpec::standard(kind, args.count, seed);
        if let (ProblemKind::Tw, Some(eps)) = (kind, &args.epsilon) {
            suite.epsilon = Some(Scalar(rational_arg("epsilon", eps)?));
        }
        suites.push(suite);
    }
    let report = run_bench(&suites, args.timings).map_err(usage)?;
    out.text = match out.format {
        Format::Rows => report.to_ndjson(),
        Format::Table => report.to_table(),
    };
    out.failed = !report.passed();
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let mut out = Output::new(cli.format);
    match &cli.command {
        Command::Solve(a) => solve(a, cli.seed, &mut out)?,
        Command::Oracle(a) => oracle(a, &mut out)?,
        Command::Simulate(a) => simulate(a, cli.seed, &mut out)?,
        Command::Gen(a) => generate(a, cli.seed, &mut out)?,
        Command::Bench(a) => bench(a, cli.seed, &mut out)?,
    }
    match &cli.out {
        Some(path) => fs::write(path, &out.text).with_context(|| format!("writing {}", path.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(out.text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(!out.failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
