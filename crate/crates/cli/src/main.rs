//! `apf`: generate instances, run and check the formation algorithm, explore
//! schedules, and verify recorded traces.
//!
//! Exit codes: 0 when every check passes, 1 for usage or input errors, 2 when a
//! run violates an invariant or bound (or the instance is unsolvable).

mod files;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use apf_core::algorithm::{Mutation, Rules};
use apf_core::harness::{batch, gen_instance, verify_trace, BatchCell, BatchSpec, SchedulerKind, CSV_HEADER};
use apf_core::simulator::{
    explore_schedules, fsync_symmetry_experiment, run, ActivationPolicy, Mode, RunOptions, SimError, SymmetryRule,
};
use apf_core::{Configuration, TurnAngle};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "apf", version, about = "Pattern formation by oblivious robots on a circle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random asymmetric configuration and a random pattern.
    Gen(GenArgs),
    /// Simulate one instance and check every invariant along the way.
    Run(RunArgs),
    /// Many seeded runs per (n, scheduler); prints a table and CSV.
    Batch(BatchArgs),
    /// Try every activation set and flip assignment for a few rounds.
    Explore(ExploreArgs),
    /// Fully synchronous rounds from a symmetric start; reports the fold each round.
    Symmetry(SymmetryArgs),
    /// Replay a recorded trace and re-check it.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Det,
    Rand,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Det => Mode::Deterministic,
            ModeArg::Rand => Mode::Randomized,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SchedulerArg {
    Fsync,
    Rr,
    Random,
    Lazy,
}

impl From<SchedulerArg> for SchedulerKind {
    fn from(s: SchedulerArg) -> SchedulerKind {
        match s {
            SchedulerArg::Fsync => SchedulerKind::Fsync,
            SchedulerArg::Rr => SchedulerKind::Rr,
            SchedulerArg::Random => SchedulerKind::Random,
            SchedulerArg::Lazy => SchedulerKind::Lazy,
        }
    }
}

#[derive(Args)]
struct SeedArg {
    /// Random seed; falls back to APF_SEED, then 0.
    #[arg(long, env = "APF_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    seed: SeedArg,
    /// Grid denominator (at least 4n); defaults to 8n.
    #[arg(long)]
    q: Option<u64>,
    #[arg(long, default_value = "config.json")]
    config: PathBuf,
    #[arg(long, default_value = "pattern.json")]
    pattern: PathBuf,
}

#[derive(Args)]
struct SchedArgs {
    #[arg(long, value_enum, default_value = "random")]
    scheduler: SchedulerArg,
    /// Activation probability for the random scheduler.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Longest a robot may stay idle; defaults to n.
    #[arg(long)]
    fairness: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    pattern: PathBuf,
    #[command(flatten)]
    sched: SchedArgs,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long)]
    max_epochs: Option<usize>,
    /// Defaults to det for odd n and rand for even n.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Write the per-round trace here (JSON Lines).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write one SVG per epoch boundary into this directory.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Print the full report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BatchArgs {
    /// Swarm sizes, comma separated.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    ns: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Schedulers, comma separated; all four by default.
    #[arg(long = "scheduler", value_delimiter = ',', value_enum)]
    schedulers: Vec<SchedulerArg>,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long)]
    fairness: Option<usize>,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long)]
    max_epochs: Option<usize>,
    /// One mode for every n; by default each n gets the mode matching its parity.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    q: Option<u64>,
    /// Write the CSV here instead of after the table on stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ExploreArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    pattern: PathBuf,
    #[arg(long, default_value_t = 4)]
    budget: usize,
    /// Explore the broken rule that drops the lower bound when shrinking the second gap.
    #[arg(long)]
    mutant: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Stay,
    Step,
    Midpoint,
}

#[derive(Args)]
struct SymmetryArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum, default_value = "step")]
    rule: RuleArg,
    /// Step length for the step rule, as p/q of a turn.
    #[arg(long, default_value = "1/100")]
    amount: TurnAngle,
    #[arg(long, default_value_t = 10)]
    rounds: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    pattern: PathBuf,
}

/// Either everything passed or some check failed (exit 2). Errors are exit 1.
enum Outcome {
    Pass,
    Violation,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run_one(a),
        Command::Batch(a) => run_batch(a),
        Command::Explore(a) => explore(a),
        Command::Symmetry(a) => symmetry(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn parity_mode(n: usize) -> Mode {
    if n.is_multiple_of(2) {
        Mode::Randomized
    } else {
        Mode::Deterministic
    }
}

fn gen(a: GenArgs) -> Result<Outcome> {
    let q = a.q.unwrap_or(8 * a.n as u64);
    let (c, p) = gen_instance(a.n, a.seed.seed, q)?;
    files::save(&a.config, &c)?;
    files::save(&a.pattern, &p)?;
    println!("wrote {} and {} (n = {}, q = {q}, seed = {})", a.config.display(), a.pattern.display(), a.n, a.seed.seed);
    Ok(Outcome::Pass)
}

fn run_one(a: RunArgs) -> Result<Outcome> {
    let c = files::load_config(&a.config)?;
    let pattern = files::load_pattern(&a.pattern)?;
    let n = c.len();
    let mode = a.mode.map(Mode::from).unwrap_or_else(|| parity_mode(n));
    let kind = SchedulerKind::from(a.sched.scheduler).policy(n, a.sched.p, a.sched.fairness);
    let mut options = RunOptions::new(ActivationPolicy::new(kind, a.seed.seed), mode);
    options.max_epochs = a.max_epochs;
    options.record_trace = a.trace.is_some() || a.svg.is_some();
    let (report, records) = match run(&c, &pattern, options) {
        Ok(x) => x,
        Err(SimError::Unsolvable { fold }) => {
            println!("unsolvable: the configuration has {fold}-fold rotational symmetry");
            return Ok(Outcome::Violation);
        }
        Err(e) => bail!(e),
    };
    if let Some(path) = &a.trace {
        files::save_trace(path, &records)?;
    }
    if let Some(dir) = &a.svg {
        let k = svg::write_epochs(dir, &c, &records, &pattern)?;
        eprintln!("wrote {k} pictures to {}", dir.display());
    }
    if a.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        let epoch = report.formation_epoch.map_or("-".to_string(), |e| e.to_string());
        println!("n = {}, scheduler = {}, seed = {}", n, kind.name(), a.seed.seed);
        println!("formed: {} (epoch {epoch}), terminated {}/{n}", report.formed, report.terminated);
        println!("epochs: {} (bound {}), rounds: {}", report.epochs, report.bound, report.rounds);
        println!("collisions: {}", report.collisions);
        println!("violations: {}", report.violations.len());
        for v in &report.violations {
            println!("  round {}: {:?}: {}", v.round, v.kind, v.detail);
        }
    }
    Ok(if report.is_clean() { Outcome::Pass } else { Outcome::Violation })
}

fn table(cells: &[BatchCell]) -> String {
    let mut s = format!(
        "{:>4} {:>7} {:>6} {:>6} {:>6} {:>7} {:>5} {:>5} {:>5}\n",
        "n", "sched", "trials", "formed", "max", "mean", "bound", "viol", "coll"
    );
    for c in cells {
        s += &format!(
            "{:>4} {:>7} {:>6} {:>6} {:>6} {:>7.2} {:>5} {:>5} {:>5}",
            c.n,
            c.scheduler.to_string(),
            c.trials,
            c.formed,
            c.max_epochs,
            c.mean_epochs,
            c.bound,
            c.violations,
            c.collisions
        );
        if let Some(e) = &c.error {
            s += &format!("  error: {e}");
        } else if let Some((iseed, pseed, msg)) = &c.first_failure {
            s += &format!("  first failure (instance seed {iseed}, policy seed {pseed}): {msg}");
        }
        s.push('\n');
    }
    s
}

fn run_batch(a: BatchArgs) -> Result<Outcome> {
    let schedulers: Vec<SchedulerKind> = if a.schedulers.is_empty() {
        SchedulerKind::ALL.to_vec()
    } else {
        a.schedulers.iter().map(|&s| s.into()).collect()
    };
    let spec_for = |ns: Vec<usize>, mode: Mode| {
        let mut spec = BatchSpec::new(ns, a.trials, a.seed.seed, mode);
        spec.schedulers = schedulers.clone();
        spec.p = a.p;
        spec.fairness = a.fairness;
        spec.max_epochs = a.max_epochs;
        spec.q = a.q;
        spec
    };
    let cells: Vec<BatchCell> = match a.mode {
        Some(m) => batch(&spec_for(a.ns.clone(), m.into())),
        None => a.ns.iter().flat_map(|&n| batch(&spec_for(vec![n], parity_mode(n)))).collect(),
    };
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for c in &cells {
        csv += &c.csv_row();
        csv.push('\n');
    }
    print!("{}", table(&cells));
    match &a.csv {
        Some(path) => std::fs::write(path, &csv)?,
        None => print!("\n{csv}"),
    }
    if cells.iter().any(|c| c.error.is_some()) {
        bail!("some cells could not run (see the table)");
    }
    Ok(if cells.iter().all(BatchCell::is_clean) { Outcome::Pass } else { Outcome::Violation })
}

fn explore(a: ExploreArgs) -> Result<Outcome> {
    let c = files::load_config(&a.config)?;
    let pattern = files::load_pattern(&a.pattern)?;
    let rules = Rules { mutation: a.mutant.then_some(Mutation::DropSecondGapLowerBound) };
    let report = match explore_schedules(&c, &pattern, a.budget, rules) {
        Ok(r) => r,
        Err(SimError::Unsolvable { fold }) => {
            println!("unsolvable: the configuration has {fold}-fold rotational symmetry");
            return Ok(Outcome::Violation);
        }
        Err(e) => bail!(e),
    };
    println!("budget {}: {} transitions, {} distinct states", a.budget, report.prefixes, report.states);
    match report.counterexample {
        None => {
            println!("no counterexample");
            Ok(Outcome::Pass)
        }
        Some((steps, v)) => {
            println!("counterexample after {} rounds: {:?}: {}", v.round, v.kind, v.detail);
            for (k, s) in steps.iter().enumerate() {
                println!("  round {}: {}", k + 1, serde_json::to_string(s)?);
            }
            Ok(Outcome::Violation)
        }
    }
}

fn symmetry(a: SymmetryArgs) -> Result<Outcome> {
    let c: Configuration = files::load_config(&a.config)?;
    let k = c.fold();
    if k < 2 {
        bail!("the configuration is not rotationally symmetric");
    }
    let rule = match a.rule {
        RuleArg::Stay => SymmetryRule::Stay,
        RuleArg::Step => SymmetryRule::ForwardStep { amount: a.amount },
        RuleArg::Midpoint => SymmetryRule::GapMidpoint,
    };
    let tr = fsync_symmetry_experiment(&c, &rule, a.rounds);
    let folds: Vec<String> = tr.folds.iter().map(|f| f.to_string()).collect();
    println!("initial fold {k}; folds by round: {}", folds.join(" "));
    if tr.collided {
        println!("collision during the experiment");
    }
    Ok(if tr.preserved() { Outcome::Pass } else { Outcome::Violation })
}

fn verify(a: VerifyArgs) -> Result<Outcome> {
    let pattern = files::load_pattern(&a.pattern)?;
    let records = files::load_trace(&a.trace)?;
    let v = verify_trace(&records, &pattern);
    println!("{} rounds, {} epochs, {} violations", v.rounds, v.epochs, v.violations.len());
    for x in &v.violations {
        println!("  round {}: {:?}: {}", x.round, x.kind, x.detail);
    }
    Ok(if v.is_clean() { Outcome::Pass } else { Outcome::Violation })
}
