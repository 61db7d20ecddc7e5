use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use delaylearn::automata::{minimize, parse_dot, parse_dot_with, serialize_dot, DotOptions};
use delaylearn::coverage::{plan_coverage, requirements_from_map, Costs};
use delaylearn::expansion::{expand, ExpansionOptions};
use delaylearn::mdm::{mdm_to_json, Simulator, SulSession, SystemUnderLearning};
use delaylearn::oracles::OracleConfig;
use delaylearn::pipeline::{
    load_machine_dir, load_mdm, run_benchmark_suite, run_experiment, serve, write_csv, BenchGrid, ExperimentConfig,
    ExternalSul, Method,
};
use delaylearn::stats::{sample_size_exact, sample_size_normal};
use delaylearn::{Error, Result};

#[derive(Parser)]
#[command(name = "delaylearn", version, about = "Active learning of Mealy machines with stochastic delays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect DOT machines.
    #[command(subcommand)]
    Dot(DotCommand),
    /// Run a delay machine.
    #[command(subcommand)]
    Sim(SimCommand),
    /// Learn a delay machine from a simulated or external system.
    Learn(LearnArgs),
    /// Depth-d history expansion of a machine.
    Expand(ExpandArgs),
    /// Plan a walk covering transitions a required number of times.
    Plan(PlanArgs),
    /// Sample-size calculations.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Run both methods over a directory of machines and write CSV.
    Bench(BenchArgs),
}

#[derive(Subcommand)]
enum DotCommand {
    /// Parse a machine and print a summary.
    Validate {
        file: PathBuf,
        /// Send missing transitions to a fresh sink state.
        #[arg(long)]
        complete_sink: bool,
    },
    /// Print the canonical minimal machine.
    Minimize {
        file: PathBuf,
        #[arg(long)]
        complete_sink: bool,
    },
}

#[derive(Subcommand)]
enum SimCommand {
    /// Run one word from the initial state and print output and delay per step.
    Trace {
        /// Delay machine as JSON, or DOT with random rates.
        machine: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Answer the RESET/STEP line protocol on stdin/stdout.
    Serve {
        machine: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum StatsCommand {
    /// Samples per transition for relative error `eps` with confidence `1 - delta`.
    K {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = SizeMethod::Exact)]
        method: SizeMethod,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SizeMethod {
    Exact,
    Normal,
}

#[derive(Args)]
struct ExpansionFlags {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long)]
    unique_root: bool,
    #[arg(long)]
    sink_ignorant: bool,
}

#[derive(Args)]
struct LearnArgs {
    /// Ground truth as JSON, or DOT with random rates. Omit with --sul-cmd.
    machine: Option<PathBuf>,
    #[arg(long, default_value = "expansion")]
    method: Method,
    #[arg(long, default_value_t = 1000)]
    k: u64,
    #[command(flatten)]
    expansion: ExpansionFlags,
    /// perfect, wmethod:E or walk:LEN,N,SEED
    #[arg(long, default_value = "perfect")]
    eq: OracleConfig,
    #[arg(long, default_value_t = 100_000_000)]
    max_actions: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    reset_cost: u64,
    /// Give every minimal self-loop copy its own sample requirement.
    #[arg(long)]
    strict_self_loops: bool,
    /// External system speaking the line protocol, e.g. --sul-cmd "python3 sul.py".
    #[arg(long)]
    sul_cmd: Option<String>,
    /// Comma-separated input alphabet of the external system.
    #[arg(long, value_delimiter = ',')]
    inputs: Vec<String>,
    /// Write the learned DOT here instead of stdout.
    #[arg(long)]
    dot_out: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report_out: Option<PathBuf>,
    /// Also write the learned delay machine as JSON with fitted rates.
    #[arg(long)]
    mdm_out: Option<PathBuf>,
}

#[derive(Args)]
struct ExpandArgs {
    file: PathBuf,
    #[command(flatten)]
    expansion: ExpansionFlags,
}

#[derive(Args)]
struct PlanArgs {
    file: PathBuf,
    /// JSON object mapping "state/input" to a required count.
    #[arg(long)]
    counts: PathBuf,
    #[arg(long, default_value_t = 1)]
    reset_cost: u64,
    #[arg(long, default_value_t = 1)]
    step_cost: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    machines: PathBuf,
    /// Inclusive range `0..3` or list `0,2`.
    #[arg(long, default_value = "0..3")]
    d: String,
    #[arg(long, value_delimiter = ',', default_value = "sampling,expansion")]
    methods: Vec<Method>,
    #[arg(long, value_enum, default_value_t = RootChoice::Both)]
    unique_root: RootChoice,
    #[arg(long, default_value_t = 1000)]
    k: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100_000_000)]
    max_actions: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave the seconds column empty for reproducible output.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum RootChoice {
    Both,
    True,
    False,
}

#[derive(Serialize)]
struct Summary {
    states: usize,
    inputs: Vec<String>,
    outputs: Vec<String>,
    transitions: usize,
    minimal_states: usize,
}

#[derive(Serialize)]
struct TraceStep {
    input: String,
    output: String,
    delay: f64,
}

fn parse_depths(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidArgument(format!("bad depth list `{text}`"));
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

fn read_dot(path: &Path, complete_sink: bool) -> Result<delaylearn::automata::MealyMachine> {
    let text = fs::read_to_string(path)?;
    parse_dot_with(&text, &DotOptions { complete_sink })
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data")
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

fn dot(cmd: DotCommand) -> Result<()> {
    match cmd {
        DotCommand::Validate { file, complete_sink } => {
            let m = read_dot(&file, complete_sink)?;
            let summary = Summary {
                states: m.num_states(),
                inputs: m.inputs().to_vec(),
                outputs: m.outputs().to_vec(),
                transitions: m.num_transitions(),
                minimal_states: minimize(&m).num_states(),
            };
            emit(None, &to_json(&summary))
        }
        DotCommand::Minimize { file, complete_sink } => {
            let m = read_dot(&file, complete_sink)?;
            emit(None, &serialize_dot(&minimize(&m)))
        }
    }
}

fn sim(cmd: SimCommand) -> Result<()> {
    match cmd {
        SimCommand::Trace { machine, word, seed } => {
            let mdm = load_mdm(&machine, seed)?;
            let w = mdm.machine().parse_word(&word)?;
            let inputs = mdm.machine().inputs().to_vec();
            let mut sim = Simulator::new(mdm, seed);
            let mut steps = Vec::new();
            for &i in &w {
                let (output, delay) = sim.step(i)?;
                steps.push(TraceStep {
                    input: inputs[i].clone(),
                    output,
                    delay,
                });
            }
            emit(None, &to_json(&steps))
        }
        SimCommand::Serve { machine, seed } => {
            let mut sim = Simulator::new(load_mdm(&machine, seed)?, seed);
            let stdin = io::stdin().lock();
            serve(&mut sim, stdin, io::stdout().lock())
        }
    }
}

fn learn(args: LearnArgs) -> Result<()> {
    let cfg = ExperimentConfig {
        method: args.method,
        k: args.k,
        d: args.expansion.d,
        unique_root: args.expansion.unique_root,
        sink_ignorant: args.expansion.sink_ignorant,
        relax_self_loops: !args.strict_self_loops,
        oracle: args.eq,
        max_actions: args.max_actions,
        seed: args.seed,
        costs: Costs {
            step: 1,
            reset: args.reset_cost,
        },
        ..ExperimentConfig::default()
    };
    let report = match (&args.sul_cmd, &args.machine) {
        (Some(cmd), None) => {
            if args.inputs.is_empty() {
                return Err(Error::InvalidArgument("--sul-cmd needs --inputs".into()));
            }
            let command: Vec<String> = cmd.split_whitespace().map(String::from).collect();
            let mut session = SulSession::new(ExternalSul::spawn(&command, args.inputs.clone())?);
            run_experiment(&cfg, &mut session, None)?
        }
        (None, Some(path)) => {
            let truth = load_mdm(path, args.seed)?;
            let mut session = SulSession::simulate(truth.clone(), args.seed);
            run_experiment(&cfg, &mut session, Some(truth.machine()))?
        }
        _ => {
            return Err(Error::InvalidArgument(
                "give either a machine file or --sul-cmd".into(),
            ))
        }
    };
    if let Some(learned) = &report.learned {
        emit(args.dot_out.as_deref(), &serialize_dot(learned.machine()))?;
        if let Some(p) = &args.mdm_out {
            fs::write(p, mdm_to_json(learned, Some(&report.rates())))?;
        }
    } else {
        eprintln!("aborted after {} actions", report.actions());
    }
    emit(args.report_out.as_deref(), &to_json(&report))
}

fn expand_cmd(args: ExpandArgs) -> Result<()> {
    let m = parse_dot(&fs::read_to_string(&args.file)?)?;
    let opts = ExpansionOptions {
        unique_root: args.expansion.unique_root,
        sink_ignorant: args.expansion.sink_ignorant,
    };
    let mx = expand(&minimize(&m), args.expansion.d, opts)?;
    emit(None, &serialize_dot(mx.machine()))
}

fn plan(args: PlanArgs) -> Result<()> {
    let m = parse_dot(&fs::read_to_string(&args.file)?)?;
    let counts: BTreeMap<String, u64> = serde_json::from_str(&fs::read_to_string(&args.counts)?)?;
    let need = requirements_from_map(&m, &counts)?;
    let costs = Costs {
        step: args.step_cost,
        reset: args.reset_cost,
    };
    let p = plan_coverage(&m, &need, costs)?;
    emit(None, &to_json(&p.named(&m)))
}

fn stats(cmd: StatsCommand) -> Result<()> {
    let StatsCommand::K { eps, delta, method } = cmd;
    let k = match method {
        SizeMethod::Exact => sample_size_exact(eps, delta)?,
        SizeMethod::Normal => sample_size_normal(eps, delta)?,
    };
    println!("{k}");
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let machines = load_machine_dir(&args.machines, args.seed)?;
    let grid = BenchGrid {
        depths: parse_depths(&args.d)?,
        methods: args.methods,
        unique_root: match args.unique_root {
            RootChoice::Both => vec![false, true],
            RootChoice::True => vec![true],
            RootChoice::False => vec![false],
        },
        base: ExperimentConfig {
            k: args.k,
            seed: args.seed,
            max_actions: args.max_actions,
            ..ExperimentConfig::default()
        },
    };
    let rows = run_benchmark_suite(&machines, &grid);
    let timing = !args.no_timing;
    match &args.out {
        Some(p) => write_csv(&rows, BufWriter::new(fs::File::create(p)?), timing),
        None => write_csv(&rows, io::stdout().lock(), timing),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Dot(c) => dot(c),
        Command::Sim(c) => sim(c),
        Command::Learn(a) => learn(a),
        Command::Expand(a) => expand_cmd(a),
        Command::Plan(a) => plan(a),
        Command::Stats(c) => stats(c),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_lists() {
        assert_eq!(parse_depths("0..3").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(parse_depths("1..=2").unwrap(), vec![1, 2]);
        assert_eq!(parse_depths("0,2").unwrap(), vec![0, 2]);
        assert!(parse_depths("3..1").is_err());
        assert!(parse_depths("x").is_err());
    }

    #[test]
    fn cli_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
