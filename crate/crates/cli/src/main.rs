//! `blotto`: stability queries, constructions, dynamics and region scans.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blotto_core::format::{number_to_json, witness_to_json};
use blotto_core::stability::DEFAULT_SEARCH_BUDGET;
use blotto_core::*;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "blotto", version, about = "Private Blotto games: stability, constructions and scans")]
struct Cli {
    /// Print a machine-readable JSON record instead of the text summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance file (JSON).
    instance: PathBuf,
    /// Override the instance's unlabeled cost: a number, `p/q`, or `auto`.
    #[arg(long)]
    cu: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether an arrangement is stable.
    Check {
        #[command(flatten)]
        input: InstanceArgs,
        /// Arrangement, e.g. `2x0,1x1;1x0;0`.
        arrangement: String,
    },
    /// Search every arrangement for stable ones.
    Enumerate {
        #[command(flatten)]
        input: InstanceArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::All)]
        mode: ModeArg,
        /// Largest arrangement space to walk.
        #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
        budget: u64,
    },
    /// Build a stable arrangement for the two-type game with biases 1 and -1.
    Construct {
        #[arg(long)]
        n_a: u32,
        #[arg(long)]
        n_b: u32,
        /// Number of items (not used by `weights`, which is two-item).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_enum)]
        regime: Regime,
    },
    /// Run best-response dynamics from a start arrangement.
    Dynamics {
        #[command(flatten)]
        input: InstanceArgs,
        start: String,
        #[arg(long, value_enum, default_value_t = PolicyArg::First)]
        policy: PolicyArg,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
    },
    /// Emit a counterexample instance as JSON.
    Scenario {
        #[arg(value_enum)]
        kind: ScenarioKind,
        /// Agents per type (`no-ne-median`, `no-ne-mean`).
        #[arg(long)]
        n: Option<u32>,
        /// Number of items (`no-ne-median`, `no-ne-mean`).
        #[arg(long)]
        m: Option<usize>,
        /// Unlabeled cost for `no-ne-mean`, inside (1/8, 1/4).
        #[arg(long)]
        cu: Option<String>,
    },
    /// Misallocated effort and proportionality of an arrangement.
    Analyze {
        #[command(flatten)]
        input: InstanceArgs,
        arrangement: String,
    },
    /// Map where stable arrangements exist over the (n_a, n_b) plane.
    Scan(ScanArgs),
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    items: usize,
    #[arg(long, value_enum)]
    outcome: OutcomeArg,
    #[arg(long)]
    n_max: u32,
    /// Comma-separated item weights; unit weights when absent.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<String>>,
    /// Unlabeled cost: a number, `p/q`, or `auto`.
    #[arg(long, default_value = "auto")]
    cu: String,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "BLOTTO_WORKERS")]
    workers: Option<usize>,
    /// Cells with more arrangements than this are skipped.
    #[arg(long, default_value_t = scan::DEFAULT_CELL_BUDGET)]
    cell_budget: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    First,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    First,
    Best,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutcomeArg {
    Median,
    Mean,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum Regime {
    Many,
    Ties,
    Singleton,
    HighMisallocation,
    Weights,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioKind {
    NoNeMedian,
    NoNeMean,
    MedianUnequalWeights,
}

enum Failure {
    /// Malformed input: exit 2.
    Usage(String),
    /// Domain error: exit 1.
    Domain(BlottoError),
}

impl From<BlottoError> for Failure {
    fn from(e: BlottoError) -> Self {
        match e {
            BlottoError::Parse(_) => Failure::Usage(e.to_string()),
            e => Failure::Domain(e),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(1)
        }
    }
}

fn load_instance(args: &InstanceArgs) -> std::result::Result<Instance, Failure> {
    let text = read(&args.instance)?;
    let instance = parse_instance(&text)?;
    match &args.cu {
        None => Ok(instance),
        Some(cu) => Ok(instance.with_unlabeled_cost(cost(cu, &instance)?)?),
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn cost(text: &str, instance: &Instance) -> std::result::Result<Number, Failure> {
    if text.trim() == "auto" {
        Ok(auto_unlabeled_cost(instance))
    } else {
        Ok(Number::parse(text)?)
    }
}

fn arrangement(text: &str, instance: &Instance) -> std::result::Result<Arrangement, Failure> {
    let arr = parse_arrangement(text, instance.num_classes())?;
    arr.validate_for(instance)?;
    Ok(arr)
}

fn describe(w: &DeviationWitness) -> String {
    format!(
        "class {} moves item {} -> item {}: cost {} -> {} (delta {})",
        w.class_index,
        w.from_item,
        w.to_item,
        w.cost_before,
        w.cost_after,
        w.delta()
    )
}

fn emit(json: bool, record: Value, text: impl FnOnce() -> String) {
    if json {
        println!("{record}");
    } else {
        print!("{}", text());
    }
}

fn need<T>(value: Option<T>, flag: &str) -> std::result::Result<T, Failure> {
    value.ok_or_else(|| Failure::Usage(format!("--{flag} is required here")))
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Check { input, arrangement: text } => {
            let inst = load_instance(input)?;
            let arr = arrangement(text, &inst)?;
            let report = is_stable(&inst, &arr)?;
            let record = json!({
                "arrangement": format_arrangement(&arr),
                "stable": report.stable,
                "witness": report.witness.as_ref().map(witness_to_json),
            });
            emit(cli.json, record, || match &report.witness {
                None => "STABLE\n".to_string(),
                Some(w) => format!("UNSTABLE\n{}\n", describe(w)),
            });
        }
        Command::Enumerate { input, mode, budget } => {
            let inst = load_instance(input)?;
            let mode = match mode {
                ModeArg::First => SearchMode::First,
                ModeArg::All => SearchMode::All,
            };
            let found = find_stable_with(&inst, mode, &SearchOptions { budget: *budget, parallel: true })?;
            let texts: Vec<String> = found.iter().map(format_arrangement).collect();
            let record = json!({"count": found.len(), "arrangements": texts});
            emit(cli.json, record, || {
                let noun = if found.len() == 1 { "arrangement" } else { "arrangements" };
                let mut out = format!("{} stable {noun}\n", found.len());
                for t in &texts {
                    out.push_str(t);
                    out.push('\n');
                }
                out
            });
        }
        Command::Construct { n_a, n_b, m, regime } => construct(cli.json, *n_a, *n_b, *m, *regime)?,
        Command::Dynamics { input, start, policy, max_steps } => {
            let inst = load_instance(input)?;
            let start = arrangement(start, &inst)?;
            let policy = match policy {
                PolicyArg::First => Policy::FirstImproving,
                PolicyArg::Best => Policy::BestImproving,
            };
            let t = best_response_dynamics(&inst, &start, policy, *max_steps)?;
            let (terminal, repeats) = match t.terminal {
                Terminal::ReachedStable => ("reached_stable", None),
                Terminal::CycleDetected(k) => ("cycle_detected", Some(k)),
                Terminal::StepBudgetExhausted => ("step_budget_exhausted", None),
            };
            let record = json!({
                "terminal": terminal,
                "cycle_start": repeats,
                "states": t.states.iter().map(format_arrangement).collect::<Vec<_>>(),
                "moves": t.moves.iter().map(witness_to_json).collect::<Vec<_>>(),
            });
            emit(cli.json, record, || {
                let mut out = format!("state 0: {}\n", format_arrangement(&t.states[0]));
                for (k, (mv, state)) in t.moves.iter().zip(&t.states[1..]).enumerate() {
                    out.push_str(&format!("  {}\nstate {}: {}\n", describe(mv), k + 1, format_arrangement(state)));
                }
                out.push_str(&match t.terminal {
                    Terminal::ReachedStable => format!("reached a stable arrangement after {} moves\n", t.moves.len()),
                    Terminal::CycleDetected(k) => {
                        format!("cycle detected: state {} repeats state {k}\n", t.moves.len())
                    }
                    Terminal::StepBudgetExhausted => format!("step budget exhausted after {} moves\n", t.moves.len()),
                });
                out
            });
        }
        Command::Scenario { kind, n, m, cu } => {
            let inst = match kind {
                ScenarioKind::NoNeMedian => scenario_no_ne_median(need(*n, "n")?, need(*m, "m")?)?,
                ScenarioKind::NoNeMean => {
                    let cu = cu.as_deref().map(Number::parse).transpose()?;
                    scenario_no_ne_mean(need(*n, "n")?, need(*m, "m")?, cu)?
                }
                ScenarioKind::MedianUnequalWeights => scenario_weighted_median_no_ne()?,
            };
            println!("{}", instance_to_json(&inst));
        }
        Command::Analyze { input, arrangement: text } => {
            let inst = load_instance(input)?;
            let arr = arrangement(text, &inst)?;
            let effort = misallocated_effort(&inst, &arr)?;
            let close = check_close_to_proportional(&inst, &arr)?;
            let stable = is_stable(&inst, &arr)?.stable;
            let record = json!({
                "arrangement": format_arrangement(&arr),
                "misallocated_effort": number_to_json(&effort.misallocated_effort),
                "per_item_deviation": effort.per_item_deviation.iter()
                    .map(|row| row.iter().map(number_to_json).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "close_to_proportional": close,
                "stable": stable,
            });
            emit(cli.json, record, || {
                let mut out = format!("misallocated effort: {}\n", effort.misallocated_effort);
                for (i, row) in effort.per_item_deviation.iter().enumerate() {
                    let cells: Vec<String> = row.iter().map(Number::to_string).collect();
                    out.push_str(&format!("  item {i}: {}\n", cells.join(" ")));
                }
                out.push_str(&format!("close to proportional: {}\nstable: {}\n", yes(close), yes(stable)));
                out
            });
        }
        Command::Scan(args) => scan_command(args)?,
    }
    Ok(())
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn construct(json: bool, n_a: u32, n_b: u32, m: Option<usize>, regime: Regime) -> CmdResult {
    let (instance, arr, note) = match regime {
        Regime::Weights => {
            let s = stabilizing_weights(n_a, n_b)?;
            let note = format!("weights: {} {}", s.w1, s.w2);
            (s.instance, s.arrangement, Some(note))
        }
        _ => {
            let m = need(m, "m")?;
            let inst = reference_instance(Outcome::Median, n_a, n_b, m)?;
            let (arr, note) = match regime {
                Regime::Many => (construct_many_agents(n_a, n_b, m)?, None),
                Regime::Ties => (construct_tie_based(n_a, n_b, m)?, None),
                Regime::HighMisallocation => (construct_high_misallocation(n_a, n_b, m)?, None),
                Regime::Singleton => {
                    let (arr, sufficient) = singleton_arrangement(&inst)?;
                    (arr, Some(format!("sufficient condition holds: {}", yes(sufficient))))
                }
                Regime::Weights => unreachable!(),
            };
            (inst, arr, note)
        }
    };
    let stable = is_stable(&instance, &arr)?.stable;
    let record = json!({
        "arrangement": format_arrangement(&arr),
        "stable": stable,
        "note": note,
        "instance": serde_json::from_str::<Value>(&instance_to_json(&instance)).expect("instance JSON is valid"),
    });
    emit(json, record, || {
        let mut out = format!("{}\nstable: {}\n", format_arrangement(&arr), yes(stable));
        if let Some(n) = &note {
            out.push_str(n);
            out.push('\n');
        }
        out
    });
    Ok(())
}

fn scan_command(args: &ScanArgs) -> CmdResult {
    let outcome = match args.outcome {
        OutcomeArg::Median => Outcome::Median,
        OutcomeArg::Mean => Outcome::Mean,
    };
    let mut config = ScanConfig::new(args.items, outcome, args.n_max);
    if let Some(ws) = &args.weights {
        config.weights = Some(ws.iter().map(|w| Number::parse(w)).collect::<Result<Vec<_>>>()?);
    }
    if args.cu.trim() != "auto" {
        config.cu_policy = CuPolicy::Explicit(Number::parse(&args.cu)?);
    }
    config.cell_budget = args.cell_budget;
    config.workers = args.workers;
    let map = scan_region(&config)?;
    let format = match args.format {
        FormatArg::Csv => ExportFormat::Csv,
        FormatArg::Jsonl => ExportFormat::JsonLines,
    };
    let text = export_region(&map, format);
    match &args.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}
