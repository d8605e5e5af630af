//! Command-line front end: validation, construction, reordering, expansion,
//! load computation, delivery simulation, and strategy comparison.
//!
//! Exit codes: 0 success, 1 validation failure (report on stderr), 2 usage
//! or parse error, 3 budget exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pda_caching::constructions::{
    construct_b_bounded, construct_mn_bounded, detect_const_b, DEFAULT_CELL_BUDGET,
};
use pda_caching::io::{self, LoadedArray};
use pda_caching::ordering::{const_b_order, ColumnOrdering, DEFAULT_PERM_BUDGET};
use pda_caching::sim::{random_demand, DEFAULT_LIBRARY_BUDGET};
use pda_caching::{
    build_gpda, exhaustive_order, greedy_order, load_from_gpda, load_from_pda, run_compare,
    simulate, CompareOptions, Error, Library, LoadValue, OrderingTrace, Profile, Result,
};

/// Cell budget for generators, permutation budget for the exhaustive search,
/// and byte budget for simulated libraries. Each can be overridden through
/// the environment.
const CELL_BUDGET_VAR: &str = "PDA_CACHING_CELL_BUDGET";
const PERM_BUDGET_VAR: &str = "PDA_CACHING_PERM_BUDGET";
const LIBRARY_BUDGET_VAR: &str = "PDA_CACHING_LIBRARY_BUDGET";

#[derive(Parser)]
#[command(
    name = "pda-caching",
    version,
    about = "Build, validate, reorder, and simulate coded-caching placement arrays"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an array file and print a validation summary
    Validate(ValidateArgs),
    /// Generate an array from a named family
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Reorder columns to lower the delivery load
    Order(OrderArgs),
    /// Expand a cache-level array to one column per user
    Gpda(GpdaArgs),
    /// Compute the exact delivery load
    Rate(RateArgs),
    /// Run the XOR delivery protocol over generated file contents
    Simulate(SimulateArgs),
    /// Tabulate the loads of every applicable ordering strategy
    Compare(CompareArgs),
}

#[derive(Args)]
struct ValidateArgs {
    /// Array file, text grid or JSON; user-level arrays are auto-detected
    file: PathBuf,
    /// Emit the summary (and any failure report) as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// t-subset array on the given number of caches
    Mn(MnArgs),
    /// q-ary family with q(m+1) columns and (q-1)q^m rows
    #[command(name = "const-b")]
    ConstB(ConstBArgs),
}

#[derive(Args)]
struct MnArgs {
    /// Number of caches (columns)
    #[arg(long)]
    caches: usize,
    /// Subset size, 1 <= t < caches
    #[arg(long)]
    t: usize,
    /// Write here instead of stdout
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Emit the text grid instead of JSON
    #[arg(long)]
    text: bool,
}

#[derive(Args)]
struct ConstBArgs {
    /// Alphabet size, q >= 2
    #[arg(long)]
    q: usize,
    /// Word length, m >= 1
    #[arg(long)]
    m: usize,
    /// Write here instead of stdout
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Emit the text grid instead of JSON
    #[arg(long)]
    text: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderMode {
    Greedy,
    Exhaustive,
    #[value(name = "const-b")]
    ConstB,
}

#[derive(Args)]
struct OrderArgs {
    /// Search strategy
    #[arg(value_enum)]
    mode: OrderMode,
    /// Cache-level array file
    #[arg(long)]
    pda: PathBuf,
    /// Comma-separated users-per-cache counts, e.g. "5,4,3,2,2,1"
    #[arg(long)]
    profile: String,
    /// Break greedy ties by peeking one step ahead
    #[arg(long)]
    lookahead: bool,
    /// Emit the result as JSON
    #[arg(long)]
    json: bool,
    /// Write the reordered array (JSON) here
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GpdaArgs {
    /// Cache-level array file
    #[arg(long)]
    pda: PathBuf,
    /// Comma-separated users-per-cache counts
    #[arg(long)]
    profile: String,
    /// Destination for the user-level array (JSON)
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct RateArgs {
    /// Cache-level array file
    #[arg(long)]
    pda: PathBuf,
    /// Comma-separated users-per-cache counts
    #[arg(long)]
    profile: String,
    /// Cross-check against a user-level array file
    #[arg(long)]
    gpda: Option<PathBuf>,
    /// Emit the result as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Cache-level array file
    #[arg(long)]
    pda: PathBuf,
    /// Comma-separated users-per-cache counts
    #[arg(long)]
    profile: String,
    /// Number of files in the library
    #[arg(long)]
    files: usize,
    /// Bytes per subfile
    #[arg(long)]
    subfile_bytes: usize,
    /// Seed for file contents (and for random demands)
    #[arg(long)]
    seed: u64,
    /// "identity", "random", or a comma-separated list of 1-based file ids
    #[arg(long, default_value = "identity")]
    demands: String,
    /// Write the transmission transcript (JSON) here
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Include payload bytes (hex) in the transcript
    #[arg(long)]
    payloads: bool,
    /// Emit the summary as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Cache-level array file
    #[arg(long)]
    pda: PathBuf,
    /// Comma-separated users-per-cache counts
    #[arg(long)]
    profile: String,
    /// Use greedy lookahead tie-breaking
    #[arg(long)]
    lookahead: bool,
    /// Emit the report as JSON
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                Error::Invalid(_) => 1u8,
                Error::Budget(_) => 3,
                _ => 2,
            })
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Validate(args) => run_validate(args),
        Command::Construct(cmd) => run_construct(cmd),
        Command::Order(args) => run_order(args),
        Command::Gpda(args) => run_gpda(args),
        Command::Rate(args) => run_rate(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Compare(args) => run_compare_cmd(args),
    }
}

fn env_budget<T: std::str::FromStr + Copy>(name: &str, default: T) -> Result<T> {
    match std::env::var(name) {
        Ok(raw) => raw
            .trim()
            .parse()
            .map_err(|_| Error::Argument(format!("{name} must be an integer, got {raw:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(default),
        Err(err) => Err(Error::Argument(format!("{name}: {err}"))),
    }
}

fn parse_profile(text: &str) -> Result<Profile> {
    text.parse()
}

fn parse_raw_profile(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad profile entry {:?}", tok.trim())))
        })
        .collect()
}

fn write_or_print(content: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => {
            std::fs::write(path, content)?;
            Ok(())
        }
        None => {
            println!("{}", content.trim_end());
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct LoadJson {
    numerator: u64,
    denominator: u64,
    decimal: String,
}

fn load_json(load: LoadValue) -> LoadJson {
    LoadJson {
        numerator: load.numerator,
        denominator: load.denominator,
        decimal: load.decimal(3),
    }
}

fn load_line(load: LoadValue) -> String {
    format!("{load} = {}", load.decimal(3))
}

// ---- validate ----------------------------------------------------------

#[derive(Serialize)]
struct ValidateSummary {
    kind: &'static str,
    rows: usize,
    cols: usize,
    stars_per_column: usize,
    symbols: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_replica: Option<usize>,
    memory_ratio: [usize; 2],
    warnings: Vec<String>,
}

fn run_validate(args: ValidateArgs) -> Result<()> {
    let loaded = match io::load_array(&args.file) {
        Ok(loaded) => loaded,
        Err(Error::Invalid(report)) if args.json => {
            eprintln!("{}", serde_json::to_string_pretty(&report)?);
            std::process::exit(1);
        }
        Err(err) => return Err(err),
    };
    let summary = match &loaded {
        LoadedArray::Cache(pda) => {
            let (z, f) = pda.memory_ratio();
            ValidateSummary {
                kind: "cache-level",
                rows: pda.rows(),
                cols: pda.cols(),
                stars_per_column: pda.stars_per_column(),
                symbols: pda.symbol_count(),
                max_replica: None,
                memory_ratio: [z, f],
                warnings: Vec::new(),
            }
        }
        LoadedArray::User(gpda) => {
            let (z, f) = gpda.memory_ratio();
            ValidateSummary {
                kind: "user-level",
                rows: gpda.rows(),
                cols: gpda.cols(),
                stars_per_column: gpda.stars_per_column(),
                symbols: gpda.symbol_count(),
                max_replica: Some(gpda.max_replica()),
                memory_ratio: [z, f],
                warnings: gpda.warnings().to_vec(),
            }
        }
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&summary)?);
    } else {
        println!(
            "valid {} array: {} rows x {} columns, {} stars per column, {} symbols",
            summary.kind, summary.rows, summary.cols, summary.stars_per_column, summary.symbols
        );
        println!(
            "memory ratio {}/{}",
            summary.memory_ratio[0], summary.memory_ratio[1]
        );
        if let Some(max_replica) = summary.max_replica {
            println!("max replica index {max_replica}");
        }
        for warning in &summary.warnings {
            println!("warning: {warning}");
        }
    }
    Ok(())
}

// ---- construct ---------------------------------------------------------

fn run_construct(cmd: ConstructCmd) -> Result<()> {
    let cell_budget = env_budget(CELL_BUDGET_VAR, DEFAULT_CELL_BUDGET)?;
    let (pda, output, text) = match cmd {
        ConstructCmd::Mn(args) => (
            construct_mn_bounded(args.caches, args.t, cell_budget)?,
            args.output,
            args.text,
        ),
        ConstructCmd::ConstB(args) => (
            construct_b_bounded(args.q, args.m, cell_budget)?,
            args.output,
            args.text,
        ),
    };
    let content = if text {
        io::render_pda_text(&pda)
    } else {
        io::pda_to_json(&pda)
    };
    if let Some(path) = &output {
        std::fs::write(path, &content)?;
        println!(
            "wrote {}x{} array ({} symbols) to {}",
            pda.rows(),
            pda.cols(),
            pda.symbol_count(),
            path.display()
        );
        Ok(())
    } else {
        write_or_print(&content, None)
    }
}

// ---- order -------------------------------------------------------------

#[derive(Serialize)]
struct ColumnTieJson {
    position: usize,
    candidates: Vec<usize>,
}

#[derive(Serialize)]
struct OrderOutput {
    strategy: &'static str,
    /// 1-based source columns, in their new order.
    permutation: Vec<usize>,
    alpha: usize,
    load: LoadJson,
    pair_ties: Vec<[usize; 2]>,
    column_ties: Vec<ColumnTieJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    orderings_evaluated: Option<u64>,
}

fn run_order(args: OrderArgs) -> Result<()> {
    let pda = io::load_pda(&args.pda)?;
    let profile = parse_profile(&args.profile)?;
    let perm_budget = env_budget(PERM_BUDGET_VAR, DEFAULT_PERM_BUDGET)?;

    let (strategy, ordering, trace, evaluated): (_, ColumnOrdering, OrderingTrace, _) =
        match args.mode {
            OrderMode::Greedy => {
                let (ordering, trace) = greedy_order(&pda, &profile, args.lookahead)?;
                ("greedy", ordering, trace, None)
            }
            OrderMode::Exhaustive => {
                let search = exhaustive_order(&pda, &profile, perm_budget)?;
                let trace = OrderingTrace::of(&search.ordering.reordered);
                ("exhaustive", search.ordering, trace, Some(search.evaluated))
            }
            OrderMode::ConstB => {
                let (q, m) = detect_const_b(&pda).ok_or_else(|| {
                    Error::Label(
                        "column labels do not describe a q-ary family array; \
                         the closed-form ordering needs a `construct const-b` output"
                            .into(),
                    )
                })?;
                let ordering = const_b_order(&pda, q, m, &profile)?;
                let trace = OrderingTrace::of(&ordering.reordered);
                ("const-b", ordering, trace, None)
            }
        };

    let load = load_from_pda(&ordering.reordered, &profile)?;
    let output = OrderOutput {
        strategy,
        permutation: ordering.perm.iter().map(|&k| k + 1).collect(),
        alpha: trace.alpha,
        load: load_json(load),
        pair_ties: trace
            .pair_ties
            .iter()
            .map(|&(a, b)| [a + 1, b + 1])
            .collect(),
        column_ties: trace
            .column_ties
            .iter()
            .map(|tie| ColumnTieJson {
                position: tie.position,
                candidates: tie.candidates.iter().map(|&k| k + 1).collect(),
            })
            .collect(),
        orderings_evaluated: evaluated,
    };

    if args.json {
        println!("{}", serde_json::to_string_pretty(&output)?);
    } else {
        println!("strategy:    {}", output.strategy);
        println!(
            "permutation: {}",
            output
                .permutation
                .iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        );
        println!("alpha:       {}", output.alpha);
        println!("load:        {}", load_line(load));
        if !output.pair_ties.is_empty() {
            println!(
                "pair ties:   {}",
                output
                    .pair_ties
                    .iter()
                    .map(|[a, b]| format!("({a},{b})"))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
        }
        for tie in &output.column_ties {
            println!(
                "column tie:  position {} among {{{}}}",
                tie.position,
                tie.candidates
                    .iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            );
        }
        if let Some(evaluated) = output.orderings_evaluated {
            println!("orderings evaluated: {evaluated}");
        }
    }

    if let Some(path) = &args.output {
        io::save_pda_json(&ordering.reordered, path)?;
    }
    Ok(())
}

// ---- gpda --------------------------------------------------------------

fn run_gpda(args: GpdaArgs) -> Result<()> {
    let pda = io::load_pda(&args.pda)?;
    let profile = parse_profile(&args.profile)?;
    let gpda = build_gpda(&pda, &profile)?;
    io::save_gpda_json(&gpda, &args.output)?;
    let load = load_from_gpda(&gpda);
    println!(
        "wrote {}x{} user-level array ({} symbols, load {}) to {}",
        gpda.rows(),
        gpda.cols(),
        gpda.symbol_count(),
        load_line(load),
        args.output.display()
    );
    Ok(())
}

// ---- rate --------------------------------------------------------------

#[derive(Serialize)]
struct RateOutput {
    load: LoadJson,
    subpacketization: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    gpda_load: Option<LoadJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    consistent: Option<bool>,
}

fn run_rate(args: RateArgs) -> Result<()> {
    let pda = io::load_pda(&args.pda)?;
    let profile = parse_profile(&args.profile)?;
    let load = load_from_pda(&pda, &profile)?;

    let gpda_load = match &args.gpda {
        Some(path) => Some(load_from_gpda(&io::load_gpda(path)?)),
        None => None,
    };
    let output = RateOutput {
        load: load_json(load),
        subpacketization: pda.rows(),
        gpda_load: gpda_load.map(load_json),
        consistent: gpda_load.map(|g| g == load),
    };

    if args.json {
        println!("{}", serde_json::to_string_pretty(&output)?);
    } else {
        println!(
            "load = {} (subpacketization {})",
            load_line(load),
            output.subpacketization
        );
        if let Some(gpda_load) = gpda_load {
            println!("user-level load = {}", load_line(gpda_load));
            println!(
                "{}",
                if gpda_load == load {
                    "the two routes agree"
                } else {
                    "MISMATCH between cache-level and user-level loads"
                }
            );
        }
    }
    Ok(())
}

// ---- simulate ----------------------------------------------------------

#[derive(Serialize)]
struct TranscriptEntry {
    /// 1-based (symbol, replica) tag.
    tag: [usize; 2],
    /// 1-based users whose subfiles are XORed together.
    users: Vec<usize>,
    /// 1-based subfile rows, parallel to `users`.
    rows: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    payload: Option<String>,
}

#[derive(Serialize)]
struct SimulateOutput {
    users: usize,
    /// 1-based demanded file per user.
    demand: Vec<usize>,
    transmissions: usize,
    measured_load: LoadJson,
    recovered: usize,
    mismatched: Vec<usize>,
}

fn parse_demands(
    text: &str,
    num_users: usize,
    num_files: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    match text {
        "identity" => Ok((0..num_users).map(|u| u % num_files).collect()),
        "random" => Ok(random_demand(num_users, num_files, seed)),
        csv => {
            let raw = parse_raw_profile(csv)
                .map_err(|_| Error::Parse(format!("bad demand list {csv:?}")))?;
            if raw.len() != num_users {
                return Err(Error::Dimension(format!(
                    "demand list has {} entries, expected one per user ({num_users})",
                    raw.len()
                )));
            }
            raw.iter()
                .map(|&d| {
                    if d == 0 || d > num_files {
                        Err(Error::Parse(format!(
                            "demanded file {d} outside 1..={num_files}"
                        )))
                    } else {
                        Ok(d - 1)
                    }
                })
                .collect()
        }
    }
}

fn run_simulate(args: SimulateArgs) -> Result<()> {
    let pda = io::load_pda(&args.pda)?;
    let profile = parse_profile(&args.profile)?;
    let gpda = build_gpda(&pda, &profile)?;
    let byte_budget = env_budget(LIBRARY_BUDGET_VAR, DEFAULT_LIBRARY_BUDGET)?;
    let library = Library::generate_bounded(
        args.files,
        gpda.rows(),
        args.subfile_bytes,
        args.seed,
        byte_budget,
    )?;
    let demand = parse_demands(&args.demands, gpda.cols(), args.files, args.seed)?;
    let run = simulate(&gpda, &library, &demand)?;

    let mismatched: Vec<usize> = run
        .decode_status
        .iter()
        .enumerate()
        .filter(|(_, status)| !matches!(status, pda_caching::sim::DecodeStatus::Recovered))
        .map(|(user, _)| user + 1)
        .collect();
    let output = SimulateOutput {
        users: gpda.cols(),
        demand: run.demand.iter().map(|&d| d + 1).collect(),
        transmissions: run.transmissions.len(),
        measured_load: load_json(run.measured_load),
        recovered: gpda.cols() - mismatched.len(),
        mismatched: mismatched.clone(),
    };

    if let Some(path) = &args.transcript {
        let entries: Vec<TranscriptEntry> = run
            .transmissions
            .iter()
            .map(|tx| TranscriptEntry {
                tag: [tx.symbol + 1, tx.replica],
                users: tx.terms.iter().map(|t| t.user + 1).collect(),
                rows: tx.terms.iter().map(|t| t.row + 1).collect(),
                payload: args.payloads.then(|| hex_string(&tx.payload)),
            })
            .collect();
        std::fs::write(path, serde_json::to_string_pretty(&entries)?)?;
    }

    if args.json {
        println!("{}", serde_json::to_string_pretty(&output)?);
    } else {
        println!("users:         {}", output.users);
        println!("transmissions: {}", output.transmissions);
        println!("measured load: {}", load_line(run.measured_load));
        if output.mismatched.is_empty() {
            println!("decode:        all {} users recovered", output.users);
        } else {
            println!(
                "decode:        {} of {} users recovered, MISMATCH for users {:?}",
                output.recovered, output.users, output.mismatched
            );
        }
    }
    Ok(())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

// ---- compare -----------------------------------------------------------

fn run_compare_cmd(args: CompareArgs) -> Result<()> {
    let pda = io::load_pda(&args.pda)?;
    let raw = parse_raw_profile(&args.profile)?;
    let opts = CompareOptions {
        perm_budget: env_budget(PERM_BUDGET_VAR, DEFAULT_PERM_BUDGET)?,
        lookahead: args.lookahead,
    };
    let report = run_compare(&pda, &raw, &opts)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", pda_caching::report::render_text(&report));
    }
    Ok(())
}
