mod grid;
mod store;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use shellsort_lab::analytics::{lower_bound, mc_run, McConfig, McError, MAX_EXHAUSTIVE_N};
use shellsort_lab::codec::{
    decode, descr_length, encode_per_key_totals, encode_trace, read_descriptor, write_descriptor,
    CodecError, Descriptor,
};
use shellsort_lab::perm::{enumerate_permutations, log2_factorial, trial_permutation, PermError};
use shellsort_lab::verify::{verify, Suite, VerifyError};
use shellsort_lab::{
    generate, shellsort, validate, Family, IncrementSequence, Permutation, Seed, SequenceError,
};

const THREADS_ENV: &str = "SHELLSORT_LAB_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0}")]
    Input(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Permutation(#[from] PermError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Guard(#[from] VerifyError),
    #[error("{0}")]
    PropertyFailure(String),
}

impl From<McError> for CliError {
    fn from(e: McError) -> Self {
        match e {
            McError::Sequence(s) => CliError::Sequence(s),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Input(_) => "input",
            CliError::InsufficientData(_) => "insufficient_data",
            CliError::Sequence(_) => "sequence",
            CliError::Permutation(_) => "permutation",
            CliError::Codec(_) => "codec",
            CliError::Guard(_) => "guard",
            CliError::PropertyFailure(_) => "property_failure",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::PropertyFailure(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "shellsort-lab",
    version,
    about = "Shellsort increment-sequence experiments"
)]
struct Cli {
    /// Worker threads; SHELLSORT_LAB_THREADS caps this value.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the mean number of inversions over a grid of n.
    Run(RunArgs),
    /// Run the exhaustive property suites.
    Verify(VerifyArgs),
    /// Fit scaling exponents from a JSONL store; CSV on stdout.
    Fit(FitArgs),
    /// Encode, decode and round-trip permutation descriptors.
    #[command(subcommand)]
    Codec(CodecCommand),
    /// Print the lower-bound table.
    Lb(LbArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SequenceArgs {
    /// Increment family tag, e.g. knuth2 or pratt_2i3j.
    #[arg(long)]
    sequence: Option<Family>,
    /// Custom decreasing increments ending in 1, e.g. 4,2,1.
    #[arg(long, value_delimiter = ',')]
    increments: Option<Vec<usize>>,
}

impl SequenceArgs {
    fn family(&self) -> Family {
        self.sequence.unwrap_or(Family::Custom)
    }

    fn resolve(&self, n: usize) -> Result<IncrementSequence, CliError> {
        Ok(match (&self.sequence, &self.increments) {
            (_, Some(h)) => validate(h, n)?,
            (Some(f), None) => generate(*f, n)?,
            (None, None) => unreachable!("clap requires one"),
        })
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    seq: SequenceArgs,
    /// n, a comma list, or start:stop:xF.
    #[arg(long, required = true, value_parser = grid::parse_grid)]
    n: Vec<Vec<usize>>,
    /// Random permutations per grid point [default: 100].
    #[arg(long, conflicts_with = "exhaustive")]
    trials: Option<u64>,
    /// Master seed; trial t of every grid point uses its own stream.
    #[arg(long, required_unless_present = "exhaustive")]
    seed: Option<u64>,
    /// Average over every permutation instead of sampling.
    #[arg(long)]
    exhaustive: bool,
    /// JSONL store to append records to.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep the full trace of the first input in each record.
    #[arg(long)]
    retain_traces: bool,
    /// Check every pass against the chain-inversion oracle.
    #[arg(long)]
    check: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Sorter,
    Claims,
    Codec,
    Radix,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Sorter => Suite::Sorter,
            SuiteArg::Claims => Suite::Claims,
            SuiteArg::Codec => Suite::Codec,
            SuiteArg::Radix => Suite::Radix,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    /// Largest n to check; the default and the ceiling depend on the suite.
    #[arg(long)]
    max_n: Option<usize>,
}

#[derive(Args)]
struct FitArgs {
    /// JSONL store written by `run --out`.
    #[arg(long)]
    store: PathBuf,
    /// Restrict to one family; default is every family in the store.
    #[arg(long)]
    family: Option<Family>,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum SchemeArg {
    #[default]
    Trace,
    PerKey,
}

#[derive(Subcommand)]
enum CodecCommand {
    /// Encode and decode permutations, reporting failures and lengths.
    Roundtrip {
        /// Number of keys.
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        seq: SequenceArgs,
        /// Try every permutation of n.
        #[arg(long, conflicts_with_all = ["trials", "seed"])]
        exhaustive: bool,
        /// Random permutations to try.
        #[arg(long, required_unless_present = "exhaustive", requires = "seed")]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// `per-key` stores one displacement per key and is not injective.
        #[arg(long, value_enum, default_value = "trace")]
        scheme: SchemeArg,
    },
    /// Encode one permutation, optionally to a descriptor file.
    Encode {
        /// Keys 1..=n, comma separated.
        #[arg(long, value_delimiter = ',', required_unless_present = "seed")]
        permutation: Option<Vec<u32>>,
        /// Draw a random permutation of --n instead.
        #[arg(long, requires = "n", conflicts_with = "permutation")]
        seed: Option<u64>,
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        seq: SequenceArgs,
        #[arg(long, value_enum, default_value = "trace")]
        scheme: SchemeArg,
        /// Also write the descriptor to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode a descriptor file.
    Decode { file: PathBuf },
}

#[derive(Args)]
struct LbArgs {
    /// n, a comma list, or start:stop:xF.
    #[arg(long, required = true, value_parser = grid::parse_grid)]
    n: Vec<Vec<usize>>,
    /// One family; default is every family.
    #[arg(long, conflicts_with = "increments")]
    sequence: Option<Family>,
    #[arg(long, value_delimiter = ',')]
    increments: Option<Vec<usize>>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            return report(&CliError::Usage(message.trim_end().to_owned()));
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}

fn report(e: &CliError) -> ExitCode {
    let body = json!({ "error": e.kind(), "message": e.to_string() });
    eprintln!("{body}");
    ExitCode::from(e.exit_code())
}

fn configure_threads(flag: Option<usize>) -> Result<(), CliError> {
    let cap = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .ok()
                .filter(|&t| t > 0)
                .ok_or_else(|| {
                    CliError::Usage(format!(
                        "{THREADS_ENV} must be a positive integer, got {v:?}"
                    ))
                })?,
        ),
        Err(_) => None,
    };
    if flag == Some(0) {
        return Err(CliError::Usage("--threads must be positive".into()));
    }
    let threads = match (flag, cap) {
        (Some(f), Some(c)) => Some(f.min(c)),
        (f, c) => f.or(c),
    };
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    configure_threads(cli.threads)?;
    match cli.command {
        Command::Run(args) => run(args),
        Command::Verify(args) => run_verify(args),
        Command::Fit(args) => fit(args),
        Command::Codec(cmd) => codec(cmd),
        Command::Lb(args) => lb(args),
    }
}

fn flat_grid(grids: Vec<Vec<usize>>) -> Vec<usize> {
    grids.into_iter().flatten().collect()
}

fn run(args: RunArgs) -> Result<(), CliError> {
    let grid = flat_grid(args.n);
    let family = args.seq.family();
    // validate every grid point before any work is done
    let seqs = grid
        .iter()
        .map(|&n| args.seq.resolve(n))
        .collect::<Result<Vec<_>, _>>()?;
    let mut config = if args.exhaustive {
        if let Some(&n) = grid.iter().find(|&&n| n > MAX_EXHAUSTIVE_N) {
            return Err(CliError::Usage(format!(
                "--exhaustive is limited to n <= {MAX_EXHAUSTIVE_N}, got {n}"
            )));
        }
        McConfig {
            seed: Seed(args.seed.unwrap_or(0)),
            ..McConfig::exhaustive()
        }
    } else {
        let trials = args.trials.unwrap_or(100);
        if trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        McConfig::sampled(trials, args.seed.expect("clap requires --seed"))
    };
    config.check_passes = args.check;
    config.retain_trace = args.retain_traces;

    let stdout = io::stdout();
    let mut out = stdout.lock();
    let _ = writeln!(
        out,
        "{:<18} {:>8} {:>3} {:>8} {:>16} {:>16} {:>9}",
        "family", "n", "p", "trials", "mean_T", "lb_value", "ratio"
    );
    let mut failures = Vec::new();
    for seq in &seqs {
        let record = mc_run(family, seq, &config)?;
        if let Some(path) = &args.out {
            store::append_records(path, std::slice::from_ref(&record))?;
        }
        let _ = writeln!(
            out,
            "{:<18} {:>8} {:>3} {:>8} {:>16.3} {:>16.3} {:>9.5}",
            family.tag(),
            record.n,
            record.increments.len(),
            record.trials,
            record.mean_t,
            record.lb_value,
            record.lb_ratio
        );
        if let Some(o) = record.oracle {
            if o.pass_sum_mismatches > 0 || o.unsorted_runs > 0 {
                failures.push(format!(
                    "n = {}: {} pass-sum mismatches, {} unsorted runs",
                    record.n, o.pass_sum_mismatches, o.unsorted_runs
                ));
            }
        }
    }
    if !failures.is_empty() {
        return Err(CliError::PropertyFailure(failures.join("; ")));
    }
    Ok(())
}

fn run_verify(args: VerifyArgs) -> Result<(), CliError> {
    let suite = Suite::from(args.suite);
    let max_n = args.max_n.unwrap_or(suite.default_max_n());
    let report = verify(suite, max_n)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    if report.passed {
        return Ok(());
    }
    let failed: Vec<String> = report
        .suites
        .iter()
        .filter_map(|s| {
            let x = s.counterexample.as_ref()?;
            Some(format!("{}: {} ({})", s.suite, x.property, x.detail))
        })
        .collect();
    Err(CliError::PropertyFailure(failed.join("; ")))
}

fn fit(args: FitArgs) -> Result<(), CliError> {
    let records = store::read_records(&args.store)?;
    let rows = match args.family {
        Some(f) => vec![store::fit_family(&records, f)?],
        None => {
            let mut families: Vec<Family> = records.iter().map(|r| r.family).collect();
            families.sort_by_key(|f| f.tag());
            families.dedup();
            let mut rows = Vec::new();
            for f in families {
                match store::fit_family(&records, f) {
                    Ok(row) => rows.push(row),
                    Err(e) => eprintln!("{}", json!({ "warning": e.to_string() })),
                }
            }
            if rows.is_empty() {
                return Err(CliError::InsufficientData(format!(
                    "no family in {} has a usable grid",
                    args.store.display()
                )));
            }
            rows
        }
    };
    store::write_csv(io::stdout().lock(), &rows)
}

fn encode_with(p: &Permutation, seq: &IncrementSequence, scheme: SchemeArg) -> Descriptor {
    match scheme {
        SchemeArg::Trace => encode_trace(&shellsort(p, seq)),
        SchemeArg::PerKey => encode_per_key_totals(p, seq),
    }
}

fn codec(cmd: CodecCommand) -> Result<(), CliError> {
    match cmd {
        CodecCommand::Roundtrip {
            n,
            seq,
            exhaustive,
            trials,
            seed,
            scheme,
        } => {
            let increments = seq.resolve(n)?;
            let perms: Vec<Permutation> = if exhaustive {
                enumerate_permutations(n)?.collect()
            } else {
                let seed = Seed(seed.expect("clap requires --seed"));
                (0..trials.expect("clap requires --trials"))
                    .map(|i| trial_permutation(n, seed, i))
                    .collect::<Result<_, _>>()?
            };
            if perms.is_empty() {
                return Err(CliError::Usage("--trials must be at least 1".into()));
            }
            let mut failures = 0u64;
            let mut first_failure = None;
            let (mut total, mut payload) = (0u64, 0u64);
            for p in &perms {
                let d = encode_with(p, &increments, scheme);
                let len = descr_length(&d)?;
                total += len.total;
                payload += len.payload;
                let back = decode(&d);
                if back.as_ref() != Ok(p) {
                    failures += 1;
                    first_failure.get_or_insert_with(
                        || json!({ "permutation": p, "decoded": back.map_err(|e| e.to_string()) }),
                    );
                }
            }
            let count = perms.len() as f64;
            let body = json!({
                "n": n,
                "increments": increments.increments(),
                "scheme": match scheme { SchemeArg::Trace => "trace", SchemeArg::PerKey => "per_key" },
                "exhaustive": exhaustive,
                "checked": perms.len(),
                "failures": failures,
                "mean_bits": total as f64 / count,
                "mean_payload_bits": payload as f64 / count,
                "mean_overhead_bits": (total - payload) as f64 / count,
                "log2_factorial": log2_factorial(n),
                "first_failure": first_failure,
            });
            println!("{}", serde_json::to_string_pretty(&body).expect("json"));
            if failures > 0 {
                return Err(CliError::PropertyFailure(format!(
                    "{failures} of {} permutations did not round-trip",
                    perms.len()
                )));
            }
            Ok(())
        }
        CodecCommand::Encode {
            permutation,
            seed,
            n,
            seq,
            scheme,
            out,
        } => {
            let p = match (permutation, seed) {
                (Some(keys), _) => {
                    if n.is_some_and(|n| n != keys.len()) {
                        return Err(CliError::Usage("--n disagrees with --permutation".into()));
                    }
                    Permutation::new(keys)?
                }
                (None, Some(seed)) => {
                    trial_permutation(n.expect("clap requires --n"), Seed(seed), 0)?
                }
                (None, None) => unreachable!("clap requires one"),
            };
            let increments = seq.resolve(p.len())?;
            let d = encode_with(&p, &increments, scheme);
            let len = descr_length(&d)?;
            if let Some(path) = &out {
                std::fs::write(path, write_descriptor(&d)).map_err(|e| CliError::Io {
                    path: path.display().to_string(),
                    source: e,
                })?;
            }
            let body = json!({
                "permutation": p,
                "increments": increments.increments(),
                "scheme": d.scheme,
                "bits": d.bits.to_string(),
                "length": len,
                "log2_factorial": log2_factorial(p.len()),
            });
            println!("{}", serde_json::to_string_pretty(&body).expect("json"));
            Ok(())
        }
        CodecCommand::Decode { file } => {
            let bytes = std::fs::read(&file).map_err(|e| CliError::Io {
                path: file.display().to_string(),
                source: e,
            })?;
            let d = read_descriptor(&bytes)?;
            let p = decode(&d)?;
            let body = json!({
                "n": d.n,
                "increments": d.increments.increments(),
                "scheme": d.scheme,
                "permutation": p,
            });
            println!("{}", serde_json::to_string_pretty(&body).expect("json"));
            Ok(())
        }
    }
}

fn lb(args: LbArgs) -> Result<(), CliError> {
    let grid = flat_grid(args.n);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let _ = writeln!(
        out,
        "{:<18} {:>8} {:>3} {:>18} {:>12}  increments",
        "family", "n", "p", "lower_bound", "lb/nlog2n"
    );
    let mut row = |label: &str, n: usize, seq: Result<IncrementSequence, SequenceError>| {
        let _ = match seq {
            Ok(seq) => {
                let lb = lower_bound(&seq);
                let nlogn = n as f64 * (n as f64).log2();
                writeln!(
                    out,
                    "{label:<18} {n:>8} {:>3} {lb:>18.3} {:>12.5}  {:?}",
                    seq.passes(),
                    lb / nlogn,
                    seq.increments()
                )
            }
            Err(e) => writeln!(
                out,
                "{label:<18} {n:>8} {:>3} {:>18} {:>12}  {e}",
                "-", "-", "-"
            ),
        };
    };
    for &n in &grid {
        match (&args.sequence, &args.increments) {
            (_, Some(h)) => row("custom", n, validate(h, n)),
            (Some(f), None) => row(f.tag(), n, generate(*f, n)),
            (None, None) => {
                for f in Family::GENERATED {
                    row(f.tag(), n, generate(f, n));
                }
            }
        }
    }
    Ok(())
}
