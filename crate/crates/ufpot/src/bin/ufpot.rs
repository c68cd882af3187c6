//! Command-line driver: replay traces with full verification, generate
//! workloads, print bound tables, run the numeric lemma checkers, and
//! benchmark the raw forest.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;
use ufpot::ackfn::{check_appendix_a_sandwich, check_appendix_b1, check_appendix_b2, log_grid};
use ufpot::dsu::{DsuState, Variant};
use ufpot::potential::{Constants, PotentialKind};
use ufpot::report::bounds_table;
use ufpot::runner::{run_batch, RunConfig};
use ufpot::workload::{emit_trace, gen_binomial, gen_random, parse_trace, Op, Trace};

const EXIT_VERDICT_FAIL: u8 = 1;
const EXIT_INVALID_TRACE: u8 = 2;

#[derive(Parser)]
#[command(name = "ufpot", about = "union-find with verified amortized accounting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a trace with instrumentation, oracle checks, and accounting.
    Run(RunArgs),
    /// Generate a workload trace on standard output.
    Gen(GenArgs),
    /// Print the bound-function table for a list of n values.
    Bounds { n: Vec<u64> },
    /// Run the numeric appendix checkers over a sample grid.
    CheckLemmas(CheckLemmasArgs),
    /// Time raw (uninstrumented) trace execution.
    Bench(BenchArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Trace file; `-` reads standard input.
    trace: PathBuf,
    #[arg(long, default_value = "size-on")]
    variant: Variant,
    /// Comma-separated potential kinds.
    #[arg(long, value_delimiter = ',', default_values_t = PotentialKind::DEFAULT)]
    kinds: Vec<PotentialKind>,
    /// Run the exact set oracle every step when n is at most this.
    #[arg(long, default_value_t = 256)]
    oracle_cap: u32,
    /// Stop at the first violation instead of accumulating all of them.
    #[arg(long)]
    fail_fast: bool,
    /// Directory for report.json and finds.csv (not written if absent).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Override an accounting constant, e.g. C_SQRT=0.1. Repeatable.
    /// Names: SQRT_MULT, LOGSQ_MULT, LEVEL_MULT, ACK_MULT, C_SQRT,
    /// C_LOGSQ, C_LEVEL.
    #[arg(long = "override-constant")]
    override_constant: Vec<String>,
    /// Independent repeat trials of the same trace (run concurrently).
    #[arg(long, default_value_t = 1)]
    repeats: u32,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    shape: GenShape,
}

#[derive(Subcommand)]
enum GenShape {
    /// Uniform random unions and finds.
    Random {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: usize,
        #[arg(long, env = "UFPOT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        find_fraction: f64,
    },
    /// Binomial-tree build over 2^k nodes plus deep finds.
    Binomial {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1)]
        finds: usize,
    },
}

#[derive(Args)]
struct CheckLemmasArgs {
    #[arg(long, env = "UFPOT_SEED", default_value_t = 0xA11CE)]
    grid_seed: u64,
    /// Extra log-uniform sample points beyond the powers of two.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Smallest grid exponent; greater than 62 yields an empty grid.
    #[arg(long, default_value_t = 3)]
    lo_exp: u32,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 1_000_000)]
    n: u32,
    #[arg(long, default_value_t = 10_000_000)]
    m: usize,
    #[arg(long, default_value = "size-on")]
    variant: Variant,
    #[arg(long, default_value_t = 3)]
    repeats: u32,
    #[arg(long, env = "UFPOT_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    find_fraction: f64,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => cmd_run(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Bounds { n } => {
            print!("{}", bounds_table(&n));
            ExitCode::SUCCESS
        }
        Command::CheckLemmas(args) => cmd_check_lemmas(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn apply_override(constants: &mut Constants, spec: &str) -> Result<(), String> {
    let (name, value) = spec
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got {spec:?}"))?;
    let value: f64 = value
        .parse()
        .map_err(|e| format!("bad value in {spec:?}: {e}"))?;
    let slot = match name {
        "SQRT_MULT" => &mut constants.sqrt_mult,
        "LOGSQ_MULT" => &mut constants.logsq_mult,
        "LEVEL_MULT" => &mut constants.level_mult,
        "ACK_MULT" => &mut constants.ack_mult,
        "C_SQRT" => &mut constants.c_sqrt,
        "C_LOGSQ" => &mut constants.c_logsq,
        "C_LEVEL" => &mut constants.c_level_per_term,
        _ => return Err(format!("unknown constant {name:?}")),
    };
    *slot = value;
    Ok(())
}

fn read_trace(path: &PathBuf) -> Result<Trace, String> {
    let text = if path.as_os_str() == "-" {
        use std::io::Read as _;
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| e.to_string())?;
        buf
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?
    };
    parse_trace(&text).map_err(|e| e.to_string())
}

fn cmd_run(args: RunArgs) -> ExitCode {
    let trace = match read_trace(&args.trace) {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("invalid trace: {msg}");
            return ExitCode::from(EXIT_INVALID_TRACE);
        }
    };
    let mut constants = Constants::default();
    for spec in &args.override_constant {
        if let Err(msg) = apply_override(&mut constants, spec) {
            eprintln!("{msg}");
            return ExitCode::from(EXIT_INVALID_TRACE);
        }
    }
    let config = RunConfig {
        variant: args.variant,
        kinds: args.kinds.clone(),
        constants,
        seed: std::env::var("UFPOT_SEED").ok().and_then(|s| s.parse().ok()),
        oracle_cap: args.oracle_cap,
        keep_rows: true,
        fail_fast: args.fail_fast,
        ..RunConfig::default()
    };

    let traces: Vec<Trace> = (0..args.repeats.max(1)).map(|_| trace.clone()).collect();
    let mut reports = Vec::new();
    for result in run_batch(&traces, &config) {
        match result {
            Ok(report) => reports.push(report),
            Err(err) => {
                eprintln!("invalid trace: {err}");
                return ExitCode::from(EXIT_INVALID_TRACE);
            }
        }
    }

    let report = &reports[0];
    for line in report.summary_lines() {
        println!("{line}");
    }
    if let Some(dir) = &args.out_dir {
        if let Err(e) = std::fs::create_dir_all(dir)
            .and_then(|_| std::fs::write(dir.join("report.json"), report.to_json()))
            .and_then(|_| std::fs::write(dir.join("finds.csv"), report.finds_csv()))
        {
            eprintln!("failed to write reports: {e}");
            return ExitCode::from(EXIT_INVALID_TRACE);
        }
    }

    if reports.iter().all(|r| r.overall_pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERDICT_FAIL)
    }
}

fn cmd_gen(args: GenArgs) -> ExitCode {
    let trace = match args.shape {
        GenShape::Random {
            n,
            m,
            seed,
            find_fraction,
        } => gen_random(n, m, seed, find_fraction),
        GenShape::Binomial { k, finds } => gen_binomial(k, finds),
    };
    print!("{}", emit_trace(&trace));
    ExitCode::SUCCESS
}

fn cmd_check_lemmas(args: CheckLemmasArgs) -> ExitCode {
    let grid = if args.lo_exp > 62 {
        Vec::new()
    } else {
        log_grid(args.lo_exp, args.samples, args.grid_seed)
    };
    if grid.is_empty() {
        eprintln!("warning: empty sample grid, all checks pass vacuously");
        return ExitCode::SUCCESS;
    }
    let mut ok = true;
    for (name, report) in [
        ("square-iterate", check_appendix_b1(&grid)),
        ("modified-star", check_appendix_b2(&grid)),
        ("inverse-sandwich", check_appendix_a_sandwich(4, &grid)),
    ] {
        let verdict = if report.pass() { "PASS" } else { "FAIL" };
        println!("{verdict}  {name} ({} samples)", report.samples);
        for failure in &report.failures {
            println!("      {failure}");
        }
        ok &= report.pass();
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERDICT_FAIL)
    }
}

fn cmd_bench(args: BenchArgs) -> ExitCode {
    let trace = gen_random(args.n, args.m, args.seed, args.find_fraction);
    let mut times = Vec::new();
    for _ in 0..args.repeats.max(1) {
        let mut dsu = DsuState::new(trace.n as usize, args.variant).expect("n > 0");
        let start = Instant::now();
        let mut checksum = 0u64;
        for op in &trace.ops {
            match *op {
                Op::Union(a, b) => {
                    dsu.union(a, b).unwrap();
                }
                Op::Find(p) => {
                    checksum = checksum.wrapping_add(dsu.find(p).unwrap().root.0 as u64);
                }
            }
        }
        let elapsed = start.elapsed().as_secs_f64();
        times.push(elapsed);
        println!(
            "variant={} n={} m={} time={:.3}s ops_per_sec={:.0} checksum={checksum}",
            args.variant,
            args.n,
            args.m,
            elapsed,
            args.m as f64 / elapsed
        );
    }
    if times.len() > 1 {
        times.sort_by(f64::total_cmp);
        let median = times[times.len() / 2];
        println!(
            "median time={median:.3}s ops_per_sec={:.0}",
            args.m as f64 / median
        );
    }
    ExitCode::SUCCESS
}
