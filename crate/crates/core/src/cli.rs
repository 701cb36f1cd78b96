//! The `selfpower` command line.
//!
//! Exit codes: 0 success, 1 a checked identity or bound was violated, 2 bad
//! input (including composite moduli), 3 a configured cap was exceeded,
//! 4 output could not be written.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::congruence::{count_j, Spectrum, DEFAULT_SPECTRUM_CAP};
use crate::emit::Table;
use crate::error::{Error, Result};
use crate::expsum::{max_subgroup_sum, SearchMode, DEFAULT_WORK_CAP};
use crate::numtheory::{primes_in_range, PrimeContext, DEFAULT_FACTOR_SEED};
use crate::reports::{expsum_report, report_table, theorem_report, Report};
use crate::sweep::{parse_tasks, run_sweep, unix_now, write_outputs, Caps, RunManifest, SweepConfig, Task};
use crate::verify::{run_verify, Fault, Level};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_IO: i32 = 4;

const SOLVE_COLUMNS: &[&str] = &["p", "lambda", "J", "ord_lambda"];

#[derive(Debug, Parser)]
#[command(name = "selfpower", version, about = "Exact counts for x^x = lambda (mod p) and related sums")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// J(p; lambda) for one lambda or the whole spectrum.
    Solve(SolveArgs),
    /// Tables over a range of primes, one CSV per task plus a manifest.
    Sweep(SweepArgs),
    /// Largest subgroup exponential sum for each requested d.
    Expsum(ExpsumArgs),
    /// Run the identity and inequality suites.
    Verify(VerifyArgs),
    /// Observed quantities next to their bound curves at one prime.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, conflicts_with = "all_lambda", required_unless_present = "all_lambda")]
    lambda: Option<u64>,
    #[arg(long)]
    all_lambda: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, default_value_t = DEFAULT_SPECTRUM_CAP)]
    cap_spectrum: u64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    p_min: Option<u64>,
    #[arg(long)]
    p_max: Option<u64>,
    /// Extra primes, comma separated.
    #[arg(long, value_delimiter = ',')]
    primes: Vec<u64>,
    #[arg(long, default_value = "t1,t2,t3,expsum,image,decomp")]
    tasks: String,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value_t = DEFAULT_FACTOR_SEED)]
    seed: u64,
    /// Random frequencies per (p, d) when an exhaustive search is over the work cap.
    #[arg(long, default_value_t = 1000)]
    sample_a: usize,
    #[arg(long, default_value_t = DEFAULT_SPECTRUM_CAP)]
    cap_spectrum: u64,
    #[arg(long, default_value_t = DEFAULT_WORK_CAP)]
    cap_expsum_work: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ExpsumArgs {
    #[arg(long)]
    p: u64,
    /// Subgroup order; every divisor of p - 1 when omitted.
    #[arg(long)]
    d: Option<u64>,
    /// Switch to sampled mode with this many random frequencies.
    #[arg(long)]
    sample_a: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_FACTOR_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_WORK_CAP)]
    cap_expsum_work: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "quick")]
    level: LevelArg,
    /// Deliberately break one algorithm (jd-off-by-one).
    #[arg(long)]
    inject_fault: Option<String>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    t: Option<u64>,
    #[arg(long)]
    d: Option<u64>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long = "M")]
    m: Option<u64>,
    #[arg(long, default_value_t = 1)]
    lambda: u64,
    /// Interval start for the L1 sum row.
    #[arg(long, allow_hyphen_values = true, requires = "v")]
    u: Option<i64>,
    #[arg(long, allow_hyphen_values = true, requires = "u")]
    v: Option<i64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, default_value_t = DEFAULT_SPECTRUM_CAP)]
    cap_spectrum: u64,
    #[arg(long, default_value_t = DEFAULT_WORK_CAP)]
    cap_expsum_work: u64,
}

/// Parses `args` (program name first) and runs the command, writing results
/// to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_DOMAIN } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let command_line = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let outcome = match cli.command {
        Command::Solve(a) => solve(a, out),
        Command::Sweep(a) => sweep(a, command_line, out, err),
        Command::Expsum(a) => expsum(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Report(a) => report(a, out),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        e if e.is_cap() => EXIT_CAP,
        _ => EXIT_DOMAIN,
    }
}

fn emit(table: &Table, format: Format, out: &mut dyn Write) -> Result<()> {
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    out.write_all(text.as_bytes()).map_err(|e| Error::Io {
        path: "<stdout>".into(),
        message: e.to_string(),
    })
}

fn solve(a: SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let ctx = PrimeContext::new(a.p)?;
    let mut table = Table::new(SOLVE_COLUMNS);
    match a.lambda {
        Some(lambda) => {
            let j = count_j(&ctx, lambda)?;
            table.push(vec![a.p.into(), lambda.into(), j.into(), ctx.multiplicative_order(lambda)?.into()]);
        }
        None => {
            let spectrum = Spectrum::compute(&ctx, a.cap_spectrum)?;
            for lambda in 1..a.p {
                table.push(vec![
                    a.p.into(),
                    lambda.into(),
                    spectrum.count(lambda).into(),
                    ctx.multiplicative_order(lambda)?.into(),
                ]);
            }
        }
    }
    emit(&table, a.format, out)?;
    Ok(EXIT_OK)
}

fn sweep(a: SweepArgs, command_line: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let tasks = parse_tasks(&a.tasks)?;
    let mut primes = a.primes.clone();
    match (a.p_min, a.p_max) {
        (Some(lo), Some(hi)) => {
            if lo > hi {
                return Err(Error::InvalidArgument(format!("--p-min {lo} exceeds --p-max {hi}")));
            }
            primes.extend(primes_in_range(lo.max(3), hi));
        }
        (None, None) => {}
        _ => return Err(Error::InvalidArgument("--p-min and --p-max go together".into())),
    }
    if primes.is_empty() {
        return Err(Error::InvalidArgument("no primes selected".into()));
    }
    let config = SweepConfig {
        primes,
        tasks,
        threads: a.threads,
        seed: a.seed,
        caps: Caps {
            spectrum: a.cap_spectrum,
            expsum_work: a.cap_expsum_work,
            sample_a: a.sample_a,
        },
    };
    let started = unix_now();
    let result = run_sweep(&config)?;
    let manifest = RunManifest::new(command_line, &config, &result, started, unix_now());
    write_outputs(&a.out, &result, &manifest)?;
    for o in &result.outputs {
        let _ = writeln!(
            out,
            "{:<7} {:<12} rows {:>8}  violations {}",
            o.task.name(),
            o.task.file_name(),
            o.table.rows.len(),
            o.violations.len()
        );
        for v in &o.violations {
            let _ = writeln!(err, "{} violation {v}", o.task);
        }
    }
    Ok(if result.violation_count() == 0 { EXIT_OK } else { EXIT_VIOLATION })
}

fn expsum(a: ExpsumArgs, out: &mut dyn Write) -> Result<i32> {
    let ctx = PrimeContext::with_seed(a.p, a.seed)?;
    let ds = match a.d {
        Some(d) => {
            ctx.require_divisor("d", d)?;
            vec![d]
        }
        None => ctx.divisors().to_vec(),
    };
    let mode = match a.sample_a {
        Some(samples) => SearchMode::Sampled { samples, seed: a.seed },
        None => SearchMode::Exhaustive,
    };
    let mut table = Table::new(Task::Expsum.columns());
    for d in ds {
        let stat = max_subgroup_sum(&ctx.subgroup(d)?, &ctx, mode, a.cap_expsum_work)?;
        let c = &stat.curves;
        table.push(vec![
            a.p.into(),
            d.into(),
            stat.max_magnitude.into(),
            stat.a_max.into(),
            stat.exact.into(),
            c.classical.value.into(),
            c.shteinikov.value.into(),
            c.shteinikov.in_hypothesis.into(),
            c.shkredov.value.into(),
            c.shkredov.in_hypothesis.into(),
        ]);
    }
    emit(&table, a.format, out)?;
    Ok(EXIT_OK)
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let fault = a.inject_fault.as_deref().map(str::parse::<Fault>).transpose()?;
    let level = match a.level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let report = run_verify(level, fault)?;
    for s in &report.suites {
        let _ = writeln!(out, "{}", s.summary_line());
    }
    let passed = report.passed();
    let _ = writeln!(out, "{}", if passed { "all suites passed" } else { "violations found" });
    Ok(if passed { EXIT_OK } else { EXIT_VIOLATION })
}

fn report(a: ReportArgs, out: &mut dyn Write) -> Result<i32> {
    let ctx = PrimeContext::new(a.p)?;
    let mut which = vec![Report::FixedPoints, Report::Collisions];
    if let Some(t) = a.t {
        which.push(Report::OrderSum { t });
    }
    if let Some(d) = a.d {
        which.push(match a.t {
            Some(t) => Report::Td { d, t },
            None => Report::Jd { d },
        });
    }
    if let (Some(n), Some(m)) = (a.n, a.m) {
        which.push(Report::PowerCongruence { n, m, lambda: a.lambda });
    }
    if let (Some(u), Some(v)) = (a.u, a.v) {
        which.push(Report::IntervalL1 { u, v });
    }
    let mut rows = Vec::new();
    for r in which {
        rows.extend(theorem_report(&ctx, r, a.cap_spectrum)?);
    }
    if let Some(d) = a.d {
        rows.extend(expsum_report(&ctx, d, SearchMode::Exhaustive, a.cap_expsum_work)?);
    }
    emit(&report_table(&rows), a.format, out)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("selfpower").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn solve_single_lambda() {
        let (code, out, _) = run_str(&["solve", "--p", "7", "--lambda", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out, "p,lambda,J,ord_lambda\n7,1,2,1\n");
    }

    #[test]
    fn solve_full_spectrum_partitions() {
        let (code, out, _) = run_str(&["solve", "--p", "7", "--all-lambda"]);
        assert_eq!(code, 0);
        let js: Vec<u64> = out.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
        assert_eq!(js.len(), 6);
        assert_eq!(js.iter().sum::<u64>(), 6);
    }

    #[test]
    fn solve_rejects_composite_and_bad_lambda() {
        let (code, _, err) = run_str(&["solve", "--p", "9", "--lambda", "1"]);
        assert_eq!(code, 2);
        assert!(err.contains("not prime"));
        assert_eq!(run_str(&["solve", "--p", "7", "--lambda", "7"]).0, 2);
        assert_eq!(run_str(&["solve", "--p", "7"]).0, 2);
    }

    #[test]
    fn solve_spectrum_cap() {
        let (code, _, err) = run_str(&["solve", "--p", "101", "--all-lambda", "--cap-spectrum", "50"]);
        assert_eq!(code, 3);
        assert!(err.contains("--cap-spectrum"));
    }

    #[test]
    fn expsum_work_cap_and_sampling() {
        assert_eq!(run_str(&["expsum", "--p", "101", "--d", "5", "--cap-expsum-work", "10"]).0, 3);
        let (code, out, _) = run_str(&["expsum", "--p", "101", "--d", "5", "--sample-a", "10", "--cap-expsum-work", "10"]);
        assert_eq!(code, 0);
        assert!(out.lines().nth(1).unwrap().contains(",false,"));
        assert_eq!(run_str(&["expsum", "--p", "101", "--d", "3"]).0, 2);
    }

    #[test]
    fn report_rows_at_seven() {
        let (code, out, _) = run_str(&["report", "--p", "7", "--t", "3"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "p,quantity,t,d,n,M,k,observed,bound_name,bound_value,ratio,in_hypothesis");
        assert!(lines[1].starts_with("7,J1,,,,,,2,"));
        assert!(lines[2].starts_with("7,I,,,,,,10,"));
        assert!(lines[3].starts_with("7,ORDER_SUM_T,3,,,,,2,"));
    }

    #[test]
    fn verify_fault_injection() {
        let (code, out, _) = run_str(&["verify", "--inject-fault", "jd-off-by-one"]);
        assert_eq!(code, 1);
        assert!(out.contains("(7, J_d d=2, expected 1, got 2)"));
        assert_eq!(run_str(&["verify", "--inject-fault", "bogus"]).0, 2);
    }

    #[test]
    fn sweep_unwritable_output() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let target = blocker.join("sub");
        let (code, _, _) = run_str(&["sweep", "--p-min", "3", "--p-max", "20", "--tasks", "t1", "--out", target.to_str().unwrap()]);
        assert_eq!(code, 4);
    }

    #[test]
    fn sweep_range_validation() {
        let (code, _, _) = run_str(&["sweep", "--p-min", "30", "--p-max", "20", "--tasks", "t1", "--out", "unused"]);
        assert_eq!(code, 2);
    }
}
