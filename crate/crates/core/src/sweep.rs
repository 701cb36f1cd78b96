//! Prime-range sweeps: one table per task, parallel over primes.
//!
//! Each prime is processed independently; results come back in prime order
//! and are flattened, so neither the thread count nor scheduling can change
//! a single output byte.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{exponents, image_lower_bound, image_upper_curve, order_sum_curve};
use crate::congruence::{gcd_class_counts, Spectrum};
use crate::emit::{Cell, Table};
use crate::error::{Error, Result};
use crate::expsum::{exhaustive_work, max_subgroup_sum, SearchMode};
use crate::numtheory::PrimeContext;
use crate::verify::Violation;

/// Bumped whenever a column set changes.
pub const FORMAT_VERSION: &str = "selfpower-tables/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Task {
    T1,
    T2,
    T3,
    Expsum,
    Image,
    Decomp,
}

impl Task {
    pub const ALL: [Task; 6] = [Task::T1, Task::T2, Task::T3, Task::Expsum, Task::Image, Task::Decomp];

    pub fn name(self) -> &'static str {
        match self {
            Task::T1 => "T1",
            Task::T2 => "T2",
            Task::T3 => "T3",
            Task::Expsum => "EXPSUM",
            Task::Image => "IMAGE",
            Task::Decomp => "DECOMP",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Task::T1 => &["p", "J1", "bound_27_82", "ratio"],
            Task::T2 => &["p", "t", "sum", "bound", "ratio", "in_range"],
            Task::T3 => &["p", "I", "bound_23_12", "ratio"],
            Task::Expsum => &[
                "p", "d", "max_abs", "a_max", "exact", "classical", "shteinikov", "in_hyp_sht", "shkredov",
                "in_hyp_shk",
            ],
            Task::Image => &["p", "image_size", "lower_bound", "upper_curve_3p4"],
            Task::Decomp => &["p", "d", "Jprime", "Jd"],
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.csv", self.name().to_ascii_lowercase())
    }

    fn needs_spectrum(self) -> bool {
        matches!(self, Task::T1 | Task::T2 | Task::T3 | Task::Image)
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Task::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown task {s:?} (expected t1, t2, t3, expsum, image, decomp)")))
    }
}

/// Parses `t1,t2,...`; duplicates collapse, order follows [`Task::ALL`].
pub fn parse_tasks(list: &str) -> Result<Vec<Task>> {
    let mut tasks = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Task>>>()?;
    tasks.sort();
    tasks.dedup();
    if tasks.is_empty() {
        return Err(Error::InvalidArgument("no tasks given".into()));
    }
    Ok(tasks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub spectrum: u64,
    pub expsum_work: u64,
    pub sample_a: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub primes: Vec<u64>,
    pub tasks: Vec<Task>,
    /// Worker threads; 0 means the rayon default.
    pub threads: usize,
    pub seed: u64,
    pub caps: Caps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskOutput {
    pub task: Task,
    pub table: Table,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub primes: Vec<u64>,
    pub outputs: Vec<TaskOutput>,
}

impl SweepResult {
    pub fn violation_count(&self) -> usize {
        self.outputs.iter().map(|o| o.violations.len()).sum()
    }
}

// Rows and violations one prime contributes to one task.
type Piece = (Vec<Vec<Cell>>, Vec<Violation>);

pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    let mut primes = config.primes.clone();
    primes.sort_unstable();
    primes.dedup();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let per_prime: Vec<Vec<Piece>> = pool.install(|| {
        primes
            .par_iter()
            .map(|&p| sweep_prime(p, config))
            .collect::<Result<Vec<_>>>()
    })?;
    let outputs = config
        .tasks
        .iter()
        .enumerate()
        .map(|(i, &task)| {
            let mut table = Table::new(task.columns());
            let mut violations = Vec::new();
            for pieces in &per_prime {
                let (rows, v) = &pieces[i];
                for row in rows {
                    table.push(row.clone());
                }
                violations.extend(v.iter().cloned());
            }
            TaskOutput {
                task,
                table,
                violations,
            }
        })
        .collect();
    Ok(SweepResult { primes, outputs })
}

fn sweep_prime(p: u64, config: &SweepConfig) -> Result<Vec<Piece>> {
    let ctx = PrimeContext::with_seed(p, config.seed)?;
    let spectrum = if config.tasks.iter().any(|t| t.needs_spectrum()) {
        Some(Spectrum::compute(&ctx, config.caps.spectrum)?)
    } else {
        None
    };
    let spectrum = spectrum.as_ref();
    config
        .tasks
        .iter()
        .map(|&task| match task {
            Task::T1 => Ok(fixed_points(p, spectrum.expect("computed above"))),
            Task::T2 => Ok(order_sums(&ctx, spectrum.expect("computed above"))),
            Task::T3 => Ok(collisions(p, spectrum.expect("computed above"))),
            Task::Image => Ok(image(p, spectrum.expect("computed above"))),
            Task::Expsum => expsum(&ctx, config),
            Task::Decomp => decomposition(&ctx, config.caps.spectrum),
        })
        .collect()
}

fn fixed_points(p: u64, spectrum: &Spectrum) -> Piece {
    let j1 = spectrum.count(1);
    let bound = exponents::FIXED_POINT_COUNT.pow(p as f64);
    let mut violations = Vec::new();
    // x = 1 and x = p - 1 are always solutions
    if j1 < 2 {
        violations.push(Violation::new(p, "lambda=1", ">= 2", j1));
    }
    (
        vec![vec![p.into(), j1.into(), bound.into(), (j1 as f64 / bound).into()]],
        violations,
    )
}

fn order_sums(ctx: &PrimeContext, spectrum: &Spectrum) -> Piece {
    let p = ctx.p();
    let rows = ctx
        .divisors()
        .iter()
        .map(|&t| {
            let sum = spectrum.order_sum(t);
            let curve = order_sum_curve(p, t);
            vec![
                p.into(),
                t.into(),
                sum.into(),
                curve.value.into(),
                (sum as f64 / curve.value).into(),
                curve.in_hypothesis.into(),
            ]
        })
        .collect();
    (rows, Vec::new())
}

fn collisions(p: u64, spectrum: &Spectrum) -> Piece {
    let i = spectrum.collisions();
    let bound = exponents::COLLISIONS.pow(p as f64);
    (
        vec![vec![p.into(), i.into(), bound.into(), (i as f64 / bound).into()]],
        Vec::new(),
    )
}

fn image(p: u64, spectrum: &Spectrum) -> Piece {
    let size = spectrum.image_size();
    let lower = image_lower_bound(p);
    let mut violations = Vec::new();
    if size < lower {
        violations.push(Violation::new(p, "image", format!(">= {lower}"), size));
    }
    (
        vec![vec![p.into(), size.into(), lower.into(), image_upper_curve(p).into()]],
        violations,
    )
}

fn expsum(ctx: &PrimeContext, config: &SweepConfig) -> Result<Piece> {
    let p = ctx.p();
    let mode = if exhaustive_work(p) <= config.caps.expsum_work {
        SearchMode::Exhaustive
    } else {
        SearchMode::Sampled {
            samples: config.caps.sample_a,
            seed: config.seed,
        }
    };
    let gauss = (p as f64).sqrt() + 1e-6;
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for &d in ctx.divisors() {
        let h = ctx.subgroup(d)?;
        let stat = max_subgroup_sum(&h, ctx, mode, config.caps.expsum_work)?;
        if stat.max_magnitude > gauss {
            violations.push(Violation::new(
                p,
                format!("d={d}"),
                format!("<= {}", crate::emit::format_float(gauss)),
                crate::emit::format_float(stat.max_magnitude),
            ));
        }
        let c = &stat.curves;
        rows.push(vec![
            p.into(),
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
    Ok((rows, violations))
}

fn decomposition(ctx: &PrimeContext, cap: u64) -> Result<Piece> {
    let p = ctx.p();
    let table = gcd_class_counts(ctx, cap)?;
    let mut violations: Vec<Violation> = table
        .violations()
        .map(|r| Violation::new(p, format!("d={}", r.d), format!("<= {}", r.bound), r.primary))
        .collect();
    let modulus = crate::modmath::Modulus::new(p);
    let j1 = (1..p).filter(|&x| modulus.pow(x, x) == 1).count() as u64;
    if table.primary_total() != j1 {
        violations.push(Violation::new(p, "sum over d", j1, table.primary_total()));
    }
    let rows = table
        .rows
        .iter()
        .map(|r| vec![p.into(), r.d.into(), r.primary.into(), r.bound.into()])
        .collect();
    Ok((rows, violations))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteStatus {
    pub task: String,
    pub file: String,
    pub columns: Vec<String>,
    pub rows: usize,
    pub violations: usize,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunManifest {
    pub version: String,
    pub command: Vec<String>,
    pub seed: u64,
    pub caps: Caps,
    pub primes: Vec<u64>,
    /// Seconds since the Unix epoch.
    pub started: u64,
    pub finished: u64,
    pub suites: Vec<SuiteStatus>,
}

impl RunManifest {
    pub fn new(command: Vec<String>, config: &SweepConfig, result: &SweepResult, started: u64, finished: u64) -> Self {
        let suites = result
            .outputs
            .iter()
            .map(|o| SuiteStatus {
                task: o.task.name().to_owned(),
                file: o.task.file_name(),
                columns: o.table.columns.iter().map(|c| c.to_string()).collect(),
                rows: o.table.rows.len(),
                violations: o.violations.len(),
                status: if o.violations.is_empty() { "ok" } else { "violations" }.to_owned(),
            })
            .collect();
        RunManifest {
            version: format!("{FORMAT_VERSION} ({} {})", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
            command,
            seed: config.seed,
            caps: config.caps,
            primes: result.primes.clone(),
            started,
            finished,
            suites,
        }
    }
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Writes one CSV per task and `manifest.json` into `dir`, creating it if needed.
/// Returns the paths written.
pub fn write_outputs(dir: &Path, result: &SweepResult, manifest: &RunManifest) -> Result<Vec<PathBuf>> {
    let io = |path: &Path, e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut written = Vec::new();
    for output in &result.outputs {
        let path = dir.join(output.task.file_name());
        fs::write(&path, output.table.to_csv()).map_err(|e| io(&path, e))?;
        written.push(path);
    }
    let path = dir.join("manifest.json");
    let mut json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    json.push('\n');
    fs::write(&path, json).map_err(|e| io(&path, e))?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::primes_in_range;

    fn config(primes: Vec<u64>, tasks: Vec<Task>, threads: usize) -> SweepConfig {
        SweepConfig {
            primes,
            tasks,
            threads,
            seed: 1,
            caps: Caps {
                spectrum: 10_000_000,
                expsum_work: 10_000_000_000,
                sample_a: 100,
            },
        }
    }

    #[test]
    fn task_names_round_trip() {
        for t in Task::ALL {
            assert_eq!(t.name().to_lowercase().parse::<Task>().unwrap(), t);
        }
        assert_eq!(parse_tasks("decomp,t1,T1").unwrap(), vec![Task::T1, Task::Decomp]);
        assert!(parse_tasks("t9").is_err());
        assert!(parse_tasks(",").is_err());
    }

    #[test]
    fn fixed_points_over_small_primes() {
        let primes = primes_in_range(3, 50);
        let r = run_sweep(&config(primes.clone(), vec![Task::T1], 1)).unwrap();
        let table = &r.outputs[0].table;
        assert_eq!(table.rows.len(), primes.len());
        assert!(r.outputs[0].violations.is_empty());
        assert!(table.to_csv().starts_with("p,J1,bound_27_82,ratio\n3,"));
    }

    #[test]
    fn thread_count_does_not_change_bytes() {
        let primes = primes_in_range(3, 400);
        let one = run_sweep(&config(primes.clone(), Task::ALL.to_vec(), 1)).unwrap();
        let four = run_sweep(&config(primes, Task::ALL.to_vec(), 4)).unwrap();
        for (a, b) in one.outputs.iter().zip(&four.outputs) {
            assert_eq!(a.table.to_csv(), b.table.to_csv());
        }
    }

    #[test]
    fn rows_sorted_by_prime_then_key() {
        let r = run_sweep(&config(vec![13, 7, 11, 7], vec![Task::T2], 2)).unwrap();
        let keys: Vec<(String, String)> = r.outputs[0]
            .table
            .to_csv()
            .lines()
            .skip(1)
            .map(|l| {
                let mut f = l.split(',');
                (f.next().unwrap().to_owned(), f.next().unwrap().to_owned())
            })
            .collect();
        let numeric: Vec<(u64, u64)> = keys.iter().map(|(a, b)| (a.parse().unwrap(), b.parse().unwrap())).collect();
        let mut sorted = numeric.clone();
        sorted.sort();
        assert_eq!(numeric, sorted);
        assert_eq!(numeric.len(), 4 + 4 + 6);
    }

    #[test]
    fn decomposition_sweep_has_no_violations() {
        let r = run_sweep(&config(primes_in_range(3, 1000), vec![Task::Decomp], 0)).unwrap();
        assert!(r.outputs[0].violations.is_empty());
    }

    #[test]
    fn image_sweep_flags_nineteen() {
        let r = run_sweep(&config(primes_in_range(3, 100), vec![Task::Image], 0)).unwrap();
        let ps: Vec<u64> = r.outputs[0].violations.iter().map(|v| v.p).collect();
        assert_eq!(ps, vec![19]);
    }

    #[test]
    fn composite_prime_list_is_a_domain_error() {
        let err = run_sweep(&config(vec![7, 9], vec![Task::T1], 1)).unwrap_err();
        assert!(matches!(err, Error::NotPrime { p: 9, .. }));
    }

    #[test]
    fn writes_csv_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(vec![7, 11], vec![Task::T1, Task::Image], 1);
        let r = run_sweep(&cfg).unwrap();
        let m = RunManifest::new(vec!["sweep".into()], &cfg, &r, 0, 0);
        let paths = write_outputs(dir.path(), &r, &m).unwrap();
        assert_eq!(paths.len(), 3);
        let json: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        for key in ["version", "command", "seed", "caps", "primes", "started", "finished", "suites"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert_eq!(json["suites"][1]["file"], "image.csv");
    }
}
