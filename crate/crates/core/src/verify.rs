//! Self-verification: exact identities and unconditional inequalities checked
//! over ranges of primes.
//!
//! Each suite reports how many cases it checked and every violation found.
//! Suites marked informational are printed but never fail the run.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::image_lower_bound;
use crate::congruence::{
    count_jd, count_td, decomposition_table, gcd_class_counts, order_stratified_sum, CountAlgorithm,
    OrderSumAlgorithm, Spectrum, DEFAULT_SPECTRUM_CAP,
};
use crate::error::Result;
use crate::expsum::{interval_l1_sum, max_subgroup_sum, parseval_total, SearchMode, DEFAULT_WORK_CAP};
use crate::modmath::{inv_mod, pow_mod, Modulus};
use crate::numtheory::{gcd, primes_in_range, PrimeContext};

/// One failed check: where, what was expected, what came out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub p: u64,
    pub param: String,
    pub expected: String,
    pub got: String,
}

impl Violation {
    pub fn new(p: u64, param: impl fmt::Display, expected: impl fmt::Display, got: impl fmt::Display) -> Self {
        Violation {
            p,
            param: param.to_string(),
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, expected {}, got {})", self.p, self.param, self.expected, self.got)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

/// A deliberate bug for checking that the harness notices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// The direct `J_d` scan runs one past `(p-1)/d`.
    JdOffByOne,
}

impl std::str::FromStr for Fault {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jd-off-by-one" => Ok(Fault::JdOffByOne),
            other => Err(crate::Error::InvalidArgument(format!(
                "unknown fault {other:?} (known: jd-off-by-one)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub scope: String,
    pub checked: u64,
    pub violations: Vec<Violation>,
    pub informational: bool,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary_line(&self) -> String {
        let tag = match (self.passed(), self.informational) {
            (true, _) => "PASS",
            (false, true) => "INFO",
            (false, false) => "FAIL",
        };
        let mut line = format!(
            "{tag} {:<24} {:<28} checked {:>9}  violations {}",
            self.name,
            self.scope,
            self.checked,
            self.violations.len()
        );
        if !self.violations.is_empty() {
            let shown: Vec<String> = self.violations.iter().take(5).map(|v| v.to_string()).collect();
            line.push_str(": ");
            line.push_str(&shown.join(" "));
            if self.violations.len() > 5 {
                line.push_str(" ...");
            }
        }
        line
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    /// True iff every suite that can fail passed.
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.informational || s.passed())
    }
}

/// All primes up to 2000 plus `spread` primes evenly spaced (by index) over
/// `(2000, limit]`.
pub fn sampled_primes(limit: u64, spread: usize) -> Vec<u64> {
    let mut primes = primes_in_range(3, limit.min(2000));
    if limit > 2000 && spread > 0 {
        let upper = primes_in_range(2001, limit);
        let n = upper.len();
        let take = spread.min(n);
        for i in 0..take {
            // last index is always included so the sample reaches `limit`
            let idx = if take == 1 { n - 1 } else { i * (n - 1) / (take - 1) };
            primes.push(upper[idx]);
        }
        primes.dedup();
    }
    primes
}

struct Scales {
    partition: u64,
    pairwise: u64,
    decomposition: Vec<u64>,
    order_sum: u64,
    dual: u64,
    expsum: u64,
    l1: u64,
    l1_pairs: usize,
    order_lemma: u64,
    root_bound: u64,
}

fn scales(level: Level) -> Scales {
    match level {
        Level::Quick => Scales {
            partition: 500,
            pairwise: 500,
            decomposition: primes_in_range(3, 500),
            order_sum: 500,
            dual: 500,
            expsum: 500,
            l1: 500,
            l1_pairs: 10,
            order_lemma: 300,
            root_bound: 300,
        },
        Level::Full => Scales {
            partition: 100_000,
            pairwise: 500,
            decomposition: sampled_primes(100_000, 200),
            order_sum: 10_000,
            dual: 10_000,
            expsum: 2000,
            l1: 10_000,
            l1_pairs: 100,
            order_lemma: 300,
            root_bound: 300,
        },
    }
}

pub fn run_verify(level: Level, fault: Option<Fault>) -> Result<VerifyReport> {
    let s = scales(level);
    let suites = vec![
        spectrum_partition(s.partition)?,
        pairwise_collisions(s.pairwise)?,
        gcd_decomposition(&s.decomposition)?,
        order_sum_decomposition(s.order_sum)?,
        dual_algorithms(s.dual, fault)?,
        gauss_bound(s.expsum)?,
        parseval(s.expsum)?,
        interval_l1(s.l1, s.l1_pairs)?,
        order_lemma(s.order_lemma),
        root_count_bound(s.root_bound),
        image_lower(&s.decomposition)?,
    ];
    Ok(VerifyReport { suites })
}

fn scope(limit: u64) -> String {
    format!("p <= {limit}")
}

// Runs `check` on every prime in parallel and gathers results in prime order.
fn per_prime<F>(primes: &[u64], check: F) -> Result<(u64, Vec<Violation>)>
where
    F: Fn(&PrimeContext) -> Result<(u64, Vec<Violation>)> + Sync,
{
    let parts = primes
        .par_iter()
        .map(|&p| check(&PrimeContext::new(p)?))
        .collect::<Result<Vec<_>>>()?;
    let mut checked = 0;
    let mut violations = Vec::new();
    for (n, v) in parts {
        checked += n;
        violations.extend(v);
    }
    Ok((checked, violations))
}

fn suite(name: &'static str, scope: String, (checked, violations): (u64, Vec<Violation>)) -> SuiteResult {
    SuiteResult {
        name,
        scope,
        checked,
        violations,
        informational: false,
    }
}

pub fn spectrum_partition(limit: u64) -> Result<SuiteResult> {
    let r = per_prime(&primes_in_range(3, limit), |ctx| {
        let spectrum = Spectrum::compute(ctx, DEFAULT_SPECTRUM_CAP)?;
        let p = ctx.p();
        let mut v = Vec::new();
        if spectrum.total() != p - 1 {
            v.push(Violation::new(p, "sum J", p - 1, spectrum.total()));
        }
        let by_order: u64 = spectrum.by_order().values().sum();
        if by_order != p - 1 {
            v.push(Violation::new(p, "sum by order", p - 1, by_order));
        }
        Ok((1, v))
    })?;
    Ok(suite("spectrum-partition", scope(limit), r))
}

pub fn pairwise_collisions(limit: u64) -> Result<SuiteResult> {
    let r = per_prime(&primes_in_range(3, limit), |ctx| {
        let p = ctx.p();
        let values: Vec<u64> = (1..p).map(|x| pow_mod(x, x, p)).collect();
        let pairs = values
            .iter()
            .map(|a| values.iter().filter(|&b| a == b).count() as u64)
            .sum::<u64>();
        let i = Spectrum::compute(ctx, DEFAULT_SPECTRUM_CAP)?.collisions();
        let v = if i == pairs {
            vec![]
        } else {
            vec![Violation::new(p, "I", pairs, i)]
        };
        Ok((1, v))
    })?;
    Ok(suite("pairwise-collisions", scope(limit), r))
}

pub fn gcd_decomposition(primes: &[u64]) -> Result<SuiteResult> {
    let r = per_prime(primes, |ctx| {
        let p = ctx.p();
        let table = gcd_class_counts(ctx, DEFAULT_SPECTRUM_CAP)?;
        let mut v: Vec<Violation> = table
            .violations()
            .map(|r| Violation::new(p, format!("d={}", r.d), format!("J'_d <= {}", r.bound), r.primary))
            .collect();
        let modulus = Modulus::new(p);
        let j1 = (1..p).filter(|&x| modulus.pow(x, x) == 1).count() as u64;
        if table.primary_total() != j1 {
            v.push(Violation::new(p, "sum J'_d", j1, table.primary_total()));
        }
        Ok((table.rows.len() as u64, v))
    })?;
    let top = primes.last().copied().unwrap_or(0);
    Ok(suite("gcd-decomposition", format!("{} primes <= {top}", primes.len()), r))
}

pub fn order_sum_decomposition(limit: u64) -> Result<SuiteResult> {
    let r = per_prime(&primes_in_range(3, limit), |ctx| {
        let p = ctx.p();
        let spectrum = Spectrum::compute(ctx, DEFAULT_SPECTRUM_CAP)?;
        let mut v = Vec::new();
        for &t in ctx.divisors() {
            let via_spectrum = spectrum.order_sum(t);
            let via_scan = order_stratified_sum(ctx, t, OrderSumAlgorithm::ViaXScan)?;
            if via_spectrum != via_scan {
                v.push(Violation::new(p, format!("t={t} algorithms"), via_spectrum, via_scan));
            }
            let bound = decomposition_table(ctx, t, DEFAULT_SPECTRUM_CAP)?.bound_total();
            if via_spectrum > bound {
                v.push(Violation::new(p, format!("t={t}"), format!("<= {bound}"), via_spectrum));
            }
        }
        Ok((ctx.divisors().len() as u64, v))
    })?;
    Ok(suite("order-sum-decomposition", scope(limit), r))
}

// The direct J_d scan with its upper limit pushed one too far.
fn faulty_jd(ctx: &PrimeContext, d: u64) -> Result<u64> {
    let p = ctx.p();
    let target = inv_mod(pow_mod(d, d, p), p)?;
    let modulus = Modulus::new(p);
    Ok((1..=(p - 1) / d + 1).filter(|&z| modulus.pow(z, d) == target).count() as u64)
}

pub fn dual_algorithms(limit: u64, fault: Option<Fault>) -> Result<SuiteResult> {
    let r = per_prime(&primes_in_range(3, limit), |ctx| {
        let p = ctx.p();
        let mut v = Vec::new();
        let mut checked = 0;
        for &d in ctx.divisors() {
            let direct = match fault {
                Some(Fault::JdOffByOne) => faulty_jd(ctx, d)?,
                None => count_jd(ctx, d, CountAlgorithm::DirectScan)?,
            };
            let walk = count_jd(ctx, d, CountAlgorithm::SubgroupWalk)?;
            checked += 1;
            if direct != walk {
                v.push(Violation::new(p, format!("J_d d={d}"), walk, direct));
            }
        }
        for &t in ctx.divisors() {
            for d in ctx.divisors_of_cofactor(t)? {
                let direct = count_td(ctx, d, t, CountAlgorithm::DirectScan)?;
                let walk = count_td(ctx, d, t, CountAlgorithm::SubgroupWalk)?;
                checked += 1;
                if direct != walk {
                    v.push(Violation::new(p, format!("T_d d={d} t={t}"), walk, direct));
                }
            }
        }
        Ok((checked, v))
    })?;
    Ok(suite("dual-algorithms", scope(limit), r))
}

pub fn gauss_bound(limit: u64) -> Result<SuiteResult> {
    let r = per_prime(&primes_in_range(3, limit), |ctx| {
        let p = ctx.p();
        let bound = (p as f64).sqrt() + 1e-6;
        let mut v = Vec::new();
        for &d in ctx.divisors() {
            let h = ctx.subgroup(d)?;
            let stat = max_subgroup_sum(&h, ctx, SearchMode::Exhaustive, DEFAULT_WORK_CAP)?;
            if stat.max_magnitude > bound {
                v.push(Violation::new(p, format!("d={d}"), format!("<= {bound}"), stat.max_magnitude));
            }
        }
        Ok((ctx.divisors().len() as u64, v))
    })?;
    Ok(suite("gauss-bound", scope(limit), r))
}

pub fn parseval(limit: u64) -> Result<SuiteResult> {
    let r = per_prime(&primes_in_range(3, limit), |ctx| {
        let p = ctx.p();
        let mut v = Vec::new();
        for &d in ctx.divisors() {
            let total = parseval_total(&ctx.subgroup(d)?);
            let exact = (p * d) as f64;
            if (total - exact).abs() > 1e-9 * exact {
                v.push(Violation::new(p, format!("d={d}"), exact, total));
            }
        }
        Ok((ctx.divisors().len() as u64, v))
    })?;
    Ok(suite("parseval", scope(limit), r))
}

/// Random intervals `[U, V]` with `V - U` in `[0, 2p)`; seeded per prime.
pub fn random_intervals(p: u64, count: usize) -> Vec<(i64, i64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(p);
    let p = p as i64;
    (0..count)
        .map(|_| {
            let u = rng.gen_range(-p..=p);
            (u, u + rng.gen_range(0..2 * p))
        })
        .collect()
}

pub fn interval_l1(limit: u64, pairs: usize) -> Result<SuiteResult> {
    let r = per_prime(&primes_in_range(3, limit), |ctx| {
        let p = ctx.p();
        let bound = p as f64 * (1.0 + (p as f64).ln());
        let mut v = Vec::new();
        for (u, w) in random_intervals(p, pairs) {
            let l1 = interval_l1_sum(u, w, p)?;
            if l1.sum > bound {
                v.push(Violation::new(p, format!("U={u} V={w}"), format!("<= {bound}"), l1.sum));
            }
        }
        Ok((pairs as u64, v))
    })?;
    Ok(suite("interval-l1", format!("p <= {limit}, {pairs}/p"), r))
}

/// `a^x = 1` implies `a^gcd(x, p-1) = 1`, exhaustively.
pub fn order_lemma(limit: u64) -> SuiteResult {
    let primes = primes_in_range(3, limit);
    let parts: Vec<(u64, Vec<Violation>)> = primes
        .par_iter()
        .map(|&p| {
            let modulus = Modulus::new(p);
            let mut checked = 0;
            let mut v = Vec::new();
            for x in 1..p {
                let g = gcd(x, p - 1);
                for a in 1..p {
                    if modulus.pow(a, x) == 1 {
                        checked += 1;
                        let got = modulus.pow(a, g);
                        if got != 1 {
                            v.push(Violation::new(p, format!("a={a} x={x}"), 1, got));
                        }
                    }
                }
            }
            (checked, v)
        })
        .collect();
    let (checked, violations) = parts.into_iter().fold((0, Vec::new()), |(n, mut all), (c, v)| {
        all.extend(v);
        (n + c, all)
    });
    suite("order-lemma", scope(limit), (checked, violations))
}

/// `#{x <= p : x^n = mu} <= gcd(n, p-1)` for `n <= 50` and every `mu != 0`.
pub fn root_count_bound(limit: u64) -> SuiteResult {
    let primes = primes_in_range(3, limit);
    let parts: Vec<(u64, Vec<Violation>)> = primes
        .par_iter()
        .map(|&p| {
            let modulus = Modulus::new(p);
            let mut checked = 0;
            let mut v = Vec::new();
            for n in 1..=50 {
                let mut hist = vec![0u64; p as usize];
                // x = p is included; it only ever hits mu = 0
                for x in 1..=p {
                    hist[modulus.pow(x, n) as usize] += 1;
                }
                let cap = gcd(n, p - 1);
                for (mu, &c) in hist.iter().enumerate().skip(1) {
                    checked += 1;
                    if c > cap {
                        v.push(Violation::new(p, format!("n={n} mu={mu}"), format!("<= {cap}"), c));
                    }
                }
            }
            (checked, v)
        })
        .collect();
    let (checked, violations) = parts.into_iter().fold((0, Vec::new()), |(n, mut all), (c, v)| {
        all.extend(v);
        (n + c, all)
    });
    suite("root-count-bound", scope(limit), (checked, violations))
}

/// `image_size >= floor((p-1)/2)`. Informational: the bound has small
/// counterexamples (p = 19 is the first).
pub fn image_lower(primes: &[u64]) -> Result<SuiteResult> {
    let r = per_prime(primes, |ctx| {
        let p = ctx.p();
        let size = Spectrum::compute(ctx, DEFAULT_SPECTRUM_CAP)?.image_size();
        let lower = image_lower_bound(p);
        let v = if size >= lower {
            vec![]
        } else {
            vec![Violation::new(p, "image", format!(">= {lower}"), size)]
        };
        Ok((1, v))
    })?;
    let top = primes.last().copied().unwrap_or(0);
    let mut s = suite("image-lower-bound", format!("{} primes <= {top}", primes.len()), r);
    s.informational = true;
    Ok(s)
}
