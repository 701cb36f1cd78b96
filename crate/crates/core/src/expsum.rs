//! Exponential sums `S(a, H_d) = sum_{h in H_d} e_p(a h)` over multiplicative
//! subgroups, their maxima over the frequency `a`, the Parseval total, and the
//! L1 norm of interval sums `sum_a |sum_{z=U}^{V} e_p(a z)|`.
//!
//! Angles are always formed from the reduced product `(a h) mod p`, folded
//! into `(-p/2, p/2]`, so `e_p(-k)` is bit-for-bit the conjugate of `e_p(k)`.
//! All accumulation is compensated (Neumaier) and runs in a fixed order.

use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{bound_curves, BoundCurves};
use crate::error::{Error, Result};
use crate::modmath::{mul_mod, pow_mod};
use crate::numtheory::{PrimeContext, Subgroup};

/// Default cap on character evaluations for an exhaustive maximum.
pub const DEFAULT_WORK_CAP: u64 = 10_000_000_000;

/// Frequencies `1..=SAMPLED_PREFIX` are always included in sampled mode.
pub const SAMPLED_PREFIX: u64 = 1000;

const TABLE_LIMIT: u64 = 1 << 20;
const CHUNK: u64 = 1 << 12;

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// A complex value with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexSum {
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
}

impl ComplexSum {
    fn new(re: f64, im: f64) -> Self {
        ComplexSum {
            re,
            im,
            magnitude: re.hypot(im),
        }
    }
}

/// `e_p(k) = exp(2 pi i k / p)` for reduced `k`, tabulated when `p` is small.
#[derive(Debug, Clone)]
pub struct AdditiveCharacter {
    p: u64,
    table: Option<Vec<(f64, f64)>>,
}

impl AdditiveCharacter {
    pub fn new(p: u64) -> Self {
        let table = (p <= TABLE_LIMIT).then(|| (0..p).map(|k| Self::evaluate(k, p)).collect());
        AdditiveCharacter { p, table }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `(cos, sin)` of `2 pi k / p` for `0 <= k < p`.
    #[inline]
    pub fn at(&self, k: u64) -> (f64, f64) {
        match &self.table {
            Some(t) => t[k as usize],
            None => Self::evaluate(k, self.p),
        }
    }

    fn evaluate(k: u64, p: u64) -> (f64, f64) {
        let signed = if 2 * k > p { k as f64 - p as f64 } else { k as f64 };
        let (s, c) = (TAU * signed / p as f64).sin_cos();
        (c, s)
    }

    /// `S(a, H)`, summing over `H` in ascending order.
    pub fn subgroup_sum(&self, a: u64, h: &Subgroup) -> ComplexSum {
        let p = self.p;
        let a = a % p;
        let mut re = CompensatedSum::default();
        let mut im = CompensatedSum::default();
        for &x in h.elements() {
            let (c, s) = self.at(mul_mod(a, x, p));
            re.add(c);
            im.add(s);
        }
        ComplexSum::new(re.value(), im.value())
    }
}

/// `S(a, H)` for a single frequency.
pub fn subgroup_sum(a: u64, h: &Subgroup) -> ComplexSum {
    let p = h.p();
    let a = a % p;
    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    for &x in h.elements() {
        let (c, s) = AdditiveCharacter::evaluate(mul_mod(a, x, p), p);
        re.add(c);
        im.add(s);
    }
    ComplexSum::new(re.value(), im.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SearchMode {
    /// Every nonzero frequency, one representative per coset of `H`.
    Exhaustive,
    /// `1..=min(1000, p - 1)` plus `samples` uniformly random nonzero frequencies.
    Sampled { samples: usize, seed: u64 },
}

/// Largest `|S(a, H_d)|` over nonzero `a`, with the reference curves at `(p, d)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgroupSumStat {
    pub p: u64,
    pub d: u64,
    /// Smallest frequency whose magnitude is within `1e-9` (relative) of the maximum.
    pub a_max: u64,
    pub max_magnitude: f64,
    pub curves: BoundCurves,
    pub exact: bool,
    pub sample_size: u64,
}

/// Character evaluations an exhaustive maximum costs: two passes over `p - 1`
/// frequencies grouped by coset.
pub fn exhaustive_work(p: u64) -> u64 {
    2 * (p - 1)
}

/// Maximum of `|S(a, H)|` over `a != 0`.
///
/// `S(a, H)` depends only on the coset `aH`, so the exhaustive mode evaluates
/// one sum per coset `g^k H` and attributes it to the coset's smallest element.
/// The result does not depend on the number of worker threads.
pub fn max_subgroup_sum(
    h: &Subgroup,
    ctx: &PrimeContext,
    mode: SearchMode,
    work_cap: u64,
) -> Result<SubgroupSumStat> {
    let p = ctx.p();
    let d = h.order();
    if h.p() != p {
        return Err(Error::InvalidArgument(format!(
            "subgroup is modulo {} but the context is modulo {p}",
            h.p()
        )));
    }
    let chi = AdditiveCharacter::new(p);
    let (a_max, max_magnitude, sample_size) = match mode {
        SearchMode::Exhaustive => {
            let work = exhaustive_work(p);
            if work > work_cap {
                return Err(Error::WorkCapExceeded { work, cap: work_cap });
            }
            let cosets = (p - 1) / d;
            let g = ctx.generator();
            let coset = |k: u64| {
                let rep = pow_mod(g, k, p);
                let smallest = h.elements().iter().map(|&x| mul_mod(rep, x, p)).min().unwrap();
                (smallest, chi.subgroup_sum(rep, h).magnitude)
            };
            let best = (0..cosets)
                .into_par_iter()
                .map(|k| coset(k).1)
                .reduce(|| 0.0, f64::max);
            let floor = best - tie_tolerance(best);
            let a_max = (0..cosets)
                .into_par_iter()
                .map(coset)
                .filter(|&(_, m)| m >= floor)
                .map(|(a, _)| a)
                .min()
                .unwrap();
            (a_max, best, p - 1)
        }
        SearchMode::Sampled { samples, seed } => {
            let mut freqs: BTreeSet<u64> = (1..=SAMPLED_PREFIX.min(p - 1)).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                freqs.insert(rng.gen_range(1..p));
            }
            let values: Vec<(u64, f64)> = freqs
                .par_iter()
                .map(|&a| (a, chi.subgroup_sum(a, h).magnitude))
                .collect();
            let best = values.iter().map(|&(_, m)| m).fold(0.0, f64::max);
            let floor = best - tie_tolerance(best);
            let a_max = values.iter().find(|&&(_, m)| m >= floor).unwrap().0;
            (a_max, best, values.len() as u64)
        }
    };
    Ok(SubgroupSumStat {
        p,
        d,
        a_max,
        max_magnitude,
        curves: bound_curves(p, d, None),
        exact: mode == SearchMode::Exhaustive,
        sample_size,
    })
}

fn tie_tolerance(x: f64) -> f64 {
    1e-9 * x.max(1.0)
}

/// `sum_{a=0}^{p-1} |S(a, H)|^2`, which equals `p |H|` by orthogonality.
pub fn parseval_total(h: &Subgroup) -> f64 {
    let p = h.p();
    let chi = AdditiveCharacter::new(p);
    let chunks = p.div_ceil(CHUNK);
    let partials: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = CompensatedSum::default();
            for a in c * CHUNK..((c + 1) * CHUNK).min(p) {
                let s = chi.subgroup_sum(a, h);
                acc.add(s.re * s.re + s.im * s.im);
            }
            acc.value()
        })
        .collect();
    let mut total = CompensatedSum::default();
    partials.into_iter().for_each(|x| total.add(x));
    total.value()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalL1 {
    pub p: u64,
    pub u: i64,
    pub v: i64,
    pub sum: f64,
    /// `sum / p`.
    pub ratio_to_p: f64,
    /// `sum / (p (1 + ln p))`; at most 1.
    pub ratio_to_log_bound: f64,
}

/// `sum_{a=1}^{p-1} |sum_{z=U}^{V} e_p(a z)|` via the closed form
/// `|sin(pi a L / p) / sin(pi a / p)|` with `L = V - U + 1`.
///
/// `U == V` is accepted and gives `p - 1`.
pub fn interval_l1_sum(u: i64, v: i64, p: u64) -> Result<IntervalL1> {
    if v < u || (v - u) as u64 >= 1 << 31 {
        return Err(Error::InvalidArgument(format!(
            "interval [{u}, {v}] must satisfy U <= V and V - U < 2^31"
        )));
    }
    if p < 2 {
        return Err(Error::ModulusOutOfRange { p });
    }
    let len = ((v - u) as u64 + 1) % p;
    let pf = p as f64;
    let mut acc = CompensatedSum::default();
    for a in 1..p {
        let r = mul_mod(a, len, p);
        let num = (PI * r as f64 / pf).sin().abs();
        let den = (PI * a as f64 / pf).sin();
        acc.add(num / den);
    }
    let sum = acc.value();
    Ok(IntervalL1 {
        p,
        u,
        v,
        sum,
        ratio_to_p: sum / pf,
        ratio_to_log_bound: sum / (pf * (1.0 + pf.ln())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::primes_in_range;

    // Direct complex summation, independent of the table and of the closed form.
    fn direct(a: u64, elems: &[u64], p: u64) -> (f64, f64) {
        elems.iter().fold((0.0, 0.0), |(re, im), &h| {
            let ang = TAU * ((a as u128 * h as u128) % p as u128) as f64 / p as f64;
            (re + ang.cos(), im + ang.sin())
        })
    }

    #[test]
    fn zero_frequency_is_exactly_the_order() {
        let ctx = PrimeContext::new(211).unwrap();
        for &d in ctx.divisors() {
            let s = subgroup_sum(0, &ctx.subgroup(d).unwrap());
            assert_eq!(s.re, d as f64);
            assert_eq!(s.im, 0.0);
        }
    }

    #[test]
    fn complete_sum_is_minus_one() {
        let ctx = PrimeContext::new(101).unwrap();
        let full = ctx.subgroup(100).unwrap();
        for a in 1..101 {
            let s = subgroup_sum(a, &full);
            assert!((s.re + 1.0).abs() < 1e-12 && s.im.abs() < 1e-12, "a={a} {s:?}");
        }
    }

    #[test]
    fn quadratic_residue_sum_at_seven() {
        let ctx = PrimeContext::new(7).unwrap();
        let h3 = ctx.subgroup(3).unwrap();
        let s = subgroup_sum(1, &h3);
        assert!((s.magnitude - 2f64.sqrt()).abs() < 1e-12);
        assert!((s.re + 0.5).abs() < 1e-12);
        assert!((s.im - 7f64.sqrt() / 2.0).abs() < 1e-12);
        let (re, im) = direct(1, h3.elements(), 7);
        assert!((re - s.re).abs() < 1e-12 && (im - s.im).abs() < 1e-12);
    }

    #[test]
    fn table_and_direct_evaluation_agree_bitwise() {
        let ctx = PrimeContext::new(1009).unwrap();
        let chi = AdditiveCharacter::new(1009);
        for &d in ctx.divisors() {
            let h = ctx.subgroup(d).unwrap();
            for a in [0, 1, 5, 500, 1008] {
                assert_eq!(chi.subgroup_sum(a, &h), subgroup_sum(a, &h));
            }
        }
    }

    #[test]
    fn magnitude_is_consistent() {
        let ctx = PrimeContext::new(331).unwrap();
        let h = ctx.subgroup(15).unwrap();
        for a in 0..331 {
            let s = subgroup_sum(a, &h);
            let sq = s.re * s.re + s.im * s.im;
            assert!((s.magnitude * s.magnitude - sq).abs() <= 1e-9 * sq.max(1e-300));
        }
    }

    #[test]
    fn max_examples() {
        let ctx = PrimeContext::new(7).unwrap();
        let full = max_subgroup_sum(&ctx.subgroup(6).unwrap(), &ctx, SearchMode::Exhaustive, DEFAULT_WORK_CAP).unwrap();
        assert!((full.max_magnitude - 1.0).abs() < 1e-12);
        let h3 = max_subgroup_sum(&ctx.subgroup(3).unwrap(), &ctx, SearchMode::Exhaustive, DEFAULT_WORK_CAP).unwrap();
        assert!((h3.max_magnitude - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(h3.a_max, 1);
        assert!(h3.exact);
        let h1 = max_subgroup_sum(&ctx.subgroup(1).unwrap(), &ctx, SearchMode::Exhaustive, DEFAULT_WORK_CAP).unwrap();
        assert!((h1.max_magnitude - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exhaustive_max_matches_naive_scan() {
        for p in primes_in_range(3, 400) {
            let ctx = PrimeContext::new(p).unwrap();
            for &d in ctx.divisors() {
                let h = ctx.subgroup(d).unwrap();
                let stat = max_subgroup_sum(&h, &ctx, SearchMode::Exhaustive, DEFAULT_WORK_CAP).unwrap();
                let mags: Vec<f64> = (1..p)
                    .map(|a| {
                        let (re, im) = direct(a, h.elements(), p);
                        re.hypot(im)
                    })
                    .collect();
                let naive = mags.iter().cloned().fold(0.0, f64::max);
                assert!((stat.max_magnitude - naive).abs() < 1e-9, "p={p} d={d}");
                let a = stat.a_max;
                assert!((mags[a as usize - 1] - naive).abs() < 1e-9);
                // nothing smaller attains the maximum
                assert!(mags[..a as usize - 1].iter().all(|&m| m < naive - 1e-9));
            }
        }
    }

    #[test]
    fn work_cap_is_enforced() {
        let ctx = PrimeContext::new(1009).unwrap();
        let h = ctx.subgroup(7).unwrap();
        let err = max_subgroup_sum(&h, &ctx, SearchMode::Exhaustive, 100).unwrap_err();
        assert!(err.to_string().contains("use sampled"));
        let sampled = max_subgroup_sum(&h, &ctx, SearchMode::Sampled { samples: 10, seed: 1 }, 100).unwrap();
        assert!(!sampled.exact);
    }

    #[test]
    fn sampled_is_a_lower_bound_and_reproducible() {
        let ctx = PrimeContext::new(10_007).unwrap();
        let h = ctx.subgroup(5003).unwrap();
        let exact = max_subgroup_sum(&h, &ctx, SearchMode::Exhaustive, DEFAULT_WORK_CAP).unwrap();
        let mode = SearchMode::Sampled { samples: 50, seed: 42 };
        let s1 = max_subgroup_sum(&h, &ctx, mode, DEFAULT_WORK_CAP).unwrap();
        let s2 = max_subgroup_sum(&h, &ctx, mode, DEFAULT_WORK_CAP).unwrap();
        assert_eq!(s1, s2);
        assert!(s1.max_magnitude <= exact.max_magnitude + 1e-9);
        assert!(s1.sample_size >= 1000);
    }

    #[test]
    fn parseval_examples() {
        let ctx = PrimeContext::new(7).unwrap();
        assert!((parseval_total(&ctx.subgroup(1).unwrap()) - 7.0).abs() < 1e-9);
        assert!((parseval_total(&ctx.subgroup(3).unwrap()) - 21.0).abs() < 1e-9);
        let ctx = PrimeContext::new(5).unwrap();
        assert!((parseval_total(&ctx.subgroup(2).unwrap()) - 10.0).abs() < 1e-9);
    }

    #[test]
    fn conjugate_symmetry_and_coset_invariance() {
        for p in primes_in_range(3, 500) {
            let ctx = PrimeContext::new(p).unwrap();
            let chi = AdditiveCharacter::new(p);
            for &d in ctx.divisors() {
                let h = ctx.subgroup(d).unwrap();
                for a in 1..p {
                    let s = chi.subgroup_sum(a, &h).magnitude;
                    assert!((s - chi.subgroup_sum(p - a, &h).magnitude).abs() < 1e-9);
                }
                for a in [1, 2, p / 2, p - 1] {
                    let s = chi.subgroup_sum(a, &h).magnitude;
                    for &x in h.elements() {
                        let shifted = chi.subgroup_sum(mul_mod(a, x, p), &h).magnitude;
                        assert!((s - shifted).abs() < 1e-9, "p={p} d={d} a={a} h={x}");
                    }
                }
            }
        }
    }

    fn l1_direct(u: i64, v: i64, p: u64) -> f64 {
        (1..p)
            .map(|a| {
                let (re, im) = (u..=v).fold((0.0, 0.0), |(re, im), z| {
                    let k = (a as i128 * z as i128).rem_euclid(p as i128) as f64;
                    let ang = TAU * k / p as f64;
                    (re + ang.cos(), im + ang.sin())
                });
                f64::hypot(re, im)
            })
            .sum()
    }

    #[test]
    fn interval_l1_examples() {
        let r = interval_l1_sum(1, 3, 7).unwrap();
        assert!((r.sum - 7.207_750_943_219_35).abs() < 1e-9);
        assert!((r.sum - l1_direct(1, 3, 7)).abs() < 1e-9);
        assert_eq!(interval_l1_sum(5, 5, 7).unwrap().sum, 6.0);
        assert!(interval_l1_sum(1, 7, 7).unwrap().sum.abs() < 1e-9);
        assert!(interval_l1_sum(-3, 3, 7).unwrap().sum.abs() < 1e-9);
        assert!(interval_l1_sum(3, 2, 7).is_err());
    }

    #[test]
    fn interval_l1_matches_direct_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in [11u64, 101, 211, 997] {
            for _ in 0..10 {
                let u = rng.gen_range(-500..500);
                let v = u + rng.gen_range(0..300);
                let closed = interval_l1_sum(u, v, p).unwrap().sum;
                assert!((closed - l1_direct(u, v, p)).abs() < 1e-8 * closed.max(1.0), "p={p} [{u},{v}]");
            }
        }
    }
}
