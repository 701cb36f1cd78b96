//! Counting solutions of the self-power congruence `x^x = lambda (mod p)`,
//! `1 <= x <= p - 1`, and of the auxiliary congruences its analysis reduces to.
//!
//! Every structured counter has a second, independent algorithm so the two can
//! be checked against each other:
//!
//! * `J(p;lambda)` from one scan or from the full [`Spectrum`];
//! * order-stratified sums from the spectrum or from a direct scan over `x`;
//! * `J_d` and `T_d` by scanning `z` or by walking the subgroup `H_{dt}`;
//! * power-congruence counts by scanning or by enumerating all `n`-th roots.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::moment_curve;
use crate::error::{Error, Result};
use crate::modmath::{inv_mod, mul_mod, pow_mod, Modulus};
use crate::numtheory::{gcd, order_with, PrimeContext, SUBGROUP_CAP};

/// Largest `p` for which a full spectrum is materialized by default.
pub const DEFAULT_SPECTRUM_CAP: u64 = 10_000_000;

/// Moment orders `k` for which the power-congruence curve is reported.
pub const DEFAULT_MOMENT_KS: [u32; 2] = [2, 3];

/// Fiber sizes of the self-power map: `counts[lambda] = J(p;lambda)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spectrum {
    p: u64,
    counts: Vec<u64>,
    image_size: u64,
    collisions: u64,
    modulus: Modulus,
    factors: Vec<(u64, u32)>,
    // filled on first use; most callers never need it
    by_order: OnceLock<BTreeMap<u64, u64>>,
}

impl Spectrum {
    /// One pass over `x = 1..p-1`. Refuses `p > cap`.
    pub fn compute(ctx: &PrimeContext, cap: u64) -> Result<Self> {
        let p = ctx.p();
        if p > cap {
            return Err(Error::CapExceeded {
                what: "spectrum",
                requested: p,
                cap,
                flag: "--cap-spectrum",
            });
        }
        let modulus = Modulus::new(p);
        let hist: Vec<AtomicU64> = (0..p).map(|_| AtomicU64::new(0)).collect();
        (1..p).into_par_iter().for_each(|x| {
            hist[modulus.pow(x, x) as usize].fetch_add(1, Ordering::Relaxed);
        });
        let counts: Vec<u64> = hist.into_iter().map(AtomicU64::into_inner).collect();

        let mut image_size = 0;
        let mut collisions = 0;
        for &c in &counts[1..] {
            if c > 0 {
                image_size += 1;
                collisions += c * c;
            }
        }
        Ok(Spectrum {
            p,
            counts,
            image_size,
            collisions,
            modulus: ctx.modulus(),
            factors: ctx.factors().to_vec(),
            by_order: OnceLock::new(),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Indexed by residue; entry 0 is always 0.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `J(p;lambda)`, or 0 outside `[1, p-1]`.
    pub fn count(&self, lambda: u64) -> u64 {
        self.counts.get(lambda as usize).copied().unwrap_or(0)
    }

    /// Number of distinct values of `x^x`.
    pub fn image_size(&self) -> u64 {
        self.image_size
    }

    /// `I(p) = sum_lambda J(p;lambda)^2`, the number of pairs with `x^x = y^y`.
    pub fn collisions(&self) -> u64 {
        self.collisions
    }

    /// `t -> sum of J(p;lambda) over lambda of order t`; only attained orders appear.
    pub fn by_order(&self) -> &BTreeMap<u64, u64> {
        self.by_order.get_or_init(|| {
            // one order computation per attained lambda
            let mut by_order = BTreeMap::new();
            for (lambda, &c) in self.counts.iter().enumerate().skip(1) {
                if c > 0 {
                    *by_order
                        .entry(order_with(&self.modulus, self.p, &self.factors, lambda as u64))
                        .or_insert(0) += c;
                }
            }
            by_order
        })
    }

    pub fn order_sum(&self, t: u64) -> u64 {
        self.by_order().get(&t).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// `J(p;lambda)` by a direct scan, without materializing the spectrum.
pub fn count_j(ctx: &PrimeContext, lambda: u64) -> Result<u64> {
    ctx.require_unit("lambda", lambda)?;
    let p = ctx.p();
    let modulus = Modulus::new(p);
    Ok((1..p).filter(|&x| modulus.pow(x, x) == lambda).count() as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrderSumAlgorithm {
    ViaSpectrum,
    ViaXScan,
}

/// `sum of J(p;lambda) over lambda with ord(lambda) = t`.
pub fn order_stratified_sum(ctx: &PrimeContext, t: u64, algorithm: OrderSumAlgorithm) -> Result<u64> {
    ctx.require_divisor("t", t)?;
    let p = ctx.p();
    match algorithm {
        OrderSumAlgorithm::ViaSpectrum => Ok(Spectrum::compute(ctx, DEFAULT_SPECTRUM_CAP)?.order_sum(t)),
        OrderSumAlgorithm::ViaXScan => {
            let modulus = Modulus::new(p);
            Ok((1..p)
                .filter(|&x| {
                    let lambda = modulus.pow(x, x);
                    // x^(tx) = 1 first; it is necessary for order exactly t
                    modulus.pow(lambda, t) == 1 && ctx.order_unchecked(lambda) == t
                })
                .count() as u64)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CountAlgorithm {
    /// Scan `z = 1..(p-1)/d` and test the power congruence.
    DirectScan,
    /// Walk the subgroup `H_{dt}` and test `h d^(-1) mod p <= (p-1)/d`.
    SubgroupWalk,
}

/// `J_d`: solutions of `z^d = (d^d)^(-1)` with `1 <= z <= (p-1)/d`.
pub fn count_jd(ctx: &PrimeContext, d: u64, algorithm: CountAlgorithm) -> Result<u64> {
    ctx.require_divisor("d", d)?;
    count_scaled_roots(ctx, d, d, algorithm)
}

/// `T_d`: solutions of `z^(dt) = (d^(dt))^(-1)` with `1 <= z <= (p-1)/d`,
/// for `t | p - 1` and `d | (p-1)/t`.
pub fn count_td(ctx: &PrimeContext, d: u64, t: u64, algorithm: CountAlgorithm) -> Result<u64> {
    ctx.require_divisor("t", t)?;
    let cofactor = (ctx.p() - 1) / t;
    if d == 0 || cofactor % d != 0 {
        return Err(Error::NotDivisor {
            what: "d",
            value: d,
            of: cofactor,
        });
    }
    count_scaled_roots(ctx, d, d * t, algorithm)
}

// #{z <= (p-1)/d : (d z)^e = 1}, where d | e | p - 1.
fn count_scaled_roots(ctx: &PrimeContext, d: u64, e: u64, algorithm: CountAlgorithm) -> Result<u64> {
    let p = ctx.p();
    let limit = (p - 1) / d;
    match algorithm {
        CountAlgorithm::DirectScan => {
            let target = inv_mod(pow_mod(d, e, p), p)?;
            let modulus = Modulus::new(p);
            Ok((1..=limit).filter(|&z| modulus.pow(z, e) == target).count() as u64)
        }
        CountAlgorithm::SubgroupWalk => {
            let d_inv = inv_mod(d, p)?;
            let h = ctx.subgroup(e)?;
            Ok(h.elements()
                .iter()
                .filter(|&&x| mul_mod(x, d_inv, p) <= limit)
                .count() as u64)
        }
    }
}

fn cheaper_algorithm(p: u64, d: u64, e: u64) -> CountAlgorithm {
    if e <= (p - 1) / d && e <= SUBGROUP_CAP {
        CountAlgorithm::SubgroupWalk
    } else {
        CountAlgorithm::DirectScan
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DecompositionRow {
    pub d: u64,
    /// Solutions of `x^(tx) = 1` with `gcd(x, (p-1)/t) = d`; for `t = 1` this is `J'_d`.
    pub primary: u64,
    /// `J_d` for `t = 1`, `T_d` otherwise.
    pub bound: u64,
}

/// The gcd-class decomposition of the solutions of `x^(tx) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionTable {
    pub p: u64,
    pub t: u64,
    pub rows: Vec<DecompositionRow>,
}

impl DecompositionTable {
    pub fn primary_total(&self) -> u64 {
        self.rows.iter().map(|r| r.primary).sum()
    }

    pub fn bound_total(&self) -> u64 {
        self.rows.iter().map(|r| r.bound).sum()
    }

    /// Rows with `primary > bound`.
    pub fn violations(&self) -> impl Iterator<Item = &DecompositionRow> {
        self.rows.iter().filter(|r| r.primary > r.bound)
    }
}

/// Rows `(d, J'_d, J_d)` for every `d | p - 1`.
pub fn gcd_class_counts(ctx: &PrimeContext, cap: u64) -> Result<DecompositionTable> {
    decomposition_table(ctx, 1, cap)
}

/// Rows `(d, #{x : x^(tx) = 1, gcd(x, (p-1)/t) = d}, T_d)` for every `d | (p-1)/t`.
pub fn decomposition_table(ctx: &PrimeContext, t: u64, cap: u64) -> Result<DecompositionTable> {
    let divisors = ctx.divisors_of_cofactor(t)?;
    let p = ctx.p();
    if p > cap {
        return Err(Error::CapExceeded {
            what: "decomposition scan",
            requested: p,
            cap,
            flag: "--cap-spectrum",
        });
    }
    let cofactor = (p - 1) / t;
    let modulus = Modulus::new(p);
    let mut primary: BTreeMap<u64, u64> = divisors.iter().map(|&d| (d, 0)).collect();
    for x in 1..p {
        if modulus.pow(modulus.pow(x, x), t) == 1 {
            *primary.get_mut(&gcd(x, cofactor)).expect("gcd divides the cofactor") += 1;
        }
    }
    let rows = divisors
        .iter()
        .map(|&d| {
            let bound = count_scaled_roots(ctx, d, d * t, cheaper_algorithm(p, d, d * t))?;
            Ok(DecompositionRow {
                d,
                primary: primary[&d],
                bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecompositionTable { p, t, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PowerAlgorithm {
    Scan,
    /// One root from the discrete logarithm times the subgroup `H_{gcd(n, p-1)}`.
    RootEnumeration,
    /// Root enumeration when `gcd(n, p-1) < M`, scan otherwise.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentCurve {
    pub k: u32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerCongruenceCount {
    pub p: u64,
    pub n: u64,
    pub lambda: u64,
    pub m: u64,
    pub count: u64,
    pub algorithm: PowerAlgorithm,
    pub curves: Vec<MomentCurve>,
}

/// Solutions of `x^n = lambda` with `1 <= x <= M`, plus the moment curve for
/// each `k` in `ks`.
pub fn count_power_congruence(
    ctx: &PrimeContext,
    n: u64,
    lambda: u64,
    m: u64,
    algorithm: PowerAlgorithm,
    ks: &[u32],
) -> Result<PowerCongruenceCount> {
    ctx.require_unit("lambda", lambda)?;
    let p = ctx.p();
    if n == 0 {
        return Err(Error::OutOfRange {
            what: "n",
            value: 0,
            min: 1,
            max: u64::MAX,
        });
    }
    if !(1..=p).contains(&m) {
        return Err(Error::OutOfRange {
            what: "M",
            value: m,
            min: 1,
            max: p,
        });
    }
    let g = gcd(n, p - 1);
    let algorithm = match algorithm {
        PowerAlgorithm::Auto if g < m && g <= SUBGROUP_CAP => PowerAlgorithm::RootEnumeration,
        PowerAlgorithm::Auto => PowerAlgorithm::Scan,
        other => other,
    };
    let count = match algorithm {
        PowerAlgorithm::Scan => {
            let modulus = Modulus::new(p);
            (1..=m.min(p - 1)).filter(|&x| modulus.pow(x, n) == lambda).count() as u64
        }
        _ => nth_roots(ctx, n, lambda)?.into_iter().filter(|&x| x <= m).count() as u64,
    };
    Ok(PowerCongruenceCount {
        p,
        n,
        lambda,
        m,
        count,
        algorithm,
        curves: ks
            .iter()
            .map(|&k| MomentCurve {
                k,
                value: moment_curve(p, n, m, k),
            })
            .collect(),
    })
}

/// All `x` in `[1, p-1]` with `x^n = lambda`, ascending.
pub fn nth_roots(ctx: &PrimeContext, n: u64, lambda: u64) -> Result<Vec<u64>> {
    ctx.require_unit("lambda", lambda)?;
    let p = ctx.p();
    let order = p - 1;
    let g = gcd(n, order);
    if pow_mod(lambda, order / g, p) != 1 {
        return Ok(Vec::new());
    }
    let index = ctx.discrete_log(lambda)?;
    let reduced_order = order / g;
    // n k = index (mod p - 1), solved in the quotient by g
    let k = if reduced_order == 1 {
        0
    } else {
        let n_inv = inv_mod((n / g) % reduced_order, reduced_order)?;
        ((index / g) as u128 * n_inv as u128 % reduced_order as u128) as u64
    };
    let root = pow_mod(ctx.generator(), k, p);
    let mut roots: Vec<u64> = ctx
        .subgroup(g)?
        .elements()
        .iter()
        .map(|&h| mul_mod(root, h, p))
        .collect();
    roots.sort_unstable();
    Ok(roots)
}
