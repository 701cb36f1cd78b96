//! Structure of the multiplicative group of a prime field: primality,
//! factorization of `p - 1`, orders, primitive roots, subgroups and indices.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::modmath::{inv_mod, mul_mod, pow_mod, Modulus, MODULUS_LIMIT};

/// Seed used for Pollard rho unless the caller overrides it.
pub const DEFAULT_FACTOR_SEED: u64 = 0x5e1f_9017;

/// Largest subgroup order that will be materialized.
pub const SUBGROUP_CAP: u64 = 100_000_000;

const TRIAL_DIVISION_LIMIT: u64 = 1 << 10;

// Deterministic for all n < 2^64 (Jim Sinclair's base set).
const MILLER_RABIN_BASES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Deterministic primality test for the full 64-bit range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &base in &MILLER_RABIN_BASES {
        let a = base % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Prime factorization with nondecreasing primes and their multiplicities.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    factorize_with_seed(n, DEFAULT_FACTOR_SEED)
}

/// Like [`factorize`], with an explicit seed for the rho iterations. The
/// result does not depend on the seed; only the running time may.
pub fn factorize_with_seed(n: u64, seed: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factorize: n must be positive");
    let mut primes = Vec::new();
    let mut rest = n;
    let mut q = 2u64;
    while q <= TRIAL_DIVISION_LIMIT && q * q <= rest {
        while rest % q == 0 {
            primes.push(q);
            rest /= q;
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        split_into(rest, &mut rng, &mut primes);
    }
    primes.sort_unstable();

    let mut out: Vec<(u64, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    out
}

fn split_into(n: u64, rng: &mut ChaCha8Rng, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let r = integer_sqrt(n);
    if r * r == n {
        split_into(r, rng, out);
        split_into(r, rng, out);
        return;
    }
    let f = loop {
        if let Some(f) = pollard_brent(n, rng) {
            break f;
        }
    };
    split_into(f, rng, out);
    split_into(n / f, rng, out);
}

// Brent's variant of Pollard rho; returns a nontrivial factor or None when the
// chosen polynomial cycles without splitting n.
fn pollard_brent(n: u64, rng: &mut ChaCha8Rng) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    let c = rng.gen_range(1..n);
    let step = |y: u64| (mul_mod(y, y, n) + c) % n;
    const BATCH: u64 = 128;

    let mut y = rng.gen_range(0..n);
    let (mut x, mut ys) = (y, y);
    let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = step(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = step(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd(q, n);
            k += BATCH;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = step(ys);
            g = gcd(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

pub fn integer_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

/// All divisors of the number with the given factorization, ascending.
pub fn divisors_of(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut divs = vec![1u64];
    for &(q, e) in factors {
        let len = divs.len();
        let mut power = 1u64;
        for _ in 0..e {
            power *= q;
            for i in 0..len {
                divs.push(divs[i] * power);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// A prime `p` together with the structure of `F_p^*`: the factorization of
/// `p - 1`, its divisors, and the smallest primitive root.
#[derive(Debug, Clone)]
pub struct PrimeContext {
    p: u64,
    factors: Vec<(u64, u32)>,
    divisors: Vec<u64>,
    generator: u64,
    modulus: Modulus,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        Self::with_seed(p, DEFAULT_FACTOR_SEED)
    }

    pub fn with_seed(p: u64, seed: u64) -> Result<Self> {
        if !(3..MODULUS_LIMIT).contains(&p) {
            return Err(Error::ModulusOutOfRange { p });
        }
        if !is_prime(p) {
            let factor = factorize_with_seed(p, seed)[0].0;
            return Err(Error::NotPrime { p, factor });
        }
        let factors = factorize_with_seed(p - 1, seed);
        let divisors = divisors_of(&factors);
        let generator = (2..p)
            .find(|&g| factors.iter().all(|&(q, _)| pow_mod(g, (p - 1) / q, p) != 1))
            .expect("a prime field always has a primitive root");
        Ok(PrimeContext {
            p,
            factors,
            divisors,
            generator,
            modulus: Modulus::new(p),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Order of the multiplicative group, `p - 1`.
    pub fn group_order(&self) -> u64 {
        self.p - 1
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Sorted divisors of `p - 1`.
    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    /// The smallest primitive root modulo `p`.
    pub fn generator(&self) -> u64 {
        self.generator
    }

    pub fn divides_group_order(&self, d: u64) -> bool {
        d != 0 && (self.p - 1) % d == 0
    }

    pub(crate) fn require_divisor(&self, what: &'static str, d: u64) -> Result<()> {
        if self.divides_group_order(d) {
            Ok(())
        } else {
            Err(Error::NotDivisor {
                what,
                value: d,
                of: self.p - 1,
            })
        }
    }

    pub(crate) fn require_unit(&self, what: &'static str, a: u64) -> Result<()> {
        if (1..self.p).contains(&a) {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                what,
                value: a,
                min: 1,
                max: self.p - 1,
            })
        }
    }

    /// Divisors of `(p - 1) / t`, ascending.
    pub fn divisors_of_cofactor(&self, t: u64) -> Result<Vec<u64>> {
        self.require_divisor("t", t)?;
        let m = (self.p - 1) / t;
        Ok(self.divisors.iter().copied().filter(|&d| m % d == 0).collect())
    }

    /// The least `t >= 1` with `a^t = 1`, found by stripping prime factors
    /// from `p - 1`.
    pub fn multiplicative_order(&self, a: u64) -> Result<u64> {
        self.require_unit("a", a)?;
        Ok(self.order_unchecked(a))
    }

    pub(crate) fn order_unchecked(&self, a: u64) -> u64 {
        order_with(&self.modulus, self.p, &self.factors, a)
    }

    pub(crate) fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// The unique subgroup of order `d`, materialized and sorted.
    pub fn subgroup(&self, d: u64) -> Result<Subgroup> {
        self.require_divisor("d", d)?;
        if d > SUBGROUP_CAP {
            return Err(Error::CapExceeded {
                what: "subgroup materialization",
                requested: d,
                cap: SUBGROUP_CAP,
                flag: "a smaller divisor",
            });
        }
        let p = self.p;
        let step = pow_mod(self.generator, (p - 1) / d, p);
        let mut elements = Vec::with_capacity(d as usize);
        let mut h = 1u64;
        for _ in 0..d {
            elements.push(h);
            h = mul_mod(h, step, p);
        }
        elements.sort_unstable();
        Ok(Subgroup { p, elements })
    }

    /// The index of `a` with respect to the primitive root: the unique
    /// `k` in `[0, p - 1)` with `g^k = a`.
    ///
    /// Pohlig-Hellman over the factorization of `p - 1`, with baby-step
    /// giant-step inside each prime.
    pub fn discrete_log(&self, a: u64) -> Result<u64> {
        self.require_unit("a", a)?;
        let p = self.p;
        let n = p - 1;
        let g_inv = inv_mod(self.generator, p)?;
        let mut residue = 0u128;
        let mut modulus = 1u128;
        for &(q, e) in &self.factors {
            let qe = q.pow(e);
            // gamma generates the subgroup of order q.
            let gamma = pow_mod(self.generator, n / q, p);
            let mut x = 0u64;
            let mut q_k = 1u64;
            for k in 0..e {
                let shifted = mul_mod(a, pow_mod(g_inv, x, p), p);
                let h = pow_mod(shifted, n / (q_k * q), p);
                let digit = bsgs(gamma, h, q, p).expect("h lies in the subgroup generated by gamma");
                x += digit * q_k;
                if k + 1 < e {
                    q_k *= q;
                }
            }
            residue = crt_combine(residue, modulus, x as u128, qe as u128);
            modulus *= qe as u128;
        }
        Ok(residue as u64)
    }
}

// Solve gamma^k = h with 0 <= k < order.
fn bsgs(gamma: u64, h: u64, order: u64, p: u64) -> Option<u64> {
    if h == 1 {
        return Some(0);
    }
    let m = integer_sqrt(order - 1) + 1;
    let mut baby = HashMap::with_capacity(m as usize);
    let mut cur = 1u64;
    for j in 0..m {
        baby.entry(cur).or_insert(j);
        cur = mul_mod(cur, gamma, p);
    }
    let giant = inv_mod(pow_mod(gamma, m, p), p).ok()?;
    let mut y = h;
    for i in 0..m {
        if let Some(&j) = baby.get(&y) {
            return Some(i * m + j);
        }
        y = mul_mod(y, giant, p);
    }
    None
}

// x = r1 (mod m1), x = r2 (mod m2), gcd(m1, m2) = 1.
fn crt_combine(r1: u128, m1: u128, r2: u128, m2: u128) -> u128 {
    if m1 == 1 {
        return r2 % m2;
    }
    let inv = inv_mod((m1 % m2) as u64, m2 as u64).expect("coprime moduli") as u128;
    let diff = (r2 + m2 - r1 % m2) % m2;
    let k = diff * inv % m2;
    r1 + m1 * k
}

// Order of a unit given the factorization of p - 1.
pub(crate) fn order_with(modulus: &Modulus, p: u64, factors: &[(u64, u32)], a: u64) -> u64 {
    let mut t = p - 1;
    for &(q, e) in factors {
        for _ in 0..e {
            if modulus.pow(a, t / q) == 1 {
                t /= q;
            } else {
                break;
            }
        }
    }
    t
}

/// The subgroup `H_d` of `F_p^*` of order `d`, stored as sorted residues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    p: u64,
    elements: Vec<u64>,
}

impl Subgroup {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }
}

/// Primes in `[lo, hi]` by a segmented sieve of Eratosthenes.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let lo = lo.max(2);
    let root = integer_sqrt(hi);
    let mut base = vec![true; root as usize + 1];
    let mut small = Vec::new();
    for i in 2..=root as usize {
        if base[i] {
            small.push(i as u64);
            let mut j = i * i;
            while j <= root as usize {
                base[j] = false;
                j += i;
            }
        }
    }

    const SEGMENT: u64 = 1 << 16;
    let mut out = Vec::new();
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start.saturating_add(SEGMENT - 1));
        let mut mark = vec![true; (end - start + 1) as usize];
        for &q in &small {
            if q * q > end {
                break;
            }
            let first = (q * q).max(start.div_ceil(q) * q);
            let mut j = first;
            while j <= end {
                mark[(j - start) as usize] = false;
                j += q;
            }
        }
        out.extend(
            mark.iter()
                .enumerate()
                .filter(|&(_, &m)| m)
                .map(|(i, _)| start + i as u64),
        );
        if end == hi {
            break;
        }
        start = end + 1;
    }
    out
}
