//! Exact arithmetic modulo an odd prime below 2^62.
//!
//! Residues are plain `u64` values in `[0, p)`. Products go through a 128-bit
//! intermediate, or through 64 bits when `p` fits in 32 bits, so no product of
//! two residues can overflow.

use crate::error::{Error, Result};

/// Exclusive upper bound on supported moduli.
pub const MODULUS_LIMIT: u64 = 1 << 62;

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    if p <= u32::MAX as u64 {
        a * b % p
    } else {
        ((a as u128 * b as u128) % p as u128) as u64
    }
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

/// `base^exponent mod p` by square-and-multiply. `exponent == 0` gives 1
/// (or 0 when `p == 1`).
pub fn pow_mod(base: u64, exponent: u64, p: u64) -> u64 {
    if p == 1 {
        return 0;
    }
    if p <= u32::MAX as u64 {
        pow_mod_narrow(base % p, exponent, p)
    } else {
        pow_mod_wide(base % p, exponent, p)
    }
}

#[inline]
fn pow_mod_narrow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

#[inline]
fn pow_mod_wide(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// A fixed odd modulus with a Montgomery fast path for `p < 2^31`.
///
/// Hot loops that exponentiate many bases modulo the same prime go through
/// this instead of [`pow_mod`]; results are identical.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulus {
    Montgomery(Montgomery32),
    Plain(u64),
}

impl Modulus {
    pub fn new(p: u64) -> Self {
        if p % 2 == 1 && p < 1 << 31 && p > 1 {
            Modulus::Montgomery(Montgomery32::new(p as u32))
        } else {
            Modulus::Plain(p)
        }
    }

    #[inline]
    pub fn pow(&self, base: u64, exponent: u64) -> u64 {
        match self {
            Modulus::Montgomery(m) => m.pow(base, exponent),
            Modulus::Plain(p) => pow_mod(base, exponent, *p),
        }
    }
}

/// Montgomery arithmetic with `R = 2^32` for an odd modulus below `2^31`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Montgomery32 {
    p: u32,
    // -p^(-1) mod 2^32
    neg_inv: u32,
    // R^2 mod p
    r2: u32,
}

impl Montgomery32 {
    pub fn new(p: u32) -> Self {
        assert!(p % 2 == 1 && p < 1 << 31, "Montgomery32 needs an odd modulus below 2^31");
        // Newton iteration for p^(-1) mod 2^32
        let mut inv = p;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u32.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = (1u64 << 32) % p as u64;
        Montgomery32 {
            p,
            neg_inv: inv.wrapping_neg(),
            r2: (r * r % p as u64) as u32,
        }
    }

    #[inline]
    fn redc(&self, t: u64) -> u32 {
        let m = (t as u32).wrapping_mul(self.neg_inv);
        let u = ((t + m as u64 * self.p as u64) >> 32) as u32;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.redc(a as u64 * b as u64)
    }

    #[inline]
    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut x = self.mul((base % self.p as u64) as u32, self.r2);
        let mut acc = self.mul(1, self.r2);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, x);
            }
            x = self.mul(x, x);
            exp >>= 1;
        }
        self.redc(acc as u64) as u64
    }
}

/// The inverse `m*` in `[1, p)`, by the extended Euclidean algorithm.
///
/// Works for any modulus coprime to `m`, prime or not.
pub fn inv_mod(m: u64, p: u64) -> Result<u64> {
    let m = m % p;
    if m == 0 {
        return Err(Error::NoInverse { m, p });
    }
    let (mut r0, mut r1) = (p as i128, m as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return Err(Error::NoInverse { m, p });
    }
    Ok(s0.rem_euclid(p as i128) as u64)
}

/// `x^x mod p` for `1 <= x <= p - 1`.
///
/// The exponent is the integer `x` itself, not `x mod (p - 1)`.
pub fn self_power(x: u64, p: u64) -> Result<u64> {
    if x == 0 || x >= p {
        return Err(Error::OutOfRange {
            what: "x",
            value: x,
            min: 1,
            max: p.saturating_sub(1),
        });
    }
    Ok(pow_mod(x, x, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_pow(base: u64, exp: u64, p: u64) -> u64 {
        let mut acc = 1 % p;
        for _ in 0..exp {
            acc = acc * (base % p) % p;
        }
        acc
    }

    fn small_primes(limit: u64) -> Vec<u64> {
        (3..=limit)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect()
    }

    #[test]
    fn pow_mod_examples() {
        assert_eq!(pow_mod(3, 0, 7), 1);
        assert_eq!(pow_mod(2, 3, 7), 1);
        for x in 0..7 {
            assert_eq!(pow_mod(x, 1, 7), x);
        }
    }

    #[test]
    fn pow_mod_wide_modulus() {
        let p = (1u64 << 61) - 1;
        assert_eq!(pow_mod(3, p - 1, p), 1);
        assert_eq!(pow_mod(p - 1, 2, p), 1);
        let big = 4_611_686_018_427_387_847; // largest prime below 2^62
        assert_eq!(pow_mod(5, big - 1, big), 1);
        assert_eq!(mul_mod(big - 1, big - 1, big), 1);
    }

    #[test]
    fn inv_mod_examples() {
        assert_eq!(inv_mod(1, 7).unwrap(), 1);
        assert_eq!(inv_mod(6, 7).unwrap(), 6);
        assert_eq!(inv_mod(4, 7).unwrap(), 2);
        assert_eq!(inv_mod(0, 7), Err(Error::NoInverse { m: 0, p: 7 }));
        assert_eq!(inv_mod(14, 7), Err(Error::NoInverse { m: 0, p: 7 }));
    }

    #[test]
    fn inv_mod_is_an_involution() {
        for p in small_primes(1000) {
            for m in 1..p {
                let inv = inv_mod(m, p).unwrap();
                assert_eq!(m * inv % p, 1);
                assert_eq!(inv_mod(inv, p).unwrap(), m);
            }
        }
    }

    #[test]
    fn self_power_examples() {
        assert_eq!(self_power(1, 7).unwrap(), 1);
        assert_eq!(self_power(6, 7).unwrap(), 1);
        assert_eq!(self_power(3, 7).unwrap(), 6);
        assert!(self_power(0, 7).is_err());
        assert!(self_power(7, 7).is_err());
    }

    #[test]
    fn montgomery_exhaustive_small() {
        for p in small_primes(120) {
            let m = Modulus::new(p);
            for b in 0..p {
                for e in 0..2 * p {
                    assert_eq!(m.pow(b, e), naive_pow(b, e, p));
                }
            }
        }
    }

    #[test]
    fn self_power_matches_repeated_multiplication() {
        for p in small_primes(10_000).into_iter().step_by(7) {
            for x in 1..p {
                assert_eq!(self_power(x, p).unwrap(), naive_pow(x, x, p), "p={p} x={x}");
            }
            assert_eq!(self_power(p - 1, p).unwrap(), 1);
        }
    }

    proptest! {
        #[test]
        fn pow_mod_is_multiplicative_in_exponent(
            base in 0u64..1_000_000_007,
            e1 in 0u64..1_000_000,
            e2 in 0u64..1_000_000,
        ) {
            let p = 1_000_000_007;
            prop_assert_eq!(
                pow_mod(base, e1 + e2, p),
                mul_mod(pow_mod(base, e1, p), pow_mod(base, e2, p), p)
            );
        }

        #[test]
        fn montgomery_matches_pow_mod(
            idx in 0usize..6,
            base in 0u64..u64::MAX,
            exp in 0u64..u64::MAX,
        ) {
            let p = [3u64, 7, 65_537, 1_000_003, 2_147_483_647, 4_294_967_291][idx];
            prop_assert_eq!(Modulus::new(p).pow(base, exp), pow_mod(base, exp, p));
        }

        #[test]
        fn narrow_and_wide_paths_agree(base in 0u64..4_294_967_291, exp in 0u64..u64::MAX) {
            let p = 4_294_967_291; // largest prime below 2^32
            prop_assert_eq!(pow_mod_narrow(base, exp, p), pow_mod_wide(base, exp, p));
        }
    }
}
