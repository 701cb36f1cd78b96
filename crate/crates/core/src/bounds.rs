//! Reference curves for the upper bounds on the self-power congruence and on
//! subgroup exponential sums.
//!
//! Every exponent lives in [`exponents`] as an exact rational so the curves and
//! the range hypotheses read from a single table.

use serde::Serialize;

/// A rational exponent `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Exponent {
    pub num: i32,
    pub den: u32,
}

impl Exponent {
    pub const fn new(num: i32, den: u32) -> Self {
        Exponent { num, den }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `base^(num/den)` for `base > 0`, evaluated as `exp(ln(base) * num / den)`.
    pub fn pow(self, base: f64) -> f64 {
        (base.ln() * self.num as f64 / self.den as f64).exp()
    }
}

pub mod exponents {
    use super::Exponent;

    /// `J(p;1)` growth.
    pub const FIXED_POINT_COUNT: Exponent = Exponent::new(27, 82);
    /// Collision count `I(p)` growth.
    pub const COLLISIONS: Exponent = Exponent::new(23, 12);
    /// `p` and `d` exponents of the small-subgroup exponential sum bound.
    pub const SHTEINIKOV_P: Exponent = Exponent::new(1, 18);
    pub const SHTEINIKOV_D: Exponent = Exponent::new(101, 126);
    /// Subgroups must satisfy `d < p^(1/2)` for the Shteinikov curve.
    pub const SHTEINIKOV_RANGE: Exponent = Exponent::new(1, 2);
    pub const SHKREDOV_P: Exponent = Exponent::new(1, 6);
    pub const SHKREDOV_D: Exponent = Exponent::new(1, 2);
    /// Subgroups must satisfy `d < p^(2/3)` for the Shkredov curve.
    pub const SHKREDOV_RANGE: Exponent = Exponent::new(2, 3);
    pub const CLASSICAL: Exponent = Exponent::new(1, 2);
    /// Order-stratified sum `t + p^(1/3) t^(1/2)`, interesting for `t < p^(1/3)`.
    pub const ORDER_SUM_P: Exponent = Exponent::new(1, 3);
    pub const ORDER_SUM_T: Exponent = Exponent::new(1, 2);
    pub const ORDER_SUM_RANGE: Exponent = Exponent::new(1, 3);
    /// Older order-stratified bound `t + p^(1/2)`.
    pub const BBS_SUM_P: Exponent = Exponent::new(1, 2);
    /// Pointwise bound `J(p;lambda) <~ p t^(-1/12)`.
    pub const BBS_POINTWISE_T: Exponent = Exponent::new(-1, 12);
}

/// `x < p^e`, decided exactly in integers: `x^den < p^num` for `e = num/den > 0`.
pub fn below_power(x: u64, p: u64, e: Exponent) -> bool {
    assert!(e.num > 0, "below_power needs a positive exponent");
    let lhs = (x as u128).checked_pow(e.den);
    let rhs = (p as u128).checked_pow(e.num as u32);
    match (lhs, rhs) {
        (Some(l), Some(r)) => l < r,
        _ => (x as f64).ln() * (e.den as f64) < (p as f64).ln() * (e.num as f64),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Curve {
    pub value: f64,
    /// Whether the parameters satisfy the hypothesis under which the bound is
    /// stated. Out-of-range curves are still evaluated.
    pub in_hypothesis: bool,
}

impl Curve {
    fn always(value: f64) -> Self {
        Curve {
            value,
            in_hypothesis: true,
        }
    }
}

/// All curve values at one `(p, d, t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCurves {
    pub p: u64,
    pub d: u64,
    pub t: Option<u64>,
    pub classical: Curve,
    pub shteinikov: Curve,
    pub shkredov: Curve,
    pub bbs_sum: Option<Curve>,
    pub bbs_pointwise: Option<Curve>,
}

pub fn bound_curves(p: u64, d: u64, t: Option<u64>) -> BoundCurves {
    use exponents::*;
    let pf = p as f64;
    let df = d as f64;
    BoundCurves {
        p,
        d,
        t,
        classical: Curve::always(CLASSICAL.pow(pf)),
        shteinikov: Curve {
            value: SHTEINIKOV_P.pow(pf) * SHTEINIKOV_D.pow(df),
            in_hypothesis: below_power(d, p, SHTEINIKOV_RANGE),
        },
        shkredov: Curve {
            value: SHKREDOV_P.pow(pf) * SHKREDOV_D.pow(df),
            in_hypothesis: below_power(d, p, SHKREDOV_RANGE),
        },
        bbs_sum: t.map(|t| Curve::always(t as f64 + BBS_SUM_P.pow(pf))),
        bbs_pointwise: t.map(|t| Curve::always(pf * BBS_POINTWISE_T.pow(t as f64))),
    }
}

/// `t + p^(1/3) t^(1/2)`.
pub fn order_sum_curve(p: u64, t: u64) -> Curve {
    use exponents::*;
    Curve {
        value: t as f64 + ORDER_SUM_P.pow(p as f64) * ORDER_SUM_T.pow(t as f64),
        in_hypothesis: below_power(t, p, ORDER_SUM_RANGE),
    }
}

/// Moment curve `(1 + M / p^(1/k)) n^(1/k)` for the power congruence
/// `x^n = lambda, x <= M`.
pub fn moment_curve(p: u64, n: u64, m: u64, k: u32) -> f64 {
    let inv_k = Exponent::new(1, k);
    (1.0 + m as f64 / inv_k.pow(p as f64)) * inv_k.pow(n as f64)
}

/// `3p/4 + p^(1/2)`: the image-size upper curve with the `p^(o(1))` factor dropped.
pub fn image_upper_curve(p: u64) -> f64 {
    0.75 * p as f64 + exponents::CLASSICAL.pow(p as f64)
}

/// `floor((p - 1) / 2)`: the unconditional image-size lower bound.
pub fn image_lower_bound(p: u64) -> u64 {
    (p - 1) / 2
}
