//! Observed counts next to the bound curves they are compared with.
//!
//! Rows carry no pass/fail: every bound here hides a `p^(o(1))` factor or an
//! unspecified constant. The exact inequalities live in [`crate::verify`].

use std::fmt;

use serde::Serialize;

use crate::bounds::{bound_curves, exponents, moment_curve, order_sum_curve, Curve};
use crate::congruence::{
    count_j, count_jd, count_power_congruence, count_td, order_stratified_sum, CountAlgorithm,
    OrderSumAlgorithm, PowerAlgorithm, Spectrum, DEFAULT_MOMENT_KS,
};
use crate::emit::Table;
use crate::error::{Error, Result};
use crate::expsum::{interval_l1_sum, max_subgroup_sum, SearchMode};
use crate::numtheory::PrimeContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Quantity {
    J1,
    OrderSumT,
    I,
    Jd,
    Td,
    PowerCongruence,
    ExpsumMax,
    L1Sum,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::J1 => "J1",
            Quantity::OrderSumT => "ORDER_SUM_T",
            Quantity::I => "I",
            Quantity::Jd => "JD",
            Quantity::Td => "TD",
            Quantity::PowerCongruence => "LEMMA1",
            Quantity::ExpsumMax => "EXPSUM_MAX",
            Quantity::L1Sum => "L1SUM",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Params {
    pub t: Option<u64>,
    pub d: Option<u64>,
    pub n: Option<u64>,
    pub m: Option<u64>,
    pub k: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReportRow {
    pub p: u64,
    pub quantity: Quantity,
    pub params: Params,
    pub observed: f64,
    pub bound_name: String,
    pub bound_value: f64,
    pub ratio: f64,
    pub in_hypothesis: bool,
}

impl BoundReportRow {
    pub fn new(
        p: u64,
        quantity: Quantity,
        params: Params,
        observed: f64,
        bound_name: impl Into<String>,
        bound: Curve,
    ) -> Self {
        assert!(bound.value > 0.0, "bound curves are positive");
        BoundReportRow {
            p,
            quantity,
            params,
            observed,
            bound_name: bound_name.into(),
            bound_value: bound.value,
            ratio: observed / bound.value,
            in_hypothesis: bound.in_hypothesis,
        }
    }
}

/// Which theorem-level quantity to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Report {
    /// `J(p;1)` against `p^(27/82)`.
    FixedPoints,
    /// The order-`t` stratum against `t + p^(1/3) t^(1/2)` and `t + p^(1/2)`.
    OrderSum { t: u64 },
    /// `I(p)` against `p^(23/12)`.
    Collisions,
    /// `J_d` against the trivial, second-moment and small-subgroup curves.
    Jd { d: u64 },
    /// `T_d` against the trivial and Fourier curves.
    Td { d: u64, t: u64 },
    /// `#{x <= M : x^n = lambda}` against the moment curves.
    PowerCongruence { n: u64, m: u64, lambda: u64 },
    /// `sum_a |sum_{z=U}^{V} e_p(az)|` against `p` and `p (1 + ln p)`.
    IntervalL1 { u: i64, v: i64 },
}

fn always(value: f64) -> Curve {
    Curve {
        value,
        in_hypothesis: true,
    }
}

pub fn theorem_report(ctx: &PrimeContext, which: Report, spectrum_cap: u64) -> Result<Vec<BoundReportRow>> {
    let p = ctx.p();
    let pf = p as f64;
    let rows = match which {
        Report::FixedPoints => {
            let observed = count_j(ctx, 1)? as f64;
            vec![BoundReportRow::new(
                p,
                Quantity::J1,
                Params::default(),
                observed,
                "p^(27/82)",
                always(exponents::FIXED_POINT_COUNT.pow(pf)),
            )]
        }
        Report::OrderSum { t } => {
            let observed = order_stratified_sum(ctx, t, OrderSumAlgorithm::ViaXScan)? as f64;
            let params = Params {
                t: Some(t),
                ..Params::default()
            };
            let older = bound_curves(p, 1, Some(t)).bbs_sum.expect("t given");
            vec![
                BoundReportRow::new(p, Quantity::OrderSumT, params, observed, "t+p^(1/3)t^(1/2)", order_sum_curve(p, t)),
                BoundReportRow::new(p, Quantity::OrderSumT, params, observed, "t+p^(1/2)", older),
            ]
        }
        Report::Collisions => {
            let observed = Spectrum::compute(ctx, spectrum_cap)?.collisions() as f64;
            vec![BoundReportRow::new(
                p,
                Quantity::I,
                Params::default(),
                observed,
                "p^(23/12)",
                always(exponents::COLLISIONS.pow(pf)),
            )]
        }
        Report::Jd { d } => {
            let observed = count_jd(ctx, d, CountAlgorithm::DirectScan)? as f64;
            let params = Params {
                d: Some(d),
                ..Params::default()
            };
            let curves = bound_curves(p, d, None);
            let df = d as f64;
            vec![
                BoundReportRow::new(p, Quantity::Jd, params, observed, "p/d", always(pf / df)),
                BoundReportRow::new(
                    p,
                    Quantity::Jd,
                    params,
                    observed,
                    "d^(1/2)+(p/d)^(1/2)",
                    always(df.sqrt() + (pf / df).sqrt()),
                ),
                BoundReportRow::new(p, Quantity::Jd, params, observed, "p^(1/18)d^(101/126)", curves.shteinikov),
            ]
        }
        Report::Td { d, t } => {
            let observed = count_td(ctx, d, t, CountAlgorithm::DirectScan)? as f64;
            let params = Params {
                t: Some(t),
                d: Some(d),
                ..Params::default()
            };
            let fourier = bound_curves(p, d * t, None).shkredov;
            vec![
                BoundReportRow::new(p, Quantity::Td, params, observed, "p/d", always(pf / d as f64)),
                BoundReportRow::new(
                    p,
                    Quantity::Td,
                    params,
                    observed,
                    "t+p^(1/6)(dt)^(1/2)",
                    Curve {
                        value: t as f64 + fourier.value,
                        in_hypothesis: fourier.in_hypothesis,
                    },
                ),
            ]
        }
        Report::PowerCongruence { n, m, lambda } => {
            let r = count_power_congruence(ctx, n, lambda, m, PowerAlgorithm::Auto, &DEFAULT_MOMENT_KS)?;
            r.curves
                .iter()
                .map(|c| {
                    BoundReportRow::new(
                        p,
                        Quantity::PowerCongruence,
                        Params {
                            n: Some(n),
                            m: Some(m),
                            k: Some(c.k),
                            ..Params::default()
                        },
                        r.count as f64,
                        format!("(1+M/p^(1/{k}))n^(1/{k})", k = c.k),
                        always(moment_curve(p, n, m, c.k)),
                    )
                })
                .collect()
        }
        Report::IntervalL1 { u, v } => {
            let r = interval_l1_sum(u, v, p)?;
            vec![
                BoundReportRow::new(p, Quantity::L1Sum, Params::default(), r.sum, "p", always(pf)),
                BoundReportRow::new(p, Quantity::L1Sum, Params::default(), r.sum, "p(1+ln p)", always(pf * (1.0 + pf.ln()))),
            ]
        }
    };
    Ok(rows)
}

/// Largest subgroup sum for `H_d` against the classical, Shteinikov and
/// Shkredov curves.
pub fn expsum_report(ctx: &PrimeContext, d: u64, mode: SearchMode, work_cap: u64) -> Result<Vec<BoundReportRow>> {
    let h = ctx.subgroup(d)?;
    let stat = max_subgroup_sum(&h, ctx, mode, work_cap)?;
    let params = Params {
        d: Some(d),
        ..Params::default()
    };
    let p = ctx.p();
    Ok(vec![
        BoundReportRow::new(p, Quantity::ExpsumMax, params, stat.max_magnitude, "p^(1/2)", stat.curves.classical),
        BoundReportRow::new(p, Quantity::ExpsumMax, params, stat.max_magnitude, "p^(1/18)d^(101/126)", stat.curves.shteinikov),
        BoundReportRow::new(p, Quantity::ExpsumMax, params, stat.max_magnitude, "p^(1/6)d^(1/2)", stat.curves.shkredov),
    ])
}

pub const REPORT_COLUMNS: &[&str] = &[
    "p", "quantity", "t", "d", "n", "M", "k", "observed", "bound_name", "bound_value", "ratio", "in_hypothesis",
];

/// Report rows as an emission table; absent parameters are empty cells.
pub fn report_table(rows: &[BoundReportRow]) -> Table {
    let mut table = Table::new(REPORT_COLUMNS);
    for r in rows {
        table.push(vec![
            r.p.into(),
            r.quantity.name().into(),
            r.params.t.into(),
            r.params.d.into(),
            r.params.n.into(),
            r.params.m.into(),
            r.params.k.map(u64::from).into(),
            r.observed.into(),
            r.bound_name.as_str().into(),
            r.bound_value.into(),
            r.ratio.into(),
            r.in_hypothesis.into(),
        ]);
    }
    table
}

/// Least-squares fit of `ln value = slope * ln p + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub points: Vec<(u64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Points dropped because their value was not positive.
    pub excluded: usize,
}

pub fn exponent_fit(points: &[(u64, f64)]) -> Result<ExponentFit> {
    let usable: Vec<(u64, f64)> = points.iter().copied().filter(|&(p, v)| v > 0.0 && p > 0).collect();
    let excluded = points.len() - usable.len();
    let distinct = {
        let mut ps: Vec<u64> = usable.iter().map(|&(p, _)| p).collect();
        ps.sort_unstable();
        ps.dedup();
        ps.len()
    };
    if distinct < 2 {
        return Err(Error::InsufficientPoints { usable: distinct });
    }
    let n = usable.len() as f64;
    let xs: Vec<f64> = usable.iter().map(|&(p, _)| (p as f64).ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|&(_, v)| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(ExponentFit {
        points: usable,
        slope,
        intercept,
        r2,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::DEFAULT_SPECTRUM_CAP;
    use crate::expsum::DEFAULT_WORK_CAP;

    fn ctx7() -> PrimeContext {
        PrimeContext::new(7).unwrap()
    }

    #[test]
    fn fixed_points_at_seven() {
        let rows = theorem_report(&ctx7(), Report::FixedPoints, DEFAULT_SPECTRUM_CAP).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].observed, 2.0);
        assert!((rows[0].bound_value - 1.898).abs() < 1e-3);
        assert!((rows[0].ratio - 1.054).abs() < 1e-3);
    }

    #[test]
    fn order_sum_at_seven() {
        let rows = theorem_report(&ctx7(), Report::OrderSum { t: 3 }, DEFAULT_SPECTRUM_CAP).unwrap();
        assert_eq!(rows[0].observed, 2.0);
        assert!((rows[0].bound_value - 6.313).abs() < 1e-3);
        assert!(!rows[0].in_hypothesis);
        assert!((rows[1].bound_value - (3.0 + 7f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn collisions_at_seven() {
        let rows = theorem_report(&ctx7(), Report::Collisions, DEFAULT_SPECTRUM_CAP).unwrap();
        assert_eq!(rows[0].observed, 10.0);
        assert!((rows[0].bound_value - 41.665).abs() < 1e-3);
    }

    #[test]
    fn expsum_rows_at_seven() {
        let ctx = ctx7();
        let full = expsum_report(&ctx, 6, SearchMode::Exhaustive, DEFAULT_WORK_CAP).unwrap();
        assert!((full[0].observed - 1.0).abs() < 1e-12);
        assert!((full[0].ratio - 0.378).abs() < 1e-3);
        let h3 = expsum_report(&ctx, 3, SearchMode::Exhaustive, DEFAULT_WORK_CAP).unwrap();
        assert!((h3[0].ratio - 0.535).abs() < 1e-3);
        assert!(!h3[1].in_hypothesis);
        let h1 = expsum_report(&ctx, 1, SearchMode::Exhaustive, DEFAULT_WORK_CAP).unwrap();
        assert!((h1[0].ratio - 1.0 / 7f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn other_reports() {
        let ctx = PrimeContext::new(101).unwrap();
        let jd = theorem_report(&ctx, Report::Jd { d: 5 }, DEFAULT_SPECTRUM_CAP).unwrap();
        assert_eq!(jd.len(), 3);
        assert!(jd[2].in_hypothesis);
        let td = theorem_report(&ctx, Report::Td { d: 5, t: 4 }, DEFAULT_SPECTRUM_CAP).unwrap();
        assert_eq!(td[0].params.t, Some(4));
        let l1 = theorem_report(&ctx, Report::PowerCongruence { n: 10, m: 50, lambda: 1 }, DEFAULT_SPECTRUM_CAP).unwrap();
        assert_eq!(l1.iter().map(|r| r.params.k.unwrap()).collect::<Vec<_>>(), vec![2, 3]);
        let iv = theorem_report(&ctx, Report::IntervalL1 { u: 1, v: 20 }, DEFAULT_SPECTRUM_CAP).unwrap();
        assert!(iv[1].ratio <= 1.0);
        assert!(theorem_report(&ctx, Report::Td { d: 3, t: 4 }, DEFAULT_SPECTRUM_CAP).is_err());
    }

    #[test]
    fn ratios_are_consistent() {
        let ctx = PrimeContext::new(1009).unwrap();
        let mut rows = Vec::new();
        for which in [Report::FixedPoints, Report::Collisions, Report::OrderSum { t: 8 }, Report::Jd { d: 4 }] {
            rows.extend(theorem_report(&ctx, which, DEFAULT_SPECTRUM_CAP).unwrap());
        }
        for r in rows {
            assert!(r.bound_value > 0.0);
            assert!((r.observed / r.bound_value - r.ratio).abs() <= 1e-12 * r.ratio.abs());
        }
    }

    #[test]
    fn fit_recovers_exact_power_laws() {
        let ps = [101u64, 1009, 10007, 100_003];
        for alpha in [0.0, 1.0 / 3.0, 27.0 / 82.0, 0.5, 23.0 / 12.0] {
            let pts: Vec<(u64, f64)> = ps.iter().map(|&p| (p, (p as f64).powf(alpha))).collect();
            let fit = exponent_fit(&pts).unwrap();
            assert!((fit.slope - alpha).abs() < 1e-9, "alpha={alpha} slope={}", fit.slope);
            let scaled: Vec<(u64, f64)> = pts.iter().map(|&(p, v)| (p, 7.5 * v)).collect();
            let fit2 = exponent_fit(&scaled).unwrap();
            assert!((fit2.slope - fit.slope).abs() < 1e-9);
            assert!((fit2.intercept - fit.intercept - 7.5f64.ln()).abs() < 1e-9);
        }
        let sqrt: Vec<(u64, f64)> = [101u64, 1009, 10007].iter().map(|&p| (p, (p as f64).sqrt())).collect();
        assert!((exponent_fit(&sqrt).unwrap().slope - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fit_excludes_zeros_and_needs_two_points() {
        let fit = exponent_fit(&[(11, 0.0), (101, 10.0), (1009, 100.0)]).unwrap();
        assert_eq!(fit.excluded, 1);
        assert!(exponent_fit(&[(11, 1.0)]).is_err());
        assert!(exponent_fit(&[(11, 1.0), (11, 2.0)]).is_err());
        assert!(exponent_fit(&[(11, 0.0), (13, 2.0)]).is_err());
    }
}
