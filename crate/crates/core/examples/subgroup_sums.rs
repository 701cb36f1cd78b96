//! Largest exponential sum over each multiplicative subgroup, next to the
//! classical, Shteinikov and Shkredov curves.
//!
//!     cargo run --release --example subgroup_sums -- 7681

use selfpower::expsum::{max_subgroup_sum, parseval_total, SearchMode, DEFAULT_WORK_CAP};
use selfpower::numtheory::PrimeContext;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(7681);
    let ctx = PrimeContext::new(p)?;
    println!(
        "{:>6} {:>12} {:>7} {:>10} {:>12} {:>12} {:>14}",
        "d", "max |S|", "a", "sqrt p", "shteinikov", "shkredov", "parseval/pd"
    );
    for &d in ctx.divisors() {
        let h = ctx.subgroup(d)?;
        let stat = max_subgroup_sum(&h, &ctx, SearchMode::Exhaustive, DEFAULT_WORK_CAP)?;
        let c = &stat.curves;
        let flag = |ok: bool| if ok { ' ' } else { '*' };
        println!(
            "{d:>6} {:>12.6} {:>7} {:>10.4} {:>11.4}{} {:>11.4}{} {:>14.12}",
            stat.max_magnitude,
            stat.a_max,
            c.classical.value,
            c.shteinikov.value,
            flag(c.shteinikov.in_hypothesis),
            c.shkredov.value,
            flag(c.shkredov.in_hypothesis),
            parseval_total(&h) / (p * d) as f64,
        );
    }
    println!("* curve evaluated outside the range of d it is stated for");
    Ok(())
}
