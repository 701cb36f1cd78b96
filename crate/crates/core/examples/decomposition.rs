//! Splitting the solutions of x^(tx) = 1 by gcd(x, (p-1)/t) and comparing each
//! class with the scaled root count that bounds it.
//!
//!     cargo run --release --example decomposition -- 2311 1

use selfpower::congruence::{decomposition_table, order_stratified_sum, OrderSumAlgorithm, DEFAULT_SPECTRUM_CAP};
use selfpower::numtheory::PrimeContext;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let p: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2311);
    let t: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    let ctx = PrimeContext::new(p)?;
    let table = decomposition_table(&ctx, t, DEFAULT_SPECTRUM_CAP)?;

    println!("p = {p}, t = {t}");
    println!("{:>8} {:>10} {:>10}", "d", "class", "bound");
    for row in &table.rows {
        let mark = if row.primary > row.bound { "  <-- violated" } else { "" };
        println!("{:>8} {:>10} {:>10}{mark}", row.d, row.primary, row.bound);
    }
    println!("total {} <= {}", table.primary_total(), table.bound_total());

    let stratum = order_stratified_sum(&ctx, t, OrderSumAlgorithm::ViaXScan)?;
    println!("lambdas of order exactly {t} are hit {stratum} times");
    Ok(())
}
