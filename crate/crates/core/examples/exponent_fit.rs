//! Empirical growth exponents of J(p;1) and I(p) over a prime range.
//!
//!     cargo run --release --example exponent_fit -- 1000 20000

use selfpower::congruence::{Spectrum, DEFAULT_SPECTRUM_CAP};
use selfpower::numtheory::{primes_in_range, PrimeContext};
use selfpower::reports::exponent_fit;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let lo: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1000);
    let hi: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20_000);
    let mut fixed = Vec::new();
    let mut collisions = Vec::new();
    for p in primes_in_range(lo, hi) {
        let s = Spectrum::compute(&PrimeContext::new(p)?, DEFAULT_SPECTRUM_CAP)?;
        fixed.push((p, s.count(1) as f64));
        collisions.push((p, s.collisions() as f64));
    }
    for (name, points, reference) in [("J(p;1)", &fixed, 27.0 / 82.0), ("I(p)", &collisions, 23.0 / 12.0)] {
        let fit = exponent_fit(points)?;
        println!(
            "{name:<7} slope {:.4}  (reference exponent {reference:.4})  r^2 {:.3}  points {}",
            fit.slope,
            fit.r2,
            fit.points.len()
        );
    }
    Ok(())
}
