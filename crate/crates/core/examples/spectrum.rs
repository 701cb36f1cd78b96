//! Fiber sizes of x -> x^x mod p.
//!
//!     cargo run --release --example spectrum -- 1009

use selfpower::congruence::{Spectrum, DEFAULT_SPECTRUM_CAP};
use selfpower::numtheory::PrimeContext;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1009);
    let ctx = PrimeContext::new(p)?;
    let spectrum = Spectrum::compute(&ctx, DEFAULT_SPECTRUM_CAP)?;

    println!("p = {p}, p - 1 = {:?}", ctx.factors());
    println!("J(p;1)     = {}", spectrum.count(1));
    println!("I(p)       = {}", spectrum.collisions());
    println!("image size = {} (floor((p-1)/2) = {})", spectrum.image_size(), (p - 1) / 2);

    let largest = (1..p).max_by_key(|&l| (spectrum.count(l), std::cmp::Reverse(l))).unwrap();
    println!("largest fiber: lambda = {largest}, J = {}", spectrum.count(largest));

    println!("\nby order of lambda:");
    for (t, total) in spectrum.by_order() {
        println!("  ord {t:>6}: {total}");
    }
    Ok(())
}
