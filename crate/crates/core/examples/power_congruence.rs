//! Counting x <= M with x^n = lambda by scanning and by enumerating roots.
//!
//!     cargo run --release --example power_congruence -- 100003 6 1 5000

use selfpower::congruence::{count_power_congruence, nth_roots, PowerAlgorithm, DEFAULT_MOMENT_KS};
use selfpower::numtheory::{gcd, PrimeContext};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let [p, n, lambda, m] = match args[..] {
        [p, n, l, m] => [p, n, l, m],
        _ => [100_003, 6, 1, 5000],
    };
    let ctx = PrimeContext::new(p)?;
    let scan = count_power_congruence(&ctx, n, lambda, m, PowerAlgorithm::Scan, &DEFAULT_MOMENT_KS)?;
    let roots = count_power_congruence(&ctx, n, lambda, m, PowerAlgorithm::RootEnumeration, &DEFAULT_MOMENT_KS)?;
    println!("x^{n} = {lambda} mod {p}, x <= {m}");
    println!("scan: {}  root enumeration: {}", scan.count, roots.count);
    println!("all roots ({} of at most gcd(n, p-1) = {}):", nth_roots(&ctx, n, lambda)?.len(), gcd(n, p - 1));
    println!("  {:?}", nth_roots(&ctx, n, lambda)?);
    for c in &scan.curves {
        println!("moment curve k = {}: {:.3}", c.k, c.value);
    }
    Ok(())
}
