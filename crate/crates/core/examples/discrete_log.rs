//! Primitive root, orders and discrete logarithms in F_p^*.
//!
//!     cargo run --release --example discrete_log -- 2305843009213693951 12345

use selfpower::modmath::pow_mod;
use selfpower::numtheory::PrimeContext;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let p: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2_305_843_009_213_693_951);
    let a: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(12345);
    let ctx = PrimeContext::new(p)?;
    let g = ctx.generator();
    let k = ctx.discrete_log(a)?;

    println!("p - 1 = {:?}", ctx.factors());
    println!("smallest primitive root g = {g}");
    println!("log_g {a} = {k}");
    println!("check g^k = {}", pow_mod(g, k, p));
    println!("ord {a} = {}", ctx.multiplicative_order(a)?);
    Ok(())
}
