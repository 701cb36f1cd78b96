//! L1 norm over frequencies of a geometric sum on an interval, which stays
//! below p (1 + ln p) however the interval is placed.
//!
//!     cargo run --release --example interval_sums -- 10007

use selfpower::expsum::interval_l1_sum;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(10007);
    let bound = p as f64 * (1.0 + (p as f64).ln());
    println!("p = {p}, p (1 + ln p) = {bound:.1}");
    for len in [1, 2, 3, 10, 100, p / 3, p / 2, p - 1, p, p + 1] {
        let r = interval_l1_sum(-5, -5 + len as i64 - 1, p)?;
        println!("length {len:>6}: sum {:>14.4}  /p {:>8.4}  /bound {:.4}", r.sum, r.ratio_to_p, r.ratio_to_log_bound);
    }
    Ok(())
}
