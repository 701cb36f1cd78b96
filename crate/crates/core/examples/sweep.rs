//! A small sweep driven from code, printed to stdout instead of files.
//!
//!     cargo run --release --example sweep -- 3 200

use selfpower::congruence::DEFAULT_SPECTRUM_CAP;
use selfpower::expsum::DEFAULT_WORK_CAP;
use selfpower::numtheory::primes_in_range;
use selfpower::sweep::{run_sweep, Caps, SweepConfig, Task};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let lo: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3);
    let hi: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(200);
    let config = SweepConfig {
        primes: primes_in_range(lo, hi),
        tasks: vec![Task::T1, Task::T3, Task::Image],
        threads: 0,
        seed: 1,
        caps: Caps {
            spectrum: DEFAULT_SPECTRUM_CAP,
            expsum_work: DEFAULT_WORK_CAP,
            sample_a: 1000,
        },
    };
    let result = run_sweep(&config)?;
    for out in &result.outputs {
        println!("# {} ({} violations)", out.task, out.violations.len());
        print!("{}", out.table.to_csv());
        for v in &out.violations {
            println!("# violation {v}");
        }
    }
    Ok(())
}
