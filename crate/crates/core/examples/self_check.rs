//! The quick verification suites, as run by `selfpower verify`.
//!
//!     cargo run --release --example self_check

use selfpower::verify::{run_verify, Level};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let report = run_verify(Level::Quick, None)?;
    for suite in &report.suites {
        println!("{}", suite.summary_line());
    }
    std::process::exit(if report.passed() { 0 } else { 1 });
}
