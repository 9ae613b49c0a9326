//! Seeded sweeps of the pointwise and commutator inequalities.
//!
//!     cargo run --release --example inequality_suite [seed]

use electroconv::checks::{full_suite, SuiteConfig};

fn main() -> electroconv::Result<()> {
    let seed = std::env::args().nth(1).map_or(0, |s| s.parse().expect("seed"));
    let cfg = SuiteConfig {
        seed,
        trials: 20,
        bump_trials: 5,
        ..SuiteConfig::default()
    };
    for r in full_suite(&cfg)? {
        let drift = r.refinement_drift.map_or(String::new(), |d| format!("  drift {d:.3}"));
        println!(
            "{:<24} {:>12.4e}{drift}  {}",
            r.name,
            r.worst,
            if r.pass { "ok" } else { "FAIL" }
        );
    }
    Ok(())
}
