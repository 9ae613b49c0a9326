//! Weighted moment `M(t) = ||sqrt(1 + |x|^2) q||` and its logarithmic growth.
//!
//!     cargo run --release --example moment_growth [n]

use electroconv::config::scenario;
use electroconv::harness::simulate;

fn main() -> electroconv::Result<()> {
    let mut cfg = scenario("S3_moment_growth")?;
    if let Some(n) = std::env::args().nth(1) {
        cfg.grid.n = n.parse().expect("grid size");
    }
    let out = simulate(&cfg, None)?;
    let m0 = out.records[0].moment;
    println!("{:>10} {:>12} {:>16}", "t", "M(t)", "(M-M0)/ln(1+t)");
    for r in out.records.iter().filter(|r| r.t >= 1.0).step_by(4) {
        println!(
            "{:>10.4} {:>12.6} {:>16.6}",
            r.t,
            r.moment,
            (r.moment - m0) / (1.0 + r.t).ln()
        );
    }
    Ok(())
}
