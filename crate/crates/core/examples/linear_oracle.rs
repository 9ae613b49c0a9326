//! Linear flow from the Poisson kernel against its closed-form L2 norm
//! `||Q(t)||^2 = 1 / (8 pi (1 + t)^2)`.
//!
//!     cargo run --release --example linear_oracle [n]

use std::f64::consts::PI;

use electroconv::config::scenario;
use electroconv::diagnostics::{column, fit_exponent};
use electroconv::harness::simulate;

fn main() -> electroconv::Result<()> {
    let mut cfg = scenario("S4_linear_oracle")?;
    if let Some(n) = std::env::args().nth(1) {
        cfg.grid.n = n.parse().expect("grid size");
    }
    let out = simulate(&cfg, None)?;
    println!("{:>10} {:>14} {:>14} {:>10}", "t", "||Q||^2", "oracle", "rel.err");
    for r in out.records.iter().step_by(5) {
        let exact = 1.0 / (8.0 * PI * (1.0 + r.t).powi(2));
        println!(
            "{:>10.4} {:>14.6e} {:>14.6e} {:>10.2e}",
            r.t,
            r.l2q2,
            exact,
            r.l2q2 / exact - 1.0
        );
    }
    let series = column(&out.records, "l2q2").unwrap();
    let fit = fit_exponent(&series, (5.0, cfg.t_end()))?;
    println!("slope over [5, {:.2}] = {:.4}", cfg.t_end(), fit.slope);
    Ok(())
}
