//! Coupled flow from a Gaussian charge and an offset vortex; fitted decay
//! exponents of the charge and velocity norms and their derivatives.
//!
//!     cargo run --release --example sharp_decay [n]

use electroconv::config::scenario;
use electroconv::diagnostics::{column, fit_exponent, sup_constant};
use electroconv::harness::simulate;

fn main() -> electroconv::Result<()> {
    let mut cfg = scenario("S1_sharp_decay")?;
    if let Some(n) = std::env::args().nth(1) {
        cfg.grid.n = n.parse().expect("grid size");
    }
    let out = simulate(&cfg, None)?;
    let window = (5.0, cfg.t_end());
    for name in ["l2q2", "l2u2", "h1q2", "h1u2", "h2q2", "h2u2"] {
        let fit = fit_exponent(&column(&out.records, name).unwrap(), window)?;
        println!("{name:>6}: slope {:>8.4}  rms {:.2e}", fit.slope, fit.rms_residual);
    }
    let q = column(&out.records, "l2q2").unwrap();
    let u = column(&out.records, "l2u2").unwrap();
    println!("sup (1+t)^2 ||q||^2 = {:.4e}", sup_constant(&q, 2.0, window));
    println!("sup (1+t)   ||u||^2 = {:.4e}", sup_constant(&u, 1.0, window));
    Ok(())
}
