//! Decay of the nonlinear corrections `q - Q` and `u - U` compared with the
//! solution itself.
//!
//!     cargo run --release --example difference_decay [n]

use electroconv::config::scenario;
use electroconv::diagnostics::{column, fit_exponent};
use electroconv::harness::simulate;

fn main() -> electroconv::Result<()> {
    let mut cfg = scenario("S2_difference_decay")?;
    if let Some(n) = std::env::args().nth(1) {
        cfg.grid.n = n.parse().expect("grid size");
    }
    let out = simulate(&cfg, None)?;
    let window = (5.0, cfg.t_end());
    let slope = |name| fit_exponent(&column(&out.records, name).unwrap(), window).map(|f| f.slope);
    let (q, dq) = (slope("l2q2")?, slope("diffq2")?);
    let (u, du) = (slope("l2u2")?, slope("diffu2")?);
    println!("||q||^2 {q:>8.4}   ||q-Q||^2 {dq:>8.4}   gain {:.3}", q - dq);
    println!("||u||^2 {u:>8.4}   ||u-U||^2 {du:>8.4}   gain {:.3}", u - du);
    let last = out.records.last().unwrap();
    println!(
        "at t = {:.2}: |zeta(k)|/|k| <= {:.3e}, |v(k)|/|k| <= {:.3e}",
        last.t, last.probe_zeta_max, last.probe_v_max
    );
    Ok(())
}
