//! Stop a run halfway, restart it from the checkpoint, and compare.
//!
//!     cargo run --release --example checkpoint_restart

use electroconv::config::parse_config;
use electroconv::harness::{run_to_dir, simulate};

fn main() -> electroconv::Result<()> {
    let dir = std::env::temp_dir().join("electroconv-restart");
    let full = parse_config(r#"{"grid": {"n": 64, "half_period": 25.0}, "integrator": {"t_end": 4.0}}"#)?;
    let mut first = full.clone();
    first.integrator.t_end = Some(2.0);

    let reference = simulate(&full, None)?;
    run_to_dir(&first, &dir, false)?;
    let resumed = run_to_dir(&full, &dir, true)?;

    let a = reference.records.last().unwrap();
    let b = resumed.records.last().unwrap();
    println!("uninterrupted ||q||^2 at t = {}: {:.16e}", a.t, a.l2q2);
    println!("restarted     ||q||^2 at t = {}: {:.16e}", b.t, b.l2q2);
    println!("outputs in {}", dir.display());
    Ok(())
}
