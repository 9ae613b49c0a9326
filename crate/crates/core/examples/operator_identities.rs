//! Riesz, Leray and fractional-Laplacian identities on a random field.
//!
//!     cargo run --release --example operator_identities

use electroconv::checks::{cutoff_wavenumber, random_field, random_velocity};
use electroconv::spectral::{divergence_defect, fractional_laplacian, l2, leray_project, make_grid, riesz};

fn main() -> electroconv::Result<()> {
    let grid = make_grid(128, 8.0 * std::f64::consts::PI)?;
    let k0 = cutoff_wavenumber(&grid) / 2.0;
    let f = random_field(&grid, 7, k0, 0.0)?;

    let r = riesz(&f)?;
    let f2 = f.inner(&f);
    println!("<f, R1 f> / ||f||^2     = {:.3e}", f.inner(&r.components[0]) / f2);
    println!("<f, R2 f> / ||f||^2     = {:.3e}", f.inner(&r.components[1]) / f2);
    let rn = l2(&r.components[0]).hypot(l2(&r.components[1]));
    println!("||Rf|| / ||f|| - 1      = {:.3e}", rn / l2(&f) - 1.0);

    let physical = f.inverse();
    println!("Parseval defect         = {:.3e}", physical.l2_norm() / l2(&f) - 1.0);

    let v = random_velocity(&grid, 8, k0)?.axpy(1.0, &electroconv::spectral::gradient(&f));
    let p = leray_project(&v);
    println!("div defect before       = {:.3e}", divergence_defect(&v));
    println!("div defect after        = {:.3e}", divergence_defect(&p));
    println!(
        "P(Pv) - Pv              = {:.3e}",
        (&leray_project(&p) - &p).coeff_norm() / p.coeff_norm()
    );

    let a = fractional_laplacian(&fractional_laplacian(&f, 0.5)?, 0.5)?;
    let b = fractional_laplacian(&f, 1.0)?;
    println!(
        "L^1/2 L^1/2 f - L f     = {:.3e}",
        (&a - &b).coeff_norm() / b.coeff_norm()
    );
    Ok(())
}
