//! Certificate growth of the fast gradient method and the impact
//! coefficients it induces.
//!
//! `cargo run --example certificates`

use tunable_oracle::certificates::{fixed_step_certificates, impact_coefficients_fgm};

fn main() -> tunable_oracle::Result<()> {
    for mu in [0.0, 0.01] {
        let certs = fixed_step_certificates(200, 1.0, mu)?;
        let a = certs.values();
        println!("mu = {mu}: A_10 = {:.3}, A_100 = {:.3e}, A_200 = {:.3e}", a[10], a[100], a[200]);
        println!("  A_200 / (200²/4) = {:.3}, residual {:.1e}", a[200] / 1e4, certs.max_residual());
    }
    let certs = fixed_step_certificates(6, 1.0, 0.0)?;
    let (a, b) = impact_coefficients_fgm(&certs, 6)?;
    println!("a = {a:.4?}\nb = {b:?}");
    Ok(())
}
