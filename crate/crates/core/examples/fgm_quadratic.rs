//! Fast gradient method on `½‖x − c‖²` over the 2-simplex with an exact
//! oracle, then with a constant inexactness to show the error floor.
//!
//! `cargo run --example fgm_quadratic`

use tunable_oracle::fgm::{fgm_run, FgmConfig, OracleReply};

fn main() -> tunable_oracle::Result<()> {
    let c = [0.9, -0.4];
    // minimizer of ½‖x − c‖² over the simplex
    let x_star = [1.0, 0.0];
    let f = |x: &[f64]| 0.5 * ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2));
    let f_star = f(&x_star);

    for delta in [0.0, 1e-3] {
        let mut oracle = |x: &[f64], _requested: f64| -> tunable_oracle::Result<OracleReply> {
            Ok(OracleReply {
                value: f(x),
                gradient: vec![x[0] - c[0], x[1] - c[1]],
                delta,
                inner_work: 0.0,
            })
        };
        let mut cfg = FgmConfig::fixed_step(1.0, 0.0, 100);
        cfg.reference_point = Some(x_star.to_vec());
        let out = fgm_run(&cfg, &[0.0, 1.0], &mut oracle, |_, _| delta, None).map_err(|e| e.error)?;
        println!("delta = {delta:.0e}");
        for rec in out.trajectory.iter().filter(|r| (r.k + 1) % 20 == 0) {
            println!("  N = {:3}  A_N = {:8.1}  bound = {:.3e}", rec.k + 1, rec.a_cert, rec.bound);
        }
        println!("  F(x_N) - F* = {:.3e}", f(out.x()) - f_star);
    }
    Ok(())
}
