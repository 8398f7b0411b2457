//! Inner work of the convex-hull oracle as a function of the requested
//! accuracy, cold and warm started.
//!
//! `cargo run --release --example hull_oracle_cost`

use tunable_oracle::problems::{fista_inner, generate_scenarios, kappa_hat, InnerState, ProblemParams};

fn main() -> tunable_oracle::Result<()> {
    let params = ProblemParams { sigma: 1e-3, ..ProblemParams::default() };
    for d in [50, 200] {
        let data = generate_scenarios(100, d, 0.2, 11, params)?;
        println!("d = {d}, n = 100, κ̂ = {:.3e}", kappa_hat(&data));
        let x = vec![1.0 / d as f64; d];
        let mut warm = InnerState::uniform(&data);
        for e in 2..=8 {
            let delta = 10f64.powi(-e);
            let cold = fista_inner(&data, &x, delta, &mut InnerState::uniform(&data), 1_000_000)?;
            let hot = fista_inner(&data, &x, delta, &mut warm, 1_000_000)?;
            println!("  δ = 1e-{e}: cold ω = {:6}, warm ω = {:6}, gap {:.2e}", cold.omega, hot.omega, cold.gap);
        }
    }
    Ok(())
}
