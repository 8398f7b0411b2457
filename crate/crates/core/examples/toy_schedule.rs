//! The 80-iteration toy instance: three groups of cost distortions, a
//! log-squared cost and `M = 2`. Prints the partition, the multiplier and the
//! schedule sorted by descending `b_k / a_k`.
//!
//! `cargo run --example toy_schedule`

use tunable_oracle::experiment::toy_problem;
use tunable_oracle::schedule::{kkt_report, solve_accuracy};

fn main() -> tunable_oracle::Result<()> {
    let p = toy_problem()?;
    let (s, cert) = solve_accuracy(&p)?;
    let kkt = kkt_report(&p, &s, &cert)?;

    println!("pinned at M·δ̄: {:?}", cert.plus_set());
    println!("pinned at m·δ̄: {:?}", cert.minus_set());
    println!("λ* = {:.6}", cert.lambda_star);
    println!("stationarity {:.1e}, budget {:.1e}", kkt.stationarity, kkt.budget);

    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by_key(|&k| cert.rho[k]);
    println!("rank,k,delta");
    for (rank, k) in order.into_iter().enumerate() {
        println!("{rank},{k},{:.6e}", s.values[k]);
    }
    Ok(())
}
