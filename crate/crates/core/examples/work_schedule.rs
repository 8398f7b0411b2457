//! Splitting a fixed amount of inner work across iterations.
//!
//! `cargo run --example work_schedule`

use tunable_oracle::schedule::{closed_form_interior_work, solve_work};
use tunable_oracle::WorkProblem;

fn main() -> tunable_oracle::Result<()> {
    let a: Vec<f64> = (1..=8).map(|k| (k * k) as f64).collect();
    let b = vec![1.0; 8];

    let p = WorkProblem::new(a.clone(), b.clone(), 80.0, 0.0, f64::INFINITY, 1.0)?;
    let (s, _) = solve_work(&p)?;
    let closed = closed_form_interior_work(&p)?.expect("interior");
    println!("r = 1 solver      {:.3?}", s.values);
    println!("r = 1 closed form {:.3?}", closed.values);

    // Tight per-iteration caps push work towards the middle iterations.
    let p = WorkProblem::new(a, b, 80.0, 4.0, 14.0, 1.0)?;
    let (s, cert) = solve_work(&p)?;
    println!("bounded [4, 14]   {:.3?}  (at 4: {}, at 14: {})", s.values, cert.n_plus, cert.n_minus);
    println!("total {:.6}", s.values.iter().sum::<f64>());
    Ok(())
}
