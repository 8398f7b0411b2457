//! Interior closed forms against the KKT solver for power costs, and the
//! cut-off behaviour once a box constraint binds.
//!
//! `cargo run --example closed_forms`

use tunable_oracle::schedule::{closed_form_interior_accuracy, reference_budget, solve_accuracy};
use tunable_oracle::{CostKind, ScheduleProblem};

fn main() -> tunable_oracle::Result<()> {
    let a = vec![1.0, 2.0, 3.0, 4.0];
    for r in [1.0 / 3.0, 0.5, 1.0, 3.0] {
        let p = ScheduleProblem::new(a.clone(), vec![1.0; 4], CostKind::Power(r), 0.01, 0.0, f64::INFINITY)?;
        let closed = closed_form_interior_accuracy(&p)?.expect("no bound is active");
        let (solved, _) = solve_accuracy(&p)?;
        let diff = closed
            .values
            .iter()
            .zip(&solved.values)
            .map(|(c, s)| ((c - s) / s).abs())
            .fold(0.0, f64::max);
        println!("r = {r:.3}: {:.7?}  max rel diff {diff:.1e}", solved.values);
    }

    // With M = 1.5 the first iterate would exceed M·δ̄ and gets pinned.
    let p = ScheduleProblem::new(vec![1.0, 100.0], vec![1.0; 2], CostKind::Power(1.0), 0.01, 0.0, 1.5)?;
    println!("closed form valid: {}", closed_form_interior_accuracy(&p)?.is_some());
    let (s, cert) = solve_accuracy(&p)?;
    println!("clipped: {:.6?}, N+ = {}, budget {}", s.values, cert.n_plus, reference_budget(&p));
    Ok(())
}
