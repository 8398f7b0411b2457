//! Extending a short offline schedule with the online rule as new impact
//! coefficients arrive.
//!
//! `cargo run --example online_schedule`

use tunable_oracle::certificates::{fixed_step_certificates, impact_coefficients_fgm};
use tunable_oracle::schedule::{online_extend_accuracy, solve_accuracy};
use tunable_oracle::{CostKind, ScheduleProblem};

fn main() -> tunable_oracle::Result<()> {
    let (n, n_r, l, mu) = (60, 10, 10.0, 0.1);
    let certs = fixed_step_certificates(n, l, mu)?;
    let (a, _) = impact_coefficients_fgm(&certs, n)?;
    let b = vec![1.0; n];
    let delta_ref = 1e-3;

    let boot = ScheduleProblem::new(a[..n_r].to_vec(), b[..n_r].to_vec(), CostKind::Power(1.0), delta_ref, 0.0, 100.0)?;
    let (s, _) = solve_accuracy(&boot)?;
    let anchor = (a[n_r - 1], b[n_r - 1], s.values[n_r - 1]);

    let offline = ScheduleProblem::new(a.clone(), b.clone(), CostKind::Power(1.0), delta_ref, 0.0, 100.0)?;
    let (full, _) = solve_accuracy(&offline)?;

    println!("k,online,offline");
    for k in 0..n {
        let online = if k < n_r {
            s.values[k]
        } else {
            online_extend_accuracy(anchor, (a[k], b[k]), 1.0, (0.0, 100.0 * delta_ref))
        };
        println!("{k},{online:.6e},{:.6e}", full.values[k]);
    }
    Ok(())
}
