//! One softmax instance with the synthetic noisy oracle: the optimized
//! schedule against the constant one at the same simulated cost.
//!
//! `cargo run --release --example noisy_softmax`

use tunable_oracle::certificates::{fixed_step_certificates, impact_coefficients_fgm};
use tunable_oracle::experiment::{match_budget, ScheduleFamily};
use tunable_oracle::fgm::{fgm_run, FgmConfig};
use tunable_oracle::problems::{generate_scenarios, softmax_value_grad, NoisyOracle, ProblemParams};
use tunable_oracle::{CostKind, ScheduleProblem};

fn main() -> tunable_oracle::Result<()> {
    let params = ProblemParams { mu: 0.1, ..ProblemParams::default() };
    let data = generate_scenarios(100, 30, 10.0, 3, params)?;
    let (n, alpha, delta_ref) = (500, 100.0, 1e-3);
    let l = data.softmax_smoothness();

    let certs = fixed_step_certificates(n, l, params.mu)?;
    let (a, _) = impact_coefficients_fgm(&certs, n)?;
    let p = ScheduleProblem::new(a, vec![1.0; n], CostKind::Power(1.0), delta_ref, 0.0, 100.0)?;

    let x0 = vec![1.0 / 30.0; 30];
    for family in [ScheduleFamily::Tunable, ScheduleFamily::Constant] {
        let s = match_budget(family, &p)?;
        let mut oracle = NoisyOracle::new(&data, alpha, CostKind::Power(1.0), 42);
        let cfg = FgmConfig::fixed_step(l, params.mu, n);
        let out = fgm_run(&cfg, &x0, &mut oracle, |k, _| s.values[k], None).map_err(|e| e.error)?;
        let last = out.trajectory.last().expect("n > 0");
        println!(
            "{family:>8}: f(x_N) = {:.10}, bound = {:.3e}, simulated cost = {:.0}",
            softmax_value_grad(&data, out.x()).0,
            last.bound,
            out.total_work
        );
    }
    Ok(())
}
