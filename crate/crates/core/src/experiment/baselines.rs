use std::fmt;
use std::str::FromStr;

use crate::cost_models::CostKind;
use crate::error::{invalid, Error, Result};
use crate::schedule::{solve_accuracy, Schedule, ScheduleProblem};

/// Inexactness schedules compared by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScheduleFamily {
    /// Optimal offline schedule at the constant schedule's budget.
    Tunable,
    Constant,
    /// `δ̄ (k+1)^{-3}`.
    Poly3,
    /// `δ̄ (1 − √(μ/L))^{s·k}`.
    Linear,
    /// Offline bootstrap, then extrapolated from the live certificates.
    OnlineTunable,
}

impl ScheduleFamily {
    pub fn name(self) -> &'static str {
        match self {
            Self::Tunable => "tunable",
            Self::Constant => "constant",
            Self::Poly3 => "poly3",
            Self::Linear => "linear",
            Self::OnlineTunable => "online_tunable",
        }
    }
}

impl fmt::Display for ScheduleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for ScheduleFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "tunable" => Ok(Self::Tunable),
            "constant" => Ok(Self::Constant),
            "poly3" | "poly-3" => Ok(Self::Poly3),
            "linear" => Ok(Self::Linear),
            "online_tunable" => Ok(Self::OnlineTunable),
            other => Err(Error::Parse(format!("unknown schedule '{other}'"))),
        }
    }
}

/// Schedule of `family` spending the constant schedule's modeled budget.
///
/// Only the budget-matched families are accepted here.
pub fn match_budget(family: ScheduleFamily, p: &ScheduleProblem) -> Result<Schedule> {
    match family {
        ScheduleFamily::Constant => Ok(Schedule::accuracy(vec![p.delta_ref; p.len()])),
        ScheduleFamily::Tunable => Ok(solve_accuracy(p)?.0),
        other => invalid(format!("{other} is not a budget-matched family")),
    }
}

/// Literature baselines of length `n`.
///
/// `linear_sign` is the exponent sign `s`; `−1` gives a schedule that
/// grows with `k`.
pub fn baseline_schedule(
    family: ScheduleFamily,
    delta_ref: f64,
    mu: f64,
    l: f64,
    n: usize,
    linear_sign: f64,
) -> Result<Schedule> {
    if !(delta_ref > 0.0) {
        return invalid(format!("reference inexactness must be positive, got {delta_ref}"));
    }
    let values = match family {
        ScheduleFamily::Constant => vec![delta_ref; n],
        ScheduleFamily::Poly3 => (0..n).map(|k| delta_ref / ((k + 1) as f64).powi(3)).collect(),
        ScheduleFamily::Linear => {
            if !(mu > 0.0 && mu < l) {
                return invalid(format!("linear baseline needs 0 < mu < L, got mu = {mu}, L = {l}"));
            }
            let base = 1.0 - (mu / l).sqrt();
            (0..n).map(|k| delta_ref * base.powf(linear_sign * k as f64)).collect()
        }
        other => return invalid(format!("{other} is not a baseline")),
    };
    Ok(Schedule::accuracy(values))
}

/// The 80-iteration toy instance: `a_k = k + 1`, three groups of cost
/// distortions, `δ̄ = 10^{-4}`, `[0, 2δ̄]` and a log-squared cost.
pub fn toy_problem() -> Result<ScheduleProblem> {
    let n = 80;
    let a: Vec<f64> = (0..n).map(|k| (k + 1) as f64).collect();
    let b: Vec<f64> = (0..n)
        .map(|k| match k {
            0..=19 => 3.0 / 420.0,
            20..=39 => 2.0 / 420.0,
            _ => 8.0 / 420.0,
        })
        .collect();
    ScheduleProblem::new(a, b, CostKind::LogSquared, 1e-4, 0.0, 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::reference_budget;

    #[test]
    fn baseline_examples() {
        let s = baseline_schedule(ScheduleFamily::Poly3, 1e-2, 0.0, 1.0, 10, -1.0).unwrap();
        assert_eq!(s.values[0], 1e-2);
        assert!((s.values[9] - 1e-5).abs() < 1e-20);
        let s = baseline_schedule(ScheduleFamily::Linear, 1.0, 0.25, 1.0, 3, -1.0).unwrap();
        assert!((s.values[1] - 2.0).abs() < 1e-15);
        let s = baseline_schedule(ScheduleFamily::Linear, 1.0, 0.25, 1.0, 3, 1.0).unwrap();
        assert!((s.values[2] - 0.25).abs() < 1e-15);
        assert!(baseline_schedule(ScheduleFamily::Linear, 1.0, 0.0, 1.0, 3, -1.0).is_err());
        let s = baseline_schedule(ScheduleFamily::Constant, 3e-3, 0.0, 1.0, 4, -1.0).unwrap();
        assert_eq!(s.values, vec![3e-3; 4]);
    }

    #[test]
    fn matched_budgets() {
        let p = ScheduleProblem::new(
            vec![1.0, 2.0, 3.0, 4.0],
            vec![1.0; 4],
            CostKind::Power(1.0),
            0.01,
            0.0,
            f64::INFINITY,
        )
        .unwrap();
        let s = match_budget(ScheduleFamily::Tunable, &p).unwrap();
        let inv: f64 = s.values.iter().map(|d| 1.0 / d).sum();
        assert!((inv - 400.0).abs() < 1e-10 * 400.0);
        let c = match_budget(ScheduleFamily::Constant, &p).unwrap();
        assert_eq!(c.values, vec![0.01; 4]);
        assert!(match_budget(ScheduleFamily::Poly3, &p).is_err());

        let a: Vec<f64> = (1..=50).map(|k| (k * k) as f64).collect();
        let p = ScheduleProblem::new(a, vec![1.0; 50], CostKind::Logarithmic, 1e-4, 0.0, 100.0).unwrap();
        let s = match_budget(ScheduleFamily::Tunable, &p).unwrap();
        let cost: f64 = s.values.iter().map(|d| -d.ln()).sum();
        assert!((cost - reference_budget(&p)).abs() < 1e-10 * reference_budget(&p));
        let too_loose = ScheduleProblem::new(vec![1.0; 3], vec![1.0; 3], CostKind::Logarithmic, 1e-2, 0.0, 100.0);
        assert!(too_loose.is_err());
    }

    #[test]
    fn family_names_round_trip() {
        use ScheduleFamily::*;
        for f in [Tunable, Constant, Poly3, Linear, OnlineTunable] {
            assert_eq!(f.name().parse::<ScheduleFamily>().unwrap(), f);
        }
        assert!("fancy".parse::<ScheduleFamily>().is_err());
    }
}
