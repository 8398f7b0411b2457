use super::{reference_budget, Schedule, ScheduleProblem};
use crate::error::{invalid, Error, Result};

/// Result of an exhaustive grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForce {
    pub schedule: Schedule,
    pub objective: f64,
    /// `cell · Σ a_k`: how far the grid optimum may sit below the true one.
    pub grid_error: f64,
}

/// Exhaustive search over `grid_points^N` schedules on `[m δ̄, M δ̄]^N`.
///
/// Only grid schedules that do not overspend the reference budget are kept,
/// so the result is an upper bound on the optimum. Rounding the optimum up to
/// the grid is feasible, hence the bound is within `grid_error` of it. Only
/// meant as a test oracle for `N ≤ 4`.
pub fn brute_force_oracle(p: &ScheduleProblem, grid_points: usize) -> Result<BruteForce> {
    let n = p.len();
    if n > 4 {
        return invalid(format!("brute force is limited to N <= 4, got {n}"));
    }
    if grid_points < 2 {
        return invalid("need at least two grid points per axis");
    }
    let (lo, hi) = p.bounds();
    if !hi.is_finite() {
        return invalid("brute force needs a finite upper bound");
    }
    let kind = p.kind();
    let cell = (hi - lo) / (grid_points - 1) as f64;
    let grid: Vec<f64> = (0..grid_points)
        .map(|i| lo + i as f64 * cell)
        .filter(|&d| d > 0.0 && kind.value(d).is_finite())
        .collect();
    let g = grid.len();

    let cost: Vec<Vec<f64>> = p
        .b
        .iter()
        .map(|b| grid.iter().map(|&d| b * kind.value(d)).collect())
        .collect();

    let budget = reference_budget(p);
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut idx = vec![0usize; n];
    loop {
        let (mut c, mut obj) = (0.0, 0.0);
        for k in 0..n {
            c += cost[k][idx[k]];
            obj += p.a[k] * grid[idx[k]];
        }
        if c <= budget * (1.0 + 1e-12) && best.as_ref().is_none_or(|(o, _)| obj < *o) {
            best = Some((obj, idx.clone()));
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == n {
                let (objective, idx) = best.ok_or_else(|| {
                    Error::InvalidInput("no grid schedule meets the budget".into())
                })?;
                return Ok(BruteForce {
                    schedule: Schedule::accuracy(idx.iter().map(|&i| grid[i]).collect()),
                    objective,
                    grid_error: cell * p.a.iter().sum::<f64>(),
                });
            }
            idx[pos] += 1;
            if idx[pos] < g {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost_models::CostKind;

    #[test]
    fn symmetric_instance_picks_reference() {
        let p = ScheduleProblem::new(vec![1.0; 2], vec![1.0; 2], CostKind::Power(1.0), 0.01, 0.0, 2.0)
            .unwrap();
        // grid step 0.02/200 puts 0.01 on the grid
        let bf = brute_force_oracle(&p, 201).unwrap();
        for d in &bf.schedule.values {
            assert!((d - 0.01).abs() <= 1e-4 + 1e-12, "{d}");
        }
        assert!(bf.objective <= 0.02 + 1e-12);
    }

    #[test]
    fn rejects_large_instances() {
        let p = ScheduleProblem::new(vec![1.0; 5], vec![1.0; 5], CostKind::Power(1.0), 0.01, 0.0, 2.0)
            .unwrap();
        assert!(brute_force_oracle(&p, 10).is_err());
        let p = ScheduleProblem::new(vec![1.0; 2], vec![1.0; 2], CostKind::Power(1.0), 0.01, 0.0, f64::INFINITY)
            .unwrap();
        assert!(brute_force_oracle(&p, 10).is_err());
    }
}
