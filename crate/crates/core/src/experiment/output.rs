use std::fs;
use std::path::Path;

use super::{ExperimentOutput, ScheduleFamily};
use crate::error::Result;
use crate::schedule::io::{fmt_f64, write_coefficients_file, write_schedule_file};

/// Aggregate over seeds for one `(instance, schedule)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub experiment: u8,
    pub instance: usize,
    pub schedule: ScheduleFamily,
    pub mu: f64,
    pub r: f64,
    pub n_iter: usize,
    pub delta_ref: f64,
    /// NaN when every seed failed.
    pub median_gap: f64,
    pub mean_gap: f64,
    /// Mean over seeds.
    pub total_inner_work: f64,
    pub failed_runs: usize,
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) }
}

/// One row per `(instance, schedule)` in run order; failed runs are skipped.
pub fn summarize(out: &ExperimentOutput) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = Vec::new();
    let mut i = 0;
    while i < out.runs.len() {
        let key = (out.runs[i].instance, out.runs[i].family);
        let mut j = i;
        while j < out.runs.len() && (out.runs[j].instance, out.runs[j].family) == key {
            j += 1;
        }
        let group = &out.runs[i..j];
        let ok: Vec<_> = group.iter().filter(|r| r.error.is_none() && r.terminal_gap.is_some()).collect();
        let mut gaps: Vec<f64> = ok.iter().filter_map(|r| r.terminal_gap).collect();
        let mean = |v: &[f64]| if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 };
        let works: Vec<f64> = ok.iter().map(|r| r.total_work).collect();
        let spec = &out.instances[key.0];
        rows.push(SummaryRow {
            experiment: out.config.experiment,
            instance: key.0,
            schedule: key.1,
            mu: spec.mu,
            r: spec.r,
            n_iter: spec.n_iter,
            delta_ref: spec.delta_ref,
            mean_gap: mean(&gaps),
            median_gap: median(&mut gaps),
            total_inner_work: mean(&works),
            failed_runs: group.len() - ok.len(),
        });
        i = j;
    }
    rows
}

/// Writes `trajectory.csv`, `summary.csv`, `schedules/` and `coefficients/`
/// under `dir`.
pub fn emit_outputs(out: &ExperimentOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir.join("schedules"))?;
    fs::create_dir_all(dir.join("coefficients"))?;
    let exp = out.config.experiment;

    let mut w = csv::Writer::from_path(dir.join("trajectory.csv"))?;
    w.write_record(["experiment", "schedule", "seed", "k", "delta", "omega", "L", "A", "objective", "cum_work"])?;
    for run in &out.runs {
        let label = format!("{}@{}", run.family, out.instances[run.instance].label());
        for rec in &run.trajectory {
            w.write_record([
                exp.to_string(),
                label.clone(),
                run.seed.to_string(),
                rec.k.to_string(),
                fmt_f64(rec.delta),
                fmt_f64(rec.omega),
                fmt_f64(rec.l),
                fmt_f64(rec.a_cert),
                rec.objective.map(fmt_f64).unwrap_or_default(),
                fmt_f64(rec.cum_work),
            ])?;
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    w.write_record(["experiment", "schedule", "mu", "r", "N", "delta_ref", "median_gap", "mean_gap", "total_inner_work"])?;
    for row in summarize(out) {
        w.write_record([
            row.experiment.to_string(),
            format!("{}@{}", row.schedule, out.instances[row.instance].label()),
            fmt_f64(row.mu),
            fmt_f64(row.r),
            row.n_iter.to_string(),
            fmt_f64(row.delta_ref),
            fmt_f64(row.median_gap),
            fmt_f64(row.mean_gap),
            fmt_f64(row.total_inner_work),
        ])?;
    }
    w.flush()?;

    for s in &out.schedules {
        let name = format!("{}@{}.csv", s.family, out.instances[s.instance].label());
        write_schedule_file(dir.join("schedules").join(name), &s.schedule)?;
    }
    for (instance, a, b) in &out.coefficients {
        let name = format!("{}.csv", out.instances[*instance].label());
        write_coefficients_file(dir.join("coefficients").join(name), a, b)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&mut []).is_nan());
    }
}
