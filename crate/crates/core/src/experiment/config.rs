//! `key = value` experiment configuration.

use std::path::PathBuf;
use std::str::FromStr;

use super::ScheduleFamily;
use crate::error::{Error, Result};

/// Cost exponent choice for the hull experiments.
#[derive(Debug, Clone, PartialEq)]
pub enum CostExponent {
    /// `r = 0` when `κ̂ > 0`, `r = 1/2` otherwise.
    Auto,
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: u8,
    /// Scenario dimensions; one data setting per entry.
    pub d: Vec<usize>,
    pub n: usize,
    pub p: f64,
    pub sigma: f64,
    pub upsilon: f64,
    pub mu: Vec<f64>,
    /// Noise scale, experiment 1 only.
    pub alpha: Option<f64>,
    pub r: CostExponent,
    pub delta_ref: Vec<f64>,
    /// Reference inexactness used instead of `delta_ref` when `r = 0`.
    pub delta_ref_r0: Option<Vec<f64>>,
    pub n_iter: Vec<usize>,
    pub big_m: f64,
    pub m: f64,
    /// Offline bootstrap length, experiment 3 only.
    pub n_r: Option<usize>,
    pub seeds: Vec<u64>,
    pub schedules: Vec<ScheduleFamily>,
    pub data_seed: u64,
    pub max_inner: u64,
    /// Iterations of the reference run behind `F*`; `0` picks a default
    /// proportional to the largest `N`.
    pub fstar_iterations: usize,
    /// Inexactness of the reference run.
    pub fstar_delta: f64,
    /// Objective sampling period; `0` disables sampling.
    pub sample_every: usize,
    /// Exponent sign of the linear baseline `δ̄(1 − √(μ/L))^{s·k}`.
    pub linear_sign: f64,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Desk-scale defaults for experiment `id`.
    pub fn defaults(id: u8) -> Result<Self> {
        use ScheduleFamily::*;
        let base = Self {
            experiment: id,
            d: vec![50, 200],
            n: 100,
            p: 0.2,
            sigma: 1e-3,
            upsilon: 1.0,
            mu: vec![0.0, 0.1],
            alpha: None,
            r: CostExponent::Auto,
            delta_ref: vec![1e-3],
            delta_ref_r0: None,
            n_iter: vec![500, 2000],
            big_m: 100.0,
            m: 0.0,
            n_r: None,
            seeds: vec![1, 2, 3],
            schedules: vec![Tunable, Constant],
            data_seed: 2024,
            max_inner: 1_000_000,
            fstar_iterations: 0,
            fstar_delta: 1e-8,
            sample_every: 0,
            linear_sign: -1.0,
            out: None,
        };
        match id {
            1 => Ok(Self {
                d: vec![30],
                p: 10.0,
                alpha: Some(100.0),
                r: CostExponent::List(vec![0.0, 1.0]),
                delta_ref_r0: Some(vec![1e-4]),
                seeds: vec![1, 2, 3, 4, 5],
                fstar_delta: 0.0,
                ..base
            }),
            2 => Ok(base),
            3 => Ok(Self {
                mu: vec![0.1],
                delta_ref: vec![1e-4],
                n_iter: vec![2000],
                n_r: Some(50),
                schedules: vec![OnlineTunable, Constant, Poly3, Linear],
                sample_every: 10,
                ..base
            }),
            other => Err(Error::InvalidInput(format!("experiment id must be 1, 2 or 3, got {other}"))),
        }
    }

    /// Defaults for `id` overridden by the lines of `text`.
    pub fn parse(text: &str, id: u8) -> Result<Self> {
        let mut cfg = Self::defaults(id)?;
        let mut seen_alpha = false;
        let mut seen_nr = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected 'key = value'", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let ctx = |e: Error| Error::Parse(format!("line {}: {key}: {e}", lineno + 1));
            match key {
                "experiment" => {
                    let v: u8 = scalar(value).map_err(ctx)?;
                    if v != id {
                        return Err(Error::InvalidInput(format!(
                            "config is for experiment {v} but experiment {id} was requested"
                        )));
                    }
                }
                "d" => cfg.d = list(value).map_err(ctx)?,
                "n" => cfg.n = scalar(value).map_err(ctx)?,
                "p" => cfg.p = scalar(value).map_err(ctx)?,
                "sigma" => cfg.sigma = scalar(value).map_err(ctx)?,
                "upsilon" => cfg.upsilon = scalar(value).map_err(ctx)?,
                "mu" => cfg.mu = list(value).map_err(ctx)?,
                "alpha" => {
                    cfg.alpha = Some(scalar(value).map_err(ctx)?);
                    seen_alpha = true;
                }
                "r" => {
                    cfg.r = if value == "auto" {
                        CostExponent::Auto
                    } else {
                        CostExponent::List(list(value).map_err(ctx)?)
                    }
                }
                "delta_ref" => cfg.delta_ref = list(value).map_err(ctx)?,
                "delta_ref_r0" => cfg.delta_ref_r0 = Some(list(value).map_err(ctx)?),
                "N" => cfg.n_iter = list(value).map_err(ctx)?,
                "M" => cfg.big_m = scalar(value).map_err(ctx)?,
                "m" => cfg.m = scalar(value).map_err(ctx)?,
                "N_r" => {
                    cfg.n_r = Some(scalar(value).map_err(ctx)?);
                    seen_nr = true;
                }
                "seeds" => cfg.seeds = list(value).map_err(ctx)?,
                "schedules" => cfg.schedules = list(value).map_err(ctx)?,
                "data_seed" => cfg.data_seed = scalar(value).map_err(ctx)?,
                "max_inner" => cfg.max_inner = scalar(value).map_err(ctx)?,
                "fstar_iterations" => cfg.fstar_iterations = scalar(value).map_err(ctx)?,
                "fstar_delta" => cfg.fstar_delta = scalar(value).map_err(ctx)?,
                "sample_every" => cfg.sample_every = scalar(value).map_err(ctx)?,
                "linear_sign" => cfg.linear_sign = scalar(value).map_err(ctx)?,
                "out" => cfg.out = Some(PathBuf::from(value)),
                other => return Err(Error::Parse(format!("line {}: unknown key '{other}'", lineno + 1))),
            }
        }
        if seen_alpha && id != 1 {
            return Err(Error::InvalidInput("alpha is only used by experiment 1".into()));
        }
        if seen_nr && id != 3 {
            return Err(Error::InvalidInput("N_r is only used by experiment 3".into()));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.d.is_empty() || self.d.contains(&0) || self.n == 0 {
            return bad("dimensions must be positive".into());
        }
        if !(self.p > 0.0 && self.sigma > 0.0 && self.upsilon > 0.0) {
            return bad("p, sigma and upsilon must be positive".into());
        }
        if self.mu.is_empty() || self.mu.iter().any(|m| !(*m >= 0.0)) {
            return bad("mu values must be nonnegative".into());
        }
        if self.delta_ref.is_empty() || self.delta_ref.iter().chain(self.delta_ref_r0.iter().flatten()).any(|d| !(*d > 0.0)) {
            return bad("reference inexactness values must be positive".into());
        }
        if self.n_iter.is_empty() || self.n_iter.contains(&0) {
            return bad("iteration counts must be positive".into());
        }
        if !(self.m >= 0.0 && self.m < 1.0 && self.big_m > 1.0) {
            return bad(format!("need 0 <= m < 1 < M, got m = {}, M = {}", self.m, self.big_m));
        }
        if self.seeds.is_empty() || self.schedules.is_empty() {
            return bad("need at least one seed and one schedule".into());
        }
        if !(self.fstar_delta >= 0.0) {
            return bad("fstar_delta must be nonnegative".into());
        }
        if self.linear_sign != 1.0 && self.linear_sign != -1.0 {
            return bad(format!("linear_sign must be 1 or -1, got {}", self.linear_sign));
        }
        match self.experiment {
            1 => {
                if !self.alpha.is_some_and(|a| a > 0.0) {
                    return bad("experiment 1 needs alpha > 0".into());
                }
                match &self.r {
                    CostExponent::Auto => return bad("experiment 1 needs explicit r values".into()),
                    CostExponent::List(rs) if rs.is_empty() || rs.iter().any(|r| !(*r >= 0.0)) => {
                        return bad("r values must be nonnegative".into())
                    }
                    _ => {}
                }
            }
            2 | 3 => {
                if self.alpha.is_some() {
                    return bad("alpha is only used by experiment 1".into());
                }
                if let CostExponent::List(rs) = &self.r {
                    if rs.len() != 1 || !(rs[0] >= 0.0) {
                        return bad("hull experiments take r = auto or a single r".into());
                    }
                }
            }
            other => return bad(format!("experiment id must be 1, 2 or 3, got {other}")),
        }
        if self.experiment == 3 {
            if !self.n_r.is_some_and(|n| n >= 1) {
                return bad("experiment 3 needs N_r >= 1".into());
            }
        } else if self.n_r.is_some() {
            return bad("N_r is only used by experiment 3".into());
        }
        if self.experiment != 3 && self.schedules.contains(&ScheduleFamily::OnlineTunable) {
            return bad("online_tunable needs the adaptive experiment 3".into());
        }
        Ok(())
    }

    /// Reference inexactness values for cost exponent `r`.
    pub fn delta_refs_for(&self, r: f64) -> &[f64] {
        match (&self.delta_ref_r0, r == 0.0) {
            (Some(v), true) => v,
            _ => &self.delta_ref,
        }
    }
}

fn scalar<T: FromStr>(s: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.trim().parse().map_err(|e: T::Err| Error::Parse(format!("'{s}': {e}")))
}

fn list<T: FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',').filter(|p| !p.trim().is_empty()).map(scalar).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for id in 1..=3 {
            ExperimentConfig::defaults(id).unwrap().validate().unwrap();
        }
        assert!(ExperimentConfig::defaults(4).is_err());
    }

    #[test]
    fn parse_overrides() {
        let text = "# desk run\nd = 20\nmu = 0, 0.5\nN = 10,20 # short\nseeds = 7\nschedules = tunable, constant\n";
        let cfg = ExperimentConfig::parse(text, 1).unwrap();
        assert_eq!(cfg.d, vec![20]);
        assert_eq!(cfg.mu, vec![0.0, 0.5]);
        assert_eq!(cfg.n_iter, vec![10, 20]);
        assert_eq!(cfg.seeds, vec![7]);
        assert_eq!(cfg.delta_refs_for(0.0), &[1e-4]);
        assert_eq!(cfg.delta_refs_for(1.0), &[1e-3]);
    }

    #[test]
    fn rejects_unknown_and_misplaced_keys() {
        assert!(ExperimentConfig::parse("bogus = 1", 1).is_err());
        assert!(ExperimentConfig::parse("alpha = 3", 2).is_err());
        assert!(ExperimentConfig::parse("N_r = 3", 1).is_err());
        assert!(ExperimentConfig::parse("experiment = 2", 1).is_err());
        assert!(ExperimentConfig::parse("m = 1.5", 2).is_err());
        assert!(ExperimentConfig::parse("d 3", 2).is_err());
        assert!(ExperimentConfig::parse("schedules = online_tunable", 2).is_err());
        assert!(ExperimentConfig::parse("r = auto", 1).is_err());
    }
}
