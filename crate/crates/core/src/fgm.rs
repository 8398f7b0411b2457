//! Fast gradient method over the unit simplex driven by inexact oracles.
//!
//! The update is the method of similar triangles: with `a = A_{k+1} − A_k`,
//!
//! ```text
//! y_k     = (a z_k + A_k x_k) / A_{k+1}
//! s_{k+1} = s_k + a (μ y_k − ∇f̃(y_k)),        s_0 = x_0
//! z_{k+1} = Π_Δ(s_{k+1} / (1 + μ A_{k+1}))
//! x_{k+1} = (a z_{k+1} + A_k x_k) / A_{k+1}
//! ```
//!
//! where `z_{k+1}` minimizes the aggregated lower model over the simplex.
//! Adaptive mode validates each candidate `L_{k+1}` with the local upper
//! model and shrinks or grows the step by fixed factors.

use thiserror::Error;

use crate::certificates::CertificateSequence;
use crate::error::{invalid, Error, Result};

/// One inexact first-order answer.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReply {
    pub value: f64,
    pub gradient: Vec<f64>,
    /// Certified inexactness of the pair.
    pub delta: f64,
    /// Inner work spent producing it.
    pub inner_work: f64,
}

/// Inexact first-order oracle queried at a requested accuracy.
pub trait Oracle {
    fn query(&mut self, x: &[f64], delta: f64) -> Result<OracleReply>;
}

impl<F> Oracle for F
where
    F: FnMut(&[f64], f64) -> Result<OracleReply>,
{
    fn query(&mut self, x: &[f64], delta: f64) -> Result<OracleReply> {
        self(x, delta)
    }
}

/// Euclidean projection onto `{x ⪰ 0, Σx = 1}`.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_unstable_by(|a, b| b.total_cmp(a));
    let (mut cum, mut theta) = (0.0, 0.0);
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FgmMode {
    FixedStep,
    Adaptive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FgmConfig {
    pub mode: FgmMode,
    pub l_init: f64,
    pub mu: f64,
    /// Number of outer iterations `N`.
    pub max_iterations: usize,
    /// Stepsize growth after an accepted step (`L ← L / factor`).
    pub increase_factor: f64,
    /// Stepsize shrink after a rejected step (`L ← L · factor`).
    pub decrease_factor: f64,
    /// Curvature at which the validation is known to hold.
    pub l_cap: f64,
    /// Objective sampling period; `0` disables sampling.
    pub sample_every: usize,
    /// Best-known solution, used only for the reported bound.
    pub reference_point: Option<Vec<f64>>,
}

impl FgmConfig {
    pub fn fixed_step(l: f64, mu: f64, n: usize) -> Self {
        Self {
            mode: FgmMode::FixedStep,
            l_init: l,
            mu,
            max_iterations: n,
            increase_factor: 1.5,
            decrease_factor: 2.0,
            l_cap: l,
            sample_every: 0,
            reference_point: None,
        }
    }

    pub fn adaptive(l_init: f64, l_cap: f64, mu: f64, n: usize) -> Self {
        Self {
            mode: FgmMode::Adaptive,
            l_cap,
            ..Self::fixed_step(l_init, mu, n)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l_init > 0.0 && self.l_init.is_finite()) {
            return invalid(format!("L_init must be positive, got {}", self.l_init));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return invalid(format!("mu must be nonnegative, got {}", self.mu));
        }
        if !(self.increase_factor > 1.0 && self.decrease_factor > 1.0) {
            return invalid("step factors must exceed 1");
        }
        if self.mode == FgmMode::Adaptive && !(self.l_init <= self.l_cap && self.l_cap.is_finite()) {
            return invalid(format!("need L_init <= L_cap, got {} > {}", self.l_init, self.l_cap));
        }
        Ok(())
    }
}

/// Current iterates of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub a_cert: f64,
    pub k: usize,
}

/// Running ingredients of `(R² + 2 Σ A_{k+1} δ_k) / A_N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTracker {
    pub r2: f64,
    pub weighted_inexactness: f64,
}

impl BoundTracker {
    pub fn new(r2: f64) -> Self {
        Self { r2, weighted_inexactness: 0.0 }
    }

    pub fn record(&mut self, a_next: f64, delta: f64) {
        self.weighted_inexactness += a_next * delta;
    }
}

pub fn bound_value(tracker: &BoundTracker, a_n: f64) -> Result<f64> {
    if !(a_n > 0.0) {
        return Err(Error::Domain {
            what: "A_N",
            value: a_n,
            range: "(0, inf)".into(),
        });
    }
    Ok((tracker.r2 + 2.0 * tracker.weighted_inexactness) / a_n)
}

/// Local upper-model test used to accept a candidate `L`.
pub fn line_search_validate(
    f_y: f64,
    grad_y: &[f64],
    f_x_next: f64,
    x_next: &[f64],
    y: &[f64],
    l_candidate: f64,
    delta: f64,
) -> bool {
    let (mut lin, mut sq) = (0.0, 0.0);
    for ((g, xn), yy) in grad_y.iter().zip(x_next).zip(y) {
        let d = xn - yy;
        lin += g * d;
        sq += d * d;
    }
    let model = f_y + lin + 0.5 * l_candidate * sq + 2.0 * delta;
    f_x_next <= model + 1e-12 * (1.0 + f_y.abs())
}

/// One outer iteration `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    /// Requested `δ_k`.
    pub delta: f64,
    /// Inexactness certified by the oracle at `y_k`.
    pub certified_delta: f64,
    /// Inner work of every oracle call made during the iteration.
    pub omega: f64,
    /// Accepted `L_{k+1}`.
    pub l: f64,
    /// `A_{k+1}`.
    pub a_cert: f64,
    /// Bound value after the step.
    pub bound: f64,
    /// Sampled objective at `x_k`.
    pub objective: Option<f64>,
    pub cum_work: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FgmOutput {
    pub state: IterateState,
    pub certificates: CertificateSequence,
    pub trajectory: Vec<IterationRecord>,
    pub tracker: BoundTracker,
    pub total_work: f64,
    pub oracle_calls: usize,
}

impl FgmOutput {
    pub fn x(&self) -> &[f64] {
        &self.state.x
    }
}

/// A run that stopped early, with everything recorded up to the failure.
#[derive(Debug, Error)]
#[error("{error} (after {} iterations)", partial.trajectory.len())]
pub struct FgmFailure {
    pub error: Error,
    pub partial: Box<FgmOutput>,
}

fn combine(out: &mut [f64], wa: f64, a: &[f64], wb: f64, b: &[f64]) {
    for ((o, p), q) in out.iter_mut().zip(a).zip(b) {
        *o = wa * p + wb * q;
    }
}

/// Runs `config.max_iterations` steps from `x0`.
///
/// `schedule(k, a_k)` returns `δ_k`, where `a_k = A_{k+1}` is the
/// certificate implied by the current candidate `L_{k+1}`. When
/// `config.sample_every > 0`, `sampler(x_k)` is recorded for every `k`
/// that is a multiple of it.
pub fn fgm_run<O, S>(
    config: &FgmConfig,
    x0: &[f64],
    oracle: &mut O,
    mut schedule: S,
    mut sampler: Option<&mut dyn FnMut(&[f64]) -> Result<f64>>,
) -> std::result::Result<FgmOutput, FgmFailure>
where
    O: Oracle + ?Sized,
    S: FnMut(usize, f64) -> f64,
{
    let fail = |error: Error, partial: FgmOutput| FgmFailure { error, partial: Box::new(partial) };
    let empty = |mu: f64| FgmOutput {
        state: IterateState { x: x0.to_vec(), y: x0.to_vec(), z: x0.to_vec(), a_cert: 0.0, k: 0 },
        certificates: CertificateSequence::new(mu.max(0.0)).unwrap_or_else(|_| {
            CertificateSequence::new(0.0).expect("zero is a valid modulus")
        }),
        trajectory: Vec::new(),
        tracker: BoundTracker::new(0.0),
        total_work: 0.0,
        oracle_calls: 0,
    };
    if let Err(e) = config.validate() {
        return Err(fail(e, empty(config.mu)));
    }
    let simplex_err = (x0.iter().sum::<f64>() - 1.0).abs();
    if x0.is_empty() || simplex_err > 1e-9 || x0.iter().any(|v| *v < 0.0) {
        return Err(fail(Error::InvalidInput("x0 must lie in the unit simplex".into()), empty(config.mu)));
    }
    let r2 = match &config.reference_point {
        Some(p) if p.len() == x0.len() => x0.iter().zip(p).map(|(a, b)| (a - b).powi(2)).sum(),
        Some(_) => {
            return Err(fail(Error::InvalidInput("reference point has wrong dimension".into()), empty(config.mu)))
        }
        None => 2.0,
    };

    let mu = config.mu;
    let d = x0.len();
    let mut out = empty(mu);
    out.tracker = BoundTracker::new(r2);
    let mut s = x0.to_vec();
    let (mut y, mut x_new, mut s_new) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let mut l = config.l_init;

    for k in 0..config.max_iterations {
        let objective = match sampler.as_mut() {
            Some(f) if config.sample_every > 0 && k % config.sample_every == 0 => {
                match f(&out.state.x) {
                    Ok(v) => Some(v),
                    Err(e) => return Err(fail(e, out)),
                }
            }
            _ => None,
        };
        let a_k = out.certificates.last();
        let mut omega = 0.0;
        let (a_next, delta_k, reply_y, z_new) = loop {
            let a_next = out.certificates.peek(l);
            let step = a_next - a_k;
            let delta_k = schedule(k, a_next);
            combine(&mut y, step / a_next, &out.state.z, a_k / a_next, &out.state.x);
            let reply_y = match oracle.query(&y, delta_k) {
                Ok(r) => r,
                Err(e) => return Err(fail(e, out)),
            };
            out.oracle_calls += 1;
            omega += reply_y.inner_work;
            for i in 0..d {
                s_new[i] = s[i] + step * (mu * y[i] - reply_y.gradient[i]);
            }
            let scale = 1.0 / (1.0 + mu * a_next);
            let z_new = project_simplex(&s_new.iter().map(|v| v * scale).collect::<Vec<_>>());
            combine(&mut x_new, step / a_next, &z_new, a_k / a_next, &out.state.x);

            if config.mode == FgmMode::FixedStep {
                break (a_next, delta_k, reply_y, z_new);
            }
            let reply_x = match oracle.query(&x_new, delta_k) {
                Ok(r) => r,
                Err(e) => return Err(fail(e, out)),
            };
            out.oracle_calls += 1;
            omega += reply_x.inner_work;
            let slack = reply_y.delta.max(reply_x.delta).max(delta_k);
            let ok = line_search_validate(reply_y.value, &reply_y.gradient, reply_x.value, &x_new, &y, l, slack);
            if ok || l >= config.l_cap {
                break (a_next, delta_k, reply_y, z_new);
            }
            l = (l * config.decrease_factor).min(config.l_cap);
        };

        if x_new.iter().chain(&z_new).chain(&s_new).any(|v| !v.is_finite()) || !reply_y.value.is_finite() {
            return Err(fail(Error::NonFinite { iteration: k }, out));
        }
        let accepted_l = l;
        if let Err(e) = out.certificates.push(accepted_l) {
            return Err(fail(e, out));
        }
        out.tracker.record(a_next, reply_y.delta);
        out.total_work += omega;
        std::mem::swap(&mut s, &mut s_new);
        out.state.x.copy_from_slice(&x_new);
        out.state.y.copy_from_slice(&y);
        out.state.z = z_new;
        out.state.a_cert = a_next;
        out.state.k = k + 1;
        let bound = bound_value(&out.tracker, a_next).unwrap_or(f64::INFINITY);
        out.trajectory.push(IterationRecord {
            k,
            delta: delta_k,
            certified_delta: reply_y.delta,
            omega,
            l: accepted_l,
            a_cert: a_next,
            bound,
            objective,
            cum_work: out.total_work,
        });
        if config.mode == FgmMode::Adaptive {
            l /= config.increase_factor;
        }
    }
    Ok(out)
}
