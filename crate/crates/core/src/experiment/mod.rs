//! Benchmark harness: builds schedules, matches budgets, runs the fast
//! gradient method with each schedule over seeds and writes CSV outputs.
//!
//! Experiments:
//!
//! 1. softmax objective with the synthetic noisy oracle, fixed step
//!    `1/(υ‖O‖² + μ)`, simulated work `h(δ)`;
//! 2. convex-hull objective with the inner FISTA oracle, fixed step
//!    `1/(2σ^{-1} + μ)`, measured inner work;
//! 3. same objective with adaptive steps capped at `σ^{-1} + μ` and the
//!    online schedule extrapolated from live certificates.
//!
//! Runs are independent and execute in parallel; results are collected in a
//! fixed order so outputs are reproducible byte for byte.

mod baselines;
mod config;
mod output;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use baselines::{baseline_schedule, match_budget, toy_problem, ScheduleFamily};
pub use config::{CostExponent, ExperimentConfig};
pub use output::{emit_outputs, summarize, SummaryRow};

use crate::certificates::{fixed_step_certificates, impact_coefficients_fgm};
use crate::cost_models::CostKind;
use crate::error::{Error, Result};
use crate::fgm::{fgm_run, FgmConfig, IterationRecord};
use crate::problems::{
    estimate_fstar, generate_scenarios, hull_oracle, kappa_hat, lower_model_min, softmax_value_grad,
    HullOracle, InnerState, NoisyOracle, OnExhaustion, ProblemParams, ScenarioData,
};
use crate::schedule::{online_extend_accuracy, Schedule, ScheduleProblem};

/// Inner accuracy used to evaluate objectives.
pub const EVAL_PRECISION: f64 = 1e-10;

/// One cell of the instance grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub index: usize,
    /// Index into the data settings (one per entry of `d`).
    pub setting: usize,
    pub d: usize,
    pub mu: f64,
    pub r: f64,
    pub n_iter: usize,
    pub delta_ref: f64,
}

impl InstanceSpec {
    pub fn label(&self) -> String {
        format!("d{}_mu{}_r{}_N{}_dref{}", self.d, self.mu, self.r, self.n_iter, self.delta_ref)
    }

    pub fn cost(&self) -> CostKind {
        if self.r == 0.0 {
            CostKind::Logarithmic
        } else {
            CostKind::Power(self.r)
        }
    }
}

/// One run of one schedule on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub instance: usize,
    pub family: ScheduleFamily,
    pub seed: u64,
    pub trajectory: Vec<IterationRecord>,
    /// `F(x_N) − F*`, absent if the run failed.
    pub terminal_gap: Option<f64>,
    pub total_work: f64,
    pub final_bound: Option<f64>,
    pub error: Option<String>,
    pub wall_seconds: f64,
}

/// A schedule computed before the runs (the bootstrap part for the online
/// family).
#[derive(Debug, Clone, PartialEq)]
pub struct SolvedSchedule {
    pub instance: usize,
    pub family: ScheduleFamily,
    pub schedule: Schedule,
}

/// Best-known point and `F*` lower bound for a `(setting, μ)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub setting: usize,
    pub mu: f64,
    pub x_hat: Vec<f64>,
    pub fstar: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub instances: Vec<InstanceSpec>,
    /// `(instance, a, b)` used to build the offline schedules.
    pub coefficients: Vec<(usize, Vec<f64>, Vec<f64>)>,
    pub schedules: Vec<SolvedSchedule>,
    pub references: Vec<Reference>,
    pub runs: Vec<RunResult>,
}

struct Plan {
    spec: InstanceSpec,
    a: Vec<f64>,
    b: Vec<f64>,
    schedules: Vec<(ScheduleFamily, Result<Schedule>)>,
}

fn setting_seed(data_seed: u64, setting: usize) -> u64 {
    data_seed.wrapping_add((setting as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Uniform draw on the simplex.
pub fn uniform_simplex(d: usize, rng: &mut impl Rng) -> Vec<f64> {
    let e: Vec<f64> = (0..d).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

fn x0_for(seed: u64, d: usize) -> Vec<f64> {
    uniform_simplex(d, &mut stream(seed, 0))
}

fn fixed_curvature(cfg: &ExperimentConfig, data: &ScenarioData) -> f64 {
    match cfg.experiment {
        1 => data.softmax_smoothness(),
        2 => 2.0 / cfg.sigma + data.params.mu,
        _ => 1.0 / cfg.sigma + data.params.mu,
    }
}

/// Hull objective at `x`, evaluated to [`EVAL_PRECISION`].
fn hull_value(data: &ScenarioData, x: &[f64], state: &mut InnerState) -> Result<f64> {
    Ok(hull_oracle(data, x, EVAL_PRECISION, state, HullOracle::DEFAULT_MAX_INNER, OnExhaustion::Certify)?.value)
}

fn data_settings(cfg: &ExperimentConfig) -> Result<Vec<ScenarioData>> {
    cfg.d
        .par_iter()
        .enumerate()
        .map(|(i, &d)| {
            let params = ProblemParams { sigma: cfg.sigma, upsilon: cfg.upsilon, mu: 0.0 };
            generate_scenarios(cfg.n, d, cfg.p, setting_seed(cfg.data_seed, i), params)
        })
        .collect()
}

fn exponents(cfg: &ExperimentConfig, data: &ScenarioData) -> Vec<f64> {
    match &cfg.r {
        CostExponent::List(rs) => rs.clone(),
        CostExponent::Auto if kappa_hat(data) > 0.0 => vec![0.0],
        CostExponent::Auto => vec![0.5],
    }
}

/// Expands the configuration into the instance grid.
pub fn instance_grid(cfg: &ExperimentConfig, settings: &[ScenarioData]) -> Vec<InstanceSpec> {
    let mut out = Vec::new();
    for (setting, data) in settings.iter().enumerate() {
        for &mu in &cfg.mu {
            for r in exponents(cfg, data) {
                for &n_iter in &cfg.n_iter {
                    for &delta_ref in cfg.delta_refs_for(r) {
                        out.push(InstanceSpec {
                            index: out.len(),
                            setting,
                            d: data.d(),
                            mu,
                            r,
                            n_iter,
                            delta_ref,
                        });
                    }
                }
            }
        }
    }
    out
}

fn cost_distortion(cfg: &ExperimentConfig, data: &ScenarioData, r: f64) -> f64 {
    if cfg.experiment == 1 {
        return 1.0;
    }
    let s = data.spectrum();
    if r == 0.0 && s.lambda_min > 0.0 {
        (s.lambda_max / s.lambda_min).sqrt()
    } else {
        s.lambda_max.sqrt()
    }
}

fn plan_instance(cfg: &ExperimentConfig, spec: &InstanceSpec, data: &ScenarioData) -> Result<Plan> {
    let l = fixed_curvature(cfg, data);
    let n = spec.n_iter;
    let certs = fixed_step_certificates(n, l, spec.mu)?;
    let (a, _) = impact_coefficients_fgm(&certs, n)?;
    let b = vec![cost_distortion(cfg, data, spec.r); n];
    let problem = |len: usize| {
        ScheduleProblem::new(a[..len].to_vec(), b[..len].to_vec(), spec.cost(), spec.delta_ref, cfg.m, cfg.big_m)
    };
    let schedules = cfg
        .schedules
        .iter()
        .map(|&family| {
            let s = match family {
                ScheduleFamily::Tunable => problem(n).and_then(|p| match_budget(family, &p)),
                // bootstrap only; later iterations are extrapolated during the run
                ScheduleFamily::OnlineTunable => problem(cfg.n_r.unwrap_or(1).min(n))
                    .and_then(|p| match_budget(ScheduleFamily::Tunable, &p)),
                ScheduleFamily::Constant => {
                    Ok(Schedule::accuracy(vec![spec.delta_ref; spec.n_iter]))
                }
                other => baseline_schedule(other, spec.delta_ref, spec.mu, l, spec.n_iter, cfg.linear_sign),
            };
            (family, s)
        })
        .collect();
    Ok(Plan { spec: spec.clone(), a, b, schedules })
}

fn reference_iterations(cfg: &ExperimentConfig) -> usize {
    if cfg.fstar_iterations > 0 {
        return cfg.fstar_iterations;
    }
    let n_max = cfg.n_iter.iter().copied().max().unwrap_or(1);
    if cfg.experiment == 1 { 50 * n_max } else { 4 * n_max }
}

/// Restart period of the reference run when `μ > 0`; keeps the certificates
/// (which grow geometrically) far from overflow.
const REFERENCE_RESTART: usize = 1000;

fn reference_run(cfg: &ExperimentConfig, setting: usize, data: &ScenarioData) -> Result<Reference> {
    let mu = data.params.mu;
    let d = data.d();
    let mut x = vec![1.0 / d as f64; d];
    let mut remaining = reference_iterations(cfg);
    let chunk = if mu > 0.0 { REFERENCE_RESTART } else { remaining };
    let l = fixed_curvature(cfg, data);
    let delta = if cfg.fstar_delta > 0.0 { cfg.fstar_delta } else { 1e-8 };
    let mut exact = NoisyOracle::new(data, 1.0, CostKind::Power(1.0), 0);
    let mut hull = HullOracle::new(data);
    hull.max_inner = cfg.max_inner;
    hull.on_exhaustion = OnExhaustion::Certify;
    while remaining > 0 {
        let n = remaining.min(chunk);
        remaining -= n;
        let fgm_cfg =
            if cfg.experiment == 3 { FgmConfig::adaptive(l, l, mu, n) } else { FgmConfig::fixed_step(l, mu, n) };
        let out = if cfg.experiment == 1 {
            fgm_run(&fgm_cfg, &x, &mut exact, |_, _| cfg.fstar_delta, None)
        } else {
            fgm_run(&fgm_cfg, &x, &mut hull, |_, _| delta, None)
        };
        x = out.map_err(|e| e.error)?.x().to_vec();
    }
    let fstar = if cfg.experiment == 1 {
        let (v, g) = softmax_value_grad(data, &x);
        lower_model_min(v, &g, &x, mu)
    } else {
        estimate_fstar(data, &x, EVAL_PRECISION, &mut hull.state)?
    };
    log::info!("reference setting {setting} mu {mu}: F* >= {fstar:.10e}");
    Ok(Reference { setting, mu, x_hat: x, fstar })
}

struct Job<'a> {
    plan: &'a Plan,
    family: ScheduleFamily,
    schedule: &'a Schedule,
    seed: u64,
    data: &'a ScenarioData,
    reference: &'a Reference,
}

fn run_job(cfg: &ExperimentConfig, job: &Job<'_>) -> RunResult {
    let started = Instant::now();
    let spec = &job.plan.spec;
    let data = job.data;
    let x0 = x0_for(job.seed, data.d());
    let l = fixed_curvature(cfg, data);
    let mut fgm_cfg = if cfg.experiment == 3 {
        FgmConfig::adaptive(l, l, spec.mu, spec.n_iter)
    } else {
        FgmConfig::fixed_step(l, spec.mu, spec.n_iter)
    };
    fgm_cfg.reference_point = Some(job.reference.x_hat.clone());
    fgm_cfg.sample_every = cfg.sample_every;

    let values = &job.schedule.values;
    let (lo, hi) = (cfg.m * spec.delta_ref, cfg.big_m * spec.delta_ref);
    let n_r = values.len();
    let anchor = (job.plan.a[n_r - 1], job.plan.b[n_r - 1], values[n_r - 1]);
    let b_const = job.plan.b[0];
    let schedule = |k: usize, a_k: f64| -> f64 {
        if k < n_r {
            values[k]
        } else {
            online_extend_accuracy(anchor, (a_k, b_const), spec.r, (lo, hi))
        }
    };

    let mut sample_state = InnerState::uniform(data);
    let mut sampler = |x: &[f64]| -> Result<f64> {
        if cfg.experiment == 1 {
            Ok(softmax_value_grad(data, x).0)
        } else {
            hull_value(data, x, &mut sample_state)
        }
    };
    let sampler_ref: Option<&mut dyn FnMut(&[f64]) -> Result<f64>> =
        if cfg.sample_every > 0 { Some(&mut sampler) } else { None };

    let noise_stream = 1 + spec.index as u64;
    let (run, terminal) = if cfg.experiment == 1 {
        let alpha = cfg.alpha.unwrap_or(1.0);
        let mut oracle = NoisyOracle::with_rng(data, alpha, spec.cost(), stream(job.seed, noise_stream));
        let run = fgm_run(&fgm_cfg, &x0, &mut oracle, schedule, sampler_ref);
        let terminal = run.as_ref().ok().map(|o| Ok(softmax_value_grad(data, o.x()).0));
        (run, terminal)
    } else {
        let mut oracle = HullOracle::new(data);
        oracle.max_inner = cfg.max_inner;
        oracle.on_exhaustion = OnExhaustion::Certify;
        let run = fgm_run(&fgm_cfg, &x0, &mut oracle, schedule, sampler_ref);
        let terminal = run.as_ref().ok().map(|o| hull_value(data, o.x(), &mut oracle.state));
        (run, terminal)
    };

    let mut result = RunResult {
        instance: spec.index,
        family: job.family,
        seed: job.seed,
        trajectory: Vec::new(),
        terminal_gap: None,
        total_work: 0.0,
        final_bound: None,
        error: None,
        wall_seconds: 0.0,
    };
    match run {
        Ok(out) => {
            match terminal {
                Some(Ok(v)) => result.terminal_gap = Some(v - job.reference.fstar),
                Some(Err(e)) => result.error = Some(e.to_string()),
                None => {}
            }
            result.total_work = out.total_work;
            result.final_bound = out.trajectory.last().map(|r| r.bound);
            result.trajectory = out.trajectory;
        }
        Err(fail) => {
            result.error = Some(fail.to_string());
            result.total_work = fail.partial.total_work;
            result.trajectory = fail.partial.trajectory;
        }
    }
    result.wall_seconds = started.elapsed().as_secs_f64();
    log::info!(
        "exp {} {} {} seed {}: gap {:?}, work {:.0}, {:.1}s",
        cfg.experiment,
        job.family,
        spec.label(),
        job.seed,
        result.terminal_gap,
        result.total_work,
        result.wall_seconds
    );
    if let Some(e) = &result.error {
        log::warn!("exp {} {} {} seed {}: {e}", cfg.experiment, job.family, spec.label(), job.seed);
    }
    result
}

/// Runs every `(instance, schedule, seed)` combination of `cfg`.
///
/// Instance-level failures (for example an infeasible schedule problem) are
/// recorded as failed runs; the harness continues with the rest.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let settings = data_settings(cfg)?;
    let instances = instance_grid(cfg, &settings);

    let mut pairs: Vec<(usize, f64)> = instances.iter().map(|s| (s.setting, s.mu)).collect();
    pairs.dedup();
    pairs.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pairs.dedup();
    let with_mu = |setting: usize, mu: f64| -> Result<ScenarioData> {
        settings[setting].with_params(ProblemParams { mu, ..settings[setting].params })
    };
    let datasets: Vec<ScenarioData> = pairs.iter().map(|&(s, mu)| with_mu(s, mu)).collect::<Result<_>>()?;
    let references: Vec<Reference> = pairs
        .par_iter()
        .zip(datasets.par_iter())
        .map(|(&(s, _), data)| reference_run(cfg, s, data))
        .collect::<Result<_>>()?;
    let pair_of = |spec: &InstanceSpec| {
        pairs
            .iter()
            .position(|&(s, mu)| s == spec.setting && mu == spec.mu)
            .expect("every instance has a reference")
    };

    let plans: Vec<std::result::Result<Plan, (InstanceSpec, Error)>> = instances
        .par_iter()
        .map(|spec| plan_instance(cfg, spec, &datasets[pair_of(spec)]).map_err(|e| (spec.clone(), e)))
        .collect();

    let mut coefficients = Vec::new();
    let mut schedules = Vec::new();
    let mut failed = Vec::new();
    let mut jobs = Vec::new();
    for plan in &plans {
        let plan = match plan {
            Ok(p) => p,
            Err((spec, e)) => {
                for &family in &cfg.schedules {
                    failed.push((spec.index, family, e.to_string()));
                }
                continue;
            }
        };
        coefficients.push((plan.spec.index, plan.a.clone(), plan.b.clone()));
        let pair = pair_of(&plan.spec);
        for (family, s) in &plan.schedules {
            match s {
                Ok(s) => {
                    schedules.push(SolvedSchedule { instance: plan.spec.index, family: *family, schedule: s.clone() });
                    for &seed in &cfg.seeds {
                        jobs.push(Job {
                            plan,
                            family: *family,
                            schedule: s,
                            seed,
                            data: &datasets[pair],
                            reference: &references[pair],
                        });
                    }
                }
                Err(e) => failed.push((plan.spec.index, *family, e.to_string())),
            }
        }
    }

    let mut runs: Vec<RunResult> = jobs.par_iter().map(|job| run_job(cfg, job)).collect();
    for (instance, family, msg) in failed {
        log::warn!("instance {instance} {family}: {msg}");
        for &seed in &cfg.seeds {
            runs.push(RunResult {
                instance,
                family,
                seed,
                trajectory: Vec::new(),
                terminal_gap: None,
                total_work: 0.0,
                final_bound: None,
                error: Some(msg.clone()),
                wall_seconds: 0.0,
            });
        }
    }
    runs.sort_by(|a, b| {
        (a.instance, a.family, a.seed).cmp(&(b.instance, b.family, b.seed))
    });
    Ok(ExperimentOutput {
        config: cfg.clone(),
        instances,
        coefficients,
        schedules,
        references,
        runs,
    })
}
