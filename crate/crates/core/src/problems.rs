//! Test problems and their oracles.
//!
//! Both problems minimize over the unit simplex `Δ ⊂ ℝ^d` and are built from
//! a scenario matrix `O ∈ ℝ^{n×d}`:
//!
//! - the softmax-smoothed worst case
//!   `f(x) = υ^{-1} log(n^{-1} Σ exp(υ⟨θ_i, x⟩)) + (μ/2)‖x‖²`, queried through
//!   a synthetic oracle that corrupts the gradient with noise of radius `αδ`;
//! - the worst case over the convex hull with an inner regularizer,
//!   `f(x) = (μ/2)‖x‖² + max_{w∈Δ_n} q(w; x)` with
//!   `q(w; x) = ⟨Oᵀw, x⟩ − (σ/2)‖Oᵀw − θ̄‖²`, whose oracle runs FISTA on the
//!   inner problem until a Frank-Wolfe gap certifies accuracy `δ`.

use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Normal, StandardNormal};

use crate::cost_models::CostKind;
use crate::error::{invalid, Error, Result};
use crate::fgm::{project_simplex, Oracle, OracleReply};

/// Regularization constants shared by both problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    /// Inner regularization `σ ≥ 0`.
    pub sigma: f64,
    /// Softmax temperature `υ > 0`.
    pub upsilon: f64,
    /// Outer regularization `μ ≥ 0`.
    pub mu: f64,
}

impl Default for ProblemParams {
    fn default() -> Self {
        Self { sigma: 1e-3, upsilon: 1.0, mu: 0.0 }
    }
}

/// Extreme eigenvalues of `OOᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub lambda_max: f64,
    /// Clipped to zero below `1e-10 · λ_max`.
    pub lambda_min: f64,
}

impl Spectrum {
    fn of(o: &DMatrix<f64>) -> Self {
        let (n, d) = o.shape();
        let gram = if n <= d { o * o.transpose() } else { o.transpose() * o };
        let eig = SymmetricEigen::new(gram).eigenvalues;
        let lambda_max = eig.max().max(0.0);
        let raw_min = if n <= d { eig.min() } else { 0.0 };
        let lambda_min = if raw_min < 1e-10 * lambda_max { 0.0 } else { raw_min };
        Self { lambda_max, lambda_min }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioData {
    o: DMatrix<f64>,
    theta_bar: DVector<f64>,
    pub params: ProblemParams,
    /// Generation scale `p`.
    pub p: f64,
    spectrum: Spectrum,
}

impl ScenarioData {
    pub fn new(o: DMatrix<f64>, params: ProblemParams, p: f64) -> Result<Self> {
        if o.nrows() == 0 || o.ncols() == 0 {
            return invalid("scenario matrix must be nonempty");
        }
        if o.iter().any(|v| !v.is_finite()) {
            return invalid("scenario matrix has non-finite entries");
        }
        if !(params.sigma >= 0.0 && params.upsilon > 0.0 && params.mu >= 0.0 && p > 0.0) {
            return invalid(format!("invalid constants {params:?}, p = {p}"));
        }
        let theta_bar = o.row_mean().transpose();
        let spectrum = Spectrum::of(&o);
        Ok(Self { o, theta_bar, params, p, spectrum })
    }

    /// Same scenarios with other constants.
    pub fn with_params(&self, params: ProblemParams) -> Result<Self> {
        if !(params.sigma >= 0.0 && params.upsilon > 0.0 && params.mu >= 0.0) {
            return invalid(format!("invalid constants {params:?}"));
        }
        Ok(Self { params, ..self.clone() })
    }

    pub fn n(&self) -> usize {
        self.o.nrows()
    }

    pub fn d(&self) -> usize {
        self.o.ncols()
    }

    pub fn o(&self) -> &DMatrix<f64> {
        &self.o
    }

    pub fn theta_bar(&self) -> &DVector<f64> {
        &self.theta_bar
    }

    pub fn spectrum(&self) -> Spectrum {
        self.spectrum
    }

    /// `‖O‖² = λ_max(OOᵀ)`.
    pub fn norm_sq(&self) -> f64 {
        self.spectrum.lambda_max
    }

    /// Smoothness of the softmax objective, `υ‖O‖² + μ`.
    pub fn softmax_smoothness(&self) -> f64 {
        self.params.upsilon * self.norm_sq() + self.params.mu
    }
}

/// Scenarios `θ_i ~ N(0, I_d / p)`, drawn row by row from a seeded stream.
pub fn generate_scenarios(n: usize, d: usize, p: f64, seed: u64, params: ProblemParams) -> Result<ScenarioData> {
    if n == 0 || d == 0 {
        return invalid("need n, d >= 1");
    }
    if !(p > 0.0 && p.is_finite()) {
        return invalid(format!("p must be positive, got {p}"));
    }
    let normal = Normal::new(0.0, (1.0 / p).sqrt()).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..n * d).map(|_| rng.sample(normal)).collect();
    ScenarioData::new(DMatrix::from_row_slice(n, d, &data), params, p)
}

/// `λ_min(OOᵀ)/λ_max(OOᵀ)`, zero when `OOᵀ` is numerically singular.
pub fn kappa_hat(data: &ScenarioData) -> f64 {
    let s = data.spectrum;
    if s.lambda_max > 0.0 {
        s.lambda_min / s.lambda_max
    } else {
        0.0
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Value and gradient of the softmax objective.
pub fn softmax_value_grad(data: &ScenarioData, x: &[f64]) -> (f64, Vec<f64>) {
    let ProblemParams { upsilon, mu, .. } = data.params;
    let z = &data.o * DVector::from_column_slice(x);
    let m = z.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(upsilon * b));
    let e: DVector<f64> = z.map(|zi| (upsilon * zi - m).exp());
    let total = e.sum();
    let value = (m + (total / data.n() as f64).ln()) / upsilon + 0.5 * mu * dot(x, x);
    let mut g = data.o.tr_mul(&(e / total));
    for (gi, xi) in g.iter_mut().zip(x) {
        *gi += mu * xi;
    }
    (value, g.as_slice().to_vec())
}

fn unit_sphere(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let u: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dot(&u, &u).sqrt();
        if norm > 0.0 {
            return u.into_iter().map(|v| v / norm).collect();
        }
    }
}

/// One reply of the synthetic oracle.
///
/// The gradient is shifted by `αδ·u`, `u` uniform on the sphere, which
/// yields `4αδ`-inexact information; the simulated work is `h(δ)` (zero for
/// an exact query).
pub fn noisy_oracle(
    data: &ScenarioData,
    x: &[f64],
    delta: f64,
    alpha: f64,
    cost: CostKind,
    rng: &mut ChaCha8Rng,
) -> Result<OracleReply> {
    if !(delta >= 0.0 && alpha > 0.0) {
        return invalid(format!("need delta >= 0 and alpha > 0, got {delta}, {alpha}"));
    }
    let (value, mut gradient) = softmax_value_grad(data, x);
    if delta == 0.0 {
        return Ok(OracleReply { value, gradient, delta: 0.0, inner_work: 0.0 });
    }
    let u = unit_sphere(x.len(), rng);
    for (g, ui) in gradient.iter_mut().zip(&u) {
        *g += alpha * delta * ui;
    }
    Ok(OracleReply {
        value,
        gradient,
        delta: 4.0 * alpha * delta,
        inner_work: cost.value(delta).max(0.0),
    })
}

/// The synthetic oracle as a stateful [`Oracle`].
#[derive(Debug, Clone)]
pub struct NoisyOracle<'a> {
    pub data: &'a ScenarioData,
    pub alpha: f64,
    pub cost: CostKind,
    rng: ChaCha8Rng,
}

impl<'a> NoisyOracle<'a> {
    pub fn new(data: &'a ScenarioData, alpha: f64, cost: CostKind, seed: u64) -> Self {
        Self::with_rng(data, alpha, cost, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn with_rng(data: &'a ScenarioData, alpha: f64, cost: CostKind, rng: ChaCha8Rng) -> Self {
        Self { data, alpha, cost, rng }
    }
}

impl Oracle for NoisyOracle<'_> {
    fn query(&mut self, x: &[f64], delta: f64) -> Result<OracleReply> {
        noisy_oracle(self.data, x, delta, self.alpha, self.cost, &mut self.rng)
    }
}

/// `q(w; x)` from a precomputed `v = Oᵀw`.
fn q_from_v(data: &ScenarioData, v: &DVector<f64>, x: &DVector<f64>) -> f64 {
    let diff = v - &data.theta_bar;
    v.dot(x) - 0.5 * data.params.sigma * diff.norm_squared()
}

/// `∇q = O(x − σ(v − θ̄))` from a precomputed `v = Oᵀw`.
fn q_grad_from_v(data: &ScenarioData, v: &DVector<f64>, x: &DVector<f64>) -> DVector<f64> {
    let inner = x - (v - &data.theta_bar) * data.params.sigma;
    &data.o * inner
}

/// Value and gradient of the inner objective `q(·; x)` at `w`.
pub fn inner_q_value_grad(data: &ScenarioData, w: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    let v = data.o.tr_mul(&DVector::from_column_slice(w));
    let xv = DVector::from_column_slice(x);
    let g = q_grad_from_v(data, &v, &xv);
    (q_from_v(data, &v, &xv), g.as_slice().to_vec())
}

/// Linearization bound `max_{u∈Δ} q(w) + ⟨∇q(w), u − w⟩`.
fn linear_upper(q: f64, g: &[f64], w: &[f64]) -> f64 {
    let gmax = g.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    q + gmax - dot(g, w)
}

/// Frank-Wolfe gap of `current` given the linearization points in `history`.
///
/// Every point yields an upper bound on `max q(·; x)` by concavity; the
/// tightest one, minus `q(current)`, bounds the suboptimality of `current`.
pub fn fw_gap(data: &ScenarioData, x: &[f64], history: &[Vec<f64>], current: &[f64]) -> Result<f64> {
    if history.is_empty() {
        return invalid("fw_gap needs at least one linearization point");
    }
    let upper = history
        .iter()
        .map(|w| {
            let (q, g) = inner_q_value_grad(data, w, x);
            linear_upper(q, &g, w)
        })
        .fold(f64::INFINITY, f64::min);
    Ok((upper - inner_q_value_grad(data, current, x).0).max(0.0))
}

/// Warm-start memory of the inner solver.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerState {
    w: DVector<f64>,
    /// Cached `Oᵀw`.
    v: DVector<f64>,
}

impl InnerState {
    /// Uniform weights.
    pub fn uniform(data: &ScenarioData) -> Self {
        let n = data.n();
        Self::from_weights(data, &vec![1.0 / n as f64; n])
    }

    /// Projects `w` onto the simplex and caches `Oᵀw`.
    pub fn from_weights(data: &ScenarioData, w: &[f64]) -> Self {
        let w = DVector::from_vec(project_simplex(w));
        let v = data.o.tr_mul(&w);
        Self { w, v }
    }

    pub fn weights(&self) -> &[f64] {
        self.w.as_slice()
    }
}

/// Outcome of one inner solve.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolve {
    /// Best iterate found.
    pub w: Vec<f64>,
    /// `q(w; x)`.
    pub value: f64,
    /// Certified Frank-Wolfe gap of `w`.
    pub gap: f64,
    /// Gap after each iteration, starting with the warm start.
    pub gap_history: Vec<f64>,
    /// Inner iterations spent.
    pub omega: u64,
    /// Stopped by the iteration cap rather than the gap test.
    pub exhausted: bool,
}

/// Maximizes `q(·; x)` over the simplex with projected FISTA from the warm
/// start in `state`, stopping as soon as the Frank-Wolfe gap is `≤ δ`.
///
/// Momentum is `(1 − √κ̂)/(1 + √κ̂)` when `κ̂ > 0` and the usual `t_j`
/// sequence otherwise. Linearizations are taken at the extrapolated points,
/// which costs two products with `O` per iteration. `state` is updated to
/// the returned iterate.
pub fn fista_inner(
    data: &ScenarioData,
    x: &[f64],
    delta_target: f64,
    state: &mut InnerState,
    max_inner: u64,
) -> Result<InnerSolve> {
    if !(delta_target > 0.0) {
        return invalid(format!("inner target must be positive, got {delta_target}"));
    }
    if state.w.len() != data.n() || x.len() != data.d() {
        return invalid("dimension mismatch in inner solve");
    }
    let xv = DVector::from_column_slice(x);
    let lip = data.params.sigma * data.spectrum.lambda_max;
    let kappa = kappa_hat(data);
    let strong_beta = (kappa > 0.0).then(|| (1.0 - kappa.sqrt()) / (1.0 + kappa.sqrt()));

    let mut w = state.w.clone();
    let mut v = state.v.clone();
    let q_w = q_from_v(data, &v, &xv);
    let (mut best_w, mut best_v, mut best_q) = (w.clone(), v.clone(), q_w);

    let mut y = w.clone();
    let mut g = q_grad_from_v(data, &v, &xv);
    let mut upper = linear_upper(q_w, g.as_slice(), y.as_slice());
    let mut gap = (upper - best_q).max(0.0);
    let mut gap_history = vec![gap];
    let mut omega = 0u64;
    let mut t = 1.0f64;

    while gap > delta_target && omega < max_inner {
        let w_new = if lip > 0.0 {
            let step: Vec<f64> = y.iter().zip(g.iter()).map(|(yi, gi)| yi + gi / lip).collect();
            DVector::from_vec(project_simplex(&step))
        } else {
            // linear inner problem: the best vertex is exact
            let mut e = DVector::zeros(data.n());
            e[g.imax()] = 1.0;
            e
        };
        let v_new = data.o.tr_mul(&w_new);
        let q_new = q_from_v(data, &v_new, &xv);
        if q_new > best_q {
            best_q = q_new;
            best_w.copy_from(&w_new);
            best_v.copy_from(&v_new);
        }
        let beta = strong_beta.unwrap_or_else(|| {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let b = (t - 1.0) / t_next;
            t = t_next;
            b
        });
        y = &w_new + (&w_new - &w) * beta;
        let v_y = &v_new + (&v_new - &v) * beta;
        g = q_grad_from_v(data, &v_y, &xv);
        upper = upper.min(linear_upper(q_from_v(data, &v_y, &xv), g.as_slice(), y.as_slice()));
        w = w_new;
        v = v_new;
        omega += 1;
        gap = (upper - best_q).max(0.0);
        gap_history.push(gap);
    }
    state.w = best_w;
    state.v = best_v;
    Ok(InnerSolve {
        w: state.w.as_slice().to_vec(),
        value: best_q,
        gap,
        gap_history,
        omega,
        exhausted: gap > delta_target,
    })
}

/// What the hull oracle does when the inner solver hits its cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnExhaustion {
    /// Return [`Error::InnerExhausted`].
    Fail,
    /// Answer anyway, certifying the achieved gap instead of `δ`.
    Certify,
}

/// `(f̃(x), ∇f̃(x)) = ((μ/2)‖x‖² + q(w_x; x), μx + Oᵀw_x)` with `w_x` from
/// a warm-started inner solve to accuracy `δ`.
pub fn hull_oracle(
    data: &ScenarioData,
    x: &[f64],
    delta: f64,
    state: &mut InnerState,
    max_inner: u64,
    on_exhaustion: OnExhaustion,
) -> Result<OracleReply> {
    let solve = fista_inner(data, x, delta, state, max_inner)?;
    if solve.exhausted && on_exhaustion == OnExhaustion::Fail {
        return Err(Error::InnerExhausted {
            achieved: solve.gap,
            requested: delta,
            work: solve.omega,
        });
    }
    let mu = data.params.mu;
    let mut gradient = state.v.as_slice().to_vec();
    for (gi, xi) in gradient.iter_mut().zip(x) {
        *gi += mu * xi;
    }
    Ok(OracleReply {
        value: 0.5 * mu * dot(x, x) + solve.value,
        gradient,
        delta: if solve.exhausted { solve.gap } else { delta },
        inner_work: solve.omega as f64,
    })
}

/// The hull oracle with its own warm-start state.
#[derive(Debug, Clone)]
pub struct HullOracle<'a> {
    pub data: &'a ScenarioData,
    pub state: InnerState,
    pub max_inner: u64,
    pub on_exhaustion: OnExhaustion,
}

impl<'a> HullOracle<'a> {
    pub const DEFAULT_MAX_INNER: u64 = 1_000_000;

    pub fn new(data: &'a ScenarioData) -> Self {
        Self {
            data,
            state: InnerState::uniform(data),
            max_inner: Self::DEFAULT_MAX_INNER,
            on_exhaustion: OnExhaustion::Fail,
        }
    }
}

impl Oracle for HullOracle<'_> {
    fn query(&mut self, x: &[f64], delta: f64) -> Result<OracleReply> {
        hull_oracle(self.data, x, delta, &mut self.state, self.max_inner, self.on_exhaustion)
    }
}

/// Minimum over the simplex of the lower model
/// `value + ⟨grad, x − x̂⟩ + (μ/2)‖x − x̂‖²`.
pub fn lower_model_min(value: f64, grad: &[f64], x_hat: &[f64], mu: f64) -> f64 {
    if mu > 0.0 {
        let target: Vec<f64> = x_hat.iter().zip(grad).map(|(x, g)| x - g / mu).collect();
        let xm = project_simplex(&target);
        let (mut lin, mut sq) = (0.0, 0.0);
        for ((xi, hi), gi) in xm.iter().zip(x_hat).zip(grad) {
            lin += gi * (xi - hi);
            sq += (xi - hi) * (xi - hi);
        }
        value + lin + 0.5 * mu * sq
    } else {
        let gmin = grad.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        value + gmin - dot(grad, x_hat)
    }
}

/// Lower bound on `F*` from an inner solve at `precision` around `x_hat`.
///
/// `f(x) ≥ (μ/2)‖x‖² + q(w; x)` for any inner point `w`, and the right side
/// equals the lower model at `x̂`, so the bound holds whatever `precision`.
pub fn estimate_fstar(data: &ScenarioData, x_hat: &[f64], precision: f64, state: &mut InnerState) -> Result<f64> {
    let reply = hull_oracle(data, x_hat, precision, state, HullOracle::DEFAULT_MAX_INNER, OnExhaustion::Certify)?;
    Ok(lower_model_min(reply.value, &reply.gradient, x_hat, data.params.mu))
}

/// Writes `O` as CSV rows preceded by `# key = value` header lines.
pub fn write_instance<W: Write>(mut out: W, data: &ScenarioData, seed: Option<u64>) -> Result<()> {
    let ProblemParams { sigma, upsilon, mu } = data.params;
    writeln!(out, "# sigma = {sigma:.16e}")?;
    writeln!(out, "# upsilon = {upsilon:.16e}")?;
    writeln!(out, "# mu = {mu:.16e}")?;
    writeln!(out, "# p = {:.16e}", data.p)?;
    if let Some(s) = seed {
        writeln!(out, "# seed = {s}")?;
    }
    for row in data.o.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Reads a file produced by [`write_instance`].
pub fn read_instance<R: BufRead>(input: R) -> Result<(ScenarioData, Option<u64>)> {
    let mut params = ProblemParams::default();
    let (mut p, mut seed) = (1.0, None);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("'{s}': {e}")));
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            let (k, v) = h
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header line '{line}'")))?;
            match k.trim() {
                "sigma" => params.sigma = num(v)?,
                "upsilon" => params.upsilon = num(v)?,
                "mu" => params.mu = num(v)?,
                "p" => p = num(v)?,
                "seed" => seed = Some(v.trim().parse().map_err(|e| Error::Parse(format!("seed: {e}")))?),
                other => return Err(Error::Parse(format!("unknown header key '{other}'"))),
            }
            continue;
        }
        rows.push(line.split(',').map(num).collect::<Result<_>>()?);
    }
    let n = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != d) {
        return Err(Error::Parse("ragged scenario matrix".into()));
    }
    let flat: Vec<f64> = rows.concat();
    Ok((ScenarioData::new(DMatrix::from_row_slice(n, d, &flat), params, p)?, seed))
}
