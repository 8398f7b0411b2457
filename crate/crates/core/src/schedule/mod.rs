//! Optimal inexactness and work schedules.
//!
//! The accuracy-controlled problem minimizes `Σ a_k δ_k` over
//! `δ ∈ [m δ̄, M δ̄]^N` subject to `Σ b_k h(δ_k) = Σ b_k h(δ̄)`. The
//! work-controlled problem minimizes `Σ a_k h_r⁻¹(ω_k / b_k)` over
//! `ω ∈ [ω_M, ω_m]^N` subject to `Σ ω_k = ω̄`.
//!
//! Both are solved by water-filling: a scalar multiplier is found on the
//! clipped budget function, which fixes the saturated sets, then the
//! multiplier is recomputed in closed form on the free set whenever the cost
//! shape allows it.

mod accuracy;
mod brute;
pub mod io;
mod online;
mod work;

pub use accuracy::{closed_form_interior_accuracy, kkt_report, solve_accuracy, KktReport};
pub use brute::{brute_force_oracle, BruteForce};
pub use online::{online_extend_accuracy, online_extend_work};
pub use work::{closed_form_interior_work, solve_work};

use crate::cost_models::{CostKind, CostModel};
use crate::error::{invalid, Error, Result};

/// What a schedule's values measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    /// Per-iteration inexactness `δ_k`.
    Accuracy,
    /// Per-iteration inner work `ω_k`.
    Work,
}

impl ScheduleKind {
    pub fn column(&self) -> &'static str {
        match self {
            ScheduleKind::Accuracy => "delta",
            ScheduleKind::Work => "omega",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub values: Vec<f64>,
    pub kind: ScheduleKind,
}

impl Schedule {
    pub fn accuracy(values: Vec<f64>) -> Self {
        Schedule {
            values,
            kind: ScheduleKind::Accuracy,
        }
    }

    pub fn work(values: Vec<f64>) -> Self {
        Schedule {
            values,
            kind: ScheduleKind::Work,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Saturation pattern and multiplier of a solved schedule.
///
/// For accuracy problems `lambda_star` is the (negative) multiplier with
/// `h'(δ_k) = a_k λ* / b_k` on the free set. For work problems it is the
/// positive scale `λ̂` with `ω_k = λ̂ (a_k^r b_k)^{1/(r+1)}` on the free set.
#[derive(Debug, Clone, PartialEq)]
pub struct KktCertificate {
    /// Iterations pinned at the loose end (`M δ̄`, or `ω_M` for work).
    pub n_plus: usize,
    /// Iterations pinned at the tight end (`m δ̄`, or `ω_m` for work).
    pub n_minus: usize,
    pub lambda_star: f64,
    /// `rho[k]` is the descending rank of `nu[k]`.
    pub rho: Vec<usize>,
    pub nu: Vec<f64>,
    /// Every iteration is pinned and the budget is met exactly by the bounds.
    pub degenerate: bool,
}

impl KktCertificate {
    /// Indices pinned at the loose end, i.e. `ρ(k) < N_⊕`.
    pub fn plus_set(&self) -> Vec<usize> {
        (0..self.rho.len())
            .filter(|&k| self.rho[k] < self.n_plus)
            .collect()
    }

    /// Indices pinned at the tight end, i.e. `ρ(k) > N − 1 − N_⊖`.
    pub fn minus_set(&self) -> Vec<usize> {
        let n = self.rho.len();
        (0..n)
            .filter(|&k| self.rho[k] + self.n_minus >= n)
            .collect()
    }

    /// Free (transient) indices.
    pub fn transient_set(&self) -> Vec<usize> {
        let n = self.rho.len();
        (0..n)
            .filter(|&k| self.rho[k] >= self.n_plus && self.rho[k] + self.n_minus < n)
            .collect()
    }
}

/// Descending rank: `ρ(k) = j` iff `ν_k` is the `(j+1)`-th largest entry.
/// Ties go to the lower original index first.
pub fn descending_rank(nu: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..nu.len()).collect();
    order.sort_by(|&i, &j| nu[j].total_cmp(&nu[i]));
    let mut rho = vec![0; nu.len()];
    for (rank, &k) in order.iter().enumerate() {
        rho[k] = rank;
    }
    rho
}

/// `Σ a_k s_k`.
pub fn schedule_objective(a: &[f64], s: &Schedule) -> Result<f64> {
    if a.len() != s.values.len() {
        return invalid(format!(
            "coefficient length {} does not match schedule length {}",
            a.len(),
            s.values.len()
        ));
    }
    Ok(a.iter().zip(&s.values).map(|(x, y)| x * y).sum())
}

fn check_coefficients(a: &[f64], b: &[f64]) -> Result<()> {
    if a.is_empty() {
        return invalid("at least one iteration is required");
    }
    if a.len() != b.len() {
        return invalid(format!("a has {} entries but b has {}", a.len(), b.len()));
    }
    for (k, (&ak, &bk)) in a.iter().zip(b).enumerate() {
        if !(ak > 0.0 && ak.is_finite()) {
            return invalid(format!("a[{k}] = {ak} must be finite and positive"));
        }
        if !(bk > 0.0 && bk.is_finite()) {
            return invalid(format!("b[{k}] = {bk} must be finite and positive"));
        }
    }
    Ok(())
}

/// An accuracy-controlled allocation instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleProblem {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub delta_ref: f64,
    /// Lower inexactness factor `m ∈ [0, 1)`.
    pub m: f64,
    /// Upper inexactness factor `M ∈ (1, ∞]`.
    pub big_m: f64,
    cost: CostModel,
}

impl ScheduleProblem {
    pub fn new(
        a: Vec<f64>,
        b: Vec<f64>,
        kind: CostKind,
        delta_ref: f64,
        m: f64,
        big_m: f64,
    ) -> Result<Self> {
        check_coefficients(&a, &b)?;
        if !(delta_ref > 0.0 && delta_ref.is_finite()) {
            return invalid(format!("reference inexactness must be positive, got {delta_ref}"));
        }
        if !(0.0..1.0).contains(&m) {
            return invalid(format!("m must satisfy 0 <= m < 1, got {m}"));
        }
        if big_m.is_nan() || big_m <= 1.0 {
            return invalid(format!("M must satisfy M > 1, got {big_m}"));
        }
        if big_m.is_infinite() && !matches!(kind, CostKind::Power(_)) {
            return invalid("M = inf is only supported for power cost kinds");
        }
        let cost = CostModel::new(kind, m * delta_ref, big_m * delta_ref)?;
        Ok(ScheduleProblem {
            a,
            b,
            delta_ref,
            m,
            big_m,
            cost,
        })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn cost_model(&self) -> &CostModel {
        &self.cost
    }

    pub fn kind(&self) -> CostKind {
        self.cost.kind()
    }

    /// `(m δ̄, M δ̄)`.
    pub fn bounds(&self) -> (f64, f64) {
        self.cost.domain()
    }

    /// `ν_k = b_k / a_k`.
    pub fn nu(&self) -> Vec<f64> {
        self.a.iter().zip(&self.b).map(|(a, b)| b / a).collect()
    }

    /// `Σ b_k h(δ_k)` for an arbitrary schedule.
    pub fn modeled_cost(&self, s: &Schedule) -> Result<f64> {
        if s.values.len() != self.len() {
            return invalid("schedule length mismatch");
        }
        let kind = self.kind();
        Ok(self
            .b
            .iter()
            .zip(&s.values)
            .map(|(b, &d)| b * kind.value(d))
            .sum())
    }

    /// Same instance with both coefficient vectors rescaled.
    pub fn rescaled(&self, ka: f64, kb: f64) -> Result<Self> {
        ScheduleProblem::new(
            self.a.iter().map(|x| x * ka).collect(),
            self.b.iter().map(|x| x * kb).collect(),
            self.kind(),
            self.delta_ref,
            self.m,
            self.big_m,
        )
    }
}

/// `Σ_k b_k h(δ̄)`, the budget implied by the constant reference schedule.
pub fn reference_budget(p: &ScheduleProblem) -> f64 {
    p.b.iter().sum::<f64>() * p.kind().value(p.delta_ref)
}

/// A work-controlled allocation instance with cost shape `h_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkProblem {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Total work `ω̄`.
    pub omega_bar: f64,
    /// Lower per-iteration work bound `ω_M` (loosest accuracy).
    pub omega_lo: f64,
    /// Upper per-iteration work bound `ω_m` (tightest accuracy); may be infinite.
    pub omega_hi: f64,
    pub r: f64,
}

impl WorkProblem {
    pub fn new(
        a: Vec<f64>,
        b: Vec<f64>,
        omega_bar: f64,
        omega_lo: f64,
        omega_hi: f64,
        r: f64,
    ) -> Result<Self> {
        check_coefficients(&a, &b)?;
        if !(r >= 0.0 && r.is_finite()) {
            return invalid(format!("cost exponent must be finite and >= 0, got {r}"));
        }
        if !(omega_bar > 0.0 && omega_bar.is_finite()) {
            return invalid(format!("total work must be positive, got {omega_bar}"));
        }
        if !(omega_lo >= 0.0 && omega_lo.is_finite()) {
            return invalid(format!("lower work bound must be finite and >= 0, got {omega_lo}"));
        }
        let per = omega_bar / a.len() as f64;
        if !(omega_lo < per && per < omega_hi) {
            return Err(Error::InvalidInput(format!(
                "work bounds must satisfy {omega_lo} < {per} < {omega_hi}"
            )));
        }
        Ok(WorkProblem {
            a,
            b,
            omega_bar,
            omega_lo,
            omega_hi,
            r,
        })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Interior weights `(b_k a_k^r)^{1/(r+1)}`.
    pub fn weights(&self) -> Vec<f64> {
        let r = self.r;
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| (b * a.powf(r)).powf(1.0 / (r + 1.0)))
            .collect()
    }

    /// `ν_k = (a_k^r b_k)^{-1}`.
    pub fn nu(&self) -> Vec<f64> {
        let r = self.r;
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| 1.0 / (a.powf(r) * b))
            .collect()
    }

    /// `Σ a_k h_r⁻¹(ω_k / b_k)`.
    pub fn objective(&self, s: &Schedule) -> f64 {
        let kind = CostKind::from_exponent(self.r).expect("validated exponent");
        self.a
            .iter()
            .zip(&self.b)
            .zip(&s.values)
            .map(|((a, b), w)| a * kind.inverse(w / b))
            .sum()
    }
}

/// Solve `f(u) = target` for nondecreasing `f` on `[lo, hi]` with
/// `f(lo) ≤ target ≤ f(hi)`, by bisection down to floating-point resolution.
pub(crate) fn bisect_increasing(
    mut lo: f64,
    mut hi: f64,
    target: f64,
    f: impl Fn(f64) -> f64,
) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::RootFinding(format!("bad bracket [{lo}, {hi}]")));
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v.is_nan() {
            return Err(Error::RootFinding(format!("budget function is NaN at {mid}")));
        }
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(descending_rank(&[3.0, 1.0, 2.0]), vec![0, 2, 1]);
        assert_eq!(descending_rank(&[5.0, 5.0, 1.0]), vec![0, 1, 2]);
        assert_eq!(descending_rank(&[1.0, 2.0, 3.0, 4.0]), vec![3, 2, 1, 0]);
    }

    #[test]
    fn reference_budget_examples() {
        let p = ScheduleProblem::new(vec![1.0; 2], vec![1.0; 2], CostKind::Power(1.0), 0.01, 0.0, 10.0)
            .unwrap();
        assert!((reference_budget(&p) - 200.0).abs() < 1e-10);

        let p = ScheduleProblem::new(vec![1.0; 4], vec![0.25; 4], CostKind::LogSquared, 1e-4, 0.0, 2.0)
            .unwrap();
        let expect = 1e4f64.ln().powi(2);
        assert!((reference_budget(&p) - expect).abs() < 1e-10);
        assert!((reference_budget(&p) - 84.8304).abs() < 1e-4);

        let e1 = (-1.0f64).exp();
        let p = ScheduleProblem::new(vec![1.0; 2], vec![2.0, 3.0], CostKind::Logarithmic, e1, 0.0, 2.0)
            .unwrap();
        assert!((reference_budget(&p) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn objective_examples() {
        let s = Schedule::accuracy(vec![0.5, 0.5]);
        assert_eq!(schedule_objective(&[1.0, 1.0], &s).unwrap(), 1.0);
        let s = Schedule::accuracy(vec![2e-4; 10]);
        let a: Vec<f64> = (1..=10).map(f64::from).collect();
        assert!((schedule_objective(&a, &s).unwrap() - 0.011).abs() < 1e-15);
        assert_eq!(schedule_objective(&[2.0], &Schedule::accuracy(vec![3.0])).unwrap(), 6.0);
        assert!(schedule_objective(&[1.0], &s).is_err());
    }

    #[test]
    fn problem_validation() {
        let k = CostKind::Power(1.0);
        assert!(ScheduleProblem::new(vec![], vec![], k, 1.0, 0.0, 2.0).is_err());
        assert!(ScheduleProblem::new(vec![1.0], vec![1.0, 2.0], k, 1.0, 0.0, 2.0).is_err());
        assert!(ScheduleProblem::new(vec![0.0], vec![1.0], k, 1.0, 0.0, 2.0).is_err());
        assert!(ScheduleProblem::new(vec![1.0], vec![-1.0], k, 1.0, 0.0, 2.0).is_err());
        assert!(ScheduleProblem::new(vec![1.0], vec![1.0], k, 1.0, 1.0, 2.0).is_err());
        assert!(ScheduleProblem::new(vec![1.0], vec![1.0], k, 1.0, 0.0, 1.0).is_err());
        assert!(ScheduleProblem::new(vec![1.0], vec![1.0], k, 0.0, 0.0, 2.0).is_err());
        assert!(ScheduleProblem::new(vec![1.0], vec![1.0], k, 1.0, 0.0, f64::INFINITY).is_ok());
        let log = CostKind::Logarithmic;
        assert!(ScheduleProblem::new(vec![1.0], vec![1.0], log, 0.1, 0.0, f64::INFINITY).is_err());
        assert!(ScheduleProblem::new(vec![1.0], vec![1.0], log, 0.1, 0.0, 10.0).is_err());
        assert!(ScheduleProblem::new(vec![1.0], vec![1.0], log, 0.1, 0.0, 9.0).is_ok());

        assert!(WorkProblem::new(vec![1.0; 2], vec![1.0; 2], 2.0, 1.0, 3.0, 1.0).is_err());
        assert!(WorkProblem::new(vec![1.0; 2], vec![1.0; 2], 2.0, 0.0, 1.0, 1.0).is_err());
        assert!(WorkProblem::new(vec![1.0; 2], vec![1.0; 2], 2.0, 0.0, f64::INFINITY, -1.0).is_err());
        assert!(WorkProblem::new(vec![1.0; 2], vec![1.0; 2], 2.0, 0.0, f64::INFINITY, 0.0).is_ok());
    }

    #[test]
    fn certificate_sets() {
        let cert = KktCertificate {
            n_plus: 1,
            n_minus: 1,
            lambda_star: -1.0,
            rho: vec![2, 0, 3, 1],
            nu: vec![0.0; 4],
            degenerate: false,
        };
        assert_eq!(cert.plus_set(), vec![1]);
        assert_eq!(cert.minus_set(), vec![2]);
        assert_eq!(cert.transient_set(), vec![0, 3]);
    }
}
