use super::{
    bisect_increasing, descending_rank, reference_budget, KktCertificate, Schedule,
    ScheduleProblem,
};
use crate::cost_models::CostKind;
use crate::error::{invalid, Result};

/// Interior closed form for power costs `h(δ) = δ^{-r}`:
///
/// `∘δ_k = δ̄ · (Σ_j (b_j a_j^r)^{1/(r+1)} / Σ_j b_j)^{1/r} · (b_k/a_k)^{1/(r+1)}`.
///
/// Returns `Ok(None)` when `∘δ` leaves `[m δ̄, M δ̄]`; the cut-off solver
/// must then be used. When `Some`, the schedule is optimal.
pub fn closed_form_interior_accuracy(p: &ScheduleProblem) -> Result<Option<Schedule>> {
    let r = match p.kind() {
        CostKind::Power(r) => r,
        other => return invalid(format!("interior closed form needs a power cost, got {other}")),
    };
    let e = 1.0 / (r + 1.0);
    let weights: f64 = p
        .a
        .iter()
        .zip(&p.b)
        .map(|(a, b)| (b * a.powf(r)).powf(e))
        .sum();
    let scale = p.delta_ref * (weights / p.b.iter().sum::<f64>()).powf(1.0 / r);
    let values: Vec<f64> = p
        .a
        .iter()
        .zip(&p.b)
        .map(|(a, b)| scale * (b / a).powf(e))
        .collect();
    let (lo, hi) = p.bounds();
    if values.iter().all(|&d| d >= lo && d <= hi) {
        Ok(Some(Schedule::accuracy(values)))
    } else {
        Ok(None)
    }
}

/// Optimal accuracy schedule with its KKT certificate.
///
/// The multiplier `s = −λ*` is located on the clipped budget function
/// `S(s) = Σ b_k h(clip((h')⁻¹(−s a_k/b_k)))`, which is monotone in `s`.
/// That fixes the saturated sets; on the free set the multiplier is then
/// recomputed in closed form for power and logarithmic costs.
pub fn solve_accuracy(p: &ScheduleProblem) -> Result<(Schedule, KktCertificate)> {
    let n = p.len();
    let kind = p.kind();
    let (lo, hi) = p.bounds();
    let nu = p.nu();
    let rho = descending_rank(&nu);
    let budget = reference_budget(p);
    let ln_nu: Vec<f64> = nu.iter().map(|v| v.ln()).collect();

    // δ_k as a function of u = ln s, before clipping.
    let raw = |u: f64, k: usize| kind.derivative_inverse_at((u - ln_nu[k]).exp());
    let clipped_cost = |u: f64| -> f64 {
        (0..n)
            .map(|k| p.b[k] * kind.value(raw(u, k).clamp(lo, hi)))
            .sum()
    };

    // At u = ln(-h'(δ̄)) + ln ν_k iteration k sits exactly at δ̄, so the
    // extreme values bracket the root.
    let ln_slope_ref = (-kind.derivative(p.delta_ref)).ln();
    let (mut u_lo, mut u_hi) = ln_nu.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
        (l.min(ln_slope_ref + v), h.max(ln_slope_ref + v))
    });
    u_lo -= 1e-9 * (1.0 + u_lo.abs());
    u_hi += 1e-9 * (1.0 + u_hi.abs());
    let u_star = bisect_increasing(u_lo, u_hi, budget, clipped_cost)?;

    let mut in_plus = vec![false; n];
    let mut in_minus = vec![false; n];
    let mut transient = Vec::with_capacity(n);
    for k in 0..n {
        let d = raw(u_star, k);
        if d >= hi {
            in_plus[k] = true;
        } else if d <= lo {
            in_minus[k] = true;
        } else {
            transient.push(k);
        }
    }
    let sum_b = |mask: &[bool]| -> f64 {
        mask.iter()
            .zip(&p.b)
            .filter(|(&on, _)| on)
            .map(|(_, b)| b)
            .sum()
    };
    let b_plus = sum_b(&in_plus);
    let b_minus = sum_b(&in_minus);
    let b_trans: f64 = transient.iter().map(|&k| p.b[k]).sum();

    let mut values: Vec<f64> = (0..n)
        .map(|k| {
            if in_plus[k] {
                hi
            } else if in_minus[k] {
                lo
            } else {
                raw(u_star, k)
            }
        })
        .collect();
    let mut lambda_star = -u_star.exp();

    if !transient.is_empty() {
        // Closed-form scale λ̂ with δ_k = λ̂ ν_k^{1/(r+1)} on the free set.
        let closed = match kind {
            CostKind::Power(r) => {
                let e = 1.0 / (r + 1.0);
                let w: f64 = transient
                    .iter()
                    .map(|&k| (p.b[k] * p.a[k].powf(r)).powf(e))
                    .sum();
                let mut rest = p.b.iter().sum::<f64>();
                if b_plus > 0.0 {
                    rest -= b_plus * p.big_m.powf(-r);
                }
                if b_minus > 0.0 {
                    rest -= b_minus * p.m.powf(-r);
                }
                let lam = p.delta_ref * (rest / w).powf(-1.0 / r);
                Some((lam, e, -r * lam.powf(-(r + 1.0))))
            }
            CostKind::Logarithmic => {
                // Product form evaluated in the log domain.
                let mut acc = -transient.iter().map(|&k| p.b[k] * ln_nu[k]).sum::<f64>();
                if b_plus > 0.0 {
                    acc -= b_plus * p.big_m.ln();
                }
                if b_minus > 0.0 {
                    acc -= b_minus * p.m.ln();
                }
                let lam = (p.delta_ref.ln() + acc / b_trans).exp();
                Some((lam, 1.0, -1.0 / lam))
            }
            CostKind::LogSquared => None,
        };
        if let Some((lam, e, lstar)) = closed {
            let candidate: Vec<f64> = transient.iter().map(|&k| lam * nu[k].powf(e)).collect();
            let fits = candidate
                .iter()
                .all(|&d| d >= lo * (1.0 - 1e-12) && d <= hi * (1.0 + 1e-12));
            if fits {
                for (&k, d) in transient.iter().zip(candidate) {
                    values[k] = d.clamp(lo, hi);
                }
                lambda_star = lstar;
            } else {
                log::debug!("closed-form multiplier left the box; keeping bisection values");
            }
        }
    }

    let cert = KktCertificate {
        n_plus: in_plus.iter().filter(|&&x| x).count(),
        n_minus: in_minus.iter().filter(|&&x| x).count(),
        lambda_star,
        rho,
        nu,
        degenerate: transient.is_empty(),
    };
    Ok((Schedule::accuracy(values), cert))
}

/// Residuals of the optimality conditions for an accuracy schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    /// `max_{k∈T} |a_k + λ̃ b_k h'(δ_k)| / a_k` with `λ̃ = −1/λ*`.
    pub stationarity: f64,
    /// `|Σ b_k h(δ_k) − Σ b_k h(δ̄)| / Σ b_k h(δ̄)`.
    pub budget: f64,
    /// Bound multipliers on the pinned sets have the right sign.
    pub signs_ok: bool,
    /// Every value lies in `[m δ̄, M δ̄]`.
    pub bounds_ok: bool,
}

pub fn kkt_report(p: &ScheduleProblem, s: &Schedule, cert: &KktCertificate) -> Result<KktReport> {
    let kind = p.kind();
    let (lo, hi) = p.bounds();
    let reference = reference_budget(p);
    let budget = (p.modeled_cost(s)? - reference).abs() / reference;
    let lt = -1.0 / cert.lambda_star;
    let stationarity = cert
        .transient_set()
        .into_iter()
        .map(|k| (p.a[k] + lt * p.b[k] * kind.derivative(s.values[k])).abs() / p.a[k])
        .fold(0.0, f64::max);
    let mut signs_ok = true;
    for k in cert.plus_set() {
        // μ⊕ = −(a + λ̃ b h'(M δ̄)) ≥ 0
        let g = p.a[k] + lt * p.b[k] * kind.derivative(hi);
        signs_ok &= g <= 1e-9 * p.a[k];
    }
    if lo > 0.0 {
        for k in cert.minus_set() {
            let g = p.a[k] + lt * p.b[k] * kind.derivative(lo);
            signs_ok &= g >= -1e-9 * p.a[k];
        }
    }
    let bounds_ok = s.values.iter().all(|&d| d >= lo && d <= hi);
    Ok(KktReport {
        stationarity,
        budget,
        signs_ok,
        bounds_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::schedule_objective;

    fn power(a: Vec<f64>, b: Vec<f64>, r: f64, dref: f64, m: f64, big_m: f64) -> ScheduleProblem {
        ScheduleProblem::new(a, b, CostKind::Power(r), dref, m, big_m).unwrap()
    }

    #[test]
    fn interior_collapses_on_uniform_coefficients() {
        for r in [0.3, 1.0, 4.0] {
            let p = power(vec![2.0; 5], vec![3.0; 5], r, 0.01, 0.0, f64::INFINITY);
            let s = closed_form_interior_accuracy(&p).unwrap().unwrap();
            for d in s.values {
                assert!((d - 0.01).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn interior_four_point_example() {
        let p = power(vec![1.0, 2.0, 3.0, 4.0], vec![1.0; 4], 1.0, 0.01, 0.0, f64::INFINITY);
        let s = closed_form_interior_accuracy(&p).unwrap().unwrap();
        // (Σ √a_j)/4 · 0.01 / √a_k, evaluated by hand
        let expect = [0.0153657, 0.0108652, 0.0088714, 0.0076828];
        for (d, e) in s.values.iter().zip(expect) {
            assert!((d - e).abs() < 5e-8, "{d} vs {e}");
        }
        let cost: f64 = s.values.iter().map(|d| 1.0 / d).sum();
        assert!((cost - 400.0).abs() < 1e-10);
    }

    #[test]
    fn interior_flags_bound_violation() {
        let p = power(vec![1.0, 100.0], vec![1.0, 1.0], 1.0, 0.01, 0.0, 1.5);
        assert!(closed_form_interior_accuracy(&p).unwrap().is_none());
    }

    #[test]
    fn interior_rejects_log_costs() {
        let p = ScheduleProblem::new(vec![1.0], vec![1.0], CostKind::Logarithmic, 0.01, 0.0, 2.0)
            .unwrap();
        assert!(closed_form_interior_accuracy(&p).is_err());
    }

    #[test]
    fn symmetric_instances_stay_constant() {
        for kind in [CostKind::Power(0.5), CostKind::Logarithmic, CostKind::LogSquared] {
            let p = ScheduleProblem::new(vec![1.0; 6], vec![1.0; 6], kind, 1e-3, 0.2, 5.0).unwrap();
            let (s, cert) = solve_accuracy(&p).unwrap();
            assert_eq!((cert.n_plus, cert.n_minus), (0, 0));
            for d in &s.values {
                assert!((d - 1e-3).abs() < 1e-12 * 1e-3, "{kind}: {d}");
            }
        }
    }

    #[test]
    fn upper_bound_binds() {
        let p = power(vec![1.0, 100.0], vec![1.0, 1.0], 1.0, 0.01, 0.0, 1.5);
        let (s, cert) = solve_accuracy(&p).unwrap();
        assert_eq!(cert.n_plus, 1);
        assert_eq!(s.values[0], 0.015);
        // 1/δ_1 = 200 - 1/0.015
        let expect = 1.0 / (200.0 - 1.0 / 0.015);
        assert!((s.values[1] - expect).abs() < 1e-15);
        let rep = kkt_report(&p, &s, &cert).unwrap();
        assert!(rep.signs_ok && rep.bounds_ok);
        assert!(rep.budget < 1e-12);
    }

    #[test]
    fn lower_bound_binds() {
        // One heavy iteration wants far more accuracy than m δ̄ allows.
        let p = power(vec![1e4, 1.0, 1.0], vec![1.0; 3], 1.0, 0.1, 0.5, 3.0);
        let (s, cert) = solve_accuracy(&p).unwrap();
        assert_eq!(cert.n_minus, 1);
        assert_eq!(cert.minus_set(), vec![0]);
        assert_eq!(s.values[0], 0.05);
        // remaining budget 30 - 20 = 10 split evenly between two equal iterations
        assert!((s.values[1] - 0.2).abs() < 1e-14);
        assert!((s.values[2] - 0.2).abs() < 1e-14);
        let rep = kkt_report(&p, &s, &cert).unwrap();
        assert!(rep.signs_ok, "{rep:?}");
    }

    #[test]
    fn logarithmic_closed_form_matches_bisection() {
        let a: Vec<f64> = (1..=30).map(|k| (k * k) as f64).collect();
        let p = ScheduleProblem::new(a.clone(), vec![1.0; 30], CostKind::Logarithmic, 1e-3, 0.0, 50.0)
            .unwrap();
        let (s, cert) = solve_accuracy(&p).unwrap();
        let rep = kkt_report(&p, &s, &cert).unwrap();
        assert!(rep.budget < 1e-12);
        assert!(rep.stationarity < 1e-10);
        assert!(rep.signs_ok);
        assert!(cert.n_plus > 0);
        assert!(schedule_objective(&a, &s).unwrap() < 1e-3 * a.iter().sum::<f64>());
    }

    #[test]
    fn log_squared_has_no_lower_pinning_at_zero() {
        let a: Vec<f64> = (1..=20).map(|k| (k as f64).powi(3)).collect();
        let p = ScheduleProblem::new(a, vec![1.0; 20], CostKind::LogSquared, 1e-4, 0.0, 3.0).unwrap();
        let (s, cert) = solve_accuracy(&p).unwrap();
        assert_eq!(cert.n_minus, 0);
        assert!(s.values.iter().all(|&d| d > 0.0));
        let rep = kkt_report(&p, &s, &cert).unwrap();
        assert!(rep.budget < 1e-10 && rep.stationarity < 1e-8 && rep.signs_ok);
    }
}
