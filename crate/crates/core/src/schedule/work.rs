use super::{bisect_increasing, descending_rank, KktCertificate, Schedule, WorkProblem};
use crate::error::Result;

/// Interior work split.
///
/// For `r > 0` this is `∘ω_k = ω̄ (b_k a_k^r)^{1/(r+1)} / Σ_j (b_j a_j^r)^{1/(r+1)}`.
/// For `r = 0` the cost `−ln δ` is not homogeneous and the stationary split
/// is `ω_k = b_k (ln(a_k/b_k) + u)` with `u` fixed by `Σ ω_k = ω̄`; on
/// constant `b` both coincide.
///
/// Returns `Ok(None)` when the split leaves `[ω_M, ω_m]`.
pub fn closed_form_interior_work(p: &WorkProblem) -> Result<Option<Schedule>> {
    let values = if p.r > 0.0 {
        let w = p.weights();
        let total: f64 = w.iter().sum();
        w.iter().map(|x| p.omega_bar * x / total).collect::<Vec<_>>()
    } else {
        let all: Vec<usize> = (0..p.len()).collect();
        log_split(p, &all, p.omega_bar)
    };
    if values.iter().all(|&w| w >= p.omega_lo && w <= p.omega_hi) {
        Ok(Some(Schedule::work(values)))
    } else {
        Ok(None)
    }
}

/// Stationary `r = 0` split of `total` over `set`.
fn log_split(p: &WorkProblem, set: &[usize], total: f64) -> Vec<f64> {
    let sb: f64 = set.iter().map(|&k| p.b[k]).sum();
    let sl: f64 = set.iter().map(|&k| p.b[k] * (p.a[k] / p.b[k]).ln()).sum();
    let u = (total - sl) / sb;
    set.iter()
        .map(|&k| p.b[k] * ((p.a[k] / p.b[k]).ln() + u))
        .collect()
}

/// Optimal work schedule with its KKT certificate.
///
/// Same water-filling scheme as the accuracy solver: locate the scale on the
/// clipped total-work function, read off the saturated sets, then recompute
/// the scale on the free set in closed form.
pub fn solve_work(p: &WorkProblem) -> Result<(Schedule, KktCertificate)> {
    let n = p.len();
    let nu = p.nu();
    let rho = descending_rank(&nu);
    let per = p.omega_bar / n as f64;
    let (lo, hi) = (p.omega_lo, p.omega_hi);

    // Unclipped work of iteration k as a function of the scale parameter u.
    let (offsets, raw): (Vec<f64>, Box<dyn Fn(f64, usize) -> f64 + '_>) = if p.r > 0.0 {
        let ln_w: Vec<f64> = p.weights().iter().map(|w| w.ln()).collect();
        let off = ln_w.iter().map(|lw| per.ln() - lw).collect();
        (off, Box::new(move |u: f64, k: usize| (u + ln_w[k]).exp()))
    } else {
        let ln_ab: Vec<f64> = p.a.iter().zip(&p.b).map(|(a, b)| (a / b).ln()).collect();
        let off = (0..n).map(|k| per / p.b[k] - ln_ab[k]).collect();
        (off, Box::new(move |u: f64, k: usize| p.b[k] * (ln_ab[k] + u)))
    };
    let clipped_total = |u: f64| -> f64 { (0..n).map(|k| raw(u, k).clamp(lo, hi)).sum() };
    let (mut u_lo, mut u_hi) = offsets
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    u_lo -= 1e-9 * (1.0 + u_lo.abs());
    u_hi += 1e-9 * (1.0 + u_hi.abs());
    let u_star = bisect_increasing(u_lo, u_hi, p.omega_bar, clipped_total)?;

    let mut values = vec![0.0; n];
    let mut transient = Vec::with_capacity(n);
    let (mut n_plus, mut n_minus) = (0, 0);
    for (k, v) in values.iter_mut().enumerate() {
        let w = raw(u_star, k);
        if w <= lo {
            *v = lo;
            n_plus += 1;
        } else if w >= hi {
            *v = hi;
            n_minus += 1;
        } else {
            *v = w;
            transient.push(k);
        }
    }
    let mut lambda_star = u_star.exp();

    if !transient.is_empty() {
        let rest = p.omega_bar - n_plus as f64 * lo - n_minus as f64 * hi;
        let candidate: Vec<f64> = if p.r > 0.0 {
            let w = p.weights();
            let sw: f64 = transient.iter().map(|&k| w[k]).sum();
            let scale = rest / sw;
            lambda_star = scale;
            transient.iter().map(|&k| scale * w[k]).collect()
        } else {
            let split = log_split(p, &transient, rest);
            if let Some((&k, &v)) = transient.iter().zip(&split).next() {
                lambda_star = (v / p.b[k] - (p.a[k] / p.b[k]).ln()).exp();
            }
            split
        };
        let tol = 1e-12 * p.omega_bar;
        if candidate.iter().all(|&w| w >= lo - tol && w <= hi + tol) {
            for (&k, w) in transient.iter().zip(candidate) {
                values[k] = w.clamp(lo, hi);
            }
        } else {
            log::debug!("closed-form work scale left the box; keeping bisection values");
        }
    }

    let cert = KktCertificate {
        n_plus,
        n_minus,
        lambda_star,
        rho,
        nu,
        degenerate: transient.is_empty(),
    };
    Ok((Schedule::work(values), cert))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wp(a: Vec<f64>, b: Vec<f64>, total: f64, lo: f64, hi: f64, r: f64) -> WorkProblem {
        WorkProblem::new(a, b, total, lo, hi, r).unwrap()
    }

    #[test]
    fn uniform_split() {
        for r in [0.0, 0.5, 2.0] {
            let p = wp(vec![1.0; 4], vec![1.0; 4], 10.0, 0.0, f64::INFINITY, r);
            let s = closed_form_interior_work(&p).unwrap().unwrap();
            assert!(s.values.iter().all(|w| (w - 2.5).abs() < 1e-14));
            let (s, cert) = solve_work(&p).unwrap();
            assert!(s.values.iter().all(|w| (w - 2.5).abs() < 1e-13));
            assert_eq!((cert.n_plus, cert.n_minus), (0, 0));
        }
    }

    #[test]
    fn two_point_split() {
        let p = wp(vec![1.0, 4.0], vec![1.0, 1.0], 3.0, 0.5, 2.5, 1.0);
        let s = closed_form_interior_work(&p).unwrap().unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-15 && (s.values[1] - 2.0).abs() < 1e-15);
        let (s2, cert) = solve_work(&p).unwrap();
        assert!((s2.values[0] - 1.0).abs() < 1e-14 && (s2.values[1] - 2.0).abs() < 1e-14);
        assert_eq!((cert.n_plus, cert.n_minus), (0, 0));
    }

    #[test]
    fn interior_flags_violation() {
        let p = wp(vec![1.0, 1e6], vec![1.0, 1.0], 2.0, 0.0, 1.5, 1.0);
        assert!(closed_form_interior_work(&p).unwrap().is_none());
    }

    #[test]
    fn clipping_cascades() {
        // weights (1, 2, 3): the first clip leaves (1.267, 2.533), which clips again
        let p = wp(vec![1.0, 4.0, 9.0], vec![1.0; 3], 6.0, 0.0, 2.2, 1.0);
        let (s, cert) = solve_work(&p).unwrap();
        assert_eq!(cert.n_minus, 2);
        assert!((s.values[0] - 1.6).abs() < 1e-14);
        assert_eq!(s.values[1], 2.2);
        assert_eq!(s.values[2], 2.2);
        assert!((s.values.iter().sum::<f64>() - 6.0).abs() < 1e-14);
    }

    #[test]
    fn lower_bound_clips() {
        let p = wp(vec![1e-6, 1.0, 1.0], vec![1.0; 3], 3.0, 0.5, f64::INFINITY, 1.0);
        let (s, cert) = solve_work(&p).unwrap();
        assert_eq!(cert.n_plus, 1);
        assert_eq!(cert.plus_set(), vec![0]);
        assert_eq!(s.values[0], 0.5);
        assert!((s.values[1] - 1.25).abs() < 1e-14);
    }

    #[test]
    fn log_split_is_stationary() {
        let a = vec![1.0, 3.0, 10.0];
        let b = vec![1.0, 2.0, 0.5];
        let p = wp(a.clone(), b.clone(), 9.0, 0.0, f64::INFINITY, 0.0);
        let (s, _) = solve_work(&p).unwrap();
        // d/dω of a e^{-ω/b} is -(a/b) e^{-ω/b}; must be equal across k
        let g: Vec<f64> = (0..3).map(|k| a[k] / b[k] * (-s.values[k] / b[k]).exp()).collect();
        assert!((g[0] - g[1]).abs() < 1e-12 * g[0] && (g[0] - g[2]).abs() < 1e-12 * g[0]);
        assert!((s.values.iter().sum::<f64>() - 9.0).abs() < 1e-12);
    }
}
