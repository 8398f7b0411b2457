//! Extrapolation rules for iterations outside a solved horizon.
//!
//! Optimal schedules keep fixed ratios between iterations, so a known
//! optimal value at iteration `k` determines the value at any `k̂` up to
//! clipping into the admissible box.

/// `δ_k̂ = clip((b_k̂ a_k / (a_k̂ b_k))^{1/(r+1)} δ_k, [lo, hi])`.
pub fn online_extend_accuracy(
    known: (f64, f64, f64),
    query: (f64, f64),
    r: f64,
    bounds: (f64, f64),
) -> f64 {
    let (a_k, b_k, delta_k) = known;
    let (a_q, b_q) = query;
    let ratio = (b_q / a_q) * (a_k / b_k);
    (ratio.powf(1.0 / (r + 1.0)) * delta_k).clamp(bounds.0, bounds.1)
}

/// `ω_k̂ = clip((b_k̂ a_k̂^r / (b_k a_k^r))^{1/(r+1)} ω_k, [ω_M, ω_m])`.
pub fn online_extend_work(
    known: (f64, f64, f64),
    query: (f64, f64),
    r: f64,
    bounds: (f64, f64),
) -> f64 {
    let (a_k, b_k, omega_k) = known;
    let (a_q, b_q) = query;
    let ratio = (b_q / b_k) * (a_q / a_k).powf(r);
    (ratio.powf(1.0 / (r + 1.0)) * omega_k).clamp(bounds.0, bounds.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    const WIDE: (f64, f64) = (0.0, f64::INFINITY);

    #[test]
    fn accuracy_rule() {
        assert_eq!(online_extend_accuracy((2.0, 3.0, 1e-3), (4.0, 6.0), 1.0, WIDE), 1e-3);
        // b/a shrinks by 4, square root for r = 1
        let d = online_extend_accuracy((1.0, 1.0, 1e-3), (4.0, 1.0), 1.0, WIDE);
        assert!((d - 5e-4).abs() < 1e-18);
        let d = online_extend_accuracy((1.0, 1.0, 1e-3), (4.0, 1.0), 1.0, (8e-4, 1.0));
        assert_eq!(d, 8e-4);
    }

    #[test]
    fn work_rule() {
        assert_eq!(online_extend_work((2.0, 3.0, 10.0), (2.0, 3.0), 1.0, WIDE), 10.0);
        let w = online_extend_work((1.0, 1.0, 10.0), (4.0, 1.0), 1.0, WIDE);
        assert!((w - 20.0).abs() < 1e-13);
        assert_eq!(online_extend_work((1.0, 1.0, 10.0), (4.0, 1.0), 1.0, (0.0, 15.0)), 15.0);
    }
}
