//! Impact coefficients `a_k` and cost distortions `b_k` for the supported
//! method families, and the fast gradient certificate recursion
//! `A_{k+1}(1 + μA_k) = L_{k+1}(A_{k+1} − A_k)²`.

use crate::error::{invalid, Result};

/// Larger root of the certificate recursion for a given `L_{k+1}`.
///
/// Written as `A_k + t` with `L t² = (1 + μA_k)(A_k + t)` so that the
/// increment is computed without cancellation.
pub fn next_certificate(a_k: f64, l_next: f64, mu: f64) -> f64 {
    let c = 1.0 + mu * a_k;
    let t = (c + (c * (c + 4.0 * l_next * a_k)).sqrt()) / (2.0 * l_next);
    a_k + t
}

/// Certificates `A_0 = 0 < A_1 < …` and the accepted `L_1, L_2, …`.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateSequence {
    a: Vec<f64>,
    l: Vec<f64>,
    mu: f64,
}

impl CertificateSequence {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return invalid(format!("mu must be finite and nonnegative, got {mu}"));
        }
        Ok(Self { a: vec![0.0], l: Vec::new(), mu })
    }

    /// Appends `A_{k+1}` computed with `l_next` and returns it.
    pub fn push(&mut self, l_next: f64) -> Result<f64> {
        if !(l_next > 0.0 && l_next.is_finite()) {
            return invalid(format!("L must be finite and positive, got {l_next}"));
        }
        let next = next_certificate(self.last(), l_next, self.mu);
        self.a.push(next);
        self.l.push(l_next);
        Ok(next)
    }

    /// The candidate `A_{k+1}` for `l_next`, without appending it.
    pub fn peek(&self, l_next: f64) -> f64 {
        next_certificate(self.last(), l_next, self.mu)
    }

    pub fn last(&self) -> f64 {
        *self.a.last().expect("sequence starts with A_0")
    }

    /// `A_0, …, A_k`.
    pub fn values(&self) -> &[f64] {
        &self.a
    }

    /// `L_1, …, L_k`.
    pub fn steps(&self) -> &[f64] {
        &self.l
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Number of completed steps `k`.
    pub fn steps_taken(&self) -> usize {
        self.l.len()
    }

    /// Largest recursion residual over the sequence, relative to
    /// `A_{k+1}(1 + μA_k)` (which is `A_{k+1}` when `μ = 0`).
    pub fn max_residual(&self) -> f64 {
        self.l
            .iter()
            .enumerate()
            .map(|(k, &l)| {
                let (ak, an) = (self.a[k], self.a[k + 1]);
                let rhs = an * (1.0 + self.mu * ak);
                (l * (an - ak).powi(2) - rhs).abs() / rhs
            })
            .fold(0.0, f64::max)
    }
}

/// `N` steps of the recursion with constant `L`.
pub fn fixed_step_certificates(n: usize, l: f64, mu: f64) -> Result<CertificateSequence> {
    if n == 0 {
        return invalid("need at least one step");
    }
    let mut seq = CertificateSequence::new(mu)?;
    seq.a.reserve(n);
    for _ in 0..n {
        seq.push(l)?;
    }
    Ok(seq)
}

fn require_len(certs: &CertificateSequence, n: usize) -> Result<()> {
    if certs.steps_taken() < n {
        return invalid(format!(
            "need {n} certificate steps, sequence has {}",
            certs.steps_taken()
        ));
    }
    Ok(())
}

/// Fast gradient row: `a_k = A_{k+1}`, `b_k = 1` for `k < n`.
pub fn impact_coefficients_fgm(certs: &CertificateSequence, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    require_len(certs, n)?;
    Ok((certs.a[1..=n].to_vec(), vec![1.0; n]))
}

/// Inexact accelerated forward-backward row:
/// `a_k = A_{k+1}(1 + μλ_k)² / λ_k`, `b_k = 1`.
pub fn impact_coefficients_iafb(
    certs: &CertificateSequence,
    lambdas: &[f64],
    mu: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = lambdas.len();
    require_len(certs, n)?;
    if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return invalid(format!("stepsizes must be positive, got {l}"));
    }
    let a = lambdas
        .iter()
        .enumerate()
        .map(|(k, &lam)| certs.a[k + 1] * (1.0 + mu * lam).powi(2) / lam)
        .collect();
    Ok((a, vec![1.0; n]))
}

/// Inexact proximal-linear row: `a_k = 1/t_k`, `b_k = t_k^{2/3}`.
pub fn impact_coefficients_ipl(t: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if let Some(x) = t.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return invalid(format!("stepsizes must be positive, got {x}"));
    }
    Ok((
        t.iter().map(|x| 1.0 / x).collect(),
        t.iter().map(|x| x.powf(2.0 / 3.0)).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Larger root by the textbook quadratic formula.
    fn quadratic_oracle(a_k: f64, l: f64, mu: f64) -> f64 {
        let b = 2.0 * l * a_k + 1.0 + mu * a_k;
        (b + (b * b - 4.0 * l * l * a_k * a_k).sqrt()) / (2.0 * l)
    }

    #[test]
    fn first_steps() {
        assert_eq!(next_certificate(0.0, 1.0, 0.0), 1.0);
        let golden = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((next_certificate(1.0, 1.0, 0.0) - golden).abs() < 1e-15);
        for (l, mu) in [(4.0, 0.0), (0.3, 2.0), (1e3, 0.1)] {
            assert!((next_certificate(0.0, l, mu) - 1.0 / l).abs() < 1e-15 / l);
        }
    }

    #[test]
    fn matches_quadratic_formula() {
        for &(a, l, mu) in &[(0.5, 2.0, 0.0), (10.0, 0.7, 0.3), (3.0, 5.0, 1.0)] {
            let x = next_certificate(a, l, mu);
            assert!((x - quadratic_oracle(a, l, mu)).abs() < 1e-12 * x);
            assert!(x > a);
        }
    }

    #[test]
    fn fixed_step_examples() {
        let s = fixed_step_certificates(2, 1.0, 0.0).unwrap();
        assert_eq!(s.values()[0..2], [0.0, 1.0]);
        assert!((s.values()[2] - 2.618033988749895).abs() < 1e-14);
        let s = fixed_step_certificates(1, 4.0, 0.0).unwrap();
        assert_eq!(s.values(), &[0.0, 0.25]);
        assert!(fixed_step_certificates(0, 1.0, 0.0).is_err());
    }

    #[test]
    fn quadratic_growth_without_strong_convexity() {
        let s = fixed_step_certificates(10_000, 1.0, 0.0).unwrap();
        for (k, a) in s.values().iter().enumerate() {
            assert!(*a >= (k * k) as f64 / 4.0, "A_{k} = {a}");
        }
        assert!(s.max_residual() <= 1e-9);
    }

    #[test]
    fn geometric_tail_with_strong_convexity() {
        let s = fixed_step_certificates(5000, 1.0, 1e-3).unwrap();
        let a = s.values();
        let ratios: Vec<f64> = (4900..5000).map(|k| a[k + 1] / a[k]).collect();
        let (lo, hi) = ratios
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
        assert!(lo > 1.0 && hi - lo <= 1e-6, "{lo} {hi}");
        assert!(s.max_residual() <= 1e-9);
    }

    #[test]
    fn coefficient_rows() {
        let s = fixed_step_certificates(2, 1.0, 0.0).unwrap();
        let (a, b) = impact_coefficients_fgm(&s, 2).unwrap();
        assert_eq!(a[0], 1.0);
        assert!((a[1] - 2.618033988749895).abs() < 1e-14);
        assert_eq!(b, vec![1.0, 1.0]);
        assert!(impact_coefficients_fgm(&s, 3).is_err());

        let (a, _) = impact_coefficients_iafb(&s, &[1.0, 1.0], 0.0).unwrap();
        assert_eq!(a[0], 1.0);
        let (a, _) = impact_coefficients_iafb(&s, &[1.0], 1.0).unwrap();
        assert_eq!(a, vec![4.0]);
        let (a, _) = impact_coefficients_iafb(&s, &[2.0, 2.0], 0.0).unwrap();
        assert_eq!(a[0], 0.5);
        assert!(impact_coefficients_iafb(&s, &[1.0, 0.0], 0.0).is_err());

        let (a, b) = impact_coefficients_ipl(&[1.0, 8.0]).unwrap();
        assert_eq!(a, vec![1.0, 0.125]);
        assert!((b[1] - 4.0).abs() < 1e-14 && b[0] == 1.0);
    }
}
