//! Oracle cost shapes `h`.
//!
//! An oracle queried at inexactness `δ` costs `b_k · h(δ)` work units at
//! iteration `k`. Three shapes are supported:
//!
//! | kind          | `h(δ)`        | `h'(δ)`         | `(h')⁻¹(−ω)`        |
//! |---------------|---------------|-----------------|---------------------|
//! | `Power(r)`    | `δ^{-r}`      | `−r δ^{-(r+1)}` | `(ω/r)^{-1/(r+1)}`  |
//! | `Logarithmic` | `−ln δ`       | `−1/δ`          | `1/ω`               |
//! | `LogSquared`  | `ln²(1/δ)`    | `2 ln(δ)/δ`     | `2 W₀(ω/2)/ω`       |
//!
//! Every shape is strictly decreasing and convex on its admissible domain,
//! with a strictly increasing, strictly negative derivative.

use std::f64::consts::E;
use std::fmt;

use crate::error::{invalid, Error, Result};

/// Largest admissible upper bound for the `LogSquared` kind (`h'(1) = 0`).
pub const LOG_SQUARED_MAX_DELTA: f64 = 1.0 - 1e-12;

/// The functional form of `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostKind {
    /// `h(δ) = δ^{-r}` with `r > 0`.
    Power(f64),
    /// `h(δ) = −ln δ` (the `r = 0` member of the power family).
    Logarithmic,
    /// `h(δ) = ln²(1/δ)`.
    LogSquared,
}

impl CostKind {
    /// Power kind for `r > 0`, logarithmic kind for `r = 0`.
    pub fn from_exponent(r: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return invalid(format!("cost exponent must be finite and nonnegative, got {r}"));
        }
        Ok(if r == 0.0 {
            CostKind::Logarithmic
        } else {
            CostKind::Power(r)
        })
    }

    /// Exponent `r` of the power family; `Some(0.0)` for the logarithmic kind.
    pub fn exponent(&self) -> Option<f64> {
        match *self {
            CostKind::Power(r) => Some(r),
            CostKind::Logarithmic => Some(0.0),
            CostKind::LogSquared => None,
        }
    }

    /// Raw `h(δ)` without domain checks.
    #[inline]
    pub fn value(&self, delta: f64) -> f64 {
        match *self {
            CostKind::Power(r) => delta.powf(-r),
            CostKind::Logarithmic => -delta.ln(),
            CostKind::LogSquared => {
                let l = delta.ln();
                l * l
            }
        }
    }

    /// Raw `h'(δ)` without domain checks.
    #[inline]
    pub fn derivative(&self, delta: f64) -> f64 {
        match *self {
            CostKind::Power(r) => -r * delta.powf(-(r + 1.0)),
            CostKind::Logarithmic => -1.0 / delta,
            CostKind::LogSquared => 2.0 * delta.ln() / delta,
        }
    }

    /// Raw `(h')⁻¹(−ω)` for `ω > 0`, without domain checks.
    #[inline]
    pub fn derivative_inverse_at(&self, omega: f64) -> f64 {
        match *self {
            CostKind::Power(r) => (omega / r).powf(-1.0 / (r + 1.0)),
            CostKind::Logarithmic => 1.0 / omega,
            CostKind::LogSquared => {
                let half = 0.5 * omega;
                if half > 1e300 {
                    // W₀(x)/x underflows gracefully through the log form.
                    let w = lambert_w0(half).unwrap_or(f64::INFINITY);
                    (w.ln() - half.ln()).exp()
                } else {
                    lambert_w0(half).unwrap_or(f64::NAN) / half
                }
            }
        }
    }

    /// Raw `h⁻¹(c)` without domain checks.
    #[inline]
    pub fn inverse(&self, cost: f64) -> f64 {
        match *self {
            CostKind::Power(r) => cost.powf(-1.0 / r),
            CostKind::Logarithmic => (-cost).exp(),
            CostKind::LogSquared => (-cost.sqrt()).exp(),
        }
    }
}

impl fmt::Display for CostKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostKind::Power(r) => write!(f, "power:{r}"),
            CostKind::Logarithmic => write!(f, "log"),
            CostKind::LogSquared => write!(f, "logsq"),
        }
    }
}

impl std::str::FromStr for CostKind {
    type Err = Error;

    /// Parses `power:R`, `log` or `logsq`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "log" => Ok(CostKind::Logarithmic),
            "logsq" => Ok(CostKind::LogSquared),
            _ => {
                let r = s
                    .strip_prefix("power:")
                    .ok_or_else(|| Error::Parse(format!("unknown cost kind '{s}'")))?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad power exponent in '{s}': {e}")))?;
                if !(r.is_finite() && r > 0.0) {
                    return Err(Error::Parse(format!("power exponent must be > 0, got {r}")));
                }
                Ok(CostKind::Power(r))
            }
        }
    }
}

/// A cost shape together with its admissible inexactness interval `Ξ = [lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    kind: CostKind,
    lo: f64,
    hi: f64,
}

impl CostModel {
    pub fn new(kind: CostKind, lo: f64, hi: f64) -> Result<Self> {
        if let CostKind::Power(r) = kind {
            if !(r.is_finite() && r > 0.0) {
                return invalid(format!("power exponent must be finite and > 0, got {r}"));
            }
        }
        if !(lo >= 0.0 && lo.is_finite()) {
            return invalid(format!("domain lower bound must be finite and >= 0, got {lo}"));
        }
        if hi.is_nan() || hi <= lo {
            return invalid(format!("empty domain [{lo}, {hi}]"));
        }
        match kind {
            CostKind::Power(_) => {}
            CostKind::Logarithmic if hi >= 1.0 => {
                return invalid(format!("logarithmic cost needs hi < 1 so that h > 0, got {hi}"))
            }
            CostKind::LogSquared if hi > LOG_SQUARED_MAX_DELTA => {
                return invalid(format!(
                    "log-squared cost needs hi <= 1 - 1e-12 so that h' < 0, got {hi}"
                ))
            }
            _ => {}
        }
        Ok(CostModel { kind, lo, hi })
    }

    pub fn kind(&self) -> CostKind {
        self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn check_delta(&self, delta: f64) -> Result<()> {
        if delta > 0.0 && delta.is_finite() && delta >= self.lo && delta <= self.hi {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "delta",
                value: delta,
                range: format!("[{}, {}] minus zero", self.lo, self.hi),
            })
        }
    }

    /// `h(δ)`.
    pub fn h(&self, delta: f64) -> Result<f64> {
        self.check_delta(delta)?;
        Ok(self.kind.value(delta))
    }

    /// `h'(δ)`, strictly negative on the domain.
    pub fn h_derivative(&self, delta: f64) -> Result<f64> {
        self.check_delta(delta)?;
        Ok(self.kind.derivative(delta))
    }

    /// The `δ` at which `h'(δ) = slope`.
    pub fn h_derivative_inverse(&self, slope: f64) -> Result<f64> {
        if !(slope < 0.0 && slope.is_finite()) {
            return Err(Error::Domain {
                what: "slope",
                value: slope,
                range: "(-inf, 0)".into(),
            });
        }
        let delta = self.kind.derivative_inverse_at(-slope);
        self.check_delta(delta).map_err(|_| Error::Domain {
            what: "slope",
            value: slope,
            range: format!("image of h' over [{}, {}]", self.lo, self.hi),
        })?;
        Ok(delta)
    }

    /// The `δ` at which `h(δ) = cost`.
    pub fn h_inverse(&self, cost: f64) -> Result<f64> {
        if !(cost.is_finite() && cost > 0.0) {
            return Err(Error::Domain {
                what: "cost",
                value: cost,
                range: "(0, inf)".into(),
            });
        }
        let delta = self.kind.inverse(cost);
        self.check_delta(delta).map_err(|_| Error::Domain {
            what: "cost",
            value: cost,
            range: format!("image of h over [{}, {}]", self.lo, self.hi),
        })?;
        Ok(delta)
    }
}

/// Principal branch `W₀` of the Lambert W function, `w·e^w = x` with `w ≥ −1`.
///
/// Halley iteration started from the branch-point series near `−1/e`,
/// `ln(1+x)` for moderate arguments and the asymptotic `ln x − ln ln x`
/// expansion for large ones.
pub fn lambert_w0(x: f64) -> Result<f64> {
    const BRANCH: f64 = -1.0 / E;
    if x.is_nan() || x < BRANCH {
        return Err(Error::Domain {
            what: "x",
            value: x,
            range: "[-1/e, inf)".into(),
        });
    }
    if x == BRANCH {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }

    let mut w = if x < -0.25 {
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        let series = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * 769.0 / 17280.0))));
        if p < 1e-3 {
            return Ok(series);
        }
        series
    } else if x < 3.0 {
        x.ln_1p()
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };

    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 1e-15 * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}
