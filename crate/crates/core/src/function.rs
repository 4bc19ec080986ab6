//! Concave univariate functions with `f(0) = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A concave function family. Root families clamp negative arguments to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConcaveFunction {
    /// `omega * sqrt(y)`.
    SqrtScaled { omega: f64 },
    /// `y^p` with `0 < p < 1`.
    Power { p: f64 },
    /// `c^2 - (y - c)^2`, increasing on `[0, c]`.
    CappedQuadratic { c: f64 },
    /// Slope `slopes[0]` up to `breakpoints[0]`, then `slopes[i]` on the i-th
    /// segment; anchored at `f(0) = 0`.
    PiecewiseLinear { breakpoints: Vec<f64>, slopes: Vec<f64> },
}

impl ConcaveFunction {
    pub fn sqrt() -> Self {
        Self::SqrtScaled { omega: 1.0 }
    }

    pub fn sqrt_scaled(omega: f64) -> Result<Self> {
        let f = Self::SqrtScaled { omega };
        f.validate()?;
        Ok(f)
    }

    pub fn power(p: f64) -> Result<Self> {
        let f = Self::Power { p };
        f.validate()?;
        Ok(f)
    }

    pub fn capped_quadratic(c: f64) -> Result<Self> {
        let f = Self::CappedQuadratic { c };
        f.validate()?;
        Ok(f)
    }

    pub fn piecewise_linear(breakpoints: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        let f = Self::PiecewiseLinear { breakpoints, slopes };
        f.validate()?;
        Ok(f)
    }

    /// Checks the family's parameter constraints, including concavity.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::SqrtScaled { omega } => {
                if !(omega.is_finite() && *omega >= 0.0) {
                    return Err(Error::Input(format!("sqrt scale must be finite and >= 0, got {omega}")));
                }
            }
            Self::Power { p } => {
                if !(*p > 0.0 && *p < 1.0) {
                    return Err(Error::Input(format!("power exponent must lie in (0, 1), got {p}")));
                }
            }
            Self::CappedQuadratic { c } => {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(Error::Input(format!("capped quadratic needs c > 0, got {c}")));
                }
            }
            Self::PiecewiseLinear { breakpoints, slopes } => {
                if slopes.len() != breakpoints.len() + 1 {
                    return Err(Error::Input(format!(
                        "piecewise linear needs {} slopes for {} breakpoints, got {}",
                        breakpoints.len() + 1,
                        breakpoints.len(),
                        slopes.len()
                    )));
                }
                if breakpoints.iter().chain(slopes).any(|v| !v.is_finite()) {
                    return Err(Error::Input("piecewise linear data must be finite".into()));
                }
                if breakpoints.first().is_some_and(|b| *b <= 0.0) {
                    return Err(Error::Input("breakpoints must be positive".into()));
                }
                if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Input("breakpoints must be strictly ascending".into()));
                }
                if slopes.windows(2).any(|w| w[0] < w[1]) {
                    return Err(Error::Input("slopes must be non-increasing (concavity)".into()));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self {
            Self::SqrtScaled { omega } => omega * y.max(0.0).sqrt(),
            Self::Power { p } => y.max(0.0).powf(*p),
            Self::CappedQuadratic { c } => {
                let t = y - c;
                c * c - t * t
            }
            Self::PiecewiseLinear { breakpoints, slopes } => {
                let Some(&b0) = breakpoints.first() else {
                    return slopes[0] * y;
                };
                if y <= b0 {
                    return slopes[0] * y;
                }
                let mut v = slopes[0] * b0;
                let mut left = b0;
                for (i, &s) in slopes.iter().enumerate().skip(1) {
                    let right = breakpoints.get(i).copied().unwrap_or(f64::INFINITY);
                    if y <= right {
                        return v + s * (y - left);
                    }
                    v += s * (right - left);
                    left = right;
                }
                v
            }
        }
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match self {
            Self::SqrtScaled { omega } if *omega == 1.0 => "sqrt(y)".into(),
            Self::SqrtScaled { omega } => format!("{omega}*sqrt(y)"),
            Self::Power { p } => format!("y^{p}"),
            Self::CappedQuadratic { c } => format!("{c}^2 - (y - {c})^2"),
            Self::PiecewiseLinear { breakpoints, .. } => {
                format!("piecewise linear ({} pieces)", breakpoints.len() + 1)
            }
        }
    }
}

/// One `(y1, y2, d)` sample for the decreasing-differences check.
pub type DifferenceSample = (f64, f64, f64);

/// True iff `f(y1+d) - f(y1) >= f(y2+d) - f(y2) - 1e-9` for every sample.
pub fn check_concave_differences(f: &ConcaveFunction, samples: &[DifferenceSample]) -> Result<bool> {
    for (idx, &(y1, y2, d)) in samples.iter().enumerate() {
        if !(y1.is_finite() && y2.is_finite() && d.is_finite()) || d < 0.0 || y1 > y2 {
            return Err(Error::Input(format!(
                "sample {idx} = ({y1}, {y2}, {d}) needs finite values, d >= 0 and y1 <= y2"
            )));
        }
        if f.eval(y1 + d) - f.eval(y1) < f.eval(y2 + d) - f.eval(y2) - crate::TOL {
            return Ok(false);
        }
    }
    Ok(true)
}
