//! Unnormalized log-concave targets `pi(x) ∝ exp(-f(x))`.
//!
//! Only ratios of the density are ever needed, so normalizing constants are
//! never computed.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::polytope::HPolytope;

/// `f(x + t·u) - f(x)` as a function of `t`, when it has a closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LineRestriction {
    /// Constant along the line.
    Flat,
    /// `slope·t + curvature·t²/2`.
    Quadratic { curvature: f64, slope: f64 },
    /// No closed form; evaluate `f` pointwise.
    General,
}

/// Negative log-density `f` with gradient and curvature bounds.
pub trait LogDensity: Send + Sync + fmt::Debug {
    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64], out: &mut [f64]);

    /// Smoothness constant `L`.
    fn smoothness(&self) -> f64;

    /// Strong convexity constant `m`.
    fn strong_convexity(&self) -> f64;

    /// `L / m`; `None` when `f` is not strongly convex.
    fn condition_number(&self) -> Option<f64> {
        let m = self.strong_convexity();
        (m > 0.0).then(|| self.smoothness() / m)
    }

    fn line_restriction(&self, _x: &[f64], _u: &[f64]) -> LineRestriction {
        LineRestriction::General
    }

    /// True when `f` is identically zero.
    fn is_uniform(&self) -> bool {
        false
    }

    fn gradient_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        self.gradient(x, &mut g);
        g
    }
}

/// Axis-aligned Gaussian `f(x) = Σ (x_i - c_i)² / (2 σ_i²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gaussian {
    center: Vec<f64>,
    precision: Vec<f64>,
}

impl Gaussian {
    pub fn isotropic(center: Vec<f64>, sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::InvalidArgument(format!("variance must be positive, got {sigma2}")));
        }
        let precision = vec![1.0 / sigma2; center.len()];
        Ok(Self { center, precision })
    }

    pub fn diagonal(center: Vec<f64>, variances: &[f64]) -> Result<Self> {
        if center.len() != variances.len() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                got: variances.len(),
            });
        }
        if let Some(v) = variances.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("variance must be positive, got {v}")));
        }
        let precision = variances.iter().map(|v| 1.0 / v).collect();
        Ok(Self { center, precision })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn precision(&self) -> &[f64] {
        &self.precision
    }
}

impl LogDensity for Gaussian {
    fn value(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.center)
            .zip(&self.precision)
            .map(|((xi, ci), pi)| 0.5 * pi * (xi - ci) * (xi - ci))
            .sum()
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        for (((o, xi), ci), pi) in out.iter_mut().zip(x).zip(&self.center).zip(&self.precision) {
            *o = pi * (xi - ci);
        }
    }

    fn smoothness(&self) -> f64 {
        self.precision.iter().copied().fold(0.0, f64::max)
    }

    fn strong_convexity(&self) -> f64 {
        self.precision.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn line_restriction(&self, x: &[f64], u: &[f64]) -> LineRestriction {
        let mut curvature = 0.0;
        let mut slope = 0.0;
        for (((xi, ui), ci), pi) in x.iter().zip(u).zip(&self.center).zip(&self.precision) {
            curvature += pi * ui * ui;
            slope += pi * ui * (xi - ci);
        }
        LineRestriction::Quadratic { curvature, slope }
    }
}

/// `f ≡ 0`: the uniform density on the polytope.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Uniform;

impl LogDensity for Uniform {
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }

    fn gradient(&self, _x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }

    fn smoothness(&self) -> f64 {
        0.0
    }

    fn strong_convexity(&self) -> f64 {
        0.0
    }

    /// Treated as perfectly conditioned.
    fn condition_number(&self) -> Option<f64> {
        Some(1.0)
    }

    fn line_restriction(&self, _x: &[f64], _u: &[f64]) -> LineRestriction {
        LineRestriction::Flat
    }

    fn is_uniform(&self) -> bool {
        true
    }
}

/// Linear potential `f(x) = c·x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Exponential {
    c: Vec<f64>,
}

impl Exponential {
    pub fn new(c: Vec<f64>) -> Self {
        Self { c }
    }
}

impl LogDensity for Exponential {
    fn value(&self, x: &[f64]) -> f64 {
        crate::linalg::dot(&self.c, x)
    }

    fn gradient(&self, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.c);
    }

    fn smoothness(&self) -> f64 {
        0.0
    }

    fn strong_convexity(&self) -> f64 {
        0.0
    }

    fn is_uniform(&self) -> bool {
        self.c.iter().all(|&v| v == 0.0)
    }
}

/// Where a Gaussian descriptor puts its mean.
#[derive(Clone, Debug, PartialEq)]
pub enum CenterSpec {
    Chebyshev,
    Origin,
    Point(Vec<f64>),
}

/// Parsed form of the command-line density descriptor:
/// `gaussian:sigma2=<v>,center=cheby|origin|<csv>`, `uniform`,
/// `exponential:c=<csv>`.
#[derive(Clone, Debug, PartialEq)]
pub enum DensitySpec {
    Gaussian { sigma2: f64, center: CenterSpec },
    Uniform,
    Exponential { c: Vec<f64> },
}

fn parse_csv(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number `{t}`: {e}")))
        })
        .collect()
}

/// Splits `k1=v1,k2=v2a,v2b` so that bare tokens extend the previous value.
fn key_values(s: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for token in s.split(',') {
        match token.split_once('=') {
            Some((k, v)) => out.push((k.trim().to_ascii_lowercase(), v.trim().to_string())),
            None => match out.last_mut() {
                Some((_, v)) => {
                    v.push(',');
                    v.push_str(token.trim());
                }
                None => return Err(Error::Parse(format!("expected key=value, got `{token}`"))),
            },
        }
    }
    Ok(out)
}

impl FromStr for DensitySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        match kind.to_ascii_lowercase().as_str() {
            "uniform" => Ok(DensitySpec::Uniform),
            "gaussian" => {
                let mut sigma2 = 1.0;
                let mut center = CenterSpec::Chebyshev;
                if !rest.is_empty() {
                    for (k, v) in key_values(rest)? {
                        match k.as_str() {
                            "sigma2" => {
                                sigma2 = v
                                    .parse()
                                    .map_err(|e| Error::Parse(format!("bad sigma2 `{v}`: {e}")))?
                            }
                            "center" => {
                                center = match v.to_ascii_lowercase().as_str() {
                                    "cheby" | "chebyshev" => CenterSpec::Chebyshev,
                                    "origin" => CenterSpec::Origin,
                                    _ => CenterSpec::Point(parse_csv(&v)?),
                                }
                            }
                            other => return Err(Error::Parse(format!("unknown gaussian option `{other}`"))),
                        }
                    }
                }
                if !(sigma2 > 0.0) {
                    return Err(Error::Parse(format!("sigma2 must be positive, got {sigma2}")));
                }
                Ok(DensitySpec::Gaussian { sigma2, center })
            }
            "exponential" => {
                let kv = key_values(rest)?;
                let c = kv
                    .iter()
                    .find(|(k, _)| k == "c")
                    .ok_or_else(|| Error::Parse("exponential needs c=<csv>".into()))?;
                Ok(DensitySpec::Exponential { c: parse_csv(&c.1)? })
            }
            other => Err(Error::Parse(format!("unknown density `{other}`"))),
        }
    }
}

impl fmt::Display for DensitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let csv = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            DensitySpec::Uniform => write!(f, "uniform"),
            DensitySpec::Gaussian { sigma2, center } => {
                let c = match center {
                    CenterSpec::Chebyshev => "cheby".to_string(),
                    CenterSpec::Origin => "origin".to_string(),
                    CenterSpec::Point(p) => csv(p),
                };
                write!(f, "gaussian:sigma2={sigma2},center={c}")
            }
            DensitySpec::Exponential { c } => write!(f, "exponential:c={}", csv(c)),
        }
    }
}

impl DensitySpec {
    /// Instantiates the density for a given body.
    pub fn build(&self, poly: &HPolytope) -> Result<Arc<dyn LogDensity>> {
        let d = poly.dim();
        let check = |v: &[f64]| {
            if v.len() != d {
                Err(Error::DimensionMismatch { expected: d, got: v.len() })
            } else {
                Ok(())
            }
        };
        Ok(match self {
            DensitySpec::Uniform => Arc::new(Uniform),
            DensitySpec::Gaussian { sigma2, center } => {
                let c = match center {
                    CenterSpec::Chebyshev => crate::lp::chebyshev_center(poly)?.center,
                    CenterSpec::Origin => vec![0.0; d],
                    CenterSpec::Point(p) => {
                        check(p)?;
                        p.clone()
                    }
                };
                Arc::new(Gaussian::isotropic(c, *sigma2)?)
            }
            DensitySpec::Exponential { c } => {
                check(c)?;
                Arc::new(Exponential::new(c.clone()))
            }
        })
    }
}
