//! Effective sample size, split-half PSRF and time per independent sample.

use rayon::prelude::*;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::error::{Error, Result};

/// Mixing threshold on the largest PSRF.
pub const PSRF_MIXED: f64 = 1.2;
/// Series at least this long use the FFT autocovariance.
pub const FFT_MIN_LEN: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Autocovariance {
    /// Lags summed directly, only as far as the truncation rule needs.
    Direct,
    /// All lags from one zero-padded FFT.
    Fft,
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample variance with the `n - 1` denominator.
fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() as f64 - 1.0)
}

fn fft_autocovariance(centered: &[f64]) -> Vec<f64> {
    let n = centered.len();
    let size = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = centered.iter().map(|&v| Complex::new(v, 0.0)).collect();
    buf.resize(size, Complex::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for c in &mut buf {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    buf[..n].iter().map(|c| c.re / (size as f64 * n as f64)).collect()
}

/// Geyer's initial monotone sequence estimator with the default
/// autocovariance route.
pub fn ess(series: &[f64]) -> Result<f64> {
    let route = if series.len() >= FFT_MIN_LEN { Autocovariance::Fft } else { Autocovariance::Direct };
    ess_with(series, route)
}

/// `n / τ` with `τ = -1 + 2 Σ_k Γ_k`, where `Γ_k = ρ_{2k} + ρ_{2k+1}` is
/// summed while positive and forced nonincreasing. Lags stop at `n / 2`;
/// the result is capped at `n`.
pub fn ess_with(series: &[f64], route: Autocovariance) -> Result<f64> {
    let n = series.len();
    if n < 10 {
        return Err(Error::TooFewSamples { needed: 10, got: n });
    }
    let m = mean(series);
    let centered: Vec<f64> = series.iter().map(|v| v - m).collect();
    let gamma0 = centered.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if !(gamma0 > 0.0) || gamma0 <= f64::EPSILON * f64::EPSILON * m * m {
        return Err(Error::Undefined("ESS of a constant series".into()));
    }

    let all = match route {
        Autocovariance::Fft => Some(fft_autocovariance(&centered)),
        Autocovariance::Direct => None,
    };
    let rho = |k: usize| -> f64 {
        let g = match &all {
            Some(a) => a[k],
            None => centered[..n - k].iter().zip(&centered[k..]).map(|(a, b)| a * b).sum::<f64>() / n as f64,
        };
        g / gamma0
    };

    let max_lag = n / 2;
    let mut tau = -1.0;
    let mut previous = f64::INFINITY;
    let mut k = 0;
    while 2 * k + 1 <= max_lag {
        let pair = rho(2 * k) + rho(2 * k + 1);
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(previous);
        tau += 2.0 * pair;
        previous = pair;
        k += 1;
    }
    // anti-correlated chains can drive tau below 1, even negative
    Ok(n as f64 / tau.max(1.0))
}

/// Split-half potential scale reduction factor.
pub fn psrf(series: &[f64]) -> Result<f64> {
    let n = series.len();
    if n < 20 {
        return Err(Error::TooFewSamples { needed: 20, got: n });
    }
    let m = n / 2;
    let (first, second) = (&series[..m], &series[m..2 * m]);
    let (m1, m2) = (mean(first), mean(second));
    let grand = 0.5 * (m1 + m2);
    let b = m as f64 * ((m1 - grand).powi(2) + (m2 - grand).powi(2));
    let w = 0.5 * (variance(first) + variance(second));
    let scale = grand.abs().max(1.0);
    if !(w > f64::EPSILON * f64::EPSILON * scale * scale) {
        return Err(Error::Undefined("PSRF with zero within-half variance".into()));
    }
    let mf = m as f64;
    Ok((((mf - 1.0) / mf * w + b / mf) / w).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    /// Per-coordinate ESS.
    pub ess: Vec<f64>,
    pub ess_min: f64,
    pub psrf: Vec<f64>,
    pub psrf_max: f64,
    /// `elapsed_us / ess_min`.
    pub t_is_us: f64,
    pub n: usize,
    pub elapsed_us: f64,
    pub mean: Vec<f64>,
    pub cov_diag: Vec<f64>,
}

impl DiagnosticsReport {
    pub fn mixed(&self) -> bool {
        self.psrf_max <= PSRF_MIXED
    }
}

pub fn report(chain: &Chain) -> Result<DiagnosticsReport> {
    let n = chain.len();
    if n < 20 {
        return Err(Error::TooFewSamples { needed: 20, got: n });
    }
    let per_dim: Vec<(f64, f64, f64, f64)> = (0..chain.dim)
        .into_par_iter()
        .map(|j| {
            let xs = chain.coordinate(j);
            Ok((ess(&xs)?, psrf(&xs)?, mean(&xs), variance(&xs)))
        })
        .collect::<Result<_>>()?;
    let ess: Vec<f64> = per_dim.iter().map(|r| r.0).collect();
    let psrf: Vec<f64> = per_dim.iter().map(|r| r.1).collect();
    let ess_min = ess.iter().copied().fold(f64::INFINITY, f64::min);
    let psrf_max = psrf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(DiagnosticsReport {
        t_is_us: chain.elapsed_us / ess_min,
        ess_min,
        psrf_max,
        ess,
        psrf,
        n,
        elapsed_us: chain.elapsed_us,
        mean: per_dim.iter().map(|r| r.2).collect(),
        cov_diag: per_dim.iter().map(|r| r.3).collect(),
    })
}
