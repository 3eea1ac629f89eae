//! Exact and gridded one-dimensional draws for chord samplers.

use statrs::function::erf::erfc;

use crate::rng::ChainRng;

/// Grid intervals of the numeric inverse CDF (an even count, for Simpson).
pub const GRID_INTERVALS: usize = 4096;

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

/// Inverse standard normal CDF, Acklam's rational approximation
/// (relative error below 1.15e-9 on `(0, 1)`).
pub fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00, 3.754408661907416e+00];
    const LOW: f64 = 0.02425;

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    }
}

/// `N(0, 1)` restricted to `[a, b]` by inversion, or `None` when the
/// interval carries too little mass to invert in double precision.
pub fn truncated_standard_normal(a: f64, b: f64, rng: &mut ChainRng) -> Option<f64> {
    debug_assert!(a <= b);
    // work in the lower tail, where the CDF keeps its relative precision
    if a > 0.0 {
        return truncated_standard_normal(-b, -a, rng).map(|z| -z);
    }
    let (pa, pb) = (normal_cdf(a), normal_cdf(b));
    let mass = pb - pa;
    if !(mass > 1e-300) || mass < 1e-12 * pb {
        return None;
    }
    let z = normal_quantile(pa + rng.uniform() * mass);
    z.is_finite().then(|| z.clamp(a, b))
}

/// Density `∝ exp(-slope·t)` on `[a, b]`.
pub fn truncated_exponential(slope: f64, a: f64, b: f64, rng: &mut ChainRng) -> f64 {
    let len = b - a;
    let rate = slope.abs();
    if rate * len < 1e-12 {
        return a + rng.uniform() * len;
    }
    let r = -(rng.uniform() * (-rate * len).exp_m1()).ln_1p() / rate;
    let r = r.clamp(0.0, len);
    if slope > 0.0 {
        a + r
    } else {
        b - r
    }
}

/// Draws `t` with density `∝ exp(-g(t))` on `[a, b]` from a composite
/// Simpson inverse CDF on `GRID_INTERVALS + 1` nodes. `g` is evaluated in
/// log space relative to its minimum on the grid.
pub fn gridded_draw(mut g: impl FnMut(f64) -> f64, a: f64, b: f64, rng: &mut ChainRng) -> f64 {
    let n = GRID_INTERVALS;
    let h = (b - a) / n as f64;
    let logs: Vec<f64> = (0..=n).map(|i| -g(a + i as f64 * h)).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return a + rng.uniform() * (b - a);
    }
    let w: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();

    // cumulative integral at even nodes
    let panels = n / 2;
    let mut cum = vec![0.0; panels + 1];
    for k in 0..panels {
        let (w0, w1, w2) = (w[2 * k], w[2 * k + 1], w[2 * k + 2]);
        cum[k + 1] = cum[k] + h / 3.0 * (w0 + 4.0 * w1 + w2);
    }
    let target = rng.uniform() * cum[panels];
    let k = cum.partition_point(|&c| c <= target).clamp(1, panels) - 1;
    let (w0, w1, w2) = (w[2 * k], w[2 * k + 1], w[2 * k + 2]);
    let rest = target - cum[k];
    // quadratic interpolant through the panel nodes, s in [0, 2] (units of h)
    let c0 = w0;
    let c1 = (-3.0 * w0 + 4.0 * w1 - w2) / 2.0;
    let c2 = (w0 - 2.0 * w1 + w2) / 2.0;
    let integral = |s: f64| h * (c0 * s + c1 * s * s / 2.0 + c2 * s * s * s / 3.0);
    let (mut lo, mut hi) = (0.0, 2.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if integral(mid) < rest {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (a + (2 * k) as f64 * h + 0.5 * (lo + hi) * h).clamp(a, b)
}

/// Composite Simpson rule with `n` (even) intervals.
pub fn simpson(g: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| g(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    h / 3.0 * (g(a) + inner + g(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_inverts_cdf() {
        for &p in &[1e-12, 1e-6, 0.01, 0.02425, 0.2, 0.5, 0.77, 0.99, 1.0 - 1e-9] {
            let z = normal_quantile(p);
            assert!((normal_cdf(z) - p).abs() <= 1.2e-8 * p.min(1.0 - p).max(1e-3), "{p}");
        }
        assert!(normal_quantile(0.5).abs() < 1e-15);
        assert!((normal_quantile(0.975) - 1.959963984540054).abs() < 1e-8);
    }

    #[test]
    fn simpson_oracle_for_truncated_variance() {
        // second moment of N(0, 1) on [-1, 1]
        let num = simpson(|x| x * x * (-x * x / 2.0).exp(), -1.0, 1.0, 4096);
        let den = simpson(|x| (-x * x / 2.0).exp(), -1.0, 1.0, 4096);
        assert!((num / den - 0.2911).abs() < 5e-5);
    }

    fn ks_statistic(mut draws: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = draws.len() as f64;
        draws
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let c = cdf(x);
                (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn truncated_normal_matches_its_cdf() {
        let mut rng = ChainRng::new(21);
        for (a, b) in [(-1.0, 1.0), (0.5, 3.0), (-4.0, -2.5), (6.0, 9.0)] {
            let draws: Vec<f64> = (0..100_000).map(|_| truncated_standard_normal(a, b, &mut rng).unwrap()).collect();
            assert!(draws.iter().all(|&z| (a..=b).contains(&z)));
            let (pa, pb) = (normal_cdf(a), normal_cdf(b));
            let cdf = |z: f64| {
                if a > 0.0 {
                    // upper-tail form avoids cancellation
                    (normal_cdf(-a) - normal_cdf(-z)) / (normal_cdf(-a) - normal_cdf(-b))
                } else {
                    (normal_cdf(z) - pa) / (pb - pa)
                }
            };
            let ks = ks_statistic(draws, cdf);
            assert!(ks <= 0.01, "[{a}, {b}]: {ks}");
        }
        assert!(truncated_standard_normal(40.0, 41.0, &mut rng).is_none());
    }

    #[test]
    fn exponential_and_grid_draws() {
        let mut rng = ChainRng::new(8);
        let n = 100_000;
        // E[t] for exp(-t) on [0, 1]
        let want = (1.0 - 2.0 / std::f64::consts::E) / (1.0 - 1.0 / std::f64::consts::E);
        let quad = simpson(|t| t * (-t).exp(), 0.0, 1.0, 4096) / simpson(|t| (-t).exp(), 0.0, 1.0, 4096);
        assert!((want - quad).abs() < 1e-12);
        assert!((want - 0.4180).abs() < 1e-4);
        let sd = (simpson(|t| (t - want).powi(2) * (-t).exp(), 0.0, 1.0, 4096)
            / simpson(|t| (-t).exp(), 0.0, 1.0, 4096))
        .sqrt();
        for draw in [
            Box::new(|r: &mut ChainRng| truncated_exponential(1.0, 0.0, 1.0, r)) as Box<dyn Fn(&mut ChainRng) -> f64>,
            Box::new(|r: &mut ChainRng| gridded_draw(|t| t, 0.0, 1.0, r)),
        ] {
            let mean = (0..n).map(|_| draw(&mut rng)).sum::<f64>() / n as f64;
            assert!((mean - want).abs() < 4.0 * sd / (n as f64).sqrt(), "{mean}");
        }
        let neg = (0..n).map(|_| truncated_exponential(-1.0, -1.0, 0.0, &mut rng)).sum::<f64>() / n as f64;
        assert!((neg + want).abs() < 4.0 * sd / (n as f64).sqrt());
    }

    #[test]
    fn grid_matches_truncated_normal() {
        let mut rng = ChainRng::new(13);
        let draws: Vec<f64> = (0..100_000).map(|_| gridded_draw(|t| t * t / 2.0, -1.0, 1.0, &mut rng)).collect();
        let (pa, pb) = (normal_cdf(-1.0), normal_cdf(1.0));
        let var = draws.iter().map(|t| t * t).sum::<f64>() / draws.len() as f64;
        assert!((var - 0.2911).abs() < 0.003, "{var}");
        assert!(ks_statistic(draws, |z| (normal_cdf(z) - pa) / (pb - pa)) <= 0.01);
    }
}
