//! Reflective Hamiltonian Monte Carlo.
//!
//! One leapfrog step of size `η` from `(x, v)`:
//!
//! ```text
//! v̂  = v - η/2 ∇f(x)
//! x' = billiard path of length η·|v̂| from x along v̂, mirrored at facets
//! v' = v̂_final - η/2 ∇f(x')
//! ```
//!
//! A proposal chains `w` such steps from a fresh `v ~ N(0, I)` and passes a
//! Metropolis filter on `H = |v|²/2 + f(x)`. Reflections preserve `|v|`, and
//! the map is reversible and volume preserving, so the filter targets
//! `exp(-f)` restricted to the body.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::density::LogDensity;
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::lp::{chebyshev_center, minimize_on_polytope, FrankWolfeOptions};
use crate::polytope::{Billiard, HPolytope, Travel};
use crate::rng::ChainRng;

/// Polytopes with at most this many facets get a Gram matrix.
pub const GRAM_FACET_LIMIT: usize = 2048;
/// Divisor bounds of one step-size update.
pub const ADAPT_CLAMP: (f64, f64) = (0.5, 10.0);

#[derive(Clone, Debug, PartialEq)]
pub struct WalkState {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub eta: f64,
    pub reflections_this_step: usize,
    pub total_steps: usize,
}

impl WalkState {
    pub fn new(x: Vec<f64>, v: Vec<f64>, eta: f64) -> Self {
        Self { x, v, eta, reflections_this_step: 0, total_steps: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Leapfrog {
    Moved { x: Vec<f64>, v: Vec<f64>, reflections: usize },
    /// The billiard path needed more than `max_reflections` reflections.
    TooManyReflections,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum StepSize {
    Fixed(f64),
    /// One tenth of the Chebyshev radius.
    Auto,
}

/// How the burn-in updates `η`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdaptRule {
    /// `η <- η / clamp(λ̂·η, 0.5, 10)` with `λ̂ = Σℓ / Ση` the reflection
    /// rate per unit step size over the whole history. Its fixed point is one
    /// reflection per leapfrog step on average.
    #[default]
    RateNormalized,
    /// `η <- η / clamp(mean ℓ, 0.5, 10)`; see [`adapt_step_size`].
    CumulativeMean,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReHmcConfig {
    pub eta0: StepSize,
    pub walk_length: usize,
    /// `None` means `100·d`.
    pub max_reflections: Option<usize>,
    pub burn_in: usize,
    pub n_samples: usize,
    pub seed: u64,
    /// RNG stream id, for independent chains sharing a seed.
    pub stream: u64,
    pub adapt: bool,
    pub adapt_rule: AdaptRule,
}

impl Default for ReHmcConfig {
    fn default() -> Self {
        Self {
            eta0: StepSize::Auto,
            walk_length: 1,
            max_reflections: None,
            burn_in: 1000,
            n_samples: 1000,
            seed: 0,
            stream: 0,
            adapt: true,
            adapt_rule: AdaptRule::RateNormalized,
        }
    }
}

impl ReHmcConfig {
    pub fn max_reflections_for(&self, d: usize) -> usize {
        self.max_reflections.unwrap_or(100 * d)
    }

    fn validate(&self) -> Result<()> {
        if self.walk_length == 0 {
            return Err(Error::InvalidArgument("walk length must be at least 1".into()));
        }
        if let StepSize::Fixed(eta) = self.eta0 {
            if !(eta > 0.0) || !eta.is_finite() {
                return Err(Error::InvalidArgument(format!("step size must be positive, got {eta}")));
            }
        }
        Ok(())
    }
}

/// Literal cumulative-mean update `η_{t+1} = η_t / clamp(mean(ℓ_1..ℓ_t), 0.5, 10)`.
pub fn adapt_step_size(eta: f64, history: &[f64]) -> f64 {
    if history.is_empty() {
        return eta;
    }
    let mean = history.iter().sum::<f64>() / history.len() as f64;
    eta / mean.clamp(ADAPT_CLAMP.0, ADAPT_CLAMP.1)
}

/// Running reflection statistics of the burn-in.
#[derive(Clone, Debug, Default)]
struct Adapter {
    rule: AdaptRule,
    reflections: f64,
    travelled: f64,
    steps: usize,
}

impl Adapter {
    fn record(&mut self, eta: f64, reflections: &[u32]) {
        for &k in reflections {
            self.reflections += k as f64;
            self.travelled += eta;
            self.steps += 1;
        }
    }

    fn update(&self, eta: f64) -> f64 {
        if self.steps == 0 {
            return eta;
        }
        let divisor = match self.rule {
            AdaptRule::CumulativeMean => self.reflections / self.steps as f64,
            AdaptRule::RateNormalized => self.reflections / self.travelled * eta,
        };
        eta / divisor.clamp(ADAPT_CLAMP.0, ADAPT_CLAMP.1)
    }
}

/// Velocity half-update, billiard position update, velocity half-update.
/// `grad` holds `∇f(x)` on entry and `∇f(x')` on exit.
fn integrate(
    p: &HPolytope,
    f: &dyn LogDensity,
    x: &mut Vec<f64>,
    v: &mut Vec<f64>,
    grad: &mut [f64],
    eta: f64,
    max_reflections: usize,
    uniform: bool,
) -> Option<usize> {
    let half = 0.5 * eta;
    if !uniform {
        for (vi, gi) in v.iter_mut().zip(grad.iter()) {
            *vi -= half * gi;
        }
    }
    let mut tracer = Billiard::new(p, std::mem::take(x), std::mem::take(v));
    let outcome = tracer.travel(eta, max_reflections);
    let (xn, vn) = tracer.into_state();
    *x = xn;
    *v = vn;
    let Travel::Completed { reflections } = outcome else {
        return None;
    };
    if !uniform {
        f.gradient(x, grad);
        for (vi, gi) in v.iter_mut().zip(grad.iter()) {
            *vi -= half * gi;
        }
    }
    Some(reflections)
}

fn check_state(p: &HPolytope, x: &[f64], v: &[f64]) -> Result<()> {
    let d = p.dim();
    for len in [x.len(), v.len()] {
        if len != d {
            return Err(Error::DimensionMismatch { expected: d, got: len });
        }
    }
    if !p.contains_unchecked(x, 1e-9) {
        return Err(Error::InvalidArgument("position lies outside the polytope".into()));
    }
    Ok(())
}

/// One reflective leapfrog step from `state`.
pub fn leapfrog_step(state: &WalkState, f: &dyn LogDensity, p: &HPolytope, max_reflections: usize) -> Result<Leapfrog> {
    check_state(p, &state.x, &state.v)?;
    if !(state.eta > 0.0) {
        return Err(Error::InvalidArgument(format!("step size must be positive, got {}", state.eta)));
    }
    let mut x = state.x.clone();
    let mut v = state.v.clone();
    let mut grad = f.gradient_vec(&x);
    Ok(
        match integrate(p, f, &mut x, &mut v, &mut grad, state.eta, max_reflections, f.is_uniform()) {
            Some(reflections) => Leapfrog::Moved { x, v, reflections },
            None => Leapfrog::TooManyReflections,
        },
    )
}

/// `min{1, exp(h0 - h1)}`.
pub fn acceptance_probability(h0: f64, h1: f64) -> f64 {
    let delta = h0 - h1;
    if delta >= 0.0 {
        1.0
    } else {
        delta.exp()
    }
}

/// `H(x, v) = |v|²/2 + f(x)`.
pub fn hamiltonian(f: &dyn LogDensity, x: &[f64], v: &[f64]) -> f64 {
    0.5 * dot(v, v) + f.value(x)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepParams {
    pub eta: f64,
    pub walk_length: usize,
    pub max_reflections: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HmcStep {
    pub x: Vec<f64>,
    pub accepted: bool,
    /// Reflections of each leapfrog step that ran.
    pub reflections: Vec<u32>,
    /// A leapfrog step exceeded the reflection budget.
    pub overflow: bool,
}

impl HmcStep {
    pub fn total_reflections(&self) -> usize {
        self.reflections.iter().map(|&k| k as usize).sum()
    }
}

/// One Metropolis-corrected proposal of `walk_length` leapfrog steps.
/// Rejections, including budget overflows, return `x` unchanged.
pub fn hmc_step(x: &[f64], f: &dyn LogDensity, p: &HPolytope, params: &StepParams, rng: &mut ChainRng) -> Result<HmcStep> {
    let d = p.dim();
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.len() });
    }
    let v0 = rng.normal_vec(d);
    let mut grad = f.gradient_vec(x);
    Ok(propose(x, v0, f, p, params, rng, &mut grad))
}

/// `grad` holds `∇f(x)` on entry and the gradient at the returned point on exit.
fn propose(
    x: &[f64],
    v0: Vec<f64>,
    f: &dyn LogDensity,
    p: &HPolytope,
    params: &StepParams,
    rng: &mut ChainRng,
    grad: &mut Vec<f64>,
) -> HmcStep {
    let uniform = f.is_uniform();
    let h0 = if uniform { 0.0 } else { hamiltonian(f, x, &v0) };
    let start_grad = if uniform { Vec::new() } else { grad.clone() };
    let mut xt = x.to_vec();
    let mut vt = v0;
    let mut reflections = Vec::with_capacity(params.walk_length);
    let mut overflow = false;
    for _ in 0..params.walk_length {
        match integrate(p, f, &mut xt, &mut vt, grad, params.eta, params.max_reflections, uniform) {
            Some(k) => reflections.push(k as u32),
            None => {
                reflections.push(params.max_reflections as u32);
                overflow = true;
                break;
            }
        }
    }

    let inside = !overflow && p.contains_unchecked(&xt, 1e-9);
    // f ≡ 0: reflections preserve |v|, so H is conserved and every proposal is accepted
    let accepted = inside && (uniform || rng.uniform() < acceptance_probability(h0, hamiltonian(f, &xt, &vt)));
    if accepted {
        let before = xt.clone();
        p.nudge_inward(&mut xt);
        if !uniform && xt != before {
            f.gradient(&xt, grad);
        }
        HmcStep { x: xt, accepted, reflections, overflow }
    } else {
        if !uniform {
            *grad = start_grad;
        }
        HmcStep { x: x.to_vec(), accepted: false, reflections, overflow }
    }
}

/// Draws `x ~ N(mean, σ²I)` until `x` lies strictly inside `p`. Returns the
/// point, if any, and the number of tries used.
fn truncated_gaussian_draw(
    p: &HPolytope,
    mean: &[f64],
    sd: f64,
    rng: &mut ChainRng,
    max_tries: usize,
) -> (Option<Vec<f64>>, usize) {
    let d = p.dim();
    let mut z = vec![0.0; d];
    for attempt in 1..=max_tries {
        rng.fill_normal(&mut z);
        for (zi, mi) in z.iter_mut().zip(mean) {
            *zi = mi + sd * *zi;
        }
        if p.max_violation(&z) < -1e-12 {
            return (Some(z), attempt);
        }
    }
    (None, max_tries)
}

/// Starting point: a draw from `N_K(x*, I/L)` with `x*` the constrained
/// minimizer of `f`, by rejection. Falls back to the Chebyshev center when
/// `L = 0` or every try is rejected.
pub fn warm_start(f: &dyn LogDensity, p: &HPolytope, rng: &mut ChainRng, max_tries: usize) -> Result<Vec<f64>> {
    let center = chebyshev_center(p)?.center;
    let l = f.smoothness();
    if !(l > 0.0) {
        return Ok(center);
    }
    let opts = FrankWolfeOptions { tol: 1e-6, max_iters: Some(10_000) };
    let mode = minimize_on_polytope(f, p, opts).map(|r| r.point).unwrap_or_else(|_| center.clone());
    Ok(truncated_gaussian_draw(p, &mode, 1.0 / l.sqrt(), rng, max_tries)
        .0
        .unwrap_or(center))
}

/// Proxy start `N_K(z, I/(2Λ))` for an explicit reference point `z`.
pub fn warm_start_proxy(p: &HPolytope, z: &[f64], lambda: f64, rng: &mut ChainRng, max_tries: usize) -> Result<Vec<f64>> {
    if z.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: z.len() });
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("proxy curvature must be positive, got {lambda}")));
    }
    let sd = (0.5 / lambda).sqrt();
    match truncated_gaussian_draw(p, z, sd, rng, max_tries).0 {
        Some(x) => Ok(x),
        None => Ok(chebyshev_center(p)?.center),
    }
}

/// Fraction of `N(mean, σ²I)` draws that land inside `p`.
pub fn rejection_acceptance_rate(p: &HPolytope, mean: &[f64], sd: f64, tries: usize, rng: &mut ChainRng) -> f64 {
    let mut hits = 0usize;
    for _ in 0..tries {
        if truncated_gaussian_draw(p, mean, sd, rng, 1).0.is_some() {
            hits += 1;
        }
    }
    hits as f64 / tries as f64
}

/// Resolves the starting step size.
pub fn initial_step_size(eta0: StepSize, p: &HPolytope) -> Result<f64> {
    match eta0 {
        StepSize::Fixed(eta) => Ok(eta),
        StepSize::Auto => Ok(chebyshev_center(p)?.radius / 10.0),
    }
}

/// Polytope with a Gram matrix when one is affordable.
pub(crate) fn with_gram(p: &HPolytope) -> std::borrow::Cow<'_, HPolytope> {
    if p.gram().is_none() && p.num_facets() <= GRAM_FACET_LIMIT {
        std::borrow::Cow::Owned(p.clone().precompute_gram())
    } else {
        std::borrow::Cow::Borrowed(p)
    }
}

/// Warm start, burn-in with step-size adaptation, then `n_samples` draws at
/// the frozen step size.
pub fn sample(f: &dyn LogDensity, p: &HPolytope, cfg: &ReHmcConfig) -> Result<Chain> {
    cfg.validate()?;
    let d = p.dim();
    let p = with_gram(p);
    let p = p.as_ref();
    let mut rng = ChainRng::with_stream(cfg.seed, cfg.stream);
    let mut eta = initial_step_size(cfg.eta0, p)?;
    let mut params = StepParams { eta, walk_length: cfg.walk_length, max_reflections: cfg.max_reflections_for(d) };
    let mut chain = Chain::new(d);

    let mut x = warm_start(f, p, &mut rng, 1000)?;
    p.nudge_inward(&mut x);
    let mut grad = f.gradient_vec(&x);
    let mut adapter = Adapter { rule: cfg.adapt_rule, ..Adapter::default() };
    for _ in 0..cfg.burn_in {
        let v0 = rng.normal_vec(d);
        let step = propose(&x, v0, f, p, &params, &mut rng, &mut grad);
        x = step.x;
        if cfg.adapt {
            adapter.record(eta, &step.reflections);
            eta = adapter.update(eta);
            params.eta = eta;
            chain.eta_trace.push(eta);
        }
    }
    chain.final_eta = Some(eta);

    chain.samples.reserve(cfg.n_samples * d);
    chain.reflection_counts.reserve(cfg.n_samples * cfg.walk_length);
    let started = Instant::now();
    for _ in 0..cfg.n_samples {
        let v0 = rng.normal_vec(d);
        let step = propose(&x, v0, f, p, &params, &mut rng, &mut grad);
        chain.proposed += 1;
        chain.accepted += step.accepted as usize;
        chain.reflection_counts.extend_from_slice(&step.reflections);
        x = step.x;
        chain.push(&x);
    }
    chain.elapsed_us = started.elapsed().as_secs_f64() * 1e6;

    if chain.proposed > 0 && chain.acceptance_rate() < 0.01 {
        chain.warnings.push(format!(
            "acceptance rate {:.4} is below 1%; the step size {eta:.3e} is likely too large",
            chain.acceptance_rate()
        ));
    }
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{Gaussian, Uniform};
    use crate::linalg::norm;
    use crate::polytope::{generate, random_rotation, Family};

    fn moved(out: Leapfrog) -> (Vec<f64>, Vec<f64>, usize) {
        match out {
            Leapfrog::Moved { x, v, reflections } => (x, v, reflections),
            Leapfrog::TooManyReflections => panic!("unexpected overflow"),
        }
    }

    #[test]
    fn one_dimensional_traces() {
        let p = generate(Family::Cube, 1).unwrap();
        let (x, v, k) = moved(leapfrog_step(&WalkState::new(vec![0.9], vec![1.0], 0.3), &Uniform, &p, 10).unwrap());
        assert!((x[0] - 0.8).abs() < 1e-15);
        assert_eq!((v[0], k), (-1.0, 1));

        let (x, v, k) = moved(leapfrog_step(&WalkState::new(vec![0.0], vec![1.0], 0.3), &Uniform, &p, 10).unwrap());
        assert!((x[0] - 0.3).abs() < 1e-15);
        assert_eq!((v[0], k), (1.0, 0));
    }

    #[test]
    fn gaussian_leapfrog_by_hand() {
        let p = HPolytope::from_rows(&[vec![1.0], vec![-1.0]], &[1e6, 1e6]).unwrap();
        let f = Gaussian::isotropic(vec![0.0], 1.0).unwrap();
        let (x, v, k) = moved(leapfrog_step(&WalkState::new(vec![0.5], vec![0.0], 0.1), &f, &p, 10).unwrap());
        let vhat: f64 = 0.0 - 0.05 * 0.5;
        let xn = 0.5 + 0.1 * vhat;
        let vn = vhat - 0.05 * xn;
        assert_eq!(k, 0);
        assert!((vhat + 0.025).abs() < 1e-15);
        assert!((x[0] - 0.4975).abs() < 1e-15);
        assert!((v[0] - vn).abs() < 1e-15);
    }

    #[test]
    fn overflow_is_signalled() {
        let p = generate(Family::Cube, 1).unwrap();
        let out = leapfrog_step(&WalkState::new(vec![0.0], vec![1.0], 10.0), &Uniform, &p, 3).unwrap();
        assert_eq!(out, Leapfrog::TooManyReflections);
    }

    #[test]
    fn reversible_and_speed_preserving() {
        let p = random_rotation(&generate(Family::Simplex, 5).unwrap(), 1).precompute_gram();
        let f = Gaussian::isotropic(vec![0.1; 5], 0.5).unwrap();
        let mut rng = ChainRng::new(7);
        let x0 = chebyshev_center(&p).unwrap().center;
        let mut multi = 0;
        for _ in 0..200 {
            let v0 = rng.normal_vec(5);
            let eta = 0.05 + 0.5 * rng.uniform();
            let (x1, v1, k) = moved(leapfrog_step(&WalkState::new(x0.clone(), v0.clone(), eta), &Uniform, &p, 500).unwrap());
            multi += (k > 1) as usize;
            assert!((norm(&v1) - norm(&v0)).abs() < 1e-10);
            let back: Vec<f64> = v1.iter().map(|c| -c).collect();
            let (x2, v2, _) = moved(leapfrog_step(&WalkState::new(x1, back, eta), &Uniform, &p, 500).unwrap());
            for k in 0..5 {
                assert!((x2[k] - x0[k]).abs() < 1e-8);
                assert!((v2[k] + v0[k]).abs() < 1e-8);
            }

            let (x1, v1, _) = moved(leapfrog_step(&WalkState::new(x0.clone(), v0.clone(), eta), &f, &p, 500).unwrap());
            let back: Vec<f64> = v1.iter().map(|c| -c).collect();
            let (x2, v2, _) = moved(leapfrog_step(&WalkState::new(x1, back, eta), &f, &p, 500).unwrap());
            for k in 0..5 {
                assert!((x2[k] - x0[k]).abs() < 1e-8);
                assert!((v2[k] + v0[k]).abs() < 1e-8);
            }
        }
        assert!(multi > 10, "too few multi-reflection paths: {multi}");
    }

    #[test]
    fn energy_error_is_third_order() {
        let p = HPolytope::from_rows(&[vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]], &[1e6; 4])
            .unwrap();
        let f = Gaussian::diagonal(vec![0.0, 0.0], &[1.0, 0.25]).unwrap();
        let mut rng = ChainRng::new(3);
        let mut ratios = Vec::new();
        for _ in 0..200 {
            let x = rng.normal_vec(2);
            let v = rng.normal_vec(2);
            let eta = 0.1;
            let dh = |eta: f64| {
                let (x1, v1, _) = moved(leapfrog_step(&WalkState::new(x.clone(), v.clone(), eta), &f, &p, 0).unwrap());
                (hamiltonian(&f, &x1, &v1) - hamiltonian(&f, &x, &v)).abs()
            };
            ratios.push(dh(eta) / dh(eta / 2.0));
        }
        ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = ratios[ratios.len() / 2];
        assert!((4.0..=16.0).contains(&median), "{median}");
    }

    #[test]
    fn acceptance_arithmetic() {
        assert!((acceptance_probability(1.0, 2.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((acceptance_probability(1.0, 2.0) - 0.36788).abs() < 1e-5);
        assert_eq!(acceptance_probability(2.0, 1.0), 1.0);
    }

    #[test]
    fn literal_adaptation_rule() {
        assert_eq!(adapt_step_size(0.7, &[1.0, 1.0, 1.0]), 0.7);
        assert_eq!(adapt_step_size(1.0, &[2.0]), 0.5);
        let eta = adapt_step_size(1.0, &[4.0]);
        assert_eq!(eta, 0.25);
        assert_eq!(adapt_step_size(eta, &[4.0, 0.0]), 0.125);
        // zero reflections are clamped rather than dividing by zero
        assert_eq!(adapt_step_size(1.0, &[0.0]), 2.0);
    }

    #[test]
    fn rate_rule_fixed_point() {
        let mut a = Adapter { rule: AdaptRule::RateNormalized, ..Adapter::default() };
        a.record(0.2, &[1, 1, 1]);
        assert!((a.update(0.2) - 0.2).abs() < 1e-15);
        a.record(0.2, &[3, 3, 3]);
        // rate 2 reflections per step at η = 0.2
        assert!((a.update(0.2) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn uniform_proposals_are_always_accepted() {
        let p = generate(Family::Simplex, 3).unwrap().precompute_gram();
        let mut rng = ChainRng::new(1);
        let mut x = chebyshev_center(&p).unwrap().center;
        let params = StepParams { eta: 0.3, walk_length: 3, max_reflections: 300 };
        for _ in 0..2000 {
            let s = hmc_step(&x, &Uniform, &p, &params, &mut rng).unwrap();
            assert!(s.accepted);
            x = s.x;
            assert!(p.contains(&x, 1e-9).unwrap());
        }
    }

    #[test]
    fn seeded_steps_are_deterministic() {
        let p = generate(Family::Cube, 3).unwrap();
        let f = Gaussian::isotropic(vec![0.0; 3], 0.3).unwrap();
        let params = StepParams { eta: 0.4, walk_length: 2, max_reflections: 300 };
        let run = || {
            let mut rng = ChainRng::new(99);
            let mut x = vec![0.1, 0.2, -0.3];
            for _ in 0..50 {
                x = hmc_step(&x, &f, &p, &params, &mut rng).unwrap().x;
            }
            x
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn warm_start_paths() {
        let p = generate(Family::Cube, 2).unwrap();
        let mut rng = ChainRng::new(5);
        assert_eq!(warm_start(&Uniform, &p, &mut rng, 10).unwrap(), vec![0.0, 0.0]);
        let f = Gaussian::isotropic(vec![0.0, 0.0], 1.0).unwrap();
        for _ in 0..100 {
            let x = warm_start(&f, &p, &mut rng, 100).unwrap();
            assert!(p.contains(&x, 0.0).unwrap());
        }
        // mass of [-1, 1] under N(0, 1) is erf(1/√2) ≈ 0.6827; squared ≈ 0.466
        let rate = rejection_acceptance_rate(&p, &[0.0, 0.0], 1.0, 10_000, &mut rng);
        assert!(rate >= 0.15);
        assert!((rate - 0.466).abs() < 0.02, "{rate}");

        let x = warm_start_proxy(&p, &[0.2, 0.1], 2.0, &mut rng, 100).unwrap();
        assert!(p.contains(&x, 0.0).unwrap());
    }

    #[test]
    fn empty_chain_and_warnings() {
        let p = generate(Family::Cube, 2).unwrap();
        let cfg = ReHmcConfig { n_samples: 0, burn_in: 10, ..ReHmcConfig::default() };
        let c = sample(&Uniform, &p, &cfg).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.proposed, 0);
        assert!(sample(&Uniform, &p, &ReHmcConfig { walk_length: 0, ..cfg.clone() }).is_err());
        assert!(sample(&Uniform, &p, &ReHmcConfig { eta0: StepSize::Fixed(-1.0), ..cfg }).is_err());

        let f = Gaussian::isotropic(vec![0.0, 0.0], 1e-4).unwrap();
        let cfg = ReHmcConfig {
            eta0: StepSize::Fixed(5.0),
            adapt: false,
            burn_in: 0,
            n_samples: 200,
            ..ReHmcConfig::default()
        };
        let c = sample(&f, &p, &cfg).unwrap();
        assert!(!c.warnings.is_empty());
    }

    #[test]
    fn uniform_cube_mean() {
        let p = generate(Family::Cube, 2).unwrap();
        let cfg = ReHmcConfig { n_samples: 100_000, burn_in: 1000, seed: 3, ..ReHmcConfig::default() };
        let c = sample(&Uniform, &p, &cfg).unwrap();
        let ess = crate::diagnostics::ess(&c.coordinate(0)).unwrap();
        for j in 0..2 {
            let xs = c.coordinate(j);
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            // CLT band with the effective rather than nominal sample size
            assert!(mean.abs() < 3.0 * (1.0 / 3.0 / ess).sqrt(), "axis {j}: {mean}");
        }
        assert!(c.iter().all(|x| p.contains(x, 1e-9).unwrap()));
        assert_eq!(c.accepted, c.proposed);
    }
}
