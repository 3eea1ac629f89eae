//! Conditional-gradient minimization of a convex `f` over a polytope.

use super::{maximize, LpOutcome};
use crate::density::LogDensity;
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::polytope::HPolytope;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrankWolfeOptions {
    /// Stop once the duality gap is at most `tol`.
    pub tol: f64,
    /// `None` means `min(10·d/tol, 10^6)`.
    pub max_iters: Option<usize>,
}

impl Default for FrankWolfeOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iters: None }
    }
}

impl FrankWolfeOptions {
    fn iteration_cap(&self, d: usize) -> usize {
        self.max_iters
            .unwrap_or_else(|| ((10.0 * d as f64 / self.tol).min(1e6)) as usize)
            .max(1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrankWolfeResult {
    pub point: Vec<f64>,
    pub value: f64,
    /// `max_s ∇f(x)·(x - s)` at the returned point.
    pub gap: f64,
    pub iterations: usize,
    /// False when the iteration cap was hit first.
    pub converged: bool,
}

/// Starts from the Chebyshev center.
pub fn minimize_on_polytope(f: &dyn LogDensity, p: &HPolytope, opts: FrankWolfeOptions) -> Result<FrankWolfeResult> {
    let start = super::chebyshev_center(p)?.center;
    minimize_from(f, p, start, opts)
}

/// Frank–Wolfe with the `2/(t+2)` step. A step that would increase `f` is
/// halved until it does not, so the objective is nonincreasing.
pub fn minimize_from(
    f: &dyn LogDensity,
    p: &HPolytope,
    start: Vec<f64>,
    opts: FrankWolfeOptions,
) -> Result<FrankWolfeResult> {
    let d = p.dim();
    if start.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: start.len() });
    }
    let cap = opts.iteration_cap(d);
    let mut x = start;
    let mut fx = f.value(&x);
    let mut grad = vec![0.0; d];
    let mut trial = vec![0.0; d];

    for t in 0..cap {
        f.gradient(&x, &mut grad);
        if grad.iter().all(|&g| g == 0.0) {
            return Ok(FrankWolfeResult { point: x, value: fx, gap: 0.0, iterations: t, converged: true });
        }
        let s = linear_minimizer(p, &grad)?;
        let gap = dot(&grad, &x) - dot(&grad, &s);
        if gap <= opts.tol {
            return Ok(FrankWolfeResult { point: x, value: fx, gap: gap.max(0.0), iterations: t, converged: true });
        }
        let mut gamma = 2.0 / (t as f64 + 2.0);
        let mut moved = false;
        for _ in 0..60 {
            for k in 0..d {
                trial[k] = x[k] + gamma * (s[k] - x[k]);
            }
            let ft = f.value(&trial);
            if ft <= fx {
                std::mem::swap(&mut x, &mut trial);
                fx = ft;
                moved = true;
                break;
            }
            gamma *= 0.5;
        }
        if !moved {
            // no descent at machine precision along the FW direction
            return Ok(FrankWolfeResult { point: x, value: fx, gap, iterations: t + 1, converged: false });
        }
    }

    f.gradient(&x, &mut grad);
    let s = linear_minimizer(p, &grad)?;
    let gap = (dot(&grad, &x) - dot(&grad, &s)).max(0.0);
    Ok(FrankWolfeResult { point: x, value: fx, gap, iterations: cap, converged: gap <= opts.tol })
}

/// Vertex minimizing `g·s` over the polytope.
fn linear_minimizer(p: &HPolytope, g: &[f64]) -> Result<Vec<f64>> {
    let c: Vec<f64> = g.iter().map(|v| -v).collect();
    match maximize(p.normals(), p.offsets(), &c) {
        LpOutcome::Optimal(sol) => Ok(sol.point),
        LpOutcome::Unbounded => Err(Error::Unbounded),
        LpOutcome::Infeasible => Err(Error::Infeasible("linear minimization oracle".into())),
        LpOutcome::IterationLimit => Err(Error::Geometry("linear minimization oracle did not terminate".into())),
    }
}
