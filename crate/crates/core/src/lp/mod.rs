//! Linear programming on H-polytopes.
//!
//! The solver is a dense two-phase primal simplex with Bland's anti-cycling
//! rule, run on the standard-form dual of `max c·z s.t. A z <= b`. The dual
//! has one row per primal variable, so the tableau stays `(d+1) x (M+d+1)`
//! even when the polytope has thousands of facets, and the primal optimum is
//! read back from the simplex multipliers.

pub mod chebyshev;
pub mod equality;
pub mod frank_wolfe;

pub use chebyshev::{chebyshev_center, ChebyshevBall};
pub use equality::{from_equality_form, EqualityModel, EqualityPolytope};
pub use frank_wolfe::{minimize_from, minimize_on_polytope, FrankWolfeOptions, FrankWolfeResult};

use crate::linalg::Matrix;

const PIVOT_EPS: f64 = 1e-9;
const REDUCED_COST_EPS: f64 = 1e-10;

/// Outcome of `min cost·y s.t. E y = h, y >= 0`.
#[derive(Clone, Debug)]
pub(crate) enum StandardOutcome {
    Optimal {
        y: Vec<f64>,
        multipliers: Vec<f64>,
    },
    Infeasible,
    Unbounded,
    IterationLimit,
}

struct Tableau {
    rows: usize,
    width: usize,
    data: Vec<f64>,
    reduced: Vec<f64>,
    basis: Vec<usize>,
    structural: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, k: usize, j: usize) -> f64 {
        self.data[k * self.width + j]
    }

    #[inline]
    fn rhs(&self, k: usize) -> f64 {
        self.data[k * self.width + self.width - 1]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let p = self.data[row * w + col];
        for v in &mut self.data[row * w..(row + 1) * w] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.data[row * w..(row + 1) * w].to_vec();
        for k in 0..self.rows {
            if k == row {
                continue;
            }
            let factor = self.data[k * w + col];
            if factor != 0.0 {
                for (v, pr) in self.data[k * w..(k + 1) * w].iter_mut().zip(&pivot_row) {
                    *v -= factor * pr;
                }
            }
        }
        let factor = self.reduced[col];
        if factor != 0.0 {
            for (v, pr) in self.reduced.iter_mut().zip(&pivot_row) {
                *v -= factor * pr;
            }
        }
        self.basis[row] = col;
    }

    fn load_costs(&mut self, cost: &[f64]) {
        // reduced[j] = cost_j - sum_k cost_{B_k} T[k][j]; the last slot carries -objective
        self.reduced.clear();
        self.reduced.extend_from_slice(cost);
        self.reduced.push(0.0);
        for k in 0..self.rows {
            let cb = cost[self.basis[k]];
            if cb != 0.0 {
                for j in 0..self.width {
                    self.reduced[j] -= cb * self.at(k, j);
                }
            }
        }
    }

    /// Bland's rule iterations over structural columns. Returns false when
    /// the problem is unbounded.
    fn run(&mut self, max_iters: usize) -> Option<bool> {
        for _ in 0..max_iters {
            let Some(enter) = (0..self.structural).find(|&j| self.reduced[j] < -REDUCED_COST_EPS) else {
                return Some(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for k in 0..self.rows {
                let a = self.at(k, enter);
                if a > PIVOT_EPS {
                    let ratio = self.rhs(k) / a;
                    leave = match leave {
                        None => Some((k, ratio)),
                        Some((lk, lr)) => {
                            if ratio < lr - 1e-12 || (ratio <= lr + 1e-12 && self.basis[k] < self.basis[lk]) {
                                Some((k, ratio))
                            } else {
                                Some((lk, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Some(false),
                Some((row, _)) => self.pivot(row, enter),
            }
        }
        None
    }
}

pub(crate) fn solve_standard_form(e: &Matrix, h: &[f64], cost: &[f64]) -> StandardOutcome {
    let n = e.rows();
    let m = e.cols();
    debug_assert_eq!(h.len(), n);
    debug_assert_eq!(cost.len(), m);
    let width = m + n + 1;
    let mut data = vec![0.0; n * width];
    let mut sign = vec![1.0; n];
    for k in 0..n {
        let s = if h[k] < 0.0 { -1.0 } else { 1.0 };
        sign[k] = s;
        let row = &mut data[k * width..(k + 1) * width];
        for (dst, src) in row[..m].iter_mut().zip(e.row(k)) {
            *dst = s * src;
        }
        row[m + k] = 1.0;
        row[width - 1] = s * h[k];
    }
    let mut t = Tableau {
        rows: n,
        width,
        data,
        reduced: Vec::with_capacity(width),
        basis: (m..m + n).collect(),
        structural: m,
    };
    let max_iters = 50 * (n + m) + 1000;

    let mut phase1 = vec![0.0; m + n];
    for c in &mut phase1[m..] {
        *c = 1.0;
    }
    t.load_costs(&phase1);
    if t.run(max_iters).is_none() {
        return StandardOutcome::IterationLimit;
    }
    let infeasibility: f64 = (0..n).filter(|&k| t.basis[k] >= m).map(|k| t.rhs(k)).sum();
    let scale = 1.0 + h.iter().map(|v| v.abs()).sum::<f64>();
    if infeasibility > 1e-9 * scale {
        return StandardOutcome::Infeasible;
    }
    for k in 0..n {
        if t.basis[k] >= m {
            if let Some(j) = (0..m).find(|&j| t.at(k, j).abs() > PIVOT_EPS) {
                t.pivot(k, j);
            }
        }
    }

    let mut phase2 = cost.to_vec();
    phase2.extend(std::iter::repeat_n(0.0, n));
    t.load_costs(&phase2);
    match t.run(max_iters) {
        None => return StandardOutcome::IterationLimit,
        Some(false) => return StandardOutcome::Unbounded,
        Some(true) => {}
    }

    let mut y = vec![0.0; m];
    for k in 0..n {
        if t.basis[k] < m {
            y[t.basis[k]] = t.rhs(k).max(0.0);
        }
    }
    let multipliers = (0..n).map(|k| -t.reduced[m + k] * sign[k]).collect();
    StandardOutcome::Optimal { y, multipliers }
}

/// Result of a primal LP in inequality form.
#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal(LpSolution),
    /// No feasible point.
    Infeasible,
    /// Objective unbounded above (or the problem is infeasible; callers in
    /// this crate only pass feasible problems).
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    /// Optimal vertex `z`.
    pub point: Vec<f64>,
    pub value: f64,
    /// Nonnegative multipliers of the `A z <= b` rows; `A^T y = c`.
    pub duals: Vec<f64>,
}

/// Solves `max c·z s.t. A z <= b` with `z` free.
pub fn maximize(a: &Matrix, b: &[f64], c: &[f64]) -> LpOutcome {
    debug_assert_eq!(a.rows(), b.len());
    debug_assert_eq!(a.cols(), c.len());
    let at = a.transpose();
    match solve_standard_form(&at, c, b) {
        StandardOutcome::Optimal { y, multipliers, .. } => {
            let value = crate::linalg::dot(c, &multipliers);
            LpOutcome::Optimal(LpSolution {
                point: multipliers,
                value,
                duals: y,
            })
        }
        StandardOutcome::Infeasible => LpOutcome::Unbounded,
        StandardOutcome::Unbounded => LpOutcome::Infeasible,
        StandardOutcome::IterationLimit => LpOutcome::IterationLimit,
    }
}

/// True when the rows of `a` positively span the whole space, i.e. every
/// nonempty `{x | A x <= b}` is bounded.
pub(crate) fn rows_positively_span(a: &Matrix) -> bool {
    let d = a.cols();
    let qr = crate::linalg::householder_qr(&a.transpose(), true);
    if qr.rank(1e-10) < d {
        return false;
    }
    // exists y >= 1 with A^T y = 0  <=>  A^T y' = -A^T 1, y' >= 0
    let at = a.transpose();
    let ones = vec![1.0; a.rows()];
    let h: Vec<f64> = at.mul_vec(&ones).into_iter().map(|v| -v).collect();
    let cost = vec![0.0; a.rows()];
    matches!(solve_standard_form(&at, &h, &cost), StandardOutcome::Optimal { .. })
}
