//! H-polytopes `{x | A x <= b}` with unit-norm facet normals.

pub mod generate;
pub mod trace;

pub use generate::{generate, haar_orthogonal, random_rotation, rotate, Family};
pub use trace::{Billiard, Bookkeeping, Travel};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

/// Intersection parameters below this are treated as "already on the facet".
pub const T_EPS: f64 = 1e-10;
/// Two hits closer than this in `t` are a corner; the lower facet index wins.
pub const TIE_EPS: f64 = 1e-12;

/// Convex polytope in H-representation.
///
/// Invariants: every row of `A` has unit norm, the interior is nonempty and
/// the body is bounded. When present, `gram` holds `A·A^T`.
#[derive(Clone, Debug)]
pub struct HPolytope {
    a: Matrix,
    b: Vec<f64>,
    gram: Option<Matrix>,
}

/// Point where a ray leaves the polytope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayHit {
    pub t: f64,
    pub facet: usize,
    pub point: Vec<f64>,
}

impl HPolytope {
    /// Normalizes the rows and validates the body: at least `d+1` facets,
    /// no zero rows, bounded, and a positive Chebyshev radius.
    pub fn new(a: Matrix, b: Vec<f64>) -> Result<Self> {
        let (m, d) = (a.rows(), a.cols());
        if b.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: b.len() });
        }
        if d == 0 {
            return Err(Error::InvalidArgument("polytope dimension must be positive".into()));
        }
        if m < d + 1 {
            return Err(Error::TooFewFacets { dim: d, needed: d + 1, got: m });
        }
        let mut a = a;
        let mut b = b;
        for i in 0..m {
            let n = crate::linalg::norm(a.row(i));
            if !(n > 1e-14) || !n.is_finite() {
                return Err(Error::ZeroRow(i));
            }
            for v in a.row_mut(i) {
                *v /= n;
            }
            b[i] /= n;
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite offset".into()));
        }
        if !crate::lp::rows_positively_span(&a) {
            return Err(Error::Unbounded);
        }
        crate::lp::chebyshev::chebyshev_raw(&a, &b)?;
        Ok(Self { a, b, gram: None })
    }

    pub fn from_rows(rows: &[Vec<f64>], b: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?, b.to_vec())
    }

    /// Trusted constructor for bodies known to be valid with unit rows.
    pub(crate) fn from_unit_rows(a: Matrix, b: Vec<f64>) -> Self {
        debug_assert!(a.iter_rows().all(|r| (crate::linalg::norm(r) - 1.0).abs() < 1e-12));
        Self { a, b, gram: None }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    #[inline]
    pub fn num_facets(&self) -> usize {
        self.a.rows()
    }

    pub fn normals(&self) -> &Matrix {
        &self.a
    }

    pub fn offsets(&self) -> &[f64] {
        &self.b
    }

    #[inline]
    pub fn normal(&self, i: usize) -> &[f64] {
        self.a.row(i)
    }

    #[inline]
    pub fn offset(&self, i: usize) -> f64 {
        self.b[i]
    }

    pub fn gram(&self) -> Option<&Matrix> {
        self.gram.as_ref()
    }

    /// Populates the facet Gram matrix `a_i·a_j`, enabling `O(M)` updates
    /// for every reflection after the first one in a step.
    pub fn precompute_gram(mut self) -> Self {
        if self.gram.is_none() {
            let m = self.num_facets();
            let mut g = Matrix::zeros(m, m);
            for i in 0..m {
                for j in i..m {
                    let v = dot(self.a.row(i), self.a.row(j));
                    g[(i, j)] = v;
                    g[(j, i)] = v;
                }
            }
            self.gram = Some(g);
        }
        self
    }

    pub fn drop_gram(mut self) -> Self {
        self.gram = None;
        self
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }

    /// True iff `a_i·x <= b_i + slack` for every facet.
    pub fn contains(&self, x: &[f64], slack: f64) -> Result<bool> {
        self.check_dim(x)?;
        Ok(self.contains_unchecked(x, slack))
    }

    #[inline]
    pub(crate) fn contains_unchecked(&self, x: &[f64], slack: f64) -> bool {
        self.a.iter_rows().zip(&self.b).all(|(row, &bi)| dot(row, x) <= bi + slack)
    }

    /// Largest facet violation `max_i (a_i·x - b_i)`; negative inside.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.a
            .iter_rows()
            .zip(&self.b)
            .map(|(row, &bi)| dot(row, x) - bi)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// First facet hit by the ray `x + t·v`, `t >= 0`, skipping `exclude`.
    pub fn ray_intersect(&self, x: &[f64], v: &[f64], exclude: Option<usize>) -> Result<RayHit> {
        self.check_dim(x)?;
        self.check_dim(v)?;
        if v.iter().all(|&c| c == 0.0) {
            return Err(Error::InvalidArgument("ray direction is zero".into()));
        }
        if !self.contains_unchecked(x, 1e-9) {
            return Err(Error::InvalidArgument("ray origin lies outside the polytope".into()));
        }
        let ax = self.a.mul_vec(x);
        let av = self.a.mul_vec(v);
        let (t, facet) = first_exit(&ax, &av, &self.b, exclude)
            .ok_or_else(|| Error::Geometry("ray never leaves the polytope".into()))?;
        let point = x.iter().zip(v).map(|(xi, vi)| xi + t * vi).collect();
        Ok(RayHit { t, facet, point })
    }

    /// Moves `x` by `1e-10` inward along every facet it sits within `1e-12` of.
    pub(crate) fn nudge_inward(&self, x: &mut [f64]) {
        for (row, &bi) in self.a.iter_rows().zip(&self.b) {
            if bi - dot(row, x) < 1e-12 {
                crate::linalg::axpy(-1e-10, row, x);
            }
        }
    }
}

/// Smallest exit time from the cached products `a_i·x` and `a_i·v`.
pub(crate) fn first_exit(ax: &[f64], av: &[f64], b: &[f64], exclude: Option<usize>) -> Option<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for i in 0..b.len() {
        let rate = av[i];
        if rate <= 0.0 || Some(i) == exclude {
            continue;
        }
        let mut t = (b[i] - ax[i]) / rate;
        if t < T_EPS {
            t = 0.0;
        }
        match best {
            Some((bt, _)) if t >= bt - TIE_EPS => {}
            _ => best = Some((t, i)),
        }
    }
    best
}
