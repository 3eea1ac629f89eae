//! Standard benchmark bodies and random rotations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HPolytope;
use crate::error::{Error, Result};
use crate::linalg::{householder_qr, Matrix};
use crate::rng::ChainRng;

/// Largest dimension accepted for the cross polytope (`2^d` facets).
pub const MAX_CROSS_DIM: usize = 20;
/// Half-width of the long side of the skinny cube.
pub const SKINNY_HALF_WIDTH: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `[-1, 1]^d`
    Cube,
    /// `{x >= 0, sum x <= 1}`
    Simplex,
    /// `{|x|_1 <= 1}`
    Cross,
    /// Doubly stochastic `n x n` matrices in the `(n-1)^2` free entries.
    Birkhoff,
    /// `simplex(d) x simplex(d)`
    ProductSimplex,
    /// `[-100, 100] x [-1, 1]^(d-1)`
    SkinnyCube,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Cube,
        Family::Simplex,
        Family::Cross,
        Family::Birkhoff,
        Family::ProductSimplex,
        Family::SkinnyCube,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Cube => "cube",
            Family::Simplex => "simplex",
            Family::Cross => "cross",
            Family::Birkhoff => "birkhoff",
            Family::ProductSimplex => "product_simplex",
            Family::SkinnyCube => "skinny_cube",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .ok_or_else(|| Error::Parse(format!("unknown polytope family `{s}`")))
    }
}

struct Rows {
    d: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Rows {
    fn new(d: usize) -> Self {
        Self {
            d,
            a: Vec::new(),
            b: Vec::new(),
        }
    }

    /// Pushes `row·x <= rhs`, scaled to a unit normal.
    fn push(&mut self, mut row: Vec<f64>, rhs: f64) {
        let n = crate::linalg::norm(&row);
        for v in &mut row {
            *v /= n;
        }
        self.a.extend(row);
        self.b.push(rhs / n);
    }

    fn finish(self) -> HPolytope {
        let m = self.b.len();
        let a = Matrix::from_vec(m, self.d, self.a).expect("row lengths match");
        HPolytope::from_unit_rows(a, self.b)
    }
}

fn unit(d: usize, k: usize, value: f64) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[k] = value;
    e
}

/// Builds a standard polytope. `size` is the dimension `d`, except for the
/// Birkhoff family where it is the matrix order `n` (dimension `(n-1)^2`).
pub fn generate(family: Family, size: usize) -> Result<HPolytope> {
    let min = if family == Family::Birkhoff { 2 } else { 1 };
    if size < min {
        return Err(Error::InvalidArgument(format!("{family} needs size >= {min}, got {size}")));
    }
    let d = size;
    let poly = match family {
        Family::Cube | Family::SkinnyCube => {
            let mut rows = Rows::new(d);
            for k in 0..d {
                let half = if family == Family::SkinnyCube && k == 0 {
                    SKINNY_HALF_WIDTH
                } else {
                    1.0
                };
                rows.push(unit(d, k, 1.0), half);
                rows.push(unit(d, k, -1.0), half);
            }
            rows.finish()
        }
        Family::Simplex => {
            let mut rows = Rows::new(d);
            push_simplex(&mut rows, 0, d);
            rows.finish()
        }
        Family::ProductSimplex => {
            let mut rows = Rows::new(2 * d);
            push_simplex(&mut rows, 0, d);
            push_simplex(&mut rows, d, d);
            rows.finish()
        }
        Family::Cross => {
            if d > MAX_CROSS_DIM {
                return Err(Error::InvalidArgument(format!(
                    "cross polytope with d = {d} would need 2^{d} facets (limit d <= {MAX_CROSS_DIM})"
                )));
            }
            let mut rows = Rows::new(d);
            for mask in 0u64..(1u64 << d) {
                let row = (0..d).map(|k| if mask >> k & 1 == 1 { -1.0 } else { 1.0 }).collect();
                rows.push(row, 1.0);
            }
            rows.finish()
        }
        Family::Birkhoff => birkhoff(size),
    };
    Ok(poly)
}

fn push_simplex(rows: &mut Rows, offset: usize, d: usize) {
    let total = rows.d;
    for k in 0..d {
        rows.push(unit(total, offset + k, -1.0), 0.0);
    }
    let mut sum = vec![0.0; total];
    for v in &mut sum[offset..offset + d] {
        *v = 1.0;
    }
    rows.push(sum, 1.0);
}

/// Free coordinates `x_ij`, `i, j < n-1`; the last row and column are implied
/// by unit row and column sums, and every one of the `n^2` entries must be
/// nonnegative.
fn birkhoff(n: usize) -> HPolytope {
    let k = n - 1;
    let d = k * k;
    let idx = |i: usize, j: usize| i * k + j;
    let mut rows = Rows::new(d);
    for i in 0..n {
        for j in 0..n {
            let mut row = vec![0.0; d];
            let rhs;
            match (i < k, j < k) {
                (true, true) => {
                    row[idx(i, j)] = -1.0;
                    rhs = 0.0;
                }
                // x_{i,n} = 1 - sum_j x_ij >= 0
                (true, false) => {
                    for jj in 0..k {
                        row[idx(i, jj)] = 1.0;
                    }
                    rhs = 1.0;
                }
                // x_{n,j} = 1 - sum_i x_ij >= 0
                (false, true) => {
                    for ii in 0..k {
                        row[idx(ii, j)] = 1.0;
                    }
                    rhs = 1.0;
                }
                // x_{n,n} = sum_ij x_ij - (n - 2) >= 0
                (false, false) => {
                    for v in &mut row {
                        *v = -1.0;
                    }
                    rhs = -(n as f64 - 2.0);
                }
            }
            rows.push(row, rhs);
        }
    }
    rows.finish()
}

/// Haar-distributed orthogonal matrix from the QR factorization of a seeded
/// Gaussian matrix, with column signs fixed by `diag(R) > 0`.
pub fn haar_orthogonal(d: usize, seed: u64) -> Matrix {
    let mut rng = ChainRng::new(seed);
    let g = Matrix::from_vec(d, d, rng.normal_vec(d * d)).expect("square");
    let qr = householder_qr(&g, false);
    let mut q = qr.q;
    for j in 0..d {
        if qr.r[(j, j)] < 0.0 {
            for i in 0..d {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// The body `Q·K`: facet normals become `Q·a_i`, offsets are unchanged.
pub fn rotate(p: &HPolytope, q: &Matrix) -> Result<HPolytope> {
    let d = p.dim();
    if q.rows() != d || q.cols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: q.rows() });
    }
    // rows a_i Q^T
    let a = p.normals().mul(&q.transpose())?;
    let mut rotated = HPolytope::from_unit_rows_tolerant(a, p.offsets().to_vec());
    if p.gram().is_some() {
        rotated = rotated.precompute_gram();
    }
    Ok(rotated)
}

pub fn random_rotation(p: &HPolytope, seed: u64) -> HPolytope {
    rotate(p, &haar_orthogonal(p.dim(), seed)).expect("square rotation of matching size")
}

impl HPolytope {
    /// Renormalizes rows that are unit up to rounding.
    fn from_unit_rows_tolerant(mut a: Matrix, b: Vec<f64>) -> HPolytope {
        let mut b = b;
        for i in 0..a.rows() {
            let n = crate::linalg::norm(a.row(i));
            for v in a.row_mut(i) {
                *v /= n;
            }
            b[i] /= n;
        }
        HPolytope::from_unit_rows(a, b)
    }
}
