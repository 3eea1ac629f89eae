//! Full-dimensional reparameterization of `{A_eq x = b_eq, l <= x <= u}`.
//!
//! With `W` an orthonormal basis of `ker A_eq` and `x_s` the least-norm
//! solution, `x = x_s + W y` and the box becomes
//! `[W; -W] y <= [u - x_s; x_s - l]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{householder_qr, Matrix};
use crate::polytope::HPolytope;

/// Relative pivot tolerance of the rank decision.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualityModel {
    #[serde(rename = "A_eq")]
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
    pub l: Vec<f64>,
    pub u: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct EqualityPolytope {
    /// Body in `y` coordinates.
    pub polytope: HPolytope,
    /// `n x k` orthonormal nullspace basis.
    pub w: Matrix,
    pub x_s: Vec<f64>,
}

impl EqualityPolytope {
    /// `x = x_s + W y`.
    pub fn to_original(&self, y: &[f64]) -> Vec<f64> {
        let mut x = self.x_s.clone();
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += crate::linalg::dot(self.w.row(i), y);
        }
        x
    }
}

impl EqualityModel {
    fn validate(&self) -> Result<usize> {
        let n = self.l.len();
        if self.u.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.u.len() });
        }
        if self.a_eq.len() != self.b_eq.len() {
            return Err(Error::DimensionMismatch { expected: self.a_eq.len(), got: self.b_eq.len() });
        }
        if let Some(row) = self.a_eq.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: row.len() });
        }
        if let Some(i) = (0..n).find(|&i| !(self.l[i] <= self.u[i])) {
            return Err(Error::Infeasible(format!("bound {i}: l > u")));
        }
        Ok(n)
    }

    /// Largest residual `|A_eq x - b_eq|`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.a_eq
            .iter()
            .zip(&self.b_eq)
            .map(|(row, b)| (crate::linalg::dot(row, x) - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn from_equality_form(model: &EqualityModel) -> Result<EqualityPolytope> {
    let n = model.validate()?;
    let k = model.a_eq.len();

    let (w, x_s) = if k == 0 {
        (Matrix::identity(n), vec![0.0; n])
    } else {
        let a = Matrix::from_rows(&model.a_eq)?;
        // A_eq^T P = Q R, so A_eq[perm] = R^T Q^T
        let qr = householder_qr(&a.transpose(), true);
        let rank = qr.rank(RANK_TOL);
        if rank >= n {
            return Err(Error::Infeasible(format!(
                "the equality system fixes all {n} coordinates: zero-dimensional body"
            )));
        }
        // forward substitution on the leading rank x rank block of R^T
        let mut z = vec![0.0; rank];
        for i in 0..rank {
            let mut s = model.b_eq[qr.perm[i]];
            for j in 0..i {
                s -= qr.r[(j, i)] * z[j];
            }
            z[i] = s / qr.r[(i, i)];
        }
        let mut x_s = vec![0.0; n];
        for (i, xi) in x_s.iter_mut().enumerate() {
            *xi = (0..rank).map(|j| qr.q[(i, j)] * z[j]).sum();
        }
        let scale = 1.0 + model.b_eq.iter().fold(0.0f64, |m, b| m.max(b.abs()));
        if model.residual(&x_s) > 1e-8 * scale {
            return Err(Error::Infeasible("A_eq x = b_eq has no solution".into()));
        }
        let cols: Vec<usize> = (rank..n).collect();
        let mut w = qr.q.select_columns(&cols);
        fix_column_signs(&mut w);
        (w, x_s)
    };

    let dim = w.cols();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(2 * n);
    let mut rhs = Vec::with_capacity(2 * n);
    for sign in [1.0, -1.0] {
        for i in 0..n {
            let bound = if sign > 0.0 { model.u[i] - x_s[i] } else { x_s[i] - model.l[i] };
            if !bound.is_finite() {
                continue;
            }
            let row: Vec<f64> = w.row(i).iter().map(|v| sign * v).collect();
            if crate::linalg::norm(&row) <= RANK_TOL {
                if bound < -1e-9 {
                    return Err(Error::Infeasible(format!("coordinate {i} is fixed outside its bounds")));
                }
                continue;
            }
            rows.push(row);
            rhs.push(bound);
        }
    }
    let a = Matrix::from_vec(rows.len(), dim, rows.concat())?;
    let polytope = HPolytope::new(a, rhs).map_err(|e| match e {
        Error::EmptyInterior(_) | Error::Infeasible(_) => {
            Error::Infeasible(format!("no point satisfies the bounds ({e})"))
        }
        other => other,
    })?;
    Ok(EqualityPolytope { polytope, w, x_s })
}

/// Flips each column so that its first largest-magnitude entry is positive.
fn fix_column_signs(w: &mut Matrix) {
    for j in 0..w.cols() {
        let mut best = 0.0f64;
        let mut sign = 1.0;
        for i in 0..w.rows() {
            let v = w[(i, j)];
            if v.abs() > best + 1e-12 {
                best = v.abs();
                sign = v.signum();
            }
        }
        if sign < 0.0 {
            for i in 0..w.rows() {
                w[(i, j)] = -w[(i, j)];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::ChainRng;

    fn toy() -> EqualityModel {
        EqualityModel {
            a_eq: vec![vec![1.0, 1.0]],
            b_eq: vec![1.0],
            l: vec![0.0, 0.0],
            u: vec![1.0, 1.0],
        }
    }

    #[test]
    fn toy_model_by_hand() {
        let e = from_equality_form(&toy()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!((e.w.rows(), e.w.cols()), (2, 1));
        assert!((e.w[(0, 0)] - h).abs() < 1e-12);
        assert!((e.w[(1, 0)] + h).abs() < 1e-12);
        assert!((e.x_s[0] - 0.5).abs() < 1e-12 && (e.x_s[1] - 0.5).abs() < 1e-12);
        let p = &e.polytope;
        assert_eq!(p.dim(), 1);
        let hi = p.ray_intersect(&[0.0], &[1.0], None).unwrap().t;
        let lo = p.ray_intersect(&[0.0], &[-1.0], None).unwrap().t;
        assert!((hi - h).abs() < 1e-12 && (lo - h).abs() < 1e-12);
        // endpoints map to the box corners
        let a = e.to_original(&[h]);
        assert!((a[0] - 1.0).abs() < 1e-12 && a[1].abs() < 1e-12);
    }

    #[test]
    fn nullspace_points_solve_the_system() {
        let model = EqualityModel {
            a_eq: vec![vec![1.0, 2.0, 0.0, -1.0, 0.5], vec![0.0, 1.0, 1.0, 1.0, 0.0], vec![1.0, 3.0, 1.0, 0.0, 0.5]],
            b_eq: vec![0.5, 1.0, 1.5],
            l: vec![-5.0; 5],
            u: vec![5.0; 5],
        };
        let e = from_equality_form(&model).unwrap();
        // third row is the sum of the first two
        assert_eq!(e.w.cols(), 3);
        let mut rng = ChainRng::new(2);
        for _ in 0..100 {
            let y: Vec<f64> = (0..3).map(|_| 10.0 * rng.normal()).collect();
            assert!(model.residual(&e.to_original(&y)) <= 1e-9);
        }
    }

    #[test]
    fn member_points_respect_the_box() {
        let e = from_equality_form(&toy()).unwrap();
        let mut rng = ChainRng::new(4);
        for _ in 0..100 {
            let y = [(2.0 * rng.uniform() - 1.0) * std::f64::consts::FRAC_1_SQRT_2];
            assert!(e.polytope.contains(&y, 0.0).unwrap());
            let x = e.to_original(&y);
            assert!(x.iter().all(|&v| (-1e-8..=1.0 + 1e-8).contains(&v)));
            assert!(toy().residual(&x) <= 1e-8);
        }
    }

    #[test]
    fn degenerate_and_infeasible_models() {
        let identity = EqualityModel {
            a_eq: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            b_eq: vec![0.2, 0.3],
            l: vec![0.0, 0.0],
            u: vec![1.0, 1.0],
        };
        assert!(from_equality_form(&identity).is_err());

        let outside = EqualityModel { b_eq: vec![3.0], ..toy() };
        assert!(matches!(from_equality_form(&outside), Err(Error::Infeasible(_))));

        let inconsistent = EqualityModel {
            a_eq: vec![vec![1.0, 1.0, 0.0], vec![1.0, 1.0, 0.0]],
            b_eq: vec![1.0, 2.0],
            l: vec![0.0; 3],
            u: vec![1.0; 3],
        };
        assert!(matches!(from_equality_form(&inconsistent), Err(Error::Infeasible(_))));
    }
}
