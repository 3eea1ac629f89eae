use serde::{Deserialize, Serialize};

use super::{maximize, LpOutcome};
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::polytope::HPolytope;

/// Largest ball inscribed in a polytope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevBall {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Solves `max r s.t. a_i·x + r <= b_i`.
///
/// When the optimal center is not unique (e.g. a box that is longer in one
/// direction) a second LP moves it into the middle of the optimal face by
/// maximizing the common slack of the facets that are not forced tight.
pub fn chebyshev_center(p: &HPolytope) -> Result<ChebyshevBall> {
    chebyshev_raw(p.normals(), p.offsets())
}

pub(crate) fn chebyshev_raw(a: &Matrix, b: &[f64]) -> Result<ChebyshevBall> {
    let (m, d) = (a.rows(), a.cols());
    let mut lifted = Matrix::zeros(m, d + 1);
    for i in 0..m {
        let row = lifted.row_mut(i);
        row[..d].copy_from_slice(a.row(i));
        row[d] = 1.0;
    }
    let mut objective = vec![0.0; d + 1];
    objective[d] = 1.0;

    let sol = match maximize(&lifted, b, &objective) {
        LpOutcome::Optimal(sol) => sol,
        LpOutcome::Unbounded => return Err(Error::Unbounded),
        LpOutcome::Infeasible => return Err(Error::Infeasible("Chebyshev LP has no feasible point".into())),
        LpOutcome::IterationLimit => return Err(Error::Geometry("Chebyshev LP did not terminate".into())),
    };
    let radius = sol.point[d];
    if !(radius > 1e-12) {
        return Err(Error::EmptyInterior(radius));
    }
    let mut center = sol.point[..d].to_vec();

    // Facets with a positive multiplier are tight at every optimum.
    let forced: Vec<bool> = sol.duals.iter().map(|&y| y > 1e-12).collect();
    if forced.iter().any(|f| !f) {
        for i in 0..m {
            lifted[(i, d)] = if forced[i] { 0.0 } else { 1.0 };
        }
        let relaxed: Vec<f64> = b.iter().map(|bi| bi - radius + 1e-11).collect();
        if let LpOutcome::Optimal(second) = maximize(&lifted, &relaxed, &objective) {
            let candidate = &second.point[..d];
            let ok = (0..m).all(|i| dot(a.row(i), candidate) + radius <= b[i] + 1e-9);
            if second.point[d] > 1e-9 && ok {
                center = candidate.to_vec();
            }
        }
    }

    Ok(ChebyshevBall { center, radius })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::generate::{self, Family};

    /// Brute-force oracle: maximize min_i (b_i - a_i·x) on a grid.
    fn grid_depth(p: &HPolytope, lo: [f64; 2], hi: [f64; 2], steps: usize) -> ([f64; 2], f64) {
        let mut best = ([0.0, 0.0], f64::NEG_INFINITY);
        for i in 0..=steps {
            for j in 0..=steps {
                let x = [
                    lo[0] + (hi[0] - lo[0]) * i as f64 / steps as f64,
                    lo[1] + (hi[1] - lo[1]) * j as f64 / steps as f64,
                ];
                let depth = (0..p.num_facets())
                    .map(|k| p.offset(k) - dot(p.normal(k), &x))
                    .fold(f64::INFINITY, f64::min);
                if depth > best.1 {
                    best = (x, depth);
                }
            }
        }
        best
    }

    #[test]
    fn cube_center_is_origin() {
        for d in [1, 2, 5, 10] {
            let ball = chebyshev_center(&generate::generate(Family::Cube, d).unwrap()).unwrap();
            assert!((ball.radius - 1.0).abs() < 1e-12);
            assert!(ball.center.iter().all(|c| c.abs() < 1e-12));
        }
    }

    #[test]
    fn skinny_cube_is_centered() {
        let ball = chebyshev_center(&generate::generate(Family::SkinnyCube, 2).unwrap()).unwrap();
        assert!((ball.radius - 1.0).abs() < 1e-12);
        assert!(ball.center[0].abs() < 1e-9, "{:?}", ball.center);
        assert!(ball.center[1].abs() < 1e-9, "{:?}", ball.center);
    }

    #[test]
    fn simplex_matches_grid_oracle() {
        let p = generate::generate(Family::Simplex, 2).unwrap();
        let (x, depth) = grid_depth(&p, [0.0, 0.0], [1.0, 1.0], 2000);
        // frozen from the grid oracle and from c = 1/(2+sqrt2)
        let c = 1.0 / (2.0 + 2f64.sqrt());
        assert!((depth - c).abs() < 1e-3);
        assert!((x[0] - c).abs() < 2e-3 && (x[1] - c).abs() < 2e-3);

        let ball = chebyshev_center(&p).unwrap();
        assert!((ball.radius - c).abs() < 1e-12);
        assert!((ball.center[0] - c).abs() < 1e-12);
        assert!((ball.center[1] - c).abs() < 1e-12);
    }

    #[test]
    fn ball_is_inscribed_and_maximal() {
        for (family, d) in [(Family::Simplex, 5), (Family::Cross, 4), (Family::Birkhoff, 4), (Family::ProductSimplex, 3)] {
            let p = generate::generate(family, d).unwrap();
            let ball = chebyshev_center(&p).unwrap();
            let slack: Vec<f64> = (0..p.num_facets())
                .map(|i| p.offset(i) - dot(p.normal(i), &ball.center) - ball.radius)
                .collect();
            assert!(slack.iter().all(|&s| s >= -1e-8), "{family:?}");
            // enlarging by 1e-6 must violate something
            assert!(slack.iter().any(|&s| s < 1e-6), "{family:?}");
        }
    }

    #[test]
    fn unique_centers_have_a_full_active_set() {
        for (family, d) in [(Family::Simplex, 2), (Family::Simplex, 6), (Family::Cube, 3), (Family::Cross, 3)] {
            let p = generate::generate(family, d).unwrap();
            let ball = chebyshev_center(&p).unwrap();
            let tight = (0..p.num_facets())
                .filter(|&i| (p.offset(i) - dot(p.normal(i), &ball.center) - ball.radius).abs() < 1e-7)
                .count();
            assert!(tight >= p.dim() + 1, "{family:?} d={d}: {tight}");
        }
    }

    #[test]
    fn empty_interior_is_rejected() {
        // x <= 0 and -x <= 0 in 1D: a single point
        let a = Matrix::from_rows(&[vec![1.0], vec![-1.0]]).unwrap();
        assert!(matches!(chebyshev_raw(&a, &[0.0, 0.0]), Err(Error::EmptyInterior(_))));
        let a = Matrix::from_rows(&[vec![1.0], vec![-1.0]]).unwrap();
        assert!(chebyshev_raw(&a, &[-1.0, -1.0]).is_err());
    }
}
