//! Billiard trajectories inside a polytope.
//!
//! The tracer caches `A·x` and `A·v`. Computing them costs `2·M·d`
//! multiply-adds once per trajectory; afterwards, with the Gram matrix
//! present, advancing and reflecting only touch the `M` cached products:
//!
//! ```text
//! A·x' = A·x + t·A·v
//! A·v' = A·v - 2 (a_j·v) G[j, :]
//! ```
//!
//! so every reflection after the first costs `O(M)` oracle work. The naive
//! bookkeeping recomputes both products after every reflection.

use super::{first_exit, HPolytope};
use crate::linalg::axpy;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bookkeeping {
    /// Incremental `O(M)` updates through the facet Gram matrix.
    Gram,
    /// Recompute `A·x` and `A·v` after every reflection.
    Naive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Travel {
    Completed { reflections: usize },
    /// The path needed more reflections than allowed.
    TooManyReflections,
}

#[derive(Clone, Debug)]
pub struct Billiard<'p> {
    poly: &'p HPolytope,
    x: Vec<f64>,
    v: Vec<f64>,
    ax: Vec<f64>,
    av: Vec<f64>,
    mode: Bookkeeping,
    stale: bool,
    last_facet: Option<usize>,
    reflections: usize,
    oracle_ops: u64,
}

impl<'p> Billiard<'p> {
    /// Uses Gram bookkeeping when the polytope carries a Gram matrix.
    pub fn new(poly: &'p HPolytope, x: Vec<f64>, v: Vec<f64>) -> Self {
        let mode = if poly.gram().is_some() {
            Bookkeeping::Gram
        } else {
            Bookkeeping::Naive
        };
        Self::with_bookkeeping(poly, x, v, mode)
    }

    /// Falls back to naive bookkeeping when no Gram matrix is available.
    pub fn with_bookkeeping(poly: &'p HPolytope, x: Vec<f64>, v: Vec<f64>, mode: Bookkeeping) -> Self {
        let mode = if poly.gram().is_none() { Bookkeeping::Naive } else { mode };
        let m = poly.num_facets();
        let mut tracer = Self {
            poly,
            x,
            v,
            ax: vec![0.0; m],
            av: vec![0.0; m],
            mode,
            stale: true,
            last_facet: None,
            reflections: 0,
            oracle_ops: 0,
        };
        tracer.refresh();
        tracer
    }

    fn refresh(&mut self) {
        let a = self.poly.normals();
        a.mul_vec_into(&self.x, &mut self.ax);
        a.mul_vec_into(&self.v, &mut self.av);
        self.oracle_ops += 2 * (a.rows() * a.cols()) as u64;
        self.stale = false;
    }

    /// Time until the next facet hit and that facet.
    pub fn next_hit(&mut self) -> Option<(f64, usize)> {
        if self.stale {
            self.refresh();
        }
        self.oracle_ops += self.poly.num_facets() as u64;
        first_exit(&self.ax, &self.av, self.poly.offsets(), self.last_facet)
    }

    /// Moves along the current velocity for time `t`.
    pub fn advance(&mut self, t: f64) {
        axpy(t, &self.v, &mut self.x);
        if self.mode == Bookkeeping::Gram {
            for (ax, av) in self.ax.iter_mut().zip(&self.av) {
                *ax += t * av;
            }
            self.oracle_ops += self.poly.num_facets() as u64;
        } else {
            self.stale = true;
        }
    }

    /// Mirrors the velocity across facet `j`: `v <- v - 2 (a_j·v) a_j`.
    pub fn reflect(&mut self, j: usize) {
        if self.stale {
            self.refresh();
        }
        let along = self.av[j];
        axpy(-2.0 * along, self.poly.normal(j), &mut self.v);
        match (self.mode, self.poly.gram()) {
            (Bookkeeping::Gram, Some(g)) => {
                axpy(-2.0 * along, g.row(j), &mut self.av);
                self.oracle_ops += self.poly.num_facets() as u64;
            }
            _ => self.stale = true,
        }
        self.last_facet = Some(j);
        self.reflections += 1;
    }

    /// Follows the billiard path for `duration` time units.
    pub fn travel(&mut self, duration: f64, max_reflections: usize) -> Travel {
        let start = self.reflections;
        let mut remaining = duration;
        loop {
            match self.next_hit() {
                Some((t, facet)) if t < remaining => {
                    self.advance(t);
                    remaining -= t;
                    if self.reflections - start >= max_reflections {
                        return Travel::TooManyReflections;
                    }
                    self.reflect(facet);
                }
                _ => {
                    self.advance(remaining);
                    return Travel::Completed {
                        reflections: self.reflections - start,
                    };
                }
            }
        }
    }

    pub fn position(&self) -> &[f64] {
        &self.x
    }

    pub fn velocity(&self) -> &[f64] {
        &self.v
    }

    pub fn reflections(&self) -> usize {
        self.reflections
    }

    pub fn bookkeeping(&self) -> Bookkeeping {
        self.mode
    }

    /// Multiply-adds spent on facet products so far.
    pub fn oracle_ops(&self) -> u64 {
        self.oracle_ops
    }

    pub fn into_state(self) -> (Vec<f64>, Vec<f64>) {
        (self.x, self.v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dot, norm};
    use crate::polytope::{generate, random_rotation, Family};

    #[test]
    fn one_dimensional_mirror() {
        let p = generate(Family::Cube, 1).unwrap().precompute_gram();
        let mut b = Billiard::new(&p, vec![0.9], vec![1.0]);
        assert_eq!(b.travel(0.3, 10), Travel::Completed { reflections: 1 });
        assert!((b.position()[0] - 0.8).abs() < 1e-15);
        assert_eq!(b.velocity(), &[-1.0]);
    }

    #[test]
    fn reflection_budget_is_enforced() {
        let p = generate(Family::Cube, 1).unwrap();
        let mut b = Billiard::new(&p, vec![0.0], vec![1.0]);
        assert_eq!(b.travel(10.0, 3), Travel::TooManyReflections);
        let mut b = Billiard::new(&p, vec![0.0], vec![1.0]);
        assert_eq!(b.travel(10.0, 5), Travel::Completed { reflections: 5 });
    }

    #[test]
    fn gram_and_naive_chains_agree() {
        let p = random_rotation(&generate(Family::Simplex, 6).unwrap(), 3).precompute_gram();
        let x0 = crate::lp::chebyshev_center(&p).unwrap().center;
        let v0: Vec<f64> = (0..6).map(|k| ((k * 7 + 3) % 5) as f64 - 2.0).collect();
        let mut fast = Billiard::with_bookkeeping(&p, x0.clone(), v0.clone(), Bookkeeping::Gram);
        let mut slow = Billiard::with_bookkeeping(&p, x0, v0, Bookkeeping::Naive);
        for _ in 0..200 {
            let hf = fast.next_hit().unwrap();
            let hs = slow.next_hit().unwrap();
            assert_eq!(hf.1, hs.1);
            assert!((hf.0 - hs.0).abs() < 1e-10);
            fast.advance(hf.0);
            slow.advance(hs.0);
            fast.reflect(hf.1);
            slow.reflect(hs.1);
        }
        for k in 0..6 {
            assert!((fast.position()[k] - slow.position()[k]).abs() < 1e-10);
            assert!((fast.velocity()[k] - slow.velocity()[k]).abs() < 1e-10);
        }
        assert!(p.contains(fast.position(), 1e-9).unwrap());
        let speed = norm(fast.velocity());
        assert!((speed - norm(slow.velocity())).abs() < 1e-12);
        // the cached products still match a fresh evaluation
        let fresh = p.normals().mul_vec(fast.position());
        for (c, f) in fast.ax.iter().zip(&fresh) {
            assert!((c - f).abs() < 1e-10);
        }
        assert!(dot(&fast.av, &fast.av) > 0.0);
    }
}
