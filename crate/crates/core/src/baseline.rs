//! Hit-and-Run and Coordinate Hit-and-Run.
//!
//! Each step picks a direction, computes the chord of the body through the
//! current point along it and draws the next point from the target
//! restricted to that chord. The one-dimensional draw is exact, so there is
//! no rejection.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::density::{LineRestriction, LogDensity};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::polytope::HPolytope;
use crate::rehmc::warm_start;
use crate::rng::ChainRng;
use crate::univariate::{gridded_draw, truncated_exponential, truncated_standard_normal};

/// Chords shorter than this are treated as a single point.
pub const MIN_CHORD: f64 = 1e-12;

/// `{x + t·u : t_minus <= t <= t_plus}`, the intersection of a line with the body.
#[derive(Clone, Debug, PartialEq)]
pub struct Chord {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub t_minus: f64,
    pub t_plus: f64,
}

impl Chord {
    pub fn point(&self, t: f64) -> Vec<f64> {
        self.x.iter().zip(&self.u).map(|(xi, ui)| xi + t * ui).collect()
    }

    pub fn length(&self) -> f64 {
        self.t_plus - self.t_minus
    }
}

pub fn chord(p: &HPolytope, x: &[f64], u: &[f64]) -> Result<Chord> {
    let t_plus = p.ray_intersect(x, u, None)?.t;
    let back: Vec<f64> = u.iter().map(|c| -c).collect();
    let t_minus = -p.ray_intersect(x, &back, None)?.t;
    Ok(Chord { x: x.to_vec(), u: u.to_vec(), t_minus, t_plus })
}

/// Chord end points from the cached products `A·x` and `A·u`.
fn chord_bounds(ax: &[f64], au: &[f64], b: &[f64]) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..b.len() {
        let slack = (b[i] - ax[i]).max(0.0);
        if au[i] > 0.0 {
            hi = hi.min(slack / au[i]);
        } else if au[i] < 0.0 {
            lo = lo.max(slack / au[i]);
        }
    }
    (lo, hi)
}

/// Draws `t` with density `∝ exp(-f(x + t·u))` on the chord.
pub fn sample_1d_restriction(f: &dyn LogDensity, c: &Chord, rng: &mut ChainRng) -> f64 {
    draw_on_line(f, &c.x, &c.u, c.t_minus, c.t_plus, rng)
}

fn draw_on_line(f: &dyn LogDensity, x: &[f64], u: &[f64], lo: f64, hi: f64, rng: &mut ChainRng) -> f64 {
    if !(hi - lo >= MIN_CHORD) {
        return 0.0;
    }
    match f.line_restriction(x, u) {
        LineRestriction::Flat => lo + rng.uniform() * (hi - lo),
        LineRestriction::Quadratic { curvature, slope } if curvature > 0.0 => {
            let sd = curvature.sqrt().recip();
            let mu = -slope / curvature;
            match truncated_standard_normal((lo - mu) / sd, (hi - mu) / sd, rng) {
                Some(z) => (mu + sd * z).clamp(lo, hi),
                None => gridded_draw(|t| slope * t + 0.5 * curvature * t * t, lo, hi, rng),
            }
        }
        LineRestriction::Quadratic { slope, .. } => truncated_exponential(slope, lo, hi, rng),
        LineRestriction::General => {
            let mut buf = vec![0.0; x.len()];
            let f0 = f.value(x);
            gridded_draw(
                |t| {
                    for ((bi, xi), ui) in buf.iter_mut().zip(x).zip(u) {
                        *bi = xi + t * ui;
                    }
                    f.value(&buf) - f0
                },
                lo,
                hi,
                rng,
            )
        }
    }
}

/// Uniform direction on the unit sphere.
fn sphere_direction(d: usize, rng: &mut ChainRng) -> Vec<f64> {
    loop {
        let mut u = rng.normal_vec(d);
        let n = norm(&u);
        if n > 1e-300 {
            u.iter_mut().for_each(|c| *c /= n);
            return u;
        }
    }
}

fn coordinate_direction(d: usize, rng: &mut ChainRng) -> Vec<f64> {
    let k = rng.index(2 * d);
    let mut u = vec![0.0; d];
    u[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
    u
}

fn chord_step(x: &[f64], u: Vec<f64>, f: &dyn LogDensity, p: &HPolytope, rng: &mut ChainRng) -> Result<Vec<f64>> {
    let c = chord(p, x, &u)?;
    let t = sample_1d_restriction(f, &c, rng);
    Ok(c.point(t))
}

/// Hit-and-Run step along a uniform random direction.
pub fn har_step(x: &[f64], f: &dyn LogDensity, p: &HPolytope, rng: &mut ChainRng) -> Result<Vec<f64>> {
    let u = sphere_direction(p.dim(), rng);
    chord_step(x, u, f, p, rng)
}

/// Hit-and-Run step along a random signed coordinate axis.
pub fn char_step(x: &[f64], f: &dyn LogDensity, p: &HPolytope, rng: &mut ChainRng) -> Result<Vec<f64>> {
    let u = coordinate_direction(p.dim(), rng);
    chord_step(x, u, f, p, rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChordKind {
    /// Uniform directions.
    Har,
    /// Coordinate directions.
    Char,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaselineConfig {
    pub kind: ChordKind,
    /// Chord steps per emitted draw.
    pub walk_length: usize,
    pub burn_in: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub stream: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self { kind: ChordKind::Har, walk_length: 1, burn_in: 1000, n_samples: 1000, seed: 0, stream: 0 }
    }
}

/// Chord walker with cached `A·x`, refreshed once per emitted draw.
struct Walker<'a> {
    p: &'a HPolytope,
    f: &'a dyn LogDensity,
    kind: ChordKind,
    x: Vec<f64>,
    ax: Vec<f64>,
    au: Vec<f64>,
}

impl<'a> Walker<'a> {
    fn new(p: &'a HPolytope, f: &'a dyn LogDensity, kind: ChordKind, x: Vec<f64>) -> Self {
        let ax = p.normals().mul_vec(&x);
        let au = vec![0.0; p.num_facets()];
        Self { p, f, kind, x, ax, au }
    }

    fn refresh(&mut self) {
        self.p.normals().mul_vec_into(&self.x, &mut self.ax);
    }

    fn step(&mut self, rng: &mut ChainRng) {
        let d = self.p.dim();
        let a = self.p.normals();
        let u = match self.kind {
            ChordKind::Har => {
                let u = sphere_direction(d, rng);
                a.mul_vec_into(&u, &mut self.au);
                u
            }
            ChordKind::Char => {
                let u = coordinate_direction(d, rng);
                let k = u.iter().position(|&c| c != 0.0).expect("one nonzero entry");
                for (i, aui) in self.au.iter_mut().enumerate() {
                    *aui = u[k] * a[(i, k)];
                }
                u
            }
        };
        let (lo, hi) = chord_bounds(&self.ax, &self.au, self.p.offsets());
        let t = draw_on_line(self.f, &self.x, &u, lo, hi, rng);
        if t != 0.0 {
            for (xi, ui) in self.x.iter_mut().zip(&u) {
                *xi += t * ui;
            }
            for (axi, aui) in self.ax.iter_mut().zip(&self.au) {
                *axi += t * aui;
            }
        }
    }
}

/// Warm start, `burn_in` discarded draws, then `n_samples` draws of
/// `walk_length` chord steps each.
pub fn sample_baseline(f: &dyn LogDensity, p: &HPolytope, cfg: &BaselineConfig) -> Result<Chain> {
    if cfg.walk_length == 0 {
        return Err(Error::InvalidArgument("walk length must be at least 1".into()));
    }
    let d = p.dim();
    let mut rng = ChainRng::with_stream(cfg.seed, cfg.stream);
    let x0 = warm_start(f, p, &mut rng, 1000)?;
    let mut walker = Walker::new(p, f, cfg.kind, x0);
    let mut chain = Chain::new(d);

    for _ in 0..cfg.burn_in {
        for _ in 0..cfg.walk_length {
            walker.step(&mut rng);
        }
        walker.refresh();
    }

    chain.samples.reserve(cfg.n_samples * d);
    let started = Instant::now();
    for _ in 0..cfg.n_samples {
        for _ in 0..cfg.walk_length {
            walker.step(&mut rng);
        }
        walker.refresh();
        chain.push(&walker.x);
    }
    chain.elapsed_us = started.elapsed().as_secs_f64() * 1e6;
    chain.proposed = cfg.n_samples;
    chain.accepted = cfg.n_samples;
    Ok(chain)
}

/// Chord residual `max_i |a_i·x - b_i|` over the tight facets at both ends.
pub fn chord_end_residual(p: &HPolytope, c: &Chord) -> f64 {
    [c.t_minus, c.t_plus]
        .iter()
        .map(|&t| {
            let y = c.point(t);
            p.normals()
                .iter_rows()
                .zip(p.offsets())
                .map(|(row, b)| (b - dot(row, &y)).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}
