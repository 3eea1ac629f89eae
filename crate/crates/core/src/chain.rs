//! Output of a sampler run.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub dim: usize,
    /// Row-major `n x dim` draws.
    pub samples: Vec<f64>,
    /// Metropolis acceptances during the sampling phase.
    pub accepted: usize,
    pub proposed: usize,
    /// Reflections of every leapfrog step in the sampling phase; empty for
    /// samplers without reflections.
    pub reflection_counts: Vec<u32>,
    /// Step size after each burn-in update; empty without adaptation.
    pub eta_trace: Vec<f64>,
    /// Step size used for the sampling phase.
    pub final_eta: Option<f64>,
    /// Wall time of the sampling phase only.
    pub elapsed_us: f64,
    pub warnings: Vec<String>,
}

impl Chain {
    pub fn new(dim: usize) -> Self {
        Self { dim, ..Self::default() }
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.samples.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn push(&mut self, x: &[f64]) {
        debug_assert_eq!(x.len(), self.dim);
        self.samples.extend_from_slice(x);
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.samples[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.chunks_exact(self.dim.max(1))
    }

    /// Trace of coordinate `j`.
    pub fn coordinate(&self, j: usize) -> Vec<f64> {
        self.iter().map(|x| x[j]).collect()
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            return 1.0;
        }
        self.accepted as f64 / self.proposed as f64
    }

    pub fn mean_reflections(&self) -> Option<f64> {
        if self.reflection_counts.is_empty() {
            return None;
        }
        let total: u64 = self.reflection_counts.iter().map(|&k| k as u64).sum();
        Some(total as f64 / self.reflection_counts.len() as f64)
    }
}
