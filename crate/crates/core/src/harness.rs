//! Walk-length sweeps and best-configuration selection.
//!
//! Every `(sampler, w)` pair runs as an independent chain. The selected row
//! of a sampler minimizes `t_is` among mixed rows (`psrf_max <= 1.2`), ties
//! going to the smaller `w`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{sample_baseline, BaselineConfig, ChordKind};
use crate::chain::Chain;
use crate::density::LogDensity;
use crate::diagnostics::{report, PSRF_MIXED};
use crate::error::{Error, Result};
use crate::polytope::HPolytope;
use crate::rehmc::{self, AdaptRule, ReHmcConfig, StepSize};

/// Environment variable capping sweep concurrency.
pub const THREADS_ENV: &str = "POLYWALK_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerId {
    Rehmc,
    Har,
    Char,
}

impl SamplerId {
    pub fn name(self) -> &'static str {
        match self {
            SamplerId::Rehmc => "rehmc",
            SamplerId::Har => "har",
            SamplerId::Char => "char",
        }
    }
}

impl fmt::Display for SamplerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplerId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rehmc" => Ok(SamplerId::Rehmc),
            "har" => Ok(SamplerId::Har),
            "char" => Ok(SamplerId::Char),
            other => Err(Error::Parse(format!("unknown sampler `{other}` (expected rehmc, har or char)"))),
        }
    }
}

/// Inclusive arithmetic grid `start, start + step, ... <= end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sweep {
    pub start: usize,
    pub step: usize,
    pub end: usize,
}

impl Sweep {
    /// `w` from 1 to `d` in increments of `max(1, ⌊d/10⌋)`.
    pub fn for_dim(d: usize) -> Self {
        Self { start: 1, step: (d / 10).max(1), end: d.max(1) }
    }

    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.end).step_by(self.step.max(1)).collect()
    }

    fn validate(&self, d: usize) -> Result<()> {
        if self.start < 1 || self.end < self.start || self.end > d.max(1) || self.step == 0 {
            return Err(Error::InvalidArgument(format!(
                "walk-length sweep {}..={} step {} must lie within [1, {d}]",
                self.start, self.end, self.step
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkSpec {
    pub samplers: Vec<SamplerId>,
    pub sweep: Sweep,
    pub n_samples: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub eta0: StepSize,
    pub max_reflections: Option<usize>,
    pub adapt: bool,
    pub adapt_rule: AdaptRule,
}

impl BenchmarkSpec {
    pub fn new(samplers: Vec<SamplerId>, d: usize, n_samples: usize, burn_in: usize, seed: u64) -> Self {
        Self {
            samplers,
            sweep: Sweep::for_dim(d),
            n_samples,
            burn_in,
            seed,
            eta0: StepSize::Auto,
            max_reflections: None,
            adapt: true,
            adapt_rule: AdaptRule::default(),
        }
    }
}

/// One `(sampler, w)` configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub sampler: SamplerId,
    pub w: usize,
    pub ess_min: f64,
    /// `None` when the chain is too degenerate for the statistic.
    pub psrf_max: Option<f64>,
    pub t_is_us: Option<f64>,
    /// ReHMC only.
    pub avg_reflections: Option<f64>,
    pub final_eta: Option<f64>,
    pub acceptance_rate: f64,
    pub elapsed_us: f64,
    pub mixed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestRow {
    pub sampler: SamplerId,
    /// `"mixed"`, or `"unmixed"` when no configuration reached the threshold.
    pub status: String,
    pub row: Option<BenchmarkRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaTrace {
    pub w: usize,
    pub eta0: f64,
    pub trace: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub rows: Vec<BenchmarkRow>,
    pub best: Vec<BestRow>,
    /// ReHMC burn-in step-size sequences, one per `w`.
    pub eta_traces: Vec<EtaTrace>,
}

fn run_chain(sampler: SamplerId, w: usize, f: &dyn LogDensity, p: &HPolytope, spec: &BenchmarkSpec) -> Result<Chain> {
    match sampler {
        SamplerId::Rehmc => {
            let cfg = ReHmcConfig {
                eta0: spec.eta0,
                walk_length: w,
                max_reflections: spec.max_reflections,
                burn_in: spec.burn_in,
                n_samples: spec.n_samples,
                seed: spec.seed,
                stream: 0,
                adapt: spec.adapt,
                adapt_rule: spec.adapt_rule,
            };
            rehmc::sample(f, p, &cfg)
        }
        SamplerId::Har | SamplerId::Char => {
            let kind = if sampler == SamplerId::Har { ChordKind::Har } else { ChordKind::Char };
            let cfg = BaselineConfig {
                kind,
                walk_length: w,
                burn_in: spec.burn_in,
                n_samples: spec.n_samples,
                seed: spec.seed,
                stream: 0,
            };
            sample_baseline(f, p, &cfg)
        }
    }
}

/// Row for a finished chain; degenerate chains are unmixed.
pub fn summarize(sampler: SamplerId, w: usize, chain: &Chain) -> Result<BenchmarkRow> {
    let (ess_min, psrf_max, t_is_us) = match report(chain) {
        Ok(r) => (r.ess_min, Some(r.psrf_max), Some(r.t_is_us)),
        Err(Error::Undefined(_)) => (0.0, None, None),
        Err(e) => return Err(e),
    };
    Ok(BenchmarkRow {
        sampler,
        w,
        ess_min,
        psrf_max,
        t_is_us,
        avg_reflections: if sampler == SamplerId::Rehmc { chain.mean_reflections() } else { None },
        final_eta: chain.final_eta,
        acceptance_rate: chain.acceptance_rate(),
        elapsed_us: chain.elapsed_us,
        mixed: psrf_max.is_some_and(|r| r <= PSRF_MIXED),
    })
}

/// Argmin `t_is` over the mixed rows of `sampler`; ties go to the smaller `w`.
pub fn select_best(rows: &[BenchmarkRow], sampler: SamplerId) -> Option<&BenchmarkRow> {
    rows.iter()
        .filter(|r| r.sampler == sampler && r.mixed && r.t_is_us.is_some())
        .min_by(|a, b| {
            a.t_is_us
                .partial_cmp(&b.t_is_us)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.w.cmp(&b.w))
        })
}

/// Thread cap from `POLYWALK_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

pub fn run_benchmark(f: &dyn LogDensity, p: &HPolytope, spec: &BenchmarkSpec) -> Result<BenchmarkResult> {
    if spec.samplers.is_empty() {
        return Err(Error::InvalidArgument("the sampler set is empty".into()));
    }
    if spec.n_samples == 0 {
        return Err(Error::InvalidArgument("a benchmark needs n_samples > 0".into()));
    }
    spec.sweep.validate(p.dim())?;
    let p = rehmc::with_gram(p);
    let p = p.as_ref();

    let mut samplers: Vec<SamplerId> = Vec::new();
    for &s in &spec.samplers {
        if !samplers.contains(&s) {
            samplers.push(s);
        }
    }
    let jobs: Vec<(SamplerId, usize)> = samplers
        .iter()
        .flat_map(|&s| spec.sweep.values().into_iter().map(move |w| (s, w)))
        .collect();

    let work = || -> Result<Vec<(BenchmarkRow, Option<EtaTrace>)>> {
        jobs.par_iter()
            .map(|&(sampler, w)| {
                let chain = run_chain(sampler, w, f, p, spec)?;
                let trace = (sampler == SamplerId::Rehmc && spec.adapt).then(|| EtaTrace {
                    w,
                    eta0: rehmc::initial_step_size(spec.eta0, p).unwrap_or(f64::NAN),
                    trace: chain.eta_trace.clone(),
                });
                Ok((summarize(sampler, w, &chain)?, trace))
            })
            .collect()
    };
    let done = match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };

    let mut rows = Vec::with_capacity(done.len());
    let mut eta_traces = Vec::new();
    for (row, trace) in done {
        rows.push(row);
        eta_traces.extend(trace);
    }
    let best = samplers
        .iter()
        .map(|&s| match select_best(&rows, s) {
            Some(r) => BestRow { sampler: s, status: "mixed".into(), row: Some(r.clone()) },
            None => BestRow { sampler: s, status: "unmixed".into(), row: None },
        })
        .collect();
    Ok(BenchmarkResult { rows, best, eta_traces })
}
