//! Sampling truncated log-concave densities on H-polytopes.
//!
//! The main sampler is reflective Hamiltonian Monte Carlo: leapfrog
//! integration whose position update follows a billiard path inside the
//! body, followed by a Metropolis filter. Hit-and-Run and Coordinate
//! Hit-and-Run are provided for comparison, together with ESS/PSRF
//! diagnostics and a walk-length sweep harness.

pub mod baseline;
pub mod chain;
pub mod density;
pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod polytope;
pub mod rehmc;
pub mod rng;
pub mod univariate;

pub use baseline::{sample_baseline, BaselineConfig, ChordKind};
pub use chain::Chain;
pub use density::{DensitySpec, Exponential, Gaussian, LogDensity, Uniform};
pub use error::{Error, Result};
pub use harness::{run_benchmark, BenchmarkResult, BenchmarkRow, BenchmarkSpec, SamplerId, Sweep};
pub use linalg::Matrix;
pub use lp::{chebyshev_center, from_equality_form, ChebyshevBall, EqualityModel, EqualityPolytope};
pub use diagnostics::{report, DiagnosticsReport};
pub use polytope::{generate, random_rotation, Family, HPolytope};
pub use rehmc::{sample, AdaptRule, ReHmcConfig, StepSize};
