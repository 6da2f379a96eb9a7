//! Simulation and statistical checks for heavy-tailed on-off traffic and its
//! scaling limits: fractional Brownian motion, totally skewed stable Levy
//! motion and fractional Poisson motion.
//!
//! * [`heavytail`]: Pareto duration laws, equilibrium laws, stable variates.
//! * [`onoff`]: one stationary source, its workload and renewal count.
//! * [`aggregate`]: superposition of sources and regime normalisations.
//! * [`limits`]: the limit processes and their constants.
//! * [`stats`]: estimators and two-sample statistics.
//! * [`stream`]: deterministic per-replication random streams.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aggregate;
pub mod error;
pub mod heavytail;
pub mod limits;
pub mod onoff;
pub mod path;
pub mod stats;
pub mod stream;

pub use aggregate::{Regime, RegimeSpec, Superposed};
pub use error::{Error, Result};
pub use heavytail::{SourceParams, StableSkewed, TailLaw};
pub use limits::{BridgeMode, FbmSampler, FpmConfig, FpmPrecision, PoissonPoint};
pub use onoff::{Cycle, Decomposition, OnOffPath, Segment, State};
pub use path::{Grid, PathKind, SamplePath, Scaling};
pub use stats::{HurstEstimate, MCEstimate};
pub use stream::{derive_stream, replicate, Stream};
