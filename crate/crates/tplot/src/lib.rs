//! Traffic load distribution plots (T-Plots) for capacitated networks under
//! oblivious routing.
//!
//! The crate models a directed capacitated network with per-node rate limits,
//! evaluates edge/global congestion of an oblivious routing against traffic
//! matrices drawn from formally defined T-Sets, builds the resulting load
//! distributions (by sampling or exact enumeration), fits and tests Gaussian
//! models, derives distribution-free performance guarantees, and computes
//! robust capacity allocations.

pub mod assignment;
pub mod bounds;
pub mod capalloc;
pub mod complexity;
pub mod error;
pub mod fixtures;
pub mod gauss;
pub mod io;
pub mod matrix;
pub mod net;
pub mod stats;
pub mod tset;

pub use error::{Error, Result};
pub use matrix::TrafficMatrix;
pub use net::{Network, Routing};
pub use stats::{GaussianParams, TPlot};
pub use tset::{SamplerConfig, TSetKind, TSetSpec};
