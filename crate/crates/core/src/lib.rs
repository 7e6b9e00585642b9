//! Small-cell sleeping in two-layer macro/small-cell networks: geometry,
//! link layer, Monte-Carlo outage estimation, closed-form constraints,
//! sleeping-ratio optimization and traffic-driven evaluation.

pub mod analytic;
pub mod config;
pub mod error;
pub mod geometry;
pub mod io;
pub mod linklayer;
pub mod mcsim;
pub mod optimizer;
pub mod policy;
pub mod rng;
pub mod traffic;

pub use config::{LoadState, NetworkConfig, QosSpec};
pub use error::{Error, Result};
pub use linklayer::InterferenceFactor;
pub use policy::{BandAllocation, Scheme, SleepPolicy};
