//! Exact simulation of a three-level-atom/two-field quantum model and
//! analysis of the resulting mean-photon-number series as epsilon-recurrence
//! networks.
//!
//! The crate is organized along the processing chain:
//!
//! * [`quantum`] — block-diagonal exact evolution producing `<N1>(tau)`;
//! * [`embedding`] — rescaling, uniform-deviate transform, delay estimation
//!   (mutual information), embedding-dimension estimation (false nearest
//!   neighbours) and delay embedding;
//! * [`recnet`] — epsilon-recurrence network construction, connectivity and
//!   the critical epsilon search with spectral certification;
//! * [`metrics`] — path-length, density, clustering, transitivity, degree and
//!   assortativity measures;
//! * [`pipeline`] — cached, deterministic end-to-end runs and their on-disk
//!   artifacts.
//!
//! Frequently used types are re-exported at the crate root.

pub mod embedding;
mod error;
mod linalg;
pub mod metrics;
pub mod pipeline;
pub mod quantum;
pub mod recnet;

pub use error::{Error, Result};
pub use metrics::MetricsReport;
pub use quantum::{FockTruncation, InitialState, MeanPhotonSeries, ModelParams, TimeGrid};
pub use recnet::RecurrenceNetwork;
