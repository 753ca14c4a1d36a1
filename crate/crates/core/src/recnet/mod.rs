//! Epsilon-recurrence networks over embedded state vectors.
//!
//! Two state vectors are linked when their Euclidean distance is at most the
//! recurrence threshold (closed ball), with self-loops excluded. The module
//! provides the network type with edge-list (de)serialization, a cell-index
//! builder verified against all-pairs search, connectivity tests (BFS, a
//! streaming union-find probe, and the sign of the algebraic connectivity),
//! and the bisection search for the smallest connecting threshold.

mod build;
mod epsilon;
mod network;
mod spectral;

pub use build::{build_network, connected_at};
pub use epsilon::{critical_epsilon, EpsilonSearchResult, DEFAULT_EPSILON_RESOLUTION};
pub use network::{is_connected, RecurrenceNetwork};
pub use spectral::{laplacian_l2, laplacian_l2_detailed, AlgebraicConnectivity};
