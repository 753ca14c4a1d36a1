//! Locating the connectivity threshold: the smallest radius on a uniform
//! grid whose recurrence network is connected.

use serde::{Deserialize, Serialize};

use crate::embedding::StateVectorSet;
use crate::error::{Error, Result};

use super::build::{build_network, connected_at};
use super::spectral::laplacian_l2_detailed;

/// Result of the critical-radius search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSearchResult {
    /// Smallest grid multiple of the resolution with a connected network.
    pub epsilon_c: f64,
    /// Algebraic connectivity of the network at `epsilon_c` (certifies
    /// connectivity spectrally: strictly positive).
    pub l2_at_c: f64,
    /// Whether the spectral certification converged within its iteration cap.
    pub l2_converged: bool,
    /// Every connectivity probe performed, in probe order.
    pub probes: Vec<(f64, bool)>,
}

/// Default search grid spacing for the critical radius.
pub const DEFAULT_EPSILON_RESOLUTION: f64 = 0.005;

/// Finds the smallest `k * resolution` (k >= 1) whose recurrence network on
/// `vs` is connected, by bisection over k.
///
/// Connectivity is monotone in the radius (edge sets only grow), so bisection
/// is sound. The upper end of the bracket starts at the attractor diameter,
/// where the network is complete. The returned radius is certified two ways:
/// a direct connectivity probe, and the algebraic connectivity of the built
/// network; bisection itself establishes that one grid step below is
/// disconnected whenever k > 1.
pub fn critical_epsilon(vs: &StateVectorSet, resolution: f64) -> Result<EpsilonSearchResult> {
    if !resolution.is_finite() || resolution <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "radius grid resolution must be positive, got {resolution}"
        )));
    }
    if vs.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "critical-radius search needs at least two state vectors, got {}",
            vs.len()
        )));
    }

    // Diameter bound from per-axis extents: connecting everything never
    // needs more than the diagonal of the bounding box.
    let dim = vs.dim();
    let mut spread_sq = 0.0;
    for a in 0..dim {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for x in vs.rows() {
            lo = lo.min(x[a]);
            hi = hi.max(x[a]);
        }
        spread_sq += (hi - lo) * (hi - lo);
    }
    let diameter = spread_sq.sqrt();
    let mut hi_k = ((diameter / resolution).ceil() as u64).max(1) + 1;

    let mut probes = Vec::new();
    let mut probe = |k: u64| -> Result<bool> {
        let eps = k as f64 * resolution;
        let ok = connected_at(vs, eps)?;
        probes.push((eps, ok));
        Ok(ok)
    };

    // The bounding-box bound makes the top of the bracket connected up to
    // floating-point slack; widen defensively if a probe disagrees.
    while !probe(hi_k)? {
        hi_k = hi_k
            .checked_mul(2)
            .ok_or_else(|| Error::InvalidParameter("radius bracket overflow".into()))?;
    }
    let mut lo_k = 0u64; // radius 0 treated as disconnected; grid starts at 1
    while hi_k - lo_k > 1 {
        let mid = lo_k + (hi_k - lo_k) / 2;
        if probe(mid)? {
            hi_k = mid;
        } else {
            lo_k = mid;
        }
    }

    let epsilon_c = hi_k as f64 * resolution;
    let network = build_network(vs, epsilon_c)?;
    let spectral = laplacian_l2_detailed(&network);
    Ok(EpsilonSearchResult {
        epsilon_c,
        l2_at_c: spectral.value,
        l2_converged: spectral.converged,
        probes,
    })
}
