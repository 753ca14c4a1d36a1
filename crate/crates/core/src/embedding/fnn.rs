//! Embedding-dimension estimation by false nearest neighbours.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::UniformDeviateSeries;
use crate::error::{Error, Result};

/// Distance-ratio threshold: a neighbour is false when the extra coordinate
/// alone is more than `R_TOL` times the d-dimensional separation.
const R_TOL: f64 = 10.0;
/// Loneliness threshold in units of the attractor size.
const A_TOL: f64 = 2.0;
/// Acceptable fraction of false neighbours.
const FNN_THRESHOLD: f64 = 0.01;

/// Embedding dimension chosen by the false-nearest-neighbour criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    /// Selected dimension.
    pub dim: usize,
    /// True when the false-neighbour fraction dropped below threshold at
    /// `dim`; false when it never did and `dim` is the scan ceiling.
    pub converged: bool,
    /// `fractions[d - 1]` is the false-neighbour fraction at dimension `d`.
    pub fractions: Vec<f64>,
}

/// Smallest dimension whose false-neighbour fraction is below 1%, scanning
/// `d = 1 ..= d_max`; returns `d_max` flagged unconverged when none qualifies.
///
/// For each point the exact nearest neighbour in `d` dimensions is found
/// (both endpoints restricted to indices that still have the `(d+1)`-th
/// coordinate), and the neighbour is declared false when the new-coordinate
/// distance ratio exceeds `R_TOL` or the extended separation exceeds `A_TOL`
/// attractor sizes.
///
/// Neighbour candidates within `t_d` samples of the query are excluded: on a
/// densely sampled flow the nearest point is otherwise the next sample along
/// the same trajectory strand, which can never look false and so drags the
/// estimate down regardless of the attractor's true dimension.
pub fn fnn_embedding_dimension(
    series: &UniformDeviateSeries,
    t_d: usize,
    d_max: usize,
) -> Result<DimensionEstimate> {
    fnn_embedding_dimension_with_window(series, t_d, d_max, t_d)
}

/// [`fnn_embedding_dimension`] with an explicit temporal exclusion window:
/// indices `j` with `|i - j| <= window` are not neighbour candidates for `i`.
/// `window = 0` excludes only the query itself.
pub fn fnn_embedding_dimension_with_window(
    series: &UniformDeviateSeries,
    t_d: usize,
    d_max: usize,
    window: usize,
) -> Result<DimensionEstimate> {
    if t_d == 0 {
        return Err(Error::InvalidParameter("delay must be positive".into()));
    }
    if d_max == 0 {
        return Err(Error::InvalidParameter(
            "dimension ceiling must be positive".into(),
        ));
    }
    let u = series.values();
    let n = u.len();
    // The scan must be feasible all the way to the ceiling, whether or not
    // it converges early: a caller whose data cannot support `d_max` asked
    // for a scan that cannot be honoured. Every point also needs at least one
    // admissible neighbour outside the exclusion window.
    if d_max * t_d + 2 > n || n - d_max * t_d <= window + 1 {
        return Err(Error::InvalidParameter(format!(
            "dimension scan needs d_max*t_d + window + 2 <= N, \
             got d_max={d_max}, t_d={t_d}, window={window}, N={n}"
        )));
    }
    // Attractor size: standard deviation of the series.
    let mean = u.iter().sum::<f64>() / n as f64;
    let sigma = (u.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / n as f64).sqrt();
    if sigma == 0.0 {
        return Err(Error::InvalidParameter(
            "series has zero variance".into(),
        ));
    }

    let mut fractions = Vec::with_capacity(d_max);
    for d in 1..=d_max {
        let span = d * t_d;
        let count = n - span;
        // Row-major d-dimensional delay vectors over the restricted range.
        let mut pts = Vec::with_capacity(count * d);
        for i in 0..count {
            for k in 0..d {
                pts.push(u[i + k * t_d]);
            }
        }
        let tree = KdTree::build(&pts, d);
        // Queries are independent and the tally is an integer, so the count
        // is identical for any worker count.
        let false_count: usize = (0..count)
            .into_par_iter()
            .map(|i| {
                let (j, r_sq) = tree.nearest_excluding(&pts, d, i, window);
                let delta = (u[i + span] - u[j + span]).abs();
                let is_false = if r_sq == 0.0 {
                    delta > 0.0
                } else {
                    let r = r_sq.sqrt();
                    delta / r > R_TOL || (r_sq + delta * delta).sqrt() > A_TOL * sigma
                };
                usize::from(is_false)
            })
            .sum();
        let fraction = false_count as f64 / count as f64;
        fractions.push(fraction);
        if fraction < FNN_THRESHOLD {
            return Ok(DimensionEstimate {
                dim: d,
                converged: true,
                fractions,
            });
        }
    }
    Ok(DimensionEstimate {
        dim: d_max,
        converged: false,
        fractions,
    })
}

/// Exact nearest-neighbour index structure over row-major points: a balanced
/// kd-tree with cycling split axes, stored as index ranges over a permuted
/// index array.
struct KdTree {
    /// Point indices, permuted so that tree nodes own contiguous ranges.
    order: Vec<u32>,
    dim: usize,
}

impl KdTree {
    fn build(pts: &[f64], dim: usize) -> Self {
        let count = pts.len() / dim;
        let order: Vec<u32> = (0..count as u32).collect();
        let mut tree = Self { order, dim };
        tree.split(pts, 0, count, 0);
        tree
    }

    /// Recursively median-partitions `order[lo..hi]` on the cycling axis.
    fn split(&mut self, pts: &[f64], lo: usize, hi: usize, axis: usize) {
        if hi - lo <= 1 {
            return;
        }
        let mid = (lo + hi) / 2;
        let dim = self.dim;
        self.order[lo..hi].select_nth_unstable_by(mid - lo, |&a, &b| {
            pts[a as usize * dim + axis].total_cmp(&pts[b as usize * dim + axis])
        });
        let next = (axis + 1) % dim;
        self.split(pts, lo, mid, next);
        self.split(pts, mid + 1, hi, next);
    }

    /// Exact nearest neighbour of point `query`, excluding every index within
    /// `window` of it, as `(index, squared distance)`; ties resolve to the
    /// smallest index.
    fn nearest_excluding(
        &self,
        pts: &[f64],
        dim: usize,
        query: usize,
        window: usize,
    ) -> (usize, f64) {
        let q = &pts[query * dim..(query + 1) * dim];
        let mut best = (usize::MAX, f64::INFINITY);
        self.search(pts, q, query, window, 0, self.order.len(), 0, &mut best);
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        pts: &[f64],
        q: &[f64],
        exclude: usize,
        window: usize,
        lo: usize,
        hi: usize,
        axis: usize,
        best: &mut (usize, f64),
    ) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        let idx = self.order[mid] as usize;
        if idx.abs_diff(exclude) > window {
            let p = &pts[idx * self.dim..(idx + 1) * self.dim];
            let d_sq: f64 = q.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
            if d_sq < best.1 || (d_sq == best.1 && idx < best.0) {
                *best = (idx, d_sq);
            }
        }
        if hi - lo == 1 {
            return;
        }
        let split = pts[idx * self.dim + axis];
        let diff = q[axis] - split;
        let next = (axis + 1) % self.dim;
        let (first, second) = if diff <= 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(pts, q, exclude, window, first.0, first.1, next, best);
        if diff * diff <= best.1 {
            self.search(pts, q, exclude, window, second.0, second.1, next, best);
        }
    }
}
