//! Fixed-radius neighbor search on a spatial cell index, and a streaming
//! union-find connectivity probe that never materializes the edge set.

use rayon::prelude::*;

use crate::embedding::StateVectorSet;
use crate::error::{Error, Result};

use super::network::RecurrenceNetwork;

/// Cells per axis are capped so pathologically small radii cannot blow up the
/// key space; correctness only needs (cell side) >= eps, which the ring radius
/// below guarantees for any cap.
const MAX_CELLS_PER_AXIS: usize = 1024;
/// Cell keys use at most this many leading coordinates; further coordinates
/// are handled by the exact distance check.
const MAX_GRID_AXES: usize = 3;

struct CellIndex {
    /// Occupied cell -> point indices, ascending.
    cells: std::collections::HashMap<[i64; MAX_GRID_AXES], Vec<u32>>,
    /// Cell key of each point.
    keys: Vec<[i64; MAX_GRID_AXES]>,
    /// Ring radius in cells; scanning offsets in [-ring, ring] per axis
    /// covers every pair within eps.
    ring: i64,
    axes: usize,
}

impl CellIndex {
    fn new(vs: &StateVectorSet, eps: f64) -> Self {
        let axes = vs.dim().min(MAX_GRID_AXES);
        let m = if eps > 0.0 {
            ((1.0 / eps).floor().max(1.0)).min(MAX_CELLS_PER_AXIS as f64)
        } else {
            MAX_CELLS_PER_AXIS as f64
        };
        // Points at distance <= eps differ by at most eps*m cell units per axis.
        let ring = (eps * m).ceil().max(1.0) as i64;
        let mut cells: std::collections::HashMap<[i64; MAX_GRID_AXES], Vec<u32>> =
            std::collections::HashMap::new();
        let mut keys = Vec::with_capacity(vs.len());
        for (i, x) in vs.rows().enumerate() {
            let mut key = [0i64; MAX_GRID_AXES];
            for (a, slot) in key.iter_mut().enumerate().take(axes) {
                *slot = (x[a] * m).floor() as i64;
            }
            cells.entry(key).or_default().push(i as u32);
            keys.push(key);
        }
        Self {
            cells,
            keys,
            ring,
            axes,
        }
    }

    /// Calls `visit` with the ascending point list of every cell in the ring
    /// around point `i`'s cell.
    fn for_each_ring_cell<F: FnMut(&[u32])>(&self, i: usize, mut visit: F) {
        let base = self.keys[i];
        let r = self.ring;
        let mut offset = [0i64; MAX_GRID_AXES];
        self.ring_rec(0, base, &mut offset, r, &mut visit);
    }

    fn ring_rec<F: FnMut(&[u32])>(
        &self,
        axis: usize,
        base: [i64; MAX_GRID_AXES],
        offset: &mut [i64; MAX_GRID_AXES],
        r: i64,
        visit: &mut F,
    ) {
        if axis == self.axes {
            let mut key = base;
            for a in 0..self.axes {
                key[a] += offset[a];
            }
            if let Some(pts) = self.cells.get(&key) {
                visit(pts);
            }
            return;
        }
        for d in -r..=r {
            offset[axis] = d;
            self.ring_rec(axis + 1, base, offset, r, visit);
        }
    }
}

fn within(a: &[f64], b: &[f64], eps_sq: f64) -> bool {
    let mut acc = 0.0;
    for (u, v) in a.iter().zip(b) {
        let d = u - v;
        acc += d * d;
    }
    acc <= eps_sq
}

fn validate_eps(eps: f64) -> Result<()> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "recurrence threshold must be finite and non-negative, got {eps}"
        )));
    }
    Ok(())
}

/// Builds the recurrence network: edge (i, j), i != j, iff the Euclidean
/// distance between state vectors i and j is <= `eps` (closed ball).
///
/// Neighbor candidates come from a fixed-radius cell index over the first
/// three embedding coordinates; every candidate is verified with the exact
/// full-dimensional distance, so the result equals the all-pairs network.
/// Rows are processed in parallel but each adjacency list is assembled in
/// index order, so the edge set is identical for any worker count.
pub fn build_network(vs: &StateVectorSet, eps: f64) -> Result<RecurrenceNetwork> {
    validate_eps(eps)?;
    let n = vs.len();
    if n == 0 {
        return RecurrenceNetwork::from_edges(0, &[]);
    }
    let index = CellIndex::new(vs, eps);
    let eps_sq = eps * eps;
    let upper: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = vs.point(i);
            let mut list = Vec::new();
            index.for_each_ring_cell(i, |pts| {
                let start = pts.partition_point(|&j| j as usize <= i);
                for &j in &pts[start..] {
                    if within(xi, vs.point(j as usize), eps_sq) {
                        list.push(j);
                    }
                }
            });
            list.sort_unstable();
            list
        })
        .collect();
    Ok(RecurrenceNetwork::from_upper_lists(upper))
}

struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
    components: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
            components: n,
        }
    }

    fn find(&mut self, mut i: u32) -> u32 {
        while self.parent[i as usize] != i {
            let grand = self.parent[self.parent[i as usize] as usize];
            self.parent[i as usize] = grand;
            i = grand;
        }
        i
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (hi, lo) = if self.rank[ra as usize] >= self.rank[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[lo as usize] = hi;
        if self.rank[hi as usize] == self.rank[lo as usize] {
            self.rank[hi as usize] += 1;
        }
        self.components -= 1;
    }
}

/// Decides whether the recurrence network at threshold `eps` is connected
/// without building it: candidate pairs stream through a union-find and the
/// scan stops as soon as a single component remains.
pub fn connected_at(vs: &StateVectorSet, eps: f64) -> Result<bool> {
    validate_eps(eps)?;
    let n = vs.len();
    if n <= 1 {
        return Ok(true);
    }
    let index = CellIndex::new(vs, eps);
    let eps_sq = eps * eps;
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        let xi = vs.point(i);
        index.for_each_ring_cell(i, |pts| {
            if uf.components == 1 {
                return;
            }
            let start = pts.partition_point(|&j| j as usize <= i);
            for &j in &pts[start..] {
                if within(xi, vs.point(j as usize), eps_sq) {
                    uf.union(i as u32, j);
                    if uf.components == 1 {
                        return;
                    }
                }
            }
        });
        if uf.components == 1 {
            return Ok(true);
        }
    }
    Ok(uf.components == 1)
}
