//! From scalar series to delay-embedded state vectors.
//!
//! The chain is: affine rescale to `[0, 1]`, rank (uniform-deviate) transform
//! `u(i) = n(i)/N` with `n(i) = #{j : y(j) <= y(i)}`, delay estimation from
//! the first minimum of the delayed mutual information, embedding-dimension
//! estimation by false nearest neighbours, and finally the delay embedding
//! itself.

mod fnn;
mod mi;

pub use fnn::{fnn_embedding_dimension, fnn_embedding_dimension_with_window, DimensionEstimate};
pub use mi::{first_minimum_lag, mutual_information, DelayEstimate};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Series affinely mapped onto `[0, 1]` (both endpoints attained).
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledSeries(Vec<f64>);

impl RescaledSeries {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Rank-transformed series with values in `{1/N, 2/N, .., 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformDeviateSeries(Vec<f64>);

impl UniformDeviateSeries {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Delay-embedding parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingParams {
    /// Delay in samples.
    pub t_d: usize,
    /// Embedding dimension.
    pub d_emb: usize,
}

/// Delay vectors stored row-major: point `j` is
/// `[u(j), u(j + t_d), .., u(j + (d_emb - 1) t_d)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVectorSet {
    dim: usize,
    data: Vec<f64>,
}

impl StateVectorSet {
    /// Wraps row-major coordinates; every component must lie in `[0, 1]`.
    pub fn from_rows(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if data.len() % dim != 0 {
            return Err(Error::InvalidParameter(format!(
                "{} coordinates do not fill rows of dimension {dim}",
                data.len()
            )));
        }
        if data.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::InvalidParameter(
                "state-vector components must lie in [0, 1]".into(),
            ));
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }
}

/// Affine map of a finite series onto `[0, 1]`.
pub fn rescale(series: &[f64]) -> Result<RescaledSeries> {
    if series.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "rescale needs at least 2 samples, got {}",
            series.len()
        )));
    }
    if let Some(&bad) = series.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "series contains a non-finite sample: {bad}"
        )));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in series {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo == hi {
        return Err(Error::DegenerateSeries {
            value: lo,
            len: series.len(),
        });
    }
    let span = hi - lo;
    Ok(RescaledSeries(
        series.iter().map(|&v| (v - lo) / span).collect(),
    ))
}

/// Rank transform `u(i) = n(i) / N` with `n(i) = #{j : y(j) <= y(i)}`. Tied
/// values share the rank of their last occurrence in sorted order, and the
/// empirical marginal of distinct inputs is exactly uniform on `{1/N .. 1}`.
/// Ranks are invariant under strictly increasing transformations of the
/// input, which is why the attractor geometry downstream only depends on the
/// ordering of the samples.
pub fn uniform_deviate(series: &RescaledSeries) -> UniformDeviateSeries {
    let n = series.len();
    let mut sorted: Vec<f64> = series.values().to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let values = series
        .values()
        .iter()
        .map(|&y| {
            let count = sorted.partition_point(|&s| s <= y);
            count as f64 / n as f64
        })
        .collect();
    UniformDeviateSeries(values)
}

/// Delay embedding with the given parameters; yields
/// `N' = N - (d_emb - 1) t_d` vectors.
pub fn embed(series: &UniformDeviateSeries, params: &EmbeddingParams) -> Result<StateVectorSet> {
    let n = series.len();
    let EmbeddingParams { t_d, d_emb } = *params;
    if d_emb == 0 {
        return Err(Error::InvalidParameter(
            "embedding dimension must be positive".into(),
        ));
    }
    if d_emb > 1 && t_d == 0 {
        return Err(Error::InvalidParameter(
            "delay must be positive for dimensions above 1".into(),
        ));
    }
    let span = (d_emb - 1) * t_d;
    if span >= n {
        return Err(Error::InvalidParameter(format!(
            "embedding window (d_emb-1)*t_d = {span} does not fit in {n} samples"
        )));
    }
    let count = n - span;
    let u = series.values();
    let mut data = Vec::with_capacity(count * d_emb);
    for j in 0..count {
        for k in 0..d_emb {
            data.push(u[j + k * t_d]);
        }
    }
    Ok(StateVectorSet { dim: d_emb, data })
}

/// Fraction of occupied cells when the delay plane `(x(i), x(i + lag))` is
/// covered with a `grid x grid` mesh: a scale-free summary of how much of the
/// plane the attractor visits.
pub fn delay_plane_occupancy(series: &[f64], lag: usize, grid: usize) -> Result<f64> {
    if grid == 0 {
        return Err(Error::InvalidParameter("grid must be positive".into()));
    }
    if lag >= series.len() {
        return Err(Error::InvalidParameter(format!(
            "lag {lag} leaves no pairs in {} samples",
            series.len()
        )));
    }
    let cell = |x: f64| (((x * grid as f64).ceil() as usize).max(1) - 1).min(grid - 1);
    let mut occupied = vec![false; grid * grid];
    for i in 0..series.len() - lag {
        occupied[cell(series[i]) * grid + cell(series[i + lag])] = true;
    }
    Ok(occupied.iter().filter(|&&b| b).count() as f64 / (grid * grid) as f64)
}
