//! Shared input builders for the benchmark targets.

use recnetq_core::embedding::{
    embed, rescale, uniform_deviate, EmbeddingParams, StateVectorSet, UniformDeviateSeries,
};

/// Two-tone quasi-periodic signal: broadband enough for its mutual
/// information to decay with lag, smooth enough to embed in low dimension —
/// the same shape class as the production series, without the cost of
/// generating one.
pub fn quasiperiodic_series(n: usize) -> Vec<f64> {
    let phi = 0.618_033_988_749_894_9_f64;
    (0..n)
        .map(|i| {
            let x = 2.0 * std::f64::consts::PI * i as f64 / 100.0;
            x.sin() + 0.7 * (phi * x).sin()
        })
        .collect()
}

/// Rank-transformed version of [`quasiperiodic_series`].
pub fn quasiperiodic_deviate(n: usize) -> UniformDeviateSeries {
    uniform_deviate(&rescale(&quasiperiodic_series(n)).expect("non-degenerate"))
}

/// Delay-embedded cloud of `n - (d - 1) * t_d` points in `d` dimensions.
pub fn embedded_cloud(n: usize, t_d: usize, d: usize) -> StateVectorSet {
    embed(&quasiperiodic_deviate(n), &EmbeddingParams { t_d, d_emb: d }).expect("window fits")
}
