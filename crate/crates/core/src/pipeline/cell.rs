//! One sweep cell: series -> deviate -> embedding -> network -> measures,
//! with every intermediate written as a machine-readable artifact.

use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::embedding::{
    delay_plane_occupancy, embed, first_minimum_lag, fnn_embedding_dimension, rescale,
    uniform_deviate, DelayEstimate, DimensionEstimate, EmbeddingParams, UniformDeviateSeries,
};
use crate::error::Result;
use crate::metrics::{metrics_report, MetricsReport};
use crate::quantum::{FockTruncation, InitialState, MeanPhotonSeries, ModelParams};
use crate::recnet::{build_network, critical_epsilon, EpsilonSearchResult};

use super::cache::{load_or_compute, SeriesSpec};
use super::config::SweepConfig;
use super::short::{short_time_report, ShortTimeReport};

/// Side length of the occupancy grid on the (u(i), u(i + t_d)) plane; the
/// occupied fraction is the recorded attractor-spread statistic.
pub const OCCUPANCY_GRID: usize = 64;

/// Measures of the network at one scanned radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonScanPoint {
    /// Radius as a multiple of the critical radius.
    pub multiplier: f64,
    pub epsilon: f64,
    pub report: MetricsReport,
}

/// Everything one cell produces. Deterministic given the config: reruns,
/// warm caches, and different worker counts yield equal values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub kappa: f64,
    pub alpha_sq: f64,
    pub chi: f64,
    /// Cache key of the long series (hash of all physical inputs).
    pub series_key: String,
    pub delay: DelayEstimate,
    pub dimension: DimensionEstimate,
    /// Number of embedded state vectors.
    pub node_count: usize,
    pub epsilon: EpsilonSearchResult,
    /// Network measures at each configured multiple of the critical radius.
    pub scan: Vec<EpsilonScanPoint>,
    /// Occupied fraction of the delay-plane grid (attractor spread).
    pub delay_occupancy: f64,
    pub short: ShortTimeReport,
}

impl CellResult {
    /// Convenience: the measures at the critical radius itself.
    pub fn at_critical(&self) -> &MetricsReport {
        &self.scan[0].report
    }
}

/// Runs the full chain for one `(kappa, alpha_sq)` cell. No files are
/// written; see [`write_cell_artifacts`].
pub fn run_cell(cfg: &SweepConfig, kappa: f64, alpha_sq: f64) -> Result<CellResult> {
    let params = ModelParams::new(cfg.chi, kappa)?;
    let init = InitialState::new(alpha_sq)?;
    let trunc = FockTruncation::standard(alpha_sq)?;
    let cache_dir = cfg.effective_cache_dir();

    let long_spec = SeriesSpec {
        params,
        init,
        trunc,
        grid: cfg.long_grid.to_grid()?,
    };
    let (long_series, _) = load_or_compute(&cache_dir, &long_spec)?;

    let short_spec = SeriesSpec {
        params,
        init,
        trunc,
        grid: cfg.short_grid.to_grid()?,
    };
    let (short_series, _) = load_or_compute(&cache_dir, &short_spec)?;
    let short = short_time_report(&short_series, alpha_sq)?;

    let rescaled = rescale(&long_series.values)?;
    let deviate = uniform_deviate(&rescaled);
    let delay = first_minimum_lag(&deviate, cfg.mi_max_lag, cfg.mi_bins)?;
    let dimension = fnn_embedding_dimension(&deviate, delay.lag, cfg.d_max)?;
    let vectors = embed(
        &deviate,
        &EmbeddingParams {
            t_d: delay.lag,
            d_emb: dimension.dim,
        },
    )?;
    let epsilon = critical_epsilon(&vectors, cfg.epsilon_resolution)?;

    let mut scan = Vec::with_capacity(cfg.epsilon_multipliers.len());
    for &m in &cfg.epsilon_multipliers {
        let eps = m * epsilon.epsilon_c;
        let network = build_network(&vectors, eps)?;
        scan.push(EpsilonScanPoint {
            multiplier: m,
            epsilon: eps,
            report: metrics_report(&network)?,
        });
    }

    let delay_occupancy = delay_plane_occupancy(deviate.values(), delay.lag, OCCUPANCY_GRID)?;

    Ok(CellResult {
        kappa,
        alpha_sq,
        chi: cfg.chi,
        series_key: long_spec.key(),
        delay,
        dimension,
        node_count: vectors.len(),
        epsilon,
        scan,
        delay_occupancy,
        short,
    })
}

/// Directory of one cell's artifacts under the sweep output root.
pub fn cell_dir(cfg: &SweepConfig, kappa: f64, alpha_sq: f64) -> PathBuf {
    cfg.output_dir
        .join("cells")
        .join(format!("alpha_{alpha_sq}"))
        .join(format!("kappa_{kappa}"))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Writes every artifact of a finished cell; returns their paths.
///
/// Layout (all under [`cell_dir`]):
/// `cell_result.json` (the whole [`CellResult`]), `embedding.json`,
/// `epsilon_search.json`, `metrics_m<multiplier>.json` per scanned radius,
/// `degree_hist.csv` (`degree,count,frequency` at the critical radius),
/// `edges_eps_c.edges` (1-based sorted edge list), `delay_plot.csv`
/// (`u,u_lagged` deviate pairs), `short_series.csv` and `short_stats.json`.
pub fn write_cell_artifacts(
    cfg: &SweepConfig,
    result: &CellResult,
    deviate: &UniformDeviateSeries,
    short_series: &MeanPhotonSeries,
) -> Result<Vec<PathBuf>> {
    let dir = cell_dir(cfg, result.kappa, result.alpha_sq);
    std::fs::create_dir_all(&dir)?;
    let mut written = Vec::new();

    let path = dir.join("cell_result.json");
    write_json(&path, result)?;
    written.push(path);

    #[derive(Serialize)]
    struct EmbeddingArtifact<'a> {
        series_key: &'a str,
        delay: &'a DelayEstimate,
        dimension: &'a DimensionEstimate,
        node_count: usize,
        delay_occupancy: f64,
    }
    let path = dir.join("embedding.json");
    write_json(
        &path,
        &EmbeddingArtifact {
            series_key: &result.series_key,
            delay: &result.delay,
            dimension: &result.dimension,
            node_count: result.node_count,
            delay_occupancy: result.delay_occupancy,
        },
    )?;
    written.push(path);

    let path = dir.join("epsilon_search.json");
    write_json(&path, &result.epsilon)?;
    written.push(path);

    for point in &result.scan {
        let path = dir.join(format!("metrics_m{:.3}.json", point.multiplier));
        write_json(&path, point)?;
        written.push(path);
    }

    // Degree histogram at the critical radius.
    let at_c = result.at_critical();
    let path = dir.join("degree_hist.csv");
    {
        let mut w = BufWriter::new(std::fs::File::create(&path)?);
        writeln!(w, "degree,count,frequency")?;
        let total: usize = at_c.degree_histogram.iter().map(|&(_, c)| c).sum();
        for &(degree, count) in &at_c.degree_histogram {
            writeln!(w, "{degree},{count},{:.16e}", count as f64 / total as f64)?;
        }
        w.flush()?;
    }
    written.push(path);

    // Edge list at the critical radius (rebuilt from the embedded vectors'
    // deviate series; cheap relative to the run itself).
    let rebuilt = embed(
        deviate,
        &EmbeddingParams {
            t_d: result.delay.lag,
            d_emb: result.dimension.dim,
        },
    )?;
    let network = build_network(&rebuilt, result.epsilon.epsilon_c)?;
    let path = dir.join("edges_eps_c.edges");
    {
        let mut w = BufWriter::new(std::fs::File::create(&path)?);
        network.write_edge_list(&mut w, result.epsilon.epsilon_c, &result.series_key)?;
        w.flush()?;
    }
    written.push(path);

    // Delay-plane dataset.
    let path = dir.join("delay_plot.csv");
    {
        let mut w = BufWriter::new(std::fs::File::create(&path)?);
        writeln!(w, "u,u_lagged")?;
        let u = deviate.values();
        for i in 0..u.len() - result.delay.lag {
            writeln!(w, "{:.16e},{:.16e}", u[i], u[i + result.delay.lag])?;
        }
        w.flush()?;
    }
    written.push(path);

    // Short-time series and statistics.
    let path = dir.join("short_series.csv");
    {
        let mut w = BufWriter::new(std::fs::File::create(&path)?);
        writeln!(w, "tau,mean_photon_number")?;
        for (k, v) in short_series.values.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e}", short_series.tau(k), v)?;
        }
        w.flush()?;
    }
    written.push(path);

    let path = dir.join("short_stats.json");
    write_json(&path, &result.short)?;
    written.push(path);

    Ok(written)
}

/// [`run_cell`] plus artifact writing; returns the result and the paths.
pub fn run_cell_with_artifacts(
    cfg: &SweepConfig,
    kappa: f64,
    alpha_sq: f64,
) -> Result<(CellResult, Vec<PathBuf>)> {
    let result = run_cell(cfg, kappa, alpha_sq)?;
    // Reload the cached inputs the artifacts need; both are warm now.
    let params = ModelParams::new(cfg.chi, kappa)?;
    let init = InitialState::new(alpha_sq)?;
    let trunc = FockTruncation::standard(alpha_sq)?;
    let cache_dir = cfg.effective_cache_dir();
    let (long_series, _) = load_or_compute(
        &cache_dir,
        &SeriesSpec {
            params,
            init,
            trunc,
            grid: cfg.long_grid.to_grid()?,
        },
    )?;
    let (short_series, _) = load_or_compute(
        &cache_dir,
        &SeriesSpec {
            params,
            init,
            trunc,
            grid: cfg.short_grid.to_grid()?,
        },
    )?;
    let deviate = uniform_deviate(&rescale(&long_series.values)?);
    let paths = write_cell_artifacts(cfg, &result, &deviate, &short_series)?;
    Ok((result, paths))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// A deliberately tiny configuration so unit tests stay fast; the
    /// full-scale grids are exercised by the acceptance suite.
    pub(crate) fn tiny_config(dir: &Path) -> SweepConfig {
        SweepConfig {
            alpha_sq: vec![4.0],
            kappa: vec![0.0, 0.05],
            chi: 5.0,
            short_grid: super::super::config::GridSpec {
                t0: 0.0,
                dt: 4.0,
                count: 2501,
            },
            long_grid: super::super::config::GridSpec {
                t0: 100.0,
                dt: 1.0,
                count: 1500,
            },
            epsilon_resolution: 0.005,
            epsilon_multipliers: vec![1.0, 1.5],
            mi_bins: 16,
            mi_max_lag: 50,
            d_max: 6,
            tail_eps: 1e-12,
            output_dir: dir.join("out"),
            cache_dir: Some(dir.join("cache")),
            workers: 0,
        }
    }

    #[test]
    fn cell_runs_end_to_end_and_is_warm_cache_stable() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = tiny_config(tmp.path());
        let cold = run_cell(&cfg, 0.05, 4.0).unwrap();
        assert!(cold.node_count > 1000);
        assert!(cold.epsilon.epsilon_c > 0.0);
        assert_eq!(cold.scan.len(), 2);
        assert!(cold.scan[0].report.average_path_length.value >= 1.0);
        assert!(cold.delay_occupancy > 0.0 && cold.delay_occupancy <= 1.0);

        let warm = run_cell(&cfg, 0.05, 4.0).unwrap();
        assert_eq!(cold, warm, "warm rerun must reproduce the cold result");
    }

    #[test]
    fn scan_trends_are_monotone_in_radius() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = tiny_config(tmp.path());
        cfg.epsilon_multipliers = vec![1.0, 1.3, 1.8, 2.5];
        let cell = run_cell(&cfg, 0.0, 4.0).unwrap();
        for pair in cell.scan.windows(2) {
            assert!(
                pair[1].report.link_density >= pair[0].report.link_density,
                "link density must not fall with radius"
            );
            assert!(
                pair[1].report.average_path_length.value
                    <= pair[0].report.average_path_length.value + 1e-12,
                "average path length must not rise with radius"
            );
        }
    }

    #[test]
    fn worker_count_does_not_change_the_result() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = tiny_config(tmp.path());
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_cell(&cfg, 0.05, 4.0))
            .unwrap();
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| run_cell(&cfg, 0.05, 4.0))
            .unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn artifacts_are_complete_and_byte_stable_across_reruns() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = tiny_config(tmp.path());
        let (_, paths) = run_cell_with_artifacts(&cfg, 0.0, 4.0).unwrap();
        let names: Vec<String> = paths
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        for expect in [
            "cell_result.json",
            "embedding.json",
            "epsilon_search.json",
            "metrics_m1.000.json",
            "metrics_m1.500.json",
            "degree_hist.csv",
            "edges_eps_c.edges",
            "delay_plot.csv",
            "short_series.csv",
            "short_stats.json",
        ] {
            assert!(names.contains(&expect.to_string()), "missing {expect}");
        }
        let snapshot: Vec<Vec<u8>> = paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
        let (_, paths_again) = run_cell_with_artifacts(&cfg, 0.0, 4.0).unwrap();
        assert_eq!(paths, paths_again);
        for (path, before) in paths.iter().zip(&snapshot) {
            let after = std::fs::read(path).unwrap();
            assert_eq!(&after, before, "{} changed between reruns", path.display());
        }
    }

    #[test]
    fn degenerate_cell_fails_cleanly() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = tiny_config(tmp.path());
        // alpha_sq = 0: the series is constant, so rescaling must refuse it.
        let err = run_cell(&cfg, 0.0, 0.0);
        assert!(err.is_err());
    }
}
