//! Whole-sweep orchestration: every `(kappa, alpha_sq)` cell, per-intensity
//! summary tables, peak location, and a manifest of all artifacts.

use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

use super::cache::file_sha256;
use super::cell::{run_cell_with_artifacts, CellResult};
use super::config::SweepConfig;

/// One summary row: the scalar outcomes of a cell at its critical radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub alpha_sq: f64,
    pub kappa: f64,
    pub t_d: usize,
    pub d_emb: usize,
    pub epsilon_c: f64,
    pub global_clustering: f64,
    pub transitivity: f64,
    pub link_density: f64,
    pub average_path_length: f64,
}

impl SummaryRow {
    fn from_cell(cell: &CellResult) -> Self {
        let at_c = cell.at_critical();
        Self {
            alpha_sq: cell.alpha_sq,
            kappa: cell.kappa,
            t_d: cell.delay.lag,
            d_emb: cell.dimension.dim,
            epsilon_c: cell.epsilon.epsilon_c,
            global_clustering: at_c.global_clustering,
            transitivity: at_c.transitivity,
            link_density: at_c.link_density,
            average_path_length: at_c.average_path_length.value,
        }
    }
}

/// Peak location per field intensity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakRow {
    pub alpha_sq: f64,
    /// Kappa maximizing the mean local clustering at the critical radius.
    pub argmax_clustering_kappa: f64,
    /// Kappa maximizing the transitivity at the critical radius.
    pub argmax_transitivity_kappa: f64,
}

/// A cell that failed, with the error it failed on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedCell {
    pub alpha_sq: f64,
    pub kappa: f64,
    pub error: String,
}

/// Everything a sweep produces in memory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub long_grid_is_default: bool,
    pub rows: Vec<SummaryRow>,
    pub peaks: Vec<PeakRow>,
    pub failed: Vec<FailedCell>,
}

impl SweepSummary {
    /// True when every requested cell completed.
    pub fn complete(&self) -> bool {
        self.failed.is_empty()
    }
}

#[derive(Serialize)]
struct ManifestEntry {
    path: String,
    sha256: String,
    bytes: u64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    format: &'static str,
    config: &'a SweepConfig,
    config_sha256: String,
    long_grid_is_default: bool,
    artifacts: Vec<ManifestEntry>,
    failed_cells: &'a [FailedCell],
}

fn config_hash(cfg: &SweepConfig) -> Result<String> {
    let json = serde_json::to_string(cfg)?;
    let mut hasher = Sha256::new();
    hasher.update(json.as_bytes());
    Ok(format!("{:x}", hasher.finalize()))
}

fn relative_to<'a>(path: &'a Path, root: &Path) -> &'a Path {
    path.strip_prefix(root).unwrap_or(path)
}

/// Runs every `(kappa, alpha_sq)` cell of the config, writes all artifacts,
/// summary tables, and `MANIFEST.json`, and returns the in-memory summary.
///
/// Individual cell failures are captured in the summary instead of aborting
/// the sweep. Cells run one after another (each is internally parallel), so
/// peak memory stays bounded by the largest single network.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepSummary> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.output_dir)?;

    let mut rows = Vec::new();
    let mut failed = Vec::new();
    let mut artifact_paths: Vec<PathBuf> = Vec::new();

    for &alpha_sq in &cfg.alpha_sq {
        for &kappa in &cfg.kappa {
            match run_cell_with_artifacts(cfg, kappa, alpha_sq) {
                Ok((cell, paths)) => {
                    rows.push(SummaryRow::from_cell(&cell));
                    artifact_paths.extend(paths);
                }
                Err(e) => failed.push(FailedCell {
                    alpha_sq,
                    kappa,
                    error: e.to_string(),
                }),
            }
        }
    }

    let mut peaks = Vec::new();
    for &alpha_sq in &cfg.alpha_sq {
        let of_alpha: Vec<&SummaryRow> =
            rows.iter().filter(|r| r.alpha_sq == alpha_sq).collect();
        if of_alpha.is_empty() {
            continue;
        }
        let best_cc = of_alpha
            .iter()
            .max_by(|a, b| a.global_clustering.total_cmp(&b.global_clustering))
            .unwrap();
        let best_t = of_alpha
            .iter()
            .max_by(|a, b| a.transitivity.total_cmp(&b.transitivity))
            .unwrap();
        peaks.push(PeakRow {
            alpha_sq,
            argmax_clustering_kappa: best_cc.kappa,
            argmax_transitivity_kappa: best_t.kappa,
        });
    }

    let summary = SweepSummary {
        long_grid_is_default: cfg.long_grid_is_default(),
        rows,
        peaks,
        failed,
    };

    // Per-intensity CSV tables.
    for &alpha_sq in &cfg.alpha_sq {
        let path = cfg.output_dir.join(format!("summary_alpha_{alpha_sq}.csv"));
        let mut w = BufWriter::new(std::fs::File::create(&path)?);
        writeln!(
            w,
            "kappa,global_clustering,transitivity,epsilon_c,t_d,d_emb"
        )?;
        for row in summary.rows.iter().filter(|r| r.alpha_sq == alpha_sq) {
            writeln!(
                w,
                "{},{:.16e},{:.16e},{:.16e},{},{}",
                row.kappa, row.global_clustering, row.transitivity, row.epsilon_c, row.t_d,
                row.d_emb
            )?;
        }
        w.flush()?;
        artifact_paths.push(path);
    }

    let path = cfg.output_dir.join("summary.json");
    {
        let mut w = BufWriter::new(std::fs::File::create(&path)?);
        serde_json::to_writer_pretty(&mut w, &summary)?;
        writeln!(w)?;
        w.flush()?;
    }
    artifact_paths.push(path);

    // Manifest over every artifact, sorted by path for stable output.
    let mut entries = Vec::with_capacity(artifact_paths.len());
    for path in &artifact_paths {
        entries.push(ManifestEntry {
            path: relative_to(path, &cfg.output_dir)
                .to_string_lossy()
                .replace('\\', "/"),
            sha256: file_sha256(path)?,
            bytes: std::fs::metadata(path)?.len(),
        });
    }
    entries.sort_by(|a, b| a.path.cmp(&b.path));
    let manifest = Manifest {
        format: "recnetq-manifest-v1",
        config: cfg,
        config_sha256: config_hash(cfg)?,
        long_grid_is_default: cfg.long_grid_is_default(),
        artifacts: entries,
        failed_cells: &summary.failed,
    };
    let mut w = BufWriter::new(std::fs::File::create(cfg.output_dir.join("MANIFEST.json"))?);
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    writeln!(w)?;
    w.flush()?;

    Ok(summary)
}
