//! On-disk series cache keyed by a hash of every physical input.
//!
//! One file per series: a single JSON header line followed by `tau,value`
//! CSV rows printed with 17 significant digits, which round-trips every f64
//! exactly. Warm reads therefore reproduce the computed series bit for bit.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::quantum::{
    mean_photon_series, FockTruncation, InitialState, MeanPhotonSeries, ModelParams, TimeGrid,
};

/// Everything that determines the series values; the cache key hashes all of
/// it, so two specs share a file only when the physics is identical.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub params: ModelParams,
    pub init: InitialState,
    pub trunc: FockTruncation,
    pub grid: TimeGrid,
}

impl SeriesSpec {
    /// Hex SHA-256 over the canonical full-precision rendering of the spec.
    pub fn key(&self) -> String {
        let canonical = format!(
            "series-v1|chi={:.17e}|lambda={:.17e}|kappa={:.17e}|kappa2={:.17e}|detuning={:.17e}|alpha_sq={:.17e}|atom={}|n_max={}|tail_eps={:.17e}|t0={:.17e}|dt={:.17e}|count={}",
            self.params.chi,
            self.params.lambda,
            self.params.kappa,
            self.params.kappa2,
            self.params.detuning,
            self.init.alpha_sq,
            self.init.atom_level,
            self.trunc.n_max,
            self.trunc.tail_eps,
            self.grid.t0,
            self.grid.dt,
            self.grid.count,
        );
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        hex(&hasher.finalize())
    }

    /// Cache file path for this spec inside `dir`.
    pub fn cache_path(&self, dir: &Path) -> PathBuf {
        dir.join(format!("series_{}.csv", &self.key()[..32]))
    }
}

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// SHA-256 of a file's content, hex-encoded (used by manifests).
pub fn file_sha256(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(hex(&hasher.finalize()))
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    key: String,
    spec: SeriesSpec,
}

/// Writes the series for `spec` to `path` (header line + CSV), atomically
/// via a same-directory temp file.
pub fn write_series(path: &Path, spec: &SeriesSpec, series: &MeanPhotonSeries) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    {
        let mut w = BufWriter::new(std::fs::File::create(&tmp)?);
        let header = Header {
            format: "recnetq-series-v1".into(),
            key: spec.key(),
            spec: *spec,
        };
        serde_json::to_writer(&mut w, &header)?;
        writeln!(w)?;
        for (k, v) in series.values.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e}", series.tau(k), v)?;
        }
        w.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Reads a cached series and verifies it belongs to `spec` (key match, grid
/// match, full row count).
pub fn read_series(path: &Path, spec: &SeriesSpec) -> Result<MeanPhotonSeries> {
    let malformed = |reason: String| Error::MalformedFile {
        path: path.display().to_string(),
        reason,
    };
    let mut lines = BufReader::new(std::fs::File::open(path)?).lines();
    let header_line = lines
        .next()
        .ok_or_else(|| malformed("empty file".into()))??;
    let header: Header =
        serde_json::from_str(&header_line).map_err(|e| malformed(format!("bad header: {e}")))?;
    if header.format != "recnetq-series-v1" {
        return Err(malformed(format!("unknown format {}", header.format)));
    }
    if header.key != spec.key() || header.spec != *spec {
        return Err(malformed("cache key does not match requested spec".into()));
    }
    let mut values = Vec::with_capacity(spec.grid.count);
    for (row, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let (tau_s, val_s) = line
            .split_once(',')
            .ok_or_else(|| malformed(format!("bad row {row}")))?;
        let tau: f64 = tau_s
            .parse()
            .map_err(|_| malformed(format!("bad tau at row {row}")))?;
        let val: f64 = val_s
            .parse()
            .map_err(|_| malformed(format!("bad value at row {row}")))?;
        let expect = spec.grid.tau(row);
        if tau != expect {
            return Err(malformed(format!(
                "tau mismatch at row {row}: {tau} vs {expect}"
            )));
        }
        values.push(val);
    }
    if values.len() != spec.grid.count {
        return Err(malformed(format!(
            "row count {} does not match grid count {}",
            values.len(),
            spec.grid.count
        )));
    }
    Ok(MeanPhotonSeries {
        t0: spec.grid.t0,
        dt: spec.grid.dt,
        values,
    })
}

/// Returns the series for `spec`, from `cache_dir` when a valid file exists,
/// computing and caching it otherwise. An unreadable or mismatched cache
/// file is recomputed and replaced. The flag reports a warm hit.
pub fn load_or_compute(cache_dir: &Path, spec: &SeriesSpec) -> Result<(MeanPhotonSeries, bool)> {
    let path = spec.cache_path(cache_dir);
    if path.exists() {
        if let Ok(series) = read_series(&path, spec) {
            return Ok((series, true));
        }
    }
    let series = mean_photon_series(&spec.params, &spec.init, &spec.trunc, &spec.grid)?;
    write_series(&path, spec, &series)?;
    Ok((series, false))
}
