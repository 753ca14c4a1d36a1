//! Sweep configuration: every knob of an end-to-end run, JSON-serializable,
//! with defaults matching the reference analysis regime.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::TimeGrid;

/// Plain time-grid triple used inside configs (mirrors [`TimeGrid`] but
/// deserializes without validation so bad configs fail with one clear error
/// from [`SweepConfig::validate`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t0: f64,
    pub dt: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn to_grid(self) -> Result<TimeGrid> {
        TimeGrid::new(self.t0, self.dt, self.count)
    }
}

/// The long-series analysis window: 25000 unit-step samples starting at
/// tau = 10000 (so tau in [10000, 35000)).
pub const DEFAULT_LONG_GRID: GridSpec = GridSpec {
    t0: 10000.0,
    dt: 1.0,
    count: 25000,
};

/// The short-time window: tau in [0, 10000] at half-unit resolution, enough
/// to resolve every early-time feature.
pub const DEFAULT_SHORT_GRID: GridSpec = GridSpec {
    t0: 0.0,
    dt: 0.5,
    count: 20001,
};

/// Full sweep configuration. All fields have defaults, so `{}` is a valid
/// config file describing the reference run at `|alpha|^2 = 25`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Mean photon numbers `|alpha|^2` to sweep.
    pub alpha_sq: Vec<f64>,
    /// Intensity parameters to sweep.
    pub kappa: Vec<f64>,
    /// Kerr coefficient in units of the coupling.
    pub chi: f64,
    /// Grid for the short-time report.
    pub short_grid: GridSpec,
    /// Grid for the series that is turned into networks.
    pub long_grid: GridSpec,
    /// Grid spacing of the critical-radius search.
    pub epsilon_resolution: f64,
    /// Radii scanned per cell, as multiples of the critical radius; must
    /// start at 1.0 and be non-decreasing.
    pub epsilon_multipliers: Vec<f64>,
    /// Histogram bins of the mutual-information delay estimate.
    pub mi_bins: usize,
    /// Largest delay scanned for the mutual-information minimum.
    pub mi_max_lag: usize,
    /// Ceiling of the false-nearest-neighbour dimension scan.
    pub d_max: usize,
    /// Poisson tail mass dropped per field when truncating.
    pub tail_eps: f64,
    /// Root of the output tree.
    pub output_dir: PathBuf,
    /// Series cache directory; `None` defers to the `RECNETQ_CACHE_DIR`
    /// environment variable and then to `<output_dir>/cache`.
    pub cache_dir: Option<PathBuf>,
    /// Rayon worker count; 0 keeps the global default.
    pub workers: usize,
}

/// Table-style reference kappa values for the fine structure around the
/// clustering peak, kept exact so sweeps hit them without rounding.
const REFERENCE_KAPPAS: [f64; 7] = [0.0, 0.0012, 0.0032, 0.0033, 0.0034, 0.07, 0.1];
/// One-grid-step brackets around the per-`|alpha|^2` peak locations
/// (0.0066, 0.0033, 0.0024 for 20, 25, 30).
const PEAK_BRACKETS: [f64; 6] = [0.0023, 0.0024, 0.0025, 0.0065, 0.0066, 0.0067];

/// Default kappa grid: the reference values, the peak brackets for all three
/// standard `|alpha|^2`, plus 20 log-spaced points per decade over
/// [1e-3, 1e-1].
pub fn default_kappa_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = REFERENCE_KAPPAS
        .iter()
        .chain(PEAK_BRACKETS.iter())
        .copied()
        .collect();
    for k in 0..=40 {
        grid.push(10f64.powf(-3.0 + k as f64 / 20.0));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            alpha_sq: vec![25.0],
            kappa: default_kappa_grid(),
            chi: 5.0,
            short_grid: DEFAULT_SHORT_GRID,
            long_grid: DEFAULT_LONG_GRID,
            epsilon_resolution: crate::recnet::DEFAULT_EPSILON_RESOLUTION,
            epsilon_multipliers: vec![1.0, 1.2, 1.5, 2.0],
            mi_bins: 32,
            mi_max_lag: 100,
            d_max: 10,
            tail_eps: 1e-12,
            output_dir: PathBuf::from("recnetq-out"),
            cache_dir: None,
            workers: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        for &a in &self.alpha_sq {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "alpha_sq entries must be finite and non-negative, got {a}"
                )));
            }
        }
        for &k in &self.kappa {
            if !k.is_finite() || !(0.0..=1.0).contains(&k) {
                return Err(Error::InvalidParameter(format!(
                    "kappa entries must lie in [0, 1], got {k}"
                )));
            }
        }
        if !self.chi.is_finite() || self.chi <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "chi must be finite and positive, got {}",
                self.chi
            )));
        }
        self.short_grid.to_grid()?;
        self.long_grid.to_grid()?;
        if !self.epsilon_resolution.is_finite() || self.epsilon_resolution <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "epsilon_resolution must be positive, got {}",
                self.epsilon_resolution
            )));
        }
        match self.epsilon_multipliers.first() {
            Some(&first) if first == 1.0 => {}
            _ => {
                return Err(Error::InvalidParameter(
                    "epsilon_multipliers must start at 1.0 (the critical radius itself)".into(),
                ))
            }
        }
        if self
            .epsilon_multipliers
            .windows(2)
            .any(|w| !w[1].is_finite() || w[1] < w[0])
        {
            return Err(Error::InvalidParameter(
                "epsilon_multipliers must be finite and non-decreasing".into(),
            ));
        }
        if self.mi_bins < 2 {
            return Err(Error::InvalidParameter(
                "mi_bins must be at least 2".into(),
            ));
        }
        if self.mi_max_lag < 3 {
            return Err(Error::InvalidParameter(
                "mi_max_lag must be at least 3".into(),
            ));
        }
        if self.d_max == 0 {
            return Err(Error::InvalidParameter(
                "d_max must be positive".into(),
            ));
        }
        if !(1e-100..1.0).contains(&self.tail_eps) {
            return Err(Error::InvalidParameter(format!(
                "tail_eps must lie in [1e-100, 1), got {}",
                self.tail_eps
            )));
        }
        Ok(())
    }

    /// True when the long grid is the reference analysis window; recorded in
    /// sweep outputs so overridden runs are self-describing.
    pub fn long_grid_is_default(&self) -> bool {
        self.long_grid == DEFAULT_LONG_GRID
    }

    /// Effective cache directory: explicit config entry, else the
    /// `RECNETQ_CACHE_DIR` environment variable, else `<output_dir>/cache`.
    pub fn effective_cache_dir(&self) -> PathBuf {
        if let Some(dir) = &self.cache_dir {
            return dir.clone();
        }
        if let Ok(dir) = std::env::var("RECNETQ_CACHE_DIR") {
            if !dir.is_empty() {
                return PathBuf::from(dir);
            }
        }
        self.output_dir.join("cache")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid_and_round_trips() {
        let cfg = SweepConfig::default();
        cfg.validate().unwrap();
        let json = serde_json::to_string_pretty(&cfg).unwrap();
        let back: SweepConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn empty_object_deserializes_to_default() {
        let cfg: SweepConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, SweepConfig::default());
    }

    #[test]
    fn default_grid_contains_reference_and_bracket_values() {
        let grid = default_kappa_grid();
        for k in [0.0, 0.0012, 0.0032, 0.0033, 0.0034, 0.07, 0.1, 0.0023, 0.0024, 0.0025, 0.0065, 0.0066, 0.0067]
        {
            assert!(grid.contains(&k), "missing {k}");
        }
        assert!(grid.windows(2).all(|w| w[0] < w[1]), "sorted unique");
        // 20 points per decade over two decades.
        assert!(grid.iter().filter(|&&k| (1e-3..=1e-1).contains(&k)).count() >= 41);
    }

    #[test]
    fn validation_rejects_bad_fields() {
        let mut cfg = SweepConfig::default();
        cfg.kappa = vec![1.5];
        assert!(cfg.validate().is_err());

        let mut cfg = SweepConfig::default();
        cfg.epsilon_multipliers = vec![1.2, 1.5];
        assert!(cfg.validate().is_err());

        let mut cfg = SweepConfig::default();
        cfg.epsilon_multipliers = vec![1.0, 0.9];
        assert!(cfg.validate().is_err());

        let mut cfg = SweepConfig::default();
        cfg.chi = 0.0;
        assert!(cfg.validate().is_err());

        let mut cfg = SweepConfig::default();
        cfg.long_grid.count = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let err = serde_json::from_str::<SweepConfig>("{\"typo_field\": 3}");
        assert!(err.is_err());
    }

    #[test]
    fn cache_dir_resolution_precedence() {
        let mut cfg = SweepConfig::default();
        cfg.output_dir = PathBuf::from("/tmp/out");
        cfg.cache_dir = Some(PathBuf::from("/tmp/explicit"));
        assert_eq!(cfg.effective_cache_dir(), PathBuf::from("/tmp/explicit"));
        cfg.cache_dir = None;
        // Without the env var set, falls back to <output>/cache. The env-var
        // branch is exercised by the cache integration test to avoid
        // process-global state races here.
        if std::env::var("RECNETQ_CACHE_DIR").is_err() {
            assert_eq!(cfg.effective_cache_dir(), PathBuf::from("/tmp/out/cache"));
        }
    }
}
