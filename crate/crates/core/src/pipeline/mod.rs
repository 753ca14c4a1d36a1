//! End-to-end orchestration: configuration, cached series, per-cell runs,
//! sweeps, summary tables, and the artifact manifest.
//!
//! Determinism contract: given one config, results are identical across
//! reruns (warm or cold cache) and across worker counts. Artifacts therefore
//! carry no timestamps or timings; stage timing, when wanted, is logged to
//! stderr by the CLI.

mod cache;
mod cell;
mod config;
mod short;
mod sweep;

pub use cache::{file_sha256, load_or_compute, read_series, write_series, SeriesSpec};
pub use cell::{
    cell_dir, run_cell, run_cell_with_artifacts, write_cell_artifacts, CellResult,
    EpsilonScanPoint, OCCUPANCY_GRID,
};
pub use config::{
    default_kappa_grid, GridSpec, SweepConfig, DEFAULT_LONG_GRID, DEFAULT_SHORT_GRID,
};
pub use short::{
    short_time_report, ShortTimeClass, ShortTimeReport, WindowStat, COLLAPSED_REL_SIGMA_MAX,
    MID_RANGE, SPREAD_REL_SIGMA_MIN, WINDOW_RANGE, WINDOW_WIDTH,
};
pub use sweep::{run_sweep, FailedCell, PeakRow, SummaryRow, SweepSummary};
