//! Short-time characterization of `<N1>(tau)`: windowed statistics over the
//! collapse region and a three-way regime classification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::MeanPhotonSeries;

/// Windowed standard deviations are reported over this range...
pub const WINDOW_RANGE: (f64, f64) = (3000.0, 9000.0);
/// ...in windows of this width.
pub const WINDOW_WIDTH: f64 = 500.0;
/// The headline spread statistic is taken over this sub-range.
pub const MID_RANGE: (f64, f64) = (4000.0, 8000.0);

/// Classification thresholds on `sigma_mid / alpha_sq` (scale-free in the
/// field intensity). Frozen from a calibration run of the reference regime
/// (chi = 5, |alpha|^2 = 25, production grids), which gave three clusters of
/// the relative spread: 4.8e-6 at kappa = 0 and 3.3e-5 at 0.0012 (collapsed);
/// 1.5e-4 to 2.1e-4 for kappa in {0.002, 0.005, 0.07, 0.1} (pinched); and
/// 5.2e-4 to 5.3e-4 across the 0.0032..0.0034 bracket (spread). Each
/// threshold is the geometric mean of the flanking cluster edges, leaving a
/// factor ~1.6-2.4 margin on both sides.
pub const COLLAPSED_REL_SIGMA_MAX: f64 = 8.0e-5;
pub const SPREAD_REL_SIGMA_MIN: f64 = 3.3e-4;

/// Qualitative short-time regime of the mean photon number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShortTimeClass {
    /// Near-constant plateau over the window (oscillation collapse).
    Collapsed,
    /// Intermediate spread: structure present but pinched.
    Pinched,
    /// Large sustained spread of values across the window.
    Spread,
}

/// Mean/std over one window of the series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowStat {
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
    pub mean: f64,
    pub std: f64,
}

/// Short-time summary of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShortTimeReport {
    /// Standard deviation of the series over [`MID_RANGE`].
    pub sigma_mid: f64,
    /// Mean over the same range.
    pub mean_mid: f64,
    /// `sigma_mid` normalized by `|alpha|^2` (the classification statistic).
    pub relative_sigma_mid: f64,
    /// Per-window statistics over [`WINDOW_RANGE`] in [`WINDOW_WIDTH`] steps.
    pub windows: Vec<WindowStat>,
    pub class: ShortTimeClass,
}

fn stats_over(series: &MeanPhotonSeries, lo: f64, hi: f64) -> Result<(usize, f64, f64)> {
    let mut count = 0usize;
    let mut mean = 0.0;
    for (k, &v) in series.values.iter().enumerate() {
        let t = series.tau(k);
        if t >= lo && t < hi {
            count += 1;
            mean += v;
        }
    }
    if count < 2 {
        return Err(Error::InvalidParameter(format!(
            "window [{lo}, {hi}) holds {count} samples; the grid does not cover it"
        )));
    }
    mean /= count as f64;
    let mut var = 0.0;
    for (k, &v) in series.values.iter().enumerate() {
        let t = series.tau(k);
        if t >= lo && t < hi {
            var += (v - mean) * (v - mean);
        }
    }
    Ok((count, mean, (var / count as f64).sqrt()))
}

/// Computes the windowed statistics and classifies the regime.
///
/// The grid must cover the window range; `alpha_sq` normalizes the spread
/// statistic so one threshold set serves every field intensity.
pub fn short_time_report(series: &MeanPhotonSeries, alpha_sq: f64) -> Result<ShortTimeReport> {
    if alpha_sq <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "short-time classification needs alpha_sq > 0, got {alpha_sq}"
        )));
    }
    let mut windows = Vec::new();
    let mut start = WINDOW_RANGE.0;
    while start < WINDOW_RANGE.1 - 1e-9 {
        let end = (start + WINDOW_WIDTH).min(WINDOW_RANGE.1);
        let (samples, mean, std) = stats_over(series, start, end)?;
        windows.push(WindowStat {
            t_start: start,
            t_end: end,
            samples,
            mean,
            std,
        });
        start = end;
    }
    // Half-open [lo, hi + dt) realizes a closed [lo, hi] sample range.
    let (_, mean_mid, sigma_mid) =
        stats_over(series, MID_RANGE.0, MID_RANGE.1 + series.dt * 0.5)?;
    let relative = sigma_mid / alpha_sq;
    let class = if relative < COLLAPSED_REL_SIGMA_MAX {
        ShortTimeClass::Collapsed
    } else if relative > SPREAD_REL_SIGMA_MIN {
        ShortTimeClass::Spread
    } else {
        ShortTimeClass::Pinched
    };
    Ok(ShortTimeReport {
        sigma_mid,
        mean_mid,
        relative_sigma_mid: relative,
        windows,
        class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series_from_fn(f: impl Fn(f64) -> f64) -> MeanPhotonSeries {
        let dt = 0.5;
        let count = 20001;
        let values = (0..count).map(|k| f(k as f64 * dt)).collect();
        MeanPhotonSeries {
            t0: 0.0,
            dt,
            values,
        }
    }

    #[test]
    fn constant_series_is_collapsed() {
        let s = series_from_fn(|_| 25.0);
        let report = short_time_report(&s, 25.0).unwrap();
        assert_eq!(report.class, ShortTimeClass::Collapsed);
        assert!(report.sigma_mid < 1e-12);
        assert_eq!(report.windows.len(), 12);
        for w in &report.windows {
            assert_eq!(w.samples, 1000);
            assert!((w.mean - 25.0).abs() < 1e-12);
        }
    }

    #[test]
    fn large_oscillation_is_spread() {
        // Amplitude 0.02 around 25: sigma ~ 0.014, relative ~ 5.7e-4.
        let s = series_from_fn(|t| 25.0 + 0.02 * (0.37 * t).sin());
        let report = short_time_report(&s, 25.0).unwrap();
        assert_eq!(report.class, ShortTimeClass::Spread);
        assert!((report.sigma_mid - 0.02 / std::f64::consts::SQRT_2).abs() < 4e-4);
    }

    #[test]
    fn moderate_oscillation_is_pinched() {
        // Amplitude 0.005: sigma ~ 0.0035, relative ~ 1.4e-4.
        let s = series_from_fn(|t| 25.0 + 0.005 * (0.37 * t).sin());
        let report = short_time_report(&s, 25.0).unwrap();
        assert_eq!(report.class, ShortTimeClass::Pinched);
    }

    #[test]
    fn small_ripple_is_collapsed() {
        // Amplitude 1e-3: relative ~ 2.8e-5, inside the collapsed band.
        let s = series_from_fn(|t| 25.0 + 1e-3 * (0.37 * t).sin());
        let report = short_time_report(&s, 25.0).unwrap();
        assert_eq!(report.class, ShortTimeClass::Collapsed);
    }

    #[test]
    fn class_thresholds_are_ordered() {
        assert!(COLLAPSED_REL_SIGMA_MAX > 0.0);
        assert!(COLLAPSED_REL_SIGMA_MAX < SPREAD_REL_SIGMA_MIN);
    }

    #[test]
    fn window_statistics_match_direct_computation() {
        let s = series_from_fn(|t| t);
        let report = short_time_report(&s, 25.0).unwrap();
        // Window [3000, 3500): ramp mean is the midpoint minus half a step.
        let w = &report.windows[0];
        assert_eq!((w.t_start, w.t_end), (3000.0, 3500.0));
        assert!((w.mean - (3000.0 + 3499.5) / 2.0).abs() < 1e-9);
        // Uniform grid over [a, b): std = width * sqrt((n^2-1)/12)/n with
        // width the sample spacing; for 1000 samples of spacing 0.5 this is
        // ~ 144.337.
        let n = 1000.0f64;
        let expect = 0.5 * ((n * n - 1.0) / 12.0).sqrt();
        assert!((w.std - expect).abs() < 1e-9, "{} vs {expect}", w.std);
    }

    #[test]
    fn grid_not_covering_window_errors() {
        let s = MeanPhotonSeries {
            t0: 0.0,
            dt: 1.0,
            values: vec![1.0; 100],
        };
        assert!(short_time_report(&s, 25.0).is_err());
    }
}
