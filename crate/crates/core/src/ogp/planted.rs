use super::{detect_gap, GapReport, Metric, OverlapHistogram};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Synthetic calibration of [`detect_gap`] on histograms with a known gap.
///
/// A positive case draws a gap `(a, a + w)` with `w` uniform in
/// `gap_widths`, puts each of two modes uniformly on a stretch of length
/// `mode_width` against either side, and scatters a noise fraction uniform
/// in `[0, mass_ceiling]` inside the gap. A negative case spreads all mass
/// uniformly over a random stretch of length one half.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlantedSuiteConfig {
    pub cases: usize,
    pub samples: usize,
    pub bins: usize,
    pub gap_widths: (f64, f64),
    pub mode_width: f64,
    /// Every `negative_every`-th case has no gap; 0 disables negatives.
    pub negative_every: usize,
    pub min_width: f64,
    pub mass_ceiling: f64,
}

impl Default for PlantedSuiteConfig {
    fn default() -> Self {
        Self {
            cases: 400,
            samples: 20_000,
            bins: 100,
            gap_widths: (0.05, 0.4),
            mode_width: 0.1,
            negative_every: 4,
            min_width: 0.03,
            mass_ceiling: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedCase {
    pub index: usize,
    pub planted: Option<(f64, f64)>,
    pub noise_mass: f64,
    pub report: GapReport,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedSuiteReport {
    pub config: PlantedSuiteConfig,
    pub cases: Vec<PlantedCase>,
    pub correct: usize,
    pub accuracy: f64,
}

/// A detection is correct when a planted gap is found with both ends
/// within one bin of the truth, or when no gap is reported for a negative
/// case.
pub fn planted_gap_suite(config: &PlantedSuiteConfig, rng: &RngStream) -> Result<PlantedSuiteReport> {
    let c = config;
    let (w_lo, w_hi) = c.gap_widths;
    if c.cases == 0 || c.samples == 0 || c.bins == 0 {
        return Err(Error::param("cases, samples and bins must be positive"));
    }
    if !(0.0 < w_lo && w_lo <= w_hi && w_hi + 2.0 * c.mode_width <= 1.0) {
        return Err(Error::param("gap widths and mode width do not fit in [0, 1]"));
    }
    let h = 1.0 / c.bins as f64;
    let mut cases = Vec::with_capacity(c.cases);
    for index in 0..c.cases {
        let mut r = rng.child(format!("case{index}")).rng();
        let negative = c.negative_every > 0 && index % c.negative_every == c.negative_every - 1;
        let mut values = Vec::with_capacity(c.samples);
        let (planted, noise_mass) = if negative {
            let u = r.random_range(0.0..0.5);
            values.extend((0..c.samples).map(|_| u + 0.5 * r.random::<f64>()));
            (None, 0.0)
        } else {
            let w = r.random_range(w_lo..=w_hi);
            let a = r.random_range(c.mode_width..=1.0 - c.mode_width - w);
            let b = a + w;
            let noise = (r.random_range(0.0..=c.mass_ceiling) * c.samples as f64).floor() as usize;
            let left_frac = r.random_range(0.3..0.7);
            let rest = c.samples - noise;
            let left = (left_frac * rest as f64).round() as usize;
            for _ in 0..left {
                values.push(a - c.mode_width * r.random::<f64>());
            }
            for _ in left..rest {
                values.push(b + c.mode_width * r.random::<f64>());
            }
            for _ in 0..noise {
                values.push(r.random_range(a..b));
            }
            (Some((a, b)), noise as f64 / c.samples as f64)
        };
        let hist = OverlapHistogram::from_values(Metric::Hamming, &values, c.bins)?;
        let report = detect_gap(&hist, c.min_width, c.mass_ceiling);
        let correct = match (planted, report.nu1, report.nu2) {
            (Some((a, b)), Some(x), Some(y)) => (x - a).abs() <= h + 1e-9 && (y - b).abs() <= h + 1e-9,
            (Some(_), _, _) => false,
            (None, _, _) => !report.present,
        };
        cases.push(PlantedCase {
            index,
            planted,
            noise_mass,
            report,
            correct,
        });
    }
    let correct = cases.iter().filter(|c| c.correct).count();
    Ok(PlantedSuiteReport {
        config: config.clone(),
        accuracy: correct as f64 / cases.len() as f64,
        cases,
        correct,
    })
}
