use super::OverlapHistogram;
use serde::{Deserialize, Serialize};

/// Default minimum gap width, as a fraction of the metric's range.
pub const DEFAULT_MIN_WIDTH: f64 = 0.05;
/// Default largest mass tolerated inside a gap.
pub const DEFAULT_MASS_CEILING: f64 = 1e-3;

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub present: bool,
    pub nu1: Option<f64>,
    pub nu2: Option<f64>,
    pub mass_in_gap: f64,
    pub min_width: f64,
    pub mass_ceiling: f64,
}

/// Widest run of bins `(ν1, ν2)` with interior mass at most `mass_ceiling`,
/// width at least `min_width` (a fraction of the metric's range), and
/// positive mass on both sides.
///
/// Among equally wide candidates the one with less interior mass wins, then
/// the leftmost. Raising the ceiling only enlarges the candidate set, so a
/// gap once found is never lost.
pub fn detect_gap(hist: &OverlapHistogram, min_width: f64, mass_ceiling: f64) -> GapReport {
    let b = hist.bins();
    let mut prefix = vec![0.0; b + 1];
    for (i, m) in hist.masses.iter().enumerate() {
        prefix[i + 1] = prefix[i] + m;
    }
    let total = prefix[b];
    let (lo, hi) = hist.metric.range();
    let need = min_width * (hi - lo);
    let mut best: Option<(f64, f64, usize, usize)> = None;
    for i in 1..b {
        if prefix[i] <= EPS {
            continue;
        }
        for j in i..b - 1 {
            let inside = prefix[j + 1] - prefix[i];
            if inside > mass_ceiling + EPS {
                break;
            }
            if total - prefix[j + 1] <= EPS {
                break;
            }
            let width = hist.edges[j + 1] - hist.edges[i];
            if width + EPS < need {
                continue;
            }
            let better = match best {
                None => true,
                Some((w, m, _, _)) => width > w + EPS || ((width - w).abs() <= EPS && inside < m - EPS),
            };
            if better {
                best = Some((width, inside, i, j));
            }
        }
    }
    match best {
        Some((_, inside, i, j)) => GapReport {
            present: true,
            nu1: Some(hist.edges[i]),
            nu2: Some(hist.edges[j + 1]),
            mass_in_gap: inside.max(0.0),
            min_width,
            mass_ceiling,
        },
        None => GapReport {
            present: false,
            nu1: None,
            nu2: None,
            mass_in_gap: 0.0,
            min_width,
            mass_ceiling,
        },
    }
}
