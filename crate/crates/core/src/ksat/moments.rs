use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Natural-log expected solution count of random K-SAT on a density grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatMomentCurve {
    pub n: usize,
    pub k: usize,
    /// `(density, m, ln E[#solutions])` with `m = round(c n)`.
    pub points: Vec<(f64, usize, f64)>,
    /// Density at which the expected count equals one.
    pub crossing: f64,
}

fn log_clause_prob(k: usize) -> f64 {
    // ln(1 - 2^-K)
    (-(0.5f64).powi(k as i32)).ln_1p()
}

/// `ln 2 / (-ln(1 - 2^-K))`.
pub fn first_moment_crossing(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::param("K must be at least 1"));
    }
    Ok(std::f64::consts::LN_2 / -log_clause_prob(k))
}

pub fn sat_moment_curve(n: usize, k: usize, densities: &[f64]) -> Result<SatMomentCurve> {
    let crossing = first_moment_crossing(k)?;
    let lp = log_clause_prob(k);
    let mut points = Vec::with_capacity(densities.len());
    for &c in densities {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::param(format!("density {c} must be finite and nonnegative")));
        }
        let m = (c * n as f64).round() as usize;
        points.push((c, m, n as f64 * std::f64::consts::LN_2 + m as f64 * lp));
    }
    Ok(SatMomentCurve { n, k, points, crossing })
}

impl SatMomentCurve {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("density,m,ln_expected_solutions\n");
        for (c, m, y) in &self.points {
            s.push_str(&format!("{c},{m},{y}\n"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_clauses_gives_two_to_the_n() {
        let c = sat_moment_curve(20, 3, &[0.0]).unwrap();
        assert_eq!(c.points[0].1, 0);
        assert!((c.points[0].2 - 20.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn k3_crossing() {
        let c = first_moment_crossing(3).unwrap();
        assert!((c - 5.191).abs() < 1e-3, "{c}");
        // E = 1 exactly at the crossing
        let n = 1000;
        let y = n as f64 * 2f64.ln() + c * n as f64 * (7.0f64 / 8.0).ln();
        assert!(y.abs() < 1e-9);
    }

    #[test]
    fn large_k_ratio_approaches_one() {
        let ratios: Vec<f64> = (3..=12)
            .map(|k| first_moment_crossing(k).unwrap() / (2f64.powi(k as i32) * 2f64.ln()))
            .collect();
        for w in ratios.windows(2) {
            assert!(w[1] > w[0] && w[1] < 1.0);
            assert!((w[1] - 1.0).abs() < (w[0] - 1.0).abs());
        }
        assert!((ratios.last().unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn curve_is_decreasing_and_changes_sign_at_crossing() {
        let grid: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        let c = sat_moment_curve(400, 3, &grid).unwrap();
        for w in c.points.windows(2) {
            assert!(w[1].2 <= w[0].2);
        }
        for (d, _, y) in &c.points {
            if *d < c.crossing - 0.01 {
                assert!(*y > 0.0);
            } else if *d > c.crossing + 0.01 {
                assert!(*y < 0.0);
            }
        }
        assert!(first_moment_crossing(0).is_err());
    }
}
