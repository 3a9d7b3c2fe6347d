use super::{Metric, NearOptimumSet};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Pair count above which pairs are subsampled uniformly.
pub const PAIR_CAP: usize = 1 << 20;

/// Normalized histogram of a metric over pairs of configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapHistogram {
    pub metric: Metric,
    /// `bins + 1` edges spanning the metric's range.
    pub edges: Vec<f64>,
    pub masses: Vec<f64>,
    pub samples: usize,
}

impl OverlapHistogram {
    /// Histogram of `values` over the metric's range. The top edge belongs
    /// to the last bin.
    pub fn from_values(metric: Metric, values: &[f64], bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::param("histogram needs at least one bin"));
        }
        if values.is_empty() {
            return Err(Error::InsufficientData("histogram of no values".into()));
        }
        let (lo, hi) = metric.range();
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
        let mut counts = vec![0u64; bins];
        for &v in values {
            // tolerate rounding just outside the range
            if !(v >= lo - 1e-9 && v <= hi + 1e-9) {
                return Err(Error::param(format!("value {v} outside metric range [{lo}, {hi}]")));
            }
            let b = (((v - lo) * bins as f64 / (hi - lo)).floor().max(0.0) as usize).min(bins - 1);
            counts[b] += 1;
        }
        let total = values.len() as f64;
        Ok(Self {
            metric,
            edges,
            masses: counts.iter().map(|&c| c as f64 / total).collect(),
            samples: values.len(),
        })
    }

    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn mean(&self) -> f64 {
        self.masses
            .iter()
            .zip(self.edges.windows(2))
            .map(|(m, e)| m * 0.5 * (e[0] + e[1]))
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("lo,hi,mass\n");
        for (m, e) in self.masses.iter().zip(self.edges.windows(2)) {
            s.push_str(&format!("{},{},{}\n", e[0], e[1], m));
        }
        s
    }
}

/// Metric values over all unordered pairs of the set, or over a uniform
/// sample of [`PAIR_CAP`] pairs (with replacement) when there are more.
pub fn pair_values(set: &NearOptimumSet, metric: Metric) -> Result<Vec<f64>> {
    let s = &set.solutions;
    let k = s.len();
    if k < 2 {
        return Err(Error::InsufficientData(format!("overlap histogram needs 2 solutions, set has {k}")));
    }
    let pairs = k * (k - 1) / 2;
    if pairs <= PAIR_CAP {
        let mut out = Vec::with_capacity(pairs);
        for a in 0..k {
            for b in a + 1..k {
                out.push(metric.eval(&s[a], &s[b]));
            }
        }
        return Ok(out);
    }
    let mut r = RngStream::new(0, format!("ogp/pairs/{}", set.instance_hash)).rng();
    Ok((0..PAIR_CAP)
        .map(|_| {
            let a = r.random_range(0..k);
            let mut b = r.random_range(0..k - 1);
            if b >= a {
                b += 1;
            }
            metric.eval(&s[a], &s[b])
        })
        .collect())
}

pub fn overlap_histogram(set: &NearOptimumSet, metric: Metric, bins: usize) -> Result<OverlapHistogram> {
    OverlapHistogram::from_values(metric, &pair_values(set, metric)?, bins)
}
