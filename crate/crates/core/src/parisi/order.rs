use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

const TV_SLACK: f64 = 1e-9;

/// Constraint class of an order parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum ParamClass {
    /// Nonnegative and nondecreasing.
    U,
    /// Nonnegative with total variation at most `tv_budget`.
    L { tv_budget: f64 },
}

impl ParamClass {
    pub fn name(&self) -> &'static str {
        match self {
            ParamClass::U => "U",
            ParamClass::L { .. } => "L",
        }
    }
}

/// Piecewise-constant, right-continuous `μ` on `[0, 1]`.
///
/// `values[j]` holds on `(breakpoints[j], breakpoints[j + 1]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderParam {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    class: ParamClass,
}

impl OrderParam {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, class: ParamClass) -> Result<Self> {
        if values.is_empty() || breakpoints.len() != values.len() + 1 {
            return Err(Error::param(format!(
                "{} breakpoints do not bound {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::param("breakpoints must start at 0 and end at 1"));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::param("breakpoints must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::param("order parameter values must be finite and nonnegative"));
        }
        let out = Self {
            breakpoints,
            values,
            class,
        };
        out.check_class()?;
        Ok(out)
    }

    fn check_class(&self) -> Result<()> {
        match self.class {
            ParamClass::U => {
                if self.values.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::param("class U order parameter must be nondecreasing"));
                }
            }
            ParamClass::L { tv_budget } => {
                if !(tv_budget >= 0.0) {
                    return Err(Error::param("total-variation budget must be nonnegative"));
                }
                let tv = self.total_variation();
                if tv > tv_budget * (1.0 + TV_SLACK) + TV_SLACK {
                    return Err(Error::param(format!("total variation {tv} exceeds budget {tv_budget}")));
                }
            }
        }
        Ok(())
    }

    /// `μ ≡ 0`.
    pub fn zero() -> Self {
        Self {
            breakpoints: vec![0.0, 1.0],
            values: vec![0.0],
            class: ParamClass::U,
        }
    }

    pub fn constant(m: f64, class: ParamClass) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![m], class)
    }

    /// `μ = 0` on `[0, q_1]` and `m_j` on `(q_j, q_{j+1}]` with `q_{k+1} = 1`.
    ///
    /// `q` must be nondecreasing in `[0, 1]`; empty intervals are dropped and
    /// equal neighbours merged.
    pub fn from_atoms(q: &[f64], m: &[f64], class: ParamClass) -> Result<Self> {
        if q.len() != m.len() {
            return Err(Error::param("atom locations and values differ in length"));
        }
        if q.iter().any(|t| !(0.0..=1.0).contains(t)) || q.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::param("atom locations must be nondecreasing in [0, 1]"));
        }
        let mut edges = vec![0.0];
        edges.extend_from_slice(q);
        edges.push(1.0);
        let mut vals = vec![0.0];
        vals.extend_from_slice(m);
        let mut bps = vec![0.0];
        let mut out_vals: Vec<f64> = Vec::new();
        for (j, &v) in vals.iter().enumerate() {
            let (a, b) = (edges[j], edges[j + 1]);
            if b <= a {
                continue;
            }
            if out_vals.last() == Some(&v) {
                *bps.last_mut().unwrap() = b;
            } else {
                out_vals.push(v);
                bps.push(b);
            }
        }
        Self::new(bps, out_vals, class)
    }

    /// Inverse of [`OrderParam::from_atoms`]: locations and values of the
    /// pieces after an initial zero piece (if any).
    pub fn atoms(&self) -> (Vec<f64>, Vec<f64>) {
        let mut q = Vec::new();
        let mut m = Vec::new();
        for (j, &v) in self.values.iter().enumerate() {
            if j == 0 && v == 0.0 {
                continue;
            }
            q.push(self.breakpoints[j]);
            m.push(v);
        }
        (q, m)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn class(&self) -> ParamClass {
        self.class
    }

    pub fn with_class(&self, class: ParamClass) -> Result<Self> {
        Self::new(self.breakpoints.clone(), self.values.clone(), class)
    }

    /// `(t_start, t_end, value)` for each piece.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(j, &v)| (self.breakpoints[j], self.breakpoints[j + 1], v))
    }

    pub fn value_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.values[0];
        }
        let j = self.breakpoints.partition_point(|&b| b < t);
        self.values[(j.max(1) - 1).min(self.values.len() - 1)]
    }

    /// Total variation of `μ` extended by 0 to the left of `t = 0`.
    pub fn total_variation(&self) -> f64 {
        let mut prev = 0.0;
        let mut tv = 0.0;
        for &v in &self.values {
            tv += (v - prev).abs();
            prev = v;
        }
        tv
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Jumps `(t, μ(t+) - μ(t-))`, including the one at `t = 0` from zero.
    pub fn jumps(&self) -> Vec<(f64, f64)> {
        let mut prev = 0.0;
        let mut out = Vec::new();
        for (j, &v) in self.values.iter().enumerate() {
            if v != prev {
                out.push((self.breakpoints[j], v - prev));
            }
            prev = v;
        }
        out
    }

    /// Smallest `t` with `μ(t) > 0`, if any.
    pub fn support_start(&self) -> Option<f64> {
        self.values.iter().position(|&v| v > 0.0).map(|j| self.breakpoints[j])
    }

    /// Maximal sub-intervals of `[support_start, 1]` where `μ` is flat,
    /// i.e. where the measure `dμ` has no mass. For a monotone `μ` with
    /// k jumps these are the k - 1 gaps between jump locations plus the
    /// tail to 1.
    pub fn flat_stretches(&self) -> Vec<(f64, f64)> {
        let jumps = self.jumps();
        let mut out = Vec::new();
        for w in jumps.windows(2) {
            out.push((w[0].0, w[1].0));
        }
        if let Some(&(t, _)) = jumps.last() {
            if t < 1.0 {
                out.push((t, 1.0));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(OrderParam::new(vec![0.0, 0.5, 1.0], vec![1.0, 0.5], ParamClass::U).is_err());
        assert!(OrderParam::new(vec![0.0, 0.5, 1.0], vec![1.0, 0.5], ParamClass::L { tv_budget: 2.0 }).is_ok());
        assert!(OrderParam::new(vec![0.0, 0.5, 1.0], vec![1.0, 0.5], ParamClass::L { tv_budget: 1.4 }).is_err());
        assert!(OrderParam::new(vec![0.0, 0.5, 0.5, 1.0], vec![0.0, 1.0, 2.0], ParamClass::U).is_err());
        assert!(OrderParam::new(vec![0.1, 1.0], vec![1.0], ParamClass::U).is_err());
        assert!(OrderParam::new(vec![0.0, 1.0], vec![-1.0], ParamClass::U).is_err());
    }

    #[test]
    fn atoms_round_trip_and_merge() {
        let mu = OrderParam::from_atoms(&[0.2, 0.5, 0.5], &[1.0, 3.0, 4.0], ParamClass::U).unwrap();
        assert_eq!(mu.breakpoints(), &[0.0, 0.2, 0.5, 1.0]);
        assert_eq!(mu.values(), &[0.0, 1.0, 4.0]);
        let (q, m) = mu.atoms();
        let back = OrderParam::from_atoms(&q, &m, ParamClass::U).unwrap();
        assert_eq!(back, mu);

        let mu = OrderParam::from_atoms(&[0.0, 0.3], &[2.0, 2.0], ParamClass::U).unwrap();
        assert_eq!(mu.values(), &[2.0]);
        assert_eq!(OrderParam::from_atoms(&[], &[], ParamClass::U).unwrap(), OrderParam::zero());
    }

    #[test]
    fn value_lookup_is_right_continuous_on_pieces() {
        let mu = OrderParam::new(vec![0.0, 0.4, 1.0], vec![1.0, 2.0], ParamClass::U).unwrap();
        assert_eq!(mu.value_at(0.0), 1.0);
        assert_eq!(mu.value_at(0.4), 1.0);
        assert_eq!(mu.value_at(0.41), 2.0);
        assert_eq!(mu.value_at(1.0), 2.0);
    }

    #[test]
    fn tv_jumps_and_flat_stretches() {
        let mu = OrderParam::new(vec![0.0, 0.2, 0.6, 1.0], vec![0.0, 3.0, 1.0], ParamClass::L { tv_budget: 10.0 }).unwrap();
        assert_eq!(mu.total_variation(), 5.0);
        assert_eq!(mu.jumps(), vec![(0.2, 3.0), (0.6, -2.0)]);
        assert_eq!(mu.support_start(), Some(0.2));
        assert_eq!(mu.flat_stretches(), vec![(0.2, 0.6), (0.6, 1.0)]);
        assert_eq!(OrderParam::zero().support_start(), None);
    }
}
