use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which form of the penalty term enters the functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PenaltyForm {
    /// `(1/2) ∫ t ξ''(t) μ(t) dt`.
    #[default]
    Standard,
    /// `(1/2) ∫ ξ''(t) μ(t) dt`, kept for comparison only.
    Unweighted,
}

/// Covariance function `ξ(s) = Σ_k c_k s^k` of the mixed p-spin model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    coefficients: Vec<f64>,
    #[serde(default)]
    penalty: PenaltyForm,
}

impl MixtureSpec {
    /// `ξ(s) = s^p / p!`, the covariance of `n^{-(p+1)/2} Σ_{i1<…<ip} J σ…σ`.
    pub fn pure(p: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::param(format!("interaction order p = {p} must be >= 2")));
        }
        let fact: f64 = (2..=p).map(|i| i as f64).product();
        Self::from_coefficients(Self::single(p, 1.0 / fact))
    }

    /// `ξ(s) = s^p`.
    pub fn monomial(p: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::param(format!("interaction order p = {p} must be >= 2")));
        }
        Self::from_coefficients(Self::single(p, 1.0))
    }

    fn single(p: usize, c: f64) -> Vec<f64> {
        let mut v = vec![0.0; p + 1];
        v[p] = c;
        v
    }

    /// `coefficients[k]` multiplies `s^k`.
    pub fn from_coefficients(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::param("mixture coefficients must be finite and nonnegative"));
        }
        if coefficients.first().is_some_and(|&c| c != 0.0) {
            return Err(Error::param("xi(0) must be 0"));
        }
        if coefficients.iter().all(|&c| c == 0.0) {
            return Err(Error::param("mixture has no nonzero coefficient"));
        }
        let mut coefficients = coefficients;
        while coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        Ok(Self {
            coefficients,
            penalty: PenaltyForm::Standard,
        })
    }

    pub fn with_penalty(mut self, penalty: PenaltyForm) -> Self {
        self.penalty = penalty;
        self
    }

    pub fn penalty_form(&self) -> PenaltyForm {
        self.penalty
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Highest power with a nonzero coefficient.
    pub fn p(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn xi(&self, s: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    pub fn xi_prime(&self, s: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, c)| acc * s + k as f64 * c)
    }

    pub fn xi_second(&self, s: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .skip(2)
            .rev()
            .fold(0.0, |acc, (k, c)| acc * s + (k * (k - 1)) as f64 * c)
    }

    /// Antiderivative of the penalty integrand weight.
    pub(crate) fn penalty_primitive(&self, t: f64) -> f64 {
        match self.penalty {
            PenaltyForm::Standard => t * self.xi_prime(t) - self.xi(t),
            PenaltyForm::Unweighted => self.xi_prime(t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_finite_differences() {
        let m = MixtureSpec::from_coefficients(vec![0.0, 0.0, 0.5, 0.2, 0.0, 0.1]).unwrap();
        assert_eq!(m.p(), 5);
        let h = 1e-6;
        for &s in &[0.1, 0.5, 0.9] {
            let d1 = (m.xi(s + h) - m.xi(s - h)) / (2.0 * h);
            let d2 = (m.xi_prime(s + h) - m.xi_prime(s - h)) / (2.0 * h);
            assert!((d1 - m.xi_prime(s)).abs() < 1e-8);
            assert!((d2 - m.xi_second(s)).abs() < 1e-7);
        }
    }

    #[test]
    fn pure_and_monomial() {
        let m = MixtureSpec::pure(3).unwrap();
        assert!((m.xi(1.0) - 1.0 / 6.0).abs() < 1e-15);
        assert!((m.xi_prime(1.0) - 0.5).abs() < 1e-15);
        let m = MixtureSpec::monomial(4).unwrap();
        assert_eq!(m.xi_prime(1.0), 4.0);
        assert_eq!(m.xi_second(0.5), 12.0 * 0.25);
        assert!(MixtureSpec::pure(1).is_err());
        assert!(MixtureSpec::from_coefficients(vec![0.1, 0.0, 1.0]).is_err());
        assert!(MixtureSpec::from_coefficients(vec![0.0, 0.0, -1.0]).is_err());
    }

    #[test]
    fn penalty_primitive_integrates_weight() {
        let m = MixtureSpec::monomial(3).unwrap();
        // ∫_a^b t ξ''(t) dt by Simpson
        let (a, b) = (0.2, 0.7);
        let n = 1000;
        let h = (b - a) / n as f64;
        let f = |t: f64| t * m.xi_second(t);
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let simpson = s * h / 3.0;
        assert!((m.penalty_primitive(b) - m.penalty_primitive(a) - simpson).abs() < 1e-12);
    }
}
