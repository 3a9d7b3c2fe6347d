//! Standard normal helpers in log space.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

pub(crate) fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

pub(crate) fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `log Φ(x)`, accurate in both tails.
pub(crate) fn log_cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        0.0
    } else if x > 5.0 {
        (-0.5 * libm::erfc(x * FRAC_1_SQRT_2)).ln_1p()
    } else if x > -35.0 {
        (0.5 * libm::erfc(-x * FRAC_1_SQRT_2)).ln()
    } else if x == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        let r = 1.0 / (x * x);
        let series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
        -0.5 * x * x - (-x).ln() - LN_SQRT_2PI + series.ln()
    }
}

/// `log(1 - e^d)` for `d <= 0`.
pub(crate) fn log1mexp(d: f64) -> f64 {
    if d > -std::f64::consts::LN_2 {
        (-d.exp_m1()).ln()
    } else {
        (-d.exp()).ln_1p()
    }
}

/// `log(Φ(b) - Φ(a))` for `a < b`; either end may be infinite.
pub(crate) fn log_cdf_diff(a: f64, b: f64) -> f64 {
    debug_assert!(a <= b);
    if b == f64::INFINITY {
        log_cdf(-a)
    } else if a == f64::NEG_INFINITY {
        log_cdf(b)
    } else if a >= 0.0 {
        let hi = log_cdf(-a);
        hi + log1mexp(log_cdf(-b) - hi)
    } else if b <= 0.0 {
        let hi = log_cdf(b);
        hi + log1mexp(log_cdf(a) - hi)
    } else {
        (cdf(b) - cdf(a)).ln()
    }
}

/// Running `log Σ e^{v}`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogSum {
    max: f64,
    acc: f64,
}

impl LogSum {
    pub(crate) fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            acc: 0.0,
        }
    }

    pub(crate) fn add(&mut self, v: f64) {
        if v == f64::NEG_INFINITY {
            return;
        }
        if v <= self.max {
            self.acc += (v - self.max).exp();
        } else {
            self.acc = self.acc * (self.max - v).exp() + 1.0;
            self.max = v;
        }
    }

    pub(crate) fn value(&self) -> f64 {
        self.max + self.acc.ln()
    }
}

pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}
