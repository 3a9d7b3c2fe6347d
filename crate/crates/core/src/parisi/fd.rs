//! Explicit finite differences for the Parisi PDE, written in the variance
//! variable `v = ξ'(t)` so that each piece reads
//! `∂_v Ψ = -(1/2)(Ψ_xx + m Ψ_x²)`. Slow and only first-order in time; it
//! exists as an independent cross-check of the Cole–Hopf solver.

use super::{MixtureSpec, OrderParam};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdGrid {
    pub dx: f64,
    /// Fraction of the explicit stability limit used for the time step.
    pub courant: f64,
}

impl Default for FdGrid {
    fn default() -> Self {
        Self { dx: 0.02, courant: 0.4 }
    }
}

pub fn finite_difference_psi00(mu: &OrderParam, spec: &MixtureSpec, grid: &FdGrid) -> Result<f64> {
    if !(grid.dx > 0.0 && grid.courant > 0.0 && grid.courant <= 1.0) {
        return Err(Error::Grid("finite-difference grid needs dx > 0 and courant in (0, 1]".into()));
    }
    let drift: f64 = mu
        .intervals()
        .map(|(a, b, m)| m * (spec.xi_prime(b) - spec.xi_prime(a)))
        .sum();
    let half = 6.0 * spec.xi_prime(1.0).sqrt() + drift + 2.0;
    let n = (half / grid.dx).ceil() as usize;
    let dx = grid.dx;
    // nodes x_i = i dx, i = 0..=n; mirror at 0, unit slope past n
    let mut psi: Vec<f64> = (0..=n).map(|i| i as f64 * dx).collect();
    let mut next = psi.clone();
    let pieces: Vec<_> = mu.intervals().collect();
    for &(a, b, m) in pieces.iter().rev() {
        let span = spec.xi_prime(b) - spec.xi_prime(a);
        if span <= 0.0 {
            continue;
        }
        let dv_max = grid.courant * dx * dx / (1.0 + m * dx);
        let steps = (span / dv_max).ceil() as usize;
        let dv = span / steps as f64;
        for _ in 0..steps {
            for i in 0..=n {
                let left = if i == 0 { psi[1] } else { psi[i - 1] };
                let right = if i == n { psi[n] + dx } else { psi[i + 1] };
                let lap = (right - 2.0 * psi[i] + left) / (dx * dx);
                let grad = (right - left) / (2.0 * dx);
                next[i] = psi[i] + 0.5 * dv * (lap + m * grad * grad);
            }
            std::mem::swap(&mut psi, &mut next);
        }
    }
    Ok(psi[0])
}
