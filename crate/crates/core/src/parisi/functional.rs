use super::pde::{psi00, PdeGrid};
use super::{MixtureSpec, OrderParam};
use crate::error::Result;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValue {
    pub psi00: f64,
    pub penalty: f64,
    pub value: f64,
    pub spacing: f64,
    /// Richardson estimate `|Ψ_h - Ψ_{2h}| / 3` of the discretization error
    /// in `psi00` (the scheme is second order in `h`).
    pub grid_error: f64,
}

/// Penalty term for piecewise-constant `μ`, in closed form.
pub fn penalty(mu: &OrderParam, spec: &MixtureSpec) -> f64 {
    mu.intervals()
        .map(|(a, b, m)| 0.5 * m * (spec.penalty_primitive(b) - spec.penalty_primitive(a)))
        .sum()
}

/// `P(μ) = Ψ_μ(0, 0) - penalty`, with a grid-error diagnostic.
pub fn parisi_functional(mu: &OrderParam, spec: &MixtureSpec, grid: &PdeGrid) -> Result<FunctionalValue> {
    let fine = psi00(mu, spec, grid)?;
    let coarse = psi00(mu, spec, &grid.coarsened())?;
    let pen = penalty(mu, spec);
    Ok(FunctionalValue {
        psi00: fine,
        penalty: pen,
        value: fine - pen,
        spacing: grid.spacing,
        grid_error: (fine - coarse).abs() / 3.0,
    })
}

/// `P(μ)` without the diagnostic solve.
pub fn parisi_value(mu: &OrderParam, spec: &MixtureSpec, grid: &PdeGrid) -> Result<f64> {
    Ok(psi00(mu, spec, grid)? - penalty(mu, spec))
}
