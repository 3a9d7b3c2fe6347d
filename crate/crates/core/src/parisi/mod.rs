//! Zero-temperature Parisi functional.
//!
//! For a covariance `ξ` and a nonnegative order parameter `μ` on `[0, 1]`,
//! `P(μ) = Ψ_μ(0, 0) - (1/2) ∫ t ξ''(t) μ(t) dt` where `Ψ_μ` solves the
//! Parisi PDE with `Ψ(1, x) = |x|`. The infimum over nondecreasing `μ`
//! (class U) is the ground-state energy of the mixed p-spin model; the
//! infimum over `μ` of bounded total variation (class L) is the value reached
//! by incremental message-passing algorithms.

mod fd;
mod functional;
mod mixture;
mod normal;
mod optimize;
mod order;
mod pde;

pub use fd::{finite_difference_psi00, FdGrid};
pub use functional::{parisi_functional, parisi_value, penalty, FunctionalValue};
pub use mixture::{MixtureSpec, PenaltyForm};
pub use optimize::{
    minimize_functional, minimize_paired, Evaluation, LadderStep, Minimum, OptimizerConfig, OptimizerTrace,
    PairedMinimum, ATOM_TIE,
};
pub use order::{OrderParam, ParamClass};
pub use pde::{psi00, solve_parisi_pde, PdeGrid, PdeSolution, Profile, DEFAULT_SPACING};

/// Convergence table `(h, psi00)` over successive halvings of the spacing.
pub fn convergence_table(mu: &OrderParam, spec: &MixtureSpec, grid: &PdeGrid, levels: usize) -> crate::Result<Vec<(f64, f64)>> {
    let mut g = *grid;
    let mut out = Vec::with_capacity(levels);
    for _ in 0..levels {
        out.push((g.spacing, psi00(mu, spec, &g)?));
        g = g.refined();
    }
    Ok(out)
}

pub fn convergence_csv(rows: &[(f64, f64)]) -> String {
    let mut s = String::from("h,psi00\n");
    for (h, v) in rows {
        s.push_str(&format!("{h},{v}\n"));
    }
    s
}
