//! Random K-SAT: clause evaluation, exact and local-search solvers,
//! solution enumeration, first-moment curves and density sweeps.

mod dimacs;
mod dpll;
mod enumerate;
mod moments;
mod sweep;
mod walksat;

pub use dimacs::{parse_dimacs, to_dimacs};
pub use dpll::{dpll_solve, DpllOutcome, Verdict};
pub use enumerate::{count_solutions, enumerate_solutions, enumerate_solutions_with_limit, ENUMERATION_CAP, DEFAULT_SOLUTION_LIMIT};
pub use moments::{first_moment_crossing, sat_moment_curve, SatMomentCurve};
pub use sweep::{curve_csv, density_sweep, sat_crossing, SatCurvePoint, SweepSolver};
pub use walksat::{walksat, WalkSatOutcome};

use crate::bits::BitConfig;
use crate::error::{Error, Result};
use crate::instances::KSatFormula;

/// A truth assignment; bit `i` is the value of `x_{i+1}`.
pub type Assignment = BitConfig;

fn check_len(f: &KSatFormula, a: &Assignment) -> Result<()> {
    if a.len() != f.n() {
        return Err(Error::param(format!("assignment has {} variables, formula has {}", a.len(), f.n())));
    }
    Ok(())
}

/// Number of clauses satisfied by `a`.
pub fn eval_clauses(f: &KSatFormula, a: &Assignment) -> Result<usize> {
    check_len(f, a)?;
    Ok(f.clauses()
        .iter()
        .filter(|c| c.iter().any(|l| l.is_true_under(a.get(l.var as usize))))
        .count())
}

pub fn is_satisfying(f: &KSatFormula, a: &Assignment) -> Result<bool> {
    Ok(eval_clauses(f, a)? == f.m())
}
