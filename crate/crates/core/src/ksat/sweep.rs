use super::{dpll_solve, walksat};
use crate::error::{Error, Result};
use crate::instances::gen_ksat;
use crate::rng::RngStream;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SweepSolver {
    /// Complete search; instances exceeding the budget count as unsatisfied
    /// and are tallied in `budget_exceeded`.
    Dpll { node_budget: Option<u64> },
    WalkSat { max_flips: u64, noise: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatCurvePoint {
    pub density: f64,
    pub m: usize,
    pub trials: usize,
    pub satisfied: usize,
    pub sat_fraction: f64,
    pub budget_exceeded: usize,
    /// Mean DPLL nodes or WalkSAT flips per trial.
    pub mean_work: f64,
}

/// Empirical satisfiability curve of random K-SAT with `m = round(c n)`.
///
/// Trial `t` at grid index `i` uses the instance stream
/// `seed / "ksat/sweep" / c{i} / t{t}`, so results do not depend on thread
/// scheduling.
pub fn density_sweep(
    n: usize,
    k: usize,
    densities: &[f64],
    trials: usize,
    seed: u64,
    solver: SweepSolver,
) -> Result<Vec<SatCurvePoint>> {
    if trials == 0 {
        return Err(Error::param("sweep needs at least one trial"));
    }
    let root = RngStream::new(seed, "ksat/sweep");
    densities
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            if !(c.is_finite() && c >= 0.0) {
                return Err(Error::param(format!("density {c} must be finite and nonnegative")));
            }
            let m = (c * n as f64).round() as usize;
            let at = root.child(format!("c{i}"));
            let runs = (0..trials)
                .into_par_iter()
                .map(|t| -> Result<(bool, bool, u64)> {
                    let stream = at.child(format!("t{t}"));
                    let f = gen_ksat(n, m, k, &stream)?;
                    match solver {
                        SweepSolver::Dpll { node_budget } => match dpll_solve(&f, node_budget) {
                            Ok(out) => Ok((out.verdict.is_sat(), false, out.nodes)),
                            Err(Error::Budget { budget }) => Ok((false, true, budget)),
                            Err(e) => Err(e),
                        },
                        SweepSolver::WalkSat { max_flips, noise } => {
                            let out = walksat(&f, max_flips, noise, &stream.child("walksat"))?;
                            Ok((out.assignment.is_some(), false, out.flips))
                        }
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let satisfied = runs.iter().filter(|r| r.0).count();
            Ok(SatCurvePoint {
                density: c,
                m,
                trials,
                satisfied,
                sat_fraction: satisfied as f64 / trials as f64,
                budget_exceeded: runs.iter().filter(|r| r.1).count(),
                mean_work: runs.iter().map(|r| r.2 as f64).sum::<f64>() / trials as f64,
            })
        })
        .collect()
}

/// Density where the curve first drops to one half, by linear
/// interpolation between grid points. `None` if it never does.
pub fn sat_crossing(points: &[SatCurvePoint]) -> Option<f64> {
    let first = points.first()?;
    if first.sat_fraction <= 0.5 {
        return (first.sat_fraction == 0.5).then_some(first.density);
    }
    points.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        (b.sat_fraction <= 0.5).then(|| {
            let s = (a.sat_fraction - 0.5) / (a.sat_fraction - b.sat_fraction);
            a.density + s * (b.density - a.density)
        })
    })
}

pub fn curve_csv(points: &[SatCurvePoint]) -> String {
    let mut s = String::from("density,m,trials,satisfied,sat_fraction,budget_exceeded,mean_work\n");
    for p in points {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.density, p.m, p.trials, p.satisfied, p.sat_fraction, p.budget_exceeded, p.mean_work
        ));
    }
    s
}
