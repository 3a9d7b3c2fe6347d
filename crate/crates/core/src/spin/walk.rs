//! Incremental walk from the centre of the cube to a corner.
//!
//! Each step moves by `(δ/√n) u`, where `u` is the unit vector along the
//! gradient of the multilinear extension with its component along the
//! previous step removed. Coordinates that reach the boundary are frozen at
//! their sign. A step is truncated at the first boundary crossing and halved
//! until the energy does not decrease, so the energy trace is monotone.

use super::{Hamiltonian, RelaxedConfig, SpinConfig};
use crate::error::Error;
use crate::instances::GaussianTensor;
use crate::rng::RngStream;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

const FREEZE_EPS: f64 = 1e-12;
const STALL_FACTOR: f64 = 1e-10;
const ENERGY_SLACK: f64 = 1e-12;
const MAX_HALVINGS: usize = 60;
const KICK_TRIES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orthogonalize {
    /// Only against the immediately preceding step.
    Previous,
    /// Gram–Schmidt against every earlier step.
    AllHistory,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub step: f64,
    pub max_steps: usize,
    pub orthogonalize: Orthogonalize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            step: 0.1,
            max_steps: 1_000_000,
            orthogonalize: Orthogonalize::Previous,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// Energy after each step; entry 0 is the starting point.
    pub energies: Vec<f64>,
    pub frozen_counts: Vec<usize>,
    /// `|<s_t, s_{t-1}>| / (|s_t| |s_{t-1}|)` for consecutive walk steps.
    pub step_cosines: Vec<f64>,
    pub kicks: usize,
    /// Number of free coordinates rounded at the end, when the walk could
    /// no longer move orthogonally (at most one).
    pub rounded: usize,
}

impl Trajectory {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,energy,frozen_count\n");
        for (i, (e, f)) in self.energies.iter().zip(&self.frozen_counts).enumerate() {
            s.push_str(&format!("{i},{e},{f}\n"));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkOutcome {
    pub config: SpinConfig,
    pub energy: f64,
    pub point: RelaxedConfig,
    pub trajectory: Trajectory,
}

#[derive(Debug, ThisError)]
pub enum WalkError {
    #[error(transparent)]
    Invalid(#[from] Error),
    #[error("walk stalled after {} steps with {frozen} coordinates frozen", .point.steps)]
    Stalled {
        point: RelaxedConfig,
        frozen: usize,
        trajectory: Trajectory,
    },
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

struct Walker<'a> {
    h: Hamiltonian<'a>,
    x: Vec<f64>,
    frozen: Vec<bool>,
    energy: f64,
    history: Vec<Vec<f64>>,
    config: WalkConfig,
}

impl Walker<'_> {
    fn free_count(&self) -> usize {
        self.frozen.iter().filter(|&&f| !f).count()
    }

    fn restrict(&self, v: &mut [f64]) {
        for (vi, &f) in v.iter_mut().zip(&self.frozen) {
            if f {
                *vi = 0.0;
            }
        }
    }

    /// Remove components along earlier steps (restricted to free coordinates).
    fn orthogonalize(&self, v: &mut [f64]) {
        let basis: &[Vec<f64>] = match self.config.orthogonalize {
            Orthogonalize::Previous => {
                let k = self.history.len().saturating_sub(1);
                &self.history[k..]
            }
            Orthogonalize::AllHistory => &self.history,
        };
        // two passes of modified Gram–Schmidt for stability
        for _ in 0..2 {
            for b in basis {
                let mut b = b.clone();
                self.restrict(&mut b);
                let bb = dot(&b, &b);
                if bb > 0.0 {
                    let c = dot(v, &b) / bb;
                    for (vi, bi) in v.iter_mut().zip(&b) {
                        *vi -= c * bi;
                    }
                }
            }
        }
    }

    /// Largest `s <= limit` keeping `x + s u` inside the cube, and whether
    /// the boundary was hit.
    fn truncate(&self, u: &[f64], limit: f64) -> (f64, bool) {
        let mut s = limit;
        let mut hit = false;
        for i in 0..u.len() {
            if self.frozen[i] || u[i] == 0.0 {
                continue;
            }
            let t = (u[i].signum() - self.x[i]) / u[i];
            if t < s {
                s = t.max(0.0);
                hit = true;
            }
        }
        (s, hit)
    }

    fn trial(&self, u: &[f64], s: f64) -> (Vec<f64>, f64) {
        let mut y: Vec<f64> = self.x.iter().zip(u).map(|(a, b)| a + s * b).collect();
        for (i, yi) in y.iter_mut().enumerate() {
            if !self.frozen[i] && yi.abs() >= 1.0 - FREEZE_EPS {
                *yi = yi.signum();
            }
        }
        let e = self.h.energy_at(&y);
        (y, e)
    }

    /// Backtracking step along `u`; `None` if no nondecreasing step exists.
    fn step_along(&self, u: &[f64], nominal: f64) -> Option<(Vec<f64>, f64)> {
        let (mut s, _) = self.truncate(u, nominal);
        for _ in 0..MAX_HALVINGS {
            if s <= 0.0 {
                break;
            }
            let (y, e) = self.trial(u, s);
            if e >= self.energy - ENERGY_SLACK {
                return Some((y, e));
            }
            s *= 0.5;
        }
        None
    }

    fn commit(&mut self, y: Vec<f64>, e: f64, traj: &mut Trajectory) {
        let d: Vec<f64> = y.iter().zip(&self.x).map(|(a, b)| a - b).collect();
        if let Some(prev) = self.history.last() {
            let denom = norm(&d) * norm(prev);
            if denom > 0.0 {
                traj.step_cosines.push(dot(&d, prev).abs() / denom);
            }
        }
        self.x = y;
        for i in 0..self.x.len() {
            if self.x[i].abs() >= 1.0 - FREEZE_EPS {
                self.x[i] = self.x[i].signum();
                self.frozen[i] = true;
            }
        }
        self.energy = e;
        if self.config.orthogonalize == Orthogonalize::Previous {
            self.history.clear();
        }
        self.history.push(d);
        traj.energies.push(e);
        traj.frozen_counts.push(self.x.len() - self.free_count());
    }

    fn relaxed(&self, steps: usize) -> RelaxedConfig {
        RelaxedConfig {
            point: self.x.clone(),
            steps,
            step_size: self.config.step,
        }
    }
}

/// Guided walk from `x = 0` to a corner of `[-1, 1]^n`.
pub fn guided_walk(j: &GaussianTensor, config: WalkConfig, rng: &RngStream) -> Result<WalkOutcome, WalkError> {
    if !(config.step > 0.0 && config.step < 1.0) {
        return Err(Error::param(format!("walk step {} outside (0, 1)", config.step)).into());
    }
    let n = j.n();
    let nominal = config.step / (n as f64).sqrt();
    let stall = STALL_FACTOR * (n as f64).sqrt();
    let h = Hamiltonian::new(j);
    let mut w = Walker {
        energy: 0.0,
        h,
        x: vec![0.0; n],
        frozen: vec![false; n],
        history: Vec::new(),
        config,
    };
    w.energy = w.h.energy_at(&w.x);
    let mut r = rng.rng();
    let mut traj = Trajectory {
        energies: vec![w.energy],
        frozen_counts: vec![0],
        ..Default::default()
    };
    let mut steps = 0usize;

    while w.free_count() > 0 {
        if steps >= config.max_steps {
            let frozen = n - w.free_count();
            return Err(WalkError::Stalled {
                point: w.relaxed(steps),
                frozen,
                trajectory: traj,
            });
        }
        if w.free_count() == 1 {
            // one free coordinate cannot move orthogonally to a step that
            // touched it; the energy is linear in it, so round to the better sign
            let i = w.frozen.iter().position(|&f| !f).unwrap();
            let mut best = None;
            for sgn in [1.0, -1.0] {
                let mut y = w.x.clone();
                y[i] = sgn;
                let e = w.h.energy_at(&y);
                if best.as_ref().is_none_or(|(_, be)| e > *be) {
                    best = Some((y, e));
                }
            }
            let (y, e) = best.unwrap();
            w.x = y;
            w.frozen[i] = true;
            w.energy = e;
            traj.energies.push(e);
            traj.frozen_counts.push(n);
            traj.rounded += 1;
            break;
        }

        let mut g = w.h.gradient_at(&w.x);
        w.restrict(&mut g);
        w.orthogonalize(&mut g);
        let gn = norm(&g);
        let moved = if gn >= stall {
            let u: Vec<f64> = g.iter().map(|v| v / gn).collect();
            w.step_along(&u, nominal)
        } else {
            None
        };

        let (y, e) = match moved {
            Some(m) => m,
            None => {
                if traj.kicks >= 1 {
                    let frozen = n - w.free_count();
                    return Err(WalkError::Stalled {
                        point: w.relaxed(steps),
                        frozen,
                        trajectory: traj,
                    });
                }
                traj.kicks += 1;
                let mut found = None;
                for _ in 0..KICK_TRIES {
                    let mut u: Vec<f64> = (0..n).map(|_| r.sample::<f64, _>(StandardNormal)).collect();
                    w.restrict(&mut u);
                    w.orthogonalize(&mut u);
                    let un = norm(&u);
                    if un == 0.0 {
                        continue;
                    }
                    for v in &mut u {
                        *v /= un;
                    }
                    let neg: Vec<f64> = u.iter().map(|v| -v).collect();
                    let a = w.step_along(&u, nominal);
                    let b = w.step_along(&neg, nominal);
                    found = match (a, b) {
                        (Some(a), Some(b)) => Some(if b.1 > a.1 { b } else { a }),
                        (a, b) => a.or(b),
                    };
                    if found.as_ref().is_some_and(|(_, e)| *e > w.energy) {
                        break;
                    }
                }
                match found {
                    Some(m) => m,
                    None => {
                        let frozen = n - w.free_count();
                        return Err(WalkError::Stalled {
                            point: w.relaxed(steps),
                            frozen,
                            trajectory: traj,
                        });
                    }
                }
            }
        };
        w.commit(y, e, &mut traj);
        steps += 1;
    }

    let config_out = SpinConfig::new(w.x.iter().map(|&v| if v >= 0.0 { 1 } else { -1 }).collect())
        .map_err(WalkError::from)?;
    let energy = w.h.energy_spins(&config_out);
    Ok(WalkOutcome {
        config: config_out,
        energy,
        point: w.relaxed(steps),
        trajectory: traj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::gen_gaussian_tensor;

    fn check_contract(out: &WalkOutcome) {
        let e = &out.trajectory.energies;
        for k in 1..e.len() {
            assert!(e[k] >= e[k - 1] - 1e-9, "energy dropped at step {k}: {} -> {}", e[k - 1], e[k]);
        }
        assert!(out.trajectory.step_cosines.iter().all(|&c| c <= 1e-8));
        assert!(out.point.point.iter().all(|v| v.abs() == 1.0));
        assert!((out.energy - e.last().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn monotone_and_orthogonal_small() {
        for s in 0..10u64 {
            for p in [2, 3] {
                let j = gen_gaussian_tensor(16, p, &RngStream::new(s, "walk")).unwrap();
                let out = guided_walk(&j, WalkConfig::default(), &RngStream::new(s, "walk/rng")).unwrap();
                check_contract(&out);
                assert!(out.energy > 0.0);
            }
        }
    }

    #[test]
    fn full_history_variant_runs() {
        let j = gen_gaussian_tensor(12, 2, &RngStream::new(3, "hist")).unwrap();
        let cfg = WalkConfig {
            orthogonalize: Orthogonalize::AllHistory,
            step: 0.5,
            ..Default::default()
        };
        match guided_walk(&j, cfg, &RngStream::new(3, "r")) {
            Ok(out) => {
                let e = &out.trajectory.energies;
                assert!(e.windows(2).all(|w| w[1] >= w[0] - 1e-9));
            }
            Err(WalkError::Stalled { trajectory, .. }) => {
                assert!(trajectory.energies.windows(2).all(|w| w[1] >= w[0] - 1e-9));
            }
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn rejects_bad_step() {
        let j = gen_gaussian_tensor(4, 2, &RngStream::new(0, "x")).unwrap();
        let cfg = WalkConfig {
            step: 0.0,
            ..Default::default()
        };
        assert!(matches!(guided_walk(&j, cfg, &RngStream::new(0, "")), Err(WalkError::Invalid(_))));
    }

    #[test]
    fn trajectory_csv() {
        let j = gen_gaussian_tensor(6, 2, &RngStream::new(0, "csv")).unwrap();
        let out = guided_walk(&j, WalkConfig::default(), &RngStream::new(0, "")).unwrap();
        let csv = out.trajectory.to_csv();
        assert!(csv.starts_with("step,energy,frozen_count\n0,0,0\n"));
        assert_eq!(csv.lines().count(), out.trajectory.energies.len() + 1);
    }
}
