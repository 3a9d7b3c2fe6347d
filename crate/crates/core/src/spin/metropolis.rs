//! Random-scan single-spin-flip Metropolis targeting `exp(β n H(σ))`.

use super::{Hamiltonian, SpinConfig};
use crate::error::{Error, Result};
use crate::instances::GaussianTensor;
use crate::rng::RngStream;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Inverse temperature per sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaSchedule {
    Constant(f64),
    /// Linear ramp from `start` (first sweep) to `end` (last sweep).
    Linear { start: f64, end: f64 },
}

impl BetaSchedule {
    pub fn at(&self, sweep: usize, sweeps: usize) -> f64 {
        match *self {
            BetaSchedule::Constant(b) => b,
            BetaSchedule::Linear { start, end } => {
                if sweeps <= 1 {
                    end
                } else {
                    start + (end - start) * sweep as f64 / (sweeps - 1) as f64
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            BetaSchedule::Constant(b) => b >= 0.0,
            BetaSchedule::Linear { start, end } => start >= 0.0 && end >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::param("inverse temperature must be >= 0"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub best: SpinConfig,
    pub best_energy: f64,
    pub last: SpinConfig,
    /// Energy after each sweep.
    pub energy_trace: Vec<f64>,
    pub acceptance_rate: f64,
}

pub fn metropolis_chain(
    j: &GaussianTensor,
    schedule: BetaSchedule,
    sweeps: usize,
    rng: &RngStream,
) -> Result<ChainSummary> {
    schedule.validate()?;
    if sweeps == 0 {
        return Err(Error::param("sweeps must be >= 1"));
    }
    let n = j.n();
    let nf = n as f64;
    let mut h = Hamiltonian::new(j);
    let mut r = rng.rng();
    let mut s: Vec<i8> = (0..n).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect();
    let mut fields: Option<Vec<f64>> = h.matrix().map(|a| {
        (0..n)
            .map(|i| a[i * n..(i + 1) * n].iter().zip(&s).map(|(x, &y)| x * y as f64).sum())
            .collect()
    });
    let mut e = h.energy_at(&s.iter().map(|&v| v as f64).collect::<Vec<_>>());
    let mut best = s.clone();
    let mut best_e = e;
    let mut accepted = 0u64;
    let mut trace = Vec::with_capacity(sweeps);

    for sweep in 0..sweeps {
        let beta = schedule.at(sweep, sweeps);
        for _ in 0..n {
            let i = r.random_range(0..n);
            let d = h.flip_delta(&s, i, fields.as_deref());
            let u: f64 = r.random();
            if d >= 0.0 || u < (beta * nf * d).exp() {
                accepted += 1;
                if let (Some(f), Some(a)) = (fields.as_mut(), h.matrix()) {
                    let c = -2.0 * s[i] as f64;
                    for (fk, aik) in f.iter_mut().zip(&a[i * n..(i + 1) * n]) {
                        *fk += c * aik;
                    }
                }
                s[i] = -s[i];
                e += d;
                if e > best_e {
                    best_e = e;
                    best.copy_from_slice(&s);
                }
            }
        }
        trace.push(e);
    }

    let best = SpinConfig::new(best)?;
    let best_energy = h.energy_spins(&best);
    Ok(ChainSummary {
        best,
        best_energy,
        last: SpinConfig::new(s)?,
        energy_trace: trace,
        acceptance_rate: accepted as f64 / (sweeps * n) as f64,
    })
}

/// Transition matrix of one random-scan update at inverse temperature `β`,
/// indexed by configuration masks (bit `i` set means spin `i` is `-1`).
/// Small `n` only.
pub fn single_flip_kernel(j: &GaussianTensor, beta: f64) -> Result<Vec<Vec<f64>>> {
    let n = j.n();
    if n > 12 {
        return Err(Error::Capacity {
            what: "single_flip_kernel",
            n,
            cap: 12,
        });
    }
    let h = Hamiltonian::new(j);
    let states = 1usize << n;
    let energy = |mask: usize| {
        let x: Vec<f64> = (0..n).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
        h.energy_at(&x)
    };
    let es: Vec<f64> = (0..states).map(energy).collect();
    let mut k = vec![vec![0.0; states]; states];
    for a in 0..states {
        let mut stay = 1.0;
        for i in 0..n {
            let b = a ^ (1 << i);
            let acc = (beta * n as f64 * (es[b] - es[a])).exp().min(1.0);
            k[a][b] = acc / n as f64;
            stay -= k[a][b];
        }
        k[a][a] = stay;
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::gen_gaussian_tensor;
    use crate::spin::brute_force_ground_state;

    #[test]
    fn infinite_temperature_accepts_everything() {
        let j = gen_gaussian_tensor(30, 2, &RngStream::new(1, "b0")).unwrap();
        let c = metropolis_chain(&j, BetaSchedule::Constant(0.0), 8000, &RngStream::new(1, "chain")).unwrap();
        assert_eq!(c.acceptance_rate, 1.0);
        // H(σ) under the uniform measure: mean 0, variance C(n,2) n^{-3}.
        // Every 10th sweep is effectively independent (each spin left
        // untouched with probability ≈ e^{-10}).
        let sd = (435.0f64 / 27_000.0).sqrt();
        let thinned: Vec<f64> = c.energy_trace.iter().step_by(10).copied().collect();
        let k = thinned.len() as f64;
        let mean = thinned.iter().sum::<f64>() / k;
        assert!(mean.abs() < 4.0 * sd / k.sqrt(), "mean {mean}");
    }

    #[test]
    fn detailed_balance_three_spins() {
        let j = gen_gaussian_tensor(3, 2, &RngStream::new(5, "db")).unwrap();
        let h = Hamiltonian::new(&j);
        for beta in [0.0, 0.7, 3.0] {
            let k = single_flip_kernel(&j, beta).unwrap();
            let w: Vec<f64> = (0..8)
                .map(|m| {
                    let x: Vec<f64> = (0..3).map(|i| if m >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
                    (beta * 3.0 * h.energy_at(&x)).exp()
                })
                .collect();
            let z: f64 = w.iter().sum();
            for a in 0..8 {
                assert!((k[a].iter().sum::<f64>() - 1.0).abs() < 1e-12);
                for b in 0..8 {
                    assert!((w[a] / z * k[a][b] - w[b] / z * k[b][a]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn uniform_at_zero_beta_small_n() {
        // chi-square over the 16 states of n = 4, sampled once per sweep
        let j = gen_gaussian_tensor(4, 2, &RngStream::new(2, "u")).unwrap();
        let mut counts = [0usize; 16];
        for s in 0..4000u64 {
            let c = metropolis_chain(&j, BetaSchedule::Constant(0.0), 3, &RngStream::new(s, "uc")).unwrap();
            let m = c.last.spins().iter().enumerate().fold(0, |acc, (i, &v)| acc | (usize::from(v < 0) << i));
            counts[m] += 1;
        }
        let e = 4000.0 / 16.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // 15 dof, 0.999 quantile ≈ 37.7
        assert!(chi2 < 37.7, "chi2 {chi2}");
    }

    #[test]
    fn annealing_finds_ground_state() {
        let mut hits = 0;
        for s in 0..30u64 {
            let j = gen_gaussian_tensor(12, 2, &RngStream::new(s, "anneal")).unwrap();
            let (_, gs) = brute_force_ground_state(&j).unwrap();
            let c = metropolis_chain(
                &j,
                BetaSchedule::Linear { start: 0.1, end: 5.0 },
                400,
                &RngStream::new(s, "anneal/chain"),
            )
            .unwrap();
            assert!(c.best_energy <= gs + 1e-12);
            if c.best_energy >= gs - 1e-9 {
                hits += 1;
            }
        }
        assert!(hits >= 27, "{hits}/30");
    }
}
