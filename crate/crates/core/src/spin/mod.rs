//! p-spin glass energies, exact ground states, Metropolis chains and the
//! incremental guided walk.
//!
//! Energies use the normalization `n^{-(p+1)/2} <J, σ^{⊗p}>` with the sum over
//! strictly increasing index tuples; larger is better.

mod ground;
mod hamiltonian;
mod metropolis;
mod walk;

pub use ground::{brute_force_ground_state, GROUND_STATE_CAP_P2, GROUND_STATE_CAP_PGE3};
pub use hamiltonian::{energy, energy_gradient, Hamiltonian};
pub use metropolis::{metropolis_chain, single_flip_kernel, BetaSchedule, ChainSummary};
pub use walk::{guided_walk, Orthogonalize, Trajectory, WalkConfig, WalkError, WalkOutcome};

use crate::bits::BitConfig;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A configuration in `{-1, +1}^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinConfig(Vec<i8>);

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::param("spins must be exactly +1 or -1"));
        }
        Ok(Self(spins))
    }

    pub fn all_up(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn from_bits(bits: &BitConfig) -> Self {
        Self(bits.spins())
    }

    pub fn to_bits(&self) -> BitConfig {
        BitConfig::from_spins(&self.0)
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|s| -s).collect())
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&s| s as f64).collect()
    }
}

/// A point of the cube `[-1, 1]^n` visited by the guided walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxedConfig {
    pub point: Vec<f64>,
    pub steps: usize,
    pub step_size: f64,
}

/// Normalized inner product `n^{-1} <σ1, σ2>`.
pub fn overlap(a: &SpinConfig, b: &SpinConfig) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::param(format!("overlap of lengths {} and {}", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(Error::param("overlap of empty configurations"));
    }
    let dot: i64 = a.0.iter().zip(&b.0).map(|(&x, &y)| (x * y) as i64).sum();
    Ok(dot as f64 / a.len() as f64)
}
