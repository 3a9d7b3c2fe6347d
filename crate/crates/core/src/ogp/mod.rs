//! Solution-space geometry probes: near-optimum sampling, overlap
//! histograms, gap detection, clustering of explicit solution sets and
//! overlap experiments along interpolation paths.

mod cluster;
mod gap;
mod histogram;
mod interp;
mod planted;
mod sample;

pub use cluster::{cluster_solutions, cluster_solutions_with_floor, ClusterReport, DEFAULT_SIZE_FLOOR};
pub use gap::{detect_gap, GapReport, DEFAULT_MASS_CEILING, DEFAULT_MIN_WIDTH};
pub use histogram::{overlap_histogram, pair_values, OverlapHistogram, PAIR_CAP};
pub use interp::{
    interpolation_overlap_experiment, karp_stability_profile, EndpointSummary, InterpConfig, InterpolationReport,
    MultiOverlapSample, SampleFailure, StabilityProfile,
};
pub use planted::{planted_gap_suite, PlantedCase, PlantedSuiteConfig, PlantedSuiteReport};
pub use sample::{sample_near_optima, AnnealConfig, NearOptimumSet, SamplerConfig, SamplerKind, EXHAUSTIVE_CAP};

use crate::bits::BitConfig;
use crate::error::{Error, Result};
use crate::graphopt::SubsetKind;
use crate::instances::{ErGraph, GaussianTensor, Instance, KSatFormula};
use crate::ksat::eval_clauses;
use crate::spin::{Hamiltonian, SpinConfig};
use serde::{Deserialize, Serialize};

/// Which objective an instance is read under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// `H(σ) = n^{-1} Σ J σ…σ` over `{-1, 1}^n`; bit set means spin `+1`.
    Energy,
    /// Size of a clique; infeasible subsets score `-∞`.
    Clique,
    /// Size of an independent set; infeasible subsets score `-∞`.
    IndependentSet,
    /// Number of satisfied clauses.
    SatisfiedClauses,
}

/// An instance together with its objective.
#[derive(Debug, Clone)]
pub struct Model {
    instance: Instance,
    objective: Objective,
}

impl Model {
    pub fn new(instance: Instance, objective: Objective) -> Result<Self> {
        let ok = matches!(
            (&instance, objective),
            (Instance::Tensor(_), Objective::Energy)
                | (Instance::Graph(_), Objective::Clique | Objective::IndependentSet)
                | (Instance::KSat(_), Objective::SatisfiedClauses)
        );
        if !ok {
            return Err(Error::param(format!(
                "objective {objective:?} does not apply to a {} instance",
                instance.kind().name()
            )));
        }
        Ok(Self { instance, objective })
    }

    pub fn spin_glass(j: GaussianTensor) -> Self {
        Self {
            instance: Instance::Tensor(j),
            objective: Objective::Energy,
        }
    }

    pub fn subsets(g: ErGraph, kind: SubsetKind) -> Self {
        let objective = match kind {
            SubsetKind::Clique => Objective::Clique,
            SubsetKind::IndependentSet => Objective::IndependentSet,
        };
        Self {
            instance: Instance::Graph(g),
            objective,
        }
    }

    pub fn ksat(f: KSatFormula) -> Self {
        Self {
            instance: Instance::KSat(f),
            objective: Objective::SatisfiedClauses,
        }
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn n(&self) -> usize {
        self.instance.n()
    }

    /// Natural overlap metric of the solution space.
    pub fn default_metric(&self) -> Metric {
        match self.objective {
            Objective::Clique | Objective::IndependentSet => Metric::SetOverlap,
            Objective::Energy | Objective::SatisfiedClauses => Metric::Overlap,
        }
    }

    /// `H(σ)`; `-∞` for subsets violating the defining property.
    pub fn value(&self, x: &BitConfig) -> Result<f64> {
        if x.len() != self.n() {
            return Err(Error::param(format!("configuration has {} entries, model has n = {}", x.len(), self.n())));
        }
        Ok(match (&self.instance, self.objective) {
            (Instance::Tensor(j), _) => Hamiltonian::new(j).energy_spins(&SpinConfig::from_bits(x)),
            (Instance::Graph(g), obj) => {
                let members = x.members();
                let want = obj == Objective::Clique;
                let feasible = members
                    .iter()
                    .enumerate()
                    .all(|(a, &u)| members[a + 1..].iter().all(|&v| g.has_edge(u, v) == want));
                if feasible {
                    members.len() as f64
                } else {
                    f64::NEG_INFINITY
                }
            }
            (Instance::KSat(f), _) => eval_clauses(f, x)? as f64,
        })
    }
}

/// Distance or similarity between two configurations of equal length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// `d_H / n`, in `[0, 1]`.
    Hamming,
    /// `n^{-1} <σ1, σ2>` of the ±1 images, `1 - 2 d_H / n`, in `[-1, 1]`.
    Overlap,
    /// `|A ∩ B| / sqrt(|A| |B|)` of the supports, in `[0, 1]`; two empty
    /// sets count as identical.
    SetOverlap,
}

impl Metric {
    pub fn range(self) -> (f64, f64) {
        match self {
            Metric::Overlap => (-1.0, 1.0),
            Metric::Hamming | Metric::SetOverlap => (0.0, 1.0),
        }
    }

    pub fn eval(self, a: &BitConfig, b: &BitConfig) -> f64 {
        let n = a.len() as f64;
        match self {
            Metric::Hamming => a.hamming(b) as f64 / n,
            Metric::Overlap => 1.0 - 2.0 * a.hamming(b) as f64 / n,
            Metric::SetOverlap => {
                let (ka, kb) = (a.count_ones(), b.count_ones());
                if ka == 0 && kb == 0 {
                    1.0
                } else if ka == 0 || kb == 0 {
                    0.0
                } else {
                    a.intersection_size(b) as f64 / ((ka * kb) as f64).sqrt()
                }
            }
        }
    }

    /// Value of the metric for a configuration against itself.
    pub fn self_value(self) -> f64 {
        match self {
            Metric::Hamming => 0.0,
            Metric::Overlap | Metric::SetOverlap => 1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::gen_gaussian_tensor;
    use crate::rng::RngStream;
    use crate::spin::overlap;
    use proptest::prelude::*;

    #[test]
    fn objective_must_match_instance() {
        let g = ErGraph::cycle(5);
        assert!(Model::new(Instance::Graph(g.clone()), Objective::Energy).is_err());
        assert!(Model::new(Instance::Graph(g), Objective::Clique).is_ok());
    }

    #[test]
    fn subset_values() {
        let m = Model::subsets(ErGraph::cycle(5), SubsetKind::IndependentSet);
        assert_eq!(m.value(&BitConfig::from_members(5, &[0, 2])).unwrap(), 2.0);
        assert_eq!(m.value(&BitConfig::from_members(5, &[0, 1])).unwrap(), f64::NEG_INFINITY);
        let c = Model::subsets(ErGraph::cycle(5), SubsetKind::Clique);
        assert_eq!(c.value(&BitConfig::from_members(5, &[0, 1])).unwrap(), 2.0);
        assert_eq!(c.value(&BitConfig::zeros(5)).unwrap(), 0.0);
        assert!(c.value(&BitConfig::zeros(4)).is_err());
    }

    #[test]
    fn spin_value_matches_energy() {
        let j = gen_gaussian_tensor(8, 2, &RngStream::new(1, "m")).unwrap();
        let m = Model::spin_glass(j.clone());
        let x = BitConfig::from_mask(8, 0b1011_0110);
        let e = crate::spin::energy(&j, &SpinConfig::from_bits(&x)).unwrap();
        assert_eq!(m.value(&x).unwrap(), e);
    }

    proptest! {
        #[test]
        fn overlap_metric_agrees_with_spin_overlap(a in 0u64..1 << 12, b in 0u64..1 << 12) {
            let (x, y) = (BitConfig::from_mask(12, a), BitConfig::from_mask(12, b));
            let o = overlap(&SpinConfig::from_bits(&x), &SpinConfig::from_bits(&y)).unwrap();
            prop_assert!((Metric::Overlap.eval(&x, &y) - o).abs() < 1e-12);
            prop_assert!((Metric::Hamming.eval(&x, &y) - (1.0 - o) / 2.0).abs() < 1e-12);
            let s = Metric::SetOverlap.eval(&x, &y);
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert_eq!(Metric::SetOverlap.eval(&x, &x), 1.0);
        }
    }
}
