use super::{Model, Objective};
use crate::bits::BitConfig;
use crate::error::{Error, Result};
use crate::graphopt::{karp_greedy_clique, greedy_independent_set};
use crate::instances::{ErGraph, GaussianTensor, Instance};
use crate::ksat::{enumerate_solutions, walksat, DEFAULT_SOLUTION_LIMIT, ENUMERATION_CAP};
use crate::rng::RngStream;
use crate::spin::{metropolis_chain, BetaSchedule, Hamiltonian};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest `n` for exhaustive level sets (K-SAT at level `m` goes up to
/// the enumeration cap).
pub const EXHAUSTIVE_CAP: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    Exhaustive,
    Annealed,
}

/// Independent-restart heuristic sampling.
///
/// Spin glasses run a Metropolis chain on a linear inverse-temperature ramp
/// followed by single-flip ascent; graphs run greedy over a fresh random
/// order; K-SAT runs WalkSAT.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnnealConfig {
    pub sweeps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    /// Restarts tried before giving up on reaching `count` admissions.
    pub max_attempts: usize,
    pub max_flips: u64,
    pub noise: f64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            sweeps: 200,
            beta_start: 0.1,
            beta_end: 4.0,
            max_attempts: 1000,
            max_flips: 100_000,
            noise: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerConfig {
    Exhaustive,
    Annealed(AnnealConfig),
}

impl SamplerConfig {
    pub fn kind(&self) -> SamplerKind {
        match self {
            SamplerConfig::Exhaustive => SamplerKind::Exhaustive,
            SamplerConfig::Annealed(_) => SamplerKind::Annealed,
        }
    }
}

/// Configurations with `H >= level`, each checked on admission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearOptimumSet {
    pub objective: Objective,
    pub n: usize,
    pub level: f64,
    pub solutions: Vec<BitConfig>,
    pub values: Vec<f64>,
    pub sampler: SamplerKind,
    pub attempts: usize,
    /// The annealed sampler stopped at `max_attempts` short of `count`.
    pub budget_exhausted: bool,
    pub instance_hash: String,
}

impl NearOptimumSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    /// Number of members that fail `H >= level` when re-evaluated on `model`.
    pub fn violations(&self, model: &Model) -> Result<usize> {
        let mut bad = 0;
        for x in &self.solutions {
            if !admits(model.value(x)?, self.level) {
                bad += 1;
            }
        }
        Ok(bad)
    }
}

fn admits(value: f64, level: f64) -> bool {
    value > f64::NEG_INFINITY && value >= level
}

/// Samples configurations with `H >= level`.
///
/// Exhaustive mode returns the complete level set in increasing mask order
/// and ignores `count`. Annealed mode runs independent restarts until
/// `count` samples are admitted or the attempt budget runs out. `level` may
/// be `-∞` to admit every feasible sample.
pub fn sample_near_optima(
    model: &Model,
    level: f64,
    count: usize,
    sampler: SamplerConfig,
    rng: &RngStream,
) -> Result<NearOptimumSet> {
    if level.is_nan() || level == f64::INFINITY {
        return Err(Error::param(format!("level {level} is not usable")));
    }
    let (candidates, attempts, budget_exhausted) = match sampler {
        SamplerConfig::Exhaustive => {
            let c = exhaustive(model, level)?;
            let a = c.len();
            (c, a, false)
        }
        SamplerConfig::Annealed(cfg) => annealed(model, level, count, &cfg, rng)?,
    };
    let mut solutions = Vec::with_capacity(candidates.len());
    let mut values = Vec::with_capacity(candidates.len());
    for x in candidates {
        let v = model.value(&x)?;
        if !admits(v, level) {
            return Err(Error::param("internal error: sampler produced a configuration below the level"));
        }
        solutions.push(x);
        values.push(v);
    }
    Ok(NearOptimumSet {
        objective: model.objective(),
        n: model.n(),
        level,
        solutions,
        values,
        sampler: sampler.kind(),
        attempts,
        budget_exhausted,
        instance_hash: model.instance().content_hash(),
    })
}

fn capacity(what: &'static str, n: usize, cap: usize) -> Error {
    Error::Capacity { what, n, cap }
}

fn exhaustive(model: &Model, level: f64) -> Result<Vec<BitConfig>> {
    let n = model.n();
    match model.instance() {
        Instance::KSat(f) if level >= f.m() as f64 => {
            if n > ENUMERATION_CAP {
                return Err(capacity("exhaustive near-optimum sampling", n, ENUMERATION_CAP));
            }
            if level > f.m() as f64 {
                return Ok(Vec::new());
            }
            enumerate_solutions(f)
        }
        _ if n > EXHAUSTIVE_CAP => Err(capacity("exhaustive near-optimum sampling", n, EXHAUSTIVE_CAP)),
        Instance::Tensor(j) => Ok(spin_level_set(j, level)),
        Instance::Graph(g) => {
            let g = if model.objective() == Objective::IndependentSet {
                g.complement()
            } else {
                g.clone()
            };
            clique_level_set(&g, level)
        }
        Instance::KSat(_) => {
            let mut out = Vec::new();
            for mask in 0..1u64 << n {
                let x = BitConfig::from_mask(n, mask);
                if model.value(&x)? >= level {
                    if out.len() == DEFAULT_SOLUTION_LIMIT {
                        return Err(capacity("exhaustive level set size", out.len() + 1, DEFAULT_SOLUTION_LIMIT));
                    }
                    out.push(x);
                }
            }
            Ok(out)
        }
    }
}

fn pair_fields(h: &Hamiltonian, s: &[i8]) -> Option<Vec<f64>> {
    let n = s.len();
    h.matrix().map(|a| {
        (0..n)
            .map(|i| a[i * n..(i + 1) * n].iter().zip(s).map(|(x, &y)| x * y as f64).sum())
            .collect()
    })
}

fn flip(h: &Hamiltonian, s: &mut [i8], fields: &mut Option<Vec<f64>>, i: usize) {
    let n = s.len();
    if let (Some(f), Some(a)) = (fields.as_mut(), h.matrix()) {
        let c = -2.0 * s[i] as f64;
        for (fk, aik) in f.iter_mut().zip(&a[i * n..(i + 1) * n]) {
            *fk += c * aik;
        }
    }
    s[i] = -s[i];
}

/// Gray-code sweep over all `2^n` spin configurations.
fn spin_level_set(j: &GaussianTensor, level: f64) -> Vec<BitConfig> {
    let n = j.n();
    let mut h = Hamiltonian::new(j);
    // mask bit i set <=> spin i is +1; start from all -1
    let mut s = vec![-1i8; n];
    let mut fields = pair_fields(&h, &s);
    let mut e = h.energy_at(&vec![-1.0; n]);
    let mut masks = Vec::new();
    let mut mask = 0u64;
    if e >= level {
        masks.push(mask);
    }
    for step in 1..1u64 << n {
        let i = step.trailing_zeros() as usize;
        e += h.flip_delta(&s, i, fields.as_deref());
        flip(&h, &mut s, &mut fields, i);
        mask ^= 1 << i;
        if e >= level {
            masks.push(mask);
        }
    }
    masks.sort_unstable();
    masks.into_iter().map(|m| BitConfig::from_mask(n, m)).collect()
}

/// All cliques with at least `level` vertices.
fn clique_level_set(g: &ErGraph, level: f64) -> Result<Vec<BitConfig>> {
    let n = g.n();
    let need = if level <= 0.0 { 0 } else { level.ceil() as u32 };
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let rows: Vec<u64> = (0..n).map(|v| g.row(v)[0] & full).collect();
    let mut out = Vec::new();
    let mut stack = vec![(0u64, full)];
    while let Some((cur, cand)) = stack.pop() {
        if cur.count_ones() + cand.count_ones() < need {
            continue;
        }
        if cur.count_ones() >= need {
            if out.len() == DEFAULT_SOLUTION_LIMIT {
                return Err(capacity("exhaustive level set size", out.len() + 1, DEFAULT_SOLUTION_LIMIT));
            }
            out.push(cur);
        }
        let mut rest = cand;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            // only extend with vertices above v to visit each set once
            stack.push((cur | 1 << v, rest & rows[v]));
        }
    }
    out.sort_unstable();
    Ok(out.into_iter().map(|m| BitConfig::from_mask(n, m)).collect())
}

fn annealed(
    model: &Model,
    level: f64,
    count: usize,
    cfg: &AnnealConfig,
    rng: &RngStream,
) -> Result<(Vec<BitConfig>, usize, bool)> {
    if count == 0 {
        return Ok((Vec::new(), 0, false));
    }
    if cfg.max_attempts == 0 {
        return Err(Error::param("max_attempts must be >= 1"));
    }
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    // batches keep the admitted sequence independent of thread scheduling
    let batch = count.max(8);
    while out.len() < count && attempts < cfg.max_attempts {
        let hi = (attempts + batch).min(cfg.max_attempts);
        let results = (attempts..hi)
            .into_par_iter()
            .map(|a| restart(model, cfg, &rng.child(format!("restart{a}"))))
            .collect::<Result<Vec<_>>>()?;
        for x in results {
            attempts += 1;
            if let Some(x) = x {
                if admits(model.value(&x)?, level) {
                    out.push(x);
                    if out.len() == count {
                        break;
                    }
                }
            }
        }
    }
    let exhausted = out.len() < count;
    Ok((out, attempts, exhausted))
}

fn restart(model: &Model, cfg: &AnnealConfig, rng: &RngStream) -> Result<Option<BitConfig>> {
    let n = model.n();
    Ok(match model.instance() {
        Instance::Tensor(j) => {
            let schedule = BetaSchedule::Linear {
                start: cfg.beta_start,
                end: cfg.beta_end,
            };
            let chain = metropolis_chain(j, schedule, cfg.sweeps.max(1), rng)?;
            let mut h = Hamiltonian::new(j);
            let mut s = chain.best.spins().to_vec();
            let mut fields = pair_fields(&h, &s);
            // single-flip ascent to a local maximum
            loop {
                let mut best = (0.0, n);
                for i in 0..n {
                    let d = h.flip_delta(&s, i, fields.as_deref());
                    if d > best.0 + 1e-12 {
                        best = (d, i);
                    }
                }
                if best.1 == n {
                    break;
                }
                flip(&h, &mut s, &mut fields, best.1);
            }
            Some(BitConfig::from_spins(&s))
        }
        Instance::Graph(g) => {
            let set = match model.objective() {
                Objective::IndependentSet => greedy_independent_set(g, rng),
                _ => karp_greedy_clique(g, rng),
            };
            Some(BitConfig::from_members(n, set.members()))
        }
        Instance::KSat(f) => walksat(f, cfg.max_flips, cfg.noise, rng)?.assignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphopt::SubsetKind;
    use crate::instances::{gen_er_graph, gen_gaussian_tensor, gen_ksat, KSatFormula};
    use crate::ksat::count_solutions;
    use crate::spin::brute_force_ground_state;

    #[test]
    fn ground_state_level_is_the_flip_pair() {
        for seed in 0..5 {
            let j = gen_gaussian_tensor(14, 2, &RngStream::new(seed, "gs")).unwrap();
            let (s, e) = brute_force_ground_state(&j).unwrap();
            let model = Model::spin_glass(j);
            // tiny slack for the Gray-code accumulation
            let set = sample_near_optima(&model, e - 1e-9, 0, SamplerConfig::Exhaustive, &RngStream::new(0, "")).unwrap();
            let want = [s.to_bits(), s.to_bits().complement()];
            assert_eq!(set.len(), 2, "seed {seed}");
            assert!(want.iter().all(|w| set.solutions.contains(w)));
            assert_eq!(set.violations(&model).unwrap(), 0);
        }
    }

    #[test]
    fn exhaustive_level_set_matches_brute_force() {
        let j = gen_gaussian_tensor(10, 3, &RngStream::new(4, "lvl")).unwrap();
        let model = Model::spin_glass(j);
        let level = 0.3;
        let set = sample_near_optima(&model, level, 0, SamplerConfig::Exhaustive, &RngStream::new(0, "")).unwrap();
        let brute: Vec<BitConfig> = (0..1u64 << 10)
            .map(|m| BitConfig::from_mask(10, m))
            .filter(|x| model.value(x).unwrap() >= level)
            .collect();
        assert_eq!(set.solutions, brute);
    }

    #[test]
    fn cycle_independent_sets() {
        let model = Model::subsets(ErGraph::cycle(5), SubsetKind::IndependentSet);
        let set = sample_near_optima(&model, 2.0, 0, SamplerConfig::Exhaustive, &RngStream::new(0, "")).unwrap();
        assert_eq!(set.len(), 5);
        assert!(set.values.iter().all(|&v| v == 2.0));
        let all = sample_near_optima(&model, f64::NEG_INFINITY, 0, SamplerConfig::Exhaustive, &RngStream::new(0, "")).unwrap();
        // empty set, 5 singletons, 5 pairs
        assert_eq!(all.len(), 11);
    }

    #[test]
    fn clique_level_set_matches_brute_force() {
        for seed in 0..10 {
            let g = gen_er_graph(12, 0.5, &RngStream::new(seed, "cl")).unwrap();
            let model = Model::subsets(g, SubsetKind::Clique);
            let set = sample_near_optima(&model, 3.0, 0, SamplerConfig::Exhaustive, &RngStream::new(0, "")).unwrap();
            let brute: Vec<BitConfig> = (0..1u64 << 12)
                .map(|m| BitConfig::from_mask(12, m))
                .filter(|x| model.value(x).unwrap() >= 3.0)
                .collect();
            assert_eq!(set.solutions, brute);
        }
    }

    #[test]
    fn ksat_full_level_is_the_solution_set() {
        let f = gen_ksat(12, 40, 3, &RngStream::new(2, "ks")).unwrap();
        let model = Model::ksat(f.clone());
        let set = sample_near_optima(&model, 40.0, 0, SamplerConfig::Exhaustive, &RngStream::new(0, "")).unwrap();
        assert_eq!(set.len() as u64, count_solutions(&f).unwrap());
        let partial = sample_near_optima(&model, 39.0, 0, SamplerConfig::Exhaustive, &RngStream::new(0, "")).unwrap();
        assert!(partial.len() >= set.len());
        assert_eq!(partial.violations(&model).unwrap(), 0);
        let unsat = Model::ksat(KSatFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap());
        assert!(sample_near_optima(&unsat, 2.0, 0, SamplerConfig::Exhaustive, &RngStream::new(0, "")).unwrap().is_empty());
    }

    #[test]
    fn annealed_sampling() {
        let j = gen_gaussian_tensor(30, 2, &RngStream::new(3, "an")).unwrap();
        let model = Model::spin_glass(j);
        let cfg = SamplerConfig::Annealed(AnnealConfig {
            sweeps: 50,
            ..AnnealConfig::default()
        });
        let rng = RngStream::new(9, "an");
        let any = sample_near_optima(&model, f64::NEG_INFINITY, 10, cfg, &rng).unwrap();
        assert_eq!(any.len(), 10);
        assert_eq!(any.attempts, 10);
        assert!(!any.budget_exhausted);
        assert_eq!(any, sample_near_optima(&model, f64::NEG_INFINITY, 10, cfg, &rng).unwrap());
        // nothing reaches an absurd level
        let cfg_small = SamplerConfig::Annealed(AnnealConfig {
            sweeps: 5,
            max_attempts: 4,
            ..AnnealConfig::default()
        });
        let none = sample_near_optima(&model, 10.0, 3, cfg_small, &rng).unwrap();
        assert!(none.is_empty() && none.budget_exhausted && none.attempts == 4);
    }

    #[test]
    fn annealed_graph_and_ksat() {
        let g = gen_er_graph(100, 0.5, &RngStream::new(1, "g")).unwrap();
        let model = Model::subsets(g, SubsetKind::Clique);
        let set = sample_near_optima(&model, 4.0, 20, SamplerConfig::Annealed(AnnealConfig::default()), &RngStream::new(1, "s")).unwrap();
        assert_eq!(set.len(), 20);
        assert_eq!(set.violations(&model).unwrap(), 0);
        let f = gen_ksat(50, 150, 3, &RngStream::new(1, "f")).unwrap();
        let model = Model::ksat(f);
        let set = sample_near_optima(&model, 150.0, 5, SamplerConfig::Annealed(AnnealConfig::default()), &RngStream::new(1, "s")).unwrap();
        assert_eq!(set.len(), 5);
    }

    #[test]
    fn rejects_bad_levels_and_caps() {
        let model = Model::spin_glass(gen_gaussian_tensor(25, 2, &RngStream::new(0, "")).unwrap());
        let r = RngStream::new(0, "");
        assert!(sample_near_optima(&model, f64::NAN, 1, SamplerConfig::Exhaustive, &r).is_err());
        assert!(matches!(
            sample_near_optima(&model, 0.0, 1, SamplerConfig::Exhaustive, &r),
            Err(Error::Capacity { .. })
        ));
    }
}
