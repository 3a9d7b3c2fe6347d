//! Minimization of the Parisi functional over piecewise-constant order
//! parameters with a fixed number of atoms.
//!
//! An order parameter with `a` atoms is encoded as `θ = (q_1..q_a, m_1..m_a)`
//! and decoded through [`OrderParam::from_atoms`] after projecting onto the
//! class constraints. The search runs Nelder–Mead from several seeded starts
//! for `a = 1, 2, …, k` in turn; each level also starts from the previous
//! level's optimum padded with an empty atom, so the reported value never
//! increases with `k`.

use super::functional::{parisi_functional, parisi_value, FunctionalValue};
use super::{MixtureSpec, OrderParam, ParamClass, PdeGrid};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Improvements smaller than this do not justify an extra atom.
pub const ATOM_TIE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub starts: usize,
    pub seed: u64,
    /// Functional evaluations per start.
    pub max_evals: usize,
    /// Simplex spread in value at which a start is considered converged.
    pub tolerance: f64,
    /// Cap on the values of `μ`.
    pub m_max: f64,
    pub grid: PdeGrid,
    pub warm_start: Option<OrderParam>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 8,
            seed: 0,
            max_evals: 400,
            tolerance: 1e-8,
            m_max: 100.0,
            grid: PdeGrid::default(),
            warm_start: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub atoms: usize,
    pub start: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderStep {
    pub atoms: usize,
    pub value: f64,
    /// Start that produced the kept optimum; `None` when a smaller atom
    /// count was kept.
    pub start: Option<usize>,
    pub converged: bool,
    pub order: OrderParam,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    /// Every functional value computed, in (atoms, start, call) order.
    pub evaluations: Vec<Evaluation>,
    pub ladder: Vec<LadderStep>,
}

impl OptimizerTrace {
    pub fn min_evaluated(&self) -> f64 {
        self.evaluations.iter().map(|e| e.value).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub order: OrderParam,
    pub value: FunctionalValue,
    /// False when some start ran out of evaluations before converging.
    pub converged: bool,
    pub trace: OptimizerTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedMinimum {
    pub u: Minimum,
    pub l: Minimum,
    pub tv_budget: f64,
    /// `value_U - value_L`.
    pub gap: f64,
}

struct Problem<'a> {
    spec: &'a MixtureSpec,
    class: ParamClass,
    m_max: f64,
    grid: PdeGrid,
}

impl Problem<'_> {
    fn decode(&self, theta: &[f64]) -> OrderParam {
        let a = theta.len() / 2;
        let mut q: Vec<f64> = theta[..a].iter().map(|v| v.clamp(0.0, 1.0)).collect();
        q.sort_by(f64::total_cmp);
        let mut m: Vec<f64> = theta[a..].iter().map(|v| v.clamp(0.0, self.m_max)).collect();
        match self.class {
            ParamClass::U => isotonic(&mut m),
            ParamClass::L { tv_budget } => {
                let tv = sequence_tv(&m);
                if tv > tv_budget {
                    let c = tv_budget / tv;
                    m.iter_mut().for_each(|v| *v *= c);
                }
            }
        }
        OrderParam::from_atoms(&q, &m, self.class).expect("projected atoms are feasible")
    }

    fn value(&self, mu: &OrderParam) -> f64 {
        parisi_value(mu, self.spec, &self.grid).unwrap_or(f64::INFINITY)
    }
}

fn sequence_tv(m: &[f64]) -> f64 {
    let mut prev = 0.0;
    m.iter()
        .map(|&v| {
            let d = (v - prev).abs();
            prev = v;
            d
        })
        .sum()
}

/// Pool-adjacent-violators: least-squares projection onto nondecreasing
/// sequences.
fn isotonic(v: &mut [f64]) {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(v.len());
    for &x in v.iter() {
        blocks.push((x, 1));
        while blocks.len() > 1 {
            let (b, nb) = blocks[blocks.len() - 1];
            let (a, na) = blocks[blocks.len() - 2];
            if a <= b {
                break;
            }
            blocks.pop();
            let n = na + nb;
            *blocks.last_mut().unwrap() = ((a * na as f64 + b * nb as f64) / n as f64, n);
        }
    }
    let mut i = 0;
    for (x, n) in blocks {
        for _ in 0..n {
            v[i] = x;
            i += 1;
        }
    }
}

/// Encode `μ` with exactly `atoms` atoms, padding with empty atoms at 1.
fn encode(mu: &OrderParam, atoms: usize) -> Option<Vec<f64>> {
    let (mut q, mut m) = mu.atoms();
    if q.len() > atoms {
        return None;
    }
    let last = m.last().copied().unwrap_or(0.0);
    while q.len() < atoms {
        q.push(1.0);
        m.push(last);
    }
    q.extend(m);
    Some(q)
}

struct NmResult {
    theta: Vec<f64>,
    value: f64,
    converged: bool,
}

fn nelder_mead(f: &mut dyn FnMut(&[f64]) -> f64, x0: &[f64], step: &[f64], max_evals: usize, tol: f64) -> NmResult {
    let d = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };
    let mut best = (x0.to_vec(), eval(x0, &mut evals));
    let mut converged = false;
    let mut scale = 1.0;
    // a restart from the best vertex guards against simplex collapse
    for _round in 0..2 {
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![best.clone()];
        for i in 0..d {
            let mut x = best.0.clone();
            x[i] += step[i] * scale;
            let v = eval(&x, &mut evals);
            simplex.push((x, v));
        }
        converged = false;
        while evals < max_evals {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if simplex[d].1 - simplex[0].1 <= tol {
                converged = true;
                break;
            }
            let centroid: Vec<f64> = (0..d).map(|j| simplex[..d].iter().map(|p| p.0[j]).sum::<f64>() / d as f64).collect();
            let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[d].0).map(|(c, w)| c + t * (c - w)).collect() };
            let xr = along(1.0);
            let fr = eval(&xr, &mut evals);
            if fr < simplex[0].1 {
                let xe = along(2.0);
                let fe = eval(&xe, &mut evals);
                simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[d - 1].1 {
                simplex[d] = (xr, fr);
            } else {
                let (xc, fc) = if fr < simplex[d].1 {
                    let x = along(0.5);
                    let v = eval(&x, &mut evals);
                    (x, v)
                } else {
                    let x = along(-0.5);
                    let v = eval(&x, &mut evals);
                    (x, v)
                };
                if fc < simplex[d].1.min(fr) {
                    simplex[d] = (xc, fc);
                } else {
                    let x0 = simplex[0].0.clone();
                    for p in simplex.iter_mut().skip(1) {
                        for (xj, bj) in p.0.iter_mut().zip(&x0) {
                            *xj = bj + 0.5 * (*xj - bj);
                        }
                        p.1 = eval(&p.0, &mut evals);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let improved = simplex[0].1 < best.1 - tol;
        if simplex[0].1 < best.1 {
            best = simplex[0].clone();
        }
        if !improved && converged || evals >= max_evals {
            break;
        }
        scale = 0.5;
    }
    NmResult {
        theta: best.0,
        value: best.1,
        converged,
    }
}

fn random_start(class: ParamClass, atoms: usize, m_max: f64, rng: &mut impl Rng) -> Vec<f64> {
    let mut q: Vec<f64> = (0..atoms).map(|_| rng.random::<f64>()).collect();
    q.sort_by(f64::total_cmp);
    let mut m: Vec<f64> = match class {
        ParamClass::U => {
            let mut m: Vec<f64> = (0..atoms).map(|_| 3.0 * Distribution::<f64>::sample(&Exp1, rng)).collect();
            m.sort_by(f64::total_cmp);
            m
        }
        ParamClass::L { .. } => (0..atoms).map(|_| 6.0 * rng.random::<f64>()).collect(),
    };
    m.iter_mut().for_each(|v| *v = v.min(m_max));
    q.extend(m);
    q
}

fn steps_for(theta: &[f64]) -> Vec<f64> {
    let a = theta.len() / 2;
    theta
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if i < a {
                if v > 0.9 {
                    -0.1
                } else {
                    0.1
                }
            } else {
                (0.3 * v).max(0.5)
            }
        })
        .collect()
}

/// Minimize `P(μ)` over `μ` in `class` with at most `k` atoms (`k = 0`
/// means `μ ≡ 0`).
pub fn minimize_functional(spec: &MixtureSpec, class: ParamClass, k: usize, config: &OptimizerConfig) -> Result<Minimum> {
    if !(config.m_max > 0.0) || config.max_evals == 0 {
        return Err(Error::param("optimizer needs m_max > 0 and max_evals > 0"));
    }
    if let ParamClass::L { tv_budget } = class {
        if !(tv_budget >= 0.0) {
            return Err(Error::param("total-variation budget must be nonnegative"));
        }
    }
    let problem = Problem {
        spec,
        class,
        m_max: config.m_max,
        grid: config.grid,
    };
    let zero = OrderParam::zero().with_class(class)?;
    let zero_value = problem.value(&zero);
    let mut trace = OptimizerTrace {
        evaluations: vec![Evaluation {
            atoms: 0,
            start: 0,
            value: zero_value,
        }],
        ladder: vec![LadderStep {
            atoms: 0,
            value: zero_value,
            start: None,
            converged: true,
            order: zero.clone(),
        }],
    };
    let mut best = (zero, zero_value);
    let mut converged = true;
    let warm = match &config.warm_start {
        Some(w) => Some(w.with_class(class)?),
        None => None,
    };

    for atoms in 1..=k {
        let stream = RngStream::new(config.seed, format!("parisi/{}/{atoms}", class.name()));
        let mut starts: Vec<(usize, Vec<f64>)> = Vec::new();
        starts.push((0, encode(&best.0, atoms).expect("previous optimum has fewer atoms")));
        for s in 0..config.starts {
            starts.push((s + 1, random_start(class, atoms, config.m_max, &mut stream.unit(s as u64))));
        }
        if let Some(theta) = warm.as_ref().and_then(|w| encode(w, atoms)) {
            starts.push((config.starts + 1, theta));
        }
        let results: Vec<(usize, NmResult, Vec<f64>)> = starts
            .into_par_iter()
            .map(|(idx, theta0)| {
                let mut values = Vec::new();
                let mut f = |theta: &[f64]| {
                    let v = problem.value(&problem.decode(theta));
                    values.push(v);
                    v
                };
                let r = nelder_mead(&mut f, &theta0, &steps_for(&theta0), config.max_evals, config.tolerance);
                (idx, r, values)
            })
            .collect();
        let mut level: Option<(usize, OrderParam, f64)> = None;
        for (idx, r, values) in results {
            trace.evaluations.extend(values.into_iter().map(|value| Evaluation { atoms, start: idx, value }));
            converged &= r.converged;
            if level.as_ref().is_none_or(|(_, _, v)| r.value < *v) {
                level = Some((idx, problem.decode(&r.theta), r.value));
            }
        }
        let (idx, order, value) = level.expect("at least one start");
        let step_converged = true;
        if value < best.1 - ATOM_TIE {
            best = (order.clone(), value);
            trace.ladder.push(LadderStep {
                atoms,
                value,
                start: Some(idx),
                converged: step_converged,
                order,
            });
        } else {
            trace.ladder.push(LadderStep {
                atoms,
                value: best.1,
                start: None,
                converged: step_converged,
                order: best.0.clone(),
            });
        }
    }

    let value = parisi_functional(&best.0, spec, &config.grid)?;
    Ok(Minimum {
        order: best.0,
        value,
        converged,
        trace,
    })
}

/// Minimize over `U` and then over `L` with total-variation budget equal to
/// the value cap, warm-starting `L` from the `U` optimum.
pub fn minimize_paired(spec: &MixtureSpec, k: usize, config: &OptimizerConfig) -> Result<PairedMinimum> {
    let u = minimize_functional(spec, ParamClass::U, k, config)?;
    let tv_budget = config.m_max;
    let l_config = OptimizerConfig {
        warm_start: Some(u.order.clone()),
        ..config.clone()
    };
    let l = minimize_functional(spec, ParamClass::L { tv_budget }, k, &l_config)?;
    if l.value.value > u.value.value + ATOM_TIE {
        return Err(Error::param(format!(
            "class nesting violated: inf over L = {} > inf over U = {}",
            l.value.value, u.value.value
        )));
    }
    let gap = u.value.value - l.value.value;
    Ok(PairedMinimum { u, l, tv_budget, gap })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotonic_projection() {
        let mut v = vec![3.0, 1.0, 2.0, 5.0, 4.0];
        isotonic(&mut v);
        assert_eq!(v, vec![2.0, 2.0, 2.0, 4.5, 4.5]);
    }

    #[test]
    fn nelder_mead_quadratic() {
        let mut f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2);
        let r = nelder_mead(&mut f, &[0.0, 0.0], &[0.5, 0.5], 2000, 1e-14);
        assert!(r.converged);
        assert!((r.theta[0] - 1.0).abs() < 1e-5 && (r.theta[1] + 2.0).abs() < 1e-5);
    }

    #[test]
    fn padding_preserves_the_order_parameter() {
        let mu = OrderParam::from_atoms(&[0.1, 0.6], &[1.0, 4.0], ParamClass::U).unwrap();
        let theta = encode(&mu, 4).unwrap();
        let p = Problem {
            spec: &MixtureSpec::pure(2).unwrap(),
            class: ParamClass::U,
            m_max: 100.0,
            grid: PdeGrid::default(),
        };
        assert_eq!(p.decode(&theta), mu);
        assert!(encode(&mu, 1).is_none());
    }

    #[test]
    fn projection_respects_class() {
        let spec = MixtureSpec::pure(2).unwrap();
        let p = Problem {
            spec: &spec,
            class: ParamClass::L { tv_budget: 4.0 },
            m_max: 100.0,
            grid: PdeGrid::default(),
        };
        let mu = p.decode(&[0.5, 0.2, 9.0, 1.0]);
        assert!(mu.total_variation() <= 4.0 + 1e-12);
        let p = Problem { class: ParamClass::U, ..p };
        let mu = p.decode(&[0.5, 0.2, 9.0, 1.0]);
        assert!(mu.values().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn zero_budget_returns_zero_order_parameter() {
        let spec = MixtureSpec::pure(2).unwrap();
        let r = minimize_functional(&spec, ParamClass::U, 0, &OptimizerConfig::default()).unwrap();
        assert_eq!(r.order, OrderParam::zero());
        assert!((r.value.value - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-12);
        assert_eq!(r.trace.evaluations.len(), 1);
    }
}
