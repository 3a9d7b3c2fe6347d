//! Interpolation between an instance and an independent copy of it.
//!
//! Units (vertex pairs, tensor entries, clauses) are redrawn one at a time in
//! a seeded random order. Each redraw comes from the unit's own counter
//! substream and has the same law as the original unit, so every
//! intermediate instance has the marginal law of the model and the endpoint
//! is independent of the base.

use super::graph::pair_of_index;
use super::ksat::draw_clause;
use super::Instance;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct InterpolationPath {
    base: Instance,
    unit_order: Vec<usize>,
    draws: RngStream,
}

pub fn make_interpolation_path(base: Instance, rng: &RngStream) -> InterpolationPath {
    let mut unit_order: Vec<usize> = (0..base.unit_count()).collect();
    unit_order.shuffle(&mut rng.child("order").rng());
    InterpolationPath {
        base,
        unit_order,
        draws: rng.child("draws"),
    }
}

impl InterpolationPath {
    pub fn base(&self) -> &Instance {
        &self.base
    }

    /// Total number of resampling steps `T`.
    pub fn len(&self) -> usize {
        self.unit_order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unit_order.is_empty()
    }

    pub fn unit_order(&self) -> &[usize] {
        &self.unit_order
    }

    /// Stream label feeding the redraw of `unit`.
    pub fn step_label(&self, unit: usize) -> String {
        format!("{}#{unit}", self.draws.label)
    }

    /// `R_t`: the base with units `unit_order[..t]` redrawn.
    pub fn instance_at(&self, t: usize) -> Result<Instance> {
        if t > self.len() {
            return Err(Error::param(format!("path position {t} outside 0..={}", self.len())));
        }
        let mut inst = self.base.clone();
        for step in 1..=t {
            self.apply_step(&mut inst, step);
        }
        if t > 0 {
            self.relabel(&mut inst, t);
        }
        Ok(inst)
    }

    /// Advance an instance at position `step - 1` to position `step`.
    pub fn apply_step(&self, inst: &mut Instance, step: usize) {
        let unit = self.unit_order[step - 1];
        let mut r = self.draws.unit(unit as u64);
        match inst {
            Instance::Graph(g) => {
                let (i, j) = pair_of_index(g.n(), unit);
                let p = g.edge_prob();
                g.set_edge(i, j, r.random::<f64>() < p);
            }
            Instance::Tensor(t) => {
                t.entries_mut()[unit] = r.sample(StandardNormal);
            }
            Instance::KSat(f) => {
                let (n, k) = (f.n(), f.k());
                f.clauses_mut()[unit] = draw_clause(n, k, &mut r);
            }
        }
    }

    pub(crate) fn relabel(&self, inst: &mut Instance, t: usize) {
        let base = self.base.origin();
        let origin = RngStream::new(base.seed, format!("{}@{}:{t}", base.label, self.draws.label));
        match inst {
            Instance::Graph(g) => g.origin = origin,
            Instance::Tensor(x) => x.origin = origin,
            Instance::KSat(f) => f.origin = origin,
        }
    }

    /// Instances at each of `positions` (nondecreasing), computed in one pass.
    pub fn instances_at(&self, positions: &[usize]) -> Result<Vec<Instance>> {
        if positions.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::param("path positions must be nondecreasing"));
        }
        if let Some(&last) = positions.last() {
            if last > self.len() {
                return Err(Error::param(format!("path position {last} outside 0..={}", self.len())));
            }
        }
        let mut out = Vec::with_capacity(positions.len());
        let mut cur = self.base.clone();
        let mut at = 0;
        for &t in positions {
            while at < t {
                at += 1;
                self.apply_step(&mut cur, at);
            }
            let mut snap = cur.clone();
            if t > 0 {
                self.relabel(&mut snap, t);
            }
            out.push(snap);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_er_graph, gen_gaussian_tensor, gen_ksat};

    fn paths() -> Vec<InterpolationPath> {
        let s = RngStream::new(4, "base");
        vec![
            make_interpolation_path(gen_er_graph(12, 0.4, &s).unwrap().into(), &RngStream::new(4, "p")),
            make_interpolation_path(gen_gaussian_tensor(6, 3, &s).unwrap().into(), &RngStream::new(4, "p")),
            make_interpolation_path(gen_ksat(8, 20, 3, &s).unwrap().into(), &RngStream::new(4, "p")),
        ]
    }

    #[test]
    fn zero_steps_is_base() {
        for p in paths() {
            assert_eq!(&p.instance_at(0).unwrap(), p.base());
        }
    }

    #[test]
    fn out_of_range() {
        for p in paths() {
            assert!(matches!(p.instance_at(p.len() + 1), Err(Error::Parameter(_))));
        }
    }

    #[test]
    fn only_applied_units_change() {
        let p = &paths()[1];
        let t = 7;
        let a = p.instance_at(t).unwrap();
        let base = p.base().as_tensor().unwrap();
        let a = a.as_tensor().unwrap();
        let touched: std::collections::HashSet<usize> = p.unit_order()[..t].iter().copied().collect();
        for i in 0..base.len() {
            if !touched.contains(&i) {
                assert_eq!(base.entries()[i], a.entries()[i]);
            } else {
                assert_ne!(base.entries()[i], a.entries()[i]);
            }
        }
    }

    #[test]
    fn batch_matches_single() {
        for p in paths() {
            let pos = [0, 1, 5, 5, p.len()];
            let batch = p.instances_at(&pos).unwrap();
            for (t, inst) in pos.iter().zip(batch) {
                assert_eq!(inst, p.instance_at(*t).unwrap());
            }
        }
    }

    #[test]
    fn clause_redraw_keeps_k() {
        let p = &paths()[2];
        let end = p.instance_at(p.len()).unwrap();
        let f = end.as_ksat().unwrap();
        assert_eq!(f.m(), 20);
        assert!(f.clauses().iter().all(|c| c.len() == 3));
    }
}
