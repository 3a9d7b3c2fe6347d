//! Cliques and independent sets: greedy scans, an exact branch-and-bound
//! oracle, and first-moment curves.

use crate::error::{Error, Result};
use crate::instances::ErGraph;
use crate::rng::RngStream;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

pub const DEFAULT_EXACT_CAP: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubsetKind {
    Clique,
    IndependentSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSubset {
    members: Vec<usize>,
    kind: SubsetKind,
}

impl VertexSubset {
    pub fn new(mut members: Vec<usize>, kind: SubsetKind) -> Self {
        members.sort_unstable();
        members.dedup();
        Self { members, kind }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn kind(&self) -> SubsetKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    fn related(&self, g: &ErGraph, a: usize, b: usize) -> bool {
        match self.kind {
            SubsetKind::Clique => g.has_edge(a, b),
            SubsetKind::IndependentSet => !g.has_edge(a, b),
        }
    }

    /// All members in range and pairwise adjacent (clique) or non-adjacent (IS).
    pub fn verify(&self, g: &ErGraph) -> bool {
        if self.members.iter().any(|&v| v >= g.n()) {
            return false;
        }
        self.members
            .iter()
            .enumerate()
            .all(|(i, &a)| self.members[i + 1..].iter().all(|&b| self.related(g, a, b)))
    }

    /// No outside vertex can be added without breaking the property.
    pub fn is_maximal(&self, g: &ErGraph) -> bool {
        (0..g.n())
            .filter(|v| self.members.binary_search(v).is_err())
            .all(|v| self.members.iter().any(|&u| !self.related(g, u, v)))
    }
}

fn random_order(n: usize, rng: &RngStream) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng.rng());
    order
}

/// Single pass over `order`, keeping each vertex adjacent to everything kept so far.
pub fn greedy_clique_in_order(g: &ErGraph, order: &[usize]) -> VertexSubset {
    let mut cand = vec![u64::MAX; g.words_per_row()];
    let mut kept = Vec::new();
    for &v in order {
        if (cand[v / 64] >> (v % 64)) & 1 == 1 {
            kept.push(v);
            for (c, r) in cand.iter_mut().zip(g.row(v)) {
                *c &= r;
            }
        }
    }
    VertexSubset::new(kept, SubsetKind::Clique)
}

/// Single pass over `order`, keeping each vertex with no neighbour kept so far.
pub fn greedy_independent_set_in_order(g: &ErGraph, order: &[usize]) -> VertexSubset {
    let mut blocked = vec![0u64; g.words_per_row()];
    let mut kept = Vec::new();
    for &v in order {
        if (blocked[v / 64] >> (v % 64)) & 1 == 0 {
            kept.push(v);
            blocked[v / 64] |= 1 << (v % 64);
            for (b, r) in blocked.iter_mut().zip(g.row(v)) {
                *b |= r;
            }
        }
    }
    VertexSubset::new(kept, SubsetKind::IndependentSet)
}

/// Karp's greedy clique over a seeded uniform scan order.
pub fn karp_greedy_clique(g: &ErGraph, rng: &RngStream) -> VertexSubset {
    greedy_clique_in_order(g, &random_order(g.n(), rng))
}

pub fn greedy_independent_set(g: &ErGraph, rng: &RngStream) -> VertexSubset {
    greedy_independent_set_in_order(g, &random_order(g.n(), rng))
}

pub fn exact_optimum(g: &ErGraph, kind: SubsetKind) -> Result<VertexSubset> {
    exact_optimum_with_cap(g, kind, DEFAULT_EXACT_CAP)
}

/// Maximum clique or independent set by branch and bound with greedy
/// colouring bounds. Independent sets are cliques of the complement.
pub fn exact_optimum_with_cap(g: &ErGraph, kind: SubsetKind, cap: usize) -> Result<VertexSubset> {
    if g.n() > cap {
        return Err(Error::Capacity {
            what: "exact_optimum",
            n: g.n(),
            cap,
        });
    }
    let members = match kind {
        SubsetKind::Clique => max_clique(g),
        SubsetKind::IndependentSet => max_clique(&g.complement()),
    };
    Ok(VertexSubset::new(members, kind))
}

struct CliqueSearch<'a> {
    g: &'a ErGraph,
    words: usize,
    current: Vec<usize>,
    best: Vec<usize>,
}

impl CliqueSearch<'_> {
    /// Greedy sequential colouring of `p`, lowest index first. Returns
    /// vertices in colour order together with their colour numbers.
    fn colour(&self, p: &[u64]) -> (Vec<usize>, Vec<usize>) {
        let mut uncoloured = p.to_vec();
        let mut verts = Vec::new();
        let mut colours = Vec::new();
        let mut k = 0;
        while uncoloured.iter().any(|&w| w != 0) {
            k += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = first_bit(&q) {
                q[v / 64] &= !(1 << (v % 64));
                uncoloured[v / 64] &= !(1 << (v % 64));
                for (x, r) in q.iter_mut().zip(self.g.row(v)) {
                    *x &= !r;
                }
                verts.push(v);
                colours.push(k);
            }
        }
        (verts, colours)
    }

    fn expand(&mut self, mut p: Vec<u64>) {
        let (verts, colours) = self.colour(&p);
        for idx in (0..verts.len()).rev() {
            if self.current.len() + colours[idx] <= self.best.len() {
                return;
            }
            let v = verts[idx];
            self.current.push(v);
            let next: Vec<u64> = p.iter().zip(self.g.row(v)).map(|(a, b)| a & b).collect();
            if next.iter().all(|&w| w == 0) {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            p[v / 64] &= !(1 << (v % 64));
        }
    }
}

fn first_bit(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

fn max_clique(g: &ErGraph) -> Vec<usize> {
    let n = g.n();
    if n == 0 {
        return Vec::new();
    }
    let words = g.words_per_row();
    let mut all = vec![0u64; words];
    for v in 0..n {
        all[v / 64] |= 1 << (v % 64);
    }
    let mut s = CliqueSearch {
        g,
        words,
        current: Vec::new(),
        best: vec![0],
    };
    debug_assert_eq!(s.words, all.len());
    s.expand(all);
    s.best
}

/// `log2 E[Z(x)]` for `x = 1..=n`, where `Z(x)` counts `x`-subsets whose
/// pairs all carry the relation (present with probability `edge_prob`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCurve {
    pub n: usize,
    pub edge_prob: f64,
    pub points: Vec<(usize, f64)>,
}

pub fn first_moment_curve(n: usize, edge_prob: f64) -> Result<MomentCurve> {
    if n < 2 {
        return Err(Error::param("moment curve needs n >= 2"));
    }
    if !(edge_prob > 0.0 && edge_prob <= 1.0) {
        return Err(Error::param(format!("edge probability {edge_prob} outside (0, 1]")));
    }
    let lp = edge_prob.log2();
    let mut log_binom = 0.0f64;
    let mut points = Vec::with_capacity(n);
    for x in 1..=n {
        log_binom += ((n - x + 1) as f64).log2() - (x as f64).log2();
        let pairs = (x * (x - 1) / 2) as f64;
        points.push((x, log_binom + pairs * lp));
    }
    Ok(MomentCurve { n, edge_prob, points })
}

impl MomentCurve {
    /// Curve for independent sets: a pair is "related" when absent.
    pub fn for_independent_sets(n: usize, edge_prob: f64) -> Result<Self> {
        first_moment_curve(n, 1.0 - edge_prob)
    }

    pub fn log2_expected(&self, x: usize) -> Option<f64> {
        self.points.get(x.checked_sub(1)?).map(|p| p.1)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,log2_expected_count\n");
        for (x, y) in &self.points {
            s.push_str(&format!("{x},{y}\n"));
        }
        s
    }
}

/// Largest `x` with `E[Z(x)] >= 1`.
pub fn crossing_point(curve: &MomentCurve) -> usize {
    curve
        .points
        .iter()
        .filter(|(_, y)| *y >= 0.0)
        .map(|p| p.0)
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_er_graph, gen_sparse_graph};

    /// Exhaustive 2^n search; the oracle for the branch and bound.
    fn brute_force(g: &ErGraph, kind: SubsetKind) -> usize {
        let n = g.n();
        let mut best = 0;
        for mask in 0u32..(1 << n) {
            let size = mask.count_ones() as usize;
            if size <= best {
                continue;
            }
            let vs: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if VertexSubset::new(vs, kind).verify(g) {
                best = size;
            }
        }
        best
    }

    #[test]
    fn greedy_on_fixed_graphs() {
        let k5 = ErGraph::complete(5);
        assert_eq!(karp_greedy_clique(&k5, &RngStream::new(1, "")).size(), 5);
        let e7 = ErGraph::empty(7);
        assert_eq!(karp_greedy_clique(&e7, &RngStream::new(1, "")).size(), 1);
        assert_eq!(greedy_independent_set(&e7, &RngStream::new(1, "")).size(), 7);
        // path 1-2-3 scanned as (1, 3, 2) in 1-based labels
        let p3 = ErGraph::path(3);
        let is = greedy_independent_set_in_order(&p3, &[0, 2, 1]);
        assert_eq!(is.members(), &[0, 2]);
    }

    #[test]
    fn exact_on_fixed_graphs() {
        let g = ErGraph::from_edges(4, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(exact_optimum(&g, SubsetKind::Clique).unwrap().size(), 3);
        let c5 = ErGraph::cycle(5);
        assert_eq!(exact_optimum(&c5, SubsetKind::IndependentSet).unwrap().size(), 2);
        assert_eq!(exact_optimum(&ErGraph::empty(1), SubsetKind::Clique).unwrap().size(), 1);
    }

    #[test]
    fn capacity_error() {
        let g = ErGraph::empty(90);
        assert!(matches!(exact_optimum(&g, SubsetKind::Clique), Err(Error::Capacity { .. })));
        assert!(exact_optimum_with_cap(&g, SubsetKind::Clique, 100).is_ok());
    }

    #[test]
    fn exact_matches_enumeration() {
        for s in 0..200u64 {
            let n = 4 + (s as usize % 9);
            let p = [0.2, 0.5, 0.8][s as usize % 3];
            let g = gen_er_graph(n, p, &RngStream::new(s, "bb")).unwrap();
            for kind in [SubsetKind::Clique, SubsetKind::IndependentSet] {
                let opt = exact_optimum(&g, kind).unwrap();
                assert!(opt.verify(&g));
                assert_eq!(opt.size(), brute_force(&g, kind), "seed {s} {kind:?}");
            }
        }
    }

    #[test]
    fn greedy_properties() {
        for s in 0..40u64 {
            let g = gen_er_graph(40, 0.5, &RngStream::new(s, "gp")).unwrap();
            let c = karp_greedy_clique(&g, &RngStream::new(s, "scan"));
            assert!(c.verify(&g) && c.is_maximal(&g));
            let is = greedy_independent_set(&g, &RngStream::new(s, "scan"));
            assert!(is.verify(&g) && is.is_maximal(&g));
            assert!(exact_optimum(&g, SubsetKind::Clique).unwrap().size() >= c.size());
            assert!(exact_optimum(&g, SubsetKind::IndependentSet).unwrap().size() >= is.size());
        }
    }

    #[test]
    fn sparse_greedy_independent_set_ratio() {
        let (n, d) = (4000, 50.0f64);
        let target = d.ln() / d;
        let mean = (0..30u64)
            .map(|s| {
                let g = gen_sparse_graph(n, d, &RngStream::new(s, "sparse")).unwrap();
                greedy_independent_set(&g, &RngStream::new(s, "scan")).size() as f64 / n as f64
            })
            .sum::<f64>()
            / 30.0;
        assert!(mean >= 0.6 * target && mean <= 1.4 * target, "{mean} vs {target}");
    }

    #[test]
    fn moment_values() {
        let c = first_moment_curve(10, 0.5).unwrap();
        assert!((c.log2_expected(1).unwrap() - 10f64.log2()).abs() < 1e-12);
        assert!((2f64.powf(c.log2_expected(3).unwrap()) - 15.0).abs() < 1e-9);
        assert!(first_moment_curve(1, 0.5).is_err());
        assert!(first_moment_curve(5, 0.0).is_err());
        assert!(c.to_csv().starts_with("x,log2_expected_count\n1,"));
    }

    #[test]
    fn crossing_point_asymptotics_and_monotone() {
        let mut prev = 0;
        for n in [1_000usize, 10_000, 100_000, 1_000_000] {
            let x = crossing_point(&first_moment_curve(n, 0.5).unwrap());
            let l = (n as f64).log2();
            assert!((x as f64 - 2.0 * l).abs() <= 3.0 * l.log2(), "n = {n}: x* = {x}");
            assert!(x >= prev);
            prev = x;
        }
        let mut prev = 0;
        for n in 2..300 {
            let x = crossing_point(&first_moment_curve(n, 0.5).unwrap());
            assert!(x >= prev);
            prev = x;
        }
    }
}
