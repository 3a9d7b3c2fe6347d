use crate::bits::BitConfig;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Components smaller than this count as outliers by default.
pub const DEFAULT_SIZE_FLOOR: usize = 2;

/// Connected components of a solution set under "Hamming distance <= r".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub n: usize,
    pub radius: usize,
    pub size_floor: usize,
    /// Component of each input solution, numbered by first appearance.
    pub labels: Vec<usize>,
    /// Component sizes indexed by label.
    pub components: Vec<usize>,
    /// Minimum Hamming distance between solutions in different components;
    /// `None` with fewer than two components.
    pub separation: Option<usize>,
    /// Fraction of solutions in components smaller than `size_floor`.
    pub outlier_mass: f64,
}

impl ClusterReport {
    /// `separation / n`.
    pub fn separation_fraction(&self) -> Option<f64> {
        self.separation.map(|d| d as f64 / self.n as f64)
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

pub fn cluster_solutions(solutions: &[BitConfig], radius: usize) -> Result<ClusterReport> {
    cluster_solutions_with_floor(solutions, radius, DEFAULT_SIZE_FLOOR)
}

/// Components via neighbourhood lookups when the Hamming ball of radius `r`
/// is smaller than the set, otherwise via all pairs.
pub fn cluster_solutions_with_floor(solutions: &[BitConfig], radius: usize, size_floor: usize) -> Result<ClusterReport> {
    let k = solutions.len();
    let n = solutions.first().map_or(0, BitConfig::len);
    if solutions.iter().any(|s| s.len() != n) {
        return Err(Error::param("solutions have different lengths"));
    }
    let mut dsu = Dsu((0..k).collect());
    let ball: f64 = (1..=radius.min(n)).map(|i| binom(n, i)).sum();
    if n <= 64 && ball < k as f64 {
        let index: HashMap<u64, usize> = solutions.iter().enumerate().map(|(i, s)| (mask_of(s), i)).collect();
        for (i, s) in solutions.iter().enumerate() {
            for_each_in_ball(mask_of(s), n, radius, &mut |m| {
                if let Some(&j) = index.get(&m) {
                    dsu.union(i, j);
                }
            });
        }
    } else {
        for a in 0..k {
            for b in a + 1..k {
                if solutions[a].hamming(&solutions[b]) <= radius {
                    dsu.union(a, b);
                }
            }
        }
    }
    // labels by first appearance
    let mut label_of_root = HashMap::new();
    let mut labels = Vec::with_capacity(k);
    let mut components = Vec::new();
    for i in 0..k {
        let root = dsu.find(i);
        let next = label_of_root.len();
        let l = *label_of_root.entry(root).or_insert(next);
        if l == components.len() {
            components.push(0);
        }
        components[l] += 1;
        labels.push(l);
    }
    let mut separation: Option<usize> = None;
    if components.len() > 1 {
        'outer: for a in 0..k {
            for b in a + 1..k {
                if labels[a] != labels[b] {
                    let d = solutions[a].hamming(&solutions[b]);
                    if separation.is_none_or(|s| d < s) {
                        separation = Some(d);
                        if d == radius + 1 {
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    let outliers: usize = components.iter().filter(|&&c| c < size_floor).sum();
    Ok(ClusterReport {
        n,
        radius,
        size_floor,
        labels,
        components,
        separation,
        outlier_mass: if k == 0 { 0.0 } else { outliers as f64 / k as f64 },
    })
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn mask_of(s: &BitConfig) -> u64 {
    s.members().iter().fold(0u64, |m, &i| m | 1 << i)
}

/// Calls `f` on every mask at Hamming distance 1..=r from `m`.
fn for_each_in_ball(m: u64, n: usize, r: usize, f: &mut impl FnMut(u64)) {
    fn rec(m: u64, from: usize, n: usize, left: usize, f: &mut impl FnMut(u64)) {
        for i in from..n {
            let x = m ^ (1 << i);
            f(x);
            if left > 1 {
                rec(x, i + 1, n, left - 1, f);
            }
        }
    }
    if r > 0 {
        rec(m, 0, n, r, f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::gen_ksat;
    use crate::ksat::enumerate_solutions;
    use crate::rng::RngStream;
    use std::collections::VecDeque;

    /// Plain BFS over the explicit "distance <= r" graph.
    fn bfs_labels(s: &[BitConfig], r: usize) -> Vec<usize> {
        let mut label = vec![usize::MAX; s.len()];
        let mut next = 0;
        for start in 0..s.len() {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            let mut q = VecDeque::from([start]);
            while let Some(u) = q.pop_front() {
                for v in 0..s.len() {
                    if label[v] == usize::MAX && s[u].hamming(&s[v]) <= r {
                        label[v] = next;
                        q.push_back(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    #[test]
    fn two_variable_clause() {
        let s: Vec<BitConfig> = ["10", "01", "11"]
            .iter()
            .map(|b| BitConfig::from_bools(&b.chars().map(|c| c == '1').collect::<Vec<_>>()))
            .collect();
        let r = cluster_solutions(&s, 1).unwrap();
        assert_eq!(r.components, vec![3]);
        assert_eq!(r.separation, None);
        assert_eq!(r.outlier_mass, 0.0);
    }

    #[test]
    fn antipodal_pair() {
        let a = BitConfig::from_mask(9, 0b1_0101_0101);
        let r = cluster_solutions(&[a.clone(), a.complement()], 1).unwrap();
        assert_eq!(r.components, vec![1, 1]);
        assert_eq!(r.separation, Some(9));
        assert_eq!(r.separation_fraction(), Some(1.0));
        assert_eq!(r.outlier_mass, 1.0);
    }

    #[test]
    fn empty_set() {
        let r = cluster_solutions(&[], 1).unwrap();
        assert!(r.components.is_empty() && r.labels.is_empty());
        assert_eq!(r.outlier_mass, 0.0);
    }

    #[test]
    fn matches_bfs_on_ksat_solution_sets() {
        let mut checked = 0;
        for seed in 0..60u64 {
            let n = 8 + (seed % 9) as usize;
            let c = 2.5 + (seed % 5) as f64 * 0.4;
            let f = gen_ksat(n, (c * n as f64).round() as usize, 3, &RngStream::new(seed, "cl")).unwrap();
            let sols = enumerate_solutions(&f).unwrap();
            if sols.len() > 3000 {
                continue;
            }
            for r in [1, 2] {
                let rep = cluster_solutions(&sols, r).unwrap();
                assert_eq!(rep.labels, bfs_labels(&sols, r), "seed {seed} r {r}");
                assert_eq!(rep.components.iter().sum::<usize>(), sols.len());
                if let Some(d) = rep.separation {
                    assert!(d > r);
                }
            }
            checked += 1;
        }
        assert!(checked >= 30);
    }
}
