use crate::error::{Error, Result};
use crate::rng::RngStream;
use rand::Rng;

/// Undirected simple graph on `0..n` stored as symmetric adjacency bit rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ErGraph {
    n: usize,
    edge_prob: f64,
    avg_degree: Option<f64>,
    words_per_row: usize,
    rows: Vec<u64>,
    pub origin: RngStream,
}

/// Lexicographic index of the pair `i < j` among all `C(n, 2)` pairs.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Inverse of [`pair_index`].
pub fn pair_of_index(n: usize, mut idx: usize) -> (usize, usize) {
    let mut i = 0;
    loop {
        let row = n - i - 1;
        if idx < row {
            return (i, i + 1 + idx);
        }
        idx -= row;
        i += 1;
    }
}

impl ErGraph {
    /// Graph with no edges. `edge_prob` records the model it is drawn from.
    pub fn empty(n: usize) -> Self {
        let words_per_row = n.div_ceil(64).max(1);
        Self {
            n,
            edge_prob: 0.0,
            avg_degree: None,
            words_per_row,
            rows: vec![0; n * words_per_row],
            origin: RngStream::new(0, "manual"),
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(Error::param(format!("bad edge ({a}, {b}) for n = {n}")));
            }
            g.set_edge(a, b, true);
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                g.set_edge(i, j, true);
            }
        }
        g.edge_prob = 1.0;
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            g.set_edge(i, (i + 1) % n, true);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 1..n {
            g.set_edge(i - 1, i, true);
        }
        g
    }

    pub(crate) fn with_model(mut self, edge_prob: f64, avg_degree: Option<f64>) -> Self {
        self.edge_prob = edge_prob;
        self.avg_degree = avg_degree;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_prob(&self) -> f64 {
        self.edge_prob
    }

    pub fn avg_degree(&self) -> Option<f64> {
        self.avg_degree
    }

    pub fn pair_count(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    /// Adjacency row of `v` as packed bits.
    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words_per_row..(v + 1) * self.words_per_row]
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        (self.rows[i * self.words_per_row + j / 64] >> (j % 64)) & 1 == 1
    }

    pub fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        assert!(i != j, "self-loops are not allowed");
        for (a, b) in [(i, j), (j, i)] {
            let w = &mut self.rows[a * self.words_per_row + b / 64];
            if present {
                *w |= 1 << (b % 64);
            } else {
                *w &= !(1 << (b % 64));
            }
        }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).filter(move |&j| self.has_edge(i, j)).map(move |j| (i, j)))
    }

    pub fn complement(&self) -> Self {
        let mut g = Self::empty(self.n);
        for i in 0..self.n {
            for j in i + 1..self.n {
                if !self.has_edge(i, j) {
                    g.set_edge(i, j, true);
                }
            }
        }
        g.edge_prob = 1.0 - self.edge_prob;
        g.origin = self.origin.clone();
        g
    }

    /// Plain-text edge list: a `n m` header line then one `i j` line per edge (0-based).
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edge_count());
        for (i, j) in self.edges() {
            s.push_str(&format!("{i} {j}\n"));
        }
        s
    }
}

/// `G(n, edge_prob)`: each pair present independently with `edge_prob`.
pub fn gen_er_graph(n: usize, edge_prob: f64, rng: &RngStream) -> Result<ErGraph> {
    if n == 0 {
        return Err(Error::param("graph needs n >= 1"));
    }
    if !(0.0..=1.0).contains(&edge_prob) || edge_prob.is_nan() {
        return Err(Error::param(format!("edge probability {edge_prob} outside [0, 1]")));
    }
    let mut g = ErGraph::empty(n).with_model(edge_prob, None);
    let mut r = rng.rng();
    for i in 0..n {
        for j in i + 1..n {
            if r.random::<f64>() < edge_prob {
                g.set_edge(i, j, true);
            }
        }
    }
    g.origin = rng.clone();
    Ok(g)
}

/// Sparse model `G(n, d/n)`.
pub fn gen_sparse_graph(n: usize, avg_degree: f64, rng: &RngStream) -> Result<ErGraph> {
    if n == 0 {
        return Err(Error::param("graph needs n >= 1"));
    }
    if avg_degree < 0.0 || avg_degree > n as f64 {
        return Err(Error::param(format!("average degree {avg_degree} outside [0, n]")));
    }
    let g = gen_er_graph(n, avg_degree / n as f64, rng)?;
    Ok(g.with_model(avg_degree / n as f64, Some(avg_degree)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probability_one_and_zero() {
        let g = gen_er_graph(3, 1.0, &RngStream::new(5, "g")).unwrap();
        assert_eq!(g.edge_count(), 3);
        let g = gen_er_graph(5, 0.0, &RngStream::new(5, "g")).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn invalid_probability() {
        assert!(matches!(gen_er_graph(4, 1.5, &RngStream::new(0, "")), Err(Error::Parameter(_))));
        assert!(matches!(gen_er_graph(4, -0.1, &RngStream::new(0, "")), Err(Error::Parameter(_))));
        assert!(matches!(gen_er_graph(4, f64::NAN, &RngStream::new(0, "")), Err(Error::Parameter(_))));
    }

    #[test]
    fn symmetric_no_loops() {
        let g = gen_er_graph(70, 0.5, &RngStream::new(1, "sym")).unwrap();
        for i in 0..70 {
            assert!(!g.has_edge(i, i));
            for j in 0..70 {
                assert_eq!(g.has_edge(i, j), g.has_edge(j, i));
            }
        }
        assert!(g.edge_count() <= 70 * 69 / 2);
    }

    #[test]
    fn deterministic() {
        let a = gen_er_graph(40, 0.3, &RngStream::new(11, "x")).unwrap();
        let b = gen_er_graph(40, 0.3, &RngStream::new(11, "x")).unwrap();
        let c = gen_er_graph(40, 0.3, &RngStream::new(12, "x")).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.rows, c.rows);
    }

    #[test]
    fn pair_index_bijection() {
        let n = 9;
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(pair_index(n, i, j), k);
                assert_eq!(pair_of_index(n, k), (i, j));
                k += 1;
            }
        }
    }

    #[test]
    fn dense_edge_count_concentrates() {
        // Binomial(499500, 1/2): sd = sqrt(499500)/2 ≈ 353.4.
        let n = 1000;
        let t = (n * (n - 1) / 2) as f64;
        let sd = (t * 0.25).sqrt();
        let mut excursions = 0;
        for s in 0..100 {
            let g = gen_er_graph(n, 0.5, &RngStream::new(s, "dense")).unwrap();
            if (g.edge_count() as f64 - t / 2.0).abs() > 4.0 * sd {
                excursions += 1;
            }
        }
        assert!(excursions <= 1, "{excursions} excursions beyond 4 sd");
    }
}
