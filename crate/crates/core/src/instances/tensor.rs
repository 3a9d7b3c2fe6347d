//! Gaussian p-tensors over strictly increasing index tuples.
//!
//! Entries are stored flat in colexicographic order: the tuple
//! `i_1 < ... < i_p` (0-based) sits at `sum_k C(i_k, k)`, `k = 1..=p`.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use rand::Rng;
use rand_distr::StandardNormal;

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTensor {
    n: usize,
    p: usize,
    entries: Vec<f64>,
    pub origin: RngStream,
}

impl GaussianTensor {
    /// Tensor with explicit entries in colex order.
    pub fn from_entries(n: usize, p: usize, entries: Vec<f64>) -> Result<Self> {
        if p < 2 || p > n {
            return Err(Error::param(format!("need 2 <= p <= n, got p = {p}, n = {n}")));
        }
        let len = binomial(n, p).ok_or_else(|| Error::param("C(n, p) overflows"))?;
        if entries.len() != len {
            return Err(Error::param(format!("expected {len} entries, got {}", entries.len())));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("tensor entries must be finite"));
        }
        Ok(Self {
            n,
            p,
            entries,
            origin: RngStream::new(0, "manual"),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [f64] {
        &mut self.entries
    }

    /// Flat index of a strictly increasing tuple.
    pub fn index_of(&self, tuple: &[usize]) -> usize {
        colex_index(tuple)
    }

    pub fn tuple_of(&self, index: usize) -> Vec<usize> {
        colex_tuple(index, self.p)
    }

    pub fn get(&self, tuple: &[usize]) -> f64 {
        self.entries[colex_index(tuple)]
    }

    /// Visit every `(tuple, value)` in storage order.
    pub fn for_each(&self, mut f: impl FnMut(&[usize], f64)) {
        let mut tuple: Vec<usize> = (0..self.p).collect();
        for &v in &self.entries {
            f(&tuple, v);
            next_colex(&mut tuple);
        }
    }

    /// Symmetric `n x n` matrix with `A[i][j] = J_{ij}` off the diagonal (p = 2 only).
    pub fn pair_matrix(&self) -> Vec<f64> {
        assert_eq!(self.p, 2);
        let n = self.n;
        let mut a = vec![0.0; n * n];
        self.for_each(|t, v| {
            a[t[0] * n + t[1]] = v;
            a[t[1] * n + t[0]] = v;
        });
        a
    }
}

pub(crate) fn colex_index(tuple: &[usize]) -> usize {
    tuple
        .iter()
        .enumerate()
        .map(|(k, &i)| binomial(i, k + 1).unwrap_or(0))
        .sum()
}

pub(crate) fn colex_tuple(mut index: usize, p: usize) -> Vec<usize> {
    let mut out = vec![0; p];
    for k in (1..=p).rev() {
        // largest c with C(c, k) <= index
        let mut c = k - 1;
        while binomial(c + 1, k).unwrap_or(usize::MAX) <= index {
            c += 1;
        }
        out[k - 1] = c;
        index -= binomial(c, k).unwrap_or(0);
    }
    out
}

/// Advance to the next tuple in colex order.
pub(crate) fn next_colex(t: &mut [usize]) {
    let p = t.len();
    for k in 0..p {
        let limit = if k + 1 < p { t[k + 1] } else { usize::MAX };
        if t[k] + 1 < limit {
            t[k] += 1;
            for (j, x) in t.iter_mut().enumerate().take(k) {
                *x = j;
            }
            return;
        }
    }
}

/// `C(n, p)` independent standard normal entries.
pub fn gen_gaussian_tensor(n: usize, p: usize, rng: &RngStream) -> Result<GaussianTensor> {
    if p < 2 {
        return Err(Error::param(format!("interaction order p = {p} must be >= 2")));
    }
    if p > n {
        return Err(Error::param(format!("interaction order p = {p} exceeds n = {n}")));
    }
    let len = binomial(n, p).ok_or_else(|| Error::param("C(n, p) overflows"))?;
    let mut r = rng.rng();
    let entries = (0..len).map(|_| r.sample::<f64, _>(StandardNormal)).collect();
    let mut t = GaussianTensor::from_entries(n, p, entries)?;
    t.origin = rng.clone();
    Ok(t)
}
