use super::SpinConfig;
use crate::error::{Error, Result};
use crate::instances::GaussianTensor;

/// The p-spin objective and its multilinear extension to `[-1, 1]^n`.
///
/// For `p = 2` a dense symmetric coupling matrix is cached so energies and
/// gradients are matrix-vector products. For `p >= 3` the tuple list of
/// every spin is cached for single-flip updates.
#[derive(Debug, Clone)]
pub struct Hamiltonian<'a> {
    tensor: &'a GaussianTensor,
    scale: f64,
    matrix: Option<Vec<f64>>,
    incidence: Option<Vec<Incidence>>,
}

/// Tuples containing one spin: entry indices and the other `p - 1` members.
#[derive(Debug, Clone, Default)]
struct Incidence {
    entries: Vec<u32>,
    others: Vec<u32>,
}

impl<'a> Hamiltonian<'a> {
    pub fn new(tensor: &'a GaussianTensor) -> Self {
        let n = tensor.n();
        let p = tensor.p();
        let scale = (n as f64).powf(-((p + 1) as f64) / 2.0);
        let matrix = (p == 2).then(|| tensor.pair_matrix());
        Self {
            tensor,
            scale,
            matrix,
            incidence: None,
        }
    }

    pub fn n(&self) -> usize {
        self.tensor.n()
    }

    pub fn p(&self) -> usize {
        self.tensor.p()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn tensor(&self) -> &GaussianTensor {
        self.tensor
    }

    pub(crate) fn matrix(&self) -> Option<&[f64]> {
        self.matrix.as_deref()
    }

    fn ensure_incidence(&mut self) {
        if self.incidence.is_none() && self.p() > 2 {
            let mut inc = vec![Incidence::default(); self.n()];
            let mut idx = 0u32;
            self.tensor.for_each(|t, _| {
                for &i in t {
                    inc[i].entries.push(idx);
                    inc[i].others.extend(t.iter().filter(|&&k| k != i).map(|&k| k as u32));
                }
                idx += 1;
            });
            self.incidence = Some(inc);
        }
    }

    /// Energy of a real point (the multilinear extension); equals the
    /// Hamiltonian on cube corners.
    pub fn energy_at(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n());
        if let Some(a) = &self.matrix {
            let n = self.n();
            let mut acc = 0.0;
            for i in 0..n {
                let row = &a[i * n..(i + 1) * n];
                let mut s = 0.0;
                for j in i + 1..n {
                    s += row[j] * x[j];
                }
                acc += x[i] * s;
            }
            return self.scale * acc;
        }
        let mut acc = 0.0;
        self.tensor.for_each(|t, v| {
            acc += v * t.iter().map(|&i| x[i]).product::<f64>();
        });
        self.scale * acc
    }

    pub fn energy_spins(&self, s: &SpinConfig) -> f64 {
        self.energy_at(&s.as_f64())
    }

    /// Exact gradient of the multilinear extension.
    pub fn gradient_at(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        if let Some(a) = &self.matrix {
            return (0..n)
                .map(|i| self.scale * a[i * n..(i + 1) * n].iter().zip(x).map(|(aij, xj)| aij * xj).sum::<f64>())
                .collect();
        }
        let p = self.p();
        let mut g = vec![0.0; n];
        let mut prefix = vec![1.0; p + 1];
        self.tensor.for_each(|t, v| {
            for k in 0..p {
                prefix[k + 1] = prefix[k] * x[t[k]];
            }
            let mut suffix = 1.0;
            for k in (0..p).rev() {
                g[t[k]] += v * prefix[k] * suffix;
                suffix *= x[t[k]];
            }
        });
        for gi in &mut g {
            *gi *= self.scale;
        }
        g
    }

    /// Energy change from flipping spin `i` of `s`. For `p = 2` `fields`
    /// must hold `A s`.
    pub(crate) fn flip_delta(&mut self, s: &[i8], i: usize, fields: Option<&[f64]>) -> f64 {
        if let Some(h) = fields {
            return -2.0 * self.scale * s[i] as f64 * h[i];
        }
        self.ensure_incidence();
        let inc = &self.incidence.as_ref().unwrap()[i];
        let entries = self.tensor.entries();
        let q = self.p() - 1;
        let mut acc = 0.0;
        for (e, others) in inc.entries.iter().zip(inc.others.chunks_exact(q)) {
            let prod: i32 = others.iter().map(|&k| s[k as usize] as i32).product();
            acc += entries[*e as usize] * prod as f64;
        }
        -2.0 * self.scale * s[i] as f64 * acc
    }
}

fn check_dims(j: &GaussianTensor, len: usize) -> Result<()> {
    if j.n() != len {
        return Err(Error::param(format!("tensor has n = {}, configuration has {len}", j.n())));
    }
    Ok(())
}

pub fn energy(j: &GaussianTensor, s: &SpinConfig) -> Result<f64> {
    check_dims(j, s.len())?;
    Ok(Hamiltonian::new(j).energy_spins(s))
}

pub fn energy_gradient(j: &GaussianTensor, x: &[f64]) -> Result<Vec<f64>> {
    check_dims(j, x.len())?;
    Ok(Hamiltonian::new(j).gradient_at(x))
}
