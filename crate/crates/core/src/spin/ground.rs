use super::{Hamiltonian, SpinConfig};
use crate::error::{Error, Result};
use crate::instances::GaussianTensor;

pub const GROUND_STATE_CAP_P2: usize = 24;
pub const GROUND_STATE_CAP_PGE3: usize = 18;

/// Exact maximizer over all of `{-1, 1}^n` by Gray-code enumeration.
///
/// For even `p` only configurations with the first spin `+1` are visited
/// and the returned representative has `σ_1 = +1`. The returned energy is
/// re-evaluated from scratch at the optimum.
pub fn brute_force_ground_state(j: &GaussianTensor) -> Result<(SpinConfig, f64)> {
    let n = j.n();
    let p = j.p();
    let cap = if p == 2 { GROUND_STATE_CAP_P2 } else { GROUND_STATE_CAP_PGE3 };
    if n > cap {
        return Err(Error::Capacity {
            what: "brute_force_ground_state",
            n,
            cap,
        });
    }
    let mut h = Hamiltonian::new(j);
    let offset = usize::from(p % 2 == 0);
    let free = n - offset;

    let mut s = vec![1i8; n];
    let mut fields: Option<Vec<f64>> = h.matrix().map(|a| (0..n).map(|i| a[i * n..(i + 1) * n].iter().sum()).collect());
    let mut e = h.energy_at(&vec![1.0; n]);
    let mut best_e = e;
    let mut best = s.clone();

    for k in 1u64..(1u64 << free) {
        let i = offset + k.trailing_zeros() as usize;
        e += h.flip_delta(&s, i, fields.as_deref());
        if let (Some(f), Some(a)) = (fields.as_mut(), h.matrix()) {
            let c = -2.0 * s[i] as f64;
            for (fj, aij) in f.iter_mut().zip(&a[i * n..(i + 1) * n]) {
                *fj += c * aij;
            }
        }
        s[i] = -s[i];
        if e > best_e {
            best_e = e;
            best.copy_from_slice(&s);
        }
    }
    let best = SpinConfig::new(best)?;
    let value = h.energy_spins(&best);
    Ok((best, value))
}
