//! Packed binary configurations shared by all three model families.
//!
//! A spin vector maps `+1 -> 1`, `-1 -> 0`; a vertex subset and a Boolean
//! assignment map membership / truth to `1`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitConfig {
    n: usize,
    words: Vec<u64>,
}

impl BitConfig {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut c = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            c.set(i, b);
        }
        c
    }

    /// Low `n` bits of `mask`; `n <= 64`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 64);
        let mut c = Self::zeros(n);
        if n > 0 {
            c.words[0] = if n == 64 { mask } else { mask & ((1u64 << n) - 1) };
        }
        c
    }

    pub fn from_spins(spins: &[i8]) -> Self {
        let mut c = Self::zeros(spins.len());
        for (i, &s) in spins.iter().enumerate() {
            c.set(i, s > 0);
        }
        c
    }

    pub fn from_members(n: usize, members: &[usize]) -> Self {
        let mut c = Self::zeros(n);
        for &v in members {
            c.set(v, true);
        }
        c
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        let w = &mut self.words[i / 64];
        if v {
            *w |= 1 << (i % 64);
        } else {
            *w &= !(1 << (i % 64));
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    /// Complement of every bit (global spin flip).
    pub fn complement(&self) -> Self {
        let mut c = Self::zeros(self.n);
        for i in 0..self.n {
            c.set(i, !self.get(i));
        }
        c
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn hamming(&self, other: &Self) -> usize {
        assert_eq!(self.n, other.n, "hamming: length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn intersection_size(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn spins(&self) -> Vec<i8> {
        (0..self.n).map(|i| if self.get(i) { 1 } else { -1 }).collect()
    }

    pub fn bools(&self) -> Vec<bool> {
        (0..self.n).map(|i| self.get(i)).collect()
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.get(i)).collect()
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.n).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn hamming_matches_naive(a in proptest::collection::vec(any::<bool>(), 0..150), seed in any::<u64>()) {
            let b: Vec<bool> = a.iter().enumerate().map(|(i, &x)| x ^ ((seed >> (i % 64)) & 1 == 1)).collect();
            let naive = a.iter().zip(&b).filter(|(x, y)| x != y).count();
            prop_assert_eq!(BitConfig::from_bools(&a).hamming(&BitConfig::from_bools(&b)), naive);
            prop_assert_eq!(BitConfig::from_bools(&a).bools(), a);
        }
    }

    #[test]
    fn spins_and_masks() {
        let c = BitConfig::from_spins(&[1, -1, 1]);
        assert_eq!(c.to_bit_string(), "101");
        assert_eq!(c.complement().spins(), vec![-1, 1, -1]);
        assert_eq!(BitConfig::from_mask(3, 0b1110).to_bit_string(), "011");
        assert_eq!(BitConfig::from_members(5, &[0, 4]).members(), vec![0, 4]);
    }
}
