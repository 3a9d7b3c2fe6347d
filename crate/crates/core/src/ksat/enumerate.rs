use super::Assignment;
use crate::error::{Error, Result};
use crate::instances::KSatFormula;

pub const ENUMERATION_CAP: usize = 30;
/// Default bound on the number of stored solutions.
pub const DEFAULT_SOLUTION_LIMIT: usize = 1 << 22;

/// Clauses as bit masks, grouped by their highest variable.
struct Masks {
    n: usize,
    /// `(positive vars, negated vars)` for clauses whose top variable is `v`.
    by_top: Vec<Vec<(u32, u32)>>,
}

impl Masks {
    fn new(f: &KSatFormula) -> Result<Self> {
        let n = f.n();
        if n > ENUMERATION_CAP {
            return Err(Error::Capacity {
                what: "enumerate_solutions",
                n,
                cap: ENUMERATION_CAP,
            });
        }
        let mut by_top = vec![Vec::new(); n];
        for c in f.clauses() {
            let (mut pos, mut neg) = (0u32, 0u32);
            for l in c {
                if l.negated {
                    neg |= 1 << l.var;
                } else {
                    pos |= 1 << l.var;
                }
            }
            if pos & neg != 0 {
                continue;
            }
            let top = 31 - (pos | neg).leading_zeros() as usize;
            by_top[top].push((pos, neg));
        }
        Ok(Self { n, by_top })
    }

    /// Depth-first over `x_1, x_2, …` checking each clause as soon as its
    /// top variable is set.
    fn walk(&self, mut visit: impl FnMut(u32) -> bool) {
        if self.n == 0 {
            visit(0);
            return;
        }
        let n = self.n;
        let mut bits = 0u32;
        let mut depth = 0usize;
        // next value to try at each depth: 0, 1, or 2 (exhausted)
        let mut next = vec![0u8; n];
        loop {
            if next[depth] == 2 {
                next[depth] = 0;
                if depth == 0 {
                    return;
                }
                depth -= 1;
                continue;
            }
            let val = next[depth];
            next[depth] += 1;
            if val == 1 {
                bits |= 1 << depth;
            } else {
                bits &= !(1 << depth);
            }
            let ok = self.by_top[depth].iter().all(|&(p, q)| bits & p != 0 || !bits & q != 0);
            if !ok {
                continue;
            }
            if depth + 1 == n {
                if !visit(bits) {
                    return;
                }
            } else {
                depth += 1;
            }
        }
    }
}

fn to_assignment(n: usize, bits: u32) -> Assignment {
    Assignment::from_mask(n, bits as u64)
}

/// All satisfying assignments in increasing binary order (`x_1` is the
/// least significant bit). Fails with a capacity error above
/// [`ENUMERATION_CAP`] variables or [`DEFAULT_SOLUTION_LIMIT`] solutions.
pub fn enumerate_solutions(f: &KSatFormula) -> Result<Vec<Assignment>> {
    enumerate_solutions_with_limit(f, DEFAULT_SOLUTION_LIMIT)
}

pub fn enumerate_solutions_with_limit(f: &KSatFormula, limit: usize) -> Result<Vec<Assignment>> {
    let masks = Masks::new(f)?;
    let mut out = Vec::new();
    let mut overflow = false;
    masks.walk(|b| {
        if out.len() == limit {
            overflow = true;
            return false;
        }
        out.push(b);
        true
    });
    if overflow {
        return Err(Error::Capacity {
            what: "enumerate_solutions (solution count)",
            n: limit + 1,
            cap: limit,
        });
    }
    out.sort_unstable();
    Ok(out.into_iter().map(|b| to_assignment(f.n(), b)).collect())
}

pub fn count_solutions(f: &KSatFormula) -> Result<u64> {
    let masks = Masks::new(f)?;
    let mut count = 0u64;
    masks.walk(|_| {
        count += 1;
        true
    });
    Ok(count)
}
