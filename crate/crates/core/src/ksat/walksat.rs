use super::{is_satisfying, Assignment};
use crate::error::{Error, Result};
use crate::instances::KSatFormula;
use crate::rng::RngStream;
use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkSatOutcome {
    /// `None` means the search gave up.
    pub assignment: Option<Assignment>,
    pub flips: u64,
}

/// WalkSAT local search from a uniformly random assignment.
///
/// Each step picks a uniformly random unsatisfied clause and flips, with
/// probability `noise`, a random variable of it, otherwise the variable of
/// it whose flip breaks the fewest currently satisfied clauses (ties broken
/// at random).
pub fn walksat(f: &KSatFormula, max_flips: u64, noise: f64, rng: &RngStream) -> Result<WalkSatOutcome> {
    if !(0.0..=1.0).contains(&noise) {
        return Err(Error::param(format!("noise {noise} outside [0, 1]")));
    }
    let n = f.n();
    let clauses = f.clauses();
    let mut r = rng.rng();
    let mut value: Vec<bool> = (0..n).map(|_| r.random()).collect();
    let mut occ = vec![Vec::<u32>::new(); 2 * n];
    for (j, c) in clauses.iter().enumerate() {
        for l in c {
            occ[l.code()].push(j as u32);
        }
    }
    let mut true_count: Vec<u32> = clauses
        .iter()
        .map(|c| c.iter().filter(|l| l.is_true_under(value[l.var as usize])).count() as u32)
        .collect();
    // unsatisfied clauses with O(1) removal
    let mut unsat: Vec<u32> = Vec::new();
    let mut pos = vec![u32::MAX; clauses.len()];
    for (j, &t) in true_count.iter().enumerate() {
        if t == 0 {
            pos[j] = unsat.len() as u32;
            unsat.push(j as u32);
        }
    }
    let code_of = |v: usize, val: bool| 2 * v + usize::from(!val);

    let mut flips = 0u64;
    let mut ties: Vec<u32> = Vec::new();
    while !unsat.is_empty() {
        if flips >= max_flips {
            return Ok(WalkSatOutcome {
                assignment: None,
                flips,
            });
        }
        let c = unsat[r.random_range(0..unsat.len())] as usize;
        let var = if r.random::<f64>() < noise {
            clauses[c].choose(&mut r).unwrap().var
        } else {
            let mut best = u32::MAX;
            ties.clear();
            for l in &clauses[c] {
                let v = l.var as usize;
                let breaks = occ[code_of(v, value[v])]
                    .iter()
                    .filter(|&&k| true_count[k as usize] == 1)
                    .count() as u32;
                if breaks < best {
                    best = breaks;
                    ties.clear();
                }
                if breaks == best {
                    ties.push(l.var);
                }
            }
            *ties.choose(&mut r).unwrap()
        };
        let v = var as usize;
        for &k in &occ[code_of(v, value[v])] {
            let k = k as usize;
            true_count[k] -= 1;
            if true_count[k] == 0 {
                pos[k] = unsat.len() as u32;
                unsat.push(k as u32);
            }
        }
        value[v] = !value[v];
        for &k in &occ[code_of(v, value[v])] {
            let k = k as usize;
            true_count[k] += 1;
            if true_count[k] == 1 {
                let p = pos[k] as usize;
                let last = *unsat.last().unwrap();
                unsat.swap_remove(p);
                if p < unsat.len() {
                    pos[last as usize] = p as u32;
                }
                pos[k] = u32::MAX;
            }
        }
        flips += 1;
    }
    let a = Assignment::from_bools(&value);
    if !is_satisfying(f, &a)? {
        return Err(Error::param("internal error: WalkSAT model fails verification"));
    }
    Ok(WalkSatOutcome {
        assignment: Some(a),
        flips,
    })
}
