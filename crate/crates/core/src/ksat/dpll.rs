use super::{is_satisfying, Assignment};
use crate::error::{Error, Result};
use crate::instances::{KSatFormula, Literal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Sat(Assignment),
    Unsat,
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DpllOutcome {
    pub verdict: Verdict,
    /// Branching decisions made.
    pub nodes: u64,
}

const UNASSIGNED: i8 = -1;

struct Solver<'a> {
    clauses: &'a [Vec<Literal>],
    occ: Vec<Vec<u32>>,
    value: Vec<i8>,
    sat_count: Vec<u32>,
    false_count: Vec<u32>,
    /// Occurrences of each literal in clauses not yet satisfied.
    live: Vec<u32>,
    open_clauses: usize,
    trail: Vec<Literal>,
    units: Vec<u32>,
}

impl<'a> Solver<'a> {
    fn new(f: &'a KSatFormula) -> Self {
        let n = f.n();
        let mut occ = vec![Vec::new(); 2 * n];
        let mut live = vec![0u32; 2 * n];
        for (j, c) in f.clauses().iter().enumerate() {
            for l in c {
                occ[l.code()].push(j as u32);
                live[l.code()] += 1;
            }
        }
        let units = f
            .clauses()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.len() == 1)
            .map(|(j, _)| j as u32)
            .collect();
        Self {
            clauses: f.clauses(),
            occ,
            value: vec![UNASSIGNED; n],
            sat_count: vec![0; f.m()],
            false_count: vec![0; f.m()],
            live,
            open_clauses: f.m(),
            trail: Vec::new(),
            units,
        }
    }

    fn lit_value(&self, l: Literal) -> i8 {
        match self.value[l.var as usize] {
            UNASSIGNED => UNASSIGNED,
            v => i8::from((v == 1) != l.negated),
        }
    }

    /// Make `l` true. Returns false on a falsified clause; all counters are
    /// updated regardless so that [`Solver::undo`] stays symmetric.
    fn assign(&mut self, l: Literal) -> bool {
        self.value[l.var as usize] = i8::from(!l.negated);
        self.trail.push(l);
        for &c in &self.occ[l.code()] {
            let c = c as usize;
            self.sat_count[c] += 1;
            if self.sat_count[c] == 1 {
                self.open_clauses -= 1;
                for x in &self.clauses[c] {
                    self.live[x.code()] -= 1;
                }
            }
        }
        let mut ok = true;
        for &c in &self.occ[(!l).code()] {
            let ci = c as usize;
            self.false_count[ci] += 1;
            if self.sat_count[ci] == 0 {
                let len = self.clauses[ci].len() as u32;
                if self.false_count[ci] == len {
                    ok = false;
                } else if self.false_count[ci] + 1 == len {
                    self.units.push(c);
                }
            }
        }
        ok
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let l = self.trail.pop().unwrap();
            for &c in &self.occ[(!l).code()] {
                self.false_count[c as usize] -= 1;
            }
            for &c in &self.occ[l.code()] {
                let c = c as usize;
                self.sat_count[c] -= 1;
                if self.sat_count[c] == 0 {
                    self.open_clauses += 1;
                    for x in &self.clauses[c] {
                        self.live[x.code()] += 1;
                    }
                }
            }
            self.value[l.var as usize] = UNASSIGNED;
        }
        self.units.clear();
    }

    /// Unit propagation and pure-literal elimination to a fixed point.
    fn propagate(&mut self) -> bool {
        loop {
            while let Some(c) = self.units.pop() {
                let c = c as usize;
                if self.sat_count[c] > 0 {
                    continue;
                }
                let free = self.clauses[c].iter().copied().find(|&x| self.lit_value(x) == UNASSIGNED);
                match free {
                    Some(x) => {
                        if !self.assign(x) {
                            self.units.clear();
                            return false;
                        }
                    }
                    None => {
                        self.units.clear();
                        return false;
                    }
                }
            }
            let mut assigned_pure = false;
            for v in 0..self.value.len() {
                if self.value[v] != UNASSIGNED {
                    continue;
                }
                let (p, n) = (self.live[2 * v], self.live[2 * v + 1]);
                let pure = match (p > 0, n > 0) {
                    (true, false) => Literal::pos(v as u32),
                    (false, true) => Literal::neg(v as u32),
                    _ => continue,
                };
                // cannot falsify anything: the opposite literal only occurs in
                // satisfied clauses
                self.assign(pure);
                assigned_pure = true;
            }
            if !assigned_pure && self.units.is_empty() {
                return true;
            }
        }
    }

    /// Most frequent variable among the shortest open clauses; ties by
    /// index, polarity by the more frequent sign.
    fn branch(&self) -> Literal {
        let mut shortest = u32::MAX;
        for (c, clause) in self.clauses.iter().enumerate() {
            if self.sat_count[c] == 0 {
                shortest = shortest.min(clause.len() as u32 - self.false_count[c]);
            }
        }
        let mut counts = vec![[0u32; 2]; self.value.len()];
        for (c, clause) in self.clauses.iter().enumerate() {
            if self.sat_count[c] == 0 && clause.len() as u32 - self.false_count[c] == shortest {
                for l in clause {
                    if self.value[l.var as usize] == UNASSIGNED {
                        counts[l.var as usize][usize::from(l.negated)] += 1;
                    }
                }
            }
        }
        let (v, c) = counts
            .iter()
            .enumerate()
            .max_by(|a, b| (a.1[0] + a.1[1]).cmp(&(b.1[0] + b.1[1])).then(b.0.cmp(&a.0)))
            .expect("open clause has a free variable");
        if c[0] >= c[1] {
            Literal::pos(v as u32)
        } else {
            Literal::neg(v as u32)
        }
    }

    fn model(&self) -> Assignment {
        Assignment::from_bools(&self.value.iter().map(|&v| v == 1).collect::<Vec<_>>())
    }
}

/// Complete DPLL search with unit propagation and pure-literal elimination.
///
/// `node_budget` bounds the number of branching decisions; exceeding it is
/// an [`Error::Budget`], never an UNSAT verdict.
pub fn dpll_solve(f: &KSatFormula, node_budget: Option<u64>) -> Result<DpllOutcome> {
    let mut s = Solver::new(f);
    let mut nodes = 0u64;
    // (trail mark, decision literal, second branch taken)
    let mut decisions: Vec<(usize, Literal, bool)> = Vec::new();
    let mut ok = s.propagate();
    loop {
        if !ok {
            loop {
                let Some((mark, lit, flipped)) = decisions.pop() else {
                    return Ok(DpllOutcome {
                        verdict: Verdict::Unsat,
                        nodes,
                    });
                };
                if flipped {
                    continue;
                }
                s.undo(mark);
                decisions.push((mark, !lit, true));
                ok = s.assign(!lit) && s.propagate();
                break;
            }
            continue;
        }
        if s.open_clauses == 0 {
            let model = s.model();
            debug_assert!(is_satisfying(f, &model).unwrap());
            if !is_satisfying(f, &model)? {
                return Err(Error::param("internal error: DPLL model fails verification"));
            }
            return Ok(DpllOutcome {
                verdict: Verdict::Sat(model),
                nodes,
            });
        }
        nodes += 1;
        if let Some(b) = node_budget {
            if nodes > b {
                return Err(Error::Budget { budget: b });
            }
        }
        let lit = s.branch();
        decisions.push((s.trail.len(), lit, false));
        ok = s.assign(lit) && s.propagate();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::gen_ksat;
    use crate::ksat::tests::sample_formula;
    use crate::ksat::count_solutions;
    use crate::rng::RngStream;

    #[test]
    fn contradiction_is_unsat() {
        let f = KSatFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        assert_eq!(dpll_solve(&f, None).unwrap().verdict, Verdict::Unsat);
    }

    #[test]
    fn sample_formula_is_sat() {
        let f = sample_formula();
        match dpll_solve(&f, None).unwrap().verdict {
            Verdict::Sat(a) => assert!(is_satisfying(&f, &a).unwrap()),
            Verdict::Unsat => panic!("satisfiable formula reported UNSAT"),
        }
    }

    #[test]
    fn all_eight_clauses_on_three_variables_are_unsat() {
        let mut cl: Vec<Vec<i32>> = Vec::new();
        for mask in 0..8 {
            cl.push((0..3).map(|i| if mask >> i & 1 == 1 { -(i + 1) } else { i + 1 }).collect());
        }
        let refs: Vec<&[i32]> = cl.iter().map(|c| c.as_slice()).collect();
        let f = KSatFormula::from_dimacs_clauses(3, &refs).unwrap();
        assert_eq!(dpll_solve(&f, None).unwrap().verdict, Verdict::Unsat);
        // dropping one clause leaves exactly one model
        let f = KSatFormula::from_dimacs_clauses(3, &refs[1..]).unwrap();
        assert!(dpll_solve(&f, None).unwrap().verdict.is_sat());
    }

    #[test]
    fn matches_solution_counting() {
        for seed in 0..200u64 {
            let n = 6 + (seed % 10) as usize;
            let c = 2.0 + (seed % 9) as f64 * 0.5;
            let m = (c * n as f64).round() as usize;
            let f = gen_ksat(n, m, 3, &RngStream::new(seed, "dpll")).unwrap();
            let sat = dpll_solve(&f, None).unwrap().verdict.is_sat();
            assert_eq!(sat, count_solutions(&f).unwrap() > 0, "seed {seed}");
        }
    }

    #[test]
    fn budget_is_an_error_not_unsat() {
        let f = gen_ksat(120, 510, 3, &RngStream::new(1, "budget")).unwrap();
        match dpll_solve(&f, Some(1)) {
            Err(Error::Budget { budget: 1 }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }
}
