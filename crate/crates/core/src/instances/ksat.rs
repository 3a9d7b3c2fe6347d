use crate::error::{Error, Result};
use crate::rng::RngStream;
use rand::seq::index::sample;
use rand::Rng;
use std::fmt;

/// A literal over a 0-based variable index. Displayed 1-based, DIMACS style.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: u32,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: u32) -> Self {
        Self { var, negated: false }
    }

    pub fn neg(var: u32) -> Self {
        Self { var, negated: true }
    }

    /// From a signed 1-based DIMACS literal.
    pub fn from_dimacs(x: i32) -> Option<Self> {
        (x != 0).then(|| Self {
            var: x.unsigned_abs() - 1,
            negated: x < 0,
        })
    }

    pub fn to_dimacs(self) -> i32 {
        let v = self.var as i32 + 1;
        if self.negated {
            -v
        } else {
            v
        }
    }

    /// `2 * var + negated`.
    #[inline]
    pub fn code(self) -> usize {
        2 * self.var as usize + self.negated as usize
    }

    #[inline]
    pub fn is_true_under(self, value: bool) -> bool {
        value != self.negated
    }
}

impl std::ops::Not for Literal {
    type Output = Literal;
    fn not(self) -> Literal {
        Literal {
            var: self.var,
            negated: !self.negated,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "¬x{}", self.var + 1)
        } else {
            write!(f, "x{}", self.var + 1)
        }
    }
}

/// A CNF formula. Generated formulas have exactly `k` literals over distinct
/// variables per clause; hand-built ones may have clauses of any width.
#[derive(Debug, Clone, PartialEq)]
pub struct KSatFormula {
    n: usize,
    k: usize,
    clauses: Vec<Vec<Literal>>,
    pub origin: RngStream,
}

impl KSatFormula {
    pub fn new(n: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        for (j, c) in clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::param(format!("clause {j} is empty")));
            }
            if let Some(l) = c.iter().find(|l| l.var as usize >= n) {
                return Err(Error::param(format!("clause {j}: variable x{} out of range 1..={n}", l.var + 1)));
            }
        }
        let k = clauses.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self {
            n,
            k,
            clauses,
            origin: RngStream::new(0, "manual"),
        })
    }

    /// From signed 1-based literals, e.g. `&[&[3, -7, -8]]`.
    pub fn from_dimacs_clauses(n: usize, clauses: &[&[i32]]) -> Result<Self> {
        let clauses = clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&x| Literal::from_dimacs(x).ok_or_else(|| Error::param("literal 0 is not allowed")))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, clauses)
    }

    pub(crate) fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn density(&self) -> f64 {
        self.m() as f64 / self.n as f64
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub(crate) fn clauses_mut(&mut self) -> &mut [Vec<Literal>] {
        &mut self.clauses
    }
}

impl fmt::Display for KSatFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, c) in self.clauses.iter().enumerate() {
            if j > 0 {
                write!(f, " ∧ ")?;
            }
            write!(f, "(")?;
            for (i, l) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, " ∨ ")?;
                }
                write!(f, "{l}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// One clause: `k` distinct variables chosen uniformly, each negated with probability 1/2.
pub(crate) fn draw_clause<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<Literal> {
    let mut vars: Vec<usize> = sample(rng, n, k).into_vec();
    vars.sort_unstable();
    vars.into_iter()
        .map(|v| Literal {
            var: v as u32,
            negated: rng.random::<bool>(),
        })
        .collect()
}

pub fn gen_ksat(n: usize, m: usize, k: usize, rng: &RngStream) -> Result<KSatFormula> {
    if k == 0 {
        return Err(Error::param("K must be >= 1"));
    }
    if k > n {
        return Err(Error::param(format!("K = {k} exceeds n = {n}")));
    }
    let mut r = rng.rng();
    let clauses = (0..m).map(|_| draw_clause(n, k, &mut r)).collect();
    let mut f = KSatFormula::new(n, clauses)?.with_k(k);
    f.origin = rng.clone();
    Ok(f)
}
