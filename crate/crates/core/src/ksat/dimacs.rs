use crate::error::{Error, Result};
use crate::instances::{KSatFormula, Literal};

/// DIMACS CNF text for `f`.
pub fn to_dimacs(f: &KSatFormula) -> String {
    let mut s = format!("p cnf {} {}\n", f.n(), f.m());
    for c in f.clauses() {
        for l in c {
            s.push_str(&l.to_dimacs().to_string());
            s.push(' ');
        }
        s.push_str("0\n");
    }
    s
}

/// Parses DIMACS CNF. Comment lines (`c ...`) and a trailing `%` line are
/// ignored; clauses may span lines. Clause and variable counts must match
/// the problem line.
pub fn parse_dimacs(text: &str) -> Result<KSatFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if let Some(rest) = line.strip_prefix('p') {
            if header.is_some() {
                return Err(Error::param(format!("line {}: second problem line", lineno + 1)));
            }
            let parts: Vec<&str> = rest.split_whitespace().collect();
            let bad = || Error::param(format!("line {}: malformed problem line", lineno + 1));
            if parts.len() != 3 || parts[0] != "cnf" {
                return Err(bad());
            }
            let n = parts[1].parse().map_err(|_| bad())?;
            let m = parts[2].parse().map_err(|_| bad())?;
            header = Some((n, m));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(Error::param(format!("line {}: clause before problem line", lineno + 1)));
        };
        for tok in line.split_whitespace() {
            let x: i32 = tok
                .parse()
                .map_err(|_| Error::param(format!("line {}: bad literal {tok:?}", lineno + 1)))?;
            if x == 0 {
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            if x.unsigned_abs() as usize > n {
                return Err(Error::param(format!("line {}: variable {} exceeds n = {n}", lineno + 1, x.abs())));
            }
            current.push(Literal::from_dimacs(x).expect("nonzero literal"));
        }
    }
    let Some((n, m)) = header else {
        return Err(Error::param("missing problem line"));
    };
    if !current.is_empty() {
        return Err(Error::param("last clause is not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(Error::param(format!("problem line declares {m} clauses, found {}", clauses.len())));
    }
    KSatFormula::new(n, clauses)
}
