//! 3-SAT gadgets for tropical and classical posynomial systems.
//!
//! Variables are ordered `(x_1..x_n, y_1..y_n, z_1..z_p, s_1..s_p)` and
//! equations as: `n` rows `max(x_i - 1, y_i - 1)`, `n` rows `x_i + y_i - 1`,
//! `p` clause rows, `p` rows `max(1/2 - z_j, s_j - z_j)`. The classical system
//! uses the same layout with its own coefficients.

use crate::rational::{frac, int, Q};
use crate::system::{eval_classical_exact, eval_tropical, ClassicalSystem, TropicalSystem};
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

/// Largest instance accepted by [`sat_oracle`].
pub const ORACLE_MAX_VARS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("clause {clause} must use three distinct variables in 1..={n_vars}")]
    InvalidClause { clause: usize, n_vars: usize },
    #[error("DIMACS line {line}: {msg}")]
    Dimacs { line: usize, msg: String },
    #[error("assignment has {got} values, expected {expected}")]
    AssignmentLength { expected: usize, got: usize },
    #[error("assignment does not satisfy the formula")]
    UnsatisfiedAssignment,
    #[error("{0} variables exceed the brute-force limit")]
    TooLarge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    /// Zero-based variable index.
    pub var: usize,
    pub negated: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Lit {
        Lit { var, negated: false }
    }

    pub fn neg(var: usize) -> Lit {
        Lit { var, negated: true }
    }

    pub fn value(&self, assignment: &[bool]) -> bool {
        assignment[self.var] != self.negated
    }

    fn dimacs(&self) -> i64 {
        let v = self.var as i64 + 1;
        if self.negated {
            -v
        } else {
            v
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    n_vars: usize,
    clauses: Vec<[Lit; 3]>,
}

impl Cnf {
    pub fn new(n_vars: usize, clauses: Vec<[Lit; 3]>) -> Result<Self, SatError> {
        for (j, c) in clauses.iter().enumerate() {
            let distinct = c[0].var != c[1].var && c[0].var != c[2].var && c[1].var != c[2].var;
            if !distinct || c.iter().any(|l| l.var >= n_vars) {
                return Err(SatError::InvalidClause { clause: j, n_vars });
            }
        }
        Ok(Cnf { n_vars, clauses })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn clauses(&self) -> &[[Lit; 3]] {
        &self.clauses
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.value(assignment)))
    }

    /// Size `2n + 2p` of both gadget systems.
    pub fn gadget_dim(&self) -> usize {
        2 * self.n_vars + 2 * self.clauses.len()
    }

    /// Parses DIMACS CNF: comment lines `c …`, header `p cnf <n> <p>`,
    /// zero-terminated clauses of exactly three literals.
    pub fn from_dimacs(text: &str) -> Result<Self, SatError> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current: Vec<i64> = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
                continue;
            }
            let err = |msg: &str| SatError::Dimacs { line, msg: msg.to_string() };
            if t.starts_with('p') {
                if header.is_some() {
                    return Err(err("duplicate header"));
                }
                let parts: Vec<&str> = t.split_whitespace().collect();
                if parts.len() != 4 || parts[1] != "cnf" {
                    return Err(err("expected `p cnf <vars> <clauses>`"));
                }
                let n = parts[2].parse().map_err(|_| err("bad variable count"))?;
                let p = parts[3].parse().map_err(|_| err("bad clause count"))?;
                header = Some((n, p, line));
                continue;
            }
            let Some((n, _, _)) = header else { return Err(err("clause before header")) };
            for tok in t.split_whitespace() {
                let v: i64 = tok.parse().map_err(|_| err(&format!("bad literal `{tok}`")))?;
                if v == 0 {
                    if current.len() != 3 {
                        return Err(err(&format!("clause has {} literals, expected 3", current.len())));
                    }
                    clauses.push(std::mem::take(&mut current));
                } else {
                    if v.unsigned_abs() as usize > n {
                        return Err(err(&format!("literal {v} out of range")));
                    }
                    current.push(v);
                }
            }
        }
        let Some((n, p, hline)) = header else {
            return Err(SatError::Dimacs { line: last_line, msg: "missing header".into() });
        };
        if !current.is_empty() {
            return Err(SatError::Dimacs { line: last_line, msg: "unterminated clause".into() });
        }
        if clauses.len() != p {
            return Err(SatError::Dimacs { line: hline, msg: format!("header declares {p} clauses, found {}", clauses.len()) });
        }
        let lits = clauses
            .iter()
            .map(|c| {
                let lit = |v: i64| Lit { var: v.unsigned_abs() as usize - 1, negated: v < 0 };
                [lit(c[0]), lit(c[1]), lit(c[2])]
            })
            .collect();
        Cnf::new(n, lits)
    }

    pub fn to_dimacs(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.n_vars, self.clauses.len())?;
        for c in &self.clauses {
            writeln!(f, "{} {} {} 0", c[0].dimacs(), c[1].dimacs(), c[2].dimacs())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetKind {
    Tropical,
    Classical,
}

struct Layout {
    n: usize,
    p: usize,
}

impl Layout {
    fn of(f: &Cnf) -> Layout {
        Layout { n: f.n_vars, p: f.clauses.len() }
    }
    fn dim(&self) -> usize {
        2 * self.n + 2 * self.p
    }
    fn x(&self, i: usize) -> usize {
        i
    }
    fn y(&self, i: usize) -> usize {
        self.n + i
    }
    fn z(&self, j: usize) -> usize {
        2 * self.n + j
    }
    fn s(&self, j: usize) -> usize {
        2 * self.n + self.p + j
    }
    fn lit(&self, l: &Lit) -> usize {
        if l.negated {
            self.y(l.var)
        } else {
            self.x(l.var)
        }
    }
    /// `Σ e_plus - Σ e_minus`.
    fn exp(&self, plus: &[usize], minus: &[usize]) -> Vec<Q> {
        let mut e = vec![Q::zero(); self.dim()];
        for &k in plus {
            e[k] += Q::one();
        }
        for &k in minus {
            e[k] -= Q::one();
        }
        e
    }
}

/// Rows in gadget order, each term an exponent with a coefficient taken from
/// `coeff` (one per family: A pair, B, clause literal, D constant, D slack).
fn gadget_terms(f: &Cnf, coeff: [Q; 5]) -> Vec<Vec<(Vec<Q>, Q)>> {
    let l = Layout::of(f);
    let [ca, cb, cc, cd0, cd1] = coeff;
    let mut rows = Vec::with_capacity(l.dim());
    for i in 0..l.n {
        rows.push(vec![(l.exp(&[l.x(i)], &[]), ca.clone()), (l.exp(&[l.y(i)], &[]), ca.clone())]);
    }
    for i in 0..l.n {
        rows.push(vec![(l.exp(&[l.x(i), l.y(i)], &[]), cb.clone())]);
    }
    for (j, c) in f.clauses.iter().enumerate() {
        rows.push(c.iter().map(|lit| (l.exp(&[l.lit(lit)], &[l.z(j)]), cc.clone())).collect());
    }
    for j in 0..l.p {
        rows.push(vec![(l.exp(&[], &[l.z(j)]), cd0.clone()), (l.exp(&[l.s(j)], &[l.z(j)]), cd1.clone())]);
    }
    rows
}

pub fn cnf_to_tropical(f: &Cnf) -> TropicalSystem {
    let terms = gadget_terms(f, [int(-1), int(-1), int(0), frac(1, 2), int(0)]);
    TropicalSystem::from_terms(terms).expect("gadget is square")
}

pub fn cnf_to_classical(f: &Cnf) -> ClassicalSystem {
    let terms = gadget_terms(f, [frac(2, 5), int(1), frac(1, 6), frac(1, 3), int(1)]);
    ClassicalSystem::from_terms(terms).expect("gadget is square with positive coefficients")
}

/// Classical clause level `z_j = (Σ literal values) / 6` with true ↦ 2 and
/// false ↦ 1/2.
pub fn classical_clause_level(clause: &[Lit; 3], assignment: &[bool]) -> Q {
    let sum: Q = clause.iter().map(|l| if l.value(assignment) { int(2) } else { frac(1, 2) }).sum();
    sum / int(6)
}

/// Solution vector of the gadget system for a satisfying assignment.
pub fn encode_assignment(f: &Cnf, assignment: &[bool], kind: GadgetKind) -> Result<Vec<Q>, SatError> {
    if assignment.len() != f.n_vars {
        return Err(SatError::AssignmentLength { expected: f.n_vars, got: assignment.len() });
    }
    if !f.satisfied_by(assignment) {
        return Err(SatError::UnsatisfiedAssignment);
    }
    let l = Layout::of(f);
    let mut v = vec![Q::zero(); l.dim()];
    for (i, &b) in assignment.iter().enumerate() {
        let (x, y) = match (kind, b) {
            (GadgetKind::Tropical, true) => (int(1), int(0)),
            (GadgetKind::Tropical, false) => (int(0), int(1)),
            (GadgetKind::Classical, true) => (int(2), frac(1, 2)),
            (GadgetKind::Classical, false) => (frac(1, 2), int(2)),
        };
        v[l.x(i)] = x;
        v[l.y(i)] = y;
    }
    for (j, c) in f.clauses.iter().enumerate() {
        let (z, s) = match kind {
            GadgetKind::Tropical => (int(1), int(1)),
            GadgetKind::Classical => {
                let z = classical_clause_level(c, assignment);
                let s = &z - frac(1, 3);
                (z, s)
            }
        };
        v[l.z(j)] = z;
        v[l.s(j)] = s;
    }
    Ok(v)
}

/// Reads the Boolean assignment back from the `x` block of a tropical
/// solution; `None` unless every `x_i ∈ {0, 1}`.
pub fn decode_tropical(f: &Cnf, v: &[Q]) -> Option<Vec<bool>> {
    (0..f.n_vars)
        .map(|i| {
            if v[i].is_one() {
                Some(true)
            } else if v[i].is_zero() {
                Some(false)
            } else {
                None
            }
        })
        .collect()
}

pub fn solves_tropical(sys: &TropicalSystem, v: &[Q]) -> bool {
    eval_tropical(sys, v).map(|r| r.iter().all(Zero::is_zero)).unwrap_or(false)
}

pub fn solves_classical(sys: &ClassicalSystem, v: &[Q]) -> bool {
    match eval_classical_exact(sys, v) {
        Ok(Some(rows)) => rows.iter().all(One::is_one),
        _ => false,
    }
}

/// First satisfying assignment in lexicographic order (false before true,
/// `x_1` most significant).
pub fn sat_oracle(f: &Cnf) -> Result<Option<Vec<bool>>, SatError> {
    let n = f.n_vars;
    if n > ORACLE_MAX_VARS {
        return Err(SatError::TooLarge(n));
    }
    for mask in 0u32..(1u32 << n) {
        let assignment: Vec<bool> = (0..n).map(|i| (mask >> (n - 1 - i)) & 1 == 1).collect();
        if f.satisfied_by(&assignment) {
            return Ok(Some(assignment));
        }
    }
    Ok(None)
}

/// The eight clauses on variables 0, 1, 2, one per sign pattern.
pub fn all_sign_patterns() -> Vec<[Lit; 3]> {
    (0u8..8)
        .map(|m| {
            let lit = |v: usize| Lit { var: v, negated: (m >> (2 - v)) & 1 == 1 };
            [lit(0), lit(1), lit(2)]
        })
        .collect()
}

/// Every formula on three variables with at most three clauses drawn from
/// distinct sign patterns (93 formulas), followed by the unsatisfiable
/// formula containing all eight patterns.
pub fn exhaustive_corpus() -> Vec<Cnf> {
    let pats = all_sign_patterns();
    let mut out = vec![Cnf::new(3, vec![]).expect("valid")];
    for a in 0..8 {
        out.push(Cnf::new(3, vec![pats[a]]).expect("valid"));
        for b in a + 1..8 {
            out.push(Cnf::new(3, vec![pats[a], pats[b]]).expect("valid"));
            for c in b + 1..8 {
                out.push(Cnf::new(3, vec![pats[a], pats[b], pats[c]]).expect("valid"));
            }
        }
    }
    out.push(Cnf::new(3, pats).expect("valid"));
    out
}
