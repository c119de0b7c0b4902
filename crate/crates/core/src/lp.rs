//! Dense two-phase simplex for inequality-form linear programs
//!
//! ```text
//! maximize ⟨y, x⟩  subject to  ⟨a_r, x⟩ ≤ b_r  for every row r,  x free
//! ```
//!
//! The solver works over any [`Field`]: exact rationals (Bland's rule, so it
//! always terminates) or `f64` (Dantzig pricing with a Bland fallback once a
//! run of degenerate pivots is detected). Every outcome carries a
//! certificate: dual multipliers at an optimum, a Farkas row combination when
//! infeasible and a recession ray when unbounded.

use crate::fastq::FastQ;
use crate::rational::Q;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Ordered field the simplex can pivot over.
pub trait Field:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Whether sign tests are exact (no tolerance).
    const EXACT: bool;

    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_nil(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
    /// `self -= factor * x`
    fn sub_mul(&mut self, factor: &Self, x: &Self);
    fn from_q(q: &Q) -> Self;
    fn as_f64(&self) -> f64;

    /// Entry point used by [`LpProblem::solve`]; scalars may route the solve
    /// through a faster representation.
    fn solve_problem(p: &LpProblem<Self>) -> LpSolution<Self> {
        Simplex::new(p).run()
    }
}

impl Field for Q {
    const EXACT: bool = true;

    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn sub_mul(&mut self, factor: &Self, x: &Self) {
        *self -= factor * x;
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn as_f64(&self) -> f64 {
        crate::rational::to_f64(self)
    }

    fn solve_problem(p: &LpProblem<Self>) -> LpSolution<Self> {
        let fast = p.map(FastQ::from_q);
        fast.solve().map(|v| v.to_q())
    }
}

/// Pivot tolerance used by the float instantiation.
pub const F64_EPS: f64 = 1e-9;

impl Field for f64 {
    const EXACT: bool = false;

    fn is_pos(&self) -> bool {
        *self > F64_EPS
    }
    fn is_neg(&self) -> bool {
        *self < -F64_EPS
    }
    fn sub_mul(&mut self, factor: &Self, x: &Self) {
        *self -= factor * x;
    }
    fn from_q(q: &Q) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn as_f64(&self) -> f64 {
        *self
    }
}

/// One constraint `⟨coeffs, x⟩ ≤ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row<F> {
    pub coeffs: Vec<F>,
    pub rhs: F,
}

impl<F> Row<F> {
    pub fn new(coeffs: Vec<F>, rhs: F) -> Self {
        Row { coeffs, rhs }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem<F> {
    /// Maximized objective `y`.
    pub objective: Vec<F>,
    pub rows: Vec<Row<F>>,
}

impl<F: Field> LpProblem<F> {
    pub fn new(objective: Vec<F>) -> Self {
        LpProblem { objective, rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.objective.len()
    }

    pub fn push(&mut self, coeffs: Vec<F>, rhs: F) {
        assert_eq!(coeffs.len(), self.dim(), "row length must equal the number of variables");
        self.rows.push(Row::new(coeffs, rhs));
    }

    /// `⟨coeffs, x⟩ = rhs` as a pair of inequalities.
    pub fn push_eq(&mut self, coeffs: Vec<F>, rhs: F) {
        let neg: Vec<F> = coeffs.iter().map(|c| -c.clone()).collect();
        self.push(coeffs, rhs.clone());
        self.push(neg, -rhs);
    }

    pub fn solve(&self) -> LpSolution<F> {
        F::solve_problem(self)
    }

    pub fn map<G>(&self, f: impl Fn(&F) -> G) -> LpProblem<G> {
        LpProblem {
            objective: self.objective.iter().map(&f).collect(),
            rows: self.rows.iter().map(|r| Row::new(r.coeffs.iter().map(&f).collect(), f(&r.rhs))).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Only reachable in float mode.
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpSolution<F> {
    Optimal {
        x: Vec<F>,
        /// One nonnegative multiplier per row with `Σ μ_r a_r = y`.
        duals: Vec<F>,
        objective: F,
        /// Final basis, as tableau column indices.
        basis: Vec<usize>,
    },
    Infeasible {
        /// `μ ≥ 0` with `Σ μ_r a_r = 0` and `Σ μ_r b_r < 0`.
        farkas: Vec<F>,
    },
    Unbounded {
        /// A feasible point and a ray `r` with `⟨y, r⟩ > 0`, `⟨a_r, r⟩ ≤ 0`.
        point: Vec<F>,
        ray: Vec<F>,
    },
    IterationLimit,
}

impl<F> LpSolution<F> {
    pub fn map<G>(self, f: impl Fn(&F) -> G) -> LpSolution<G> {
        let conv = |v: Vec<F>| v.iter().map(&f).collect::<Vec<G>>();
        match self {
            LpSolution::Optimal { x, duals, objective, basis } => {
                LpSolution::Optimal { x: conv(x), duals: conv(duals), objective: f(&objective), basis }
            }
            LpSolution::Infeasible { farkas } => LpSolution::Infeasible { farkas: conv(farkas) },
            LpSolution::Unbounded { point, ray } => LpSolution::Unbounded { point: conv(point), ray: conv(ray) },
            LpSolution::IterationLimit => LpSolution::IterationLimit,
        }
    }
}

impl<F: Field> LpSolution<F> {
    pub fn status(&self) -> LpStatus {
        match self {
            LpSolution::Optimal { .. } => LpStatus::Optimal,
            LpSolution::Infeasible { .. } => LpStatus::Infeasible,
            LpSolution::Unbounded { .. } => LpStatus::Unbounded,
            LpSolution::IterationLimit => LpStatus::IterationLimit,
        }
    }

    /// Checks the attached certificate against `p`. Exact for rationals;
    /// float mode uses `tol` on every comparison.
    pub fn verify(&self, p: &LpProblem<F>, tol: f64) -> Result<(), String> {
        let n = p.dim();
        let le = |a: &F, b: &F| {
            let diff = a.clone() - b.clone();
            if F::EXACT {
                !diff.is_pos()
            } else {
                diff.as_f64() <= tol
            }
        };
        let zero = |a: &F| if F::EXACT { a.is_zero() } else { a.as_f64().abs() <= tol };
        match self {
            LpSolution::Optimal { x, duals, objective, .. } => {
                if duals.len() != p.rows.len() || x.len() != n {
                    return Err("certificate has wrong shape".into());
                }
                for (r, row) in p.rows.iter().enumerate() {
                    let ax = dot_f(&row.coeffs, x);
                    if !le(&ax, &row.rhs) {
                        return Err(format!("row {r} violated"));
                    }
                    if duals[r].is_neg() {
                        return Err(format!("dual {r} negative"));
                    }
                    if !zero(&(duals[r].clone() * (row.rhs.clone() - ax))) {
                        return Err(format!("complementary slackness fails on row {r}"));
                    }
                }
                for j in 0..n {
                    let mut s = -p.objective[j].clone();
                    for (r, row) in p.rows.iter().enumerate() {
                        s = s + duals[r].clone() * row.coeffs[j].clone();
                    }
                    if !zero(&s) {
                        return Err(format!("dual feasibility fails in coordinate {j}"));
                    }
                }
                let dual_obj = p.rows.iter().zip(duals).fold(F::zero(), |acc, (row, m)| acc + m.clone() * row.rhs.clone());
                if !zero(&(dual_obj - objective.clone())) || !zero(&(dot_f(&p.objective, x) - objective.clone())) {
                    return Err("duality gap".into());
                }
                Ok(())
            }
            LpSolution::Infeasible { farkas } => {
                if farkas.len() != p.rows.len() || farkas.iter().any(|m| m.is_neg()) {
                    return Err("Farkas multipliers malformed".into());
                }
                for j in 0..n {
                    let s = p.rows.iter().zip(farkas).fold(F::zero(), |acc, (row, m)| acc + m.clone() * row.coeffs[j].clone());
                    if !zero(&s) {
                        return Err(format!("Farkas combination nonzero in coordinate {j}"));
                    }
                }
                let rhs = p.rows.iter().zip(farkas).fold(F::zero(), |acc, (row, m)| acc + m.clone() * row.rhs.clone());
                if rhs.is_neg() {
                    Ok(())
                } else {
                    Err("Farkas right-hand side is not negative".into())
                }
            }
            LpSolution::Unbounded { point, ray } => {
                for (r, row) in p.rows.iter().enumerate() {
                    if !le(&dot_f(&row.coeffs, point), &row.rhs) {
                        return Err(format!("point violates row {r}"));
                    }
                    if dot_f(&row.coeffs, ray).is_pos() {
                        return Err(format!("ray leaves row {r}"));
                    }
                }
                if dot_f(&p.objective, ray).is_pos() {
                    Ok(())
                } else {
                    Err("ray does not improve the objective".into())
                }
            }
            LpSolution::IterationLimit => Err("iteration limit".into()),
        }
    }
}

/// Outcome of a pure feasibility problem.
#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility<F> {
    Feasible(Vec<F>),
    Infeasible(Vec<F>),
}

impl<F> Feasibility<F> {
    pub fn point(self) -> Option<Vec<F>> {
        match self {
            Feasibility::Feasible(x) => Some(x),
            Feasibility::Infeasible(_) => None,
        }
    }
}

/// Any point of `{x : ⟨a_r, x⟩ ≤ b_r}` in `dim` variables, or a Farkas proof
/// that there is none.
pub fn feasible_point<F: Field>(dim: usize, rows: Vec<Row<F>>) -> Feasibility<F> {
    let p = LpProblem { objective: vec![F::zero(); dim], rows };
    match p.solve() {
        LpSolution::Optimal { x, .. } => Feasibility::Feasible(x),
        LpSolution::Infeasible { farkas } => Feasibility::Infeasible(farkas),
        LpSolution::Unbounded { point, .. } => Feasibility::Feasible(point),
        LpSolution::IterationLimit => panic!("feasibility phase hit the iteration limit"),
    }
}

fn dot_f<F: Field>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

const FLOAT_ITERATION_CAP: usize = 100_000;
const DEGENERATE_STREAK_FOR_BLAND: usize = 50;

struct Simplex<'a, F> {
    p: &'a LpProblem<F>,
    n: usize,
    m: usize,
    /// Row signs after normalising every right-hand side to be nonnegative.
    flipped: Vec<bool>,
    art_of_row: Vec<Option<usize>>,
    ncols: usize,
    first_art: usize,
    t: Vec<Vec<F>>,
    rhs: Vec<F>,
    basis: Vec<usize>,
    /// Reduced costs and `-z` for the current phase (minimisation).
    d: Vec<F>,
    neg_z: F,
}

enum PhaseEnd {
    Optimal,
    Unbounded(usize),
    IterationLimit,
}

impl<'a, F: Field> Simplex<'a, F> {
    fn new(p: &'a LpProblem<F>) -> Self {
        let n = p.dim();
        let m = p.rows.len();
        let flipped: Vec<bool> = p.rows.iter().map(|r| r.rhs.is_neg()).collect();
        let first_art = 2 * n + m;
        let mut art_of_row = vec![None; m];
        let mut next = first_art;
        for (i, f) in flipped.iter().enumerate() {
            if *f {
                art_of_row[i] = Some(next);
                next += 1;
            }
        }
        let ncols = next;
        let mut t = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        for (i, row) in p.rows.iter().enumerate() {
            let mut line = vec![F::zero(); ncols];
            let sign = |v: &F| if flipped[i] { -v.clone() } else { v.clone() };
            for j in 0..n {
                line[j] = sign(&row.coeffs[j]);
                line[n + j] = -line[j].clone();
            }
            line[2 * n + i] = sign(&F::one());
            rhs.push(sign(&row.rhs));
            match art_of_row[i] {
                Some(a) => {
                    line[a] = F::one();
                    basis.push(a);
                }
                None => basis.push(2 * n + i),
            }
            t.push(line);
        }
        Simplex { p, n, m, flipped, art_of_row, ncols, first_art, t, rhs, basis, d: Vec::new(), neg_z: F::zero() }
    }

    fn set_costs(&mut self, cost: &[F]) {
        let mut d = cost.to_vec();
        let mut neg_z = F::zero();
        for i in 0..self.m {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (dj, tij) in d.iter_mut().zip(&self.t[i]) {
                if !tij.is_zero() {
                    dj.sub_mul(cb, tij);
                }
            }
            neg_z.sub_mul(cb, &self.rhs[i]);
        }
        self.d = d;
        self.neg_z = neg_z;
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let piv = self.t[r][e].clone();
        if !piv.is_one() {
            for v in self.t[r].iter_mut() {
                if !v.is_zero() {
                    *v = v.clone() / piv.clone();
                }
            }
            self.rhs[r] = self.rhs[r].clone() / piv;
        }
        self.t[r][e] = F::one();
        let nz: Vec<usize> = (0..self.ncols).filter(|&j| !self.t[r][j].is_zero()).collect();
        let (before, rest) = self.t.split_at_mut(r);
        let (prow, after) = rest.split_first_mut().expect("pivot row");
        let prhs = self.rhs[r].clone();
        for (i, line) in before.iter_mut().chain(after.iter_mut()).enumerate() {
            let i = if i < r { i } else { i + 1 };
            let f = line[e].clone();
            if f.is_zero() {
                continue;
            }
            for &j in &nz {
                line[j].sub_mul(&f, &prow[j]);
            }
            line[e] = F::zero();
            self.rhs[i].sub_mul(&f, &prhs);
            if !F::EXACT && self.rhs[i].is_nil() {
                self.rhs[i] = F::zero();
            }
        }
        let f = self.d[e].clone();
        if !f.is_zero() {
            for &j in &nz {
                self.d[j].sub_mul(&f, &prow[j]);
            }
            self.d[e] = F::zero();
            self.neg_z.sub_mul(&f, &prhs);
        }
        self.basis[r] = e;
    }

    fn entering(&self, allowed: usize, bland: bool) -> Option<usize> {
        if bland || F::EXACT {
            return (0..allowed).find(|&j| self.d[j].is_neg());
        }
        let mut best: Option<usize> = None;
        for j in 0..allowed {
            if self.d[j].is_neg() && best.map_or(true, |b| self.d[j] < self.d[b]) {
                best = Some(j);
            }
        }
        best
    }

    fn leaving(&self, e: usize) -> Option<usize> {
        let mut best: Option<(usize, F)> = None;
        for i in 0..self.m {
            let a = &self.t[i][e];
            if !a.is_pos() {
                continue;
            }
            let ratio = self.rhs[i].clone() / a.clone();
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    let diff = ratio.clone() - br.clone();
                    if diff.is_neg() || (diff.is_nil() && self.basis[i] < self.basis[bi]) {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn optimise(&mut self, allowed: usize) -> PhaseEnd {
        let mut degenerate = 0usize;
        let mut iterations = 0usize;
        loop {
            let bland = degenerate >= DEGENERATE_STREAK_FOR_BLAND;
            let Some(e) = self.entering(allowed, bland) else {
                return PhaseEnd::Optimal;
            };
            let Some(r) = self.leaving(e) else {
                return PhaseEnd::Unbounded(e);
            };
            if self.rhs[r].is_nil() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, e);
            iterations += 1;
            if !F::EXACT && iterations > FLOAT_ITERATION_CAP {
                return PhaseEnd::IterationLimit;
            }
        }
    }

    fn slack_duals(&self) -> Vec<F> {
        (0..self.m).map(|i| self.d[2 * self.n + i].clone()).collect()
    }

    fn column_values(&self) -> Vec<F> {
        let mut v = vec![F::zero(); self.ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            v[b] = self.rhs[i].clone();
        }
        v
    }

    fn primal(&self, col: &[F]) -> Vec<F> {
        (0..self.n).map(|j| col[j].clone() - col[self.n + j].clone()).collect()
    }

    fn run(mut self) -> LpSolution<F> {
        if self.first_art < self.ncols {
            let mut cost = vec![F::zero(); self.ncols];
            for c in cost.iter_mut().skip(self.first_art) {
                *c = F::one();
            }
            self.set_costs(&cost);
            match self.optimise(self.ncols) {
                PhaseEnd::Optimal => {}
                PhaseEnd::Unbounded(_) => unreachable!("phase one is bounded below by zero"),
                PhaseEnd::IterationLimit => return LpSolution::IterationLimit,
            }
            // -z < 0 means the artificial sum stays positive
            if self.neg_z.is_neg() {
                let farkas = self.slack_duals().into_iter().map(|v| if v.is_neg() { F::zero() } else { v }).collect();
                return LpSolution::Infeasible { farkas };
            }
            self.evict_artificials();
        }
        let mut cost = vec![F::zero(); self.ncols];
        for j in 0..self.n {
            cost[j] = -self.p.objective[j].clone();
            cost[self.n + j] = self.p.objective[j].clone();
        }
        self.set_costs(&cost);
        match self.optimise(self.first_art) {
            PhaseEnd::Optimal => {
                let col = self.column_values();
                let x = self.primal(&col);
                let duals: Vec<F> = self
                    .slack_duals()
                    .into_iter()
                    .map(|v| if !F::EXACT && v.is_nil() { F::zero() } else { v })
                    .collect();
                let objective = dot_f(&self.p.objective, &x);
                LpSolution::Optimal { x, duals, objective, basis: self.basis.clone() }
            }
            PhaseEnd::Unbounded(e) => {
                let col = self.column_values();
                let point = self.primal(&col);
                let mut dir = vec![F::zero(); self.ncols];
                dir[e] = F::one();
                for i in 0..self.m {
                    dir[self.basis[i]] = -self.t[i][e].clone();
                }
                let ray = self.primal(&dir);
                LpSolution::Unbounded { point, ray }
            }
            PhaseEnd::IterationLimit => LpSolution::IterationLimit,
        }
    }

    /// Pivots zero-level artificials out of the basis where possible; rows
    /// whose structural part is identically zero are redundant and keep theirs.
    fn evict_artificials(&mut self) {
        for r in 0..self.m {
            if self.basis[r] < self.first_art {
                continue;
            }
            if let Some(j) = (0..self.first_art).find(|&j| !self.t[r][j].is_nil()) {
                self.pivot(r, j);
            }
        }
        debug_assert!(self.flipped.len() == self.m && self.art_of_row.len() == self.m);
    }
}
