//! Classical posynomial systems `P(x) = 1` via the geometric program
//!
//! ```text
//! maximize ⟨y, X⟩  subject to  g_i(X) = log Σ_{a ∈ S_i} c_a e^{⟨a, X⟩} ≤ 0
//! ```
//!
//! For pointed exponents and colorful `y`, every optimum has all constraints
//! active, so `x = exp X*` solves the system. The program is solved by a
//! feasible-start log-barrier method with damped Newton steps; the start
//! point comes from the pointedness witness.

use crate::colorful::is_colorful;
use crate::lp::{LpProblem, LpSolution};
use crate::rational::{dot_f64, rationalize, to_f64, Q};
use crate::system::{check_pointed, ClassicalSystem};
use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use thiserror::Error;

/// Feasibility tolerance on `|g_i(X*)|`.
pub const DEFAULT_TOL_F: f64 = 1e-6;
/// Tolerance on the sup-norm stationarity residual.
pub const DEFAULT_TOL_K: f64 = 1e-6;
/// Barrier loop stops once `n / t` drops below this gap.
pub const BARRIER_GAP: f64 = 1e-10;
const ARMIJO: f64 = 1e-4;
const HESSIAN_SHIFT: f64 = 1e-12;
/// Centering stops once `λ²/2 ≤ NEWTON_TOL · (1 + |φ_t|)`; float noise in
/// `φ_t` is about `1e-16 · |φ_t|`.
const NEWTON_TOL: f64 = 1e-10;
const MAX_NEWTON_PER_CENTERING: usize = 200;
const MAX_NEWTON_TOTAL: usize = 5_000;
/// Denominator bound used when rationalizing `log c_a`.
pub const RATIONALIZE_DEN: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GpError {
    #[error("exponents are not pointed")]
    NotPointed,
    #[error("vector is not colorful ({0})")]
    NotColorful(&'static str),
    #[error("vector has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite input")]
    NonFinite,
    #[error("barrier method did not converge")]
    MaxIterations { best: Box<GpKktReport> },
    #[error("KKT conditions not met within tolerance")]
    KktViolation { report: Box<GpKktReport> },
}

/// Float copy of a classical system: exponents and `log c_a` per color.
#[derive(Debug, Clone)]
pub struct LogSumExp {
    n: usize,
    exps: Vec<Vec<Vec<f64>>>,
    log_c: Vec<Vec<f64>>,
}

impl LogSumExp {
    pub fn new(sys: &ClassicalSystem) -> Self {
        let exps = sys.support().colors().iter().map(|set| set.iter().map(|a| a.iter().map(to_f64).collect()).collect()).collect();
        let log_c = sys.coeffs().iter().map(|cs| cs.iter().map(|c| to_f64(c).ln()).collect()).collect();
        LogSumExp { n: sys.dim(), exps, log_c }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Shifted log-sum-exp of color `i` with its softmax weights.
    fn color(&self, i: usize, x: &[f64]) -> (f64, Vec<f64>) {
        let s: Vec<f64> = self.exps[i].iter().zip(&self.log_c[i]).map(|(a, lc)| lc + dot_f64(a, x)).collect();
        let m = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = s.iter().map(|v| (v - m).exp()).collect();
        let total: f64 = e.iter().sum();
        (m + total.ln(), e.into_iter().map(|v| v / total).collect())
    }

    pub fn values(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.color(i, x).0).collect()
    }

    /// `h_i(X) = max_a (log c_a + ⟨a, X⟩)`.
    pub fn max_terms(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.exps[i].iter().zip(&self.log_c[i]).map(|(a, lc)| lc + dot_f64(a, x)).fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }

    pub fn color_sizes(&self) -> Vec<usize> {
        self.exps.iter().map(Vec::len).collect()
    }
}

/// Values, gradients and Hessians of every `g_i` at one point.
#[derive(Debug, Clone)]
pub struct GEval {
    pub values: Vec<f64>,
    pub gradients: Vec<DVector<f64>>,
    pub hessians: Vec<DMatrix<f64>>,
}

pub fn g_eval(sys: &ClassicalSystem, x: &[f64]) -> Result<GEval, GpError> {
    g_eval_lse(&LogSumExp::new(sys), x)
}

pub fn g_eval_lse(f: &LogSumExp, x: &[f64]) -> Result<GEval, GpError> {
    if x.len() != f.n {
        return Err(GpError::DimensionMismatch { expected: f.n, got: x.len() });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(GpError::NonFinite);
    }
    let n = f.n;
    let mut values = Vec::with_capacity(n);
    let mut gradients = Vec::with_capacity(n);
    let mut hessians = Vec::with_capacity(n);
    for i in 0..n {
        let (g, w) = f.color(i, x);
        let mut grad = DVector::zeros(n);
        let mut second = DMatrix::zeros(n, n);
        for (a, wa) in f.exps[i].iter().zip(&w) {
            let av = DVector::from_column_slice(a);
            grad += &av * *wa;
            second += &av * av.transpose() * *wa;
        }
        let hess = second - &grad * grad.transpose();
        values.push(g);
        gradients.push(grad);
        hessians.push(hess);
    }
    Ok(GEval { values, gradients, hessians })
}

/// Strictly feasible point `X₀ = λ z` built from the pointedness witness `z`,
/// with `g_i(X₀) ≤ -1` in exact arithmetic.
pub fn feasible_start(sys: &ClassicalSystem) -> Result<Vec<f64>, GpError> {
    let cert = check_pointed(sys.support());
    let z: Vec<f64> = cert.witness().ok_or(GpError::NotPointed)?.iter().map(to_f64).collect();
    let f = LogSumExp::new(sys);
    let sizes = f.color_sizes();
    let mut lambda = 0.0f64;
    for i in 0..f.n {
        for (a, lc) in f.exps[i].iter().zip(&f.log_c[i]) {
            let slope = -dot_f64(a, &z);
            lambda = lambda.max((lc + (sizes[i] as f64).ln() + 1.0) / slope);
        }
    }
    let x0: Vec<f64> = z.iter().map(|v| lambda * v).collect();
    debug_assert!(f.values(&x0).iter().all(|g| *g < 0.0));
    Ok(x0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpProblem {
    pub system: ClassicalSystem,
    pub y: Vec<Q>,
    pub tol_f: f64,
    pub tol_k: f64,
}

impl GpProblem {
    /// Checks pointedness and colorfulness before accepting the problem.
    pub fn new(system: ClassicalSystem, y: Vec<Q>) -> Result<Self, GpError> {
        if y.len() != system.dim() {
            return Err(GpError::DimensionMismatch { expected: system.dim(), got: y.len() });
        }
        if !check_pointed(system.support()).is_pointed() {
            return Err(GpError::NotPointed);
        }
        let cert = is_colorful(&y, system.support()).expect("dimension checked");
        if !cert.is_colorful() {
            return Err(GpError::NotColorful(cert.verdict()));
        }
        Ok(GpProblem { system, y, tol_f: DEFAULT_TOL_F, tol_k: DEFAULT_TOL_K })
    }

    pub fn with_tolerances(mut self, tol_f: f64, tol_k: f64) -> Self {
        self.tol_f = tol_f;
        self.tol_k = tol_k;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpKktReport {
    pub log_x: Vec<f64>,
    pub x: Vec<f64>,
    /// Solution of `Σ_i λ_i ∇g_i(X*) = y`.
    pub multipliers: Vec<f64>,
    /// `1 / (-t g_i(X*))`; loses about `log10(t)` digits to cancellation in
    /// `g_i`, so it is reported but not used for the KKT check.
    pub barrier_multipliers: Vec<f64>,
    /// `Z_i = Σ_a c_a e^{⟨a, X*⟩}`.
    pub normalizers: Vec<f64>,
    pub stationarity: f64,
    pub g: Vec<f64>,
    pub barrier_t: f64,
    pub newton_steps: usize,
}

impl GpKktReport {
    pub fn meets(&self, tol_f: f64, tol_k: f64) -> bool {
        self.multipliers.iter().all(|l| *l > 0.0) && self.g.iter().all(|g| g.abs() <= tol_f) && self.stationarity <= tol_k
    }
}

struct Barrier<'a> {
    f: &'a LogSumExp,
    y: Vec<f64>,
    t: f64,
}

impl Barrier<'_> {
    fn value(&self, x: &[f64]) -> Option<f64> {
        let g = self.f.values(x);
        if g.iter().any(|v| !(*v < 0.0)) {
            return None;
        }
        Some(-self.t * dot_f64(&self.y, x) - g.iter().map(|v| (-v).ln()).sum::<f64>())
    }

    fn derivatives(&self, x: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.f.n;
        let ev = g_eval_lse(self.f, x).expect("finite iterate");
        let mut grad = DVector::from_column_slice(&self.y) * -self.t;
        let mut hess = DMatrix::identity(n, n) * HESSIAN_SHIFT;
        for i in 0..n {
            let gi = ev.values[i];
            grad += &ev.gradients[i] / -gi;
            hess += &ev.hessians[i] / -gi + &ev.gradients[i] * ev.gradients[i].transpose() / (gi * gi);
        }
        (grad, hess)
    }
}

fn newton_direction(grad: &DVector<f64>, hess: DMatrix<f64>) -> Option<DVector<f64>> {
    match hess.clone().cholesky() {
        Some(ch) => Some(-ch.solve(grad)),
        None => hess.lu().solve(&-grad),
    }
}

/// Runs the barrier method from [`feasible_start`] and reports the KKT data.
pub fn solve_gp(p: &GpProblem) -> Result<GpKktReport, GpError> {
    let f = LogSumExp::new(&p.system);
    let n = f.n;
    let mut x = feasible_start(&p.system)?;
    let mut barrier = Barrier { f: &f, y: p.y.iter().map(to_f64).collect(), t: 1.0 };
    let mut total = 0usize;
    loop {
        let mut inner = 0usize;
        loop {
            let (grad, hess) = barrier.derivatives(&x);
            let Some(dir) = newton_direction(&grad, hess) else { break };
            let decrement = -grad.dot(&dir);
            let phi0 = barrier.value(&x).expect("iterate stays strictly feasible");
            if !(decrement > 0.0) || decrement / 2.0 <= NEWTON_TOL * (1.0 + phi0.abs()) {
                break;
            }
            let mut step = 1.0;
            let mut accepted = None;
            while step > 1e-20 {
                let trial: Vec<f64> = x.iter().zip(dir.iter()).map(|(xi, di)| xi + step * di).collect();
                if let Some(phi) = barrier.value(&trial) {
                    if phi <= phi0 - ARMIJO * step * decrement {
                        accepted = Some(trial);
                        break;
                    }
                }
                step *= 0.5;
            }
            inner += 1;
            total += 1;
            match accepted {
                Some(trial) => x = trial,
                None => break,
            }
            if inner >= MAX_NEWTON_PER_CENTERING || total >= MAX_NEWTON_TOTAL {
                let best = kkt_report(&f, &barrier.y, &x, barrier.t, total);
                return Err(GpError::MaxIterations { best: Box::new(best) });
            }
        }
        if (n as f64) / barrier.t < BARRIER_GAP {
            break;
        }
        barrier.t *= 10.0;
    }
    let report = kkt_report(&f, &barrier.y, &x, barrier.t, total);
    if report.meets(p.tol_f, p.tol_k) {
        Ok(report)
    } else {
        Err(GpError::KktViolation { report: Box::new(report) })
    }
}

fn kkt_report(f: &LogSumExp, y: &[f64], x: &[f64], t: f64, steps: usize) -> GpKktReport {
    let ev = g_eval_lse(f, x).expect("finite iterate");
    let barrier_multipliers: Vec<f64> = ev.values.iter().map(|g| 1.0 / (-t * g)).collect();
    let n = f.n;
    let jac = DMatrix::from_fn(n, n, |r, c| ev.gradients[c][r]);
    let multipliers: Vec<f64> = match jac.lu().solve(&DVector::from_column_slice(y)) {
        Some(l) => l.iter().copied().collect(),
        None => vec![f64::NAN; n],
    };
    let mut resid = DVector::from_column_slice(y);
    for (l, grad) in multipliers.iter().zip(&ev.gradients) {
        resid -= grad * *l;
    }
    GpKktReport {
        log_x: x.to_vec(),
        x: x.iter().map(|v| v.exp()).collect(),
        normalizers: ev.values.iter().map(|g| g.exp()).collect(),
        stationarity: if resid.iter().all(|v| v.is_finite()) { resid.amax() } else { f64::INFINITY },
        g: ev.values,
        multipliers,
        barrier_multipliers,
        barrier_t: t,
        newton_steps: steps,
    }
}

/// Outcome of one direction of the superlevel boundedness check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundedness {
    Bounded,
    Empty,
    Unbounded,
}

/// Maximises `±X_j` over `{log c_a + ⟨a, X⟩ ≤ 0, ⟨y, X⟩ ≥ level}` in exact
/// arithmetic, with `log c_a` rationalized at denominator ≤ 10^6. Returns the
/// worst outcome over all `2n` directions.
pub fn superlevel_boundedness(sys: &ClassicalSystem, y: &[Q], level: &Q) -> Boundedness {
    let n = sys.dim();
    let mut rows: Vec<(Vec<Q>, Q)> = Vec::new();
    for (tag, a) in sys.support().elements() {
        let lc = rationalize(to_f64(&sys.coeffs()[tag.color][tag.local]).ln(), RATIONALIZE_DEN);
        rows.push((a.to_vec(), -lc));
    }
    rows.push((y.iter().map(|v| -v.clone()).collect(), -level.clone()));
    let mut result = Boundedness::Bounded;
    for j in 0..n {
        for sign in [1i64, -1] {
            let mut obj = vec![Q::zero(); n];
            obj[j] = Q::from_integer(sign.into());
            let mut lp = LpProblem::new(obj);
            for (a, b) in &rows {
                lp.push(a.clone(), b.clone());
            }
            match lp.solve() {
                LpSolution::Optimal { .. } => {}
                LpSolution::Infeasible { .. } => result = Boundedness::Empty,
                LpSolution::Unbounded { .. } => return Boundedness::Unbounded,
                LpSolution::IterationLimit => unreachable!("exact simplex always terminates"),
            }
        }
    }
    result
}
