//! Exact solution of square tropical posynomial systems through the linear
//! relaxation `max ⟨y, x⟩ s.t. c_a + ⟨a, x⟩ ≤ 0`, with `y` colorful.

use crate::colorful::{is_colorful, ColorfulCertificate};
use crate::lp::{LpProblem, LpSolution};
use crate::rational::Q;
use crate::system::{eval_tropical, Tag, TropicalSystem};
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TropicalError {
    #[error("vector has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector is not colorful ({verdict})")]
    NotColorful { verdict: &'static str, certificate: Box<ColorfulCertificate> },
    #[error("the relaxation P(x) <= 0 is infeasible")]
    InfeasibleRelaxation { farkas: Vec<Q> },
    #[error("the relaxation is unbounded in direction y")]
    UnboundedRelaxation { ray: Vec<Q> },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Row per support element (in [`crate::system::ColoredSupport::elements`]
/// order): `⟨a, x⟩ ≤ -c_a`; objective `y`.
pub fn build_lp(sys: &TropicalSystem, y: &[Q]) -> Result<LpProblem<Q>, TropicalError> {
    if y.len() != sys.dim() {
        return Err(TropicalError::DimensionMismatch { expected: sys.dim(), got: y.len() });
    }
    let mut lp = LpProblem::new(y.to_vec());
    for (tag, a) in sys.support().elements() {
        lp.push(a.to_vec(), -sys.coeff(tag).clone());
    }
    Ok(lp)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TropicalSolveReport {
    pub x: Vec<Q>,
    pub objective: Q,
    /// One multiplier per support element; `Σ μ_a a = y`.
    pub dual: Vec<Q>,
    /// Per color, the first element with positive multiplier and tight row.
    pub active: Vec<Option<Tag>>,
    /// `P(x)`; all zero whenever `y` is colorful.
    pub residual: Vec<Q>,
    pub colorful_checked: bool,
}

impl TropicalSolveReport {
    pub fn is_exact_solution(&self) -> bool {
        self.residual.iter().all(Zero::is_zero)
    }
}

/// Solves the relaxation and certifies `P(x*) = 0`. With `check_colorful`
/// unset, a non-colorful `y` is allowed and residuals are only reported.
pub fn solve_tropical(sys: &TropicalSystem, y: &[Q], check_colorful: bool) -> Result<TropicalSolveReport, TropicalError> {
    let lp = build_lp(sys, y)?;
    if check_colorful {
        let cert = is_colorful(y, sys.support()).expect("dimension checked");
        if !cert.is_colorful() {
            return Err(TropicalError::NotColorful { verdict: cert.verdict(), certificate: Box::new(cert) });
        }
    }
    let (x, dual, objective) = match lp.solve() {
        LpSolution::Optimal { x, duals, objective, .. } => (x, duals, objective),
        LpSolution::Infeasible { farkas } => return Err(TropicalError::InfeasibleRelaxation { farkas }),
        LpSolution::Unbounded { ray, .. } => {
            if check_colorful {
                return Err(TropicalError::Invariant("relaxation unbounded for a colorful vector".into()));
            }
            return Err(TropicalError::UnboundedRelaxation { ray });
        }
        LpSolution::IterationLimit => unreachable!("exact simplex always terminates"),
    };
    let residual = eval_tropical(sys, &x).expect("dimension checked");
    let tags = sys.support().tags();
    let mut active = vec![None; sys.dim()];
    for (k, (tag, a)) in sys.support().elements().enumerate() {
        if active[tag.color].is_none() && dual[k].is_positive() {
            let tight = sys.coeff(tag) + crate::rational::dot(a, &x);
            if tight.is_zero() {
                active[tag.color] = Some(tags[k]);
            }
        }
    }
    let report = TropicalSolveReport { x, objective, dual, active, residual, colorful_checked: check_colorful };
    if check_colorful {
        if !report.is_exact_solution() {
            return Err(TropicalError::Invariant("nonzero residual for a colorful vector".into()));
        }
        if report.active.iter().any(Option::is_none) {
            return Err(TropicalError::Invariant("some color has no active exponent".into()));
        }
    }
    Ok(report)
}
