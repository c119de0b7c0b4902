//! Colored supports, tropical and classical posynomial systems, and the
//! pointedness test shared by both.

use crate::lp::{LpProblem, LpSolution};
use crate::rational::{dot, to_f64, Q};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("expected {expected} colors, got {got}")]
    ColorCount { expected: usize, got: usize },
    #[error("color {0} is empty")]
    EmptyColor(usize),
    #[error("exponent {local} of color {color} has length {got}, expected {expected}")]
    ExponentLength { color: usize, local: usize, expected: usize, got: usize },
    #[error("color {color} has {got} coefficients for {expected} exponents")]
    CoefficientCount { color: usize, expected: usize, got: usize },
    #[error("coefficient {local} of color {color} is not strictly positive")]
    NonPositiveCoefficient { color: usize, local: usize },
    #[error("point has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("classical evaluation needs strictly positive entries (index {0})")]
    NonPositiveInput(usize),
}

/// Identity of one support element: its color and its position in that color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tag {
    pub color: usize,
    pub local: usize,
}

/// `n` nonempty finite sets of exponent vectors of `Q^n`, kept as a disjoint
/// union: equal vectors in different colors stay distinct elements.
#[derive(Debug, Clone, PartialEq)]
pub struct ColoredSupport {
    n: usize,
    colors: Vec<Vec<Vec<Q>>>,
}

impl ColoredSupport {
    pub fn new(colors: Vec<Vec<Vec<Q>>>) -> Result<Self, SystemError> {
        let n = colors.len();
        if n == 0 {
            return Err(SystemError::ZeroDimension);
        }
        for (color, set) in colors.iter().enumerate() {
            if set.is_empty() {
                return Err(SystemError::EmptyColor(color));
            }
            for (local, a) in set.iter().enumerate() {
                if a.len() != n {
                    return Err(SystemError::ExponentLength { color, local, expected: n, got: a.len() });
                }
            }
        }
        Ok(ColoredSupport { n, colors })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn colors(&self) -> &[Vec<Vec<Q>>] {
        &self.colors
    }

    pub fn color(&self, i: usize) -> &[Vec<Q>] {
        &self.colors[i]
    }

    pub fn len(&self) -> usize {
        self.colors.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All elements in color-major order with their tags.
    pub fn elements(&self) -> impl Iterator<Item = (Tag, &[Q])> + '_ {
        self.colors
            .iter()
            .enumerate()
            .flat_map(|(color, set)| set.iter().enumerate().map(move |(local, a)| (Tag { color, local }, a.as_slice())))
    }

    pub fn tags(&self) -> Vec<Tag> {
        self.elements().map(|(t, _)| t).collect()
    }

    /// Position of `tag` in [`ColoredSupport::elements`] order.
    pub fn flat_index(&self, tag: Tag) -> usize {
        self.colors[..tag.color].iter().map(Vec::len).sum::<usize>() + tag.local
    }
}

fn check_coeff_shape<T>(sup: &ColoredSupport, coeffs: &[Vec<T>]) -> Result<(), SystemError> {
    if coeffs.len() != sup.dim() {
        return Err(SystemError::ColorCount { expected: sup.dim(), got: coeffs.len() });
    }
    for (color, (set, c)) in sup.colors.iter().zip(coeffs).enumerate() {
        if set.len() != c.len() {
            return Err(SystemError::CoefficientCount { color, expected: set.len(), got: c.len() });
        }
    }
    Ok(())
}

/// `P_i(x) = max_a (c_a + ⟨a, x⟩) = 0` for every color `i`, exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct TropicalSystem {
    support: ColoredSupport,
    coeffs: Vec<Vec<Q>>,
}

impl TropicalSystem {
    pub fn new(support: ColoredSupport, coeffs: Vec<Vec<Q>>) -> Result<Self, SystemError> {
        check_coeff_shape(&support, &coeffs)?;
        Ok(TropicalSystem { support, coeffs })
    }

    /// Builds a system from `(exponent, coefficient)` terms per color.
    pub fn from_terms(terms: Vec<Vec<(Vec<Q>, Q)>>) -> Result<Self, SystemError> {
        let (exps, coeffs) = split_terms(terms);
        TropicalSystem::new(ColoredSupport::new(exps)?, coeffs)
    }

    pub fn support(&self) -> &ColoredSupport {
        &self.support
    }

    pub fn coeffs(&self) -> &[Vec<Q>] {
        &self.coeffs
    }

    pub fn coeff(&self, tag: Tag) -> &Q {
        &self.coeffs[tag.color][tag.local]
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    pub fn eval(&self, x: &[Q]) -> Result<Vec<Q>, SystemError> {
        eval_tropical(self, x)
    }
}

/// `P_i(x) = Σ_a c_a x^a = 1` for every color `i`, with `c_a > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalSystem {
    support: ColoredSupport,
    coeffs: Vec<Vec<Q>>,
}

impl ClassicalSystem {
    pub fn new(support: ColoredSupport, coeffs: Vec<Vec<Q>>) -> Result<Self, SystemError> {
        check_coeff_shape(&support, &coeffs)?;
        for (color, cs) in coeffs.iter().enumerate() {
            if let Some(local) = cs.iter().position(|c| !c.is_positive()) {
                return Err(SystemError::NonPositiveCoefficient { color, local });
            }
        }
        Ok(ClassicalSystem { support, coeffs })
    }

    pub fn from_terms(terms: Vec<Vec<(Vec<Q>, Q)>>) -> Result<Self, SystemError> {
        let (exps, coeffs) = split_terms(terms);
        ClassicalSystem::new(ColoredSupport::new(exps)?, coeffs)
    }

    pub fn support(&self) -> &ColoredSupport {
        &self.support
    }

    pub fn coeffs(&self) -> &[Vec<Q>] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>, SystemError> {
        eval_classical(self, x)
    }
}

fn split_terms(terms: Vec<Vec<(Vec<Q>, Q)>>) -> (Vec<Vec<Vec<Q>>>, Vec<Vec<Q>>) {
    terms.into_iter().map(|color| color.into_iter().unzip()).unzip()
}

fn check_dim(n: usize, got: usize) -> Result<(), SystemError> {
    if n != got {
        return Err(SystemError::DimensionMismatch { expected: n, got });
    }
    Ok(())
}

/// Component `i` is `max_{a ∈ S_i} (c_a + ⟨a, x⟩)`, computed exactly.
pub fn eval_tropical(sys: &TropicalSystem, x: &[Q]) -> Result<Vec<Q>, SystemError> {
    check_dim(sys.dim(), x.len())?;
    Ok(sys
        .support
        .colors
        .iter()
        .zip(&sys.coeffs)
        .map(|(set, cs)| {
            set.iter()
                .zip(cs)
                .map(|(a, c)| c + dot(a, x))
                .max()
                .expect("colors are nonempty")
        })
        .collect())
}

/// Component `i` is `Σ_{a ∈ S_i} c_a ∏_k x_k^{a_k}` in double precision.
pub fn eval_classical(sys: &ClassicalSystem, x: &[f64]) -> Result<Vec<f64>, SystemError> {
    check_dim(sys.dim(), x.len())?;
    if let Some(i) = x.iter().position(|v| !(*v > 0.0)) {
        return Err(SystemError::NonPositiveInput(i));
    }
    let logs: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    Ok(sys
        .support
        .colors
        .iter()
        .zip(&sys.coeffs)
        .map(|(set, cs)| {
            set.iter()
                .zip(cs)
                .map(|(a, c)| {
                    let expo: f64 = a.iter().zip(&logs).map(|(ak, lk)| to_f64(ak) * lk).sum();
                    to_f64(c) * expo.exp()
                })
                .sum()
        })
        .collect())
}

/// Exact classical evaluation, available when every exponent is an integer.
/// Returns `None` if some exponent is fractional.
pub fn eval_classical_exact(sys: &ClassicalSystem, x: &[Q]) -> Result<Option<Vec<Q>>, SystemError> {
    check_dim(sys.dim(), x.len())?;
    if let Some(i) = x.iter().position(|v| !v.is_positive()) {
        return Err(SystemError::NonPositiveInput(i));
    }
    let mut out = Vec::with_capacity(sys.dim());
    for (set, cs) in sys.support.colors.iter().zip(&sys.coeffs) {
        let mut total = Q::zero();
        for (a, c) in set.iter().zip(cs) {
            let mut term = c.clone();
            for (ak, xk) in a.iter().zip(x) {
                if !ak.is_integer() {
                    return Ok(None);
                }
                let e: i32 = match i32::try_from(ak.to_integer()) {
                    Ok(e) => e,
                    Err(_) => return Ok(None),
                };
                term *= num_traits::Pow::pow(xk, e);
            }
            total += term;
        }
        out.push(total);
    }
    Ok(Some(out))
}

/// Result of the pointedness LP.
#[derive(Debug, Clone, PartialEq)]
pub enum PointednessCertificate {
    /// `⟨a, z⟩ < 0` for every support element `a`.
    Pointed { witness: Vec<Q> },
    /// The normalised LP `max t` has optimum 0.
    NotPointed { optimum: Q },
}

impl PointednessCertificate {
    pub fn witness(&self) -> Option<&[Q]> {
        match self {
            PointednessCertificate::Pointed { witness } => Some(witness),
            PointednessCertificate::NotPointed { .. } => None,
        }
    }

    pub fn is_pointed(&self) -> bool {
        self.witness().is_some()
    }
}

/// Solves `max t` s.t. `⟨a, z⟩ + t ≤ 0` for all `a`, `t ≤ 1`, exactly.
pub fn check_pointed(sup: &ColoredSupport) -> PointednessCertificate {
    let n = sup.dim();
    let mut obj = vec![Q::zero(); n + 1];
    obj[n] = Q::one();
    let mut lp = LpProblem::new(obj);
    for (_, a) in sup.elements() {
        let mut row = a.to_vec();
        row.push(Q::one());
        lp.push(row, Q::zero());
    }
    let mut cap = vec![Q::zero(); n + 1];
    cap[n] = Q::one();
    lp.push(cap, Q::one());
    match lp.solve() {
        LpSolution::Optimal { x, objective, .. } => {
            if objective.is_positive() {
                let witness = x[..n].to_vec();
                debug_assert!(sup.elements().all(|(_, a)| dot(a, &witness).is_negative()));
                PointednessCertificate::Pointed { witness }
            } else {
                PointednessCertificate::NotPointed { optimum: objective }
            }
        }
        other => unreachable!("pointedness LP is feasible and bounded, got {:?}", other.status()),
    }
}
