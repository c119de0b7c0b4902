//! LP oracles for cone membership and colorful vectors.
//!
//! A vector `y` is colorful for a colored support when it lies in the cone of
//! the whole support and every nonnegative decomposition of it uses at least
//! one exponent of every color. Each test below is one exact LP of the form
//!
//! ```text
//! maximize ⟨y, w⟩  subject to  ⟨g, w⟩ ≤ 0 for every generator g,  ⟨y, w⟩ ≤ 1
//! ```
//!
//! whose optimum is 0 (the dual multipliers decompose `y`) or 1 (the optimal
//! `w` separates `y` from the cone).

use crate::linalg;
use crate::lp::{LpProblem, LpSolution};
use crate::rational::{dot, Q};
use crate::system::{ColoredSupport, Tag};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Default cap on the number of tuples examined by [`find_colorful`].
pub const DEFAULT_SEARCH_BUDGET: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColorfulError {
    #[error("vector has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("generator {index} has dimension {got}, expected {expected}")]
    GeneratorDimension { index: usize, expected: usize, got: usize },
    #[error("expected {expected} vertex sets, got {got}")]
    SetCount { expected: usize, got: usize },
    #[error("vertex set {0} is empty")]
    EmptySet(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Membership {
    /// `y = Σ weights[g] · g` with nonnegative weights.
    Member { weights: Vec<Q> },
    /// `⟨g, w⟩ ≤ 0` for every generator and `⟨y, w⟩ > 0`.
    NotMember { separator: Vec<Q> },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }

    pub fn weights(&self) -> Option<&[Q]> {
        match self {
            Membership::Member { weights } => Some(weights),
            Membership::NotMember { .. } => None,
        }
    }
}

/// Decides `y ∈ cone(gens)` exactly.
pub fn cone_membership(y: &[Q], gens: &[Vec<Q>]) -> Result<Membership, ColorfulError> {
    let n = y.len();
    for (index, g) in gens.iter().enumerate() {
        if g.len() != n {
            return Err(ColorfulError::GeneratorDimension { index, expected: n, got: g.len() });
        }
    }
    Ok(membership_lp(y, gens.iter().map(Vec::as_slice)))
}

fn membership_lp<'a>(y: &[Q], gens: impl Iterator<Item = &'a [Q]>) -> Membership {
    let mut lp = LpProblem::new(y.to_vec());
    for g in gens {
        lp.push(g.to_vec(), Q::zero());
    }
    lp.push(y.to_vec(), Q::one());
    match lp.solve() {
        LpSolution::Optimal { x, mut duals, objective, .. } => {
            if objective.is_zero() {
                duals.pop();
                Membership::Member { weights: duals }
            } else {
                Membership::NotMember { separator: x }
            }
        }
        other => unreachable!("membership LP is feasible and bounded, got {:?}", other.status()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColorfulCertificate {
    /// `decomposition` is indexed like [`ColoredSupport::elements`] and
    /// reproduces `y`; `separators[i]` proves that no decomposition avoids
    /// color `i` (`⟨a, w⟩ ≤ 0` for `a ∉ S_i`, `⟨y, w⟩ > 0`).
    Colorful { decomposition: Vec<Q>, separators: Vec<Vec<Q>> },
    /// A decomposition of `y` with zero weight on every element of `missing_color`.
    NotColorful { missing_color: usize, decomposition: Vec<Q> },
    NotInCone { separator: Vec<Q> },
}

impl ColorfulCertificate {
    pub fn is_colorful(&self) -> bool {
        matches!(self, ColorfulCertificate::Colorful { .. })
    }

    pub fn verdict(&self) -> &'static str {
        match self {
            ColorfulCertificate::Colorful { .. } => "colorful",
            ColorfulCertificate::NotColorful { .. } => "not-colorful",
            ColorfulCertificate::NotInCone { .. } => "not-in-cone",
        }
    }

    /// Re-checks every claim of the certificate in exact arithmetic.
    pub fn verify(&self, y: &[Q], sup: &ColoredSupport) -> Result<(), String> {
        let reproduces = |mu: &[Q]| -> Result<(), String> {
            if mu.len() != sup.len() || mu.iter().any(|m| m.is_negative()) {
                return Err("decomposition has wrong length or negative weights".into());
            }
            let mut sum = vec![Q::zero(); sup.dim()];
            for ((_, a), m) in sup.elements().zip(mu) {
                for (s, ak) in sum.iter_mut().zip(a) {
                    *s += m * ak;
                }
            }
            if sum.as_slice() == y {
                Ok(())
            } else {
                Err("decomposition does not reproduce y".into())
            }
        };
        match self {
            ColorfulCertificate::Colorful { decomposition, separators } => {
                reproduces(decomposition)?;
                if separators.len() != sup.dim() {
                    return Err("one separator per color expected".into());
                }
                for (i, w) in separators.iter().enumerate() {
                    if !dot(y, w).is_positive() {
                        return Err(format!("separator {i} does not separate y"));
                    }
                    if sup.elements().any(|(t, a)| t.color != i && dot(a, w).is_positive()) {
                        return Err(format!("separator {i} is not valid on the other colors"));
                    }
                }
                for i in 0..sup.dim() {
                    let touched = sup.elements().zip(decomposition).any(|((t, _), m)| t.color == i && m.is_positive());
                    if !touched {
                        return Err(format!("decomposition skips color {i}"));
                    }
                }
                Ok(())
            }
            ColorfulCertificate::NotColorful { missing_color, decomposition } => {
                reproduces(decomposition)?;
                let used = sup.elements().zip(decomposition).any(|((t, _), m)| t.color == *missing_color && !m.is_zero());
                if used {
                    Err("decomposition uses the color it claims to avoid".into())
                } else {
                    Ok(())
                }
            }
            ColorfulCertificate::NotInCone { separator } => {
                if dot(y, separator).is_positive() && sup.elements().all(|(_, a)| !dot(a, separator).is_positive()) {
                    Ok(())
                } else {
                    Err("separator invalid".into())
                }
            }
        }
    }
}

/// Runs the `n + 1` membership LPs that decide whether `y` is colorful.
pub fn is_colorful(y: &[Q], sup: &ColoredSupport) -> Result<ColorfulCertificate, ColorfulError> {
    let n = sup.dim();
    if y.len() != n {
        return Err(ColorfulError::DimensionMismatch { expected: n, got: y.len() });
    }
    let decomposition = match membership_lp(y, sup.elements().map(|(_, a)| a)) {
        Membership::NotMember { separator } => return Ok(ColorfulCertificate::NotInCone { separator }),
        Membership::Member { weights } => weights,
    };
    let mut separators = Vec::with_capacity(n);
    for i in 0..n {
        let others = sup.elements().filter(|(t, _)| t.color != i).map(|(_, a)| a);
        match membership_lp(y, others) {
            Membership::Member { weights } => {
                let mut full = Vec::with_capacity(sup.len());
                let mut it = weights.into_iter();
                for (t, _) in sup.elements() {
                    full.push(if t.color == i { Q::zero() } else { it.next().expect("one weight per element") });
                }
                return Ok(ColorfulCertificate::NotColorful { missing_color: i, decomposition: full });
            }
            Membership::NotMember { separator } => separators.push(separator),
        }
    }
    Ok(ColorfulCertificate::Colorful { decomposition, separators })
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColorfulSearch {
    /// `vector` is the sum of the exponents in `tuple` (one per color).
    Found { vector: Vec<Q>, tuple: Vec<Tag>, certificate: ColorfulCertificate },
    /// Every tuple was examined and none of their sums is colorful. This does
    /// not prove that no colorful vector exists.
    Exhausted { examined: usize },
    /// The budget ran out before the enumeration finished.
    Unknown { examined: usize },
}

impl ColorfulSearch {
    pub fn vector(&self) -> Option<&[Q]> {
        match self {
            ColorfulSearch::Found { vector, .. } => Some(vector),
            _ => None,
        }
    }
}

/// Enumerates tuples `(a_1, …, a_n) ∈ S_1 × … × S_n` lexicographically and
/// tests `a_1 + … + a_n` for every linearly independent tuple.
pub fn find_colorful(sup: &ColoredSupport, budget: usize) -> ColorfulSearch {
    let n = sup.dim();
    let sizes: Vec<usize> = sup.colors().iter().map(Vec::len).collect();
    let mut idx = vec![0usize; n];
    let mut examined = 0usize;
    loop {
        if examined >= budget {
            return ColorfulSearch::Unknown { examined };
        }
        examined += 1;
        let picks: Vec<Vec<Q>> = (0..n).map(|i| sup.color(i)[idx[i]].clone()).collect();
        if linalg::independent(&picks) {
            let mut y = vec![Q::zero(); n];
            for a in &picks {
                for (s, ak) in y.iter_mut().zip(a) {
                    *s += ak;
                }
            }
            let cert = is_colorful(&y, sup).expect("dimension matches");
            if cert.is_colorful() {
                let tuple = idx.iter().enumerate().map(|(color, &local)| Tag { color, local }).collect();
                return ColorfulSearch::Found { vector: y, tuple, certificate: cert };
            }
        }
        // odometer, last color fastest
        let mut k = n;
        loop {
            if k == 0 {
                return ColorfulSearch::Exhausted { examined };
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < sizes[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Exact convex-hull membership; returns convex weights when `x ∈ conv(points)`.
pub fn conv_membership(x: &[Q], points: &[&[Q]]) -> Option<Vec<Q>> {
    let lifted_x = lift(x);
    let lifted: Vec<Vec<Q>> = points.iter().map(|p| lift(p)).collect();
    match membership_lp(&lifted_x, lifted.iter().map(Vec::as_slice)) {
        Membership::Member { weights } => Some(weights),
        Membership::NotMember { .. } => None,
    }
}

fn lift(p: &[Q]) -> Vec<Q> {
    let mut v = p.to_vec();
    v.push(Q::one());
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AffineVerdict {
    Inside,
    OutsideHull,
    /// The point lies in the hull of all sets except this one.
    InLeaveOneOut(usize),
}

impl AffineVerdict {
    pub fn is_inside(self) -> bool {
        self == AffineVerdict::Inside
    }
}

/// Colorful-interior membership for `n` vertex sets in `Q^{n-1}`: inside the
/// hull of the union and outside every leave-one-out hull.
pub fn affine_colorful_membership(x: &[Q], sets: &[Vec<Vec<Q>>]) -> Result<AffineVerdict, ColorfulError> {
    let n = sets.len();
    if x.len() + 1 != n {
        return Err(ColorfulError::SetCount { expected: x.len() + 1, got: n });
    }
    for (i, s) in sets.iter().enumerate() {
        if s.is_empty() {
            return Err(ColorfulError::EmptySet(i));
        }
        if let Some(p) = s.iter().find(|p| p.len() != x.len()) {
            return Err(ColorfulError::DimensionMismatch { expected: x.len(), got: p.len() });
        }
    }
    let all: Vec<&[Q]> = sets.iter().flatten().map(Vec::as_slice).collect();
    if conv_membership(x, &all).is_none() {
        return Ok(AffineVerdict::OutsideHull);
    }
    for i in 0..n {
        let others: Vec<&[Q]> = sets.iter().enumerate().filter(|(j, _)| *j != i).flat_map(|(_, s)| s.iter().map(Vec::as_slice)).collect();
        if conv_membership(x, &others).is_some() {
            return Ok(AffineVerdict::InLeaveOneOut(i));
        }
    }
    Ok(AffineVerdict::Inside)
}
