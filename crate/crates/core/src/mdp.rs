//! Markov decision processes as tropical posynomial systems.
//!
//! State `i` with actions `p ∈ B_i` (substochastic, reward `c_p`) becomes the
//! color `{p - e_i}`; `P(v) = 0` is the Bellman equation
//! `v_i = max_p (c_p + ⟨p, v⟩)`.

use crate::linalg::solve_square;
use crate::rational::{dot, frac, to_f64, Q};
use crate::system::TropicalSystem;
use crate::tropical::{solve_tropical, TropicalError};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use thiserror::Error;

/// Iteration cap for [`value_iteration`].
pub const VALUE_ITERATION_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MdpError {
    #[error("model has no states")]
    Empty,
    #[error("state {0} has no actions")]
    NoActions(usize),
    #[error("action {action} of state {state} has length {got}, expected {expected}")]
    DimensionMismatch { state: usize, action: usize, expected: usize, got: usize },
    #[error("action {action} of state {state} is not substochastic")]
    NotSubstochastic { state: usize, action: usize },
    #[error("model is not of discounted type")]
    NotDiscounted,
    #[error("value iteration did not converge (residual {residual})")]
    MaxIterations { residual: f64 },
    #[error(transparent)]
    Tropical(#[from] TropicalError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    pub p: Vec<Q>,
    pub reward: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdpModel {
    actions: Vec<Vec<Action>>,
}

impl MdpModel {
    pub fn new(actions: Vec<Vec<Action>>) -> Result<Self, MdpError> {
        let n = actions.len();
        if n == 0 {
            return Err(MdpError::Empty);
        }
        for (i, acts) in actions.iter().enumerate() {
            if acts.is_empty() {
                return Err(MdpError::NoActions(i));
            }
            for (k, a) in acts.iter().enumerate() {
                if a.p.len() != n {
                    return Err(MdpError::DimensionMismatch { state: i, action: k, expected: n, got: a.p.len() });
                }
                let total: Q = a.p.iter().sum();
                if a.p.iter().any(Signed::is_negative) || total > Q::one() {
                    return Err(MdpError::NotSubstochastic { state: i, action: k });
                }
            }
        }
        Ok(MdpModel { actions })
    }

    pub fn states(&self) -> usize {
        self.actions.len()
    }

    pub fn actions(&self, i: usize) -> &[Action] {
        &self.actions[i]
    }

    /// `T_i(v) = max_p (c_p + ⟨p, v⟩)` in floating point.
    pub fn bellman(&self, v: &[f64]) -> Vec<f64> {
        self.actions
            .iter()
            .map(|acts| {
                acts.iter()
                    .map(|a| to_f64(&a.reward) + a.p.iter().zip(v).map(|(p, vj)| to_f64(p) * vj).sum::<f64>())
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }

    /// Exact Bellman operator.
    pub fn bellman_exact(&self, v: &[Q]) -> Vec<Q> {
        self.actions
            .iter()
            .map(|acts| acts.iter().map(|a| &a.reward + dot(&a.p, v)).max().expect("nonempty action set"))
            .collect()
    }
}

pub fn to_tropical(m: &MdpModel) -> TropicalSystem {
    let terms = m
        .actions
        .iter()
        .enumerate()
        .map(|(i, acts)| {
            acts.iter()
                .map(|a| {
                    let mut e = a.p.clone();
                    e[i] -= Q::one();
                    (e, a.reward.clone())
                })
                .collect()
        })
        .collect();
    TropicalSystem::from_terms(terms).expect("validated model gives a valid system")
}

fn strictly_substochastic(a: &Action) -> bool {
    a.p.iter().sum::<Q>() < Q::one()
}

pub fn is_discounted(m: &MdpModel) -> bool {
    m.actions.iter().all(|acts| acts.iter().any(strictly_substochastic))
}

/// Largest row sum over all actions, as a contraction modulus.
fn modulus(m: &MdpModel) -> f64 {
    m.actions.iter().flatten().map(|a| to_f64(&a.p.iter().sum::<Q>())).fold(0.0, f64::max)
}

/// Bellman iteration from 0 until `‖v - T(v)‖∞ ≤ tol`. When every action is
/// strictly substochastic the threshold is tightened to `tol·(1 - γ)` so the
/// result is within `tol` of the fixed point.
pub fn value_iteration(m: &MdpModel, tol: f64) -> Result<Vec<f64>, MdpError> {
    if !is_discounted(m) {
        return Err(MdpError::NotDiscounted);
    }
    let gamma = modulus(m);
    let threshold = if gamma < 1.0 { tol * (1.0 - gamma) } else { tol };
    let mut v = vec![0.0; m.states()];
    let mut residual = f64::INFINITY;
    for _ in 0..VALUE_ITERATION_CAP {
        let next = m.bellman(&v);
        residual = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if residual <= threshold {
            return Ok(v);
        }
        v = next;
    }
    Err(MdpError::MaxIterations { residual })
}

/// Exact value vector from the tropical relaxation with `y = (-1, …, -1)`.
pub fn solve_mdp(m: &MdpModel) -> Result<Vec<Q>, MdpError> {
    if !is_discounted(m) {
        return Err(MdpError::NotDiscounted);
    }
    let y = vec![-Q::one(); m.states()];
    let report = solve_tropical(&to_tropical(m), &y, true)?;
    Ok(report.x)
}

/// For a negative `x`, picks the first strictly substochastic action `p^i` of
/// each state and returns `λ = -(I - M)^{-1} x` where `M` has columns `p^i`,
/// so that `Σ_i λ_i (p^i - e_i) = x`.
pub fn negative_decomposition(m: &MdpModel, x: &[Q]) -> Option<(Vec<Q>, Vec<Vec<Q>>)> {
    let n = m.states();
    let chosen: Vec<Vec<Q>> = m.actions.iter().map(|acts| acts.iter().find(|a| strictly_substochastic(a)).map(|a| a.p.clone())).collect::<Option<_>>()?;
    let matrix: Vec<Vec<Q>> = (0..n)
        .map(|r| (0..n).map(|c| if r == c { Q::one() - &chosen[c][r] } else { -chosen[c][r].clone() }).collect())
        .collect();
    let rhs: Vec<Q> = x.iter().map(|v| -v.clone()).collect();
    let lambda = solve_square(&matrix, &rhs)?;
    Some((lambda, chosen))
}

/// Random discounted MDP: probabilities are multiples of 1/16, every action has
/// mass ≤ 15/16 and the first action of each state has mass ≤ 7/8. Rewards are
/// multiples of 1/16 in [-2, 2].
pub fn random_mdp<R: Rng>(rng: &mut R, n: usize, max_actions: usize) -> MdpModel {
    let mut actions = Vec::with_capacity(n);
    for _ in 0..n {
        let k = rng.gen_range(1..=max_actions);
        let mut acts = Vec::with_capacity(k);
        for a in 0..k {
            let budget = if a == 0 { 14 } else { 15 };
            let mass = rng.gen_range(0..=budget);
            let mut p = vec![0i64; n];
            for _ in 0..mass {
                p[rng.gen_range(0..n)] += 1;
            }
            acts.push(Action { p: p.iter().map(|v| frac(*v, 16)).collect(), reward: frac(rng.gen_range(-32..=32), 16) });
        }
        actions.push(acts);
    }
    MdpModel::new(actions).expect("generator respects the model invariants")
}

/// Strictly negative random vector with entries in [-4, -1/16].
pub fn random_negative<R: Rng>(rng: &mut R, n: usize) -> Vec<Q> {
    (0..n).map(|_| frac(-rng.gen_range(1..=64), 16)).collect()
}

pub fn bellman_residual_is_zero(m: &MdpModel, v: &[Q]) -> bool {
    m.bellman_exact(v).iter().zip(v).all(|(t, vi)| (t - vi).is_zero())
}
