//! Reference implementations used as independent oracles by the integration
//! tests. Everything here is deliberately naive.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A λ = b` for square `A` given by columns; `None` if singular.
pub fn gauss_solve(columns: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = b.len();
    let k = columns.len();
    assert_eq!(n, k, "square systems only");
    let mut m: Vec<Vec<Q>> = (0..n).map(|r| columns.iter().map(|c| c[r].clone()).chain(std::iter::once(b[r].clone())).collect()).collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for v in m[col].iter_mut() {
            *v /= &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[col].clone();
                for (v, pv) in m[r].iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
    }
    Some(m.iter().map(|row| row[n].clone()).collect())
}

/// Rank by fraction-free elimination on a copy.
pub fn rank(vectors: &[Vec<Q>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let mut m = vectors.to_vec();
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                let pivot_row = m[r].clone();
                for (v, pv) in m[i].iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Cone membership by Carathéodory: some linearly independent subset of the
/// generators represents `y` with nonnegative weights.
pub fn brute_in_cone(y: &[Q], gens: &[Vec<Q>]) -> bool {
    if y.iter().all(Zero::is_zero) {
        return true;
    }
    let d = y.len();
    for k in 1..=d.min(gens.len()) {
        for s in subsets(gens.len(), k) {
            let basis: Vec<Vec<Q>> = s.iter().map(|&i| gens[i].clone()).collect();
            if rank(&basis) < k {
                continue;
            }
            // complete to a square system on k pivot rows
            if let Some(l) = solve_independent(&basis, y) {
                if l.iter().all(|v| !v.is_negative()) {
                    return true;
                }
            }
        }
    }
    false
}

/// Unique coefficients of `y` in an independent family, if `y` is in its span.
fn solve_independent(basis: &[Vec<Q>], y: &[Q]) -> Option<Vec<Q>> {
    let k = basis.len();
    let d = y.len();
    // pick k rows making the k×k minor invertible
    for rows in subsets(d, k) {
        let cols: Vec<Vec<Q>> = basis.iter().map(|b| rows.iter().map(|&r| b[r].clone()).collect()).collect();
        let rhs: Vec<Q> = rows.iter().map(|&r| y[r].clone()).collect();
        if let Some(l) = gauss_solve(&cols, &rhs) {
            let ok = (0..d).all(|r| basis.iter().zip(&l).map(|(b, w)| &b[r] * w).sum::<Q>() == y[r]);
            return ok.then_some(l);
        }
    }
    None
}

/// Colorful: in the cone of all exponents but not in any leave-one-color-out cone.
pub fn brute_colorful(y: &[Q], colors: &[Vec<Vec<Q>>]) -> bool {
    let all: Vec<Vec<Q>> = colors.iter().flatten().cloned().collect();
    if !brute_in_cone(y, &all) {
        return false;
    }
    (0..colors.len()).all(|i| {
        let rest: Vec<Vec<Q>> = colors.iter().enumerate().filter(|(j, _)| *j != i).flat_map(|(_, s)| s.iter().cloned()).collect();
        !brute_in_cone(y, &rest)
    })
}

/// `max_a (c_a + ⟨a, x⟩)` per color.
pub fn tropical_values(colors: &[Vec<Vec<Q>>], coeffs: &[Vec<Q>], x: &[Q]) -> Vec<Q> {
    colors
        .iter()
        .zip(coeffs)
        .map(|(set, cs)| set.iter().zip(cs).map(|(a, c)| c + dot(a, x)).max().expect("nonempty color"))
        .collect()
}

/// `Σ_a c_a Π x_k^{a_k}` per color, in floating point.
pub fn posynomial_values(colors: &[Vec<Vec<f64>>], coeffs: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    colors
        .iter()
        .zip(coeffs)
        .map(|(set, cs)| set.iter().zip(cs).map(|(a, c)| c * a.iter().zip(x).map(|(e, xi)| xi.powf(*e)).product::<f64>()).sum())
        .collect()
}

/// Exact posynomial values for integer exponents.
pub fn posynomial_exact(colors: &[Vec<Vec<Q>>], coeffs: &[Vec<Q>], x: &[Q]) -> Vec<Q> {
    colors
        .iter()
        .zip(coeffs)
        .map(|(set, cs)| {
            set.iter()
                .zip(cs)
                .map(|(a, c)| {
                    let mut term = c.clone();
                    for (e, xi) in a.iter().zip(x) {
                        assert!(e.is_integer(), "integer exponents only");
                        let k: i64 = e.to_integer().try_into().expect("small exponent");
                        let base = if k < 0 { xi.recip() } else { xi.clone() };
                        for _ in 0..k.unsigned_abs() {
                            term *= &base;
                        }
                    }
                    term
                })
                .sum()
        })
        .collect()
}

/// Optimal value of `max ⟨y, x⟩ s.t. A x ≤ b` by enumerating vertices.
/// Only meaningful when the optimum is attained at a vertex (rank n rows).
pub fn vertex_optimum(objective: &[Q], rows: &[(Vec<Q>, Q)]) -> Option<Q> {
    let n = objective.len();
    let mut best: Option<Q> = None;
    for s in subsets(rows.len(), n) {
        let cols: Vec<Vec<Q>> = (0..n).map(|j| s.iter().map(|&r| rows[r].0[j].clone()).collect()).collect();
        let rhs: Vec<Q> = s.iter().map(|&r| rows[r].1.clone()).collect();
        let Some(x) = gauss_solve(&cols, &rhs) else { continue };
        if rows.iter().all(|(a, b)| dot(a, &x) <= *b) {
            let v = dot(objective, &x);
            if best.as_ref().map_or(true, |b| v > *b) {
                best = Some(v);
            }
        }
    }
    best
}

pub fn is_one(v: &Q) -> bool {
    v.is_one()
}
