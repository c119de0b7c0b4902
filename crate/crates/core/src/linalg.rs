//! Small exact linear algebra over `Q`.

use crate::rational::Q;
use num_traits::Zero;

/// Row-reduces `rows` in place; returns the pivot columns.
fn echelon(rows: &mut [Vec<Q>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let (src, dst) = if i < r {
                    let (a, b) = rows.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = rows.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    if !s.is_zero() {
                        *d -= &f * s;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// Rank of a family of vectors.
pub fn rank(vectors: &[Vec<Q>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let ncols = vectors[0].len();
    let mut rows = vectors.to_vec();
    echelon(&mut rows, ncols).len()
}

pub fn independent(vectors: &[Vec<Q>]) -> bool {
    rank(vectors) == vectors.len()
}

/// Solves `Σ_k λ_k columns[k] = target` exactly. Returns one solution (free
/// variables set to zero) or `None` if the system is inconsistent.
pub fn solve_columns(columns: &[Vec<Q>], target: &[Q]) -> Option<Vec<Q>> {
    let k = columns.len();
    let n = target.len();
    let mut rows: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut row: Vec<Q> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = echelon(&mut rows, k + 1);
    if pivots.last() == Some(&k) {
        return None;
    }
    let mut sol = vec![Q::zero(); k];
    for (r, &c) in pivots.iter().enumerate() {
        sol[c] = rows[r][k].clone();
    }
    Some(sol)
}

/// Solves the square system `matrix · x = rhs` (row-major); `None` if singular.
pub fn solve_square(matrix: &[Vec<Q>], rhs: &[Q]) -> Option<Vec<Q>> {
    let n = matrix.len();
    let columns: Vec<Vec<Q>> = (0..n).map(|j| matrix.iter().map(|row| row[j].clone()).collect()).collect();
    if rank(&columns) < n {
        return None;
    }
    solve_columns(&columns, rhs)
}
