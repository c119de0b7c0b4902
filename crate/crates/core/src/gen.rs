//! Seeded random instance generators for tests, the acceptance suite and the
//! `generate` subcommand.

use crate::colorful::{find_colorful, ColorfulSearch, DEFAULT_SEARCH_BUDGET};
use crate::geometry3::{Point, Polygon};
use crate::lp::LpProblem;
use crate::rational::{dot_f64, frac, from_f64_exact, int, to_f64, Q};
use crate::system::{check_pointed, ClassicalSystem, ColoredSupport, TropicalSystem};
use num_traits::Zero;
use rand::Rng;

fn random_int_vec<R: Rng>(rng: &mut R, n: usize, lo: i64, hi: i64) -> Vec<Q> {
    (0..n).map(|_| int(rng.gen_range(lo..=hi))).collect()
}

/// Pointed integer support: a random direction `z` with nonzero entries and
/// exponents in `[-3, 3]^n` kept only when `⟨a, z⟩ < 0`.
pub fn random_pointed_support<R: Rng>(rng: &mut R, n: usize, max_terms: usize) -> ColoredSupport {
    let z: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.5) { rng.gen_range(1..=3) } else { -rng.gen_range(1..=3) }).collect();
    let colors = (0..n)
        .map(|_| {
            // only three admissible exponents exist when n = 1
            let k = rng.gen_range(1..=if n == 1 { max_terms.min(3) } else { max_terms });
            let mut set: Vec<Vec<Q>> = Vec::with_capacity(k);
            while set.len() < k {
                let a: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
                let s: i64 = a.iter().zip(&z).map(|(x, y)| x * y).sum();
                let v: Vec<Q> = a.iter().map(|x| int(*x)).collect();
                if s < 0 && !set.contains(&v) {
                    set.push(v);
                }
            }
            set
        })
        .collect();
    ColoredSupport::new(colors).expect("generated support is valid")
}

/// Pointed support where color `i` has `a_i ∈ [-3, -1]`, the other entries in
/// `[-1, 1]` and `Σ_j a_j < 0`, so `z = (1, …, 1)` certifies pointedness.
pub fn random_dominant_support<R: Rng>(rng: &mut R, n: usize, max_terms: usize) -> ColoredSupport {
    let colors = (0..n)
        .map(|i| {
            // only three admissible exponents exist when n = 1
            let k = rng.gen_range(1..=if n == 1 { max_terms.min(3) } else { max_terms });
            let mut set: Vec<Vec<Q>> = Vec::with_capacity(k);
            while set.len() < k {
                let a: Vec<i64> = (0..n).map(|j| if j == i { rng.gen_range(-3..=-1) } else { rng.gen_range(-1..=1) }).collect();
                let v: Vec<Q> = a.iter().map(|x| int(*x)).collect();
                if a.iter().sum::<i64>() < 0 && !set.contains(&v) {
                    set.push(v);
                }
            }
            set
        })
        .collect();
    ColoredSupport::new(colors).expect("generated support is valid")
}

/// Pointed tropical system with a colorful vector found by
/// [`find_colorful`]; coefficients are multiples of 1/4 in [-5, 5].
/// Alternates between [`random_pointed_support`] and
/// [`random_dominant_support`] until a colorful vector is found; generic
/// supports in dimension 4 rarely have a colorful tuple sum.
pub fn random_tropical<R: Rng>(rng: &mut R, n: usize, max_terms: usize) -> (TropicalSystem, Vec<Q>) {
    for attempt in 0.. {
        let sup = if attempt % 2 == 0 { random_pointed_support(rng, n, max_terms) } else { random_dominant_support(rng, n, max_terms) };
        let ColorfulSearch::Found { vector, .. } = find_colorful(&sup, DEFAULT_SEARCH_BUDGET) else { continue };
        let coeffs = sup.colors().iter().map(|set| set.iter().map(|_| frac(rng.gen_range(-20..=20), 4)).collect()).collect();
        return (TropicalSystem::new(sup, coeffs).expect("shapes match"), vector);
    }
    unreachable!("the attempt counter is unbounded")
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedGp {
    pub system: ClassicalSystem,
    pub y: Vec<Q>,
    /// `log x̂`.
    pub log_x: Vec<f64>,
    /// Whether the solution is known to be unique (Bellman-type exponents).
    pub unique: bool,
}

/// Classical system with `P(x̂) = 1` up to float rounding of the
/// coefficients `c_a = w_a e^{-⟨a, X̂⟩}`, `Σ_a w_a = 1` per color.
///
/// Even seeds of `style` give Bellman-type exponents `p - e_i` (`p` multiples
/// of 1/8 with mass ≤ 7/8, unique solution, `y = -1`); odd ones give nonzero
/// exponents in `{-2, -1, 0}^n` with `y` from [`find_colorful`].
pub fn planted_classical<R: Rng>(rng: &mut R, n: usize, max_terms: usize, style: usize) -> PlantedGp {
    loop {
        let bellman = style % 2 == 0;
        let colors: Vec<Vec<Vec<Q>>> = (0..n)
            .map(|i| {
                // 3^n - 1 nonzero vectors in {-2, -1, 0}^n
                let available = if bellman { usize::MAX } else { 3usize.saturating_pow(n as u32) - 1 };
                let k = rng.gen_range(1..=max_terms.min(available));
                let mut set: Vec<Vec<Q>> = Vec::new();
                while set.len() < k {
                    let v: Vec<Q> = if bellman {
                        let mass = rng.gen_range(0..=7);
                        let mut p = vec![0i64; n];
                        for _ in 0..mass {
                            p[rng.gen_range(0..n)] += 1;
                        }
                        p[i] -= 8;
                        p.iter().map(|v| frac(*v, 8)).collect()
                    } else {
                        random_int_vec(rng, n, -2, 0)
                    };
                    if v.iter().all(Zero::is_zero) || set.contains(&v) {
                        continue;
                    }
                    set.push(v);
                }
                set
            })
            .collect();
        let sup = ColoredSupport::new(colors).expect("valid support");
        if !check_pointed(&sup).is_pointed() {
            continue;
        }
        let y = if bellman {
            vec![int(-1); n]
        } else {
            match find_colorful(&sup, DEFAULT_SEARCH_BUDGET) {
                ColorfulSearch::Found { vector, .. } => vector,
                _ => continue,
            }
        };
        let log_x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let coeffs: Vec<Vec<Q>> = sup
            .colors()
            .iter()
            .map(|set| {
                let w: Vec<f64> = set.iter().map(|_| rng.gen_range(0.2..1.0)).collect();
                let total: f64 = w.iter().sum();
                set.iter()
                    .zip(&w)
                    .map(|(a, wa)| {
                        let af: Vec<f64> = a.iter().map(to_f64).collect();
                        from_f64_exact(wa / total * (-dot_f64(&af, &log_x)).exp()).expect("finite positive")
                    })
                    .collect()
            })
            .collect();
        let system = ClassicalSystem::new(sup, coeffs).expect("positive coefficients");
        return PlantedGp { system, y, log_x, unique: bellman };
    }
}

/// Dense LP with entries in `[-5, 5]`, right-hand sides in `[-3, 8]` and
/// halved objective entries; a mix of optimal, infeasible and unbounded.
pub fn random_lp<R: Rng>(rng: &mut R, n: usize, m: usize) -> LpProblem<Q> {
    let objective = (0..n).map(|_| frac(rng.gen_range(-6..=6), 2)).collect();
    let mut lp = LpProblem::new(objective);
    for _ in 0..m {
        let coeffs = random_int_vec(rng, n, -5, 5);
        lp.push(coeffs, int(rng.gen_range(-3..=8)));
    }
    lp
}

/// Colored point sets for colorfulness tests: `n` colors of 1..=`max_points`
/// integer vectors in `[-2, 2]^n`, plus an integer vector `y`.
pub fn random_colored_points<R: Rng>(rng: &mut R, n: usize, max_points: usize) -> (ColoredSupport, Vec<Q>) {
    let colors = (0..n).map(|_| (0..rng.gen_range(1..=max_points)).map(|_| random_int_vec(rng, n, -2, 2)).collect()).collect();
    (ColoredSupport::new(colors).expect("valid"), random_int_vec(rng, n, -3, 3))
}

/// Three polygons near the corners of a triangle, each the hull of 1 to 4
/// integer points in a box of random size. Centers are jittered so that some
/// instances have an empty colorful interior.
pub fn random_polygons<R: Rng>(rng: &mut R) -> [Polygon; 3] {
    let corners = [(0i64, 0i64), (40, 0), (0, 40)];
    let mut out: Vec<Polygon> = Vec::with_capacity(3);
    for (cx, cy) in corners {
        let (jx, jy) = (cx + rng.gen_range(-20..=20), cy + rng.gen_range(-20..=20));
        let r = rng.gen_range(1..=24);
        loop {
            let pts: Vec<Point> = (0..rng.gen_range(1..=4)).map(|_| [int(jx + rng.gen_range(-r..=r)), int(jy + rng.gen_range(-r..=r))]).collect();
            if let Ok(p) = Polygon::hull(&pts) {
                out.push(p);
                break;
            }
        }
    }
    let [a, b, c]: [Polygon; 3] = out.try_into().expect("three polygons");
    [a, b, c]
}
