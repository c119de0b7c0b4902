//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use common::{brute_colorful, dot, posynomial_exact, posynomial_values, q, qf, tropical_values, vertex_optimum, Q};
use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{Signed, Zero};
use posysolve::colorful::{affine_colorful_membership, is_colorful};
use posysolve::gen::{planted_classical, random_colored_points, random_lp, random_polygons, random_tropical};
use posysolve::geometry3::{bar_sets, colorful_simplex, hat_intersection_empty, point, tangent_line, Point, Polygon};
use posysolve::gp::{g_eval, solve_gp, superlevel_boundedness, Boundedness, GpProblem};
use posysolve::lp::{LpProblem, LpSolution};
use posysolve::mdp::{is_discounted, negative_decomposition, random_mdp, solve_mdp, to_tropical, value_iteration, MdpModel};
use posysolve::rational::{to_f64, to_f64_vec};
use posysolve::satgen::{
    classical_clause_level, cnf_to_classical, cnf_to_tropical, decode_tropical, encode_assignment, exhaustive_corpus, sat_oracle, Cnf, GadgetKind,
};
use posysolve::system::{ClassicalSystem, TropicalSystem};
use posysolve::tropical::solve_tropical;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn support_of(sys: &TropicalSystem) -> (Vec<Vec<Vec<Q>>>, Vec<Vec<Q>>) {
    (sys.support().colors().to_vec(), sys.coeffs().to_vec())
}

fn classical_parts(sys: &ClassicalSystem) -> (Vec<Vec<Vec<Q>>>, Vec<Vec<Q>>) {
    (sys.support().colors().to_vec(), sys.coeffs().to_vec())
}

fn floats(colors: &[Vec<Vec<Q>>]) -> Vec<Vec<Vec<f64>>> {
    colors.iter().map(|s| s.iter().map(|a| to_f64_vec(a)).collect()).collect()
}

// 1
fn exact_tropical() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let instances: Vec<_> = (0..500).map(|k| random_tropical(&mut rng, 1 + k % 4, 4)).collect();
    let start = Instant::now();
    let mut reports = Vec::with_capacity(instances.len());
    for (sys, y) in &instances {
        reports.push(solve_tropical(sys, y, true).map_err(|e| format!("solver error: {e}"))?);
    }
    let elapsed = start.elapsed();
    for (k, ((sys, _), r)) in instances.iter().zip(&reports).enumerate() {
        let (colors, coeffs) = support_of(sys);
        let vals = tropical_values(&colors, &coeffs, &r.x);
        ensure!(vals.iter().all(Zero::is_zero), "instance {k}: residual {vals:?}");
    }
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!("500/500 exact, solve time {:.2?}", elapsed))
}

fn own_bellman(m: &MdpModel, v: &[Q]) -> Vec<Q> {
    (0..m.states()).map(|i| m.actions(i).iter().map(|a| &a.reward + dot(&a.p, v)).max().expect("actions")).collect()
}

// 2
fn mdp_cross_validation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0f64;
    for k in 0..100 {
        let n = 1 + k % 4;
        let m = random_mdp(&mut rng, n, 3);
        ensure!(is_discounted(&m), "instance {k} not discounted");
        let y = vec![q(-1); n];
        let cert = is_colorful(&y, to_tropical(&m).support()).map_err(|e| e.to_string())?;
        ensure!(cert.is_colorful(), "instance {k}: y = -1 not colorful");
        let exact = solve_mdp(&m).map_err(|e| format!("instance {k}: {e}"))?;
        ensure!(own_bellman(&m, &exact) == exact, "instance {k}: not a Bellman fixed point");
        let vi = value_iteration(&m, 1e-10).map_err(|e| format!("instance {k}: {e}"))?;
        let err = exact.iter().zip(&vi).map(|(a, b)| (to_f64(a) - b).abs()).fold(0.0, f64::max);
        ensure!(err <= 1e-8, "instance {k}: sup error {err:e}");
        worst = worst.max(err);
        let x: Vec<Q> = (0..n).map(|_| qf(-rng.gen_range(1..=16), 4)).collect();
        let (lambda, chosen) = negative_decomposition(&m, &x).ok_or(format!("instance {k}: no decomposition"))?;
        ensure!(lambda.iter().all(|l| !l.is_negative()), "instance {k}: negative weight");
        let mut sum = vec![Q::zero(); n];
        for (i, (l, p)) in lambda.iter().zip(&chosen).enumerate() {
            for r in 0..n {
                sum[r] += l * (&p[r] - if r == i { q(1) } else { q(0) });
            }
        }
        ensure!(sum == x, "instance {k}: decomposition does not sum to x");
    }
    Ok(format!("100/100 colorful, worst sup error {worst:.1e}"))
}

// 3
fn geometric_programs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let (mut worst_p, mut worst_time, mut worst_rec, mut min_lambda) = (0f64, Duration::ZERO, 0f64, f64::INFINITY);
    for k in 0..100 {
        let g = planted_classical(&mut rng, 1 + k % 4, 3, k);
        let (colors, coeffs) = classical_parts(&g.system);
        let problem = GpProblem::new(g.system.clone(), g.y.clone()).map_err(|e| format!("instance {k}: {e}"))?;
        let start = Instant::now();
        let report = solve_gp(&problem).map_err(|e| format!("instance {k}: {e}"))?;
        let t = start.elapsed();
        ensure!(t < Duration::from_secs(1), "instance {k}: took {t:?}");
        worst_time = worst_time.max(t);
        let cf: Vec<Vec<f64>> = coeffs.iter().map(|c| to_f64_vec(c)).collect();
        let vals = posynomial_values(&floats(&colors), &cf, &report.x);
        let dev = vals.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        ensure!(dev <= 2e-6, "instance {k}: max |P - 1| = {dev:e}");
        worst_p = worst_p.max(dev);
        ensure!(report.multipliers.iter().all(|l| *l > 0.0), "instance {k}: multipliers {:?}", report.multipliers);
        min_lambda = report.multipliers.iter().copied().fold(min_lambda, f64::min);
        if g.unique {
            let rec = report.log_x.iter().zip(&g.log_x).map(|(a, b)| (a - b).abs() / b.abs().max(1.0)).fold(0.0, f64::max);
            ensure!(rec <= 1e-6, "instance {k}: recovery error {rec:e}");
            worst_rec = worst_rec.max(rec);
        }
    }
    let golden = ClassicalSystem::from_terms(vec![vec![(vec![q(-1)], q(1)), (vec![q(-2)], q(1))]]).expect("valid");
    let report = solve_gp(&GpProblem::new(golden, vec![q(-1)]).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let gerr = (report.x[0] - phi).abs();
    ensure!(gerr <= 1e-8, "golden ratio off by {gerr:e}");
    Ok(format!(
        "100/100 converged, max |P-1| {worst_p:.1e}, min λ {min_lambda:.2e}, recovery {worst_rec:.1e}, slowest {worst_time:.2?}, golden error {gerr:.1e}"
    ))
}

fn rows_of(lp: &LpProblem<Q>) -> Vec<(Vec<Q>, Q)> {
    lp.rows.iter().map(|r| (r.coeffs.clone(), r.rhs.clone())).collect()
}

/// Independent certificate check; returns the status label.
fn check_lp_certificate(lp: &LpProblem<Q>, sol: &LpSolution<Q>) -> Result<&'static str, String> {
    let rows = rows_of(lp);
    let n = lp.objective.len();
    let feasible = |x: &[Q]| rows.iter().all(|(a, b)| dot(a, x) <= *b);
    match sol {
        LpSolution::Optimal { x, duals, objective, .. } => {
            ensure!(feasible(x), "primal infeasible");
            ensure!(duals.iter().all(|m| !m.is_negative()), "negative dual");
            let comb: Vec<Q> = (0..n).map(|j| rows.iter().zip(duals).map(|((a, _), m)| &a[j] * m).sum()).collect();
            ensure!(comb == lp.objective, "dual infeasible");
            let dual_obj: Q = rows.iter().zip(duals).map(|((_, b), m)| b * m).sum();
            ensure!(dot(&lp.objective, x) == *objective && *objective == dual_obj, "duality gap");
            for ((a, b), m) in rows.iter().zip(duals) {
                ensure!((m * (b - dot(a, x))).is_zero(), "complementary slackness");
            }
            if let Some(v) = vertex_optimum(&lp.objective, &rows) {
                ensure!(v == *objective, "vertex oracle disagrees: {v} vs {objective}");
            }
            Ok("optimal")
        }
        LpSolution::Infeasible { farkas } => {
            ensure!(farkas.iter().all(|m| !m.is_negative()), "negative Farkas weight");
            let comb: Vec<Q> = (0..n).map(|j| rows.iter().zip(farkas).map(|((a, _), m)| &a[j] * m).sum()).collect();
            ensure!(comb.iter().all(Zero::is_zero), "Farkas combination nonzero");
            let rhs: Q = rows.iter().zip(farkas).map(|((_, b), m)| b * m).sum();
            ensure!(rhs.is_negative(), "Farkas rhs not negative");
            Ok("infeasible")
        }
        LpSolution::Unbounded { point, ray } => {
            ensure!(feasible(point), "unbounded point infeasible");
            ensure!(dot(&lp.objective, ray).is_positive(), "ray does not improve");
            ensure!(rows.iter().all(|(a, _)| !dot(a, ray).is_positive()), "ray leaves the feasible set");
            Ok("unbounded")
        }
        LpSolution::IterationLimit => Err("iteration limit in exact mode".into()),
    }
}

fn nonneg_lp(objective: Vec<Q>, rows: Vec<(Vec<Q>, Q)>) -> LpProblem<Q> {
    let n = objective.len();
    let mut lp = LpProblem::new(objective);
    for (a, b) in rows {
        lp.push(a, b);
    }
    for j in 0..n {
        let mut e = vec![q(0); n];
        e[j] = q(-1);
        lp.push(e, q(0));
    }
    lp
}

fn cycling_instances() -> Vec<(&'static str, LpProblem<Q>, Q)> {
    // Beale: max 3/4 x1 - 150 x2 + 1/50 x3 - 6 x4
    let beale = nonneg_lp(
        vec![qf(3, 4), q(-150), qf(1, 50), q(-6)],
        vec![
            (vec![qf(1, 4), q(-60), qf(-1, 25), q(9)], q(0)),
            (vec![qf(1, 2), q(-90), qf(-1, 50), q(3)], q(0)),
            (vec![q(0), q(0), q(1), q(0)], q(1)),
        ],
    );
    // Kuhn: max 2 x1 + 3 x2 - x3 - 12 x4
    let kuhn = nonneg_lp(
        vec![q(2), q(3), q(-1), q(-12)],
        vec![
            (vec![q(-2), q(-9), q(1), q(9)], q(0)),
            (vec![qf(1, 3), q(1), qf(-1, 3), q(-2)], q(0)),
            (vec![q(2), q(3), q(-1), q(-12)], q(2)),
        ],
    );
    // Marshall and Suurballe style degenerate instance
    let chvatal = nonneg_lp(
        vec![q(10), q(-57), q(-9), q(-24)],
        vec![
            (vec![qf(1, 2), qf(-11, 2), qf(-5, 2), q(9)], q(0)),
            (vec![qf(1, 2), qf(-3, 2), qf(-1, 2), q(1)], q(0)),
            (vec![q(1), q(0), q(0), q(0)], q(1)),
        ],
    );
    vec![("Beale", beale, qf(1, 20)), ("Kuhn", kuhn, q(2)), ("Chvatal", chvatal, q(1))]
}

// 4
fn lp_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut counts = std::collections::BTreeMap::new();
    for k in 0..1000 {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=7);
        let lp = random_lp(&mut rng, n, m);
        let sol = lp.solve();
        let label = check_lp_certificate(&lp, &sol).map_err(|e| format!("instance {k}: {e}"))?;
        *counts.entry(label).or_insert(0) += 1;
    }
    for (name, lp, expected) in cycling_instances() {
        let oracle = vertex_optimum(&lp.objective, &rows_of(&lp)).ok_or(format!("{name}: oracle found no vertex"))?;
        ensure!(oracle == expected, "{name}: oracle optimum {oracle}, expected {expected}");
        let sol = lp.solve();
        check_lp_certificate(&lp, &sol).map_err(|e| format!("{name}: {e}"))?;
        let LpSolution::Optimal { objective, .. } = sol else { return Err(format!("{name}: not optimal")) };
        ensure!(objective == expected, "{name}: exact optimum {objective}");
        let float = lp.map(to_f64);
        match float.solve() {
            LpSolution::Optimal { objective, .. } => ensure!((objective - to_f64(&expected)).abs() < 1e-9, "{name}: float optimum {objective}"),
            other => return Err(format!("{name}: float status {:?}", other.status())),
        }
    }
    Ok(format!("1000 random LPs certified {counts:?}; Beale, Kuhn and Chvatal cycling instances terminate"))
}

// 5
fn colorful_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let (mut total, mut positive) = (0, 0);
    for k in 0..600 {
        let n = 1 + k % 3;
        let (sup, mut y) = random_colored_points(&mut rng, n, 3);
        if k % 2 == 1 {
            // a colorful tuple sum, which is frequently colorful
            y = vec![q(0); n];
            for set in sup.colors() {
                let a = &set[rng.gen_range(0..set.len())];
                for (yj, aj) in y.iter_mut().zip(a) {
                    *yj += aj;
                }
            }
        }
        let cert = is_colorful(&y, &sup).map_err(|e| format!("instance {k}: {e}"))?;
        cert.verify(&y, &sup).map_err(|e| format!("instance {k}: certificate: {e}"))?;
        let brute = brute_colorful(&y, sup.colors());
        ensure!(cert.is_colorful() == brute, "instance {k}: oracle says {brute}, y = {y:?}, support = {:?}", sup.colors());
        total += 1;
        positive += brute as usize;
    }
    Ok(format!("{total} instances agree ({positive} colorful)"))
}

fn sets_of(polys: &[Polygon; 3]) -> Vec<Vec<Vec<Q>>> {
    polys.iter().map(Polygon::to_vecs).collect()
}

fn cross(o: &Point, a: &Point, b: &Point) -> Q {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

/// Strictly outside the closed triangle, by orientation signs.
fn strictly_outside(tri: &[Point; 3], p: &Point) -> bool {
    let orient = cross(&tri[0], &tri[1], &tri[2]);
    let s = [cross(&tri[0], &tri[1], p), cross(&tri[1], &tri[2], p), cross(&tri[2], &tri[0], p)];
    s.iter().any(|v| (v * &orient).is_negative())
}

fn random_point_in(rng: &mut ChaCha8Rng, lo: &[Q; 2], hi: &[Q; 2]) -> Point {
    let t = |rng: &mut ChaCha8Rng| qf(rng.gen_range(0..=1000), 1000);
    let (a, b) = (t(rng), t(rng));
    [&lo[0] + a * (&hi[0] - &lo[0]), &lo[1] + b * (&hi[1] - &lo[1])]
}

fn bounding_box(pts: &[Point], margin: i64) -> ([Q; 2], [Q; 2]) {
    let mut lo = pts[0].clone();
    let mut hi = pts[0].clone();
    for p in pts {
        for c in 0..2 {
            if p[c] < lo[c] {
                lo[c] = p[c].clone();
            }
            if p[c] > hi[c] {
                hi[c] = p[c].clone();
            }
        }
    }
    (lo.map(|v| v - q(margin)), hi.map(|v| v + q(margin)))
}

const POLYGON_INSTANCES: usize = 200;

struct PlanarStats {
    separated: usize,
    simplices: usize,
    inside: usize,
    outside: usize,
    violations: Vec<String>,
}

fn planar_corpus() -> PlanarStats {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut st = PlanarStats { separated: 0, simplices: 0, inside: 0, outside: 0, violations: Vec::new() };
    for k in 0..POLYGON_INSTANCES {
        let polys = random_polygons(&mut rng);
        let sets = sets_of(&polys);
        let sep = bar_sets(&sets).separated();
        st.separated += sep as usize;
        let simplex = colorful_simplex(&polys);
        match (&simplex, sep) {
            (Ok(Some(_)), _) => st.simplices += 1,
            (other, true) => st.violations.push(format!("instance {k}: separated but simplex {other:?}")),
            _ => {}
        }
        if let Ok(Some(s)) = &simplex {
            for t in &s.tangents {
                if !t.verify(&polys) {
                    st.violations.push(format!("instance {k}: tangent {} fails verification", t.color));
                }
            }
            for _ in 0..500 {
                let w: Vec<i64> = (0..3).map(|_| rng.gen_range(1..=100)).collect();
                let total = q(w.iter().sum());
                let p: Point = [0, 1].map(|c| (0..3).map(|v| &s.vertices[v][c] * q(w[v])).sum::<Q>() / &total);
                match affine_colorful_membership(&p, &sets) {
                    Ok(v) if v.is_inside() => st.inside += 1,
                    other => st.violations.push(format!("instance {k}: interior point {p:?} gives {other:?}")),
                }
            }
            let mut all: Vec<Point> = s.vertices.to_vec();
            all.extend(polys.iter().flat_map(|p| p.vertices().iter().cloned()));
            let (lo, hi) = bounding_box(&all, 5);
            let mut n_out = 0;
            while n_out < 500 {
                let p = random_point_in(&mut rng, &lo, &hi);
                if !strictly_outside(&s.vertices, &p) {
                    continue;
                }
                n_out += 1;
                match affine_colorful_membership(&p, &sets) {
                    Ok(v) if !v.is_inside() => st.outside += 1,
                    other => st.violations.push(format!("instance {k}: exterior point {p:?} gives {other:?}")),
                }
            }
        } else {
            // necessary condition: any sampled colorful point forces separation
            let all: Vec<Point> = polys.iter().flat_map(|p| p.vertices().iter().cloned()).collect();
            let (lo, hi) = bounding_box(&all, 0);
            for _ in 0..200 {
                let p = random_point_in(&mut rng, &lo, &hi);
                if affine_colorful_membership(&p, &sets).map(|v| v.is_inside()).unwrap_or(false) && !sep {
                    st.violations.push(format!("instance {k}: colorful point {p:?} without separation"));
                    break;
                }
            }
        }
    }
    st
}

// 6
fn planar_interior(st: &PlanarStats) -> Outcome {
    ensure!(st.violations.is_empty(), "{}", st.violations[..st.violations.len().min(3)].join("; "));
    let three = [point(1, 1), point(2, 1), point(1, 2)].map(|p| Polygon::new(vec![p]).expect("single point"));
    let s = colorful_simplex(&three).map_err(|e| e.to_string())?.ok_or("three-point instance has no simplex")?;
    let mut got = s.vertices.to_vec();
    let mut want = vec![point(1, 1), point(2, 1), point(1, 2)];
    got.sort();
    want.sort();
    ensure!(got == want, "three-point simplex {got:?}");
    Ok(format!(
        "{} instances, {} separated, {} simplices; {} interior points inside, {} exterior points outside",
        POLYGON_INSTANCES, st.separated, st.simplices, st.inside, st.outside
    ))
}

fn figure_instance() -> [Polygon; 3] {
    let poly = |pts: &[(i64, i64)]| Polygon::hull(&pts.iter().map(|&(x, y)| point(x, y)).collect::<Vec<_>>()).expect("valid");
    [
        poly(&[(1547, -526), (1385, -45), (1115, -196), (1136, -405)]),
        poly(&[(403, -353), (796, -95), (493, 110), (275, 26)]),
        poly(&[(572, -960), (473, -749), (293, -529), (176, -744), (313, -926)]),
    ]
}

// 7
fn necessary_condition(st: &PlanarStats) -> Outcome {
    let bad: Vec<&String> = st.violations.iter().filter(|v| v.contains("without separation")).collect();
    ensure!(bad.is_empty(), "{:?}", bad);
    let fig = figure_instance();
    let sets = sets_of(&fig);
    ensure!(!hat_intersection_empty(&sets).map_err(|e| e.to_string())?, "figure instance is separated");
    let simplex = colorful_simplex(&fig);
    ensure!(!matches!(simplex, Ok(Some(_))), "figure instance has a colorful simplex");
    let all: Vec<Point> = fig.iter().flat_map(|p| p.vertices().iter().cloned()).collect();
    let (lo, hi) = bounding_box(&all, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    for _ in 0..2000 {
        let p = random_point_in(&mut rng, &lo, &hi);
        ensure!(!affine_colorful_membership(&p, &sets).map_err(|e| e.to_string())?.is_inside(), "figure instance: colorful point {p:?}");
    }
    let tangents = (0..3).filter(|&i| tangent_line(i, &fig).is_ok()).count();
    Ok(format!("no counterexample in {} instances; unseparated figure instance has no colorful point ({tangents}/3 tangents)", POLYGON_INSTANCES))
}

fn clause_level_oracle(true_literals: usize) -> Q {
    (q(2) * q(true_literals as i64) + qf(1, 2) * q(3 - true_literals as i64)) / q(6)
}

// 8
fn sat_gadgets() -> Outcome {
    let corpus = exhaustive_corpus();
    let (mut sat, mut checked) = (0, 0);
    for (k, f) in corpus.iter().enumerate() {
        let n = f.n_vars();
        let p = f.clauses().len();
        let trop = cnf_to_tropical(f);
        let clas = cnf_to_classical(f);
        ensure!(trop.dim() == 2 * n + 2 * p && trop.support().colors().len() == 2 * n + 2 * p, "formula {k}: tropical size");
        ensure!(clas.dim() == 2 * n + 2 * p && clas.support().colors().len() == 2 * n + 2 * p, "formula {k}: classical size");
        let (tc, tco) = support_of(&trop);
        let (cc, cco) = classical_parts(&clas);
        let mut any = false;
        for mask in 0..(1u32 << n) {
            let assignment: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let satisfied = f.clauses().iter().all(|c| c.iter().any(|l| l.value(&assignment)));
            for c in f.clauses() {
                let t = c.iter().filter(|l| l.value(&assignment)).count();
                let level = classical_clause_level(c, &assignment);
                ensure!(level == clause_level_oracle(t), "formula {k}: clause level {level}");
                let in_sat_levels = [qf(1, 2), qf(3, 4), q(1)].contains(&level);
                ensure!(in_sat_levels == (t > 0) && (level == qf(1, 4)) == (t == 0), "formula {k}: level {level} with {t} true literals");
            }
            if !satisfied {
                ensure!(encode_assignment(f, &assignment, GadgetKind::Tropical).is_err(), "formula {k}: encoded an unsatisfying assignment");
                continue;
            }
            any = true;
            checked += 1;
            let vt = encode_assignment(f, &assignment, GadgetKind::Tropical).map_err(|e| e.to_string())?;
            ensure!(tropical_values(&tc, &tco, &vt).iter().all(Zero::is_zero), "formula {k}: tropical encoding fails");
            let vc = encode_assignment(f, &assignment, GadgetKind::Classical).map_err(|e| e.to_string())?;
            ensure!(posynomial_exact(&cc, &cco, &vc).iter().all(common::is_one), "formula {k}: classical encoding fails");
            for (j, c) in f.clauses().iter().enumerate() {
                let t = c.iter().filter(|l| l.value(&assignment)).count();
                ensure!(vc[2 * n + j] == clause_level_oracle(t), "formula {k}: encoded z_{j}");
            }
        }
        ensure!(any == sat_oracle(f).map_err(|e| e.to_string())?.is_some(), "formula {k}: satisfiability mismatch");
        sat += any as usize;
        // grid soundness of the tropical gadget
        if n + p <= 6 {
            tropical_grid(f, &tc, &tco).map_err(|e| format!("formula {k}: {e}"))?;
        }
    }
    Ok(format!("{} formulas ({sat} satisfiable), {checked} assignments encoded exactly", corpus.len()))
}

fn tropical_grid(f: &Cnf, tc: &[Vec<Vec<Q>>], tco: &[Vec<Q>]) -> Result<(), String> {
    let n = f.n_vars();
    let p = f.clauses().len();
    let bits = 2 * n + 2 * p;
    for mask in 0u32..(1u32 << bits) {
        let b = |i: usize| mask >> i & 1 == 1;
        let mut v = Vec::with_capacity(bits);
        for i in 0..2 * n {
            v.push(if b(i) { q(1) } else { q(0) });
        }
        for i in 2 * n..bits {
            v.push(if b(i) { q(1) } else { qf(1, 2) });
        }
        let solves = tropical_values(tc, tco, &v).iter().all(Zero::is_zero);
        let expected = match decode_tropical(f, &v) {
            Some(a) => {
                let complementary = (0..n).all(|i| v[n + i] == q(1) - &v[i]);
                complementary && f.satisfied_by(&a) && v[2 * n..].iter().all(|z| *z == q(1))
            }
            None => false,
        };
        ensure!(solves == expected, "grid point {v:?}: solves {solves}, expected {expected}");
    }
    Ok(())
}

fn own_g(colors: &[Vec<Vec<f64>>], logc: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    colors
        .iter()
        .zip(logc)
        .map(|(set, lc)| {
            let terms: Vec<f64> = set.iter().zip(lc).map(|(a, c)| c + a.iter().zip(x).map(|(u, v)| u * v).sum::<f64>()).collect();
            let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
        })
        .collect()
}

// 9
fn numerical_hygiene() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let h = 1e-6;
    let (mut worst_grad, mut worst_eig) = (0f64, f64::INFINITY);
    for k in 0..100 {
        let g = planted_classical(&mut rng, 1 + k % 4, 3, k);
        let (colors, coeffs) = classical_parts(&g.system);
        let cf = floats(&colors);
        let logc: Vec<Vec<f64>> = coeffs.iter().map(|c| c.iter().map(|v| to_f64(v).ln()).collect()).collect();
        let n = g.system.dim();
        for _ in 0..100 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let ev = g_eval(&g.system, &x).map_err(|e| e.to_string())?;
            let mine = own_g(&cf, &logc, &x);
            for i in 0..colors.len() {
                ensure!((ev.values[i] - mine[i]).abs() <= 1e-12 * mine[i].abs().max(1.0), "instance {k}: g value");
                let lmax = cf[i].iter().zip(&logc[i]).map(|(a, c)| c + a.iter().zip(&x).map(|(u, v)| u * v).sum::<f64>()).fold(f64::NEG_INFINITY, f64::max);
                ensure!(lmax <= mine[i] + 1e-12 && mine[i] <= lmax + (cf[i].len() as f64).ln() + 1e-12, "instance {k}: sandwich bound");
                for j in 0..n {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[j] += h;
                    xm[j] -= h;
                    let fd = (own_g(&cf, &logc, &xp)[i] - own_g(&cf, &logc, &xm)[i]) / (2.0 * h);
                    let an = ev.gradients[i][j];
                    let rel = (fd - an).abs() / an.abs().max(1.0);
                    ensure!(rel <= 1e-6, "instance {k}: gradient component {i},{j}: {an} vs {fd}");
                    worst_grad = worst_grad.max(rel);
                }
                let hess: DMatrix<f64> = ev.hessians[i].clone();
                let eig = SymmetricEigen::new(hess).eigenvalues.min();
                ensure!(eig >= -1e-9, "instance {k}: Hessian eigenvalue {eig:e}");
                worst_eig = worst_eig.min(eig);
            }
        }
        let level_at_planted: f64 = g.y.iter().map(to_f64).zip(&g.log_x).map(|(a, b)| a * b).sum();
        let inside = q(level_at_planted.floor() as i64 - 1);
        ensure!(superlevel_boundedness(&g.system, &g.y, &inside) == Boundedness::Bounded, "instance {k}: superlevel set at {inside} not bounded");
        for mu in [-10, 0, 10] {
            ensure!(superlevel_boundedness(&g.system, &g.y, &q(mu)) != Boundedness::Unbounded, "instance {k}: unbounded at level {mu}");
        }
    }
    Ok(format!("100 systems x 100 points, worst gradient error {worst_grad:.1e}, min Hessian eigenvalue {worst_eig:.1e}; all superlevel sets bounded"))
}

fn run(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let t = start.elapsed();
    match res {
        Ok(detail) => {
            println!("PASS  {name} ({t:.1?}): {detail}");
            true
        }
        Err(detail) => {
            println!("FAIL  {name} ({t:.1?}): {detail}");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= run("1 exact tropical solving", exact_tropical);
    ok &= run("2 MDP cross-validation", mdp_cross_validation);
    ok &= run("3 geometric programs", geometric_programs);
    ok &= run("4 LP solver soundness", lp_soundness);
    ok &= run("5 colorfulness oracle vs brute force", colorful_oracle);
    let planar = catch_unwind(planar_corpus).map_err(|_| "planar corpus panicked".to_string());
    ok &= run("6 planar colorful interior", || planar_interior(planar.as_ref()?));
    ok &= run("7 necessary separation condition", || necessary_condition(planar.as_ref()?));
    ok &= run("8 SAT gadget fidelity", sat_gadgets);
    ok &= run("9 numerical hygiene", numerical_hygiene);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
