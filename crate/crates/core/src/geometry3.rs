//! Colorful interior of three convex polygons in the plane.
//!
//! For each color `i` the tangent line `H_i` touches the two other polygons
//! and strictly separates `S_i`; when the colorful interior is nonempty it is
//! the open triangle cut out by the three positive half-planes.

use crate::colorful::{affine_colorful_membership, conv_membership, AffineVerdict};
use crate::lp::{feasible_point, Feasibility, Row};
use crate::rational::{int, Q};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use thiserror::Error;

pub type Point = [Q; 2];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("polygon has no vertices")]
    EmptyPolygon,
    #[error("polygon vertices are not in strictly convex counterclockwise position")]
    NotConvex,
    #[error("points are collinear with the origin or coincide")]
    Degenerate,
    #[error("no tangent line for color {0}")]
    NoTangent(usize),
    #[error("expected at least two sets")]
    TooFewSets,
}

pub fn point(x: i64, y: i64) -> Point {
    [int(x), int(y)]
}

fn cross(o: &Point, a: &Point, b: &Point) -> Q {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

/// Convex polygon with vertices in counterclockwise order. One or two
/// vertices (a point or a segment) are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        match vertices.len() {
            0 => Err(GeometryError::EmptyPolygon),
            1 => Ok(Polygon { vertices }),
            2 if vertices[0] != vertices[1] => Ok(Polygon { vertices }),
            2 => Err(GeometryError::NotConvex),
            k => {
                // the hull starts at the lexicographic minimum, so compare up to rotation
                let start = (0..k).min_by(|a, b| vertices[*a].cmp(&vertices[*b])).expect("nonempty");
                let rotated: Vec<Point> = (0..k).map(|t| vertices[(start + t) % k].clone()).collect();
                if convex_hull(&vertices) == rotated {
                    Ok(Polygon { vertices })
                } else {
                    Err(GeometryError::NotConvex)
                }
            }
        }
    }

    /// Convex hull of arbitrary points; collinear points are dropped.
    pub fn hull(points: &[Point]) -> Result<Self, GeometryError> {
        if points.is_empty() {
            return Err(GeometryError::EmptyPolygon);
        }
        Polygon::new(convex_hull(points))
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn to_vecs(&self) -> Vec<Vec<Q>> {
        self.vertices.iter().map(|p| p.to_vec()).collect()
    }

    pub fn translate(&self, by: &Point) -> Polygon {
        Polygon { vertices: self.vertices.iter().map(|p| [&p[0] + &by[0], &p[1] + &by[1]]).collect() }
    }
}

/// Andrew's monotone chain, counterclockwise, starting at the lexicographic
/// minimum.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// `x ∧ y = (ab' - a'b)^{-1} (b - b', a' - a)`: the normal `h` of the line
/// `⟨h, p⟩ + 1 = 0` through `x = (a, b)` and `y = (a', b')`.
pub fn wedge(x: &Point, y: &Point) -> Result<Point, GeometryError> {
    let det = &x[0] * &y[1] - &y[0] * &x[1];
    if det.is_zero() {
        return Err(GeometryError::Degenerate);
    }
    Ok([(&x[1] - &y[1]) / &det, (&y[0] - &x[0]) / &det])
}

/// Oriented line `{p : ⟨normal, p⟩ + offset = 0}`; `offset` is `±1`, or `0`
/// with a primitive normal for lines through the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub normal: Point,
    pub offset: Q,
}

impl Line {
    pub fn eval(&self, p: &Point) -> Q {
        &self.normal[0] * &p[0] + &self.normal[1] * &p[1] + &self.offset
    }

    fn negate(&self) -> Line {
        Line { normal: [-self.normal[0].clone(), -self.normal[1].clone()], offset: -self.offset.clone() }
    }

    fn normalized(normal: Point, offset: Q) -> Line {
        let scale = if !offset.is_zero() {
            offset.abs()
        } else if !normal[0].is_zero() {
            normal[0].abs()
        } else {
            normal[1].abs()
        };
        Line { normal: [&normal[0] / &scale, &normal[1] / &scale], offset: offset / scale }
    }

    /// `h` with the line written as `⟨h, p⟩ + 1 = 0`; `None` through the origin.
    pub fn affine_normal(&self) -> Option<Point> {
        if self.offset.is_zero() {
            return None;
        }
        Some([&self.normal[0] / &self.offset, &self.normal[1] / &self.offset])
    }

    /// Same point set, ignoring orientation.
    pub fn same_line(&self, other: &Line) -> bool {
        *self == *other || *self == other.negate()
    }
}

/// Line through two distinct points via [`wedge`], shifting the frame by
/// `(k, k²)` for `k = 1, 2` when it passes through the origin. A line meets
/// the parabola in at most two points, so the loop ends by `k = 2`.
pub fn line_through(u: &Point, v: &Point) -> Result<Line, GeometryError> {
    if u == v {
        return Err(GeometryError::Degenerate);
    }
    for k in 0i64..3 {
        let o = point(k, k * k);
        let su = [&u[0] - &o[0], &u[1] - &o[1]];
        let sv = [&v[0] - &o[0], &v[1] - &o[1]];
        if let Ok(h) = wedge(&su, &sv) {
            // ⟨h, p - o⟩ + 1 = 0
            let offset = Q::one() - &h[0] * &o[0] - &h[1] * &o[1];
            return Ok(Line::normalized(h, offset));
        }
    }
    unreachable!("a line contains at most two points of the parabola (k, k²)")
}

/// Intersection point of two lines; `None` when parallel.
pub fn meet(l: &Line, m: &Line) -> Option<Point> {
    let (a, b, c) = (&l.normal[0], &l.normal[1], &l.offset);
    let (d, e, f) = (&m.normal[0], &m.normal[1], &m.offset);
    let det = a * e - b * d;
    if det.is_zero() {
        return None;
    }
    Some([(b * f - c * e) / &det, (c * d - a * f) / &det])
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangentLine {
    pub line: Line,
    /// Color strictly on the positive side.
    pub color: usize,
    /// `(j, vertex)` for both other colors: lexicographically smallest vertex
    /// of `S_j` on the line.
    pub touching: [(usize, Point); 2],
}

impl TangentLine {
    /// Exact check of the defining properties against the polygons.
    pub fn verify(&self, polys: &[Polygon; 3]) -> bool {
        let own = polys[self.color].vertices().iter().all(|p| self.line.eval(p).is_positive());
        let others = (0..3).filter(|j| *j != self.color).all(|j| {
            let vals: Vec<Q> = polys[j].vertices().iter().map(|p| self.line.eval(p)).collect();
            vals.iter().all(|v| !v.is_positive()) && vals.iter().any(Zero::is_zero)
        });
        own && others
    }
}

fn orient_and_check(line: Line, i: usize, polys: &[Polygon; 3]) -> Option<Line> {
    let first = line.eval(&polys[i].vertices()[0]);
    let line = if first.is_positive() {
        line
    } else if first.is_negative() {
        line.negate()
    } else {
        return None;
    };
    if !polys[i].vertices().iter().all(|p| line.eval(p).is_positive()) {
        return None;
    }
    for j in (0..3).filter(|j| *j != i) {
        if polys[j].vertices().iter().any(|p| line.eval(p).is_positive()) {
            return None;
        }
    }
    Some(line)
}

fn smallest_on_line(line: &Line, poly: &Polygon) -> Point {
    poly.vertices().iter().filter(|p| line.eval(p).is_zero()).min().cloned().expect("line touches the polygon")
}

/// Tangent line `H_i` by enumeration of vertex pairs of the two other
/// polygons. The first qualifying pair in lexicographic order is used.
pub fn tangent_line(i: usize, polys: &[Polygon; 3]) -> Result<TangentLine, GeometryError> {
    assert!(i < 3, "color index out of range");
    let (j, k) = match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    for u in polys[j].vertices() {
        for v in polys[k].vertices() {
            let Ok(line) = line_through(u, v) else { continue };
            if let Some(line) = orient_and_check(line, i, polys) {
                let touching = [(j, smallest_on_line(&line, &polys[j])), (k, smallest_on_line(&line, &polys[k]))];
                return Ok(TangentLine { line, color: i, touching });
            }
        }
    }
    Err(GeometryError::NoTangent(i))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColorfulSimplex {
    /// `s_1 = H_2 ∩ H_3`, `s_2 = H_3 ∩ H_1`, `s_3 = H_1 ∩ H_2`.
    pub vertices: [Point; 3],
    pub tangents: [TangentLine; 3],
}

impl ColorfulSimplex {
    /// Strictly inside the triangle, i.e. on the positive side of all `H_i`.
    pub fn contains_strictly(&self, p: &Point) -> bool {
        self.tangents.iter().all(|t| t.line.eval(p).is_positive())
    }

    pub fn barycenter(&self) -> Point {
        let three = int(3);
        let [a, b, c] = &self.vertices;
        [(&a[0] + &b[0] + &c[0]) / &three, (&a[1] + &b[1] + &c[1]) / &three]
    }
}

/// Triangle `⋂ H_i^>`, or `None` if it is degenerate or its barycenter is not
/// in the colorful interior. A missing tangent is reported as an error.
pub fn colorful_simplex(polys: &[Polygon; 3]) -> Result<Option<ColorfulSimplex>, GeometryError> {
    let t0 = tangent_line(0, polys)?;
    let t1 = tangent_line(1, polys)?;
    let t2 = tangent_line(2, polys)?;
    let (Some(s1), Some(s2), Some(s3)) = (meet(&t1.line, &t2.line), meet(&t2.line, &t0.line), meet(&t0.line, &t1.line)) else {
        return Ok(None);
    };
    // each vertex lies strictly on the positive side of the opposite line
    if !(t0.line.eval(&s1).is_positive() && t1.line.eval(&s2).is_positive() && t2.line.eval(&s3).is_positive()) {
        return Ok(None);
    }
    let simplex = ColorfulSimplex { vertices: [s1, s2, s3], tangents: [t0, t1, t2] };
    let sets: Vec<Vec<Vec<Q>>> = polys.iter().map(Polygon::to_vecs).collect();
    let verdict = affine_colorful_membership(&simplex.barycenter(), &sets).expect("three planar sets");
    Ok((verdict == AffineVerdict::Inside).then_some(simplex))
}

/// Whether `⋂_i conv(⋃_{j≠i} S_j)` is empty, decided by one feasibility LP
/// in a shared point and one convex-combination block per `i`.
pub fn hat_intersection_empty(sets: &[Vec<Vec<Q>>]) -> Result<bool, GeometryError> {
    let n = sets.len();
    if n < 2 {
        return Err(GeometryError::TooFewSets);
    }
    let d = sets.iter().flatten().map(Vec::len).next().unwrap_or(0);
    let blocks: Vec<Vec<&Vec<Q>>> = (0..n).map(|i| sets.iter().enumerate().filter(|(j, _)| *j != i).flat_map(|(_, s)| s.iter()).collect()).collect();
    let dim = d + blocks.iter().map(Vec::len).sum::<usize>();
    let mut rows = Vec::new();
    let mut push_eq = |coeffs: Vec<Q>, rhs: Q| {
        rows.push(Row::new(coeffs.iter().map(|c| -c.clone()).collect(), -rhs.clone()));
        rows.push(Row::new(coeffs, rhs));
    };
    let mut start = d;
    let mut sign_rows = Vec::new();
    for block in &blocks {
        let mut sum = vec![Q::zero(); dim];
        for t in 0..block.len() {
            sum[start + t] = Q::one();
            let mut nonneg = vec![Q::zero(); dim];
            nonneg[start + t] = -Q::one();
            sign_rows.push(Row::new(nonneg, Q::zero()));
        }
        push_eq(sum, Q::one());
        for c in 0..d {
            let mut row = vec![Q::zero(); dim];
            row[c] = -Q::one();
            for (t, p) in block.iter().enumerate() {
                row[start + t] = p[c].clone();
            }
            push_eq(row, Q::zero());
        }
        start += block.len();
    }
    rows.extend(sign_rows);
    Ok(matches!(feasible_point(dim, rows), Feasibility::Infeasible(_)))
}

/// Membership oracles for `S̄_i = ⋂_{j≠i} conv(⋃_{k≠j} S_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BarSets {
    sets: Vec<Vec<Vec<Q>>>,
}

pub fn bar_sets(sets: &[Vec<Vec<Q>>]) -> BarSets {
    BarSets { sets: sets.to_vec() }
}

impl BarSets {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, i: usize, x: &[Q]) -> bool {
        (0..self.sets.len()).filter(|j| *j != i).all(|j| {
            let pts: Vec<&[Q]> = self.sets.iter().enumerate().filter(|(k, _)| *k != j).flat_map(|(_, s)| s.iter().map(Vec::as_slice)).collect();
            conv_membership(x, &pts).is_some()
        })
    }

    /// Separation of the `S̄` family. Every point common to all hats lies in
    /// every `S̄_j`, and `conv(⋃_{j≠i} S̄_j) ⊂ Ŝ_i`, so the hat intersections
    /// of both families are empty together.
    pub fn separated(&self) -> bool {
        hat_intersection_empty(&self.sets).expect("at least two sets")
    }
}

/// `Less` strictly inside the triangle, `Equal` on its boundary, `Greater`
/// strictly outside.
pub fn triangle_side(simplex: &ColorfulSimplex, p: &Point) -> Ordering {
    let vals: Vec<Q> = simplex.tangents.iter().map(|t| t.line.eval(p)).collect();
    if vals.iter().all(Signed::is_positive) {
        Ordering::Less
    } else if vals.iter().any(Signed::is_negative) {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}
