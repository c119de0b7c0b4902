//! JSON instance files. Rationals are strings `"p/q"`; the `kind` field
//! selects the payload.
//!
//! ```json
//! {"kind": "tropical", "support": [[["-1/1"]]], "coeffs": [["3/1"]], "vector": ["-1/1"]}
//! ```

use crate::geometry3::{GeometryError, Point, Polygon};
use crate::mdp::{Action, MdpError, MdpModel};
use crate::rational::{format_q, format_vec, parse_exact, parse_lenient, ParseRationalError, Q};
use crate::satgen::{Cnf, Lit, SatError};
use crate::system::{ClassicalSystem, ColoredSupport, SystemError, TropicalSystem};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Rational(#[from] ParseRationalError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Mdp(#[from] MdpError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error("expected a `{expected}` instance, got `{got}`")]
    WrongKind { expected: &'static str, got: &'static str },
    #[error("{0}")]
    Shape(String),
}

/// Support, coefficients, and optional vector and witness point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub support: Vec<Vec<Vec<String>>>,
    pub coeffs: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionFile {
    pub p: Vec<String>,
    pub reward: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MdpFile {
    pub states: Vec<Vec<ActionFile>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsetFile {
    pub sets: Vec<Vec<Vec<String>>>,
}

/// Clauses as signed 1-based DIMACS literals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CnfFile {
    pub n_vars: usize,
    pub clauses: Vec<[i64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceFile {
    Tropical(SystemFile),
    Classical(SystemFile),
    Mdp(MdpFile),
    Pointset(PointsetFile),
    CnfRef(CnfFile),
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Canonical pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance files always serialize");
        s.push('\n');
        s
    }

    pub fn kind(&self) -> &'static str {
        match self {
            InstanceFile::Tropical(_) => "tropical",
            InstanceFile::Classical(_) => "classical",
            InstanceFile::Mdp(_) => "mdp",
            InstanceFile::Pointset(_) => "pointset",
            InstanceFile::CnfRef(_) => "cnf-ref",
        }
    }
}

fn parse_vec(v: &[String], parse: fn(&str) -> Result<Q, ParseRationalError>) -> Result<Vec<Q>, InstanceError> {
    v.iter().map(|s| parse(s).map_err(InstanceError::from)).collect()
}

fn parse_support(s: &[Vec<Vec<String>>]) -> Result<ColoredSupport, InstanceError> {
    let colors = s.iter().map(|set| set.iter().map(|a| parse_vec(a, parse_exact)).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
    Ok(ColoredSupport::new(colors)?)
}

fn format_support(sup: &ColoredSupport) -> Vec<Vec<Vec<String>>> {
    sup.colors().iter().map(|set| set.iter().map(|a| format_vec(a)).collect()).collect()
}

fn format_coeffs(c: &[Vec<Q>]) -> Vec<Vec<String>> {
    c.iter().map(|v| format_vec(v)).collect()
}

impl SystemFile {
    pub fn vector(&self) -> Result<Option<Vec<Q>>, InstanceError> {
        self.vector.as_deref().map(|v| parse_vec(v, parse_exact)).transpose()
    }

    pub fn witness(&self) -> Result<Option<Vec<Q>>, InstanceError> {
        self.witness.as_deref().map(|v| parse_vec(v, parse_exact)).transpose()
    }

    /// Tropical coefficients must be exact `p/q` strings.
    pub fn tropical(&self) -> Result<TropicalSystem, InstanceError> {
        let sup = parse_support(&self.support)?;
        let coeffs = self.coeffs.iter().map(|c| parse_vec(c, parse_exact)).collect::<Result<Vec<_>, _>>()?;
        Ok(TropicalSystem::new(sup, coeffs)?)
    }

    /// Classical coefficients may also be decimals, converted exactly.
    pub fn classical(&self) -> Result<ClassicalSystem, InstanceError> {
        let sup = parse_support(&self.support)?;
        let coeffs = self.coeffs.iter().map(|c| parse_vec(c, parse_lenient)).collect::<Result<Vec<_>, _>>()?;
        Ok(ClassicalSystem::new(sup, coeffs)?)
    }

    pub fn from_tropical(sys: &TropicalSystem, vector: Option<&[Q]>, witness: Option<&[Q]>) -> Self {
        SystemFile {
            support: format_support(sys.support()),
            coeffs: format_coeffs(sys.coeffs()),
            vector: vector.map(format_vec),
            witness: witness.map(format_vec),
        }
    }

    pub fn from_classical(sys: &ClassicalSystem, vector: Option<&[Q]>, witness: Option<&[Q]>) -> Self {
        SystemFile {
            support: format_support(sys.support()),
            coeffs: format_coeffs(sys.coeffs()),
            vector: vector.map(format_vec),
            witness: witness.map(format_vec),
        }
    }
}

impl MdpFile {
    pub fn model(&self) -> Result<MdpModel, InstanceError> {
        let actions = self
            .states
            .iter()
            .map(|acts| acts.iter().map(|a| Ok(Action { p: parse_vec(&a.p, parse_exact)?, reward: parse_exact(&a.reward)? })).collect::<Result<Vec<_>, InstanceError>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MdpModel::new(actions)?)
    }

    pub fn from_model(m: &MdpModel) -> Self {
        MdpFile {
            states: (0..m.states()).map(|i| m.actions(i).iter().map(|a| ActionFile { p: format_vec(&a.p), reward: format_q(&a.reward) }).collect()).collect(),
        }
    }
}

impl PointsetFile {
    pub fn sets(&self) -> Result<Vec<Vec<Vec<Q>>>, InstanceError> {
        self.sets.iter().map(|s| s.iter().map(|p| parse_vec(p, parse_exact)).collect()).collect()
    }

    /// Three planar sets, each turned into its convex hull.
    pub fn polygons(&self) -> Result<[Polygon; 3], InstanceError> {
        let sets = self.sets()?;
        if sets.len() != 3 {
            return Err(InstanceError::Shape(format!("expected 3 point sets, got {}", sets.len())));
        }
        let mut polys = Vec::with_capacity(3);
        for s in &sets {
            let pts: Vec<Point> = s
                .iter()
                .map(|p| match p.as_slice() {
                    [x, y] => Ok([x.clone(), y.clone()]),
                    _ => Err(InstanceError::Shape("points must have two coordinates".into())),
                })
                .collect::<Result<_, _>>()?;
            polys.push(Polygon::hull(&pts)?);
        }
        let [a, b, c]: [Polygon; 3] = polys.try_into().expect("three polygons");
        Ok([a, b, c])
    }

    pub fn from_polygons(polys: &[Polygon]) -> Self {
        PointsetFile { sets: polys.iter().map(|p| p.vertices().iter().map(|v| format_vec(v)).collect()).collect() }
    }
}

impl CnfFile {
    pub fn cnf(&self) -> Result<Cnf, InstanceError> {
        let mut clauses = Vec::with_capacity(self.clauses.len());
        for (j, c) in self.clauses.iter().enumerate() {
            if c.iter().any(|v| *v == 0 || v.unsigned_abs() as usize > self.n_vars) {
                return Err(SatError::InvalidClause { clause: j, n_vars: self.n_vars }.into());
            }
            let lit = |v: i64| Lit { var: v.unsigned_abs() as usize - 1, negated: v < 0 };
            clauses.push([lit(c[0]), lit(c[1]), lit(c[2])]);
        }
        Ok(Cnf::new(self.n_vars, clauses)?)
    }

    pub fn from_cnf(f: &Cnf) -> Self {
        let signed = |l: &Lit| if l.negated { -(l.var as i64 + 1) } else { l.var as i64 + 1 };
        CnfFile { n_vars: f.n_vars(), clauses: f.clauses().iter().map(|c| [signed(&c[0]), signed(&c[1]), signed(&c[2])]).collect() }
    }
}
