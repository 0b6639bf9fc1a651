//! JSON documents: bracket specifications, cones, limit brackets.
//!
//! Rationals are written as `"p/q"` strings (or `"p"` for integers).

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, parse_rational, GaussianRational, LaurentPoly, Monomial, VarKind, VarRegistry};
use crate::error::{Error, Result};
use crate::poisson::PoissonStructure;
use crate::polyhedra::StrictCone;
use crate::tropical::{ConstantBracket, TropicalCoordinates};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariableKind {
    Real,
    Complex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableSpec {
    pub name: String,
    pub kind: VariableKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffSpec {
    #[serde(default = "zero_string")]
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
}

fn zero_string() -> String {
    "0".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coeff: CoeffSpec,
    #[serde(default)]
    pub exponents: BTreeMap<String, i32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub lhs: String,
    pub rhs: String,
    pub poly: Vec<TermSpec>,
}

/// A Poisson structure as written by users. Conjugates are `~name`; pairs
/// that are not listed have zero bracket.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketSpecFile {
    pub variables: Vec<VariableSpec>,
    pub brackets: Vec<BracketEntry>,
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
}

impl BracketSpecFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_error)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes") + "\n"
    }

    pub fn registry(&self) -> Result<VarRegistry> {
        let spec: Vec<(&str, bool)> =
            self.variables.iter().map(|v| (v.name.as_str(), v.kind == VariableKind::Complex)).collect();
        for v in &self.variables {
            if v.name.is_empty() || v.name.starts_with('~') {
                return Err(Error::Parse(format!("invalid variable name `{}`", v.name)));
            }
        }
        VarRegistry::with_conjugates(&spec).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_structure(&self) -> Result<PoissonStructure> {
        let reg = Arc::new(self.registry()?);
        let mut p = PoissonStructure::new(reg.clone());
        let mut seen = BTreeSet::new();
        let lookup = |name: &str| reg.index_of(name).ok_or_else(|| Error::Parse(format!("unknown variable `{name}`")));
        for (i, b) in self.brackets.iter().enumerate() {
            let (u, v) = (lookup(&b.lhs)?, lookup(&b.rhs)?);
            if u == v {
                return Err(Error::Parse(format!("bracket {i}: `{}` with itself", b.lhs)));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::Parse(format!("bracket {i}: pair ({}, {}) given twice", b.lhs, b.rhs)));
            }
            let mut poly = LaurentPoly::zero(&reg);
            for t in &b.poly {
                let c = GaussianRational::new(parse_rational(&t.coeff.re)?, parse_rational(&t.coeff.im)?);
                let mut e = vec![0i32; reg.len()];
                for (name, &x) in &t.exponents {
                    e[lookup(name)?] += x;
                }
                poly.add_term(Monomial::from_exponents(e), &c);
            }
            p.set(u, v, poly)?;
        }
        Ok(p)
    }

    pub fn from_structure(p: &PoissonStructure) -> Self {
        let reg = p.registry();
        let variables = reg
            .vars()
            .iter()
            .filter_map(|v| match v.kind {
                VarKind::RealPositive => Some(VariableSpec { name: v.name.clone(), kind: VariableKind::Real }),
                VarKind::Complex => Some(VariableSpec { name: v.name.clone(), kind: VariableKind::Complex }),
                VarKind::ConjugateOf(_) => None,
            })
            .collect();
        let brackets = p
            .entries()
            .map(|((u, v), poly)| BracketEntry {
                lhs: reg.name(u).to_string(),
                rhs: reg.name(v).to_string(),
                poly: poly
                    .terms()
                    .map(|(m, c)| TermSpec {
                        coeff: CoeffSpec { re: format_rational(&c.re), im: format_rational(&c.im) },
                        exponents: m
                            .exponents()
                            .iter()
                            .enumerate()
                            .filter(|(_, &x)| x != 0)
                            .map(|(i, &x)| (reg.name(i).to_string(), x))
                            .collect(),
                    })
                    .collect(),
            })
            .collect();
        Self { variables, brackets }
    }
}

/// Parses a bracket specification straight into a structure.
pub fn read_structure(text: &str) -> Result<PoissonStructure> {
    BracketSpecFile::from_json(text)?.to_structure()
}

pub fn write_structure(p: &PoissonStructure) -> String {
    BracketSpecFile::from_structure(p).to_json()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeDocument {
    pub coordinates: Vec<String>,
    /// Each normal `m` stands for `m·η > 0`.
    pub normals: Vec<Vec<i64>>,
    pub inequalities: Vec<String>,
    pub empty: bool,
}

impl ConeDocument {
    pub fn new(cone: &StrictCone, coordinates: Vec<String>) -> Self {
        Self {
            inequalities: cone.describe(&coordinates),
            normals: cone.normals().cloned().collect(),
            empty: cone.is_empty_cone(),
            coordinates,
        }
    }

    pub fn to_cone(&self) -> Result<StrictCone> {
        StrictCone::from_normals(self.coordinates.len(), self.normals.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cone serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_error)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketDocument {
    pub coordinates: Vec<String>,
    /// Antisymmetric matrix of `"p/q"` entries.
    pub matrix: Vec<Vec<String>>,
    pub casimirs: Vec<String>,
}

impl BracketDocument {
    pub fn new(cb: &ConstantBracket) -> Self {
        Self {
            coordinates: cb.coords.names(),
            matrix: cb.matrix().iter().map(|r| r.iter().map(format_rational).collect()).collect(),
            casimirs: cb.casimir_names(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bracket serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_error)
    }

    /// Rebuilds the limit bracket over the coordinates of `reg`.
    pub fn to_bracket(&self, reg: &VarRegistry) -> Result<ConstantBracket> {
        let coords = TropicalCoordinates::new(reg);
        if coords.names() != self.coordinates {
            return Err(Error::Parse("coordinates do not match the registry".into()));
        }
        let mut cb = ConstantBracket::zero(coords);
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != self.coordinates.len() {
                return Err(Error::DimensionMismatch { expected: self.coordinates.len(), found: row.len() });
            }
            for (j, x) in row.iter().enumerate().skip(i + 1) {
                cb.set(i, j, parse_rational(x)?);
            }
        }
        if !cb.is_antisymmetric() || self.matrix.len() != self.coordinates.len() {
            return Err(Error::Parse("bracket matrix is not antisymmetric".into()));
        }
        Ok(cb)
    }
}
