//! Variables, linear constraints, systems and points over exact rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Hierarchical variable identifier: a path of tags followed by a base name,
/// rendered as `tag1/tag2/base`. Original variables have an empty path.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarName(Arc<str>);

impl VarName {
    /// A plain (path-free) name. Slashes are reserved for paths.
    pub fn new(base: &str) -> Result<Self> {
        if base.is_empty() || base.contains('/') || base.contains(char::is_whitespace) {
            return Err(Error::InvalidName(base.to_string()));
        }
        Ok(VarName(Arc::from(base)))
    }

    /// Parses the rendered `a/b/base` form.
    pub fn parse(s: &str) -> Result<Self> {
        if s.is_empty()
            || s.split('/').any(|p| p.is_empty())
            || s.contains(char::is_whitespace)
        {
            return Err(Error::InvalidName(s.to_string()));
        }
        Ok(VarName(Arc::from(s)))
    }

    pub fn prefixed(&self, tag: &str) -> Self {
        VarName(Arc::from(format!("{tag}/{}", self.0)))
    }

    pub fn base(&self) -> &str {
        self.0.rsplit('/').next().unwrap_or(&self.0)
    }

    pub fn path(&self) -> Vec<&str> {
        let mut parts: Vec<&str> = self.0.split('/').collect();
        parts.pop();
        parts
    }

    pub fn is_plain(&self) -> bool {
        !self.0.contains('/')
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl Serialize for VarName {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for VarName {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        VarName::parse(&s).map_err(serde::de::Error::custom)
    }
}

pub fn var(s: &str) -> VarName {
    VarName::parse(s).expect("valid variable name")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

/// `coeffs · x (≤ | =) rhs`. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    pub coeffs: BTreeMap<VarName, Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn new<I>(coeffs: I, relation: Relation, rhs: Rational) -> Self
    where
        I: IntoIterator<Item = (VarName, Rational)>,
    {
        let mut map: BTreeMap<VarName, Rational> = BTreeMap::new();
        for (v, c) in coeffs {
            *map.entry(v).or_default() += c;
        }
        map.retain(|_, c| !c.is_zero());
        LinearConstraint { coeffs: map, relation, rhs }
    }

    pub fn le<I: IntoIterator<Item = (VarName, Rational)>>(coeffs: I, rhs: Rational) -> Self {
        Self::new(coeffs, Relation::Le, rhs)
    }

    pub fn eq<I: IntoIterator<Item = (VarName, Rational)>>(coeffs: I, rhs: Rational) -> Self {
        Self::new(coeffs, Relation::Eq, rhs)
    }

    pub fn lhs(&self, p: &Point) -> Result<Rational> {
        let mut s = Rational::zero();
        for (v, c) in &self.coeffs {
            s += c * p.get(v)?;
        }
        Ok(s)
    }

    pub fn is_satisfied(&self, p: &Point) -> Result<bool> {
        let l = self.lhs(p)?;
        Ok(match self.relation {
            Relation::Le => l <= self.rhs,
            Relation::Eq => l == self.rhs,
        })
    }

    /// `rhs - lhs`, the slack at `p`.
    pub fn slack(&self, p: &Point) -> Result<Rational> {
        Ok(&self.rhs - self.lhs(p)?)
    }

    pub fn rename(&self, f: impl Fn(&VarName) -> VarName) -> Self {
        LinearConstraint {
            coeffs: self.coeffs.iter().map(|(v, c)| (f(v), c.clone())).collect(),
            relation: self.relation,
            rhs: self.rhs.clone(),
        }
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        LinearConstraint::new(
            self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)),
            self.relation,
            &self.rhs * k,
        )
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            if first {
                write!(f, "{c} {v}")?;
                first = false;
            } else if c.is_negative() {
                write!(f, " - {} {v}", c.abs())?;
            } else {
                write!(f, " + {c} {v}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        let op = match self.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
        };
        write!(f, " {op} {}", self.rhs)
    }
}

/// A list of `≤` rows and `=` rows over an ordered variable list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearSystem {
    pub variables: Vec<VarName>,
    pub inequalities: Vec<LinearConstraint>,
    pub equations: Vec<LinearConstraint>,
}

impl LinearSystem {
    pub fn new(variables: Vec<VarName>) -> Self {
        LinearSystem { variables, inequalities: Vec::new(), equations: Vec::new() }
    }

    pub fn push(&mut self, c: LinearConstraint) {
        match c.relation {
            Relation::Le => self.inequalities.push(c),
            Relation::Eq => self.equations.push(c),
        }
    }

    pub fn constraints(&self) -> impl Iterator<Item = &LinearConstraint> {
        self.inequalities.iter().chain(self.equations.iter())
    }

    pub fn contains(&self, p: &Point) -> Result<bool> {
        for c in self.constraints() {
            if !c.is_satisfied(p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every constraint only mentions declared variables.
    pub fn check_closed(&self) -> Result<()> {
        let known: std::collections::HashSet<&VarName> = self.variables.iter().collect();
        for c in self.constraints() {
            for v in c.coeffs.keys() {
                if !known.contains(v) {
                    return Err(Error::UnknownVariable(v.to_string()));
                }
            }
        }
        Ok(())
    }
}

/// An assignment of rationals to variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    pub assignment: BTreeMap<VarName, Rational>,
}

impl Point {
    pub fn new() -> Self {
        Point::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (VarName, Rational)>>(it: I) -> Self {
        Point { assignment: it.into_iter().collect() }
    }

    pub fn get(&self, v: &VarName) -> Result<&Rational> {
        self.assignment.get(v).ok_or_else(|| Error::MissingVariable(v.to_string()))
    }

    pub fn set(&mut self, v: VarName, x: Rational) {
        self.assignment.insert(v, x);
    }

    pub fn restrict(&self, vars: &[VarName]) -> Result<Point> {
        let mut p = Point::new();
        for v in vars {
            p.set(v.clone(), self.get(v)?.clone());
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};

    #[test]
    fn names_split_into_path_and_base() {
        let v = var("a1/u2/x");
        assert_eq!(v.base(), "x");
        assert_eq!(v.path(), vec!["a1", "u2"]);
        assert_eq!(var("x").prefixed("t").to_string(), "t/x");
        assert!(VarName::new("a/b").is_err());
        assert!(VarName::parse("a//b").is_err());
    }

    #[test]
    fn constraint_merges_and_drops_zeros() {
        let c = LinearConstraint::le(
            vec![(var("x"), int(1)), (var("x"), int(-1)), (var("y"), q(1, 2))],
            int(1),
        );
        assert_eq!(c.nnz(), 1);
        let p = Point::from_pairs(vec![(var("y"), int(2))]);
        assert!(c.is_satisfied(&p).unwrap());
        assert_eq!(c.slack(&p).unwrap(), int(0));
    }

    #[test]
    fn missing_coordinate_is_an_error() {
        let c = LinearConstraint::le(vec![(var("x"), int(1))], int(1));
        assert!(matches!(c.lhs(&Point::new()), Err(Error::MissingVariable(_))));
    }
}
