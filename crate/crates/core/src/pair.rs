//! Pairs of polytopes `P ⊆ Q`: `P` by its vertices, `Q` by rows plus a box.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::linalg::{LinearConstraint, Point, VarName};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopePair {
    pub vars: Vec<VarName>,
    pub col_ids: Vec<String>,
    pub vertices: Vec<Point>,
    pub row_ids: Vec<String>,
    /// `a_i · x <= b_i`
    pub rows: Vec<LinearConstraint>,
    pub lower: Vec<Rational>,
    pub upper: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct RowJson {
    #[serde(default)]
    id: Option<String>,
    coeffs: std::collections::BTreeMap<VarName, Rational>,
    rhs: Rational,
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    #[serde(default)]
    id: Option<String>,
    point: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct PairJson {
    vars: Vec<VarName>,
    vertices: Vec<VertexJson>,
    rows: Vec<RowJson>,
    lower: Vec<Rational>,
    upper: Vec<Rational>,
}

pub fn set_label(g: &Graph, s: VertexSet) -> String {
    let names: Vec<&str> = s.iter().map(|v| g.names()[v].as_str()).collect();
    format!("{{{}}}", names.join(","))
}

impl PolytopePair {
    pub fn row_index(&self, id: &str) -> Result<usize> {
        self.row_ids.iter().position(|r| r == id).ok_or_else(|| Error::UnknownRow(id.into()))
    }

    pub fn col_index(&self, id: &str) -> Result<usize> {
        self.col_ids
            .iter()
            .position(|r| r == id)
            .ok_or_else(|| Error::Invalid(format!("unknown column {id}")))
    }

    /// `(STAB(G), QSTAB(G))`: stable-set vectors against clique rows and
    /// the unit box. Ids are the vertex sets written as `{a,b}`.
    pub fn stab_qstab(g: &Graph) -> PolytopePair {
        let vars = g.vars();
        let mut vertices = Vec::new();
        let mut col_ids = Vec::new();
        for s in g.stable_sets() {
            vertices.push(indicator(g, s));
            col_ids.push(set_label(g, s));
        }
        let mut rows = Vec::new();
        let mut row_ids = Vec::new();
        for c in g.cliques(None, false) {
            rows.push(LinearConstraint::le(c.iter().map(|v| (g.var(v), Rational::one())), Rational::one()));
            row_ids.push(set_label(g, c));
        }
        let n = g.n();
        PolytopePair {
            vars,
            col_ids,
            vertices,
            row_ids,
            rows,
            lower: vec![Rational::zero(); n],
            upper: vec![Rational::one(); n],
        }
    }

    /// Entry `(i, j)` is `b_i - a_i · v_j`.
    pub fn slack_matrix(&self) -> Result<Vec<Vec<Rational>>> {
        self.rows
            .iter()
            .map(|r| self.vertices.iter().map(|v| r.slack(v)).collect())
            .collect()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: PairJson = serde_json::from_str(s)?;
        let d = j.vars.len();
        if j.lower.len() != d || j.upper.len() != d {
            return Err(Error::Invalid("box length differs from number of variables".into()));
        }
        let mut vertices = Vec::new();
        let mut col_ids = Vec::new();
        for (k, v) in j.vertices.into_iter().enumerate() {
            if v.point.len() != d {
                return Err(Error::Invalid(format!("vertex {k} has the wrong dimension")));
            }
            col_ids.push(v.id.unwrap_or_else(|| format!("c{k}")));
            vertices.push(Point::from_pairs(j.vars.iter().cloned().zip(v.point)));
        }
        let mut rows = Vec::new();
        let mut row_ids = Vec::new();
        for (k, r) in j.rows.into_iter().enumerate() {
            row_ids.push(r.id.unwrap_or_else(|| format!("r{k}")));
            rows.push(LinearConstraint::le(r.coeffs, r.rhs));
        }
        Ok(PolytopePair { vars: j.vars, col_ids, vertices, row_ids, rows, lower: j.lower, upper: j.upper })
    }

    pub fn to_json(&self) -> String {
        let j = PairJson {
            vars: self.vars.clone(),
            vertices: self
                .vertices
                .iter()
                .zip(&self.col_ids)
                .map(|(p, id)| VertexJson {
                    id: Some(id.clone()),
                    point: self.vars.iter().map(|v| p.get(v).cloned().unwrap_or_default()).collect(),
                })
                .collect(),
            rows: self
                .rows
                .iter()
                .zip(&self.row_ids)
                .map(|(r, id)| RowJson { id: Some(id.clone()), coeffs: r.coeffs.clone(), rhs: r.rhs.clone() })
                .collect(),
            lower: self.lower.clone(),
            upper: self.upper.clone(),
        };
        serde_json::to_string_pretty(&j).expect("pair serialises")
    }
}

/// `χ^S` over the graph's variables.
pub fn indicator(g: &Graph, s: VertexSet) -> Point {
    Point::from_pairs((0..g.n()).map(|v| {
        (g.var(v), if s.contains(v) { Rational::one() } else { Rational::zero() })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::path;

    #[test]
    fn stab_pair_of_p3() {
        let p = PolytopePair::stab_qstab(&path(3));
        assert_eq!(p.rows.len(), 5);
        assert_eq!(p.vertices.len(), 5);
        let m = p.slack_matrix().unwrap();
        // row {v1,v2} against column {v1,v3}
        let r = p.row_index("{v1,v2}").unwrap();
        let c = p.col_index("{v1,v3}").unwrap();
        assert_eq!(m[r][c], Rational::zero());
        let back = PolytopePair::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
    }
}
