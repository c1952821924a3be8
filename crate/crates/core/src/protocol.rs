//! Deterministic protocol trees and their compilation into formulations.
//!
//! Compilation is bottom-up: a node where Alice speaks intersects its
//! children (juxtaposition), a node where Bob speaks takes the convex hull
//! of their union (left fold of Balas unions), a single-child node passes
//! its child through, and a formulation attached to any node overrides its
//! subtree.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulation::{balas_fold, embed, juxtapose_tagged, Formulation};
use crate::linalg::{LinearConstraint, LinearSystem, VarName};
use crate::pair::PolytopePair;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sender {
    #[serde(rename = "A")]
    Alice,
    #[serde(rename = "B")]
    Bob,
    #[serde(rename = "leaf")]
    Leaf,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolTree {
    pub sender: Sender,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub children: IndexMap<String, ProtocolTree>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf_ef: Option<Formulation>,
    /// Row ids of a [`PolytopePair`]; see [`ProtocolTree::resolve_leaves`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TreeCensus {
    pub nodes: usize,
    pub leaves: usize,
    pub depth: usize,
    pub alice_nodes: usize,
    pub bob_nodes: usize,
}

impl ProtocolTree {
    pub fn leaf(value: Option<Rational>, ef: Option<Formulation>) -> Self {
        ProtocolTree { sender: Sender::Leaf, children: IndexMap::new(), value, leaf_ef: ef, rows: None }
    }

    pub fn node(sender: Sender, children: IndexMap<String, ProtocolTree>) -> Self {
        ProtocolTree { sender, children, value: None, leaf_ef: None, rows: None }
    }

    pub fn is_leaf(&self) -> bool {
        self.sender == Sender::Leaf
    }

    /// Leaves in depth-first order together with their tag paths.
    pub fn leaves(&self) -> Vec<(Vec<String>, &ProtocolTree)> {
        fn go<'a>(t: &'a ProtocolTree, path: &mut Vec<String>, out: &mut Vec<(Vec<String>, &'a ProtocolTree)>) {
            if t.is_leaf() {
                out.push((path.clone(), t));
                return;
            }
            for (tag, c) in &t.children {
                path.push(tag.clone());
                go(c, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn census(&self) -> TreeCensus {
        fn go(t: &ProtocolTree, d: usize, c: &mut TreeCensus) {
            c.nodes += 1;
            c.depth = c.depth.max(d);
            match t.sender {
                Sender::Leaf => c.leaves += 1,
                Sender::Alice => c.alice_nodes += 1,
                Sender::Bob => c.bob_nodes += 1,
            }
            for ch in t.children.values() {
                go(ch, d + 1, c);
            }
        }
        let mut c = TreeCensus::default();
        go(self, 0, &mut c);
        c
    }

    pub fn get(&self, path: &[&str]) -> Option<&ProtocolTree> {
        let mut t = self;
        for tag in path {
            t = t.children.get(*tag)?;
        }
        Some(t)
    }

    /// Attaches leaf formulations from `pair`: a leaf with `rows` and a
    /// `value` gets the exact rectangle formulation; a leaf with a value but
    /// no rows only gets the box (valid but weak, so a warning is logged).
    pub fn resolve_leaves(&mut self, pair: &PolytopePair) -> Result<()> {
        fn go(t: &mut ProtocolTree, pair: &PolytopePair, path: &mut Vec<String>) -> Result<()> {
            if t.is_leaf() && t.leaf_ef.is_none() {
                let Some(value) = t.value.clone() else {
                    return Err(Error::MissingLeafFormulation(path.join("/")));
                };
                let idx = match &t.rows {
                    Some(ids) => ids.iter().map(|id| pair.row_index(id)).collect::<Result<Vec<_>>>()?,
                    None => {
                        log::warn!("leaf {} has a value but no rows; using the box only", path.join("/"));
                        Vec::new()
                    }
                };
                t.leaf_ef = Some(leaf_formulation(pair, &idx, Some(&value))?);
            }
            for (tag, c) in t.children.iter_mut() {
                path.push(tag.clone());
                go(c, pair, path)?;
                path.pop();
            }
            Ok(())
        }
        go(self, pair, &mut Vec::new())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Exact formulation of a monochromatic rectangle whose rows are `rows` of
/// `pair`: the box plus `a_i · x = b_i - value`. With an unknown value a
/// shared variable `y >= 0` replaces it.
pub fn leaf_formulation(pair: &PolytopePair, rows: &[usize], value: Option<&Rational>) -> Result<Formulation> {
    if let Some(v) = value {
        if v.is_negative() {
            return Err(Error::NegativeValue(v.to_string()));
        }
    }
    let mut ineq = Vec::with_capacity(2 * pair.vars.len() + 1);
    for (k, v) in pair.vars.iter().enumerate() {
        ineq.push(LinearConstraint::le([(v.clone(), -Rational::one())], -&pair.lower[k]));
        ineq.push(LinearConstraint::le([(v.clone(), Rational::one())], pair.upper[k].clone()));
    }
    let y = VarName::new("y").expect("plain name");
    let mut aux = Vec::new();
    if value.is_none() {
        ineq.push(LinearConstraint::le([(y.clone(), -Rational::one())], Rational::zero()));
        aux.push(y.clone());
    }
    let mut eqs = Vec::with_capacity(rows.len());
    for &i in rows {
        let r = pair.rows.get(i).ok_or_else(|| Error::UnknownRow(i.to_string()))?;
        eqs.push(match value {
            Some(v) => LinearConstraint::eq(r.coeffs.clone(), &r.rhs - v),
            None => {
                let mut c = r.coeffs.clone();
                *c.entry(y.clone()).or_insert_with(Rational::zero) += Rational::one();
                LinearConstraint::eq(c, r.rhs.clone())
            }
        });
    }
    Ok(Formulation::from_parts(pair.vars.clone(), aux, ineq, eqs))
}

/// The factorisation formulation: one variable `y/R{k}` per rectangle and
/// `a_i · x + Σ_{R ∋ i} y_R = b_i` for every row of `q`, with `y >= 0`.
/// `rects` lists the row indices of each positive-value rectangle.
pub fn factorization_formulation(
    rects: &[Vec<usize>],
    q: &LinearSystem,
    original_vars: &[VarName],
) -> Result<Formulation> {
    let m = q.inequalities.len();
    let ys: Vec<VarName> = (0..rects.len()).map(|k| VarName::new(&format!("R{k}")).unwrap().prefixed("y")).collect();
    let mut cover: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (k, rows) in rects.iter().enumerate() {
        for &i in rows {
            cover.get_mut(i).ok_or_else(|| Error::UnknownRow(i.to_string()))?.push(k);
        }
    }
    let mut eqs = Vec::with_capacity(m);
    for (row, ks) in q.inequalities.iter().zip(&cover) {
        let mut c = row.coeffs.clone();
        for &k in ks {
            *c.entry(ys[k].clone()).or_insert_with(Rational::zero) += Rational::one();
        }
        eqs.push(LinearConstraint::eq(c, row.rhs.clone()));
    }
    let ineq = ys.iter().map(|y| LinearConstraint::le([(y.clone(), -Rational::one())], Rational::zero())).collect();
    Formulation::new(original_vars.to_vec(), ys, ineq, eqs)
}

/// Turns a message tag into a variable-path component that cannot clash
/// with the names used by the union construction.
pub(crate) fn tag_component(tag: &str) -> String {
    let mut s: String = tag.chars().map(|c| if c == '/' || c.is_whitespace() { '_' } else { c }).collect();
    if s.is_empty() || s.starts_with('&') || s == crate::formulation::LAMBDA_TAG || s.starts_with('_') {
        s.insert(0, '_');
    }
    s
}

/// Compiles a protocol tree from the formulations at its leaves (or at
/// overriding internal nodes). Bob's children must share one original
/// space; Alice's children are read in the union of theirs.
pub fn compile(tree: &ProtocolTree) -> Result<Formulation> {
    fn go(t: &ProtocolTree, path: &mut Vec<String>) -> Result<Formulation> {
        if let Some(f) = &t.leaf_ef {
            return Ok(f.clone());
        }
        if t.is_leaf() {
            return Err(Error::MissingLeafFormulation(format!("/{}", path.join("/"))));
        }
        if t.children.is_empty() {
            return Err(Error::EmptySubtree(format!("/{}", path.join("/"))));
        }
        let mut parts = Vec::with_capacity(t.children.len());
        for (tag, c) in &t.children {
            path.push(tag.clone());
            let f = go(c, path)?;
            path.pop();
            parts.push((tag_component(tag), f));
        }
        if parts.len() == 1 {
            return Ok(parts.pop().unwrap().1);
        }
        let mut seen = std::collections::HashSet::new();
        for (tag, _) in &parts {
            if !seen.insert(tag.as_str()) {
                return Err(Error::Invalid(format!("sibling tags collide after sanitising: {tag}")));
            }
        }
        let refs: Vec<(&str, &Formulation)> = parts.iter().map(|(t, f)| (t.as_str(), f)).collect();
        match t.sender {
            Sender::Alice => {
                // children over different coordinates meet in the union space
                let mut space: Vec<VarName> = Vec::new();
                let mut seen = std::collections::HashSet::new();
                for (_, f) in &refs {
                    for v in &f.original_vars {
                        if seen.insert(v.clone()) {
                            space.push(v.clone());
                        }
                    }
                }
                if refs.iter().all(|(_, f)| f.original_vars.len() == space.len()) {
                    return juxtapose_tagged(&refs);
                }
                let embedded: Vec<Formulation> = refs.iter().map(|(_, f)| embed(f, &space)).collect::<Result<_>>()?;
                let refs: Vec<(&str, &Formulation)> =
                    refs.iter().map(|(t, _)| *t).zip(embedded.iter()).collect();
                juxtapose_tagged(&refs)
            }
            Sender::Bob => balas_fold(&refs),
            Sender::Leaf => unreachable!(),
        }
    }
    go(tree, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{var, Point};
    use crate::rational::int;

    fn point(v: i64) -> Formulation {
        Formulation::box_formulation(&[var("x")], &int(v), &int(v))
    }

    #[test]
    fn bob_node_hulls_and_alice_node_intersects() {
        let mut bob = IndexMap::new();
        bob.insert("0".to_string(), ProtocolTree::leaf(None, Some(point(0))));
        bob.insert("1".to_string(), ProtocolTree::leaf(None, Some(point(2))));
        let hull = ProtocolTree::node(Sender::Bob, bob);
        let mut alice = IndexMap::new();
        alice.insert("a".to_string(), hull);
        alice.insert(
            "b".to_string(),
            ProtocolTree::leaf(None, Some(Formulation::box_formulation(&[var("x")], &int(1), &int(5)))),
        );
        let root = ProtocolTree::node(Sender::Alice, alice);
        let f = compile(&root).unwrap();
        let has = |v: i64| f.projection_contains(&Point::from_pairs([(var("x"), int(v))])).unwrap();
        assert!(!has(0));
        assert!(has(1) && has(2));
        assert!(!has(3));
    }

    #[test]
    fn missing_leaf_is_reported_with_path() {
        let mut ch = IndexMap::new();
        ch.insert("t".to_string(), ProtocolTree::leaf(Some(int(1)), None));
        ch.insert("u".to_string(), ProtocolTree::leaf(None, Some(point(0))));
        let root = ProtocolTree::node(Sender::Bob, ch);
        match compile(&root) {
            Err(Error::MissingLeafFormulation(p)) => assert_eq!(p, "/t"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn override_wins_and_single_child_passes_through() {
        let mut ch = IndexMap::new();
        ch.insert("only".to_string(), ProtocolTree::leaf(None, Some(point(3))));
        let mut t = ProtocolTree::node(Sender::Bob, ch);
        assert_eq!(compile(&t).unwrap(), point(3));
        t.leaf_ef = Some(point(4));
        assert_eq!(compile(&t).unwrap(), point(4));
    }

    #[test]
    fn negative_leaf_value_rejected() {
        let g = crate::graph::families::path(2);
        let pair = PolytopePair::stab_qstab(&g);
        assert!(matches!(leaf_formulation(&pair, &[0], Some(&int(-1))), Err(Error::NegativeValue(_))));
        assert!(matches!(leaf_formulation(&pair, &[99], Some(&int(0))), Err(Error::UnknownRow(_))));
    }

    #[test]
    fn unknown_value_leaf_shares_one_variable() {
        let g = crate::graph::families::path(3);
        let pair = PolytopePair::stab_qstab(&g);
        let rows = [pair.row_index("{v1,v2}").unwrap(), pair.row_index("{v2,v3}").unwrap()];
        let f = leaf_formulation(&pair, &rows, None).unwrap();
        assert_eq!(f.aux_vars.len(), 1);
        assert_eq!(f.equations().len(), 2);
        // {v1,v3} and {v2} both have slack 0 on both rows, {} has slack 1
        for (s, y) in [(&[1i64, 0, 1][..], 0i64), (&[0, 1, 0], 0), (&[0, 0, 0], 1)] {
            let mut p = Point::from_pairs(g.vars().into_iter().zip(s.iter().map(|&v| int(v))));
            p.set(var("y"), int(y));
            assert!(f.system.contains(&p).unwrap());
        }
    }

    #[test]
    fn factorization_with_one_rectangle() {
        let mut q = LinearSystem::new(vec![var("x")]);
        q.push(LinearConstraint::le([(var("x"), int(1))], int(1)));
        let f = factorization_formulation(&[vec![0]], &q, &[var("x")]).unwrap();
        assert_eq!(f.equations().len(), 1);
        assert_eq!(f.equations()[0].to_string(), "1 x + 1 y/R0 = 1");
        assert!(matches!(factorization_formulation(&[vec![3]], &q, &[var("x")]), Err(Error::UnknownRow(_))));
    }

    #[test]
    fn json_round_trip() {
        let mut ch = IndexMap::new();
        ch.insert("0".to_string(), ProtocolTree::leaf(Some(int(1)), Some(point(0))));
        ch.insert("1".to_string(), ProtocolTree::leaf(Some(int(0)), None));
        let t = ProtocolTree::node(Sender::Alice, ch);
        let back = ProtocolTree::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }
}
