//! The clique-vs-stable-set protocol and its compiled formulation for
//! `(STAB(G), QSTAB(G))`.
//!
//! Each message is a vertex or `0`. In a stage where at least half of the
//! current vertices have low degree (`2·deg ≤ |V|`), Alice sends her
//! smallest low vertex `a` or `0`:
//!
//! * after `a`, Bob echoes `a` if `a ∈ S` (the inputs meet, value 0) and
//!   says `0` otherwise; the graph shrinks to `N(a)` minus the low vertices
//!   before `a`;
//! * after `0`, Bob says `0` (disjoint, value 1) or sends his smallest high
//!   vertex and the graph shrinks to the high vertices.
//!
//! Otherwise the stage is mirrored with Bob speaking first. The vertices
//! sent by Alice form `C_R` and those sent by Bob form `S_R`; every leaf is
//! the unique leaf reached by its own `(C_R, S_R)`.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formulation::Formulation;
use crate::graph::{Graph, VertexSet};
use crate::linalg::LinearConstraint;
use crate::pair::{set_label, PolytopePair};
use crate::protocol::{compile, ProtocolTree, Sender};
use crate::rational::Rational;
use crate::unambiguous::{Rectangle, RectanglePartition};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct YannakakisOptions {
    /// Shrink to the closed neighbourhood `N+(a)` instead of `N(a)`.
    pub closed_neighborhood: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub messages: Vec<(Sender, String)>,
    pub c_r: VertexSet,
    pub s_r: VertexSet,
    /// `1 - |C ∩ S|`, i.e. 0 or 1.
    pub value: u8,
}

fn msg(g: &Graph, v: usize) -> String {
    format!("@{}", g.names()[v])
}

/// Runs the protocol on clique `c` and stable set `s`.
pub fn run_protocol(g: &Graph, c: VertexSet, s: VertexSet, opts: YannakakisOptions) -> Transcript {
    let mut u = g.all();
    let mut t = Transcript { messages: Vec::new(), c_r: VertexSet::EMPTY, s_r: VertexSet::EMPTY, value: 1 };
    let nbhd = |v: usize| if opts.closed_neighborhood { g.closed_neighbors(v) } else { g.neighbors(v) };
    loop {
        let (low, high) = g.low_high_split(u);
        let before = |v: usize| VertexSet((1u64 << v) - 1);
        if 2 * low.len() >= u.len() {
            match c.inter(low).first() {
                Some(a) => {
                    t.messages.push((Sender::Alice, msg(g, a)));
                    t.c_r = t.c_r.with(a);
                    if s.contains(a) {
                        t.messages.push((Sender::Bob, msg(g, a)));
                        t.s_r = t.s_r.with(a);
                        t.value = 0;
                        return t;
                    }
                    t.messages.push((Sender::Bob, "0".into()));
                    u = u.inter(nbhd(a)).minus(low.inter(before(a)));
                }
                None => {
                    t.messages.push((Sender::Alice, "0".into()));
                    match s.inter(high).first() {
                        None => {
                            t.messages.push((Sender::Bob, "0".into()));
                            return t;
                        }
                        Some(b) => {
                            t.messages.push((Sender::Bob, msg(g, b)));
                            t.s_r = t.s_r.with(b);
                            u = high;
                        }
                    }
                }
            }
        } else {
            match s.inter(high).first() {
                Some(b) => {
                    t.messages.push((Sender::Bob, msg(g, b)));
                    t.s_r = t.s_r.with(b);
                    if c.contains(b) {
                        t.messages.push((Sender::Alice, msg(g, b)));
                        t.c_r = t.c_r.with(b);
                        t.value = 0;
                        return t;
                    }
                    t.messages.push((Sender::Alice, "0".into()));
                    let non = u.minus(g.closed_neighbors(b));
                    let non = if opts.closed_neighborhood { non.with(b).inter(u) } else { non };
                    u = non.minus(high.inter(before(b)));
                }
                None => {
                    t.messages.push((Sender::Bob, "0".into()));
                    match c.inter(low).first() {
                        None => {
                            t.messages.push((Sender::Alice, "0".into()));
                            return t;
                        }
                        Some(a) => {
                            t.messages.push((Sender::Alice, msg(g, a)));
                            t.c_r = t.c_r.with(a);
                            u = low;
                        }
                    }
                }
            }
        }
    }
}

/// Largest `|C_R| + |S_R|` over all leaves: every non-final stage halves
/// the graph and reveals one vertex, the final stage reveals at most two.
pub fn input_size_bound(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        (usize::BITS - 1 - n.leading_zeros()) as usize + 2
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct YLeaf {
    pub path: Vec<String>,
    pub c_r: Vec<usize>,
    pub s_r: Vec<usize>,
    pub value: u8,
    /// Coordinates fixed to 0 in the leaf formulation.
    pub zeros: Vec<usize>,
    /// The coordinate fixed to 1 (value-0 leaves).
    pub one: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct YannakakisTree {
    pub graph: Graph,
    pub options: YannakakisOptions,
    pub tree: ProtocolTree,
    pub leaves: Vec<YLeaf>,
}

fn insert(root: &mut ProtocolTree, t: &Transcript) -> Result<bool> {
    let mut node = root;
    for (sender, tag) in &t.messages {
        if node.is_leaf() && node.children.is_empty() && node.value.is_none() {
            node.sender = *sender;
        }
        if node.sender != *sender {
            return Err(Error::Invalid("inconsistent speakers in protocol tree".into()));
        }
        node = node
            .children
            .entry(tag.clone())
            .or_insert_with(|| ProtocolTree::leaf(None, None));
    }
    let fresh = node.value.is_none();
    node.value = Some(Rational::from(t.value as i64));
    Ok(fresh)
}

fn empty_root() -> ProtocolTree {
    ProtocolTree::leaf(None, None)
}

impl YannakakisTree {
    fn from_transcripts(g: &Graph, opts: YannakakisOptions, ts: Vec<Transcript>) -> Result<Self> {
        let mut root = empty_root();
        let mut leaves = Vec::new();
        for t in ts {
            if insert(&mut root, &t)? {
                leaves.push(t);
            }
        }
        let mut out = Vec::with_capacity(leaves.len());
        for t in &leaves {
            out.push(leaf_info(g, opts, t));
        }
        let mut yt = YannakakisTree { graph: g.clone(), options: opts, tree: root, leaves: out };
        yt.attach_leaf_formulations();
        Ok(yt)
    }

    fn attach_leaf_formulations(&mut self) {
        let g = &self.graph;
        for leaf in &self.leaves {
            let mut node = &mut self.tree;
            for tag in &leaf.path {
                node = node.children.get_mut(tag).expect("leaf path exists");
            }
            node.leaf_ef = Some(leaf_ef(g, leaf));
        }
    }

    pub fn formulation(&self) -> Result<Formulation> {
        compile(&self.tree)
    }

    pub fn max_input_size(&self) -> usize {
        self.leaves.iter().map(|l| l.c_r.len() + l.s_r.len()).max().unwrap_or(0)
    }

    /// The rectangles of the leaves, over nonempty cliques and all stable
    /// sets of `G`, found by replaying every input.
    pub fn partition(&self) -> RectanglePartition {
        let g = &self.graph;
        let cliques = g.cliques(None, false);
        let stables = g.stable_sets();
        let mut by_path: IndexMap<Vec<String>, (Vec<String>, Vec<String>, u8)> = IndexMap::new();
        for l in &self.leaves {
            by_path.insert(l.path.clone(), (Vec::new(), Vec::new(), l.value));
        }
        let tags = |t: &Transcript| t.messages.iter().map(|m| m.1.clone()).collect::<Vec<_>>();
        let mut row_seen = vec![std::collections::HashSet::new(); 0];
        row_seen.resize(by_path.len(), std::collections::HashSet::new());
        let mut col_seen = row_seen.clone();
        for &c in &cliques {
            for &s in &stables {
                let t = run_protocol(g, c, s, self.options);
                let k = by_path.get_index_of(&tags(&t)).expect("replay reaches a known leaf");
                let (rows, cols, _) = &mut by_path[k];
                if row_seen[k].insert(c) {
                    rows.push(set_label(g, c));
                }
                if col_seen[k].insert(s) {
                    cols.push(set_label(g, s));
                }
            }
        }
        let rectangles = by_path
            .into_iter()
            .filter(|(_, (rows, cols, _))| !rows.is_empty() && !cols.is_empty())
            .map(|(_, (rows, cols, v))| Rectangle { rows, cols, value: Rational::from(v as i64) })
            .collect();
        RectanglePartition {
            rows: cliques.iter().map(|&c| set_label(g, c)).collect(),
            cols: stables.iter().map(|&s| set_label(g, s)).collect(),
            rectangles,
        }
    }
}

fn leaf_info(g: &Graph, opts: YannakakisOptions, t: &Transcript) -> YLeaf {
    let path = leaf_path(t);
    let one = if t.value == 0 { t.c_r.inter(t.s_r).first() } else { None };
    let mut zeros = match one {
        Some(u) => t.c_r.without(u),
        None => t.c_r,
    };
    for v in g.all().minus(t.c_r).iter() {
        let c2 = t.c_r.with(v);
        if g.is_clique(c2) && run_protocol(g, c2, t.s_r, opts).messages == t.messages {
            zeros = zeros.with(v);
        }
    }
    YLeaf { path, c_r: t.c_r.to_vec(), s_r: t.s_r.to_vec(), value: t.value, zeros: zeros.to_vec(), one }
}

fn leaf_path(t: &Transcript) -> Vec<String> {
    t.messages.iter().map(|m| m.1.clone()).collect()
}

/// Whether clique `c` is a row of the leaf's rectangle: the input
/// `(c, S_R)` ends at the leaf.
pub fn rectangle_contains_clique(g: &Graph, leaf: &YLeaf, c: VertexSet, opts: YannakakisOptions) -> Result<bool> {
    if !g.is_clique(c) {
        return Err(Error::InvalidClique(c.to_vec()));
    }
    Ok(leaf_path(&run_protocol(g, c, VertexSet::from_slice(&leaf.s_r), opts)) == leaf.path)
}

/// Whether stable set `s` is a column of the leaf's rectangle.
pub fn rectangle_contains_stable_set(g: &Graph, leaf: &YLeaf, s: VertexSet, opts: YannakakisOptions) -> Result<bool> {
    if !g.is_stable(s) {
        return Err(Error::InvalidStableSet(s.to_vec()));
    }
    Ok(leaf_path(&run_protocol(g, VertexSet::from_slice(&leaf.c_r), s, opts)) == leaf.path)
}

/// `0 ≤ x ≤ 1` with the leaf's zero and one fixings.
pub fn leaf_ef(g: &Graph, leaf: &YLeaf) -> Formulation {
    let mut f = Formulation::box_formulation(&g.vars(), &Rational::zero(), &Rational::one());
    for &v in &leaf.zeros {
        f.system.equations.push(LinearConstraint::eq([(g.var(v), Rational::one())], Rational::zero()));
    }
    if let Some(u) = leaf.one {
        f.system.equations.push(LinearConstraint::eq([(g.var(u), Rational::one())], Rational::one()));
    }
    f
}

/// Builds the tree from the inputs of combined size at most
/// [`input_size_bound`], which include every leaf's own `(C_R, S_R)`.
pub fn build_tree(g: &Graph) -> Result<YannakakisTree> {
    build_tree_with(g, YannakakisOptions::default())
}

pub fn build_tree_with(g: &Graph, opts: YannakakisOptions) -> Result<YannakakisTree> {
    let k = input_size_bound(g.n()).max(1);
    let cliques: Vec<VertexSet> = g.cliques(Some(k), true);
    let stables: Vec<VertexSet> = g.stable_sets().into_iter().filter(|s| s.len() <= k).collect();
    let mut ts = Vec::new();
    for &c in &cliques {
        for &s in stables.iter().filter(|s| c.len() + s.len() <= k) {
            ts.push(run_protocol(g, c, s, opts));
        }
    }
    YannakakisTree::from_transcripts(g, opts, ts)
}

/// Same tree, from replaying every clique against every stable set.
pub fn build_tree_exhaustive(g: &Graph, opts: YannakakisOptions) -> Result<YannakakisTree> {
    let mut ts = Vec::new();
    for c in g.cliques(None, true) {
        for s in g.stable_sets() {
            ts.push(run_protocol(g, c, s, opts));
        }
    }
    YannakakisTree::from_transcripts(g, opts, ts)
}

pub fn yannakakis_formulation(g: &Graph) -> Result<Formulation> {
    build_tree(g)?.formulation()
}

/// Leaf census: count of leaves per combined input size.
pub fn census(t: &YannakakisTree) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for l in &t.leaves {
        *m.entry(l.c_r.len() + l.s_r.len()).or_insert(0) += 1;
    }
    m
}

/// The protocol's slack-matrix pair, re-exported for convenience.
pub fn stab_pair(g: &Graph) -> PolytopePair {
    PolytopePair::stab_qstab(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;

    #[test]
    fn protocol_computes_intersection() {
        for g in [path(4), cycle(5), star(5), complete(4)] {
            for c in g.cliques(None, true) {
                for s in g.stable_sets() {
                    let t = run_protocol(&g, c, s, YannakakisOptions::default());
                    let want = if c.inter(s).is_empty() { 1 } else { 0 };
                    assert_eq!(t.value, want, "{g:?} {c:?} {s:?}");
                    if t.value == 0 {
                        assert_eq!(t.c_r.inter(t.s_r).len(), 1);
                    }
                }
            }
        }
    }

    #[test]
    fn k1_has_three_leaves() {
        let g = complete(1);
        let t = build_tree(&g).unwrap();
        assert_eq!(t.leaves.len(), 3);
        let vals: Vec<u8> = t.leaves.iter().map(|l| l.value).collect();
        assert_eq!(vals.iter().filter(|&&v| v == 0).count(), 1);
    }

    #[test]
    fn k2_needs_three_revealed_vertices() {
        // the combined size exceeds ceil(log2 n) already for K2
        let t = build_tree(&complete(2)).unwrap();
        assert_eq!(t.max_input_size(), 3);
        assert!(t.max_input_size() <= input_size_bound(2));
    }

    #[test]
    fn small_input_enumeration_matches_exhaustive_replay() {
        for g in [path(5), cycle(6), star(6), complete(5), random_connected(7, 3)] {
            let a = build_tree(&g).unwrap();
            let b = build_tree_exhaustive(&g, YannakakisOptions::default()).unwrap();
            let pa: std::collections::BTreeSet<_> = a.leaves.iter().map(|l| l.path.clone()).collect();
            let pb: std::collections::BTreeSet<_> = b.leaves.iter().map(|l| l.path.clone()).collect();
            assert_eq!(pa, pb);
        }
    }

    #[test]
    fn rectangles_are_closed_between_c_r_and_any_member() {
        let opts = YannakakisOptions::default();
        for g in [path(4), cycle(5), random_connected(6, 11)] {
            let t = build_tree(&g).unwrap();
            for leaf in &t.leaves {
                let cr = VertexSet::from_slice(&leaf.c_r);
                assert!(rectangle_contains_clique(&g, leaf, cr, opts).unwrap());
                assert!(rectangle_contains_stable_set(&g, leaf, VertexSet::from_slice(&leaf.s_r), opts).unwrap());
            }
            for c in g.cliques(None, true) {
                for s in g.stable_sets() {
                    let tr = run_protocol(&g, c, s, opts);
                    let leaf = t.leaves.iter().find(|l| l.path == leaf_path(&tr)).unwrap();
                    let cr = VertexSet::from_slice(&leaf.c_r);
                    assert!(cr.is_subset(c));
                    for mid in g.cliques(None, true).into_iter().filter(|m| cr.is_subset(*m) && m.is_subset(c)) {
                        assert!(rectangle_contains_clique(&g, leaf, mid, opts).unwrap());
                    }
                }
            }
        }
        let g = path(3);
        let t = build_tree(&g).unwrap();
        assert!(rectangle_contains_clique(&g, &t.leaves[0], VertexSet::from_slice(&[0, 2]), opts).is_err());
    }
}
