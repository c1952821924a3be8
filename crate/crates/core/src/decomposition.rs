//! Decomposition trees: a node is an induced subgraph (possibly
//! complemented) that is a leaf, has its complement as single child, or is
//! split on pivots `v_1..v_k` into `V_i = N+(v_i) ∖ {v_1..v_{i-1}}` and
//! `V_0 = V ∖ {v_1..v_k}`. Compilation takes polars at complement nodes and
//! juxtaposes the children of a split.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formulation::{embed, juxtapose_tagged, polar_eta_unchecked, Formulation};
use crate::graph::{Graph, VertexSet};
use crate::linalg::LinearConstraint;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DecompKind {
    Leaf,
    Complement,
    /// Pivots in order; children are `V_1..V_k` then `V_0`, empty ones
    /// omitted.
    Split { pivots: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompNode {
    /// Vertices of the root graph.
    pub vertices: VertexSet,
    /// Whether this node's graph is the complement of the induced one.
    pub complemented: bool,
    pub kind: DecompKind,
    pub children: Vec<DecompNode>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DecompCensus {
    pub nodes: usize,
    pub leaves: usize,
    pub height: usize,
    pub max_leaf_size: usize,
    pub complement_nodes: usize,
}

impl DecompNode {
    fn leaf(vertices: VertexSet, complemented: bool) -> Self {
        DecompNode { vertices, complemented, kind: DecompKind::Leaf, children: Vec::new() }
    }

    /// The node's graph, on the root's names.
    pub fn graph(&self, root: &Graph) -> Graph {
        let h = root.induced(self.vertices);
        if self.complemented {
            h.complement()
        } else {
            h
        }
    }

    pub fn census(&self) -> DecompCensus {
        fn go(t: &DecompNode, d: usize, c: &mut DecompCensus) {
            c.nodes += 1;
            c.height = c.height.max(d);
            match t.kind {
                DecompKind::Leaf => {
                    c.leaves += 1;
                    c.max_leaf_size = c.max_leaf_size.max(t.vertices.len());
                }
                DecompKind::Complement => c.complement_nodes += 1,
                DecompKind::Split { .. } => {}
            }
            for ch in &t.children {
                go(ch, d + 1, c);
            }
        }
        let mut c = DecompCensus::default();
        go(self, 0, &mut c);
        c
    }

    pub fn leaves(&self) -> Vec<&DecompNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if t.kind == DecompKind::Leaf {
                out.push(t);
            }
            stack.extend(t.children.iter().rev());
        }
        out
    }

    /// Replaces every complement-of-complement chain by its grandchild.
    pub fn collapse_double_complements(self) -> DecompNode {
        let mut t = self;
        while t.kind == DecompKind::Complement && t.children[0].kind == DecompKind::Complement {
            let mut child = t.children.pop().unwrap();
            t = child.children.pop().unwrap();
        }
        t.children = t.children.into_iter().map(|c| c.collapse_double_complements()).collect();
        t
    }
}

fn nbhd(g: &Graph, complemented: bool, u: VertexSet, v: usize) -> VertexSet {
    if complemented {
        u.minus(g.closed_neighbors(v))
    } else {
        g.neighbors(v).inter(u)
    }
}

/// Vertex sets `[V_1, .., V_k, V_0]` of a split of `g[u]` (complemented if
/// asked) on `pivots`.
pub fn split_sets(g: &Graph, u: VertexSet, complemented: bool, pivots: &[usize]) -> Vec<VertexSet> {
    let mut out = Vec::with_capacity(pivots.len() + 1);
    let mut earlier = VertexSet::EMPTY;
    for &v in pivots {
        out.push(nbhd(g, complemented, u, v).with(v).minus(earlier));
        earlier = earlier.with(v);
    }
    out.push(u.minus(earlier));
    out
}

/// The graphs `(G_0, G_1, .., G_k)` of a split of `g` on `pivots`.
pub fn split(g: &Graph, pivots: &[usize]) -> Result<Vec<Graph>> {
    let mut seen = VertexSet::EMPTY;
    for &v in pivots {
        if v >= g.n() || seen.contains(v) {
            return Err(Error::Invalid("pivots must be distinct vertices".into()));
        }
        seen = seen.with(v);
    }
    let mut sets = split_sets(g, g.all(), false, pivots);
    let v0 = sets.pop().unwrap();
    let mut out = vec![g.induced(v0)];
    out.extend(sets.into_iter().map(|s| g.induced(s)));
    Ok(out)
}

fn split_node(u: VertexSet, complemented: bool, pivots: Vec<usize>, children: Vec<DecompNode>) -> DecompNode {
    DecompNode { vertices: u, complemented, kind: DecompKind::Split { pivots }, children }
}

/// Halving tree: leaves have at most `leaf_size` vertices; otherwise a
/// node splits on all its low-degree vertices when they are at least half,
/// and takes its complement when not.
pub fn build_general_tree(g: &Graph, leaf_size: usize) -> Result<DecompNode> {
    if leaf_size == 0 {
        return Err(Error::Invalid("leaf size must be at least 1".into()));
    }
    fn go(g: &Graph, u: VertexSet, comp: bool, c: usize) -> DecompNode {
        if u.len() <= c {
            return DecompNode::leaf(u, comp);
        }
        let low: Vec<usize> = u.iter().filter(|&v| 2 * nbhd(g, comp, u, v).len() <= u.len()).collect();
        // a universal low vertex (only possible on two vertices) would
        // reproduce the node; its complement splits instead
        let stuck = 2 * low.len() >= u.len() && split_sets(g, u, comp, &low).contains(&u);
        if 2 * low.len() < u.len() || stuck {
            return DecompNode {
                vertices: u,
                complemented: comp,
                kind: DecompKind::Complement,
                children: vec![go(g, u, !comp, c)],
            };
        }
        let children = split_sets(g, u, comp, &low)
            .into_iter()
            .filter(|s| !s.is_empty())
            .map(|s| go(g, s, comp, c))
            .collect();
        split_node(u, comp, low, children)
    }
    Ok(go(g, g.all(), false, leaf_size).collapse_double_complements())
}

/// `{x >= 0, x(C) <= 1 for every maximal clique C}` of `h`.
pub fn qstab_formulation(h: &Graph) -> Formulation {
    let vars = h.vars();
    let mut ineq: Vec<LinearConstraint> =
        vars.iter().map(|v| LinearConstraint::le([(v.clone(), -Rational::one())], Rational::zero())).collect();
    for c in h.cliques(None, false) {
        let maximal = h.all().minus(c).iter().all(|v| !c.is_subset(h.neighbors(v)));
        if maximal {
            ineq.push(LinearConstraint::le(c.iter().map(|v| (h.var(v), Rational::one())), Rational::one()));
        }
    }
    Formulation::new(vars, Vec::new(), ineq, Vec::new()).expect("valid clique formulation")
}

/// Compiles with the clique formulation at every leaf.
pub fn compile_decomposition(g: &Graph, tree: &DecompNode) -> Result<Formulation> {
    compile_decomposition_with(g, tree, &mut |h: &Graph, _: &DecompNode| Ok(qstab_formulation(h)))
}

/// Compiles with caller-supplied leaf formulations (over the leaf graph's
/// variables).
pub fn compile_decomposition_with(
    g: &Graph,
    tree: &DecompNode,
    leaf: &mut dyn FnMut(&Graph, &DecompNode) -> Result<Formulation>,
) -> Result<Formulation> {
    let h = tree.graph(g);
    match &tree.kind {
        DecompKind::Leaf => {
            let f = leaf(&h, tree)?;
            let want: std::collections::BTreeSet<_> = h.vars().into_iter().collect();
            if f.original_vars.iter().cloned().collect::<std::collections::BTreeSet<_>>() != want {
                return Err(Error::MismatchedSpaces);
            }
            Ok(f)
        }
        DecompKind::Complement => {
            let child = tree
                .children
                .first()
                .ok_or_else(|| Error::EmptySubtree("complement node without child".into()))?;
            let inner = compile_decomposition_with(g, child, leaf)?;
            Ok(polar_eta_unchecked(&inner, &Rational::one(), "eta"))
        }
        DecompKind::Split { .. } => {
            if tree.children.is_empty() {
                return Err(Error::EmptySubtree("split node without children".into()));
            }
            let vars = h.vars();
            let mut parts = Vec::with_capacity(tree.children.len());
            for c in &tree.children {
                parts.push(embed(&compile_decomposition_with(g, c, leaf)?, &vars)?);
            }
            let tags: Vec<String> = (0..parts.len()).map(|i| format!("c{i}")).collect();
            let refs: Vec<(&str, &Formulation)> = tags.iter().map(|t| t.as_str()).zip(parts.iter()).collect();
            juxtapose_tagged(&refs)
        }
    }
}

pub fn build_direct(g: &Graph, leaf_size: usize) -> Result<(Formulation, DecompNode)> {
    let t = build_general_tree(g, leaf_size)?;
    Ok((compile_decomposition(g, &t)?, t))
}

/// An ordering of `h` in which each vertex is complete or anticomplete to
/// all later ones; `None` if `h` is not a threshold graph.
pub fn threshold_order(h: &Graph) -> Option<Vec<usize>> {
    let mut rest = h.all();
    let mut order = Vec::with_capacity(h.n());
    while !rest.is_empty() {
        let v = rest.iter().find(|&v| {
            let nb = h.neighbors(v).inter(rest);
            nb.is_empty() || nb == rest.without(v)
        })?;
        order.push(v);
        rest = rest.without(v);
    }
    Some(order)
}

fn is_threshold_order(h: &Graph, order: &[usize]) -> bool {
    let mut seen = VertexSet::EMPTY;
    for &v in order {
        if v >= h.n() || seen.contains(v) {
            return false;
        }
        seen = seen.with(v);
    }
    if seen != h.all() {
        return false;
    }
    (0..order.len()).all(|i| {
        let later = VertexSet::from_slice(&order[i + 1..]);
        let nb = h.neighbors(order[i]).inter(later);
        nb.is_empty() || nb == later
    })
}

/// Splits a threshold graph down to singletons: an isolated vertex is
/// split off, a universal one is made isolated by complementing.
fn peel(g: &Graph, u: VertexSet, comp: bool) -> Option<DecompNode> {
    if u.len() <= 1 {
        return Some(DecompNode::leaf(u, comp));
    }
    if let Some(v) = u.iter().find(|&v| nbhd(g, comp, u, v).is_empty()) {
        let rest = u.without(v);
        let children = vec![DecompNode::leaf(VertexSet::singleton(v), comp), peel(g, rest, comp)?];
        return Some(split_node(u, comp, vec![v], children));
    }
    if u.iter().any(|v| nbhd(g, comp, u, v) == u.without(v)) {
        return Some(DecompNode {
            vertices: u,
            complemented: comp,
            kind: DecompKind::Complement,
            children: vec![peel(g, u, !comp)?],
        });
    }
    None
}

/// Tree with singleton leaves for an `h`-free graph `g`, where `h` is a
/// threshold graph on `t >= 2` vertices with ordering `order` (computed if
/// `None`).
///
/// Level `i < t` splits on every fresh vertex, after complementing when
/// `u_i` is anticomplete to the later vertices of `h`. Pivots stay in the
/// child they open and are never pivots again; the vertices left over are
/// former pivots, which induce a threshold graph and are peeled off. A
/// fresh vertex surviving `t - 1` levels closes an induced copy of `h`,
/// which is returned as the error witness. That only catches copies of `h`
/// the recursion happens to walk into, so `g` is searched for one first.
pub fn build_threshold_tree(g: &Graph, h: &Graph, order: Option<&[usize]>) -> Result<DecompNode> {
    let order: Vec<usize> = match order {
        Some(o) if is_threshold_order(h, o) => o.to_vec(),
        Some(_) => return Err(Error::Invalid("ordering does not witness a threshold graph".into())),
        None => threshold_order(h).ok_or_else(|| Error::Invalid("pattern is not a threshold graph".into()))?,
    };
    let t = h.n();
    if t < 2 {
        return Err(Error::Invalid("pattern needs at least two vertices".into()));
    }
    if let Some(witness) = g.find_induced(h) {
        return Err(Error::ForbiddenPattern { witness });
    }
    // complete[i]: u_i is complete to u_{i+1..t}
    let complete: Vec<bool> =
        (0..t).map(|i| order[i + 1..].iter().all(|&w| h.adjacent(order[i], w))).collect();

    struct Ctx<'a> {
        g: &'a Graph,
        complete: Vec<bool>,
        order: Vec<usize>,
        t: usize,
    }

    fn go(cx: &Ctx, u: VertexSet, fresh: VertexSet, level: usize, chain: &mut Vec<usize>) -> Result<DecompNode> {
        let g = cx.g;
        if u.len() <= 1 {
            return Ok(DecompNode::leaf(u, false));
        }
        if fresh.is_empty() {
            return peel(g, u, false).ok_or_else(|| Error::Invalid("former pivots do not induce a threshold graph".into()));
        }
        if level + 1 == cx.t {
            let mut image = chain.clone();
            image.push(fresh.first().unwrap());
            let mut witness = vec![0; cx.t];
            for (i, &u_i) in cx.order.iter().enumerate() {
                witness[u_i] = image[i];
            }
            return Err(Error::ForbiddenPattern { witness });
        }
        let comp = !cx.complete[level];
        let pivots = fresh.to_vec();
        let sets = split_sets(g, u, comp, &pivots);
        let mut children = Vec::new();
        for (k, s) in sets.iter().enumerate() {
            if s.is_empty() {
                continue;
            }
            if k < pivots.len() {
                let p = pivots[k];
                chain.push(p);
                let child_fresh = s.inter(fresh).without(p);
                let sub = go(cx, *s, child_fresh, level + 1, chain)?;
                chain.pop();
                children.push(wrap(sub, comp));
            } else {
                children.push(
                    peel(g, *s, comp)
                        .ok_or_else(|| Error::Invalid("former pivots do not induce a threshold graph".into()))?,
                );
            }
        }
        let node = split_node(u, comp, pivots, children);
        Ok(if comp {
            DecompNode { vertices: u, complemented: false, kind: DecompKind::Complement, children: vec![node] }
        } else {
            node
        })
    }

    // Children of a complemented split are built on the uncomplemented
    // graph; put them back under the split's parity.
    fn wrap(t: DecompNode, comp: bool) -> DecompNode {
        if t.complemented == comp {
            return t;
        }
        let u = t.vertices;
        DecompNode { vertices: u, complemented: comp, kind: DecompKind::Complement, children: vec![t] }
    }

    let cx = Ctx { g, complete, order, t };
    let tree = go(&cx, g.all(), g.all(), 0, &mut Vec::new())?;
    Ok(tree.collapse_double_complements())
}

pub fn build_threshold(g: &Graph, h: &Graph, order: Option<&[usize]>) -> Result<(Formulation, DecompNode)> {
    let t = build_threshold_tree(g, h, order)?;
    Ok((compile_decomposition(g, &t)?, t))
}
