//! Small simple graphs and posets on at most 64 vertices.
//!
//! Vertex order is part of a graph's identity: every enumeration below is
//! deterministic and follows it.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::VarName;

/// A set of vertex indices `< 64`, stored as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VertexSet(pub u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1u64 << v)
    }

    pub fn from_slice(vs: &[usize]) -> Self {
        vs.iter().fold(Self::EMPTY, |s, &v| s.with(v))
    }

    pub fn contains(self, v: usize) -> bool {
        v < 64 && self.0 >> v & 1 == 1
    }

    pub fn with(self, v: usize) -> Self {
        VertexSet(self.0 | 1u64 << v)
    }

    pub fn without(self, v: usize) -> Self {
        VertexSet(self.0 & !(1u64 << v))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: Self) -> Self {
        VertexSet(self.0 | o.0)
    }

    pub fn inter(self, o: Self) -> Self {
        VertexSet(self.0 & o.0)
    }

    pub fn minus(self, o: Self) -> Self {
        VertexSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(v)
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Sort key for "by size, then lexicographic in vertex order".
    pub fn size_lex_key(self) -> (usize, Vec<usize>) {
        (self.len(), self.to_vec())
    }
}

/// Serialised as the sorted list of its members.
impl Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    names: Vec<String>,
    adj: Vec<VertexSet>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
}

impl Graph {
    /// Graph on `0..n` with default names `v1..vn`.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let names = (1..=n).map(|i| format!("v{i}")).collect();
        Self::with_names(names, edges)
    }

    pub fn with_names(names: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        if n > 64 {
            return Err(Error::TooManyVertices(n));
        }
        let mut seen = std::collections::HashSet::new();
        for s in &names {
            VarName::new(s)?;
            if !seen.insert(s) {
                return Err(Error::DuplicateVariable(s.clone()));
            }
        }
        let mut adj = vec![VertexSet::EMPTY; n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Invalid(format!("edge ({a},{b}) out of range for n={n}")));
            }
            if a == b {
                return Err(Error::Invalid(format!("self-loop at {a}")));
            }
            adj[a] = adj[a].with(b);
            adj[b] = adj[b].with(a);
        }
        Ok(Graph { n, names, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn all(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn var(&self, v: usize) -> VarName {
        VarName::new(&self.names[v]).expect("names validated")
    }

    pub fn vars(&self) -> Vec<VarName> {
        (0..self.n).map(|v| self.var(v)).collect()
    }

    pub fn neighbors(&self, v: usize) -> VertexSet {
        self.adj[v]
    }

    /// `N+(v)`: the closed neighbourhood.
    pub fn closed_neighbors(&self, v: usize) -> VertexSet {
        self.adj[v].with(v)
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn degree_within(&self, v: usize, within: VertexSet) -> usize {
        self.adj[v].inter(within).len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for a in 0..self.n {
            for b in self.adj[a].iter().filter(|&b| b > a) {
                e.push((a, b));
            }
        }
        e
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|s| s.len()).sum::<usize>() / 2
    }

    pub fn complement(&self) -> Graph {
        let all = self.all();
        let adj = (0..self.n).map(|v| all.minus(self.adj[v]).without(v)).collect();
        Graph { n: self.n, names: self.names.clone(), adj }
    }

    /// Induced subgraph on `u`, relabelled `0..|u|` in inherited order.
    pub fn induced(&self, u: VertexSet) -> Graph {
        let keep = u.inter(self.all()).to_vec();
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            pos[v] = i;
        }
        let adj = keep
            .iter()
            .map(|&v| VertexSet::from_slice(&self.adj[v].inter(u).iter().map(|w| pos[w]).collect::<Vec<_>>()))
            .collect();
        Graph { n: keep.len(), names: keep.iter().map(|&v| self.names[v].clone()).collect(), adj }
    }

    /// The same graph with vertices listed in `order` (a permutation).
    pub fn permuted(&self, order: &[usize]) -> Result<Graph> {
        let mut seen = VertexSet::EMPTY;
        if order.len() != self.n {
            return Err(Error::Invalid("order is not a permutation".into()));
        }
        for &v in order {
            if v >= self.n || seen.contains(v) {
                return Err(Error::Invalid("order is not a permutation".into()));
            }
            seen = seen.with(v);
        }
        let mut pos = vec![0; self.n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let edges: Vec<(usize, usize)> = self.edges().into_iter().map(|(a, b)| (pos[a], pos[b])).collect();
        Graph::with_names(order.iter().map(|&v| self.names[v].clone()).collect(), &edges)
    }

    pub fn is_clique(&self, s: VertexSet) -> bool {
        s.iter().all(|v| s.without(v).is_subset(self.adj[v]))
    }

    pub fn is_stable(&self, s: VertexSet) -> bool {
        s.iter().all(|v| self.adj[v].inter(s).is_empty())
    }

    fn grow(&self, current: VertexSet, cand: VertexSet, clique: bool, max: usize, out: &mut Vec<VertexSet>) {
        out.push(current);
        if current.len() == max {
            return;
        }
        for v in cand.iter() {
            let below = if v == 63 { u64::MAX } else { (2u64 << v) - 1 };
            let rest = VertexSet(cand.0 & !below);
            let next = if clique { rest.inter(self.adj[v]) } else { rest.minus(self.adj[v]) };
            self.grow(current.with(v), next, clique, max, out);
        }
    }

    fn sets(&self, clique: bool, max_size: Option<usize>, include_empty: bool) -> Vec<VertexSet> {
        let mut out = Vec::new();
        self.grow(VertexSet::EMPTY, self.all(), clique, max_size.unwrap_or(self.n), &mut out);
        if !include_empty {
            out.retain(|s| !s.is_empty());
        }
        out.sort_by_key(|s| s.size_lex_key());
        out
    }

    /// All cliques, by size then lexicographically.
    pub fn cliques(&self, max_size: Option<usize>, include_empty: bool) -> Vec<VertexSet> {
        self.sets(true, max_size, include_empty)
    }

    /// All stable sets (the empty set included), by size then lexicographically.
    pub fn stable_sets(&self) -> Vec<VertexSet> {
        self.sets(false, None, true)
    }

    pub fn max_clique_size(&self) -> usize {
        self.cliques(None, true).iter().map(|c| c.len()).max().unwrap_or(0)
    }

    /// Low vertices have `2·deg ≤ |U|` within `u`; the rest are high.
    pub fn low_high_split(&self, u: VertexSet) -> (VertexSet, VertexSet) {
        let size = u.len();
        let mut low = VertexSet::EMPTY;
        for v in u.iter() {
            if 2 * self.degree_within(v, u) <= size {
                low = low.with(v);
            }
        }
        (low, u.minus(low))
    }

    /// First induced copy of `h` in lexicographic order of the image
    /// tuple; `witness[i]` is the vertex hosting `h`'s vertex `i`.
    pub fn find_induced(&self, h: &Graph) -> Option<Vec<usize>> {
        fn go(g: &Graph, h: &Graph, map: &mut Vec<usize>, used: VertexSet) -> bool {
            let i = map.len();
            if i == h.n {
                return true;
            }
            for v in g.all().minus(used).iter() {
                if (0..i).all(|j| h.adjacent(i, j) == g.adjacent(v, map[j])) {
                    map.push(v);
                    if go(g, h, map, used.with(v)) {
                        return true;
                    }
                    map.pop();
                }
            }
            false
        }
        let mut map = Vec::new();
        if go(self, h, &mut map, VertexSet::EMPTY) {
            Some(map)
        } else {
            None
        }
    }

    pub fn contains_induced(&self, h: &Graph) -> bool {
        self.find_induced(h).is_some()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = VertexSet::singleton(0);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let mut next = VertexSet::EMPTY;
            for v in frontier.iter() {
                next = next.union(self.adj[v]);
            }
            frontier = next.minus(seen);
            seen = seen.union(next);
        }
        seen == self.all()
    }

    pub fn is_bipartite(&self) -> bool {
        let mut color = vec![None; self.n];
        for s in 0..self.n {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(false);
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                let c = color[v].unwrap();
                for w in self.adj[v].iter() {
                    match color[w] {
                        None => {
                            color[w] = Some(!c);
                            stack.push(w);
                        }
                        Some(cw) if cw == c => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: GraphJson = serde_json::from_str(s)?;
        let edges: Vec<(usize, usize)> = j.edges.iter().map(|e| (e[0], e[1])).collect();
        match j.names {
            Some(names) => {
                if names.len() != j.n {
                    return Err(Error::Invalid("names length differs from n".into()));
                }
                Graph::with_names(names, &edges)
            }
            None => Graph::new(j.n, &edges),
        }
    }

    pub fn to_json(&self) -> String {
        let default = (0..self.n).all(|i| self.names[i] == format!("v{}", i + 1));
        let j = GraphJson {
            n: self.n,
            edges: self.edges().into_iter().map(|(a, b)| [a, b]).collect(),
            names: if default { None } else { Some(self.names.clone()) },
        };
        serde_json::to_string(&j).expect("graph serialises")
    }

    /// DIMACS-like edge list: `p edge n m` then `e u v` lines, 1-based.
    pub fn from_dimacs(s: &str) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        for line in s.lines() {
            let t: Vec<&str> = line.split_whitespace().collect();
            match t.first() {
                Some(&"p") if t.len() >= 3 => {
                    n = Some(t[2].parse::<usize>().map_err(|_| Error::Parse(line.into()))?);
                }
                Some(&"e") if t.len() >= 3 => {
                    let a: usize = t[1].parse().map_err(|_| Error::Parse(line.into()))?;
                    let b: usize = t[2].parse().map_err(|_| Error::Parse(line.into()))?;
                    if a == 0 || b == 0 {
                        return Err(Error::Parse(format!("vertices are 1-based: {line}")));
                    }
                    edges.push((a - 1, b - 1));
                }
                _ => {}
            }
        }
        let n = n.ok_or_else(|| Error::Parse("missing 'p edge n m' line".into()))?;
        Graph::new(n, &edges)
    }

    /// Loads JSON, falling back to the DIMACS-like format.
    pub fn load(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            Graph::from_json(s)
        } else {
            Graph::from_dimacs(s)
        }
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

pub mod families {
    //! Named graph families and seeded random graphs.
    use super::*;

    pub fn path(n: usize) -> Graph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::new(n, &e).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        let mut e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n >= 3 {
            e.push((n - 1, 0));
        }
        Graph::new(n, &e).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                e.push((a, b));
            }
        }
        Graph::new(n, &e).unwrap()
    }

    /// Centre is vertex 0.
    pub fn star(n: usize) -> Graph {
        let e: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Graph::new(n, &e).unwrap()
    }

    pub fn claw() -> Graph {
        star(4)
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..a {
            for j in 0..b {
                e.push((i, a + j));
            }
        }
        Graph::new(a + b, &e).unwrap()
    }

    /// `G(n, p)` from a seeded ChaCha8 stream.
    pub fn random(n: usize, p: f64, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_with(n, p, &mut rng)
    }

    pub fn random_with(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
        let mut e = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(p) {
                    e.push((a, b));
                }
            }
        }
        Graph::new(n, &e).unwrap()
    }

    /// First connected `G(n, 1/2)` sample from the seeded stream.
    pub fn random_connected(n: usize, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let g = random_with(n, 0.5, &mut rng);
            if g.is_connected() {
                return g;
            }
        }
    }

    /// Random bipartite graph on sides of sizes `a` and `n - a`.
    pub fn random_bipartite(n: usize, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = rng.gen_range(1..n.max(2));
        let mut e = Vec::new();
        for i in 0..a {
            for j in a..n {
                if rng.gen_bool(0.5) {
                    e.push((i, j));
                }
            }
        }
        Graph::new(n, &e).unwrap()
    }
}

/// A finite partial order, stored as its strict relation `<`.
#[derive(Clone, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    names: Vec<String>,
    // above[i] = { j : i < j }
    above: Vec<VertexSet>,
}

#[derive(Serialize, Deserialize)]
struct PosetJson {
    n: usize,
    relations: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
}

impl Poset {
    /// Transitive closure of `relations` (pairs `i < j`); cycles are errors.
    pub fn new(n: usize, relations: &[(usize, usize)]) -> Result<Self> {
        let names = (1..=n).map(|i| format!("v{i}")).collect();
        Self::with_names(names, relations)
    }

    pub fn with_names(names: Vec<String>, relations: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        if n > 64 {
            return Err(Error::TooManyVertices(n));
        }
        for s in &names {
            VarName::new(s)?;
        }
        let mut above = vec![VertexSet::EMPTY; n];
        for &(a, b) in relations {
            if a >= n || b >= n {
                return Err(Error::Invalid(format!("relation ({a},{b}) out of range")));
            }
            if a == b {
                return Err(Error::NotPartialOrder(format!("reflexive pair ({a},{a})")));
            }
            above[a] = above[a].with(b);
        }
        // Warshall closure
        for k in 0..n {
            for i in 0..n {
                if above[i].contains(k) {
                    above[i] = above[i].union(above[k]);
                }
            }
        }
        for i in 0..n {
            if above[i].contains(i) {
                return Err(Error::NotPartialOrder(format!("cycle through {i}")));
            }
        }
        Ok(Poset { n, names, above })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        self.above[a].contains(b)
    }

    pub fn above(&self, a: usize) -> VertexSet {
        self.above[a]
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.less(a, b) || self.less(b, a)
    }

    /// Strict pairs `(u, v)` with `u < v`, lexicographic.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut p = Vec::new();
        for u in 0..self.n {
            for v in self.above[u].iter() {
                p.push((u, v));
            }
        }
        p
    }

    pub fn comparability_graph(&self) -> Graph {
        Graph::with_names(self.names.clone(), &self.pairs()).expect("valid poset")
    }

    /// Elements of a chain listed bottom to top.
    pub fn sort_chain(&self, c: VertexSet) -> Vec<usize> {
        let mut v = c.to_vec();
        v.sort_by_key(|&x| std::cmp::Reverse(self.above[x].inter(c).len()));
        v
    }

    /// All nonempty chains, by size then lexicographically.
    pub fn chains(&self) -> Vec<VertexSet> {
        self.comparability_graph().cliques(None, false)
    }

    /// All antichains (the empty one included).
    pub fn antichains(&self) -> Vec<VertexSet> {
        self.comparability_graph().stable_sets()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: PosetJson = serde_json::from_str(s)?;
        let rel: Vec<(usize, usize)> = j.relations.iter().map(|e| (e[0], e[1])).collect();
        match j.names {
            Some(names) => {
                if names.len() != j.n {
                    return Err(Error::Invalid("names length differs from n".into()));
                }
                Poset::with_names(names, &rel)
            }
            None => Poset::new(j.n, &rel),
        }
    }

    pub fn to_json(&self) -> String {
        let j = PosetJson {
            n: self.n,
            relations: self.pairs().into_iter().map(|(a, b)| [a, b]).collect(),
            names: None,
        };
        serde_json::to_string(&j).expect("poset serialises")
    }

    /// Random order: a seeded DAG on `0..n` (edges go upwards) closed
    /// transitively.
    pub fn random(n: usize, p: f64, seed: u64) -> Poset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rel = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(p) {
                    rel.push((a, b));
                }
            }
        }
        Poset::new(n, &rel).expect("upward edges are acyclic")
    }
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poset(n={}, less={:?})", self.n, self.pairs())
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;

    #[test]
    fn cliques_of_p3_in_order() {
        let g = path(3);
        let c: Vec<Vec<usize>> = g.cliques(None, true).iter().map(|s| s.to_vec()).collect();
        assert_eq!(c, vec![vec![], vec![0], vec![1], vec![2], vec![0, 1], vec![1, 2]]);
        let s: Vec<Vec<usize>> = g.stable_sets().iter().map(|s| s.to_vec()).collect();
        assert_eq!(s, vec![vec![], vec![0], vec![1], vec![2], vec![0, 2]]);
    }

    #[test]
    fn low_high_split_of_star() {
        let g = star(4);
        let (low, high) = g.low_high_split(g.all());
        assert_eq!(low.to_vec(), vec![1, 2, 3]);
        assert_eq!(high.to_vec(), vec![0]);
    }

    #[test]
    fn induced_claw_witness() {
        let g = star(5);
        let w = g.find_induced(&claw()).unwrap();
        assert_eq!(w, vec![0, 1, 2, 3]);
        assert!(!cycle(5).contains_induced(&claw()));
    }

    #[test]
    fn dimacs_and_json_round_trip() {
        let g = Graph::from_dimacs("c x\np edge 3 2\ne 1 2\ne 2 3\n").unwrap();
        assert_eq!(g, path(3));
        assert_eq!(Graph::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn poset_closure_and_cycles() {
        let p = Poset::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(p.less(0, 2));
        assert_eq!(p.comparability_graph().num_edges(), 3);
        assert!(matches!(Poset::new(2, &[(0, 1), (1, 0)]), Err(Error::NotPartialOrder(_))));
        assert_eq!(p.sort_chain(VertexSet::from_slice(&[2, 0])), vec![0, 2]);
    }

    #[test]
    fn rejects_too_many_vertices() {
        assert!(matches!(Graph::new(65, &[]), Err(Error::TooManyVertices(65))));
    }
}
