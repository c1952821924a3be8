//! From a partition of a slack matrix into monochromatic rectangles to a
//! deterministic protocol tree, and from there to a formulation.
//!
//! In every stage Alice (holding row `r`) names a live rectangle through
//! `r` that meets at most half of the live rectangles horizontally, or says
//! `none`; Bob answers `in` if his column lies in it, which ends the
//! protocol. On `out` only the rectangles sharing a row with it survive.
//! After `none`, only the rectangles of high horizontal degree survive and
//! Bob names one through `c` of low vertical degree, mirrored. Every stage
//! halves the live set and never drops the rectangle containing `(r, c)`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulation::Formulation;
use crate::pair::PolytopePair;
use crate::protocol::{compile, ProtocolTree, Sender};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rectangle {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectanglePartition {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub rectangles: Vec<Rectangle>,
}

impl RectanglePartition {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("partition serialises")
    }

    pub fn len(&self) -> usize {
        self.rectangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rectangles.is_empty()
    }
}

/// Index form of a partition, checked for disjointness and coverage.
#[derive(Clone, Debug)]
struct Indexed {
    rows: Vec<HashSet<usize>>,
    cols: Vec<HashSet<usize>>,
    /// `owner[r][c]`: the rectangle containing entry `(r, c)`.
    owner: Vec<Vec<usize>>,
}

fn index_ids(ids: &[String], what: &str) -> Result<HashMap<String, usize>> {
    let mut m = HashMap::new();
    for (k, id) in ids.iter().enumerate() {
        if m.insert(id.clone(), k).is_some() {
            return Err(Error::InvalidPartition(format!("duplicate {what} id {id}")));
        }
    }
    Ok(m)
}

fn indexed(p: &RectanglePartition) -> Result<Indexed> {
    let ri = index_ids(&p.rows, "row")?;
    let ci = index_ids(&p.cols, "column")?;
    let mut owner = vec![vec![usize::MAX; p.cols.len()]; p.rows.len()];
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    for (k, rect) in p.rectangles.iter().enumerate() {
        if rect.value.is_negative() {
            return Err(Error::NegativeValue(rect.value.to_string()));
        }
        let rs = rect
            .rows
            .iter()
            .map(|id| ri.get(id).copied().ok_or_else(|| Error::UnknownRow(id.clone())))
            .collect::<Result<HashSet<_>>>()?;
        let cs = rect
            .cols
            .iter()
            .map(|id| ci.get(id).copied().ok_or_else(|| Error::InvalidPartition(format!("unknown column {id}"))))
            .collect::<Result<HashSet<_>>>()?;
        if rs.is_empty() || cs.is_empty() {
            return Err(Error::InvalidPartition(format!("rectangle {k} is empty")));
        }
        for &r in &rs {
            for &c in &cs {
                if owner[r][c] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "overlap: rectangles {} and {k} both contain ({}, {})",
                        owner[r][c], p.rows[r], p.cols[c]
                    )));
                }
                owner[r][c] = k;
            }
        }
        rows.push(rs);
        cols.push(cs);
    }
    for (r, line) in owner.iter().enumerate() {
        if let Some(c) = line.iter().position(|&o| o == usize::MAX) {
            return Err(Error::InvalidPartition(format!("gap: entry ({}, {}) is uncovered", p.rows[r], p.cols[c])));
        }
    }
    Ok(Indexed { rows, cols, owner })
}

/// `horizontal[i]`: rectangles sharing a row with `R_i`; `vertical[i]`:
/// those sharing a column.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionGraphs {
    pub horizontal: Vec<BTreeSet<usize>>,
    pub vertical: Vec<BTreeSet<usize>>,
}

impl IntersectionGraphs {
    fn of(ix: &Indexed) -> Result<Self> {
        let t = ix.rows.len();
        let mut horizontal = vec![BTreeSet::new(); t];
        let mut vertical = vec![BTreeSet::new(); t];
        for i in 0..t {
            for j in i + 1..t {
                let h = !ix.rows[i].is_disjoint(&ix.rows[j]);
                let v = !ix.cols[i].is_disjoint(&ix.cols[j]);
                if h && v {
                    return Err(Error::InvalidPartition(format!("rectangles {i} and {j} meet in both directions")));
                }
                if h {
                    horizontal[i].insert(j);
                    horizontal[j].insert(i);
                }
                if v {
                    vertical[i].insert(j);
                    vertical[j].insert(i);
                }
            }
        }
        Ok(IntersectionGraphs { horizontal, vertical })
    }

    fn degree(adj: &BTreeSet<usize>, live: &BTreeSet<usize>) -> usize {
        adj.intersection(live).count()
    }
}

pub fn intersection_graphs(p: &RectanglePartition) -> Result<IntersectionGraphs> {
    IntersectionGraphs::of(&indexed(p)?)
}

/// Recomputes the graphs and rejects supplied ones that differ.
pub fn check_intersection_graphs(p: &RectanglePartition, supplied: &IntersectionGraphs) -> Result<()> {
    if &intersection_graphs(p)? != supplied {
        return Err(Error::InvalidPartition("supplied intersection graphs differ from the partition".into()));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnambiguousOptions {
    /// Keep only nodes that some matrix entry reaches.
    pub prune: bool,
    /// Node limit for the unpruned construction.
    pub max_nodes: usize,
}

impl Default for UnambiguousOptions {
    fn default() -> Self {
        UnambiguousOptions { prune: true, max_nodes: 200_000 }
    }
}

/// The protocol run on one entry.
#[derive(Clone, Debug)]
pub struct EntryTrace {
    pub row: usize,
    pub col: usize,
    pub path: Vec<String>,
    /// Live-set size at the start of each stage, then at the leaf.
    pub live_sizes: Vec<usize>,
    pub rectangle: usize,
}

fn rtag(k: usize) -> String {
    format!("R{k}")
}

fn low(adj: &[BTreeSet<usize>], k: usize, live: &BTreeSet<usize>) -> bool {
    2 * IntersectionGraphs::degree(&adj[k], live) <= live.len()
}

fn high_set(ig: &IntersectionGraphs, live: &BTreeSet<usize>) -> BTreeSet<usize> {
    live.iter().copied().filter(|&k| !low(&ig.horizontal, k, live)).collect()
}

fn replay(ix: &Indexed, ig: &IntersectionGraphs, r: usize, c: usize) -> Result<EntryTrace> {
    let target = ix.owner[r][c];
    let mut live: BTreeSet<usize> = (0..ix.rows.len()).collect();
    let mut t = EntryTrace { row: r, col: c, path: Vec::new(), live_sizes: Vec::new(), rectangle: target };
    loop {
        if !live.contains(&target) {
            return Err(Error::ProtocolStuck(format!("rectangle {target} dropped on entry ({r}, {c})")));
        }
        t.live_sizes.push(live.len());
        if live.len() == 1 {
            return Ok(t);
        }
        let alice = live.iter().copied().find(|&k| ix.rows[k].contains(&r) && low(&ig.horizontal, k, &live));
        if let Some(k) = alice {
            t.path.push(rtag(k));
            if ix.cols[k].contains(&c) {
                t.path.push("in".into());
                t.live_sizes.push(1);
                return Ok(t);
            }
            t.path.push("out".into());
            live = ig.horizontal[k].intersection(&live).copied().collect();
            continue;
        }
        t.path.push("none".into());
        let high = high_set(ig, &live);
        let bob = high.iter().copied().find(|&k| ix.cols[k].contains(&c) && low(&ig.vertical, k, &live));
        let Some(k) = bob else {
            return Err(Error::ProtocolStuck(format!("no rectangle to send on entry ({r}, {c})")));
        };
        t.path.push(rtag(k));
        if ix.rows[k].contains(&r) {
            t.path.push("in".into());
            t.live_sizes.push(1);
            return Ok(t);
        }
        t.path.push("out".into());
        live = ig.vertical[k].intersection(&high).copied().collect();
    }
}

/// Runs the protocol on every entry of the matrix.
pub fn replay_all(p: &RectanglePartition) -> Result<Vec<EntryTrace>> {
    let ix = indexed(p)?;
    let ig = IntersectionGraphs::of(&ix)?;
    let mut out = Vec::with_capacity(p.rows.len() * p.cols.len());
    for r in 0..p.rows.len() {
        for c in 0..p.cols.len() {
            out.push(replay(&ix, &ig, r, c)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct UnambiguousTree {
    pub tree: ProtocolTree,
    /// For each leaf path, the live-set sizes along it and the rectangle.
    pub leaves: Vec<(Vec<String>, Vec<usize>, usize)>,
}

impl UnambiguousTree {
    /// Whether every stage at least halves the live set.
    pub fn halves(&self) -> bool {
        self.leaves.iter().all(|(_, sizes, _)| sizes.windows(2).all(|w| 2 * w[1] <= w[0]))
    }

    pub fn max_stages(&self) -> usize {
        self.leaves.iter().map(|(_, s, _)| s.len().saturating_sub(1)).max().unwrap_or(0)
    }
}

fn leaf_for(p: &RectanglePartition, k: usize) -> ProtocolTree {
    let rect = &p.rectangles[k];
    let mut leaf = ProtocolTree::leaf(Some(rect.value.clone()), None);
    leaf.rows = Some(rect.rows.clone());
    leaf
}

fn reply(sender: Sender, inside: ProtocolTree, outside: Option<ProtocolTree>) -> ProtocolTree {
    let mut ch = IndexMap::new();
    ch.insert("in".to_string(), inside);
    if let Some(o) = outside {
        ch.insert("out".to_string(), o);
    }
    ProtocolTree::node(sender, ch)
}

struct Expander<'a> {
    p: &'a RectanglePartition,
    ig: &'a IntersectionGraphs,
    nodes: usize,
    cap: usize,
    leaves: Vec<(Vec<String>, Vec<usize>, usize)>,
}

impl Expander<'_> {
    fn bump(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::Invalid(format!("protocol tree exceeds {} nodes", self.cap)));
        }
        Ok(())
    }

    fn stage(&mut self, live: &BTreeSet<usize>, path: &mut Vec<String>, sizes: &mut Vec<usize>) -> Result<Option<ProtocolTree>> {
        self.bump()?;
        sizes.push(live.len());
        let res = self.stage_inner(live, path, sizes);
        sizes.pop();
        res
    }

    fn leaf(&mut self, k: usize, path: &[String], sizes: &[usize]) -> ProtocolTree {
        let mut s = sizes.to_vec();
        s.push(1);
        self.leaves.push((path.to_vec(), s, k));
        leaf_for(self.p, k)
    }

    fn stage_inner(&mut self, live: &BTreeSet<usize>, path: &mut Vec<String>, sizes: &mut Vec<usize>) -> Result<Option<ProtocolTree>> {
        if live.len() == 1 {
            let k = *live.iter().next().unwrap();
            self.leaves.push((path.clone(), sizes.clone(), k));
            return Ok(Some(leaf_for(self.p, k)));
        }
        let ig = self.ig;
        let mut ch = IndexMap::new();
        for &k in live.iter().filter(|&&k| low(&ig.horizontal, k, live)) {
            path.push(rtag(k));
            path.push("in".into());
            let inside = self.leaf(k, path, sizes);
            path.pop();
            path.push("out".into());
            let rest: BTreeSet<usize> = ig.horizontal[k].intersection(live).copied().collect();
            let outside = if rest.is_empty() { None } else { self.stage(&rest, path, sizes)? };
            path.pop();
            path.pop();
            ch.insert(rtag(k), reply(Sender::Bob, inside, outside));
        }
        let high = high_set(ig, live);
        if !high.is_empty() {
            path.push("none".into());
            let mut bob = IndexMap::new();
            for &k in high.iter().filter(|&&k| low(&ig.vertical, k, live)) {
                path.push(rtag(k));
                path.push("in".into());
                let inside = self.leaf(k, path, sizes);
                path.pop();
                path.push("out".into());
                let rest: BTreeSet<usize> = ig.vertical[k].intersection(&high).copied().collect();
                let outside = if rest.is_empty() { None } else { self.stage(&rest, path, sizes)? };
                path.pop();
                path.pop();
                bob.insert(rtag(k), reply(Sender::Alice, inside, outside));
            }
            path.pop();
            if !bob.is_empty() {
                ch.insert("none".into(), ProtocolTree::node(Sender::Bob, bob));
            }
        }
        if ch.is_empty() {
            return Err(Error::ProtocolStuck(format!("no rectangle can be sent at /{}", path.join("/"))));
        }
        Ok(Some(ProtocolTree::node(Sender::Alice, ch)))
    }
}

fn insert_path(root: &mut ProtocolTree, path: &[String], p: &RectanglePartition, k: usize) {
    // Stage and reply nodes alternate: after R{k} the other party replies,
    // after `none` Bob speaks.
    let mut node = root;
    let mut speaker = Sender::Alice;
    for (i, tag) in path.iter().enumerate() {
        if node.is_leaf() {
            node.sender = speaker;
        }
        speaker = match (node.sender, tag.as_str()) {
            (_, "in") | (_, "out") => Sender::Alice,
            (_, "none") => Sender::Bob,
            (s, _) => if s == Sender::Alice { Sender::Bob } else { Sender::Alice },
        };
        let last = i + 1 == path.len();
        node = node.children.entry(tag.clone()).or_insert_with(|| ProtocolTree::leaf(None, None));
        if last {
            *node = leaf_for(p, k);
        }
    }
}

pub fn build_unambiguous_tree(p: &RectanglePartition, opts: UnambiguousOptions) -> Result<UnambiguousTree> {
    let ix = indexed(p)?;
    let ig = IntersectionGraphs::of(&ix)?;
    if opts.prune {
        let mut root = ProtocolTree::leaf(None, None);
        let mut leaves: BTreeMap<Vec<String>, (Vec<usize>, usize)> = BTreeMap::new();
        for r in 0..p.rows.len() {
            for c in 0..p.cols.len() {
                let t = replay(&ix, &ig, r, c)?;
                leaves.entry(t.path.clone()).or_insert((t.live_sizes, t.rectangle));
            }
        }
        if leaves.len() == 1 && leaves.keys().next().unwrap().is_empty() {
            let (sizes, k) = leaves.into_iter().next().unwrap().1;
            return Ok(UnambiguousTree { tree: leaf_for(p, k), leaves: vec![(Vec::new(), sizes, k)] });
        }
        let mut out = Vec::new();
        for (path, (sizes, k)) in leaves {
            insert_path(&mut root, &path, p, k);
            out.push((path, sizes, k));
        }
        return Ok(UnambiguousTree { tree: root, leaves: out });
    }
    let mut ex = Expander { p, ig: &ig, nodes: 0, cap: opts.max_nodes, leaves: Vec::new() };
    let all: BTreeSet<usize> = (0..p.len()).collect();
    if all.is_empty() {
        return Err(Error::InvalidPartition("no rectangles".into()));
    }
    let tree = ex.stage(&all, &mut Vec::new(), &mut Vec::new())?.expect("nonempty live set");
    Ok(UnambiguousTree { tree, leaves: ex.leaves })
}

/// Compiles the protocol tree of `partition` with the exact rectangle
/// formulation of `pair` at every leaf.
pub fn compile_unambiguous(
    pair: &PolytopePair,
    partition: &RectanglePartition,
    opts: UnambiguousOptions,
) -> Result<(Formulation, UnambiguousTree)> {
    if partition.rows != pair.row_ids || partition.cols != pair.col_ids {
        return Err(Error::MismatchedSpaces);
    }
    let mut t = build_unambiguous_tree(partition, opts)?;
    t.tree.resolve_leaves(pair)?;
    Ok((compile(&t.tree)?, t))
}
