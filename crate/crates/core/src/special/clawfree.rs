//! Formulations for `K_{1,t}`-free graphs from the clique/stable-set
//! protocol: Alice names the first vertex `v` of her clique, Bob answers
//! with `N(v) ∩ S` (or with 0 when `v ∈ S`).

use crate::error::{Error, Result};
use crate::formulation::Formulation;
use crate::graph::{families, Graph, VertexSet};
use crate::linalg::{LinearConstraint, VarName};
use crate::pair::set_label;
use crate::rational::{int, Rational};

/// The 1-rectangle `(v, U)`: `U ⊆ N(v)` stable with `|U| ≤ t - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClawRect {
    pub v: usize,
    pub u: VertexSet,
}

impl ClawRect {
    /// `y/v:{…}`
    pub fn var(&self, g: &Graph) -> VarName {
        VarName::new(&format!("{}:{}", g.names()[self.v], set_label(g, self.u)))
            .expect("plain name")
            .prefixed("y")
    }

    /// Whether this rectangle is in the selector of clique `c`.
    pub fn selected_by(&self, c: VertexSet) -> bool {
        c.first() == Some(self.v) && c.inter(self.u).is_empty()
    }
}

/// All rectangles, by vertex and then by `U` in size-lexicographic order.
/// Fails with the induced `K_{1,t}` (centre first) when there is one.
pub fn clawfree_rectangles(g: &Graph, t: usize) -> Result<Vec<ClawRect>> {
    if t == 0 {
        return Err(Error::Invalid("t must be positive".into()));
    }
    if let Some(witness) = g.find_induced(&families::star(t + 1)) {
        return Err(Error::ForbiddenPattern { witness });
    }
    let mut out = Vec::new();
    for v in 0..g.n() {
        let nb = g.neighbors(v);
        let local = g.induced(nb);
        let back = nb.to_vec();
        for s in local.stable_sets() {
            if s.len() < t {
                let u = VertexSet::from_slice(&s.iter().map(|i| back[i]).collect::<Vec<_>>());
                out.push(ClawRect { v, u });
            }
        }
    }
    Ok(out)
}

fn clique_row(g: &Graph, rects: &[ClawRect], c: VertexSet) -> LinearConstraint {
    let mut coeffs: Vec<(VarName, Rational)> = c.iter().map(|v| (g.var(v), Rational::one())).collect();
    coeffs.extend(rects.iter().filter(|r| r.selected_by(c)).map(|r| (r.var(g), Rational::one())));
    LinearConstraint::eq(coeffs, Rational::one())
}

fn build(g: &Graph, t: usize, max_clique: Option<usize>) -> Result<Formulation> {
    let rects = clawfree_rectangles(g, t)?;
    let ys: Vec<VarName> = rects.iter().map(|r| r.var(g)).collect();
    let eqs = g.cliques(max_clique, false).into_iter().map(|c| clique_row(g, &rects, c)).collect();
    let ineq = g
        .vars()
        .into_iter()
        .chain(ys.iter().cloned())
        .map(|v| LinearConstraint::le([(v, -Rational::one())], Rational::zero()))
        .collect();
    Formulation::new(g.vars(), ys, ineq, eqs)
}

/// One equation per nonempty clique.
pub fn clawfree_full_ef(g: &Graph, t: usize) -> Result<Formulation> {
    build(g, t, None)
}

/// Equations for vertices and edges only: `n + |E|` of them.
pub fn clawfree_reduced_ef(g: &Graph, t: usize) -> Result<Formulation> {
    build(g, t, Some(2))
}

/// For every clique `C` with `k ≥ 3` and first vertex `v`: the sum of the
/// edge rows `{v, u}`, `u ∈ C - v`, minus `k - 2` times the row of `v`
/// equals the row of `C`. Returns the cliques where it does not.
pub fn clawfree_derivation_check(g: &Graph, t: usize) -> Result<Vec<VertexSet>> {
    let rects = clawfree_rectangles(g, t)?;
    let mut bad = Vec::new();
    for c in g.cliques(None, false) {
        let k = c.len();
        if k < 3 {
            continue;
        }
        let v = c.first().expect("nonempty");
        let mut acc: std::collections::BTreeMap<VarName, Rational> = Default::default();
        let mut rhs = Rational::zero();
        let mut add = |row: &LinearConstraint, w: &Rational| {
            for (x, a) in &row.coeffs {
                *acc.entry(x.clone()).or_insert_with(Rational::zero) += &(a * w);
            }
            rhs += &(&row.rhs * w);
        };
        for u in c.without(v).iter() {
            add(&clique_row(g, &rects, VertexSet::from_slice(&[v, u])), &Rational::one());
        }
        add(&clique_row(g, &rects, VertexSet::singleton(v)), &-int(k as i64 - 2));
        acc.retain(|_, a| !a.is_zero());
        let want = clique_row(g, &rects, c);
        if acc != want.coeffs || rhs != want.rhs {
            bad.push(c);
        }
    }
    Ok(bad)
}
