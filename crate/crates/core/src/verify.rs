//! Exact certificates: sandwich checks against `(STAB(G), QSTAB(G))`,
//! projection comparison, Fourier–Motzkin elimination, vertex enumeration
//! and brute-force optimisation oracles.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formulation::Formulation;
use crate::graph::{Graph, Poset, VertexSet};
use crate::linalg::{LinearConstraint, LinearSystem, Point, Relation, VarName};
use crate::lp::{LpModel, LpResult, LpSession, LpStatus, Sense};
use crate::pair::{set_label, PolytopePair};
use crate::rational::Rational;
use crate::unambiguous::RectanglePartition;

#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub passed: bool,
    pub stable_sets_checked: usize,
    pub cliques_checked: usize,
    /// Stable sets whose incidence vector is not in the projection.
    pub missing_stable_sets: Vec<String>,
    /// Cliques `C` with `max x(C) > 1`, with the maximum (`"unbounded"` if so).
    pub violated_cliques: Vec<(String, String)>,
    /// Vertices `v` with `min x_v < 0`.
    pub negative_coordinates: Vec<(String, String)>,
    pub empty: bool,
    pub millis: u128,
}

fn session_of(f: &Formulation) -> Result<(LpModel, Option<LpSession>)> {
    let m = f.lp_model()?;
    let s = m.session();
    Ok((m, s))
}

fn show(r: &LpResult) -> String {
    match r.status {
        LpStatus::Optimal => r.value.as_ref().unwrap().to_string(),
        LpStatus::Unbounded => "unbounded".into(),
        LpStatus::Infeasible => "infeasible".into(),
    }
}

/// Certifies `STAB(G) ⊆ π(F) ⊆ QSTAB(G)` with exact LPs: every clique has
/// `max x(C) <= 1`, every coordinate has `min x_v >= 0`, and every stable
/// set's incidence vector lies in the projection.
///
/// When the outer inclusion holds, `χ^S ∈ π(F)` iff the maximum of
/// `x(S) - x(V∖S)` equals `|S|`, so one warm-started LP per stable set
/// suffices; otherwise each vector is tested by fixing the coordinates.
pub fn check_sandwich(g: &Graph, f: &Formulation) -> Result<SandwichReport> {
    let start = Instant::now();
    let vars = g.vars();
    let orig: BTreeSet<&VarName> = f.original_vars.iter().collect();
    if orig != vars.iter().collect::<BTreeSet<_>>() {
        return Err(Error::MismatchedSpaces);
    }
    let (model, session) = session_of(f)?;
    let idx: Vec<usize> = vars.iter().map(|v| model.index_of(v)).collect::<Result<_>>()?;
    let cliques = g.cliques(None, false);
    let stables = g.stable_sets();
    let mut rep = SandwichReport {
        passed: false,
        stable_sets_checked: stables.len(),
        cliques_checked: cliques.len(),
        missing_stable_sets: Vec::new(),
        violated_cliques: Vec::new(),
        negative_coordinates: Vec::new(),
        empty: false,
        millis: 0,
    };
    let Some(mut s) = session else {
        rep.empty = true;
        rep.missing_stable_sets = stables.iter().map(|&st| set_label(g, st)).collect();
        rep.millis = start.elapsed().as_millis();
        return Ok(rep);
    };
    let one = Rational::one();
    for v in 0..g.n() {
        let r = s.optimize(&[(idx[v], one.clone())], Sense::Minimize);
        if r.status != LpStatus::Optimal || r.value.as_ref().unwrap().is_negative() {
            rep.negative_coordinates.push((g.names()[v].clone(), show(&r)));
        }
    }
    for &c in &cliques {
        let obj: Vec<(usize, Rational)> = c.iter().map(|v| (idx[v], one.clone())).collect();
        let r = s.optimize(&obj, Sense::Maximize);
        if r.status != LpStatus::Optimal || r.value.as_ref().unwrap() > &one {
            rep.violated_cliques.push((set_label(g, c), show(&r)));
        }
    }
    let inside_box = rep.violated_cliques.is_empty() && rep.negative_coordinates.is_empty();
    for &st in &stables {
        let ok = if inside_box {
            let obj: Vec<(usize, Rational)> = (0..g.n())
                .map(|v| (idx[v], if st.contains(v) { one.clone() } else { -&one }))
                .collect();
            let r = s.optimize(&obj, Sense::Maximize);
            r.value == Some(Rational::from(st.len()))
        } else {
            let mut m = model.clone();
            for v in 0..g.n() {
                m.fix(&vars[v], if st.contains(v) { one.clone() } else { Rational::zero() })?;
            }
            m.is_feasible()
        };
        if !ok {
            rep.missing_stable_sets.push(set_label(g, st));
        }
    }
    rep.passed = inside_box && rep.missing_stable_sets.is_empty();
    rep.millis = start.elapsed().as_millis();
    Ok(rep)
}

/// Maximum-weight stable set by enumeration.
pub fn max_weight_stable_set(g: &Graph, w: &[Rational]) -> (Rational, VertexSet) {
    let mut best = (Rational::zero(), VertexSet::EMPTY);
    for s in g.stable_sets() {
        let val: Rational = s.iter().map(|v| w[v].clone()).sum();
        if val > best.0 {
            best = (val, s);
        }
    }
    best
}

/// Maximum-weight antichain by enumeration.
pub fn max_weight_antichain(p: &Poset, w: &[Rational]) -> (Rational, VertexSet) {
    let mut best = (Rational::zero(), VertexSet::EMPTY);
    for s in p.antichains() {
        let val: Rational = s.iter().map(|v| w[v].clone()).sum();
        if val > best.0 {
            best = (val, s);
        }
    }
    best
}

/// Random integer objective with entries in `[lo, hi]`.
pub fn random_objective(vars: &[VarName], lo: i64, hi: i64, rng: &mut impl Rng) -> BTreeMap<VarName, Rational> {
    vars.iter().map(|v| (v.clone(), Rational::from(rng.gen_range(lo..=hi)))).collect()
}

/// Maximum of `objective` over the projection of `f` (`None` if empty or
/// unbounded).
pub fn lp_max(f: &Formulation, objective: &BTreeMap<VarName, Rational>) -> Result<Option<Rational>> {
    let r = f.optimize(objective, Sense::Maximize)?;
    Ok(if r.status == LpStatus::Optimal { r.value } else { None })
}

/// Maximises many objectives over one formulation with a warm session.
pub struct Maximizer {
    model: LpModel,
    session: Option<LpSession>,
}

impl Maximizer {
    pub fn new(f: &Formulation) -> Result<Self> {
        let (model, session) = session_of(f)?;
        Ok(Maximizer { model, session })
    }

    pub fn is_empty(&self) -> bool {
        self.session.is_none()
    }

    pub fn optimize(&mut self, objective: &BTreeMap<VarName, Rational>, sense: Sense) -> Result<LpResult> {
        let obj = self.model.objective_indices(objective)?;
        Ok(match &mut self.session {
            None => LpResult { status: LpStatus::Infeasible, value: None, witness: None, pivots: 0 },
            Some(s) => s.optimize(&obj, sense),
        })
    }

    pub fn max(&mut self, objective: &BTreeMap<VarName, Rational>) -> Result<Option<Rational>> {
        let r = self.optimize(objective, Sense::Maximize)?;
        Ok(if r.status == LpStatus::Optimal { r.value } else { None })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AgreementReport {
    pub agree: bool,
    pub seed: u64,
    pub directions: usize,
    /// Direction and the two maxima where they differ.
    pub disagreements: Vec<(BTreeMap<VarName, Rational>, String, String)>,
    pub millis: u128,
}

/// Compares the maxima of two formulations in every `±e_i` direction, the
/// all-ones direction and `directions` random integer directions from
/// `[-10, 10]`.
pub fn projections_agree(f1: &Formulation, f2: &Formulation, directions: usize, seed: u64) -> Result<AgreementReport> {
    let start = Instant::now();
    let a: BTreeSet<&VarName> = f1.original_vars.iter().collect();
    if a != f2.original_vars.iter().collect::<BTreeSet<_>>() {
        return Err(Error::MismatchedSpaces);
    }
    let vars = f1.original_vars.clone();
    let mut dirs = Vec::new();
    for v in &vars {
        for s in [1, -1] {
            dirs.push(BTreeMap::from([(v.clone(), Rational::from(s))]));
        }
    }
    dirs.push(vars.iter().map(|v| (v.clone(), Rational::one())).collect());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..directions {
        dirs.push(random_objective(&vars, -10, 10, &mut rng));
    }
    let mut m1 = Maximizer::new(f1)?;
    let mut m2 = Maximizer::new(f2)?;
    let mut rep = AgreementReport { agree: true, seed, directions: dirs.len(), disagreements: Vec::new(), millis: 0 };
    for d in dirs {
        let r1 = m1.optimize(&d, Sense::Maximize)?;
        let r2 = m2.optimize(&d, Sense::Maximize)?;
        if r1.status != r2.status || r1.value != r2.value {
            rep.agree = false;
            rep.disagreements.push((d, show(&r1), show(&r2)));
        }
    }
    rep.millis = start.elapsed().as_millis();
    Ok(rep)
}

pub const DEFAULT_FM_CAP: usize = 14;

fn row_key(c: &LinearConstraint) -> (Vec<(VarName, Rational)>, Rational) {
    // scale so that the first nonzero coefficient has absolute value one
    match c.coeffs.values().next() {
        None => (Vec::new(), c.rhs.clone()),
        Some(a) => {
            let k = a.abs().recip();
            (c.coeffs.iter().map(|(v, x)| (v.clone(), x * &k)).collect(), &c.rhs * &k)
        }
    }
}

fn dedupe(rows: Vec<LinearConstraint>) -> Result<Vec<LinearConstraint>> {
    // keep, per direction, only the tightest right-hand side
    let mut best: BTreeMap<Vec<(VarName, Rational)>, Rational> = BTreeMap::new();
    for c in rows {
        let (dir, rhs) = row_key(&c);
        if dir.is_empty() {
            if rhs.is_negative() {
                return Ok(vec![LinearConstraint::le([], Rational::from(-1))]);
            }
            continue;
        }
        best.entry(dir).and_modify(|r| if rhs < *r { *r = rhs.clone() }).or_insert(rhs);
    }
    Ok(best.into_iter().map(|(d, r)| LinearConstraint::le(d, r)).collect())
}

/// Drops every inequality implied by the others (LP domination).
fn prune(vars: &[VarName], rows: Vec<LinearConstraint>) -> Result<Vec<LinearConstraint>> {
    let mut keep = rows;
    let mut i = 0;
    while i < keep.len() {
        let mut sys = LinearSystem::new(vars.to_vec());
        for (j, c) in keep.iter().enumerate() {
            if j != i {
                sys.push(c.clone());
            }
        }
        let r = crate::lp::lp_solve(&sys, &keep[i].coeffs.clone().into_iter().collect(), Sense::Maximize)?;
        let redundant = match r.status {
            LpStatus::Infeasible => true,
            LpStatus::Unbounded => false,
            LpStatus::Optimal => r.value.unwrap() <= keep[i].rhs,
        };
        if redundant {
            keep.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(keep)
}

/// Projects `sys` onto `keep` exactly: equations are used for substitution
/// first, the remaining variables are eliminated pairwise, and implied rows
/// are pruned after every step.
pub fn fourier_motzkin(sys: &LinearSystem, keep: &[VarName], cap: usize) -> Result<LinearSystem> {
    if sys.variables.len() > cap {
        return Err(Error::VariableCapExceeded { vars: sys.variables.len(), cap });
    }
    let keep_set: BTreeSet<&VarName> = keep.iter().collect();
    for v in keep {
        if !sys.variables.contains(v) {
            return Err(Error::UnknownVariable(v.to_string()));
        }
    }
    let mut ineq: Vec<LinearConstraint> = sys.inequalities.clone();
    let mut eqs: Vec<LinearConstraint> = sys.equations.clone();
    let elim: Vec<VarName> = sys.variables.iter().filter(|v| !keep_set.contains(v)).cloned().collect();
    let substitute = |c: &LinearConstraint, v: &VarName, def: &LinearConstraint| -> LinearConstraint {
        // def: a_v v + rest = rhs  =>  v = (rhs - rest) / a_v
        let Some(a) = c.coeffs.get(v) else { return c.clone() };
        let k = a / def.coeffs.get(v).unwrap();
        let mut coeffs = c.coeffs.clone();
        for (w, b) in &def.coeffs {
            *coeffs.entry(w.clone()).or_insert_with(Rational::zero) -= &k * b;
        }
        coeffs.remove(v);
        LinearConstraint::new(coeffs, c.relation, &c.rhs - &k * &def.rhs)
    };
    for v in &elim {
        if let Some(pos) = eqs.iter().position(|e| e.coeffs.contains_key(v)) {
            let def = eqs.remove(pos);
            eqs = eqs.iter().map(|e| substitute(e, v, &def)).collect();
            ineq = ineq.iter().map(|c| substitute(c, v, &def)).collect();
        }
    }
    // leftover equations mention only kept variables (or are constant)
    let mut rows = Vec::new();
    let mut out_eqs = Vec::new();
    for e in eqs {
        if e.coeffs.is_empty() {
            if !e.rhs.is_zero() {
                rows.push(LinearConstraint::le([], Rational::from(-1)));
            }
        } else if e.coeffs.keys().all(|w| keep_set.contains(w)) {
            out_eqs.push(e);
        } else {
            rows.push(LinearConstraint::le(e.coeffs.clone(), e.rhs.clone()));
            rows.push(LinearConstraint::le(e.coeffs.iter().map(|(w, a)| (w.clone(), -a)), -&e.rhs));
        }
    }
    rows.extend(ineq);
    let mut rows = dedupe(rows)?;
    let mut live: Vec<VarName> = sys.variables.clone();
    for v in &elim {
        let (mut pos, mut neg, mut zero) = (Vec::new(), Vec::new(), Vec::new());
        for c in rows {
            match c.coeffs.get(v).map(|a| a.signum()) {
                Some(1) => pos.push(c),
                Some(_) => neg.push(c),
                None => zero.push(c),
            }
        }
        for p in &pos {
            let ap = p.coeffs[v].clone();
            for n in &neg {
                let an = -n.coeffs[v].clone();
                let mut coeffs: BTreeMap<VarName, Rational> = BTreeMap::new();
                for (w, b) in &p.coeffs {
                    *coeffs.entry(w.clone()).or_insert_with(Rational::zero) += b * &an;
                }
                for (w, b) in &n.coeffs {
                    *coeffs.entry(w.clone()).or_insert_with(Rational::zero) += b * &ap;
                }
                coeffs.remove(v);
                zero.push(LinearConstraint::le(coeffs, &p.rhs * &an + &n.rhs * &ap));
            }
        }
        live.retain(|w| w != v);
        rows = dedupe(zero)?;
        if rows.len() > 2 * live.len() + 4 {
            rows = prune(&live, rows)?;
        }
    }
    let mut out = LinearSystem::new(keep.to_vec());
    let eq_vars: Vec<VarName> = keep.to_vec();
    let pruned = {
        // prune against the equations as well
        let mut all = rows.clone();
        all.extend(out_eqs.iter().flat_map(|e| {
            [
                LinearConstraint::le(e.coeffs.clone(), e.rhs.clone()),
                LinearConstraint::le(e.coeffs.iter().map(|(w, a)| (w.clone(), -a)), -&e.rhs),
            ]
        }));
        let n_rows = rows.len();
        prune_prefix(&eq_vars, all, n_rows)?
    };
    for c in pruned {
        out.push(c);
    }
    for e in out_eqs {
        out.push(e);
    }
    Ok(out)
}

/// Prunes the first `n` rows of `all` against everything else.
fn prune_prefix(vars: &[VarName], all: Vec<LinearConstraint>, n: usize) -> Result<Vec<LinearConstraint>> {
    let mut rows: Vec<Option<LinearConstraint>> = all.into_iter().map(Some).collect();
    for i in 0..n {
        let target = rows[i].take().unwrap();
        let mut sys = LinearSystem::new(vars.to_vec());
        for c in rows.iter().flatten() {
            sys.push(c.clone());
        }
        let r = crate::lp::lp_solve(&sys, &target.coeffs, Sense::Maximize)?;
        let redundant = match r.status {
            LpStatus::Infeasible => false,
            LpStatus::Unbounded => false,
            LpStatus::Optimal => r.value.unwrap() <= target.rhs,
        };
        if !redundant {
            rows[i] = Some(target);
        }
    }
    Ok(rows.into_iter().take(n).flatten().collect())
}

/// Projection of a formulation onto its original variables.
pub fn project(f: &Formulation, cap: usize) -> Result<LinearSystem> {
    fourier_motzkin(&f.system, &f.original_vars, cap)
}

/// Whether every row of `a` is implied by `b` (vacuously when `b` is empty).
fn implies(b: &LinearSystem, a: &LinearSystem) -> Result<bool> {
    let m = LpModel::from_system(b)?;
    let Some(mut sess) = m.session() else { return Ok(true) };
    for c in a.inequalities.iter().chain(a.equations.iter()) {
        let obj = m.objective_indices(&c.coeffs)?;
        let hi = sess.optimize(&obj, Sense::Maximize);
        if hi.status != LpStatus::Optimal || hi.value.as_ref().unwrap() > &c.rhs {
            return Ok(false);
        }
        if c.relation == Relation::Eq {
            let lo = sess.optimize(&obj, Sense::Minimize);
            if lo.status != LpStatus::Optimal || lo.value.as_ref().unwrap() < &c.rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether two systems over the same variables describe the same
/// polyhedron.
pub fn same_polyhedron(a: &LinearSystem, b: &LinearSystem) -> Result<bool> {
    if a.variables.iter().collect::<BTreeSet<_>>() != b.variables.iter().collect::<BTreeSet<_>>() {
        return Err(Error::MismatchedSpaces);
    }
    Ok(implies(b, a)? && implies(a, b)?)
}

/// Exact projection equality through Fourier–Motzkin; fails when either
/// formulation exceeds `cap` variables.
pub fn fm_equal(f1: &Formulation, f2: &Formulation, cap: usize) -> Result<bool> {
    same_polyhedron(&project(f1, cap)?, &project(f2, cap)?)
}

/// Solves a square-or-tall system exactly; `None` unless the solution is
/// unique.
fn solve_unique(a: &[Vec<Rational>], b: &[Rational], d: usize) -> Option<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = a.iter().zip(b).map(|(r, x)| {
        let mut r = r.clone();
        r.push(x.clone());
        r
    }).collect();
    let mut row = 0;
    let mut piv = Vec::new();
    for col in 0..d {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else { return None };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let k = m[i][col].clone();
                for j in 0..=d {
                    let t = &k * &m[row][j];
                    m[i][j] -= t;
                }
            }
        }
        piv.push(col);
        row += 1;
    }
    for r in &m[row..] {
        if !r[d].is_zero() {
            return None;
        }
    }
    Some((0..d).map(|i| m[i][d].clone()).collect())
}

/// All vertices of the polytope `sys` (no auxiliary variables), by trying
/// every basis of tight rows. Exponential; meant for a handful of variables.
pub fn enumerate_vertices(sys: &LinearSystem) -> Result<Vec<Point>> {
    let vars = &sys.variables;
    let d = vars.len();
    let pos: HashMap<&VarName, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let dense = |c: &LinearConstraint| -> Result<Vec<Rational>> {
        let mut r = vec![Rational::zero(); d];
        for (v, a) in &c.coeffs {
            r[*pos.get(v).ok_or_else(|| Error::UnknownVariable(v.to_string()))?] = a.clone();
        }
        Ok(r)
    };
    let ineq: Vec<Vec<Rational>> = sys.inequalities.iter().map(dense).collect::<Result<_>>()?;
    let eqs: Vec<Vec<Rational>> = sys.equations.iter().map(dense).collect::<Result<_>>()?;
    let mut out: BTreeSet<Vec<Rational>> = BTreeSet::new();
    let m = ineq.len();
    let mut choose = vec![0usize; 0];
    fn rec(
        start: usize,
        m: usize,
        k: usize,
        choose: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if choose.len() == k {
            f(choose);
            return;
        }
        for i in start..m {
            choose.push(i);
            rec(i + 1, m, k, choose, f);
            choose.pop();
        }
    }
    for k in 0..=d.min(m) {
        let mut visit = |set: &[usize]| {
            let mut a: Vec<Vec<Rational>> = eqs.clone();
            let mut b: Vec<Rational> = sys.equations.iter().map(|c| c.rhs.clone()).collect();
            for &i in set {
                a.push(ineq[i].clone());
                b.push(sys.inequalities[i].rhs.clone());
            }
            if let Some(x) = solve_unique(&a, &b, d) {
                let ok = sys.inequalities.iter().zip(&ineq).all(|(c, r)| {
                    let lhs: Rational = r.iter().zip(&x).map(|(p, q)| p * q).sum();
                    lhs <= c.rhs
                });
                if ok {
                    out.insert(x);
                }
            }
        };
        rec(0, m, k, &mut choose, &mut visit);
    }
    Ok(out
        .into_iter()
        .map(|x| Point::from_pairs(vars.iter().cloned().zip(x)))
        .collect())
}

/// Maximum of `objective` over a vertex list.
pub fn vertex_max(vertices: &[Point], objective: &BTreeMap<VarName, Rational>) -> Result<Option<Rational>> {
    let mut best: Option<Rational> = None;
    for p in vertices {
        let mut v = Rational::zero();
        for (x, c) in objective {
            v += c * p.get(x)?;
        }
        if best.as_ref().map_or(true, |b| &v > b) {
            best = Some(v);
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionReport {
    pub passed: bool,
    pub rectangles: usize,
    pub unknown_ids: Vec<String>,
    /// Entries covered more than once, with the rectangles involved.
    pub overlaps: Vec<(String, String, Vec<usize>)>,
    pub uncovered: Vec<(String, String)>,
    /// `(rectangle, row, column, entry, declared value)`.
    pub mixed: Vec<(usize, String, String, String, String)>,
}

/// Checks that `p` partitions the slack matrix of `pair` into rectangles
/// on which the slack is constant and equal to the declared value.
pub fn verify_partition(p: &RectanglePartition, pair: &PolytopePair) -> Result<PartitionReport> {
    let rows: HashMap<&str, usize> = pair.row_ids.iter().enumerate().map(|(i, r)| (r.as_str(), i)).collect();
    let cols: HashMap<&str, usize> = pair.col_ids.iter().enumerate().map(|(i, r)| (r.as_str(), i)).collect();
    let mut rep = PartitionReport {
        passed: false,
        rectangles: p.rectangles.len(),
        unknown_ids: Vec::new(),
        overlaps: Vec::new(),
        uncovered: Vec::new(),
        mixed: Vec::new(),
    };
    if p.rows != pair.row_ids || p.cols != pair.col_ids {
        rep.unknown_ids.push("row/column ids differ from the pair".into());
    }
    let m = pair.slack_matrix()?;
    let mut owners: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); pair.col_ids.len()]; pair.row_ids.len()];
    for (k, rect) in p.rectangles.iter().enumerate() {
        let rs: Vec<usize> = rect
            .rows
            .iter()
            .filter_map(|id| rows.get(id.as_str()).copied().or_else(|| {
                rep.unknown_ids.push(id.clone());
                None
            }))
            .collect();
        let cs: Vec<usize> = rect
            .cols
            .iter()
            .filter_map(|id| cols.get(id.as_str()).copied().or_else(|| {
                rep.unknown_ids.push(id.clone());
                None
            }))
            .collect();
        for &r in &rs {
            for &c in &cs {
                owners[r][c].push(k);
                if m[r][c] != rect.value {
                    rep.mixed.push((k, pair.row_ids[r].clone(), pair.col_ids[c].clone(), m[r][c].to_string(), rect.value.to_string()));
                }
            }
        }
    }
    for (r, line) in owners.iter().enumerate() {
        for (c, o) in line.iter().enumerate() {
            match o.len() {
                0 => rep.uncovered.push((pair.row_ids[r].clone(), pair.col_ids[c].clone())),
                1 => {}
                _ => rep.overlaps.push((pair.row_ids[r].clone(), pair.col_ids[c].clone(), o.clone())),
            }
        }
    }
    rep.passed = rep.unknown_ids.is_empty() && rep.overlaps.is_empty() && rep.uncovered.is_empty() && rep.mixed.is_empty();
    Ok(rep)
}

#[cfg(test)]
pub(crate) fn row(coeffs: &[(&VarName, i64)], rhs: i64) -> LinearConstraint {
    LinearConstraint::new(coeffs.iter().map(|(v, a)| ((*v).clone(), Rational::from(*a))), Relation::Le, Rational::from(rhs))
}
