//! Exact rational linear programming.
//!
//! A small presolve (singleton rows become bounds, fixed columns are
//! substituted out) followed by a two-phase bounded-variable primal simplex
//! on a sparse tableau. Pivoting follows Bland's rule, so the method always
//! terminates. A [`LpSession`] keeps the feasible tableau around so that many
//! objectives over the same region are re-optimised from the previous basis.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{LinearSystem, Point, Relation, VarName};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, Serialize)]
pub struct LpResult {
    pub status: LpStatus,
    pub value: Option<Rational>,
    pub witness: Option<Point>,
    pub pivots: usize,
}

impl LpResult {
    fn infeasible() -> Self {
        LpResult { status: LpStatus::Infeasible, value: None, witness: None, pivots: 0 }
    }
}

#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<(usize, Rational)>,
    eq: bool,
    rhs: Rational,
}

/// An indexed LP feasibility region: rows plus optional column bounds.
#[derive(Clone, Debug)]
pub struct LpModel {
    names: Vec<VarName>,
    index: HashMap<VarName, usize>,
    rows: Vec<Row>,
    lower: Vec<Option<Rational>>,
    upper: Vec<Option<Rational>>,
}

impl LpModel {
    pub fn from_system(sys: &LinearSystem) -> Result<Self> {
        let mut index = HashMap::with_capacity(sys.variables.len());
        for (i, v) in sys.variables.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateVariable(v.to_string()));
            }
        }
        let mut rows = Vec::with_capacity(sys.inequalities.len() + sys.equations.len());
        for c in sys.constraints() {
            let mut coeffs = Vec::with_capacity(c.coeffs.len());
            for (v, a) in &c.coeffs {
                let j = *index.get(v).ok_or_else(|| Error::UnknownVariable(v.to_string()))?;
                coeffs.push((j, a.clone()));
            }
            coeffs.sort_by_key(|e| e.0);
            rows.push(Row { coeffs, eq: c.relation == Relation::Eq, rhs: c.rhs.clone() });
        }
        let n = sys.variables.len();
        Ok(LpModel {
            names: sys.variables.clone(),
            index,
            rows,
            lower: vec![None; n],
            upper: vec![None; n],
        })
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[VarName] {
        &self.names
    }

    pub fn index_of(&self, v: &VarName) -> Result<usize> {
        self.index.get(v).copied().ok_or_else(|| Error::UnknownVariable(v.to_string()))
    }

    /// Pins `v` to `value` (intersected with existing bounds).
    pub fn fix(&mut self, v: &VarName, value: Rational) -> Result<()> {
        let j = self.index_of(v)?;
        self.lower[j] = Some(value.clone());
        self.upper[j] = Some(value);
        Ok(())
    }

    pub fn objective_indices(
        &self,
        objective: &BTreeMap<VarName, Rational>,
    ) -> Result<Vec<(usize, Rational)>> {
        objective
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(v, c)| Ok((self.index_of(v)?, c.clone())))
            .collect()
    }

    /// Runs presolve and phase 1. `None` means the region is empty.
    pub fn session(&self) -> Option<LpSession> {
        let pre = presolve(self)?;
        let mut tab = Tableau::phase1(&pre);
        if !tab.finish_phase1() {
            return None;
        }
        Some(LpSession { model_names: self.names.clone(), pre, tab })
    }

    pub fn is_feasible(&self) -> bool {
        self.session().is_some()
    }

    pub fn solve(&self, objective: &BTreeMap<VarName, Rational>, sense: Sense) -> Result<LpResult> {
        let obj = self.objective_indices(objective)?;
        Ok(match self.session() {
            None => LpResult::infeasible(),
            Some(mut s) => s.optimize(&obj, sense),
        })
    }
}

/// Solves `max/min objective·x` subject to `sys`.
pub fn lp_solve(
    sys: &LinearSystem,
    objective: &BTreeMap<VarName, Rational>,
    sense: Sense,
) -> Result<LpResult> {
    LpModel::from_system(sys)?.solve(objective, sense)
}

/// Feasibility point of `sys`, if any.
pub fn feasible_point(sys: &LinearSystem) -> Result<Option<Point>> {
    let r = lp_solve(sys, &BTreeMap::new(), Sense::Maximize)?;
    Ok(r.witness)
}

// ---------------------------------------------------------------- presolve

#[derive(Clone, Debug)]
struct Presolved {
    // reduced column -> model column
    cols: Vec<usize>,
    // model column -> fixed value (for columns removed by presolve)
    fixed: Vec<Option<Rational>>,
    // model column -> reduced column
    map: Vec<Option<usize>>,
    rows: Vec<Row>,
    lower: Vec<Option<Rational>>,
    upper: Vec<Option<Rational>>,
}

fn presolve(m: &LpModel) -> Option<Presolved> {
    let n = m.names.len();
    let mut lower = m.lower.clone();
    let mut upper = m.upper.clone();
    let mut fixed: Vec<Option<Rational>> = vec![None; n];
    let mut rows: Vec<Row> = m.rows.clone();
    for j in 0..n {
        if let (Some(l), Some(u)) = (&lower[j], &upper[j]) {
            if l > u {
                return None;
            }
            if l == u {
                fixed[j] = Some(l.clone());
            }
        }
    }
    loop {
        let mut changed = false;
        let mut kept = Vec::with_capacity(rows.len());
        for mut row in rows.into_iter() {
            if row.coeffs.iter().any(|(j, _)| fixed[*j].is_some()) {
                let mut rhs = row.rhs.clone();
                row.coeffs.retain(|(j, a)| match &fixed[*j] {
                    Some(v) => {
                        rhs -= a * v;
                        false
                    }
                    None => true,
                });
                row.rhs = rhs;
            }
            match row.coeffs.len() {
                0 => {
                    let ok = if row.eq { row.rhs.is_zero() } else { !row.rhs.is_negative() };
                    if !ok {
                        return None;
                    }
                    changed = true;
                }
                1 => {
                    let (j, a) = &row.coeffs[0];
                    let bound = &row.rhs / a;
                    let tighten_upper = row.eq || a.is_positive();
                    let tighten_lower = row.eq || a.is_negative();
                    if tighten_upper && upper[*j].as_ref().map_or(true, |u| bound < *u) {
                        upper[*j] = Some(bound.clone());
                    }
                    if tighten_lower && lower[*j].as_ref().map_or(true, |l| bound > *l) {
                        lower[*j] = Some(bound);
                    }
                    if let (Some(l), Some(u)) = (&lower[*j], &upper[*j]) {
                        if l > u {
                            return None;
                        }
                        if l == u && fixed[*j].is_none() {
                            fixed[*j] = Some(l.clone());
                        }
                    }
                    changed = true;
                }
                _ => kept.push(row),
            }
        }
        rows = kept;
        if !changed {
            break;
        }
    }
    let mut map = vec![None; n];
    let mut cols = Vec::new();
    for j in 0..n {
        if fixed[j].is_none() {
            map[j] = Some(cols.len());
            cols.push(j);
        }
    }
    for row in rows.iter_mut() {
        for e in row.coeffs.iter_mut() {
            e.0 = map[e.0].expect("fixed columns were substituted");
        }
    }
    let lower = cols.iter().map(|&j| lower[j].clone()).collect();
    let upper = cols.iter().map(|&j| upper[j].clone()).collect();
    Some(Presolved { cols, fixed, map, rows, lower, upper })
}

// ---------------------------------------------------------------- tableau

type SRow = Vec<(u32, Rational)>;

fn find(row: &SRow, col: u32) -> Option<&Rational> {
    row.binary_search_by_key(&col, |e| e.0).ok().map(|i| &row[i].1)
}

/// `a - f * b`
fn sub_scaled(a: &SRow, f: &Rational, b: &SRow) -> SRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut k) = (0, 0);
    while i < a.len() || k < b.len() {
        if k >= b.len() || (i < a.len() && a[i].0 < b[k].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[k].0 < a[i].0 {
            out.push((b[k].0, -(f * &b[k].1)));
            k += 1;
        } else {
            let v = &a[i].1 - f * &b[k].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            k += 1;
        }
    }
    out
}

fn compress(dense: Vec<Rational>) -> SRow {
    dense
        .into_iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(j, v)| (j as u32, v))
        .collect()
}

#[derive(Clone, Debug)]
struct Tableau {
    nstruct: usize,
    art_start: usize,
    ncols: usize,
    rows: Vec<SRow>,
    basis: Vec<u32>,
    basic_row: Vec<Option<usize>>,
    lower: Vec<Option<Rational>>,
    upper: Vec<Option<Rational>>,
    value: Vec<Rational>,
    obj: SRow,
    pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    /// Builds the phase-1 tableau: slack per inequality row, an artificial
    /// for each row whose slack would start out of bounds and for every
    /// equation row, and the objective `max -sum(artificials)`.
    fn phase1(p: &Presolved) -> Tableau {
        let n = p.cols.len();
        let m = p.rows.len();
        let mut value: Vec<Rational> = (0..n)
            .map(|j| match (&p.lower[j], &p.upper[j]) {
                (Some(l), _) => l.clone(),
                (None, Some(u)) => u.clone(),
                _ => Rational::zero(),
            })
            .collect();
        let mut lower = p.lower.clone();
        let mut upper = p.upper.clone();
        // slack columns for inequality rows
        let mut slack_of = vec![None; m];
        for (i, r) in p.rows.iter().enumerate() {
            if !r.eq {
                slack_of[i] = Some(lower.len());
                lower.push(Some(Rational::zero()));
                upper.push(None);
                value.push(Rational::zero());
            }
        }
        let art_start = lower.len();
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut art_rows = Vec::new();
        for (i, r) in p.rows.iter().enumerate() {
            let mut resid = r.rhs.clone();
            for (j, a) in &r.coeffs {
                resid -= a * &value[*j];
            }
            let mut row: SRow = r.coeffs.iter().map(|(j, a)| (*j as u32, a.clone())).collect();
            match slack_of[i] {
                Some(s) if !resid.is_negative() => {
                    row.push((s as u32, Rational::one()));
                    value[s] = resid;
                    basis.push(s as u32);
                }
                _ => {
                    let a = lower.len();
                    lower.push(Some(Rational::zero()));
                    upper.push(None);
                    if let Some(s) = slack_of[i] {
                        row.push((s as u32, Rational::one()));
                    }
                    // artificial coefficient equals the sign of the residual
                    if resid.is_negative() {
                        for e in row.iter_mut() {
                            e.1 = -&e.1;
                        }
                        value.push(-resid);
                    } else {
                        value.push(resid);
                    }
                    row.push((a as u32, Rational::one()));
                    basis.push(a as u32);
                    art_rows.push(i);
                }
            }
            rows.push(row);
        }
        let ncols = lower.len();
        let mut basic_row = vec![None; ncols];
        for (i, b) in basis.iter().enumerate() {
            basic_row[*b as usize] = Some(i);
        }
        let mut dense = vec![Rational::zero(); ncols];
        for &i in &art_rows {
            for (j, a) in &rows[i] {
                dense[*j as usize] += a;
            }
        }
        for &i in &art_rows {
            dense[basis[i] as usize] = Rational::zero();
        }
        Tableau {
            nstruct: n,
            art_start,
            ncols,
            rows,
            basis,
            basic_row,
            lower,
            upper,
            value,
            obj: compress(dense),
            pivots: 0,
        }
    }

    fn eligible(&self, j: usize, d: &Rational) -> bool {
        if d.is_positive() {
            self.upper[j].as_ref().map_or(true, |u| self.value[j] < *u)
        } else {
            self.lower[j].as_ref().map_or(true, |l| self.value[j] > *l)
        }
    }

    fn iterate(&mut self) -> Outcome {
        loop {
            let entering = self
                .obj
                .iter()
                .find(|(j, d)| self.basic_row[*j as usize].is_none() && self.eligible(*j as usize, d))
                .map(|(j, d)| (*j, d.is_positive()));
            let Some((q, up)) = entering else {
                return Outcome::Optimal;
            };
            // ratio test; rate = change of the basic variable per unit step
            let mut hits: Vec<(usize, Rational)> = Vec::new();
            let mut best: Option<(Rational, usize)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let Some(t) = find(row, q) else { continue };
                let rate = if up { -t } else { t.clone() };
                let b = self.basis[i] as usize;
                let limit = if rate.is_negative() {
                    self.lower[b].as_ref().map(|l| (&self.value[b] - l) / -&rate)
                } else {
                    self.upper[b].as_ref().map(|u| (u - &self.value[b]) / &rate)
                };
                if let Some(lim) = limit {
                    let better = match &best {
                        None => true,
                        Some((bl, bi)) => lim < *bl || (lim == *bl && b < self.basis[*bi] as usize),
                    };
                    if better {
                        best = Some((lim, i));
                    }
                }
                hits.push((i, rate));
            }
            let qi = q as usize;
            let flip = match (&self.lower[qi], &self.upper[qi]) {
                (Some(l), Some(u)) => Some(u - l),
                _ => None,
            };
            let (theta, leave) = match (flip, best) {
                (None, None) => return Outcome::Unbounded,
                (Some(f), None) => (f, None),
                (Some(f), Some((b, _))) if f <= b => (f, None),
                (_, Some((b, i))) => (b, Some(i)),
            };
            self.pivots += 1;
            if !theta.is_zero() {
                if up {
                    self.value[qi] += &theta;
                } else {
                    self.value[qi] -= &theta;
                }
                for (i, rate) in &hits {
                    let b = self.basis[*i] as usize;
                    self.value[b] += rate * &theta;
                }
            }
            if let Some(r) = leave {
                self.pivot(r, q, &hits);
            }
        }
    }

    fn pivot(&mut self, r: usize, q: u32, hits: &[(usize, Rational)]) {
        let t = find(&self.rows[r], q).expect("pivot element").clone();
        let inv = t.recip();
        let prow: SRow = self.rows[r].iter().map(|(j, a)| (*j, a * &inv)).collect();
        for (i, _) in hits {
            if *i == r {
                continue;
            }
            let f = find(&self.rows[*i], q).expect("column entry").clone();
            self.rows[*i] = sub_scaled(&self.rows[*i], &f, &prow);
        }
        if let Some(d) = find(&self.obj, q).cloned() {
            self.obj = sub_scaled(&self.obj, &d, &prow);
        }
        self.rows[r] = prow;
        let old = self.basis[r] as usize;
        self.basic_row[old] = None;
        self.basic_row[q as usize] = Some(r);
        self.basis[r] = q;
        // snap the leaving variable onto the bound it reached
        if let Some(l) = &self.lower[old] {
            if self.value[old] <= *l {
                self.value[old] = l.clone();
            }
        }
        if let Some(u) = &self.upper[old] {
            if self.value[old] >= *u {
                self.value[old] = u.clone();
            }
        }
    }

    /// Runs phase 1 and removes artificial columns. Returns feasibility.
    fn finish_phase1(&mut self) -> bool {
        if self.art_start < self.ncols {
            if let Outcome::Unbounded = self.iterate() {
                unreachable!("phase-1 objective is bounded");
            }
            if (self.art_start..self.ncols).any(|a| !self.value[a].is_zero()) {
                return false;
            }
            // drive zero-valued artificials out of the basis
            let mut r = 0;
            while r < self.rows.len() {
                let b = self.basis[r] as usize;
                if b < self.art_start {
                    r += 1;
                    continue;
                }
                let enter = self.rows[r]
                    .iter()
                    .map(|e| e.0)
                    .find(|&j| (j as usize) < self.art_start && self.basic_row[j as usize].is_none());
                match enter {
                    Some(q) => {
                        let hits: Vec<(usize, Rational)> = self
                            .rows
                            .iter()
                            .enumerate()
                            .filter_map(|(i, row)| find(row, q).map(|t| (i, t.clone())))
                            .collect();
                        self.pivot(r, q, &hits);
                        r += 1;
                    }
                    None => {
                        // redundant row
                        self.basic_row[b] = None;
                        self.rows.swap_remove(r);
                        self.basis.swap_remove(r);
                        if r < self.rows.len() {
                            self.basic_row[self.basis[r] as usize] = Some(r);
                        }
                    }
                }
            }
            let cut = self.art_start as u32;
            for row in self.rows.iter_mut() {
                row.retain(|e| e.0 < cut);
            }
            self.ncols = self.art_start;
            self.lower.truncate(self.ncols);
            self.upper.truncate(self.ncols);
            self.value.truncate(self.ncols);
            self.basic_row.truncate(self.ncols);
        }
        self.obj.clear();
        true
    }

    /// Installs `max c·x` (c over structural columns) as reduced costs.
    fn set_objective(&mut self, c: &[(usize, Rational)]) {
        let mut dense = vec![Rational::zero(); self.ncols];
        for (j, v) in c {
            dense[*j] += v;
        }
        for (j, v) in c {
            if let Some(i) = self.basic_row[*j] {
                if v.is_zero() {
                    continue;
                }
                for (k, a) in &self.rows[i] {
                    dense[*k as usize] -= v * a;
                }
            }
        }
        for i in 0..self.rows.len() {
            dense[self.basis[i] as usize] = Rational::zero();
        }
        self.obj = compress(dense);
    }
}

/// A feasible tableau that can be re-optimised for many objectives.
#[derive(Clone, Debug)]
pub struct LpSession {
    model_names: Vec<VarName>,
    pre: Presolved,
    tab: Tableau,
}

impl LpSession {
    /// `objective` is indexed by model columns (see [`LpModel::index_of`]).
    pub fn optimize(&mut self, objective: &[(usize, Rational)], sense: Sense) -> LpResult {
        let sign = match sense {
            Sense::Maximize => Rational::one(),
            Sense::Minimize => -Rational::one(),
        };
        let mut constant = Rational::zero();
        let mut c: Vec<(usize, Rational)> = Vec::new();
        for (j, v) in objective {
            match self.pre.map[*j] {
                Some(k) => c.push((k, v * &sign)),
                None => constant += v * self.pre.fixed[*j].as_ref().expect("fixed"),
            }
        }
        let start = self.tab.pivots;
        self.tab.set_objective(&c);
        let outcome = self.tab.iterate();
        let pivots = self.tab.pivots - start;
        self.tab.obj.clear();
        match outcome {
            Outcome::Unbounded => LpResult {
                status: LpStatus::Unbounded,
                value: None,
                witness: None,
                pivots,
            },
            Outcome::Optimal => {
                let mut value = constant;
                for (k, v) in &c {
                    value += &sign * v * &self.tab.value[*k];
                }
                LpResult {
                    status: LpStatus::Optimal,
                    value: Some(value),
                    witness: Some(self.point()),
                    pivots,
                }
            }
        }
    }

    /// Current basic feasible point over all model variables.
    pub fn point(&self) -> Point {
        let mut p = Point::new();
        for (j, name) in self.model_names.iter().enumerate() {
            let v = match self.pre.map[j] {
                Some(k) => self.tab.value[k].clone(),
                None => self.pre.fixed[j].clone().expect("fixed"),
            };
            p.set(name.clone(), v);
        }
        p
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.tab.rows.len(), self.tab.nstruct)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{var, LinearConstraint};
    use crate::rational::{int, q};

    fn sys(rows: Vec<LinearConstraint>, vars: &[&str]) -> LinearSystem {
        let mut s = LinearSystem::new(vars.iter().map(|v| var(v)).collect());
        for r in rows {
            s.push(r);
        }
        s
    }

    fn obj(pairs: &[(&str, i64)]) -> BTreeMap<VarName, Rational> {
        pairs.iter().map(|(v, c)| (var(v), int(*c))).collect()
    }

    #[test]
    fn textbook_max() {
        // max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3, x,y >= 0 -> 11 at (3,1)
        let s = sys(
            vec![
                LinearConstraint::le(vec![(var("x"), int(1)), (var("y"), int(1))], int(4)),
                LinearConstraint::le(vec![(var("x"), int(1)), (var("y"), int(3))], int(6)),
                LinearConstraint::le(vec![(var("x"), int(1))], int(3)),
                LinearConstraint::le(vec![(var("x"), int(-1))], int(0)),
                LinearConstraint::le(vec![(var("y"), int(-1))], int(0)),
            ],
            &["x", "y"],
        );
        let r = lp_solve(&s, &obj(&[("x", 3), ("y", 2)]), Sense::Maximize).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert_eq!(r.value, Some(int(11)));
        let w = r.witness.unwrap();
        assert_eq!(w.get(&var("x")).unwrap(), &int(3));
        assert_eq!(w.get(&var("y")).unwrap(), &int(1));
    }

    #[test]
    fn fractional_optimum_with_equation() {
        // max x, 2x + 3y = 1, y >= 0 -> 1/2
        let s = sys(
            vec![
                LinearConstraint::eq(vec![(var("x"), int(2)), (var("y"), int(3))], int(1)),
                LinearConstraint::le(vec![(var("y"), int(-1))], int(0)),
            ],
            &["x", "y"],
        );
        let r = lp_solve(&s, &obj(&[("x", 1)]), Sense::Maximize).unwrap();
        assert_eq!(r.value, Some(q(1, 2)));
        let r = lp_solve(&s, &obj(&[("x", 1)]), Sense::Minimize).unwrap();
        assert_eq!(r.status, LpStatus::Unbounded);
    }

    #[test]
    fn infeasible_detected() {
        let s = sys(
            vec![
                LinearConstraint::le(vec![(var("x"), int(1)), (var("y"), int(1))], int(1)),
                LinearConstraint::le(vec![(var("x"), int(-1)), (var("y"), int(-1))], int(-2)),
            ],
            &["x", "y"],
        );
        let r = lp_solve(&s, &obj(&[]), Sense::Maximize).unwrap();
        assert_eq!(r.status, LpStatus::Infeasible);
    }

    #[test]
    fn session_reoptimises() {
        let s = sys(
            vec![
                LinearConstraint::le(vec![(var("x"), int(1)), (var("y"), int(1))], int(1)),
                LinearConstraint::le(vec![(var("x"), int(-1))], int(0)),
                LinearConstraint::le(vec![(var("y"), int(-1))], int(0)),
            ],
            &["x", "y"],
        );
        let m = LpModel::from_system(&s).unwrap();
        let mut sess = m.session().unwrap();
        for (cx, cy, want) in [(1, 0, 1), (0, 1, 1), (-1, -1, 0), (2, 3, 3), (1, 1, 1)] {
            let r = sess.optimize(&[(0, int(cx)), (1, int(cy))], Sense::Maximize);
            assert_eq!(r.value, Some(int(want)));
        }
    }

    #[test]
    fn redundant_equations_are_tolerated() {
        let s = sys(
            vec![
                LinearConstraint::eq(vec![(var("x"), int(1)), (var("y"), int(1))], int(1)),
                LinearConstraint::eq(vec![(var("x"), int(2)), (var("y"), int(2))], int(2)),
                LinearConstraint::le(vec![(var("x"), int(-1))], int(0)),
                LinearConstraint::le(vec![(var("y"), int(-1))], int(0)),
            ],
            &["x", "y"],
        );
        let r = lp_solve(&s, &obj(&[("x", 1), ("y", -1)]), Sense::Maximize).unwrap();
        assert_eq!(r.value, Some(int(1)));
    }
}
