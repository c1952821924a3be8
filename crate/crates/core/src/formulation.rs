//! Extended formulations and the algebra used to compose them.
//!
//! A formulation is a linear system over original variables `x` and
//! auxiliary variables `y`; the described polyhedron is its coordinate
//! projection onto `x`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{LinearConstraint, LinearSystem, Point, Relation, VarName};
use crate::lp::{LpModel, LpResult, Sense};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formulation {
    pub original_vars: Vec<VarName>,
    pub aux_vars: Vec<VarName>,
    pub system: LinearSystem,
    /// How many `0 <= lambda <= 1` rows were added by unions; these are
    /// redundant whenever the joined parts have dimension at least one.
    pub lambda_bounds: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeMetrics {
    pub num_inequalities: usize,
    pub num_equations: usize,
    pub num_variables: usize,
    pub num_aux: usize,
    /// Nonzero coefficients plus number of constraints.
    pub total_encoding: usize,
    pub lambda_bounds: usize,
    /// Inequalities without the union bounds on `lambda`.
    pub core_inequalities: usize,
}

impl Formulation {
    pub fn new(
        original_vars: Vec<VarName>,
        aux_vars: Vec<VarName>,
        inequalities: Vec<LinearConstraint>,
        equations: Vec<LinearConstraint>,
    ) -> Result<Self> {
        for v in &original_vars {
            if !v.is_plain() {
                return Err(Error::InvalidName(v.to_string()));
            }
        }
        let mut seen = HashSet::new();
        for v in original_vars.iter().chain(aux_vars.iter()) {
            if !seen.insert(v) {
                return Err(Error::DuplicateVariable(v.to_string()));
            }
        }
        for c in &inequalities {
            if c.relation != Relation::Le {
                return Err(Error::Invalid("equation in the inequality list".into()));
            }
        }
        for c in &equations {
            if c.relation != Relation::Eq {
                return Err(Error::Invalid("inequality in the equation list".into()));
            }
        }
        let f = Self::from_parts(original_vars, aux_vars, inequalities, equations);
        f.system.check_closed()?;
        Ok(f)
    }

    pub(crate) fn from_parts(
        original_vars: Vec<VarName>,
        aux_vars: Vec<VarName>,
        inequalities: Vec<LinearConstraint>,
        equations: Vec<LinearConstraint>,
    ) -> Self {
        let variables = original_vars.iter().chain(aux_vars.iter()).cloned().collect();
        Formulation {
            original_vars,
            aux_vars,
            system: LinearSystem { variables, inequalities, equations },
            lambda_bounds: 0,
        }
    }

    /// `lo <= x <= hi` for every variable, with no auxiliary variables.
    pub fn box_formulation(vars: &[VarName], lo: &Rational, hi: &Rational) -> Self {
        let mut ineq = Vec::with_capacity(2 * vars.len());
        for v in vars {
            ineq.push(LinearConstraint::le([(v.clone(), -Rational::one())], -lo));
            ineq.push(LinearConstraint::le([(v.clone(), Rational::one())], hi.clone()));
        }
        Self::from_parts(vars.to_vec(), Vec::new(), ineq, Vec::new())
    }

    pub fn inequalities(&self) -> &[LinearConstraint] {
        &self.system.inequalities
    }

    pub fn equations(&self) -> &[LinearConstraint] {
        &self.system.equations
    }

    pub fn variables(&self) -> &[VarName] {
        &self.system.variables
    }

    /// Renames every auxiliary variable to `tag/name`.
    pub fn prefix_aux(&self, tag: &str) -> Formulation {
        let aux: HashSet<&VarName> = self.aux_vars.iter().collect();
        let rn = |v: &VarName| if aux.contains(v) { v.prefixed(tag) } else { v.clone() };
        let mut f = Self::from_parts(
            self.original_vars.clone(),
            self.aux_vars.iter().map(|v| v.prefixed(tag)).collect(),
            self.system.inequalities.iter().map(|c| c.rename(rn)).collect(),
            self.system.equations.iter().map(|c| c.rename(rn)).collect(),
        );
        f.lambda_bounds = self.lambda_bounds;
        f
    }

    pub fn size_metrics(&self) -> SizeMetrics {
        let nnz: usize = self.system.constraints().map(|c| c.nnz()).sum();
        let ni = self.system.inequalities.len();
        let ne = self.system.equations.len();
        SizeMetrics {
            num_inequalities: ni,
            num_equations: ne,
            num_variables: self.system.variables.len(),
            num_aux: self.aux_vars.len(),
            total_encoding: nnz + ni + ne,
            lambda_bounds: self.lambda_bounds,
            core_inequalities: ni - self.lambda_bounds.min(ni),
        }
    }

    pub fn lp_model(&self) -> Result<LpModel> {
        LpModel::from_system(&self.system)
    }

    pub fn is_nonempty(&self) -> Result<bool> {
        Ok(self.lp_model()?.is_feasible())
    }

    /// Whether `x` (over the original variables) lies in the projection.
    pub fn projection_contains(&self, x: &Point) -> Result<bool> {
        let mut m = self.lp_model()?;
        for v in &self.original_vars {
            m.fix(v, x.get(v)?.clone())?;
        }
        Ok(m.is_feasible())
    }

    /// Optimises a linear objective over the original variables.
    pub fn optimize(&self, objective: &BTreeMap<VarName, Rational>, sense: Sense) -> Result<LpResult> {
        for v in objective.keys() {
            if !self.original_vars.contains(v) {
                return Err(Error::UnknownVariable(v.to_string()));
            }
        }
        self.lp_model()?.solve(objective, sense)
    }

    fn same_space(&self, other: &Formulation) -> bool {
        self.original_vars.len() == other.original_vars.len()
            && self.original_vars.iter().collect::<BTreeSet<_>>()
                == other.original_vars.iter().collect::<BTreeSet<_>>()
    }
}

/// Intersection of projections: constraints are concatenated, and each
/// part's auxiliary variables are made disjoint with a `j{i}` prefix.
pub fn juxtapose(parts: &[Formulation]) -> Result<Formulation> {
    let tags: Vec<String> = (0..parts.len()).map(|i| format!("j{i}")).collect();
    let tagged: Vec<(&str, &Formulation)> =
        tags.iter().map(|t| t.as_str()).zip(parts.iter()).collect();
    juxtapose_tagged(&tagged)
}

/// Like [`juxtapose`] with caller-chosen (distinct) tags.
pub fn juxtapose_tagged(parts: &[(&str, &Formulation)]) -> Result<Formulation> {
    let Some((_, first)) = parts.first() else {
        return Err(Error::EmptyInput("juxtapose of no formulations".into()));
    };
    for (_, p) in parts {
        if !first.same_space(p) {
            return Err(Error::MismatchedSpaces);
        }
    }
    if parts.len() == 1 {
        return Ok((*first).clone());
    }
    let mut aux = Vec::new();
    let mut ineq = Vec::new();
    let mut eqs = Vec::new();
    let mut lambda_bounds = 0;
    for (tag, p) in parts {
        let q = p.prefix_aux(tag);
        aux.extend(q.aux_vars);
        ineq.extend(q.system.inequalities);
        eqs.extend(q.system.equations);
        lambda_bounds += q.lambda_bounds;
    }
    let mut f = Formulation::from_parts(first.original_vars.clone(), aux, ineq, eqs);
    f.lambda_bounds = lambda_bounds;
    Ok(f)
}

/// Convex hull of the union of two nonempty projections, by Balas'
/// disjunctive construction.
pub fn balas_union(f1: &Formulation, f2: &Formulation) -> Result<Formulation> {
    if !f1.same_space(f2) {
        return Err(Error::MismatchedSpaces);
    }
    if !f1.is_nonempty()? {
        return Err(Error::EmptyPart("first part of the union is empty".into()));
    }
    if !f2.is_nonempty()? {
        return Err(Error::EmptyPart("second part of the union is empty".into()));
    }
    Ok(balas_union_tagged(f1, "u1", f2, "u2"))
}

pub(crate) const LAMBDA_TAG: &str = "mix";

/// Balas' construction without emptiness checks. Copies of `f1` live under
/// `t1/`, copies of `f2` under `t2/`, the multiplier is `mix/lambda`.
///
/// `x = y1 + y2`, `A1 y1 <= lambda b1`, `A2 y2 <= (1 - lambda) b2`,
/// `0 <= lambda <= 1`; equations are scaled the same way.
pub fn balas_union_tagged(f1: &Formulation, t1: &str, f2: &Formulation, t2: &str) -> Formulation {
    assert!(t1 != t2 && t1 != LAMBDA_TAG && t2 != LAMBDA_TAG, "union tags must be distinct");
    let lam = VarName::parse(&format!("{LAMBDA_TAG}/lambda")).expect("valid name");
    let one = Rational::one();
    let mut aux: Vec<VarName> = Vec::new();
    aux.extend(f1.variables().iter().map(|v| v.prefixed(t1)));
    aux.extend(f2.variables().iter().map(|v| v.prefixed(t2)));
    aux.push(lam.clone());
    let mut ineq = Vec::with_capacity(f1.inequalities().len() + f2.inequalities().len() + 2);
    let mut eqs = Vec::with_capacity(f1.equations().len() + f2.equations().len() + f1.original_vars.len());
    for x in &f1.original_vars {
        eqs.push(LinearConstraint::eq(
            [(x.clone(), one.clone()), (x.prefixed(t1), -&one), (x.prefixed(t2), -&one)],
            Rational::zero(),
        ));
    }
    let scale = |c: &LinearConstraint, tag: &str, first: bool| -> LinearConstraint {
        let mut coeffs: Vec<(VarName, Rational)> =
            c.coeffs.iter().map(|(v, a)| (v.prefixed(tag), a.clone())).collect();
        if c.rhs.is_zero() {
            return LinearConstraint::new(coeffs, c.relation, Rational::zero());
        }
        if first {
            coeffs.push((lam.clone(), -&c.rhs));
            LinearConstraint::new(coeffs, c.relation, Rational::zero())
        } else {
            coeffs.push((lam.clone(), c.rhs.clone()));
            LinearConstraint::new(coeffs, c.relation, c.rhs.clone())
        }
    };
    for c in f1.inequalities() {
        ineq.push(scale(c, t1, true));
    }
    for c in f2.inequalities() {
        ineq.push(scale(c, t2, false));
    }
    for c in f1.equations() {
        eqs.push(scale(c, t1, true));
    }
    for c in f2.equations() {
        eqs.push(scale(c, t2, false));
    }
    ineq.push(LinearConstraint::le([(lam.clone(), -&one)], Rational::zero()));
    ineq.push(LinearConstraint::le([(lam, one.clone())], one));
    let mut f = Formulation::from_parts(f1.original_vars.clone(), aux, ineq, eqs);
    f.lambda_bounds = f1.lambda_bounds + f2.lambda_bounds + 2;
    f
}

/// Left fold of [`balas_union_tagged`] over tagged parts.
pub fn balas_fold(parts: &[(&str, &Formulation)]) -> Result<Formulation> {
    let Some((t0, first)) = parts.first() else {
        return Err(Error::EmptyInput("union of no formulations".into()));
    };
    for (_, p) in parts {
        if !first.same_space(p) {
            return Err(Error::MismatchedSpaces);
        }
    }
    if parts.len() == 1 {
        return Ok((*first).clone());
    }
    let (t1, second) = parts[1];
    let mut acc = balas_union_tagged(first, t0, second, t1);
    for (k, (t, p)) in parts.iter().enumerate().skip(2) {
        let acc_tag = format!("&{k}");
        acc = balas_union_tagged(&acc, &acc_tag, p, t);
    }
    Ok(acc)
}

/// Extended formulation of `{x >= 0 : x·y <= gamma for all y in P}` where
/// `P` is the projection of `f`, via LP duality.
pub fn polar_eta(f: &Formulation, gamma: &Rational) -> Result<Formulation> {
    if !f.is_nonempty()? {
        return Err(Error::EmptyPart("polar of an empty formulation".into()));
    }
    Ok(polar_eta_unchecked(f, gamma, "eta"))
}

/// Dual multipliers are `tag/l{i}` (one per inequality, `>= 0`) and
/// `tag/m{k}` (one per equation, free).
pub fn polar_eta_unchecked(f: &Formulation, gamma: &Rational, tag: &str) -> Formulation {
    let lam: Vec<VarName> = (0..f.inequalities().len())
        .map(|i| VarName::parse(&format!("{tag}/l{i}")).expect("valid name"))
        .collect();
    let mu: Vec<VarName> = (0..f.equations().len())
        .map(|k| VarName::parse(&format!("{tag}/m{k}")).expect("valid name"))
        .collect();
    // column view: variable -> [(multiplier, coefficient)]
    let mut cols: BTreeMap<&VarName, Vec<(VarName, Rational)>> = BTreeMap::new();
    for (i, c) in f.inequalities().iter().enumerate() {
        for (v, a) in &c.coeffs {
            cols.entry(v).or_default().push((lam[i].clone(), a.clone()));
        }
    }
    for (k, c) in f.equations().iter().enumerate() {
        for (v, a) in &c.coeffs {
            cols.entry(v).or_default().push((mu[k].clone(), a.clone()));
        }
    }
    let one = Rational::one();
    let mut eqs = Vec::new();
    let mut ineq = Vec::new();
    for x in &f.original_vars {
        let mut coeffs = cols.get(x).cloned().unwrap_or_default();
        coeffs.push((x.clone(), -&one));
        eqs.push(LinearConstraint::eq(coeffs, Rational::zero()));
    }
    for z in &f.aux_vars {
        let coeffs = cols.get(z).cloned().unwrap_or_default();
        let c = LinearConstraint::eq(coeffs, Rational::zero());
        if !c.coeffs.is_empty() {
            eqs.push(c);
        }
    }
    let mut rhs_row: Vec<(VarName, Rational)> = Vec::new();
    for (i, c) in f.inequalities().iter().enumerate() {
        rhs_row.push((lam[i].clone(), c.rhs.clone()));
    }
    for (k, c) in f.equations().iter().enumerate() {
        rhs_row.push((mu[k].clone(), c.rhs.clone()));
    }
    ineq.push(LinearConstraint::le(rhs_row, gamma.clone()));
    for l in &lam {
        ineq.push(LinearConstraint::le([(l.clone(), -&one)], Rational::zero()));
    }
    for x in &f.original_vars {
        ineq.push(LinearConstraint::le([(x.clone(), -&one)], Rational::zero()));
    }
    let mut aux = lam;
    aux.extend(mu);
    Formulation::from_parts(f.original_vars.clone(), aux, ineq, eqs)
}

/// Re-reads `f` over the larger original space `ambient`; the new
/// coordinates are unconstrained.
pub fn embed(f: &Formulation, ambient: &[VarName]) -> Result<Formulation> {
    let amb: HashSet<&VarName> = ambient.iter().collect();
    for v in &f.original_vars {
        if !amb.contains(v) {
            return Err(Error::NotSubset(v.to_string()));
        }
    }
    let aux: HashSet<&VarName> = f.aux_vars.iter().collect();
    for v in ambient {
        if aux.contains(v) {
            return Err(Error::DuplicateVariable(v.to_string()));
        }
    }
    let mut g = Formulation::from_parts(
        ambient.to_vec(),
        f.aux_vars.clone(),
        f.system.inequalities.clone(),
        f.system.equations.clone(),
    );
    g.lambda_bounds = f.lambda_bounds;
    Ok(g)
}

// ---------------------------------------------------------------- JSON

#[derive(Serialize, Deserialize)]
struct RowJson {
    coeffs: BTreeMap<VarName, Rational>,
    rhs: Rational,
}

#[derive(Serialize, Deserialize)]
struct FormulationJson {
    original_vars: Vec<VarName>,
    aux_vars: Vec<VarName>,
    inequalities: Vec<RowJson>,
    equations: Vec<RowJson>,
    #[serde(default, skip_serializing_if = "is_zero")]
    lambda_bounds: usize,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

impl Serialize for Formulation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let row = |c: &LinearConstraint| RowJson { coeffs: c.coeffs.clone(), rhs: c.rhs.clone() };
        FormulationJson {
            original_vars: self.original_vars.clone(),
            aux_vars: self.aux_vars.clone(),
            inequalities: self.inequalities().iter().map(row).collect(),
            equations: self.equations().iter().map(row).collect(),
            lambda_bounds: self.lambda_bounds,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Formulation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = FormulationJson::deserialize(d)?;
        let ineq = j.inequalities.into_iter().map(|r| LinearConstraint::le(r.coeffs, r.rhs)).collect();
        let eqs = j.equations.into_iter().map(|r| LinearConstraint::eq(r.coeffs, r.rhs)).collect();
        let mut f = Formulation::new(j.original_vars, j.aux_vars, ineq, eqs)
            .map_err(serde::de::Error::custom)?;
        f.lambda_bounds = j.lambda_bounds;
        Ok(f)
    }
}

impl Formulation {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("formulation serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

// ---------------------------------------------------------------- LP text

impl Formulation {
    /// CPLEX-LP-like text with exact `p/q` coefficients. The variable split
    /// is recorded in leading comment lines so the export round-trips.
    pub fn to_lp_text(&self) -> String {
        let mut out = String::new();
        let names = |vs: &[VarName]| vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "\\ original: {}", names(&self.original_vars));
        let _ = writeln!(out, "\\ aux: {}", names(&self.aux_vars));
        if self.lambda_bounds > 0 {
            let _ = writeln!(out, "\\ lambda_bounds: {}", self.lambda_bounds);
        }
        out.push_str("Maximize\n obj:\nSubject To\n");
        for (i, c) in self.inequalities().iter().enumerate() {
            let _ = writeln!(out, " c{i}: {c}");
        }
        for (i, c) in self.equations().iter().enumerate() {
            let _ = writeln!(out, " e{i}: {c}");
        }
        out.push_str("Bounds\n");
        for v in self.variables() {
            let _ = writeln!(out, " {v} free");
        }
        out.push_str("End\n");
        out
    }

    pub fn from_lp_text(text: &str) -> Result<Self> {
        let mut original = None;
        let mut aux = None;
        let mut lambda_bounds = 0;
        let mut ineq = Vec::new();
        let mut eqs = Vec::new();
        let mut section = "";
        let perr = |m: &str, l: &str| Error::Parse(format!("{m}: {l:?}"));
        let parse_names = |s: &str| -> Result<Vec<VarName>> {
            s.split_whitespace().map(VarName::parse).collect()
        };
        for line in text.lines() {
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(c) = t.strip_prefix('\\') {
                let c = c.trim();
                if let Some(r) = c.strip_prefix("original:") {
                    original = Some(parse_names(r)?);
                } else if let Some(r) = c.strip_prefix("aux:") {
                    aux = Some(parse_names(r)?);
                } else if let Some(r) = c.strip_prefix("lambda_bounds:") {
                    lambda_bounds = r.trim().parse().map_err(|_| perr("bad count", t))?;
                }
                continue;
            }
            match t.to_ascii_lowercase().as_str() {
                "maximize" | "minimize" | "subject to" | "bounds" | "end" => {
                    section = match t.to_ascii_lowercase().as_str() {
                        "subject to" => "st",
                        "bounds" => "bounds",
                        _ => "",
                    };
                    continue;
                }
                _ => {}
            }
            if section != "st" {
                continue;
            }
            let (_, body) = t.split_once(':').ok_or_else(|| perr("missing row name", t))?;
            ineq_or_eq(body, &mut ineq, &mut eqs).map_err(|e| perr(&e, t))?;
        }
        let original = original.ok_or_else(|| Error::Parse("missing original variable header".into()))?;
        let aux = aux.unwrap_or_default();
        let mut f = Formulation::new(original, aux, ineq, eqs)?;
        f.lambda_bounds = lambda_bounds;
        Ok(f)
    }
}

fn ineq_or_eq(
    body: &str,
    ineq: &mut Vec<LinearConstraint>,
    eqs: &mut Vec<LinearConstraint>,
) -> std::result::Result<(), String> {
    let toks: Vec<&str> = body.split_whitespace().collect();
    let op = toks
        .iter()
        .position(|t| *t == "<=" || *t == "=")
        .ok_or("missing relation")?;
    if op + 2 != toks.len() {
        return Err("expected a single right-hand side".into());
    }
    let rhs: Rational = toks[op + 1].parse().map_err(|e| format!("{e}"))?;
    let lhs = &toks[..op];
    let mut coeffs = Vec::new();
    if !(lhs.len() == 1 && lhs[0] == "0") {
        let mut i = 0;
        let mut sign = Rational::one();
        while i < lhs.len() {
            match lhs[i] {
                "+" => {
                    i += 1;
                    continue;
                }
                "-" => {
                    sign = -sign;
                    i += 1;
                    continue;
                }
                _ => {}
            }
            if i + 1 >= lhs.len() {
                return Err("dangling coefficient".into());
            }
            let c: Rational = lhs[i].parse().map_err(|e| format!("{e}"))?;
            let v = VarName::parse(lhs[i + 1]).map_err(|e| e.to_string())?;
            coeffs.push((v, &sign * c));
            sign = Rational::one();
            i += 2;
        }
    }
    if toks[op] == "<=" {
        ineq.push(LinearConstraint::le(coeffs, rhs));
    } else {
        eqs.push(LinearConstraint::eq(coeffs, rhs));
    }
    Ok(())
}
