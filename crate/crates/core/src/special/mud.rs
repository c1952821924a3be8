//! Min-up/min-down polytopes.
//!
//! A 0/1 string of length `T` is feasible when every run of ones that is
//! bounded by zeros on both sides has length at least `L`, and every run
//! of zeros bounded by ones on both sides has length at least `ℓ`. Runs
//! touching either end of the string are free. This is the reading under
//! which the two inequality families of [`mud_facets`] (window `L` for the
//! alternating `≤ 0` rows, window `ℓ` for the `≤ 1` rows) describe the
//! convex hull.

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::formulation::Formulation;
use crate::linalg::{LinearConstraint, LinearSystem, Point, VarName};
use crate::protocol::{compile, ProtocolTree, Sender};
use crate::rational::{int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinUpDown {
    pub t: usize,
    /// Window of the `≤ 0` family; minimum length of an inner run of ones.
    pub big_l: usize,
    /// Window of the `≤ 1` family; minimum length of an inner run of zeros.
    pub ell: usize,
}

impl MinUpDown {
    pub fn new(t: usize, big_l: usize, ell: usize) -> Result<Self> {
        if t == 0 || big_l == 0 || ell == 0 {
            return Err(Error::Invalid("T, L and ell must be positive".into()));
        }
        if big_l > t || ell > t {
            return Err(Error::Invalid(format!("need L <= T and ell <= T (T={t}, L={big_l}, ell={ell})")));
        }
        Ok(MinUpDown { t, big_l, ell })
    }

    pub fn vars(&self) -> Vec<VarName> {
        (1..=self.t).map(|i| VarName::new(&format!("x{i}")).expect("plain name")).collect()
    }

    pub fn is_feasible(&self, bits: &[u8]) -> bool {
        bits.len() == self.t && feasible(bits, self.big_l, self.ell)
    }

    pub fn point(&self, bits: &[u8]) -> Point {
        Point::from_pairs(self.vars().into_iter().zip(bits.iter().map(|&b| int(b as i64))))
    }
}

fn feasible(bits: &[u8], big_l: usize, ell: usize) -> bool {
    let mut runs = Vec::new();
    let mut i = 0;
    while i < bits.len() {
        let mut j = i;
        while j < bits.len() && bits[j] == bits[i] {
            j += 1;
        }
        runs.push((bits[i], j - i));
        i = j;
    }
    runs.len() < 3
        || runs[1..runs.len() - 1].iter().all(|&(b, len)| if b == 1 { len >= big_l } else { len >= ell })
}

/// Feasible strings of length `t`, in lexicographic order.
fn strings(t: usize, big_l: usize, ell: usize) -> Vec<Vec<u8>> {
    // depth-first over prefixes; a run may only be closed once it is long
    // enough or when it is the first run
    fn go(t: usize, big_l: usize, ell: usize, cur: &mut Vec<u8>, run: usize, first: bool, out: &mut Vec<Vec<u8>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for b in [0u8, 1] {
            match cur.last() {
                None => {
                    cur.push(b);
                    go(t, big_l, ell, cur, 1, true, out);
                    cur.pop();
                }
                Some(&last) if last == b => {
                    cur.push(b);
                    go(t, big_l, ell, cur, run + 1, first, out);
                    cur.pop();
                }
                Some(&last) => {
                    let need = if last == 1 { big_l } else { ell };
                    if first || run >= need {
                        cur.push(b);
                        go(t, big_l, ell, cur, 1, false, out);
                        cur.pop();
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    go(t, big_l, ell, &mut Vec::with_capacity(t), 0, true, &mut out);
    out
}

/// All vertices of the polytope as 0/1 strings, lexicographically.
pub fn mud_vertices(inst: &MinUpDown) -> Vec<Vec<u8>> {
    strings(inst.t, inst.big_l, inst.ell)
}

/// Both inequality families; family `≤ 0` first, then by smallest index,
/// then by the bit mask of the remaining indices.
pub fn mud_facets(inst: &MinUpDown) -> LinearSystem {
    let vars = inst.vars();
    let mut sys = LinearSystem::new(vars.clone());
    for (window, rhs, first_sign) in [(inst.big_l, 0, -1), (inst.ell, 1, 1)] {
        for i1 in 0..inst.t {
            let rest: Vec<usize> = (i1 + 1..inst.t.min(i1 + window + 1)).collect();
            for mask in 0u64..(1u64 << rest.len()) {
                if mask.count_ones() % 2 == 1 {
                    continue;
                }
                let mut idx = vec![i1];
                idx.extend(rest.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| i));
                let coeffs = idx.iter().enumerate().map(|(j, &i)| {
                    let s = if j % 2 == 0 { first_sign } else { -first_sign };
                    (vars[i].clone(), int(s))
                });
                sys.push(LinearConstraint::le(coeffs, int(rhs)));
            }
        }
    }
    sys
}

/// Protocol tree: Alice announces the family and the smallest index `i_1`
/// of her inequality; Bob answers with the restriction of his vertex to the
/// window `i_1 ..= i_1 + w` (his bit at `i_1` and the at most two switch
/// positions that fit). The nodes where Bob has spoken carry the fixing
/// equations of that window; the `box` child carries `0 <= x <= 1`.
///
/// Fixing formulations live over the window's coordinates only, where the
/// box is implied, so each union costs two inequalities.
pub fn mud_tree(inst: &MinUpDown) -> ProtocolTree {
    let vars = inst.vars();
    let mut root = IndexMap::new();
    root.insert(
        "box".to_string(),
        ProtocolTree::leaf(None, Some(Formulation::box_formulation(&vars, &Rational::zero(), &Rational::one()))),
    );
    for (f, window) in [(1, inst.big_l), (2, inst.ell)] {
        for i1 in 0..inst.t {
            let hi = inst.t.min(i1 + window + 1);
            let wvars = &vars[i1..hi];
            let mut bob = IndexMap::new();
            for pat in strings(hi - i1, inst.big_l, inst.ell) {
                let eqs = wvars
                    .iter()
                    .zip(&pat)
                    .map(|(v, &b)| LinearConstraint::eq([(v.clone(), Rational::one())], int(b as i64)))
                    .collect();
                let leaf = Formulation::new(wvars.to_vec(), Vec::new(), Vec::new(), eqs).expect("valid fixing");
                let tag: String = pat.iter().map(|b| char::from(b'0' + b)).collect();
                bob.insert(tag, ProtocolTree::leaf(None, Some(leaf)));
            }
            root.insert(format!("f{f}:i{}", i1 + 1), ProtocolTree::node(Sender::Bob, bob));
        }
    }
    ProtocolTree::node(Sender::Alice, root)
}

pub fn mud_ef(inst: &MinUpDown) -> Result<Formulation> {
    compile(&mud_tree(inst))
}

/// Inequality count of `mud_ef` divided by `T (L + ℓ)²`.
pub fn mud_size_constant(inst: &MinUpDown, f: &Formulation) -> f64 {
    let scale = inst.t * (inst.big_l + inst.ell).pow(2);
    f.size_metrics().num_inequalities as f64 / scale as f64
}
