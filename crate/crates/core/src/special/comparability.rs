//! Formulations for comparability graphs from the chain/antichain
//! certificates `(v, 0)`, `(v, 1)` and `(u, v)` with `u < v`.

use crate::error::Result;
use crate::formulation::Formulation;
use crate::graph::{Poset, VertexSet};
use crate::linalg::{LinearConstraint, VarName};
use crate::rational::Rational;

fn y(name: String) -> VarName {
    VarName::new(&name).expect("plain name").prefixed("y")
}

struct Names<'a>(&'a Poset);

impl Names<'_> {
    fn x(&self, v: usize) -> VarName {
        VarName::new(&self.0.names()[v]).expect("plain name")
    }
    fn bit(&self, v: usize, b: u8) -> VarName {
        y(format!("{}:{b}", self.0.names()[v]))
    }
    fn pair(&self, u: usize, v: usize) -> VarName {
        y(format!("{}<{}", self.0.names()[u], self.0.names()[v]))
    }
}

fn chain_row(p: &Poset, c: VertexSet) -> LinearConstraint {
    let nm = Names(p);
    let order = p.sort_chain(c);
    let one = Rational::one;
    let mut coeffs: Vec<(VarName, Rational)> = order.iter().map(|&v| (nm.x(v), one())).collect();
    coeffs.push((nm.bit(order[0], 1), one()));
    for w in order.windows(2) {
        coeffs.push((nm.pair(w[0], w[1]), one()));
    }
    coeffs.push((nm.bit(*order.last().expect("nonempty chain"), 0), one()));
    LinearConstraint::eq(coeffs, one())
}

fn build(p: &Poset, max_chain: Option<usize>) -> Result<Formulation> {
    let nm = Names(p);
    let xs: Vec<VarName> = (0..p.n()).map(|v| nm.x(v)).collect();
    let mut ys = Vec::new();
    for v in 0..p.n() {
        ys.push(nm.bit(v, 0));
        ys.push(nm.bit(v, 1));
    }
    ys.extend(p.pairs().into_iter().map(|(u, v)| nm.pair(u, v)));
    let g = p.comparability_graph();
    let eqs = g.cliques(max_chain, false).into_iter().map(|c| chain_row(p, c)).collect();
    let ineq = xs
        .iter()
        .chain(ys.iter())
        .map(|v| LinearConstraint::le([(v.clone(), -Rational::one())], Rational::zero()))
        .collect();
    Formulation::new(xs, ys, ineq, eqs)
}

/// One equation per nonempty chain.
pub fn comparability_full_ef(p: &Poset) -> Result<Formulation> {
    build(p, None)
}

/// Equations for single elements and comparable pairs only.
pub fn comparability_reduced_ef(p: &Poset) -> Result<Formulation> {
    build(p, Some(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::verify::{check_sandwich, lp_max};

    #[test]
    fn chain_of_three() {
        let p = Poset::new(3, &[(0, 1), (1, 2)]).unwrap();
        let red = comparability_reduced_ef(&p).unwrap();
        assert_eq!(red.equations().len(), 6);
        let obj = red.original_vars.iter().map(|v| (v.clone(), int(1))).collect();
        assert_eq!(lp_max(&red, &obj).unwrap(), Some(int(1)));
        assert_eq!(comparability_full_ef(&p).unwrap().equations().len(), 7);
    }

    #[test]
    fn antichain_and_two_chain() {
        let a = Poset::new(3, &[]).unwrap();
        let red = comparability_reduced_ef(&a).unwrap();
        assert_eq!(red.equations().len(), 3);
        assert!(check_sandwich(&a.comparability_graph(), &red).unwrap().passed);
        let c2 = Poset::new(2, &[(0, 1)]).unwrap();
        assert_eq!(comparability_full_ef(&c2).unwrap(), comparability_reduced_ef(&c2).unwrap());
    }

    #[test]
    fn pair_row_shape() {
        let p = Poset::new(2, &[(0, 1)]).unwrap();
        let f = comparability_reduced_ef(&p).unwrap();
        let rows: Vec<String> = f.equations().iter().map(|c| c.to_string()).collect();
        assert!(rows.contains(&"1 v1 + 1 v2 + 1 y/v1:1 + 1 y/v1<v2 + 1 y/v2:0 = 1".to_string()), "{rows:?}");
    }
}
