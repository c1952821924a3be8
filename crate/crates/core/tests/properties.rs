mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use protoef::decomposition::{build_direct, split_sets};
use protoef::formulation::{balas_union, embed, juxtapose, polar_eta, Formulation};
use protoef::graph::families::random_connected;
use protoef::graph::{Graph, VertexSet};
use protoef::linalg::{var, LinearConstraint, LinearSystem};
use protoef::lp::{lp_solve, LpStatus, Sense};
use protoef::pair::PolytopePair;
use protoef::special::{mud_facets, MinUpDown};
use protoef::verify::{
    check_sandwich, enumerate_vertices, fourier_motzkin, lp_max, projections_agree, vertex_max, verify_partition, DEFAULT_FM_CAP,
};
use protoef::yannakakis::build_tree;
use protoef::{Rational, VarName};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-50i64..50, 1i64..20).prop_map(|(n, d)| Rational::new(n, d))
}

fn big_rational() -> impl Strategy<Value = Rational> {
    (any::<i64>(), 1i64..i64::MAX).prop_map(|(n, d)| Rational::new(n, d))
}

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n, any::<u64>()).prop_map(|(n, seed)| random_connected(n, seed))
}

/// `lo <= x_i <= hi` plus `rows` random cuts over `vars`.
fn bounded_formulation(names: &[&str], rows: Vec<(Vec<i64>, i64)>, lo: i64, hi: i64) -> Formulation {
    let vars: Vec<VarName> = names.iter().map(|s| var(s)).collect();
    let mut f = Formulation::box_formulation(&vars, &Rational::from(lo), &Rational::from(hi));
    let mut ineq = f.inequalities().to_vec();
    for (a, b) in rows {
        ineq.push(LinearConstraint::le(vars.iter().cloned().zip(a.into_iter().map(Rational::from)), Rational::from(b)));
    }
    f = Formulation::new(vars, Vec::new(), ineq, Vec::new()).unwrap();
    f
}

fn rows(k: usize, width: usize) -> impl Strategy<Value = Vec<(Vec<i64>, i64)>> {
    prop::collection::vec((prop::collection::vec(-3i64..=3, width), -2i64..=6), 0..=k)
}

fn objective(names: &[&str], c: &[i64]) -> BTreeMap<VarName, Rational> {
    names.iter().zip(c).map(|(n, &c)| (var(n), Rational::from(c))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_field_laws(a in big_rational(), b in big_rational(), c in small_rational()) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a.clone());
        }
        prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a.clone());
    }

    #[test]
    fn rational_order_matches_cross_multiplication(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
        let lhs = Rational::new(a, b);
        let rhs = Rational::new(c, d);
        prop_assert_eq!(lhs.cmp(&rhs), (a * d).cmp(&(c * b)));
    }

    #[test]
    fn lp_witness_is_feasible_and_reproduces_value(r in rows(4, 3), c in prop::collection::vec(-5i64..=5, 3)) {
        let names = ["a", "b", "c"];
        let f = bounded_formulation(&names, r, -4, 4);
        let mut sys = LinearSystem::new(f.variables().to_vec());
        for row in f.inequalities() {
            sys.push(row.clone());
        }
        let obj = objective(&names, &c);
        let res = lp_solve(&sys, &obj, Sense::Maximize).unwrap();
        match res.status {
            LpStatus::Optimal => {
                let w = res.witness.unwrap();
                prop_assert!(sys.contains(&w).unwrap());
                let v: Rational = obj.iter().map(|(x, c)| c * w.get(x).unwrap()).sum();
                prop_assert_eq!(Some(v), res.value);
            }
            LpStatus::Infeasible => prop_assert!(res.witness.is_none()),
            LpStatus::Unbounded => prop_assert!(false, "bounded system reported unbounded"),
        }
    }

    /// Sparse rows with right-hand sides skewed negative: many systems are empty.
    #[test]
    fn lp_agrees_with_projected_vertices(r in prop::collection::vec((prop::collection::vec(-1i64..=1, 3), -6i64..=2), 1..=4), c in -5i64..=5) {
        let names = ["a", "b", "c"];
        let f = bounded_formulation(&names, r, -3, 3);
        let mut sys = LinearSystem::new(f.variables().to_vec());
        for row in f.inequalities() {
            sys.push(row.clone());
        }
        let keep = [var("a")];
        let verts = enumerate_vertices(&fourier_motzkin(&sys, &keep, DEFAULT_FM_CAP).unwrap()).unwrap();
        let obj = objective(&["a"], &[c]);
        let res = lp_solve(&sys, &obj, Sense::Maximize).unwrap();
        match res.status {
            LpStatus::Infeasible => prop_assert!(verts.is_empty()),
            LpStatus::Optimal => prop_assert_eq!(vertex_max(&verts, &obj).unwrap(), res.value),
            LpStatus::Unbounded => prop_assert!(false, "bounded system reported unbounded"),
        }
    }

    #[test]
    fn balas_union_maximum_is_maximum_of_parts(r1 in rows(2, 2), r2 in rows(2, 2), c in prop::collection::vec(-5i64..=5, 2)) {
        let names = ["x", "y"];
        let f1 = bounded_formulation(&names, r1, 0, 3);
        let f2 = bounded_formulation(&names, r2, -2, 1);
        let obj = objective(&names, &c);
        let (m1, m2) = (lp_max(&f1, &obj).unwrap(), lp_max(&f2, &obj).unwrap());
        let u = balas_union(&f1, &f2);
        match (m1, m2) {
            (Some(a), Some(b)) => prop_assert_eq!(lp_max(&u.unwrap(), &obj).unwrap(), Some(a.max(b))),
            // union of an empty part is rejected or equals the other part
            (a, b) => if let Ok(u) = u { prop_assert_eq!(lp_max(&u, &obj).unwrap(), a.or(b)); },
        }
    }

    #[test]
    fn juxtaposition_of_disjoint_parts_maximises_to_the_sum(r1 in rows(2, 2), r2 in rows(2, 2), c in prop::collection::vec(-5i64..=5, 4)) {
        let f1 = bounded_formulation(&["p", "q"], r1, 0, 2);
        let f2 = bounded_formulation(&["s", "t"], r2, 0, 2);
        let o1 = objective(&["p", "q"], &c[..2]);
        let o2 = objective(&["s", "t"], &c[2..]);
        let joint: BTreeMap<_, _> = o1.clone().into_iter().chain(o2.clone()).collect();
        let all: Vec<VarName> = ["p", "q", "s", "t"].iter().map(|s| var(s)).collect();
        let j = juxtapose(&[embed(&f1, &all).unwrap(), embed(&f2, &all).unwrap()]).unwrap();
        let want = match (lp_max(&f1, &o1).unwrap(), lp_max(&f2, &o2).unwrap()) {
            (Some(a), Some(b)) => Some(&a + &b),
            _ => None,
        };
        prop_assert_eq!(lp_max(&j, &joint).unwrap(), want);
    }

    /// Down-monotone `{x >= 0 : Ax <= 1}` with `A >= 0` is its own double
    /// anti-blocker.
    #[test]
    fn polar_is_an_involution_on_down_monotone_polytopes(a in prop::collection::vec(prop::collection::vec(0i64..=3, 2), 1..=3), seed in any::<u64>()) {
        let vars = vec![var("x"), var("y")];
        let mut ineq = vec![
            LinearConstraint::le([(vars[0].clone(), Rational::from(-1))], Rational::zero()),
            LinearConstraint::le([(vars[1].clone(), Rational::from(-1))], Rational::zero()),
            LinearConstraint::le([(vars[0].clone(), Rational::one())], Rational::one()),
            LinearConstraint::le([(vars[1].clone(), Rational::one())], Rational::one()),
        ];
        for row in a {
            ineq.push(LinearConstraint::le(vars.iter().cloned().zip(row.into_iter().map(Rational::from)), Rational::one()));
        }
        let p = Formulation::new(vars, Vec::new(), ineq, Vec::new()).unwrap();
        let pp = polar_eta(&polar_eta(&p, &Rational::one()).unwrap(), &Rational::one()).unwrap();
        prop_assert!(projections_agree(&p, &pp, 40, seed).unwrap().agree);
    }

    #[test]
    fn yannakakis_leaves_partition_the_slack_matrix(g in graph(5)) {
        let pair = PolytopePair::stab_qstab(&g);
        let part = build_tree(&g).unwrap().partition();
        prop_assert!(verify_partition(&part, &pair).unwrap().passed);
    }

    #[test]
    fn direct_formulation_is_sandwiched(g in graph(6), c in 1usize..=3) {
        let (f, _) = build_direct(&g, c).unwrap();
        prop_assert!(check_sandwich(&g, &f).unwrap().passed);
    }

    #[test]
    fn every_clique_lies_in_a_split_part(g in graph(7), mask in any::<u8>()) {
        let pivots: Vec<usize> = (0..g.n()).filter(|v| mask >> v & 1 == 1).collect();
        let sets = split_sets(&g, g.all(), false, &pivots);
        for c in g.cliques(None, false) {
            prop_assert!(sets.iter().any(|s: &VertexSet| c.is_subset(*s)));
        }
    }

    #[test]
    fn mud_facets_cut_out_exactly_the_feasible_strings(t in 1usize..=7, l in 1usize..=7, e in 1usize..=7) {
        prop_assume!(l <= t && e <= t);
        let inst = MinUpDown::new(t, l, e).unwrap();
        let sys = mud_facets(&inst);
        for mask in 0u32..(1 << t) {
            let bits: Vec<u8> = (0..t).map(|i| (mask >> i & 1) as u8).collect();
            prop_assert_eq!(sys.contains(&inst.point(&bits)).unwrap(), inst.is_feasible(&bits));
        }
    }

    #[test]
    fn formulation_text_formats_round_trip(g in graph(5)) {
        let f = build_tree(&g).unwrap().formulation().unwrap();
        prop_assert_eq!(Formulation::from_json(&f.to_json()).unwrap(), f.clone());
        prop_assert_eq!(Formulation::from_lp_text(&f.to_lp_text()).unwrap(), f);
    }
}
