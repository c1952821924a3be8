#![allow(dead_code)]

use std::collections::BTreeMap;

use protoef::graph::families::*;
use protoef::graph::{Graph, Poset};
use protoef::{Rational, VarName};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const RANDOM_PER_N: usize = 50;

pub fn random_seed(n: usize, i: usize) -> u64 {
    (1000 * n + i) as u64
}

/// Connected graphs up to `max_n` vertices: paths, cycles, complete graphs,
/// stars and `RANDOM_PER_N` seeded random connected graphs per size.
pub fn corpus(max_n: usize) -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        out.push((format!("P{n}"), path(n)));
        if n >= 3 {
            out.push((format!("C{n}"), cycle(n)));
        }
        out.push((format!("K{n}"), complete(n)));
        out.push((format!("S{n}"), star(n)));
        for i in 0..RANDOM_PER_N {
            out.push((format!("R{n}.{i}"), random_connected(n, random_seed(n, i))));
        }
    }
    out
}

/// Distinct graphs by edge list, keeping the first name.
pub fn distinct(graphs: Vec<(String, Graph)>) -> Vec<(String, Graph)> {
    let mut seen = std::collections::HashSet::new();
    graphs.into_iter().filter(|(_, g)| seen.insert((g.n(), g.edges()))).collect()
}

/// Random poset whose labels are shuffled, so that index order is not a
/// linear extension in general.
pub fn shuffled_poset(n: usize, p: f64, seed: u64) -> Poset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut rel = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                rel.push((perm[a], perm[b]));
            }
        }
    }
    Poset::new(n, &rel).unwrap()
}

pub fn weights(obj: &BTreeMap<VarName, Rational>, vars: &[VarName]) -> Vec<Rational> {
    vars.iter().map(|v| obj[v].clone()).collect()
}
