//! Acceptance suite: one pass/fail line per criterion.
//!
//! Lines are written straight to the process's stderr so that they show up
//! in `cargo test` output without `--nocapture`. Per-instance logs go to
//! `CARGO_TARGET_TMPDIR`.

mod common;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{corpus, distinct, shuffled_poset, weights};
use protoef::decomposition::{build_direct, build_threshold};
use protoef::formulation::{balas_union, polar_eta, Formulation};
use protoef::graph::families::*;
use protoef::graph::Graph;
use protoef::linalg::{var, LinearConstraint, LinearSystem, Point};
use protoef::lp::{lp_solve, LpStatus, Sense};
use protoef::pair::PolytopePair;
use protoef::special::mud::mud_size_constant;
use protoef::special::{
    clawfree_full_ef, clawfree_reduced_ef, comparability_reduced_ef, mud_ef, mud_facets, mud_vertices, MinUpDown,
};
use protoef::unambiguous::{compile_unambiguous, UnambiguousOptions};
use protoef::verify::*;
use protoef::yannakakis::{build_tree, leaf_ef};
use protoef::{Error, Rational, VarName};

/// Objectives per graph in criterion 2.
const OBJECTIVES_PERFECT: usize = 50;
/// σ_+ accounting constant in criterion 3.
const SIZE_CONSTANT: usize = 4;
/// Objectives per instance in criterion 4.
const OBJECTIVES_MUD: usize = 100;
/// Ceiling on inequalities / T(L+ℓ)² in criterion 4.
const MUD_CONSTANT: f64 = 4.0;
/// Sampled directions in criterion 5.
const DIRECTIONS_CLAWFREE: usize = 200;
/// Posets and objectives per poset in criterion 6.
const POSETS: usize = 30;
const OBJECTIVES_POSET: usize = 50;
/// Ceiling on tree nodes / n⁴ in criterion 7.
const THRESHOLD_CONSTANT: usize = 1;
/// Random systems in criterion 9.
const SYSTEMS: usize = 100;

fn line(k: usize, passed: bool, what: &str, detail: &str) {
    let mut err = std::io::stderr().lock();
    let verdict = if passed { "PASS" } else { "FAIL" };
    writeln!(err, "[acceptance] criterion {k}: {verdict} — {what} ({detail})").unwrap();
}

fn log_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

fn value_of(obj: &BTreeMap<VarName, Rational>, p: &Point) -> Rational {
    obj.iter().fold(Rational::zero(), |acc, (v, c)| acc + c * p.get(v).unwrap())
}

#[test]
fn criterion_1_sandwich_suite() {
    let start = Instant::now();
    let graphs = corpus(7);
    let mut failures = Vec::new();
    for (name, g) in &graphs {
        let f = build_tree(g).unwrap().formulation().unwrap();
        let r = check_sandwich(g, &f).unwrap();
        if !r.passed {
            failures.push(name.clone());
        }
    }
    let passed = failures.is_empty();
    line(
        1,
        passed,
        "Yannakakis formulation sandwiched between STAB and QSTAB on connected graphs n <= 7",
        &format!("{} graphs, failures {:?}, {:.1}s", graphs.len(), failures, start.elapsed().as_secs_f64()),
    );
    assert!(passed);
}

fn perfect_graphs() -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    for n in 2..=8 {
        out.push((format!("P{n}"), path(n)));
        if n % 2 == 0 && n >= 4 {
            out.push((format!("C{n}"), cycle(n)));
        }
        out.push((format!("K{},{}", n / 2, n - n / 2), complete_bipartite(n / 2, n - n / 2)));
        for i in 0..3 {
            out.push((format!("B{n}.{i}"), random_bipartite(n, (7000 + 10 * n + i) as u64)));
        }
        out.push((format!("K{n}"), complete(n)));
        for i in 0..3 {
            let p = shuffled_poset(n, 0.5, (8000 + 10 * n + i) as u64);
            out.push((format!("Cmp{n}.{i}"), p.comparability_graph()));
        }
    }
    out
}

#[test]
fn criterion_2_perfect_graph_exactness() {
    let start = Instant::now();
    let graphs = perfect_graphs();
    let mut failures = Vec::new();
    for (k, (name, g)) in graphs.iter().enumerate() {
        assert!(g.is_bipartite() || name.starts_with("Cmp") || name.starts_with('K'));
        let builders: [(&str, Formulation); 2] = [
            ("yannakakis", build_tree(g).unwrap().formulation().unwrap()),
            ("direct", build_direct(g, 3).unwrap().0),
        ];
        for (b, f) in builders {
            let mut m = Maximizer::new(&f).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(200 + k as u64);
            for _ in 0..OBJECTIVES_PERFECT {
                let obj = random_objective(&g.vars(), -10, 10, &mut rng);
                let want = max_weight_stable_set(g, &weights(&obj, &g.vars())).0;
                if m.max(&obj).unwrap() != Some(want) {
                    failures.push(format!("{b}:{name}"));
                    break;
                }
            }
        }
    }
    let passed = failures.is_empty();
    line(
        2,
        passed,
        "LP max = brute-force max-weight stable set on bipartite/comparability graphs n <= 8, yannakakis and direct",
        &format!(
            "{} graphs x {} objectives x 2 builders, failures {:?}, {:.1}s",
            graphs.len(),
            OBJECTIVES_PERFECT,
            failures,
            start.elapsed().as_secs_f64()
        ),
    );
    assert!(passed);
}

#[test]
fn criterion_3_size_accounting() {
    let graphs = corpus(7);
    let mut log = String::new();
    let mut violations = Vec::new();
    let mut leaf_exceed = Vec::new();
    let mut worst = 0f64;
    for (name, g) in &graphs {
        let t = build_tree(g).unwrap();
        let f = t.formulation().unwrap();
        let d = g.n();
        let budget: usize = t.leaves.iter().map(|l| leaf_ef(g, l).size_metrics().total_encoding + d).sum();
        let measured = f.size_metrics().total_encoding;
        worst = worst.max(measured as f64 / budget as f64);
        if measured > SIZE_CONSTANT * budget {
            violations.push(name.clone());
        }
        let bound = (d as u128).pow(ceil_log2(d) + 2);
        let leaves = t.leaves.len() as u128;
        if leaves > bound {
            leaf_exceed.push(name.clone());
        }
        log.push_str(&format!(
            "{name}\tn={d}\tleaves={leaves}\tbound={bound}\tsigma+={measured}\tsum_leaves={budget}\n"
        ));
    }
    let path = log_path("acceptance_leaf_counts.tsv");
    std::fs::write(&path, log).unwrap();
    let passed = violations.is_empty();
    line(
        3,
        passed,
        "sigma+(T_root) <= 4 * sum over leaves of (sigma+(T_R) + d); leaf counts logged",
        &format!(
            "{} instances, worst ratio {:.3}, violations {:?}; leaf count above n^(ceil(log2 n)+2) on {:?}; log {}",
            graphs.len(),
            worst,
            violations,
            leaf_exceed,
            path.display()
        ),
    );
    assert!(passed);
}

#[test]
fn criterion_4_min_up_min_down() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut c_by_t: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
    let mut instances = 0;
    for t in 1..=8 {
        for big_l in 1..=t {
            for ell in 1..=t {
                instances += 1;
                let inst = MinUpDown::new(t, big_l, ell).unwrap();
                let ef = mud_ef(&inst).unwrap();
                let sys = mud_facets(&inst);
                let facets = Formulation::new(inst.vars(), Vec::new(), sys.inequalities.clone(), Vec::new()).unwrap();
                let points: Vec<Point> = mud_vertices(&inst).iter().map(|v| inst.point(v)).collect();
                let mut m_ef = Maximizer::new(&ef).unwrap();
                let mut m_fac = Maximizer::new(&facets).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64((100 * t + 10 * big_l + ell) as u64);
                for _ in 0..OBJECTIVES_MUD {
                    let obj = random_objective(&inst.vars(), -10, 10, &mut rng);
                    let want = points.iter().map(|p| value_of(&obj, p)).max();
                    let a = m_ef.max(&obj).unwrap();
                    let b = m_fac.max(&obj).unwrap();
                    if a != want || b != want {
                        failures.push(format!("T={t},L={big_l},ell={ell}"));
                        break;
                    }
                }
                let c = mud_size_constant(&inst, &ef);
                if c > MUD_CONSTANT {
                    failures.push(format!("size T={t},L={big_l},ell={ell}: C={c:.3}"));
                }
                let e = c_by_t.entry(t).or_insert((f64::MAX, 0.0));
                e.0 = e.0.min(c);
                e.1 = e.1.max(c);
            }
        }
    }
    let cs: Vec<String> = c_by_t.iter().map(|(t, (lo, hi))| format!("T={t}:{lo:.2}..{hi:.2}")).collect();
    let passed = failures.is_empty();
    line(
        4,
        passed,
        "mud_ef = mud_facets = mud_vertices on 100 objectives for T <= 8, all L, ell; inequalities <= 4 T(L+ell)^2",
        &format!(
            "{instances} instances, measured C per T [{}], failures {:?}, {:.1}s",
            cs.join(" "),
            failures,
            start.elapsed().as_secs_f64()
        ),
    );
    assert!(passed);
}

#[test]
fn criterion_5_clawfree_reduction() {
    let start = Instant::now();
    let graphs: Vec<_> = corpus(7).into_iter().filter(|(_, g)| !g.contains_induced(&claw())).collect();
    let mut failures = Vec::new();
    let mut exact = 0;
    for (k, (name, g)) in graphs.iter().enumerate() {
        let full = clawfree_full_ef(g, 3).unwrap();
        let red = clawfree_reduced_ef(g, 3).unwrap();
        if red.equations().len() != g.n() + g.num_edges() {
            failures.push(format!("{name}: {} equations", red.equations().len()));
        }
        if !projections_agree(&full, &red, DIRECTIONS_CLAWFREE, 500 + k as u64).unwrap().agree {
            failures.push(format!("{name}: sampled directions"));
        }
        if full.variables().len() <= DEFAULT_FM_CAP {
            exact += 1;
            if !fm_equal(&full, &red, DEFAULT_FM_CAP).unwrap() {
                failures.push(format!("{name}: Fourier-Motzkin"));
            }
        }
    }
    let passed = failures.is_empty();
    line(
        5,
        passed,
        "claw-free full vs reduced: 200 directions agree, exact FM equality within cap, n + |E| equations",
        &format!(
            "{} claw-free graphs, {} decided exactly (cap {}), failures {:?}, {:.1}s",
            graphs.len(),
            exact,
            DEFAULT_FM_CAP,
            failures,
            start.elapsed().as_secs_f64()
        ),
    );
    assert!(passed);
}

#[test]
fn criterion_6_comparability() {
    let mut failures = Vec::new();
    for i in 0..POSETS {
        let n = 2 + i % 7;
        let p = shuffled_poset(n, 0.4, 6000 + i as u64);
        let f = comparability_reduced_ef(&p).unwrap();
        let vars = f.original_vars.clone();
        let mut m = Maximizer::new(&f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(60 + i as u64);
        for _ in 0..OBJECTIVES_POSET {
            let obj = random_objective(&vars, -10, 10, &mut rng);
            let want = max_weight_antichain(&p, &weights(&obj, &vars)).0;
            if m.max(&obj).unwrap() != Some(want) {
                failures.push(format!("poset {i} (n={n})"));
                break;
            }
        }
    }
    let passed = failures.is_empty();
    line(
        6,
        passed,
        "reduced comparability formulation: LP max = brute-force max-weight antichain",
        &format!("{POSETS} posets (n 2..8) x {OBJECTIVES_POSET} objectives, failures {:?}", failures),
    );
    assert!(passed);
}

#[test]
fn criterion_7_threshold_free() {
    let start = Instant::now();
    let h = claw();
    let mut failures = Vec::new();
    let (mut free, mut with) = (0, 0);
    let mut worst = 0f64;
    for (name, g) in corpus(7) {
        match build_threshold(&g, &h, None) {
            Ok((f, tree)) => {
                free += 1;
                if g.contains_induced(&h) {
                    failures.push(format!("{name}: built despite containing the pattern"));
                    continue;
                }
                if !tree.leaves().iter().all(|l| l.vertices.len() == 1) {
                    failures.push(format!("{name}: non-singleton leaf"));
                }
                let nodes = tree.census().nodes;
                let cap = THRESHOLD_CONSTANT * g.n().pow(4);
                worst = worst.max(nodes as f64 / g.n().pow(4) as f64);
                if nodes > cap {
                    failures.push(format!("{name}: {nodes} nodes"));
                }
                if !check_sandwich(&g, &f).unwrap().passed {
                    failures.push(format!("{name}: sandwich"));
                }
            }
            Err(Error::ForbiddenPattern { witness }) => {
                with += 1;
                let induced = witness.len() == h.n()
                    && (0..h.n()).all(|i| (0..h.n()).all(|j| i == j || g.adjacent(witness[i], witness[j]) == h.adjacent(i, j)));
                if !induced {
                    failures.push(format!("{name}: bad witness {witness:?}"));
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    let passed = failures.is_empty() && free > 0 && with > 0;
    line(
        7,
        passed,
        "H = K_{1,3}: singleton leaves, nodes <= n^4, sandwich; graphs containing H rejected with witness",
        &format!(
            "{free} claw-free graphs (max nodes/n^4 {worst:.3}), {with} rejected, failures {:?}, {:.1}s",
            failures,
            start.elapsed().as_secs_f64()
        ),
    );
    assert!(passed);
}

#[test]
fn criterion_8_unambiguous_compilation() {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_protoef");
    let dir = tempfile::tempdir().unwrap();
    let graphs = distinct(corpus(6));
    let mut failures = Vec::new();
    let mut max_rects = 0;
    for (name, g) in &graphs {
        let pair = PolytopePair::stab_qstab(g);
        let part = build_tree(g).unwrap().partition();
        max_rects = max_rects.max(part.len());
        if !verify_partition(&part, &pair).unwrap().passed {
            failures.push(format!("{name}: partition"));
            continue;
        }
        let (f, tree) = compile_unambiguous(&pair, &part, UnambiguousOptions::default()).unwrap();
        if !tree.halves() {
            failures.push(format!("{name}: halving"));
        }
        if !check_sandwich(g, &f).unwrap().passed {
            failures.push(format!("{name}: sandwich"));
        }
        // the same artifacts through the command line
        let p = |s: &str| dir.path().join(s);
        std::fs::write(p("pair.json"), pair.to_json()).unwrap();
        std::fs::write(p("part.json"), part.to_json()).unwrap();
        let out = Command::new(bin)
            .args(["build", "from-rectangles", "--pair"])
            .arg(p("pair.json"))
            .arg("--partition")
            .arg(p("part.json"))
            .arg("-o")
            .arg(p("ef.json"))
            .output()
            .unwrap();
        let via_cli = std::fs::read_to_string(p("ef.json")).unwrap_or_default();
        if !out.status.success() || via_cli.trim_end() != f.to_json().trim_end() {
            failures.push(format!("{name}: command line output differs"));
        }
    }
    let passed = failures.is_empty();
    line(
        8,
        passed,
        "Yannakakis leaf partitions (n <= 6) through build from-rectangles: partition verified, halving, sandwich",
        &format!(
            "{} distinct graphs, up to {} rectangles, failures {:?}, {:.1}s",
            graphs.len(),
            max_rects,
            failures,
            start.elapsed().as_secs_f64()
        ),
    );
    assert!(passed);
}

fn random_system(rng: &mut ChaCha8Rng) -> LinearSystem {
    let xs = [var("x1"), var("x2")];
    let ys = [var("y1"), var("y2")];
    let all: Vec<VarName> = xs.iter().chain(ys.iter()).cloned().collect();
    let mut sys = LinearSystem::new(all.clone());
    for v in &all {
        sys.push(LinearConstraint::le([(v.clone(), Rational::from(1))], Rational::from(5)));
        sys.push(LinearConstraint::le([(v.clone(), Rational::from(-1))], Rational::from(5)));
    }
    for _ in 0..rng.gen_range(2..=4) {
        let coeffs: Vec<_> = all.iter().map(|v| (v.clone(), Rational::from(rng.gen_range(-3..=3)))).collect();
        sys.push(LinearConstraint::le(coeffs, Rational::from(rng.gen_range(-4..=8))));
    }
    if rng.gen_bool(0.3) {
        let coeffs: Vec<_> = all.iter().map(|v| (v.clone(), Rational::from(rng.gen_range(-2..=2)))).collect();
        sys.push(LinearConstraint::eq(coeffs, Rational::from(rng.gen_range(-2..=2))));
    }
    sys
}

fn vertex_set(sys: &LinearSystem) -> Vec<Vec<Rational>> {
    let mut v: Vec<Vec<Rational>> = enumerate_vertices(sys)
        .unwrap()
        .iter()
        .map(|p| sys.variables.iter().map(|x| p.get(x).unwrap().clone()).collect())
        .collect();
    v.sort();
    v
}

fn pts(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
    let mut v: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| Rational::from(x)).collect()).collect();
    v.sort();
    v
}

#[test]
fn criterion_9_oracle_cross_checks() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut empty = 0;
    for k in 0..SYSTEMS {
        let sys = random_system(&mut rng);
        let keep = [var("x1"), var("x2")];
        let proj = fourier_motzkin(&sys, &keep, DEFAULT_FM_CAP).unwrap();
        let verts = enumerate_vertices(&proj).unwrap();
        let obj = random_objective(&keep, -10, 10, &mut rng);
        let lp = lp_solve(&sys, &obj, Sense::Maximize).unwrap();
        let ok = match lp.status {
            LpStatus::Optimal => vertex_max(&verts, &obj).unwrap() == lp.value,
            LpStatus::Infeasible => {
                empty += 1;
                verts.is_empty()
            }
            LpStatus::Unbounded => false,
        };
        if !ok {
            failures.push(format!("system {k}"));
        }
    }

    // union and polar examples
    let xy = [var("x"), var("y")];
    let pt = |a: i64, b: i64| {
        Formulation::new(
            xy.to_vec(),
            Vec::new(),
            Vec::new(),
            vec![
                LinearConstraint::eq([(xy[0].clone(), Rational::from(1))], Rational::from(a)),
                LinearConstraint::eq([(xy[1].clone(), Rational::from(1))], Rational::from(b)),
            ],
        )
        .unwrap()
    };
    let seg = Formulation::new(
        xy.to_vec(),
        Vec::new(),
        vec![
            LinearConstraint::le([(xy[1].clone(), Rational::from(-1))], Rational::zero()),
            LinearConstraint::le([(xy[1].clone(), Rational::from(1))], Rational::from(1)),
        ],
        vec![LinearConstraint::eq([(xy[0].clone(), Rational::from(1))], Rational::from(1))],
    )
    .unwrap();
    let square = Formulation::box_formulation(&xy, &Rational::zero(), &Rational::one());
    let x1 = [var("x")];
    let point1 = |a: i64| Formulation::box_formulation(&x1, &Rational::from(a), &Rational::from(a));
    let checks: Vec<(&str, Formulation, Vec<Vec<Rational>>)> = vec![
        ("union point+segment", balas_union(&pt(0, 0), &seg).unwrap(), pts(&[&[0, 0], &[1, 0], &[1, 1]])),
        ("union square+square", balas_union(&square, &square).unwrap(), pts(&[&[0, 0], &[0, 1], &[1, 0], &[1, 1]])),
        ("union {0}+{1}", balas_union(&point1(0), &point1(1)).unwrap(), pts(&[&[0], &[1]])),
        ("polar square", polar_eta(&square, &Rational::one()).unwrap(), pts(&[&[0, 0], &[1, 0], &[0, 1]])),
        ("polar {1}", polar_eta(&point1(1), &Rational::one()).unwrap(), pts(&[&[0], &[1]])),
    ];
    for (name, f, want) in &checks {
        let got = vertex_set(&project(f, DEFAULT_FM_CAP).unwrap());
        if &got != want {
            failures.push(format!("{name}: vertices {got:?}"));
        }
    }
    let ua = balas_union(&square, &seg).unwrap().size_metrics().num_inequalities;
    if ua != square.inequalities().len() + seg.inequalities().len() + 2 {
        failures.push("union inequality count".into());
    }
    // polar of STAB(complement of P3) is STAB(P3)
    let p3 = path(3);
    let polar = polar_eta(&protoef::decomposition::qstab_formulation(&p3.complement()), &Rational::one()).unwrap();
    let mut m = Maximizer::new(&polar).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let obj = random_objective(&p3.vars(), -10, 10, &mut rng);
        if m.max(&obj).unwrap() != Some(max_weight_stable_set(&p3, &weights(&obj, &p3.vars())).0) {
            failures.push("polar of STAB(complement P3)".into());
            break;
        }
    }
    let passed = failures.is_empty();
    line(
        9,
        passed,
        "lp_solve = Fourier-Motzkin vertex bounds on 100 systems; union and polar examples reproduce",
        &format!("{SYSTEMS} systems ({empty} empty), {} worked examples, failures {:?}", checks.len() + 2, failures),
    );
    assert!(passed);
}
