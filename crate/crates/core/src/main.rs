use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use protoef::decomposition::{build_direct, build_threshold};
use protoef::formulation::Formulation;
use protoef::graph::{Graph, Poset};
use protoef::pair::PolytopePair;
use protoef::protocol::{compile, ProtocolTree};
use protoef::special::mud::mud_size_constant;
use protoef::special::{clawfree_full_ef, clawfree_reduced_ef, comparability_full_ef, comparability_reduced_ef, mud_tree, MinUpDown};
use protoef::unambiguous::{compile_unambiguous, RectanglePartition, UnambiguousOptions};
use protoef::verify::{check_sandwich, fm_equal, projections_agree, verify_partition, DEFAULT_FM_CAP};
use protoef::yannakakis::{build_tree_with, census, YannakakisOptions};
use protoef::Error;

/// Extended formulations from communication protocols and graph
/// decompositions, with exact LP certificates.
#[derive(Parser)]
#[command(name = "protoef", version)]
struct Cli {
    /// Seed for randomised checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a formulation.
    #[command(subcommand)]
    Build(Build),
    /// Check a formulation or a rectangle partition.
    #[command(subcommand)]
    Verify(Verify),
    /// Convert a formulation (JSON or LP text) to another format.
    Export {
        format: Format,
        #[arg(long)]
        ef: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Print size metrics and, optionally, a protocol-tree census.
    Stats {
        #[arg(long)]
        ef: PathBuf,
        #[arg(long)]
        tree: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Lp,
}

#[derive(Args)]
struct Out {
    /// Formulation output (stdout when omitted).
    #[arg(short = 'o', long = "out")]
    out: Option<PathBuf>,
    /// Also write the protocol or decomposition tree as JSON.
    #[arg(long)]
    tree: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Build {
    /// Clique-vs-stable-set protocol for (STAB(G), QSTAB(G)).
    Yannakakis {
        #[arg(long)]
        graph: PathBuf,
        /// Vertex order as a comma-separated permutation of 0..n.
        #[arg(long)]
        order: Option<String>,
        /// Shrink to closed neighbourhoods after Alice's vertex.
        #[arg(long)]
        closed_neighborhood: bool,
        /// Leaf census by combined input size.
        #[arg(long)]
        census: Option<PathBuf>,
        /// The leaves' rectangle partition of the slack matrix.
        #[arg(long)]
        partition: Option<PathBuf>,
        /// The (STAB, QSTAB) pair the partition refers to.
        #[arg(long)]
        pair: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
    /// General decomposition tree with clique formulations at the leaves.
    Direct {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 3)]
        leaf_size: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Decomposition tree for graphs without an induced threshold pattern.
    Threshold {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        pattern: PathBuf,
        /// Threshold ordering of the pattern's vertices.
        #[arg(long)]
        order: Option<String>,
        #[command(flatten)]
        out: Out,
    },
    /// Min-up/min-down polytope.
    Minupdown {
        #[arg(long = "T")]
        t: usize,
        #[arg(long = "L")]
        big_l: usize,
        #[arg(long)]
        ell: usize,
        #[command(flatten)]
        out: Out,
    },
    /// K_{1,t}-free graphs.
    Clawfree {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 3)]
        t: usize,
        /// Keep only vertex and edge equations.
        #[arg(long)]
        reduced: bool,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Comparability graph of a poset.
    Comparability {
        #[arg(long)]
        poset: PathBuf,
        /// Keep only element and comparable-pair equations.
        #[arg(long)]
        reduced: bool,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Compile a protocol tree given as JSON.
    FromProtocol {
        #[arg(long)]
        tree: PathBuf,
        /// Resolve value-labelled leaves against this pair.
        #[arg(long)]
        pair: Option<PathBuf>,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Compile a rectangle partition of a pair's slack matrix.
    FromRectangles {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        /// Keep nodes that no matrix entry reaches.
        #[arg(long)]
        no_prune: bool,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// STAB(G) ⊆ π(F) ⊆ QSTAB(G).
    Sandwich {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        ef: PathBuf,
        #[command(flatten)]
        report: ReportOut,
    },
    /// Disjointness, coverage and monochromaticity of a partition.
    Partition {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[command(flatten)]
        report: ReportOut,
    },
    /// Compare the projections of two formulations.
    Equality {
        #[arg(long)]
        ef: PathBuf,
        #[arg(long)]
        other: PathBuf,
        #[arg(long, default_value_t = 200)]
        directions: usize,
        /// Also decide equality exactly by Fourier–Motzkin.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = DEFAULT_FM_CAP)]
        cap: usize,
        #[command(flatten)]
        report: ReportOut,
    },
}

#[derive(Args)]
struct ReportOut {
    /// Report output (stdout when omitted).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Keep wall-clock timings in the report.
    #[arg(long)]
    timing: bool,
}

enum Failure {
    Input(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn read(p: &Path) -> Res<String> {
    fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
}

fn write(p: Option<&Path>, text: &str) -> Res<()> {
    let mut s = text.to_string();
    if !s.ends_with('\n') {
        s.push('\n');
    }
    match p {
        Some(p) => fs::write(p, s).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serialisable")
}

fn load_graph(p: &Path) -> Res<Graph> {
    Ok(Graph::load(&read(p)?)?)
}

fn load_ef(p: &Path) -> Res<Formulation> {
    let text = read(p)?;
    if text.trim_start().starts_with('{') {
        Ok(Formulation::from_json(&text)?)
    } else {
        Ok(Formulation::from_lp_text(&text)?)
    }
}

fn parse_order(s: &str) -> Res<Vec<usize>> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| Failure::Input(format!("bad order entry {x:?}"))))
        .collect()
}

fn summary(name: &str, f: &Formulation) {
    let m = f.size_metrics();
    eprintln!(
        "{name}: {} inequalities, {} equations, {} variables ({} auxiliary)",
        m.num_inequalities, m.num_equations, m.num_variables, m.num_aux
    );
}

fn emit(name: &str, f: &Formulation, out: Option<&Path>) -> Res<()> {
    summary(name, f);
    write(out, &f.to_json())
}

fn build(cmd: Build) -> Res<()> {
    match cmd {
        Build::Yannakakis { graph, order, closed_neighborhood, census: census_out, partition, pair, out } => {
            let mut g = load_graph(&graph)?;
            if let Some(o) = order {
                g = g.permuted(&parse_order(&o)?)?;
            }
            let t = build_tree_with(&g, YannakakisOptions { closed_neighborhood })?;
            let f = t.formulation()?;
            let c = census(&t);
            eprintln!("yannakakis: {} leaves, max |C_R|+|S_R| = {}", t.leaves.len(), t.max_input_size());
            if let Some(p) = census_out {
                write(Some(&p), &json(&c))?;
            }
            if let Some(p) = out.tree {
                write(Some(&p), &t.tree.to_json())?;
            }
            if let Some(p) = partition {
                write(Some(&p), &t.partition().to_json())?;
            }
            if let Some(p) = pair {
                write(Some(&p), &PolytopePair::stab_qstab(&g).to_json())?;
            }
            emit("yannakakis", &f, out.out.as_deref())
        }
        Build::Direct { graph, leaf_size, out } => {
            let g = load_graph(&graph)?;
            let (f, t) = build_direct(&g, leaf_size)?;
            let c = t.census();
            eprintln!("direct: {} nodes, {} leaves, height {}", c.nodes, c.leaves, c.height);
            if let Some(p) = out.tree {
                write(Some(&p), &json(&t))?;
            }
            emit("direct", &f, out.out.as_deref())
        }
        Build::Threshold { graph, pattern, order, out } => {
            let g = load_graph(&graph)?;
            let h = load_graph(&pattern)?;
            let order = order.map(|o| parse_order(&o)).transpose()?;
            let (f, t) = match build_threshold(&g, &h, order.as_deref()) {
                Err(Error::ForbiddenPattern { witness }) => {
                    let names: Vec<&str> = witness.iter().map(|&v| g.names()[v].as_str()).collect();
                    return Err(Failure::Input(format!(
                        "graph contains the pattern as an induced subgraph at [{}]",
                        names.join(", ")
                    )));
                }
                r => r?,
            };
            let c = t.census();
            eprintln!("threshold: {} nodes, {} leaves, max leaf size {}", c.nodes, c.leaves, c.max_leaf_size);
            if let Some(p) = out.tree {
                write(Some(&p), &json(&t))?;
            }
            emit("threshold", &f, out.out.as_deref())
        }
        Build::Minupdown { t, big_l, ell, out } => {
            let inst = MinUpDown::new(t, big_l, ell)?;
            let tree = mud_tree(&inst);
            let f = compile(&tree)?;
            eprintln!("minupdown: C = {:.4} (inequalities / T(L+ell)^2)", mud_size_constant(&inst, &f));
            if let Some(p) = out.tree {
                write(Some(&p), &tree.to_json())?;
            }
            emit("minupdown", &f, out.out.as_deref())
        }
        Build::Clawfree { graph, t, reduced, out } => {
            let g = load_graph(&graph)?;
            let f = if reduced { clawfree_reduced_ef(&g, t) } else { clawfree_full_ef(&g, t) }?;
            emit("clawfree", &f, out.as_deref())
        }
        Build::Comparability { poset, reduced, out } => {
            let p = Poset::from_json(&read(&poset)?)?;
            let f = if reduced { comparability_reduced_ef(&p) } else { comparability_full_ef(&p) }?;
            emit("comparability", &f, out.as_deref())
        }
        Build::FromProtocol { tree, pair, out } => {
            let mut t = ProtocolTree::from_json(&read(&tree)?)?;
            if let Some(p) = pair {
                t.resolve_leaves(&PolytopePair::from_json(&read(&p)?)?)?;
            }
            emit("from-protocol", &compile(&t)?, out.as_deref())
        }
        Build::FromRectangles { pair, partition, no_prune, out } => {
            let pair = PolytopePair::from_json(&read(&pair)?)?;
            let part = RectanglePartition::from_json(&read(&partition)?)?;
            let opts = UnambiguousOptions { prune: !no_prune, ..Default::default() };
            let (f, t) = compile_unambiguous(&pair, &part, opts)?;
            eprintln!(
                "from-rectangles: {} rectangles, {} leaves, {} stages, halving {}",
                part.len(),
                t.leaves.len(),
                t.max_stages(),
                if t.halves() { "holds" } else { "FAILS" }
            );
            if let Some(p) = out.tree {
                write(Some(&p), &t.tree.to_json())?;
            }
            emit("from-rectangles", &f, out.out.as_deref())
        }
    }
}

fn finish(passed: bool, report: String, out: &ReportOut) -> Res<()> {
    write(out.report.as_deref(), &report)?;
    eprintln!("{}", if passed { "PASS" } else { "FAIL" });
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn verify(cmd: Verify, seed: u64) -> Res<()> {
    match cmd {
        Verify::Sandwich { graph, ef, report } => {
            let g = load_graph(&graph)?;
            let f = load_ef(&ef)?;
            let mut r = check_sandwich(&g, &f)?;
            if !report.timing {
                r.millis = 0;
            }
            finish(r.passed, json(&r), &report)
        }
        Verify::Partition { pair, partition, report } => {
            let pair = PolytopePair::from_json(&read(&pair)?)?;
            let part = RectanglePartition::from_json(&read(&partition)?)?;
            let r = verify_partition(&part, &pair)?;
            finish(r.passed, json(&r), &report)
        }
        Verify::Equality { ef, other, directions, exact, cap, report } => {
            let a = load_ef(&ef)?;
            let b = load_ef(&other)?;
            let mut r = projections_agree(&a, &b, directions, seed)?;
            if !report.timing {
                r.millis = 0;
            }
            let exact_equal = if exact { Some(fm_equal(&a, &b, cap)?) } else { None };
            #[derive(Serialize)]
            struct Both {
                sampled: protoef::verify::AgreementReport,
                #[serde(skip_serializing_if = "Option::is_none")]
                exact: Option<bool>,
            }
            let passed = r.agree && exact_equal != Some(false);
            finish(passed, json(&Both { sampled: r, exact: exact_equal }), &report)
        }
    }
}

fn run(cli: Cli) -> Res<()> {
    match cli.cmd {
        Cmd::Build(b) => build(b),
        Cmd::Verify(v) => verify(v, cli.seed),
        Cmd::Export { format, ef, out } => {
            let f = load_ef(&ef)?;
            let text = match format {
                Format::Json => f.to_json(),
                Format::Lp => f.to_lp_text(),
            };
            write(out.as_deref(), &text)
        }
        Cmd::Stats { ef, tree } => {
            let f = load_ef(&ef)?;
            #[derive(Serialize)]
            struct Stats {
                metrics: protoef::formulation::SizeMetrics,
                #[serde(skip_serializing_if = "Option::is_none")]
                tree: Option<protoef::protocol::TreeCensus>,
            }
            let tree = match tree {
                Some(p) => Some(ProtocolTree::from_json(&read(&p)?)?.census()),
                None => None,
            };
            write(None, &json(&Stats { metrics: f.size_metrics(), tree }))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
