//! Command-line front end. Exit codes are made for CI: 0 success or
//! certified pass, 1 certification fail, 2 input or validation error,
//! 3 oracle step budget exceeded, 4 inconclusive interval precision.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use chibound::bounds::{self, check_value, BoundFn, Verdict};
use chibound::generators::{
    alternate_o1_o2, lex_power, mycielski_tower, random_optree, GenConfig, LeafPool, NodeMix,
};
use chibound::graph::{graph_from_text, graph_to_text, Coloring, Graph};
use chibound::optree::{
    self, normalize_glue_order, realize, substitution_depth, tree_from_json, tree_to_json,
    OpTree,
};
use chibound::oracle::{self, Budget, OracleError, MAX_VERTICES};
use chibound::synthesis::{
    color_by_depth, color_kglue, color_poly, color_supermult, reduce_to_base, Certificate,
    SynthesisError,
};

#[derive(Parser)]
#[command(name = "chibound", version, about = "Builds, colors and certifies graphs assembled by operation trees")]
struct Cli {
    /// Step budget for exact oracle searches.
    #[arg(long, global = true, env = "CHIBOUND_BUDGET", default_value_t = 100_000_000)]
    budget: u64,
    /// Ceiling for interval refinement when comparing against bounds.
    #[arg(long, global = true, default_value_t = bounds::MAX_PRECISION_BITS)]
    precision_bits: u32,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the graph an operation tree describes.
    Realize {
        tree: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Check an operation tree without building anything.
    Validate { tree: PathBuf },
    /// Print the substitution depth of a tree.
    Depth { tree: PathBuf },
    /// Synthesize a proper coloring and a certificate for a tree.
    Color(ColorArgs),
    /// Re-check a coloring file against a graph and a bound.
    Verify {
        graph: PathBuf,
        coloring: PathBuf,
        #[arg(long)]
        bound: String,
    },
    /// Exact reference computations on a graph file.
    Oracle(OracleArgs),
    /// Deterministic graph and tree families.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Rewrite a gluing tree so no clique gluing sits above a bounded-overlap gluing.
    Normalize {
        tree: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Collapse clique-gluing regions to a chromatically equivalent witness graph.
    Reduce {
        tree: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ColorArgs {
    tree: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Bound expression; the shape the method expects is checked first.
    #[arg(long)]
    bound: String,
    /// Declared gluing width; must match the tree when given.
    #[arg(long)]
    k: Option<u32>,
    /// Coloring file destination (stdout when omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Certificate report destination (stdout when omitted).
    #[arg(long)]
    cert: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Pair codes by substitution depth; bound is the leaf class bound.
    Depth,
    /// Geometric weight buckets; bound is x^A or polystar(A).
    Poly,
    /// Shared heavy region; bound is a supermultiplicative leaf bound.
    Supermult,
    /// Constraint passing across overlaps; bound is kglue(f, k) or bare f.
    Kglue,
}

#[derive(Args)]
#[command(group = ArgGroup::new("what").required(true).multiple(false))]
struct OracleArgs {
    graph: PathBuf,
    /// Clique number.
    #[arg(long, group = "what")]
    omega: bool,
    /// Chromatic number.
    #[arg(long, group = "what")]
    chi: bool,
    /// Fractional chromatic number, exact.
    #[arg(long, group = "what")]
    chif: bool,
    /// Least minimum vertex cutset of size at most K.
    #[arg(long, group = "what", value_name = "K")]
    cutset: Option<u32>,
}

#[derive(Subcommand)]
enum GenCmd {
    /// Iterated Mycielskian tower, t steps above an edge.
    Mycielski {
        t: u32,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Alternated blow-up/Mycielskian sequence.
    #[command(name = "alt-o1o2")]
    AltO1O2 {
        t: u32,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// i-fold lexicographic power of a graph file.
    Lexpow {
        graph: PathBuf,
        i: u32,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Random operation tree from a seeded draw.
    Tree {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        max_vertices: usize,
        #[arg(long, default_value_t = 4)]
        max_depth: u32,
        #[arg(long, value_enum, default_value_t = MixArg::Substitute)]
        mix: MixArg,
        /// Width stamped on generated bounded-overlap gluings.
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_enum, default_value_t = PoolArg::Completes)]
        pool: PoolArg,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MixArg {
    Leaves,
    Substitute,
    KGlue,
    Glue,
    SubstituteCliqueGlue,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum PoolArg {
    Completes,
    Mixed,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Failure {
        let code = match e {
            OracleError::BudgetExceeded { .. } => 3,
            OracleError::TooLarge { .. } => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<SynthesisError> for Failure {
    fn from(e: SynthesisError) -> Failure {
        let code = match &e {
            SynthesisError::LeafBoundViolated { .. } => 1,
            SynthesisError::Inconclusive { .. } => 4,
            SynthesisError::Oracle(OracleError::BudgetExceeded { .. }) => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = cli.budget;
    let bits = cli.precision_bits;
    match run(cli.cmd, budget, bits) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Cmd, budget: u64, bits: u32) -> Result<ExitCode, Failure> {
    match cmd {
        Cmd::Realize { tree, out } => {
            let g = realize(&load_tree(&tree)?).map_err(|e| Failure::input(e.to_string()))?;
            emit(out.as_deref(), &graph_to_text(&g))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Validate { tree } => {
            let diagnostics = optree::validate(&load_tree(&tree)?);
            if diagnostics.is_empty() {
                println!("ok");
                Ok(ExitCode::SUCCESS)
            } else {
                print!("{diagnostics}");
                Ok(ExitCode::from(2))
            }
        }
        Cmd::Depth { tree } => {
            let d = substitution_depth(&load_tree(&tree)?)
                .map_err(|e| Failure::input(e.to_string()))?;
            println!("{d}");
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Color(args) => color(args, bits),
        Cmd::Verify { graph, coloring, bound } => verify(&graph, &coloring, &bound, bits),
        Cmd::Oracle(args) => oracle_cmd(args, budget),
        Cmd::Gen(family) => gen(family),
        Cmd::Normalize { tree, out } => {
            let n = normalize_glue_order(&load_tree(&tree)?)
                .map_err(|e| Failure::input(e.to_string()))?;
            emit(out.as_deref(), &tree_to_json(&n))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Reduce { tree, out } => {
            let (witness, _) = reduce_to_base(&load_tree(&tree)?)?;
            emit(out.as_deref(), &graph_to_text(&witness))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn color(args: ColorArgs, bits: u32) -> Result<ExitCode, Failure> {
    let t = load_tree(&args.tree)?;
    let expr = bounds::parse_bound(&args.bound)
        .map_err(|e| Failure::input(format!("bound expression: {e}")))?;
    let (coloring, cert) = match args.method {
        Method::Depth => color_by_depth(&t, &expr)?,
        Method::Supermult => color_supermult(&t, &expr)?,
        Method::Poly => {
            let a = poly_exponent(&expr).ok_or_else(|| {
                Failure::input("method poly expects a bound of the form x^A or polystar(A)")
            })?;
            color_poly(&t, a)?
        }
        Method::Kglue => {
            let derived = t.max_glue_width().unwrap_or(1).max(1);
            let (inner, declared) = match expr {
                BoundFn::KGlueShift { inner, k } => (*inner, Some(k)),
                other => (other, args.k),
            };
            if declared.is_some_and(|k| k != derived) {
                return Err(Failure::input(format!(
                    "declared gluing width {} but the tree has width {derived}",
                    declared.unwrap()
                )));
            }
            color_kglue(&t, &inner, None)?
        }
    };
    emit(args.out.as_deref(), &coloring.to_text())?;
    emit(args.cert.as_deref(), &cert.to_json())?;
    Ok(verdict_exit(&cert, bits))
}

fn verify(graph: &Path, coloring: &Path, bound: &str, bits: u32) -> Result<ExitCode, Failure> {
    let g = load_graph(graph)?;
    let col = Coloring::parse_text(&read(coloring)?)
        .map_err(|e| Failure::input(format!("{}: {e}", coloring.display())))?;
    let expr = bounds::parse_bound(bound)
        .map_err(|e| Failure::input(format!("bound expression: {e}")))?;
    if g.vertex_count() > MAX_VERTICES {
        return Err(Failure::input(format!(
            "graph has {} vertices; oracles support at most {MAX_VERTICES}",
            g.vertex_count()
        )));
    }
    match g.improper_edge(&col) {
        Ok(None) => {}
        Ok(Some((u, v))) => {
            eprintln!("coloring repeats a color across the edge {u} ~ {v}");
            return Ok(ExitCode::from(1));
        }
        Err(e) => return Err(Failure::input(e.to_string())),
    }
    let omega = u64::from(oracle::clique_number(&g));
    let colors_used = col.colors_used();
    let verdict = check_value(&expr, omega, colors_used, bits)
        .map_err(|e| Failure::input(e.to_string()))?;
    let cert = Certificate { bound: expr, omega, colors_used, verdict, trace: None };
    println!("{}", cert.to_json());
    Ok(verdict_exit(&cert, bits))
}

fn verdict_exit(cert: &Certificate, _bits: u32) -> ExitCode {
    match cert.verdict {
        Verdict::Pass => ExitCode::SUCCESS,
        Verdict::Fail => ExitCode::from(1),
        Verdict::InconclusivePrecision => ExitCode::from(4),
    }
}

fn oracle_cmd(args: OracleArgs, budget: u64) -> Result<ExitCode, Failure> {
    let g = load_graph(&args.graph)?;
    if g.vertex_count() > MAX_VERTICES {
        return Err(Failure::input(format!(
            "graph has {} vertices; oracles support at most {MAX_VERTICES}",
            g.vertex_count()
        )));
    }
    if args.omega {
        println!("{}", oracle::clique_number(&g));
    } else if args.chi {
        println!("{}", oracle::chromatic_number(&g, Budget::new(budget))?);
    } else if args.chif {
        println!("{}", oracle::fractional_chromatic_number(&g, Budget::new(budget))?);
    } else if let Some(k) = args.cutset {
        let found = oracle::min_vertex_cutset(&g, k);
        if found.found {
            let ids: Vec<String> = found.cutset.iter().map(|v| v.to_string()).collect();
            println!("{}", ids.join(" "));
        } else {
            println!("none");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn gen(family: GenCmd) -> Result<ExitCode, Failure> {
    match family {
        GenCmd::Mycielski { t, out } => {
            let g = mycielski_tower(t).map_err(|e| Failure::input(e.to_string()))?;
            emit(out.as_deref(), &graph_to_text(&g))?;
        }
        GenCmd::AltO1O2 { t, out } => {
            let g = alternate_o1_o2(t).map_err(|e| Failure::input(e.to_string()))?;
            emit(out.as_deref(), &graph_to_text(&g))?;
        }
        GenCmd::Lexpow { graph, i, out } => {
            let f = load_graph(&graph)?;
            let g = lex_power(&f, i).map_err(|e| Failure::input(e.to_string()))?;
            emit(out.as_deref(), &graph_to_text(&g))?;
        }
        GenCmd::Tree { seed, max_vertices, max_depth, mix, k, pool, out } => {
            let cfg = GenConfig {
                seed,
                max_vertices,
                max_depth,
                mix: node_mix(mix, k),
                pool: match pool {
                    PoolArg::Completes => LeafPool::Completes,
                    PoolArg::Mixed => LeafPool::Mixed,
                },
            };
            let t: OpTree = random_optree(&cfg);
            emit(out.as_deref(), &tree_to_json(&t))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn node_mix(mix: MixArg, k: u32) -> NodeMix {
    match mix {
        MixArg::Leaves => NodeMix::leaves_only(),
        MixArg::Substitute => NodeMix::substitute_only(),
        MixArg::KGlue => NodeMix::k_glue_only(k),
        MixArg::Glue => NodeMix::glue_only(k),
        MixArg::SubstituteCliqueGlue => NodeMix::substitute_and_clique_glue(),
        MixArg::All => NodeMix::all(k),
    }
}

fn poly_exponent(b: &BoundFn) -> Option<u32> {
    match b {
        BoundFn::PolyStar { a } => Some(*a),
        BoundFn::Polynomial(c) => {
            let a = u32::try_from(c.len().checked_sub(1)?).ok()?;
            (*b == BoundFn::power(a)).then_some(a)
        }
        _ => None,
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_tree(path: &Path) -> Result<OpTree, Failure> {
    tree_from_json(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    graph_from_text(&read(path)?)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let mut owned;
    let text = if text.ends_with('\n') {
        text
    } else {
        owned = text.to_string();
        owned.push('\n');
        &owned
    };
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
