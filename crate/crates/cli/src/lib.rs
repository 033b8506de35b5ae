//! Command-line front end for the `powertree` library.
//!
//! Every subcommand prints one JSON record (or CSV for tables) on standard
//! output. Failures print a JSON error record on standard error and exit
//! with status 1; usage errors exit with status 2.

pub mod bench;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use powertree::analysis::{
    check_delta_properties, classify_edges, delta_spanning, delta_steiner, witness_stats, DeltaKind,
};
use powertree::component::min_power_component;
use powertree::decomposition::{bounded_degree_decompose, component_graph, h_power_decompose, QChoice, WeightedTree};
use powertree::generate::{generate, GeneratorKind, GeneratorParams};
use powertree::irr::{irr_solve, IrrOptions};
use powertree::lp::{solve_lp, DEFAULT_TOL};
use powertree::path::min_power_path;
use powertree::reference::{baseline_min_cost, exact_min_power, exact_min_power_dp, mode_instance, SteinerCost, TreeMode};
use powertree::{parse_instance, Cost, EdgeId, Instance, NodeId};
use serde::Serialize;
use serde_json::{json, Value};

use bench::{format_summary, run_bench, write_csv, BenchConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] powertree::Error),
    #[error("{path}: {source}")]
    Instance { path: String, source: powertree::instance::InstanceError },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(_) => "solver",
            CliError::Instance { .. } => "instance",
            CliError::Io { .. } => "io",
            CliError::Config { .. } => "config",
            CliError::Csv(_) => "csv",
            CliError::Usage(_) => "usage",
        }
    }

    /// Machine-readable error record.
    pub fn record(&self) -> Value {
        json!({ "error": self.kind(), "message": self.to_string() })
    }
}

#[derive(Debug, Parser)]
#[command(name = "powertree", version, about = "Min-power Steiner and spanning trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance and print the tree.
    Solve(SolveArgs),
    /// Minimum-power path between two nodes.
    Path(PathArgs),
    /// Minimum-power component on a terminal subset.
    Component(ComponentArgs),
    /// Decompose a tree of the instance into bounded components.
    Decompose(DecomposeArgs),
    /// Solve the component LP relaxation.
    Lp(LpArgs),
    /// Analysis quantities.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Run a benchmark suite.
    Bench(BenchArgs),
    /// Generate a random instance.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    /// Branch and bound (at most 12 nodes).
    Exact,
    /// Terminal-subset dynamic program (at most 12 terminals).
    ExactDp,
    /// Min-cost tree evaluated for power.
    Mincost,
    /// Iterative randomized rounding.
    Irr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Steiner,
    Spanning,
}

impl From<ModeArg> for TreeMode {
    fn from(m: ModeArg) -> TreeMode {
        match m {
            ModeArg::Steiner => TreeMode::Steiner,
            ModeArg::Spanning => TreeMode::Spanning,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance file.
    pub file: PathBuf,
    #[arg(long, value_enum, default_value = "irr")]
    pub algo: Algo,
    #[arg(long, value_enum, default_value = "steiner")]
    pub mode: ModeArg,
    /// Largest component size for IRR (2..=4).
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// IRR iteration cap; defaults to 50 times the edge count.
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// LP tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Include the per-iteration IRR trace.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub from: NodeId,
    #[arg(long)]
    pub to: NodeId,
}

#[derive(Debug, Args)]
pub struct ComponentArgs {
    pub file: PathBuf,
    /// Comma-separated terminal ids.
    #[arg(long, value_delimiter = ',', required = true)]
    pub terminals: Vec<NodeId>,
    #[arg(long, default_value_t = 4)]
    pub k_cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecomposeMethod {
    /// Degree-capped parts.
    Bounded,
    /// Degree-capped parts with at most h^h terminals each.
    Hpower,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    pub file: PathBuf,
    /// Comma-separated edge ids of the tree; all edges when omitted.
    #[arg(long, value_delimiter = ',')]
    pub edges: Vec<EdgeId>,
    #[arg(long, value_enum, default_value = "bounded")]
    pub method: DecomposeMethod,
    /// Degree cap for the bounded method.
    #[arg(long, default_value_t = 3)]
    pub delta: usize,
    /// Parameter h for the h-power method.
    #[arg(long, default_value_t = 3)]
    pub h: usize,
    /// Level offset for the h-power method: a number below h, or `best`.
    #[arg(long, default_value = "best")]
    pub q: String,
}

#[derive(Debug, Args)]
pub struct LpArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Table of harmonic deletion bounds as CSV.
    Delta(DeltaArgs),
    /// Heavy, middle and light edges of a tree.
    Classify(ClassifyArgs),
    /// Random witness-tree statistics around one node.
    Witness(WitnessArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DeltaKindArg {
    Steiner,
    Spanning,
}

#[derive(Debug, Args)]
pub struct DeltaArgs {
    #[arg(long, value_enum, default_value = "steiner")]
    pub kind: DeltaKindArg,
    /// Largest index (at most 50).
    #[arg(long, default_value_t = 10)]
    pub max_i: usize,
    /// Scale M.
    #[arg(long, default_value = "1")]
    pub scale: Cost,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    pub file: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    pub file: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub edges: Vec<EdgeId>,
    #[arg(long)]
    pub node: NodeId,
    #[arg(long)]
    pub i: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Suite config file.
    pub config: PathBuf,
    /// CSV output path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; overrides the config value.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value = "uniform-random")]
    pub kind: String,
    #[arg(long)]
    pub nodes: usize,
    #[arg(long, default_value_t = 2)]
    pub terminals: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub density: Option<f64>,
    #[arg(long)]
    pub max_cost: Option<u32>,
    #[arg(long)]
    pub exponent: Option<u32>,
    /// Two-level costs `a,b`.
    #[arg(long)]
    pub levels: Option<String>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn load(path: &Path) -> Result<Instance, CliError> {
    parse_instance(&read(path)?).map_err(|source| CliError::Instance { path: path.display().to_string(), source })
}

fn write_out(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn record<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("records serialize")
}

fn tree_of(inst: &Instance, edges: &[EdgeId]) -> Result<WeightedTree, CliError> {
    let all: Vec<EdgeId>;
    let ids = if edges.is_empty() {
        all = (0..inst.edge_count()).collect();
        &all
    } else {
        edges
    };
    Ok(WeightedTree::from_instance(inst, ids)?)
}

/// Runs a parsed command and returns what goes to standard output.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Solve(a) => solve(a),
        Command::Path(a) => {
            let inst = load(&a.file)?;
            Ok(record(&min_power_path(&inst, a.from, a.to)?))
        }
        Command::Component(a) => {
            let inst = load(&a.file)?;
            Ok(record(&min_power_component(&inst, &a.terminals, a.k_cap)?))
        }
        Command::Decompose(a) => decompose(a),
        Command::Lp(a) => {
            let inst = load(&a.file)?;
            let cols = powertree::component::enumerate_columns(&inst, a.k)?;
            let lp = solve_lp(&inst, cols, a.tol)?;
            let support: Vec<Value> = lp
                .columns
                .iter()
                .zip(&lp.x)
                .filter(|(_, &x)| x > a.tol)
                .map(|(c, &x)| json!({ "terminals": c.terminals, "sink": c.sink, "power": c.power, "x": x }))
                .collect();
            let rows: Vec<Vec<NodeId>> =
                lp.rows.iter().map(|&w| powertree::lp::LpState::row_terminals(&inst, w)).collect();
            Ok(record(&json!({
                "objective": lp.objective,
                "columns": lp.columns.len(),
                "rows": rows,
                "support": support,
                "history": lp.history,
            })))
        }
        Command::Analyze(cmd) => analyze(cmd),
        Command::Bench(a) => bench_cmd(a),
        Command::Gen(a) => gen(a),
    }
}

fn solve(a: SolveArgs) -> Result<String, CliError> {
    let inst = load(&a.file)?;
    let mode: TreeMode = a.mode.into();
    let mut out = json!({ "algorithm": format!("{:?}", a.algo).to_lowercase(), "mode": mode.to_string() });
    let tree = match a.algo {
        Algo::Exact => exact_min_power(&inst, mode)?,
        Algo::ExactDp => exact_min_power_dp(&inst, mode)?,
        Algo::Mincost => baseline_min_cost(&inst, mode, SteinerCost::ExactOrApprox)?,
        Algo::Irr => {
            let solved = mode_instance(&inst, mode)?;
            let opts = IrrOptions { k: a.k, seed: a.seed, max_iters: a.max_iters, tol: a.tol };
            let (tree, trace) = irr_solve(&solved, opts).map_err(powertree::Error::from)?;
            out["iterations"] = json!(trace.iterations.len());
            out["seed"] = json!(a.seed);
            if a.trace {
                out["trace"] = serde_json::to_value(&trace).expect("trace serializes");
            }
            tree
        }
    };
    out["tree"] = serde_json::to_value(&tree).expect("tree serializes");
    Ok(record(&out))
}

fn decompose(a: DecomposeArgs) -> Result<String, CliError> {
    let inst = load(&a.file)?;
    let tree = tree_of(&inst, &a.edges)?;
    let (dec, extra) = match a.method {
        DecomposeMethod::Bounded => (bounded_degree_decompose(&tree, a.delta)?, json!({ "delta": a.delta })),
        DecomposeMethod::Hpower => {
            let q = match a.q.as_str() {
                "best" => QChoice::Best,
                s => QChoice::Fixed(s.parse().map_err(|_| CliError::Usage(format!("bad offset `{s}`")))?),
            };
            let r = h_power_decompose(&tree, a.h, q)?;
            let extra = json!({ "h": a.h, "q": r.q, "per_q": r.per_q, "stage1_power": r.stage1_power });
            (r.decomposition, extra)
        }
    };
    let graph = component_graph(&tree, &dec);
    Ok(record(&json!({
        "parameters": extra,
        "decomposition": dec,
        "max_part_degree": dec.max_part_degree(&tree),
        "component_graph_is_tree": graph.is_tree,
    })))
}

fn analyze(cmd: AnalyzeCommand) -> Result<String, CliError> {
    match cmd {
        AnalyzeCommand::Delta(a) => {
            let kind = match a.kind {
                DeltaKindArg::Steiner => DeltaKind::Steiner,
                DeltaKindArg::Spanning => DeltaKind::Spanning,
            };
            check_delta_properties(kind, a.max_i)?;
            let mut s = String::from("i,delta\n");
            for i in 1..=a.max_i {
                let value = match kind {
                    DeltaKind::Spanning => delta_spanning(a.scale.ratio(), i)?.to_string(),
                    DeltaKind::Steiner => format!("{:.12}", delta_steiner(a.scale.to_f64(), i)?),
                };
                s.push_str(&format!("{i},{value}\n"));
            }
            Ok(s)
        }
        AnalyzeCommand::Classify(a) => {
            let inst = load(&a.file)?;
            let tree = tree_of(&inst, &a.edges)?;
            let c = classify_edges(&tree);
            Ok(record(&json!({ "classification": c, "cost": tree.cost(), "power": tree.power() })))
        }
        AnalyzeCommand::Witness(a) => {
            let inst = load(&a.file)?;
            let tree = tree_of(&inst, &a.edges)?;
            Ok(record(&witness_stats(&tree, a.node, a.i, a.trials, a.seed)?))
        }
    }
}

/// Thread count: the flag, else the config value; `POWERTREE_THREADS` caps
/// whichever applies (and the rayon default).
fn pool_size(flag: Option<usize>, cfg: Option<usize>) -> Option<usize> {
    let cap = std::env::var("POWERTREE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0);
    match (flag.or(cfg).filter(|&n| n > 0), cap) {
        (Some(n), Some(c)) => Some(n.min(c)),
        (n, c) => n.or(c),
    }
}

fn bench_cmd(a: BenchArgs) -> Result<String, CliError> {
    let cfg = BenchConfig::parse(&read(&a.config)?)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = pool_size(a.threads, cfg.threads) {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(e.to_string()))?;
    let report = pool.install(|| run_bench(&cfg));
    let mut csv_buf = Vec::new();
    write_csv(&report.rows, &mut csv_buf)?;
    let csv_text = String::from_utf8(csv_buf).expect("csv is utf-8");
    let summary = format_summary(&report);
    match a.out {
        Some(path) => {
            write_out(&path, &csv_text)?;
            Ok(summary)
        }
        None => Ok(format!("{csv_text}\n{summary}")),
    }
}

fn gen(a: GenArgs) -> Result<String, CliError> {
    let kind: GeneratorKind = a.kind.parse()?;
    let mut p = GeneratorParams::new(a.nodes, a.terminals, a.seed);
    if let Some(d) = a.density {
        p = p.density(d);
    }
    if let Some(c) = a.max_cost {
        p = p.max_cost(c);
    }
    if let Some(e) = a.exponent {
        p = p.exponent(e);
    }
    if let Some(levels) = &a.levels {
        let bad = || CliError::Usage(format!("bad levels `{levels}`, expected a,b"));
        let (x, y) = levels.split_once(',').ok_or_else(bad)?;
        p = p.levels(x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?);
    }
    let text = generate(kind, &p)?.to_text();
    match a.out {
        Some(path) => {
            write_out(&path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}
