//! Batch benchmark harness.
//!
//! A suite config is line oriented. `key = value` lines set suite options,
//! `instance ...` and `solver ...` lines add stanzas made of `key=value`
//! tokens. `#` starts a comment.
//!
//! ```text
//! seed = 42
//! repetitions = 1
//! instance kind=uniform-random nodes=8 terminals=3 count=10 mode=spanning
//! solver exact
//! solver mincost
//! solver irr k=3
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use powertree::analysis::theoretical_factor;
use powertree::generate::{generate, GeneratorKind, GeneratorParams};
use powertree::irr::{irr_solve, IrrOptions};
use powertree::lp::DEFAULT_TOL;
use powertree::reference::{
    baseline_min_cost, exact_min_power, exact_min_power_dp, mode_instance, SteinerCost, TreeMode,
};
use powertree::util::mix_seed;
use powertree::{Cost, Instance, PowerTree};
use rayon::prelude::*;
use serde::Serialize;

use crate::CliError;

/// Bump when the CSV columns change.
pub const CSV_VERSION: u32 = 1;

/// Column order of the benchmark CSV. `wall_ms` is the only column that
/// varies between identical runs.
pub const CSV_HEADER: [&str; 18] = [
    "row", "instance", "kind", "mode", "nodes", "edges", "terminals", "solver", "k", "seed", "status", "power",
    "cost", "exact_power", "ratio", "iterations", "wall_ms", "error",
];

const INSTANCE_SALT: u64 = 0x1a57_a11c_e5ee_d000;

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub kind: GeneratorKind,
    pub mode: TreeMode,
    pub count: usize,
    pub params: GeneratorParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Exact,
    ExactDp,
    MinCost,
    Irr,
}

impl SolverKind {
    fn parse(name: &str) -> Option<SolverKind> {
        match name {
            "exact" => Some(SolverKind::Exact),
            "exact-dp" => Some(SolverKind::ExactDp),
            "mincost" | "mst" => Some(SolverKind::MinCost),
            "irr" => Some(SolverKind::Irr),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::ExactDp => "exact-dp",
            SolverKind::MinCost => "mincost",
            SolverKind::Irr => "irr",
        }
    }

    fn is_exact(self) -> bool {
        matches!(self, SolverKind::Exact | SolverKind::ExactDp)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSpec {
    pub kind: SolverKind,
    pub k: usize,
    pub max_iters: Option<usize>,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub seed: u64,
    pub repetitions: usize,
    pub threads: Option<usize>,
    pub instances: Vec<InstanceSpec>,
    pub solvers: Vec<SolverSpec>,
}

fn config_err(line: usize, message: impl Into<String>) -> CliError {
    CliError::Config { line, message: message.into() }
}

fn num<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| config_err(line, format!("bad value `{value}` for `{key}`")))
}

impl BenchConfig {
    pub fn parse(text: &str) -> Result<BenchConfig, CliError> {
        let mut cfg = BenchConfig { seed: 0, repetitions: 1, threads: None, instances: Vec::new(), solvers: Vec::new() };
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut words = body.split_whitespace();
            let head = words.next().expect("nonempty line");
            match head {
                "instance" => cfg.instances.push(parse_instance_stanza(line, words)?),
                "solver" => cfg.solvers.push(parse_solver_stanza(line, words)?),
                _ => {
                    let (key, value) =
                        body.split_once('=').ok_or_else(|| config_err(line, format!("unknown directive `{head}`")))?;
                    let (key, value) = (key.trim(), value.trim());
                    match key {
                        "seed" => cfg.seed = num(line, key, value)?,
                        "repetitions" => cfg.repetitions = num(line, key, value)?,
                        "threads" => cfg.threads = Some(num(line, key, value)?),
                        _ => return Err(config_err(line, format!("unknown key `{key}`"))),
                    }
                }
            }
        }
        if cfg.repetitions == 0 {
            return Err(config_err(0, "repetitions must be positive"));
        }
        if cfg.instances.is_empty() || cfg.solvers.is_empty() {
            return Err(config_err(0, "suite needs at least one instance and one solver stanza"));
        }
        Ok(cfg)
    }
}

fn pairs<'a>(line: usize, words: impl Iterator<Item = &'a str>) -> Result<BTreeMap<&'a str, &'a str>, CliError> {
    words
        .map(|w| w.split_once('=').ok_or_else(|| config_err(line, format!("expected key=value, got `{w}`"))))
        .collect()
}

fn parse_instance_stanza<'a>(line: usize, words: impl Iterator<Item = &'a str>) -> Result<InstanceSpec, CliError> {
    let kv = pairs(line, words)?;
    let mut kind = GeneratorKind::UniformRandom;
    let mut mode = TreeMode::Steiner;
    let mut count = 1;
    let mut params = GeneratorParams::new(0, 2, 0);
    let mut levels = None;
    for (&key, &value) in &kv {
        match key {
            "kind" => kind = value.parse().map_err(|e: powertree::Error| config_err(line, e.to_string()))?,
            "mode" => mode = value.parse().map_err(|e: powertree::Error| config_err(line, e.to_string()))?,
            "count" => count = num(line, key, value)?,
            "nodes" => params.nodes = num(line, key, value)?,
            "terminals" => params.terminals = num(line, key, value)?,
            "density" => params.density = num(line, key, value)?,
            "max_cost" => params.max_cost = num(line, key, value)?,
            "exponent" => params.exponent = num(line, key, value)?,
            "grid" => params.grid = num(line, key, value)?,
            "levels" => {
                let (a, b) = value.split_once(',').ok_or_else(|| config_err(line, "levels takes `a,b`"))?;
                levels = Some((num::<Cost>(line, key, a)?, num::<Cost>(line, key, b)?));
            }
            _ => return Err(config_err(line, format!("unknown instance key `{key}`"))),
        }
    }
    if let Some((a, b)) = levels {
        params = params.levels(a, b);
    }
    if params.nodes == 0 {
        return Err(config_err(line, "instance stanza needs nodes=N"));
    }
    params.terminals = params.terminals.min(params.nodes);
    Ok(InstanceSpec { kind, mode, count, params })
}

fn parse_solver_stanza<'a>(line: usize, mut words: impl Iterator<Item = &'a str>) -> Result<SolverSpec, CliError> {
    let name = words.next().ok_or_else(|| config_err(line, "solver stanza needs a name"))?;
    let kind = SolverKind::parse(name).ok_or_else(|| config_err(line, format!("unknown solver `{name}`")))?;
    let mut spec = SolverSpec { kind, k: 3, max_iters: None, tol: DEFAULT_TOL };
    for (key, value) in pairs(line, words)? {
        match key {
            "k" => spec.k = num(line, key, value)?,
            "max_iters" => spec.max_iters = Some(num(line, key, value)?),
            "tol" => spec.tol = num(line, key, value)?,
            _ => return Err(config_err(line, format!("unknown solver key `{key}`"))),
        }
    }
    Ok(spec)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub row: usize,
    pub instance: usize,
    pub kind: String,
    pub mode: String,
    pub nodes: usize,
    pub edges: usize,
    pub terminals: usize,
    pub solver: String,
    pub k: Option<usize>,
    pub seed: u64,
    pub status: String,
    pub power: Option<String>,
    pub cost: Option<String>,
    pub exact_power: Option<String>,
    pub ratio: Option<f64>,
    pub iterations: Option<usize>,
    pub wall_ms: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverSummary {
    pub solver: String,
    pub rows: usize,
    pub errors: usize,
    pub mean_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub summary: Vec<SolverSummary>,
}

struct Generated {
    spec: usize,
    instance: Result<Instance, String>,
    exact: Option<Cost>,
}

fn run_solver(inst: &Instance, solver: &SolverSpec, seed: u64) -> Result<(PowerTree, Option<usize>), String> {
    let steiner = TreeMode::Steiner;
    let out = match solver.kind {
        SolverKind::Exact => (exact_min_power(inst, steiner).map_err(|e| e.to_string())?, None),
        SolverKind::ExactDp => (exact_min_power_dp(inst, steiner).map_err(|e| e.to_string())?, None),
        SolverKind::MinCost => {
            (baseline_min_cost(inst, steiner, SteinerCost::ExactOrApprox).map_err(|e| e.to_string())?, None)
        }
        SolverKind::Irr => {
            let opts = IrrOptions { k: solver.k, seed, max_iters: solver.max_iters, tol: solver.tol };
            let (tree, trace) = irr_solve(inst, opts).map_err(|e| e.to_string())?;
            (tree, Some(trace.iterations.len()))
        }
    };
    Ok(out)
}

/// Runs every (instance, solver, repetition) row. Rows run in parallel, but
/// every seed depends only on the master seed and the row index.
pub fn run_bench(cfg: &BenchConfig) -> BenchReport {
    let want_exact = cfg.solvers.iter().any(|s| s.kind.is_exact());
    let mut jobs = Vec::new();
    for (s, spec) in cfg.instances.iter().enumerate() {
        for _ in 0..spec.count {
            jobs.push(s);
        }
    }
    let generated: Vec<Generated> = jobs
        .par_iter()
        .enumerate()
        .map(|(j, &s)| {
            let spec = &cfg.instances[s];
            let mut params = spec.params.clone();
            params.seed = mix_seed(cfg.seed ^ INSTANCE_SALT, j as u64);
            let instance = generate(spec.kind, &params)
                .and_then(|i| mode_instance(&i, spec.mode))
                .map_err(|e| e.to_string());
            let exact = match (&instance, want_exact) {
                (Ok(i), true) => exact_min_power_dp(i, TreeMode::Steiner).ok().map(|t| t.total_power),
                _ => None,
            };
            Generated { spec: s, instance, exact }
        })
        .collect();

    let mut tasks = Vec::new();
    for (j, _) in generated.iter().enumerate() {
        for (s, _) in cfg.solvers.iter().enumerate() {
            for _ in 0..cfg.repetitions {
                tasks.push((j, s));
            }
        }
    }
    let rows: Vec<BenchRow> = tasks
        .par_iter()
        .enumerate()
        .map(|(row, &(j, s))| {
            let g = &generated[j];
            let spec = &cfg.instances[g.spec];
            let solver = &cfg.solvers[s];
            let seed = mix_seed(cfg.seed, row as u64);
            let mut out = BenchRow {
                row,
                instance: j,
                kind: spec.kind.to_string(),
                mode: spec.mode.to_string(),
                nodes: spec.params.nodes,
                edges: 0,
                terminals: 0,
                solver: solver.kind.name().to_string(),
                k: (solver.kind == SolverKind::Irr).then_some(solver.k),
                seed,
                status: "error".into(),
                power: None,
                cost: None,
                exact_power: g.exact.map(|c| c.to_string()),
                ratio: None,
                iterations: None,
                wall_ms: 0.0,
                error: None,
            };
            let inst = match &g.instance {
                Ok(i) => i,
                Err(e) => {
                    out.error = Some(e.clone());
                    return out;
                }
            };
            out.edges = inst.edge_count();
            out.terminals = inst.terminals().len();
            let start = Instant::now();
            let result = run_solver(inst, solver, seed);
            out.wall_ms = start.elapsed().as_secs_f64() * 1e3;
            match result {
                Ok((tree, iterations)) => {
                    out.status = "ok".into();
                    out.power = Some(tree.total_power.to_string());
                    out.cost = Some(tree.total_cost.to_string());
                    out.iterations = iterations;
                    out.ratio = g.exact.map(|e| {
                        if e.is_zero() {
                            1.0
                        } else {
                            tree.total_power.to_f64() / e.to_f64()
                        }
                    });
                }
                Err(e) => out.error = Some(e),
            }
            out
        })
        .collect();

    let summary = cfg
        .solvers
        .iter()
        .enumerate()
        .map(|(s, solver)| {
            let mine: Vec<&BenchRow> = rows.iter().zip(&tasks).filter(|(_, t)| t.1 == s).map(|(r, _)| r).collect();
            let ratios: Vec<f64> = mine.iter().filter_map(|r| r.ratio).collect();
            SolverSummary {
                solver: match solver.kind {
                    SolverKind::Irr => format!("irr k={}", solver.k),
                    kind => kind.name().to_string(),
                },
                rows: mine.len(),
                errors: mine.iter().filter(|r| r.status != "ok").count(),
                mean_ratio: (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
                max_ratio: ratios.iter().copied().reduce(f64::max),
            }
        })
        .collect();
    BenchReport { rows, summary }
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|source| CliError::Io { path: "csv output".into(), source })?;
    Ok(())
}

pub fn format_summary(report: &BenchReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "csv_version,{CSV_VERSION}");
    let _ = writeln!(s, "solver,rows,errors,mean_ratio,max_ratio");
    let opt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:.6}"));
    for row in &report.summary {
        let _ = writeln!(s, "{},{},{},{},{}", row.solver, row.rows, row.errors, opt(row.mean_ratio), opt(row.max_ratio));
    }
    let _ = writeln!(s, "theoretical_factor_steiner,{:.7}", theoretical_factor(TreeMode::Steiner));
    let _ = writeln!(s, "theoretical_factor_spanning,{:.7}", theoretical_factor(TreeMode::Spanning));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const SUITE: &str = "\
# ten small spanning instances
seed = 9
instance kind=uniform-random nodes=6 count=10 mode=spanning max_cost=12
solver exact
solver mst
solver irr k=3
";

    #[test]
    fn parses_suite() {
        let cfg = BenchConfig::parse(SUITE).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.instances[0].count, 10);
        assert_eq!(cfg.instances[0].mode, TreeMode::Spanning);
        assert_eq!(cfg.solvers.len(), 3);
        assert_eq!(cfg.solvers[1].kind, SolverKind::MinCost);
    }

    #[test]
    fn thirty_rows_and_bounded_ratios() {
        let report = run_bench(&BenchConfig::parse(SUITE).unwrap());
        assert_eq!(report.rows.len(), 30);
        assert!(report.rows.iter().all(|r| r.status == "ok"));
        for r in report.rows.iter().filter(|r| r.solver == "mincost") {
            assert!(r.ratio.unwrap() <= 2.0 + 1e-12);
        }
        assert_eq!(report.summary.len(), 3);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(BenchConfig::parse("seed = x\n"), Err(CliError::Config { line: 1, .. })));
        assert!(BenchConfig::parse("instance nodes=4\nsolver magic\n").is_err());
        assert!(BenchConfig::parse("solver exact\n").is_err());
        assert!(BenchConfig::parse("frobnicate\n").is_err());
    }

    #[test]
    fn header_matches_row_fields() {
        let cfg = BenchConfig::parse(SUITE).unwrap();
        let report = run_bench(&cfg);
        let mut buf = Vec::new();
        write_csv(&report.rows[..1], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    }
}
