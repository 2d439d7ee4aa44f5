//! Command-line interface.
//!
//! Exit codes: 0 success, 2 usage (bad flags, unreadable input), 3 invalid
//! input contents, 4 a fit diverged, 5 a fit ran out of iterations.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::affinity::{Affinity, Limit};
use crate::alpha::solve_alpha_graph;
use crate::block_em::{diverged_entries, fit_blocks, BlockFit, EmOptions, InitMode};
use crate::experiment::{run_fig1, Fig1Init};
use crate::generator::{fig1_instance, planted_instance, PlantedInstance};
use crate::graph::{Graph, Partition};
use crate::io::{
    edge_list_text, fmt_f64, json_f64, parse_bipartite_edges, parse_edge_list, parse_partition_csv, parse_table_csv,
    partition_csv, write_atomic, InputError,
};
use crate::rasch::solve_beta_gamma_table;
use crate::realizability::{interior_degree_check, interior_margin_check, is_bipartite_realizable, is_graphic};
use crate::report::{Coord, FitReport, FitStatus, SolverOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_DIVERGED: i32 = 4;
pub const EXIT_NOT_CONVERGED: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "kbeta", version, about = "Fit and sample degree-parameterized random graph models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit the alpha-beta model to an undirected edge list.
    FitAlpha {
        edges: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Fit the beta-gamma model to a binary table.
    FitRasch {
        /// Dense 0/1 CSV, or a `row col` edge list with --edges.
        input: PathBuf,
        #[arg(long)]
        edges: bool,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Fit the heterogeneous block model by classification EM.
    FitBlocks {
        edges: PathBuf,
        #[arg(short, long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = InitArg::Spectral)]
        init: InitArg,
        /// Initial `vertex,cluster` CSV, required with `--init file`.
        #[arg(long)]
        partition: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        max_outer: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check whether a degree sequence (or a pair of margins) is realizable.
    CheckSeq {
        /// Degrees, separated by spaces or commas.
        #[arg(required_unless_present = "bipartite")]
        degrees: Vec<String>,
        /// Row and column sums as "r1,r2,... / c1,c2,...".
        #[arg(long, conflicts_with = "degrees", allow_hyphen_values = true)]
        bipartite: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Sample a planted block-model instance.
    Generate {
        /// Cluster sizes; defaults to the three-cluster 190,193,197 instance.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// k*k intervals `lo:hi` of beta_iv, row-major over (own cluster,
        /// target cluster), comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        intervals: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Parameter recovery on the 580-vertex three-cluster instance.
    ExperimentFig1 {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Fig1InitArg::Truth)]
        init: Fig1InitArg,
        #[arg(long, default_value_t = 100)]
        max_outer: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug)]
struct SolverArgs {
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    /// Record the log-likelihood of every inner iterate.
    #[arg(long)]
    trace: bool,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            tolerance: self.tol,
            max_iter: self.max_iter,
            record_trace: self.trace,
            ..SolverOptions::default()
        }
    }
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Directory for output files (created if missing).
    #[arg(short, long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InitArg {
    Spectral,
    Random,
    File,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Fig1InitArg {
    Truth,
    Spectral,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn parse(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_PARSE,
            message: message.into(),
        }
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::parse(e.to_string())
    }
}

type CmdResult = Result<i32, Failure>;

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::FitAlpha { edges, solver, out } => cmd_fit_alpha(&edges, &solver.options(), &out.out_dir),
        Command::FitRasch {
            input,
            edges,
            solver,
            out,
        } => cmd_fit_rasch(&input, edges, &solver.options(), &out.out_dir),
        Command::FitBlocks {
            edges,
            k,
            init,
            partition,
            seed,
            max_outer,
            solver,
            out,
        } => cmd_fit_blocks(&edges, k, init, partition.as_deref(), seed, max_outer, &solver.options(), &out.out_dir),
        Command::CheckSeq { degrees, bipartite, json } => cmd_check_seq(&degrees, bipartite.as_deref(), json),
        Command::Generate {
            sizes,
            intervals,
            seed,
            out,
        } => cmd_generate(&sizes, intervals.as_deref(), seed, &out.out_dir),
        Command::ExperimentFig1 {
            seed,
            init,
            max_outer,
            solver,
            out,
        } => cmd_experiment_fig1(seed, init, max_outer, &solver.options(), &out.out_dir),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn prepare_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    write_atomic(&path, contents).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn write_json(dir: &Path, name: &str, value: &Value) -> Result<(), Failure> {
    write(dir, name, &(serde_json::to_string_pretty(value).expect("json values serialize") + "\n"))
}

fn status_code(status: FitStatus) -> i32 {
    match status {
        FitStatus::Converged => EXIT_OK,
        FitStatus::Diverged => EXIT_DIVERGED,
        FitStatus::NotConverged => EXIT_NOT_CONVERGED,
    }
}

fn limit_str(l: Limit) -> &'static str {
    match l {
        Limit::Zero => "0",
        Limit::Infinity => "inf",
    }
}

fn flag_str(a: Affinity) -> &'static str {
    match a {
        Affinity::Finite(_) => "",
        Affinity::Zero(_) => "0",
        Affinity::Infinite(_) => "inf",
        Affinity::Undefined => "nan",
    }
}

/// Report JSON for a single inner fit. `name_of` maps coordinates to the
/// ids shown to the user.
fn fit_report_json(report: &FitReport, name_of: impl Fn(Coord) -> Value) -> Value {
    json!({
        "status": report.status,
        "iterations": report.iterations,
        "residual": json_f64(report.final_residual),
        "loglik": json_f64(report.loglik),
        "diverged": report.diverged.iter().map(|d| {
            let mut entry = name_of(d.coord);
            entry["limit"] = json!(limit_str(d.limit));
            entry["forced"] = json!(d.forced);
            entry
        }).collect::<Vec<_>>(),
        "loglik_trace": report.loglik_trace.iter().map(|&x| json_f64(x)).collect::<Vec<_>>(),
    })
}

fn cmd_fit_alpha(path: &Path, opts: &SolverOptions, out: &Path) -> CmdResult {
    let list = parse_edge_list(&read_input(path)?)?;
    if list.graph.n() < 2 {
        return Err(Failure::parse("the graph needs at least two vertices"));
    }
    prepare_dir(out)?;
    let fit = solve_alpha_graph(&list.graph, opts);
    let degrees = list.graph.degrees();
    let mut csv = String::from("vertex,degree,alpha,beta,flag\n");
    for (i, &a) in fit.params.alpha.iter().enumerate() {
        writeln!(
            csv,
            "{},{},{},{},{}",
            list.ids[i],
            degrees.0[i],
            fmt_f64(a.value()),
            fmt_f64(a.log()),
            flag_str(a)
        )
        .unwrap();
    }
    write(out, "alpha_params.csv", &csv)?;
    let ids = &list.ids;
    let report = fit_report_json(&fit.report, |c| match c {
        Coord::Vertex(i) => json!({ "vertex": ids[i] }),
        other => json!({ "coord": other }),
    });
    write_json(out, "alpha_report.json", &report)?;
    println!(
        "{:?}: {} iterations, residual {}, {} diverged",
        fit.report.status,
        fit.report.iterations,
        fmt_f64(fit.report.final_residual),
        fit.report.diverged.len()
    );
    Ok(status_code(fit.report.status))
}

fn cmd_fit_rasch(path: &Path, edges: bool, opts: &SolverOptions, out: &Path) -> CmdResult {
    let text = read_input(path)?;
    let (table, row_ids, col_ids) = if edges {
        let b = parse_bipartite_edges(&text)?;
        (b.table, b.row_ids, b.col_ids)
    } else {
        let t = parse_table_csv(&text)?;
        let (m, n) = (t.rows() as i64, t.cols() as i64);
        (t, (0..m).collect(), (0..n).collect())
    };
    prepare_dir(out)?;
    let fit = solve_beta_gamma_table(&table, opts);
    let margins = table.margins();
    let side = |ids: &[i64], sums: &[usize], params: &[Affinity], head: &str| {
        let mut csv = format!("{head},sum,value,log,flag\n");
        for (i, &a) in params.iter().enumerate() {
            writeln!(
                csv,
                "{},{},{},{},{}",
                ids[i],
                sums[i],
                fmt_f64(a.value()),
                fmt_f64(a.log()),
                flag_str(a)
            )
            .unwrap();
        }
        csv
    };
    write(out, "rasch_rows.csv", &side(&row_ids, &margins.rows, &fit.params.rows, "row"))?;
    write(out, "rasch_cols.csv", &side(&col_ids, &margins.cols, &fit.params.cols, "col"))?;
    let report = fit_report_json(&fit.report, |c| match c {
        Coord::Row(i) => json!({ "row": row_ids[i] }),
        Coord::Col(j) => json!({ "col": col_ids[j] }),
        Coord::Vertex(i) => json!({ "vertex": i }),
    });
    write_json(out, "rasch_report.json", &report)?;
    println!(
        "{:?}: {} iterations, residual {}, {} diverged",
        fit.report.status,
        fit.report.iterations,
        fmt_f64(fit.report.final_residual),
        fit.report.diverged.len()
    );
    Ok(status_code(fit.report.status))
}

/// `vertex,label,degree,beta_1..beta_k`, one row per vertex.
pub fn block_params_csv(g: &Graph, p: &Partition, b: &crate::block_em::AffinityMatrix, ids: &[i64]) -> String {
    let k = b.k();
    let mut csv = String::from("vertex,label,degree");
    for v in 1..=k {
        write!(csv, ",beta_{v}").unwrap();
    }
    csv.push('\n');
    let degrees = g.degrees();
    for i in 0..g.n() {
        write!(csv, "{},{},{}", ids[i], p.label(i) + 1, degrees.0[i]).unwrap();
        for v in 0..k {
            write!(csv, ",{}", fmt_f64(b.beta(i, v))).unwrap();
        }
        csv.push('\n');
    }
    csv
}

fn block_report_json(fit: &BlockFit, ids: &[i64]) -> Value {
    let residual = fit
        .report
        .subfits
        .iter()
        .filter_map(|s| s.report.as_ref())
        .map(|r| r.final_residual)
        .fold(0.0, f64::max);
    json!({
        "iterations": fit.report.outer_iterations,
        "converged": fit.report.converged,
        "residual": json_f64(residual),
        "diverged": diverged_entries(&fit.params.b).iter().map(|&(i, v, l)| json!({
            "vertex": ids[i],
            "cluster": v + 1,
            "limit": limit_str(l),
        })).collect::<Vec<_>>(),
        "loglik_trace": fit.report.loglik_trace.iter().map(|&x| json_f64(x)).collect::<Vec<_>>(),
        "label_changes": fit.report.label_changes,
        "restarts": fit.report.restarts.iter().map(|r| json!({
            "outer": r.outer,
            "cluster": r.cluster + 1,
            "vertex": ids[r.vertex],
        })).collect::<Vec<_>>(),
        "init": fit.report.init,
        "init_fallback": fit.report.init_fallback,
        "pi": fit.params.pi.iter().map(|&x| json_f64(x)).collect::<Vec<_>>(),
        "subfits": fit.report.subfits.iter().map(|s| {
            let block = match s.block {
                crate::block_em::Block::Within(u) => json!({ "within": u + 1 }),
                crate::block_em::Block::Cross(u, v) => json!({ "cross": [u + 1, v + 1] }),
            };
            match &s.report {
                Some(r) => json!({
                    "block": block,
                    "status": r.status,
                    "iterations": r.iterations,
                    "residual": json_f64(r.final_residual),
                    "diverged": r.diverged.len(),
                }),
                None => json!({ "block": block, "status": "undefined" }),
            }
        }).collect::<Vec<_>>(),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_fit_blocks(
    path: &Path,
    k: usize,
    init: InitArg,
    partition: Option<&Path>,
    seed: u64,
    max_outer: usize,
    opts: &SolverOptions,
    out: &Path,
) -> CmdResult {
    let list = parse_edge_list(&read_input(path)?)?;
    let n = list.graph.n();
    if k == 0 || k > n {
        return Err(Failure::usage(format!("--k must be between 1 and the vertex count {n}")));
    }
    let init = match (init, partition) {
        (InitArg::File, Some(p)) => InitMode::Given(parse_partition_csv(&read_input(p)?, &list.ids, k)?),
        (InitArg::File, None) => return Err(Failure::usage("--init file needs --partition")),
        (_, Some(_)) => return Err(Failure::usage("--partition is only used with --init file")),
        (InitArg::Spectral, None) => InitMode::Spectral,
        (InitArg::Random, None) => InitMode::Random,
    };
    prepare_dir(out)?;
    let opts = EmOptions {
        k,
        outer_max: max_outer,
        inner: opts.clone(),
        stability: 0,
        seed,
        init,
    };
    let fit = fit_blocks(&list.graph, &opts).map_err(|e| Failure::usage(e.to_string()))?;
    write(out, "blocks_partition.csv", &partition_csv(&fit.partition, &list.ids))?;
    write(
        out,
        "blocks_params.csv",
        &block_params_csv(&list.graph, &fit.partition, &fit.params.b, &list.ids),
    )?;
    write_json(out, "blocks_report.json", &block_report_json(&fit, &list.ids))?;
    println!(
        "{} after {} outer iterations; cluster sizes {:?}",
        if fit.report.converged { "stable" } else { "not stable" },
        fit.report.outer_iterations,
        fit.partition.sizes()
    );
    Ok(if fit.report.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

fn parse_counts(text: &str) -> Result<Vec<usize>, Failure> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>().map_err(|_| {
                if t.parse::<i64>().is_ok() {
                    Failure::parse(format!("negative entry {t}"))
                } else {
                    Failure::parse(format!("invalid entry {t:?}"))
                }
            })
        })
        .collect()
}

fn cmd_check_seq(degrees: &[String], bipartite: Option<&str>, as_json: bool) -> CmdResult {
    if let Some(spec) = bipartite {
        let (r, c) = spec
            .split_once('/')
            .ok_or_else(|| Failure::parse("--bipartite expects \"rows / cols\""))?;
        let (rows, cols) = (parse_counts(r)?, parse_counts(c)?);
        let realizable = is_bipartite_realizable(&rows, &cols);
        let verdict = interior_margin_check(&rows, &cols);
        if as_json {
            let v = json!({ "kind": "bipartite", "rows": rows, "cols": cols, "realizable": realizable, "diagnosis": verdict });
            println!("{v}");
        } else {
            println!("{}", if realizable { "realizable" } else { "not realizable" });
            println!("{}", verdict_text(&verdict));
        }
        return Ok(EXIT_OK);
    }
    let seq = parse_counts(&degrees.join(" "))?;
    let graphic = is_graphic(&seq);
    let verdict = interior_degree_check(&seq, seq.len(), None);
    if as_json {
        let v = json!({ "kind": "degree", "degrees": seq, "graphic": graphic, "diagnosis": verdict });
        println!("{v}");
    } else {
        println!("{}", if graphic { "graphic" } else { "not graphic" });
        println!("{}", verdict_text(&verdict));
    }
    Ok(EXIT_OK)
}

fn verdict_text(v: &crate::realizability::DegreeVerdict) -> String {
    use crate::realizability::{BoundaryReason::*, DegreeVerdict::*};
    match v {
        Interior => "no boundary evidence".into(),
        Boundary(ZeroDegree) => "boundary: a zero degree forces a parameter to 0".into(),
        Boundary(FullDegree) => "boundary: a saturated degree forces a parameter to +inf".into(),
        Boundary(ThresholdGraph) => "boundary: realized by a threshold graph".into(),
        Boundary(NotGraphic) | Boundary(NotRealizable) => "no realization exists".into(),
    }
}

fn parse_intervals(text: &str, k: usize) -> Result<Vec<Vec<(f64, f64)>>, Failure> {
    let flat = text
        .split(',')
        .map(|t| {
            let (lo, hi) = t
                .trim()
                .split_once(':')
                .ok_or_else(|| Failure::parse(format!("interval {t:?} is not lo:hi")))?;
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Failure::parse(format!("invalid number {s:?}")));
            Ok((num(lo)?, num(hi)?))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    if flat.len() != k * k {
        return Err(Failure::parse(format!("expected {} intervals for k = {k}, got {}", k * k, flat.len())));
    }
    Ok(flat.chunks(k).map(<[_]>::to_vec).collect())
}

fn write_instance(inst: &PlantedInstance, seed: u64, out: &Path) -> Result<(), Failure> {
    let ids: Vec<i64> = (0..inst.graph.n() as i64).collect();
    let header = format!(
        "# planted block model, seed {seed}, sizes {:?}, vertices 0..{}\n",
        inst.partition.sizes(),
        inst.graph.n()
    );
    write(out, "graph.edges", &(header + &edge_list_text(&inst.graph, &ids)))?;
    write(out, "truth_partition.csv", &partition_csv(&inst.partition, &ids))?;
    write(
        out,
        "truth_params.csv",
        &block_params_csv(&inst.graph, &inst.partition, &inst.params.b, &ids),
    )
}

fn cmd_generate(sizes: &[usize], intervals: Option<&str>, seed: u64, out: &Path) -> CmdResult {
    let inst = match (sizes.is_empty(), intervals) {
        (true, None) => fig1_instance(seed),
        (false, Some(text)) => {
            let iv = parse_intervals(text, sizes.len())?;
            planted_instance(sizes, &iv, seed).map_err(|e| Failure::parse(e.to_string()))?
        }
        _ => return Err(Failure::usage("--sizes and --intervals must be given together")),
    };
    prepare_dir(out)?;
    write_instance(&inst, seed, out)?;
    println!(
        "{} vertices, {} edges, sizes {:?}",
        inst.graph.n(),
        inst.graph.edge_count(),
        inst.partition.sizes()
    );
    Ok(EXIT_OK)
}

fn cmd_experiment_fig1(seed: u64, init: Fig1InitArg, max_outer: usize, opts: &SolverOptions, out: &Path) -> CmdResult {
    let init = match init {
        Fig1InitArg::Truth => Fig1Init::Truth,
        Fig1InitArg::Spectral => Fig1Init::Spectral,
    };
    let base = EmOptions {
        outer_max: max_outer,
        inner: opts.clone(),
        ..EmOptions::new(3)
    };
    let run = run_fig1(seed, init, &base).map_err(|e| Failure::usage(e.to_string()))?;
    prepare_dir(out)?;
    let k = run.instance.partition.k();
    for (idx, points) in run.panels.iter().enumerate() {
        let (u, v) = (idx / k + 1, idx % k + 1);
        let mut csv = String::from("vertex,true_beta,estimated_beta\n");
        for p in points {
            writeln!(csv, "{},{},{}", p.vertex, fmt_f64(p.truth), fmt_f64(p.estimate)).unwrap();
        }
        write(out, &format!("panel_{u}_{v}.csv"), &csv)?;
    }
    let summary = serde_json::to_value(&run.summary).expect("summary serializes");
    write_json(out, "summary.json", &summary)?;
    println!("agreement {:.4}", run.summary.agreement);
    for p in &run.summary.panels {
        println!(
            "panel ({},{}): pearson {:.4}, mae {:.4}, diverged {}",
            p.cluster, p.target, p.pearson, p.mae, p.diverged
        );
    }
    Ok(EXIT_OK)
}
