//! `ttn`: generate, contract, query and benchmark transport graphs.

use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use ttn_core::bench::{prepare_with_report, run_bench, BenchConfig};
use ttn_core::datagen::{self, generate_synthetic, LoadOptions, SynthParams, Template};
use ttn_core::model::Adjacency;
use ttn_core::tch::{ContractionParams, TchGraph};
use ttn_core::ttn::{OrderingStrategy, TtnIndex, TtnKind};
use ttn_core::{
    cache, Algorithm, Engine, Error, Heuristic, LegMode, QueryRequest, TimePoint, TransportGraph,
};

#[derive(Parser)]
#[command(name = "ttn", version, about = "Time-dependent multimodal routing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset as CSV.
    Synth(SynthArgs),
    /// Contract a graph and write a cache with the hierarchy and indices.
    Contract(ContractArgs),
    /// Run one earliest-arrival query and print the result as JSON.
    Query(QueryArgs),
    /// Run the benchmark protocol and write a report.
    Bench(BenchArgs),
    /// Print graph statistics.
    Stats(GraphArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Dataset directory (CSV) or cache file.
    #[arg(long)]
    graph: PathBuf,
    /// Footpaths longer than this many metres are dropped (CSV only).
    #[arg(long, default_value_t = 600.0)]
    walk_limit: f64,
    /// Walking speed in m/s (CSV only).
    #[arg(long, default_value_t = 1.0)]
    walk_speed: f64,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    nodes: usize,
    #[arg(long)]
    out_deg: usize,
    /// Share of edges carrying a timetable, in percent.
    #[arg(long)]
    pct_tt: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use the fast-bus connection template.
    #[arg(long)]
    fast: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ContractArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 1.0)]
    w_edge_diff: f64,
    #[arg(long, default_value_t = 1.0)]
    w_depth: f64,
    /// Indices to build on both the graph and the hierarchy.
    #[arg(long, value_delimiter = ',', value_parser = parse_kind)]
    ttn: Vec<TtnKind>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    /// Departure as HH:MM[:SS] or seconds.
    #[arg(long, value_parser = parse_time)]
    at: TimePoint,
    /// Full algorithm name (`dij-cst`) or a family (`dij`, `fs-tch`, `csa`) combined with `--ttn`.
    #[arg(long, default_value = "dij-tte")]
    algo: String,
    /// Node index: none, cst, fc-asc, fc-dsc, fc-chs.
    #[arg(long)]
    ttn: Option<String>,
    /// Guide forward search with the geometric lower bound.
    #[arg(long)]
    geo: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "csa,dij-tte,dij-cst,fs-tch-fc-chs"
    )]
    algos: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Run each algorithm's queries one after another instead of on a pool.
    #[arg(long)]
    serial: bool,
    #[arg(long)]
    out: PathBuf,
}

const KINDS: [TtnKind; 4] = [
    TtnKind::Cst,
    TtnKind::Fc(OrderingStrategy::Asc),
    TtnKind::Fc(OrderingStrategy::Dsc),
    TtnKind::Fc(OrderingStrategy::Chs),
];

fn parse_kind(s: &str) -> Result<TtnKind, String> {
    KINDS
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| format!("unknown index `{s}`, expected cst, fc-asc, fc-dsc or fc-chs"))
}

fn parse_time(s: &str) -> Result<TimePoint, String> {
    s.parse()
}

fn parse_algo(algo: &str, ttn: Option<&str>) -> Result<Algorithm> {
    Ok(match ttn {
        Some(t) => Algorithm::from_parts(algo, t)?,
        None => algo.parse()?,
    })
}

impl GraphArgs {
    fn load_options(&self) -> LoadOptions {
        LoadOptions {
            walk_limit_m: self.walk_limit,
            walk_speed_mps: self.walk_speed,
        }
    }

    /// Loads a CSV dataset, or a cache together with its precomputation.
    fn engine(&self) -> Result<Engine> {
        if self.graph.is_dir() {
            return Ok(Engine::new(self.load_graph()?));
        }
        let c = cache::load(&self.graph)
            .with_context(|| format!("reading {}", self.graph.display()))?;
        let mut engine = match c.tch {
            Some(tch) => Engine::with_tch(c.graph, tch),
            None => Engine::new(c.graph),
        };
        for (on_tch, idx) in c.ttn {
            engine.insert_ttn(on_tch, idx);
        }
        Ok(engine)
    }

    fn load_graph(&self) -> Result<TransportGraph> {
        if self.graph.is_dir() {
            datagen::load_dataset(&self.graph, self.load_options())
                .with_context(|| format!("loading {}", self.graph.display()))
        } else {
            Ok(cache::load(&self.graph)
                .with_context(|| format!("reading {}", self.graph.display()))?
                .graph)
        }
    }
}

fn synth(a: &SynthArgs) -> Result<()> {
    let mut p = SynthParams::new(a.nodes, a.out_deg, a.pct_tt, a.seed);
    if a.fast {
        p = p.with_template(Template::fast());
    }
    let g = generate_synthetic(&p)?;
    fs::create_dir_all(&a.out)?;
    datagen::write_csv(&g, &a.out)?;
    eprintln!(
        "wrote {} nodes, {} edges to {}",
        g.node_count(),
        g.edge_count(),
        a.out.display()
    );
    Ok(())
}

fn contract(a: &ContractArgs) -> Result<()> {
    let graph = a.graph.load_graph()?;
    let params = ContractionParams {
        w_edge_diff: a.w_edge_diff,
        w_depth: a.w_depth,
    };
    let tch = TchGraph::build(graph.clone(), params)?;
    let mut indices = Vec::new();
    for &kind in &a.ttn {
        if !matches!(kind, TtnKind::Fc(OrderingStrategy::Chs)) {
            indices.push((false, TtnIndex::build(&graph, kind, None)?));
        }
        indices.push((true, TtnIndex::build(&tch, kind, Some(tch.levels()))?));
    }
    let refs: Vec<_> = indices.iter().map(|(on_tch, idx)| (*on_tch, idx)).collect();
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    cache::save(&a.out, &graph, Some(&tch), &refs)?;
    eprintln!(
        "contracted {} nodes: {} edges ({} shortcuts), {} indices -> {}",
        tch.node_count(),
        tch.edge_count(),
        tch.shortcut_count(),
        indices.len(),
        a.out.display()
    );
    Ok(())
}

fn query_json(engine: &Engine, a: &QueryArgs) -> Result<Value> {
    let g = engine.graph();
    let req = QueryRequest {
        source: g.require(&a.from)?,
        target: g.require(&a.to)?,
        depart: a.at,
        algorithm: parse_algo(&a.algo, a.ttn.as_deref())?,
    };
    let r = engine.query(&req)?;
    let name = |v: ttn_core::NodeId| g.record(v).id.clone();
    let legs: Vec<Value> = r
        .journey
        .iter()
        .flat_map(|j| &j.legs)
        .map(|l| {
            json!({
                "from": name(l.from),
                "to": name(l.to),
                "board": l.board.to_string(),
                "alight": l.alight.to_string(),
                "mode": match l.mode { LegMode::Walk => "walk", LegMode::Transit => "transit" },
                "trip": l.trip.and_then(|t| g.trips().get(t)),
            })
        })
        .collect();
    Ok(json!({
        "algorithm": req.algorithm.name(),
        "arrival": r.found().then(|| r.arrival.to_string()),
        "legs": legs,
        "expanded": r.expanded_nodes,
        "wall_ns": r.wall_time_ns,
    }))
}

fn query(a: &QueryArgs) -> Result<()> {
    let mut engine = a.graph.engine()?;
    let alg = parse_algo(&a.algo, a.ttn.as_deref())?;
    engine.prepare(&[alg])?;
    if a.geo {
        engine.set_heuristic(Heuristic::GeoLowerBound);
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&query_json(&engine, a)?)?
    );
    Ok(())
}

fn bench(a: &BenchArgs) -> Result<()> {
    let algorithms = a
        .algos
        .iter()
        .map(|s| parse_algo(s, None))
        .collect::<Result<Vec<_>>>()?;
    let mut engine = a.graph.engine()?;
    let build = prepare_with_report(&mut engine, &algorithms)?;
    let cfg = BenchConfig {
        algorithms,
        n_queries: a.n,
        seed: a.seed,
        parallel: !a.serial,
    };
    let report = run_bench(&engine, &cfg)?;
    report.write(&a.out)?;
    fs::write(a.out.join("build.md"), build.markdown())?;
    print!("{}", report.summary_markdown());
    Ok(())
}

fn stats(a: &GraphArgs) -> Result<()> {
    let engine = a.engine()?;
    datagen::describe(engine.graph(), io::stdout().lock())?;
    if let Some(tch) = engine.tch() {
        println!("shortcuts:    {}", tch.shortcut_count());
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Synth(a) => synth(a),
        Command::Contract(a) => contract(a),
        Command::Query(a) => query(a),
        Command::Bench(a) => bench(a),
        Command::Stats(a) => stats(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            // Agreement violations get their own code so scripts can tell
            // a wrong answer from a bad invocation.
            match e.downcast_ref::<Error>() {
                Some(Error::AgreementViolation { .. }) => ExitCode::from(3),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
