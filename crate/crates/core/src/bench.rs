//! Benchmark harness: seeded query sampling, per-algorithm runs with
//! cross-checks, build accounting and report files.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cache;
use crate::csa::MergedTimetable;
use crate::model::{Adjacency, NodeId};
use crate::search::{Algorithm, Engine, QueryRequest, QueryResult};
use crate::time::TimePoint;
use crate::ttn::TtnIndex;
use crate::{Error, Result};

pub const DAY_SECS: u32 = 86_400;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct QuerySpec {
    pub source: NodeId,
    pub target: NodeId,
    pub depart: TimePoint,
}

/// `n` uniform (source, target, departure-in-day) triples.
pub fn sample_queries(nodes: usize, n: usize, seed: u64) -> Vec<QuerySpec> {
    if nodes == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| QuerySpec {
            source: NodeId(rng.gen_range(0..nodes as u32)),
            target: NodeId(rng.gen_range(0..nodes as u32)),
            depart: TimePoint::new(rng.gen_range(0..DAY_SECS)),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryRecord {
    pub query: usize,
    pub algorithm: Algorithm,
    pub arrival: TimePoint,
    pub expanded: u64,
    pub wall_ns: u64,
}

impl QueryRecord {
    pub fn found(&self) -> bool {
        self.arrival.is_finite()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgoSummary {
    pub algorithm: Algorithm,
    pub queries: usize,
    pub found: usize,
    pub mean_ns: f64,
    pub median_ns: f64,
    pub mean_expanded: f64,
}

impl AlgoSummary {
    /// Percentage of queries with a path.
    pub fn pct_found(&self) -> f64 {
        if self.queries == 0 {
            0.0
        } else {
            100.0 * self.found as f64 / self.queries as f64
        }
    }

    fn from_records(algorithm: Algorithm, records: &[&QueryRecord]) -> AlgoSummary {
        let n = records.len();
        let mean = |f: &dyn Fn(&QueryRecord) -> f64| {
            if n == 0 {
                0.0
            } else {
                records.iter().map(|r| f(r)).sum::<f64>() / n as f64
            }
        };
        let mut times: Vec<u64> = records.iter().map(|r| r.wall_ns).collect();
        times.sort_unstable();
        let median_ns = match n {
            0 => 0.0,
            _ if n % 2 == 1 => times[n / 2] as f64,
            _ => (times[n / 2 - 1] + times[n / 2]) as f64 / 2.0,
        };
        AlgoSummary {
            algorithm,
            queries: n,
            found: records.iter().filter(|r| r.found()).count(),
            mean_ns: mean(&|r| r.wall_ns as f64),
            median_ns,
            mean_expanded: mean(&|r| r.expanded as f64),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub queries: Vec<QuerySpec>,
    /// One record per query and algorithm, grouped by algorithm.
    pub records: Vec<QueryRecord>,
}

impl BenchReport {
    pub fn algorithms(&self) -> Vec<Algorithm> {
        let mut a: Vec<Algorithm> = self.records.iter().map(|r| r.algorithm).collect();
        a.sort_unstable();
        a.dedup();
        a
    }

    pub fn summary(&self, algorithm: Algorithm) -> AlgoSummary {
        let recs: Vec<&QueryRecord> = self
            .records
            .iter()
            .filter(|r| r.algorithm == algorithm)
            .collect();
        AlgoSummary::from_records(algorithm, &recs)
    }

    pub fn summaries(&self) -> Vec<AlgoSummary> {
        self.algorithms()
            .into_iter()
            .map(|a| self.summary(a))
            .collect()
    }

    pub fn write_queries_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "query",
            "algorithm",
            "source",
            "target",
            "depart_s",
            "arrival_s",
            "found",
            "expanded",
            "wall_ns",
        ])?;
        for r in &self.records {
            let q = &self.queries[r.query];
            let arrival = if r.found() {
                r.arrival.secs().to_string()
            } else {
                String::new()
            };
            w.write_record([
                r.query.to_string(),
                r.algorithm.to_string(),
                q.source.0.to_string(),
                q.target.0.to_string(),
                q.depart.secs().to_string(),
                arrival,
                (r.found() as u8).to_string(),
                r.expanded.to_string(),
                r.wall_ns.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Query benchmark\n");
        let _ = writeln!(s, "{} queries\n", self.queries.len());
        let _ = writeln!(s, "| algorithm | %P | mean ns | median ns | mean #Exp |");
        let _ = writeln!(s, "|---|---:|---:|---:|---:|");
        for a in self.summaries() {
            let _ = writeln!(
                s,
                "| {} | {:.1} | {:.0} | {:.0} | {:.1} |",
                a.algorithm,
                a.pct_found(),
                a.mean_ns,
                a.median_ns,
                a.mean_expanded
            );
        }
        s
    }

    /// Writes `queries.csv` and `summary.md` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        self.write_queries_csv(fs::File::create(dir.join("queries.csv"))?)?;
        fs::write(dir.join("summary.md"), self.summary_markdown())?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    pub n_queries: usize,
    pub seed: u64,
    /// Spread each algorithm's queries over the rayon pool.
    pub parallel: bool,
}

/// Runs every query of `queries` with `algorithm`; each result carries its
/// own wall time.
pub fn run_queries(
    engine: &Engine,
    algorithm: Algorithm,
    queries: &[QuerySpec],
    parallel: bool,
) -> Result<Vec<QueryResult>> {
    let one = |q: &QuerySpec| {
        engine.query(&QueryRequest {
            source: q.source,
            target: q.target,
            depart: q.depart,
            algorithm,
        })
    };
    if parallel {
        queries.par_iter().map(one).collect()
    } else {
        queries.iter().map(one).collect()
    }
}

/// Samples queries, runs every configured algorithm on the same set and
/// cross-checks the arrivals. The engine must be prepared.
pub fn run_bench(engine: &Engine, cfg: &BenchConfig) -> Result<BenchReport> {
    let queries = sample_queries(engine.graph().node_count(), cfg.n_queries, cfg.seed);
    let mut records = Vec::with_capacity(queries.len() * cfg.algorithms.len());
    let mut arrivals = Vec::with_capacity(cfg.algorithms.len());
    for &alg in &cfg.algorithms {
        let results = run_queries(engine, alg, &queries, cfg.parallel)?;
        arrivals.push((alg, results.iter().map(|r| r.arrival).collect::<Vec<_>>()));
        records.extend(results.into_iter().enumerate().map(|(i, r)| QueryRecord {
            query: i,
            algorithm: alg,
            arrival: r.arrival,
            expanded: r.expanded_nodes,
            wall_ns: r.wall_time_ns,
        }));
    }
    check_agreement(&arrivals)?;
    Ok(BenchReport { queries, records })
}

/// All graph-based algorithms must agree on every query and the connection
/// scan may never arrive earlier than them.
pub fn check_agreement(arrivals: &[(Algorithm, Vec<TimePoint>)]) -> Result<()> {
    let reference = arrivals.iter().find(|(a, _)| a.is_graph_based());
    let Some((ref_alg, ref_arr)) = reference else {
        return Ok(());
    };
    for (alg, arr) in arrivals {
        for (q, (&a, &r)) in arr.iter().zip(ref_arr).enumerate() {
            let bad = if alg.is_graph_based() { a != r } else { a < r };
            if bad {
                return Err(Error::AgreementViolation {
                    query: q,
                    details: format!("{alg} arrives {a}, {ref_alg} arrives {r}"),
                });
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BuildEntry {
    pub name: String,
    pub seconds: f64,
    pub elements: usize,
    pub bytes: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BuildReport {
    pub entries: Vec<BuildEntry>,
}

impl BuildReport {
    pub fn get(&self, name: &str) -> Option<&BuildEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn markdown(&self) -> String {
        let mut s =
            String::from("| structure | build s | elements | bytes |\n|---|---:|---:|---:|\n");
        for e in &self.entries {
            let _ = writeln!(
                s,
                "| {} | {:.4} | {} | {} |",
                e.name, e.seconds, e.elements, e.bytes
            );
        }
        s
    }
}

/// Builds everything `algorithms` need, timing each structure. Index
/// entries are named `<kind>` on the original graph and `tch-<kind>` on the
/// hierarchy.
pub fn prepare_with_report(engine: &mut Engine, algorithms: &[Algorithm]) -> Result<BuildReport> {
    let mut report = BuildReport::default();
    report.entries.push(BuildEntry {
        name: "graph".into(),
        seconds: 0.0,
        elements: engine.graph().connection_count(),
        bytes: cache::graph_bytes(engine.graph()),
    });
    if algorithms.contains(&Algorithm::Csa) {
        let start = Instant::now();
        let mt = MergedTimetable::build(engine.graph());
        report.entries.push(BuildEntry {
            name: "csa".into(),
            seconds: start.elapsed().as_secs_f64(),
            elements: mt.connections().len(),
            bytes: 0,
        });
        engine.prepare(&[Algorithm::Csa])?;
    }
    if algorithms.iter().any(|a| a.uses_tch()) {
        let fresh = engine.tch().is_none();
        let start = Instant::now();
        let tch = engine.ensure_tch()?;
        report.entries.push(BuildEntry {
            name: "tch".into(),
            seconds: if fresh {
                start.elapsed().as_secs_f64()
            } else {
                0.0
            },
            elements: tch.connection_count(),
            bytes: cache::tch_bytes(tch),
        });
    }
    let mut seen = Vec::new();
    for &a in algorithms {
        let Some(kind) = a.ttn() else { continue };
        let on_tch = a.uses_tch();
        if seen.contains(&(on_tch, kind)) {
            continue;
        }
        seen.push((on_tch, kind));
        let start = Instant::now();
        let idx = match engine.ttn(on_tch, kind) {
            Some(existing) => existing.clone(),
            None if on_tch => {
                let tch = engine.tch().unwrap();
                TtnIndex::build(tch, kind, Some(tch.levels()))?
            }
            None => TtnIndex::build(engine.graph(), kind, None)?,
        };
        let seconds = start.elapsed().as_secs_f64();
        report.entries.push(BuildEntry {
            name: if on_tch {
                format!("tch-{}", kind.name())
            } else {
                kind.name().to_string()
            },
            seconds,
            elements: idx.element_count(),
            bytes: cache::ttn_bytes(&idx),
        });
        engine.insert_ttn(on_tch, idx);
    }
    engine.prepare(algorithms)?;
    Ok(report)
}
