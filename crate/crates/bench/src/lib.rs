//! Shared fixtures for the criterion benches.

use ttn_core::bench::{sample_queries, QuerySpec};
use ttn_core::datagen::{generate_synthetic, SynthParams};
use ttn_core::{TimePoint, TransportGraph};

/// Node count of the synthetic graphs; every node can reach every other
/// one directly at the largest degree.
pub const NODES: usize = 60;

/// Out-degrees swept by the node-evaluation bench.
pub const DEGREES: [usize; 4] = [5, 20, 40, 59];

/// Timetable shares (percent) swept by the node-evaluation bench.
pub const TIMETABLE_PCT: [f64; 3] = [20.0, 60.0, 100.0];

pub fn graph(out_degree: usize, pct_timetable: f64) -> TransportGraph {
    generate_synthetic(&SynthParams::new(NODES, out_degree, pct_timetable, 42))
        .expect("valid synthetic parameters")
}

/// Evaluation times spread over the service day.
pub fn eval_times(n: usize) -> Vec<TimePoint> {
    sample_queries(NODES, n, 9)
        .into_iter()
        .map(|q| q.depart)
        .collect()
}

pub fn queries(graph: &TransportGraph, n: usize) -> Vec<QuerySpec> {
    use ttn_core::model::Adjacency;
    sample_queries(graph.node_count(), n, 7)
}
