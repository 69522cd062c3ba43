use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::{Outcome, QueryRequest, QueryResult};
use crate::model::{Adjacency, Journey, Leg, NodeId, TransportGraph};
use crate::time::TimePoint;
use crate::ttn::TtnIndex;
use crate::{Error, Result};

const NO_PRED: (u32, u32) = (u32::MAX, u32::MAX);

/// Label-setting earliest-arrival search on the original graph. With an
/// index, each extracted node is evaluated once for all its out-edges.
pub fn dijkstra(
    graph: &TransportGraph,
    ttn: Option<&TtnIndex>,
    req: &QueryRequest,
) -> Result<QueryResult> {
    for v in [req.source, req.target] {
        if v.index() >= graph.node_count() {
            return Err(Error::UnknownNode(v.to_string()));
        }
    }
    let start = Instant::now();
    let o = run(graph, ttn, req);
    Ok(QueryResult {
        arrival: o.arrival,
        journey: o.journey,
        expanded_nodes: o.expanded,
        settled_edges: o.relaxed,
        wall_time_ns: start.elapsed().as_nanos() as u64,
        tch_path: None,
    })
}

pub(crate) fn run(graph: &TransportGraph, ttn: Option<&TtnIndex>, req: &QueryRequest) -> Outcome {
    let n = graph.node_count();
    let mut arrival = vec![TimePoint::INFINITE; n];
    let mut settled = vec![false; n];
    // (predecessor node, adjacency slot)
    let mut pred = vec![NO_PRED; n];
    let mut heap = BinaryHeap::new();
    let (s, target) = (req.source.index(), req.target.index());
    arrival[s] = req.depart;
    heap.push(Reverse((req.depart, s as u32)));

    let mut expanded = 0;
    let mut relaxed = 0;
    let mut last = TimePoint::ZERO;
    while let Some(Reverse((t, v))) = heap.pop() {
        let vi = v as usize;
        if settled[vi] {
            continue;
        }
        debug_assert!(t >= last, "queue went backwards");
        last = t;
        settled[vi] = true;
        expanded += 1;
        if vi == target {
            break;
        }
        let edges = graph.out_edges(NodeId(v));
        let mut relax = |slot: usize, a: TimePoint| {
            relaxed += 1;
            let w = edges[slot].target.index();
            if a < arrival[w] {
                arrival[w] = a;
                pred[w] = (v, slot as u32);
                heap.push(Reverse((a, w as u32)));
            }
        };
        match ttn {
            Some(idx) => idx.evaluate(NodeId(v), edges, t, None, relax),
            None => {
                for (slot, e) in edges.iter().enumerate() {
                    relax(slot, e.atf.eval(t));
                }
            }
        }
    }

    let arr = arrival[target];
    let journey = arr.is_finite().then(|| {
        let mut legs = Vec::new();
        let mut w = target;
        while w != s {
            let (u, slot) = pred[w];
            let e = &graph.out_edges(NodeId(u))[slot as usize];
            let leg = Leg::over(NodeId(u), e.target, &e.atf, arrival[u as usize])
                .expect("settled edge is traversable");
            legs.push(leg);
            w = u as usize;
        }
        legs.reverse();
        Journey { legs, arrival: arr }
    });
    Outcome {
        arrival: arr,
        journey,
        expanded,
        relaxed,
        tch_path: None,
    }
}
