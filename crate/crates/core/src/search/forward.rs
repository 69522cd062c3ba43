use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::{GeoBound, Outcome, QueryRequest, QueryResult};
use crate::model::{Adjacency, Journey, NodeId};
use crate::tch::TchGraph;
use crate::time::TimePoint;
use crate::ttn::TtnIndex;
use crate::{Error, Result};

const UP: usize = 0;
const DOWN: usize = 1;

/// Best-first search over the hierarchy restricted to paths that only climb
/// and then only descend. A state is a node plus the phase it was reached
/// in; downward edges of `v` are skipped unless the target lies in `v`'s
/// down-reachable box.
pub fn forward_search(
    tch: &TchGraph,
    ttn: Option<&TtnIndex>,
    req: &QueryRequest,
    heuristic: Option<&GeoBound>,
) -> Result<QueryResult> {
    let start = Instant::now();
    let o = run(tch, ttn, req, heuristic)?;
    Ok(QueryResult {
        arrival: o.arrival,
        journey: o.journey,
        expanded_nodes: o.expanded,
        settled_edges: o.relaxed,
        wall_time_ns: start.elapsed().as_nanos() as u64,
        tch_path: o.tch_path,
    })
}

pub(crate) fn run(
    tch: &TchGraph,
    ttn: Option<&TtnIndex>,
    req: &QueryRequest,
    geo: Option<&GeoBound>,
) -> Result<Outcome> {
    let n = tch.node_count();
    for v in [req.source, req.target] {
        if v.index() >= n {
            return Err(Error::UnknownNode(v.to_string()));
        }
    }
    let target = req.target;
    let dest = tch.base().record(target);
    let (dest_lat, dest_lon) = (dest.lat, dest.lon);
    let bound = |v: NodeId| geo.map_or(0, |g| g.bound(v, target)) as u64;

    let mut arrival = vec![TimePoint::INFINITE; 2 * n];
    let mut settled = vec![false; 2 * n];
    let mut pred = vec![u32::MAX; 2 * n];
    let mut heap = BinaryHeap::new();
    let first = req.source.index() * 2 + UP;
    arrival[first] = req.depart;
    heap.push(Reverse((
        req.depart.secs() as u64 + bound(req.source),
        first as u32,
    )));

    let mut expanded = 0;
    let mut relaxed = 0;
    let mut found = None;
    let mut last = 0;
    while let Some(Reverse((key, st))) = heap.pop() {
        let st = st as usize;
        // A down state is dominated by an earlier up state at the same node:
        // the up state may take every edge the down state may.
        if settled[st] || (st % 2 == DOWN && settled[st - DOWN + UP]) {
            continue;
        }
        debug_assert!(key >= last, "queue went backwards");
        last = key;
        settled[st] = true;
        expanded += 1;
        let v = NodeId((st / 2) as u32);
        let phase = st % 2;
        if v == target {
            found = Some(st);
            break;
        }
        let may_descend = tch.down_bbox(v).contains(dest_lat, dest_lon);
        if phase == DOWN && !may_descend {
            continue;
        }
        let t = arrival[st];
        let lv = tch.level(v);
        let edges = tch.out_edges(v);
        let mut relax = |slot: usize, a: TimePoint| {
            let w = edges[slot].target;
            let next = if tch.level(w) > lv {
                if phase == DOWN {
                    return;
                }
                UP
            } else {
                if w == v || !may_descend {
                    return;
                }
                DOWN
            };
            relaxed += 1;
            let ns = w.index() * 2 + next;
            if next == DOWN && arrival[w.index() * 2 + UP] <= a {
                return;
            }
            if a < arrival[ns] {
                arrival[ns] = a;
                pred[ns] = st as u32;
                heap.push(Reverse((a.secs() as u64 + bound(w), ns as u32)));
            }
        };
        match ttn {
            Some(idx) => {
                let truncate = (phase == DOWN).then_some(lv);
                idx.evaluate(v, edges, t, truncate, relax);
            }
            None => {
                for (slot, e) in edges.iter().enumerate() {
                    let up = tch.level(e.target) > lv;
                    if (up && phase == UP) || (!up && may_descend) {
                        relax(slot, e.atf.eval(t));
                    }
                }
            }
        }
    }

    let Some(end) = found else {
        return Ok(Outcome {
            arrival: TimePoint::INFINITE,
            journey: None,
            expanded,
            relaxed,
            tch_path: None,
        });
    };

    let mut states = vec![end];
    while let Some(&st) = states.last() {
        if pred[st] == u32::MAX {
            break;
        }
        states.push(pred[st] as usize);
    }
    states.reverse();
    let path: Vec<NodeId> = states.iter().map(|&st| NodeId((st / 2) as u32)).collect();
    let mut legs = Vec::new();
    for pair in states.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        legs.extend(tch.unpack(path_node(a), path_node(b), arrival[a])?);
    }
    let arr = arrival[end];
    if legs.last().is_some_and(|l| l.alight != arr) {
        return Err(Error::Corrupt(format!(
            "unpacked journey does not arrive at {arr}"
        )));
    }
    Ok(Outcome {
        arrival: arr,
        journey: Some(Journey { legs, arrival: arr }),
        expanded,
        relaxed,
        tch_path: Some(path),
    })
}

fn path_node(state: usize) -> NodeId {
    NodeId((state / 2) as u32)
}
