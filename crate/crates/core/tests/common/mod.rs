#![allow(dead_code)]

use proptest::prelude::*;
use ttn_core::datagen::{generate_synthetic, SynthParams, Template};
use ttn_core::model::Adjacency;
use ttn_core::{
    Connection, Duration, EdgeAtf, NodeId, TimePoint, Timetable, TransportGraph, TripId,
};

pub fn tp(h: u32, m: u32) -> TimePoint {
    TimePoint::hms(h, m, 0)
}

pub fn atf(walk: Duration, pairs: &[(TimePoint, TimePoint)]) -> EdgeAtf {
    let conns = pairs
        .iter()
        .map(|&(d, a)| Connection::new(d, a, TripId(0)).unwrap())
        .collect();
    EdgeAtf::new(walk, Timetable::from_connections(conns))
}

/// The worked example: node A with edges to B, C and D.
pub fn example_graph() -> TransportGraph {
    let mut g = TransportGraph::new();
    let a = g.add_node("A", 48.000, 11.000).unwrap();
    let b = g.add_node("B", 48.010, 11.000).unwrap();
    let c = g.add_node("C", 48.000, 11.010).unwrap();
    let d = g.add_node("D", 48.010, 11.010).unwrap();
    let trip = g.intern_trip("bus");
    let with = |walk: Duration, pairs: &[(TimePoint, TimePoint)]| {
        let conns = pairs
            .iter()
            .map(|&(x, y)| Connection::new(x, y, trip).unwrap())
            .collect();
        EdgeAtf::from_connections(walk, conns)
    };
    g.add_edge(
        a,
        b,
        with(
            Duration::minutes(40),
            &[(tp(14, 0), tp(14, 20)), (tp(15, 15), tp(15, 20))],
        ),
    )
    .unwrap();
    g.add_edge(
        a,
        c,
        with(
            Duration::INFINITE,
            &[
                (tp(13, 30), tp(13, 50)),
                (tp(18, 0), tp(18, 20)),
                (tp(20, 10), tp(20, 50)),
            ],
        ),
    )
    .unwrap();
    g.add_edge(
        a,
        d,
        with(
            Duration::minutes(20),
            &[
                (tp(12, 0), tp(12, 30)),
                (tp(12, 45), tp(13, 30)),
                (tp(15, 15), tp(15, 30)),
                (tp(16, 5), tp(16, 30)),
            ],
        ),
    )
    .unwrap();
    g
}

/// Synthetic graphs spanning the size, degree and timetable-share ranges.
pub fn synthetic_suite() -> Vec<(String, TransportGraph)> {
    let cases: [(usize, usize, f64, bool); 6] = [
        (60, 59, 100.0, false),
        (60, 20, 20.0, true),
        (100, 20, 70.0, true),
        (200, 3, 70.0, true),
        (200, 3, 20.0, false),
        (120, 3, 100.0, true),
    ];
    cases
        .iter()
        .enumerate()
        .map(|(i, &(n, k, pct, fast))| {
            let mut p = SynthParams::new(n, k, pct, 100 + i as u64);
            if fast {
                p = p.with_template(Template::fast());
            }
            let name = format!("n{n}-k{k}-p{pct}{}", if fast { "-fast" } else { "" });
            (name, generate_synthetic(&p).unwrap())
        })
        .collect()
}

/// Independent earliest-arrival oracle: label-correcting relaxation of
/// every edge until a fixpoint, evaluating each function by a linear scan.
pub fn oracle_arrivals<G: Adjacency>(g: &G, source: NodeId, depart: TimePoint) -> Vec<TimePoint> {
    let n = g.node_count();
    let mut arr = vec![TimePoint::INFINITE; n];
    arr[source.index()] = depart;
    loop {
        let mut changed = false;
        for u in 0..n {
            let t = arr[u];
            if !t.is_finite() {
                continue;
            }
            for e in g.out_edges(NodeId(u as u32)) {
                let a = linear_eval(&e.atf, t);
                if a < arr[e.target.index()] {
                    arr[e.target.index()] = a;
                    changed = true;
                }
            }
        }
        if !changed {
            return arr;
        }
    }
}

/// Edge evaluation by scanning every connection.
pub fn linear_eval(atf: &EdgeAtf, t: TimePoint) -> TimePoint {
    let mut best = t + atf.walk();
    for c in atf.timetable().iter() {
        if c.departure >= t && c.arrival < best {
            best = c.arrival;
        }
    }
    best
}

/// Small random graph on 7 nodes: walks, timetables within the first hour.
pub fn arb_graph() -> impl Strategy<Value = TransportGraph> {
    let edge = (
        0..7u32,
        0..7u32,
        prop_oneof![
            Just(Duration::INFINITE),
            (1..300u32).prop_map(Duration::new)
        ],
        prop::collection::vec((0..3000u32, 0..200u32), 0..5),
    );
    (
        prop::collection::vec((0.0..0.01f64, 0.0..0.01f64), 7),
        prop::collection::vec(edge, 0..25),
    )
        .prop_map(|(coords, edges)| {
            let mut g = TransportGraph::new();
            for (i, (lat, lon)) in coords.into_iter().enumerate() {
                g.add_node(format!("x{i}"), lat, lon).unwrap();
            }
            for (a, b, walk, rides) in edges {
                if a == b {
                    continue;
                }
                let conns = rides
                    .into_iter()
                    .map(|(d, r)| {
                        Connection::new(TimePoint::new(d), TimePoint::new(d + r), TripId(0))
                            .unwrap()
                    })
                    .collect();
                let f = EdgeAtf::from_connections(walk, conns);
                if !f.is_empty() {
                    g.add_edge(NodeId(a), NodeId(b), f).unwrap();
                }
            }
            g
        })
}
