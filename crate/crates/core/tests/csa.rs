mod common;

use common::{arb_graph, oracle_arrivals, synthetic_suite, tp};
use proptest::prelude::*;
use ttn_core::bench::sample_queries;
use ttn_core::csa::MergedTimetable;
use ttn_core::model::Adjacency;
use ttn_core::{
    Algorithm, Connection, Duration, EdgeAtf, Engine, NodeId, QueryRequest, TimePoint,
    TransportGraph,
};

fn query(
    e: &Engine,
    s: NodeId,
    t: NodeId,
    depart: TimePoint,
    algorithm: Algorithm,
) -> ttn_core::QueryResult {
    e.query(&QueryRequest {
        source: s,
        target: t,
        depart,
        algorithm,
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn csa_never_beats_the_graph(g in arb_graph()) {
        let mut e = Engine::new(g.clone());
        e.prepare(&[Algorithm::Csa]).unwrap();
        let n = g.node_count() as u32;
        for s in 0..n {
            for depart in (0..3400).step_by(170).map(TimePoint::new) {
                let best = oracle_arrivals(&g, NodeId(s), depart);
                for t in 0..n {
                    let r = query(&e, NodeId(s), NodeId(t), depart, Algorithm::Csa);
                    prop_assert!(r.arrival >= best[t as usize]);
                    if let Some(j) = &r.journey {
                        j.validate(NodeId(s), NodeId(t), depart).map_err(TestCaseError::fail)?;
                        prop_assert!(!j.has_chained_walks());
                        prop_assert_eq!(j.arrival, r.arrival);
                    } else {
                        prop_assert!(!r.arrival.is_finite());
                    }
                }
            }
        }
    }
}

#[test]
fn merged_timetable_is_departure_sorted() {
    for (name, g) in synthetic_suite() {
        let mt = MergedTimetable::build(&g);
        assert_eq!(mt.connections().len(), g.connection_count(), "{name}");
        assert!(mt
            .connections()
            .windows(2)
            .all(|w| w[0].departure <= w[1].departure));
        assert_eq!(mt.stop_count(), g.node_count());
        let walks: usize = (0..g.node_count() as u32)
            .map(|v| mt.footpaths(NodeId(v)).len())
            .sum();
        assert_eq!(
            walks,
            g.edges().filter(|(_, e)| e.atf.walk().is_finite()).count()
        );
    }
}

#[test]
fn path_share_is_no_higher_than_graph_search() {
    for (name, g) in synthetic_suite() {
        let mut e = Engine::new(g.clone());
        e.prepare(&[Algorithm::Csa, Algorithm::DijTte]).unwrap();
        let (mut csa, mut dij) = (0, 0);
        for q in sample_queries(g.node_count(), 300, 3) {
            let c = query(&e, q.source, q.target, q.depart, Algorithm::Csa);
            let d = query(&e, q.source, q.target, q.depart, Algorithm::DijTte);
            assert!(c.arrival >= d.arrival, "{name}");
            csa += c.found() as usize;
            dij += d.found() as usize;
        }
        assert!(dij >= csa, "{name}: {dij} < {csa}");
    }
}

#[test]
fn chained_walks_separate_the_models() {
    // a -walk-> b -walk-> c: the graph finds it, the scan cannot.
    let mut g = TransportGraph::new();
    let a = g.add_node("a", 0.0, 0.0).unwrap();
    let b = g.add_node("b", 0.0, 0.001).unwrap();
    let c = g.add_node("c", 0.0, 0.002).unwrap();
    g.add_edge(a, b, EdgeAtf::walk_only(Duration::new(100)))
        .unwrap();
    g.add_edge(b, c, EdgeAtf::walk_only(Duration::new(100)))
        .unwrap();
    let mut e = Engine::new(g);
    e.prepare(&[Algorithm::Csa, Algorithm::DijTte]).unwrap();
    assert_eq!(
        query(&e, a, c, tp(8, 0), Algorithm::DijTte).arrival,
        tp(8, 0) + Duration::new(200)
    );
    assert_eq!(
        query(&e, a, c, tp(8, 0), Algorithm::Csa).arrival,
        TimePoint::INFINITE
    );
    assert_eq!(
        query(&e, a, b, tp(8, 0), Algorithm::Csa).arrival,
        tp(8, 0) + Duration::new(100)
    );
}

#[test]
fn ride_walk_ride_is_found() {
    let mut g = TransportGraph::new();
    let ids: Vec<NodeId> = (0..4)
        .map(|i| g.add_node(format!("s{i}"), 0.0, i as f64 * 0.001).unwrap())
        .collect();
    let trip = g.intern_trip("r");
    let ride = |d: TimePoint, a: TimePoint| {
        EdgeAtf::from_connections(
            Duration::INFINITE,
            vec![Connection::new(d, a, trip).unwrap()],
        )
    };
    g.add_edge(ids[0], ids[1], ride(tp(8, 0), tp(8, 10)))
        .unwrap();
    g.add_edge(ids[1], ids[2], EdgeAtf::walk_only(Duration::minutes(5)))
        .unwrap();
    g.add_edge(ids[2], ids[3], ride(tp(8, 15), tp(8, 30)))
        .unwrap();
    let mut e = Engine::new(g);
    e.prepare(&[Algorithm::Csa]).unwrap();
    let r = query(&e, ids[0], ids[3], tp(7, 55), Algorithm::Csa);
    assert_eq!(r.arrival, tp(8, 30));
    assert_eq!(r.journey.unwrap().legs.len(), 3);
}
