use std::fs;
use std::path::Path;

use proptest::prelude::*;
use ttn_core::datagen::{
    generate_synthetic, load_dataset, to_csv_string, write_csv, LoadOptions, SynthParams,
};
use ttn_core::model::Adjacency;
use ttn_core::ttn::{OrderingStrategy, TtnIndex, TtnKind};
use ttn_core::{Duration, Error, TimePoint};

const NODES: &str = "node_id,lat,lon\na,48,11\nb,48.001,11\nc,48.002,11\n";
const NO_RIDES: &str = "from_id,to_id,dep_s,arr_s,trip_label\n";

fn dataset(dir: &Path, nodes: &str, foot: &str, conns: &str) {
    fs::write(dir.join("nodes.csv"), nodes).unwrap();
    fs::write(dir.join("footpaths.csv"), foot).unwrap();
    fs::write(dir.join("connections.csv"), conns).unwrap();
}

fn load(foot: &str, conns: &str) -> ttn_core::Result<ttn_core::TransportGraph> {
    let dir = tempfile::tempdir().unwrap();
    dataset(dir.path(), NODES, foot, conns);
    load_dataset(dir.path(), LoadOptions::default())
}

fn parse_line(e: Error) -> (String, u64) {
    match e {
        Error::Parse { path, line, .. } => (
            path.file_name().unwrap().to_string_lossy().into_owned(),
            line,
        ),
        other => panic!("expected a parse error, got {other}"),
    }
}

#[test]
fn walk_limit_boundary() {
    let g = load("from_id,to_id,duration_s\na,b,600\na,c,601\n", NO_RIDES).unwrap();
    let ab = g.edge(g.node("a").unwrap(), g.node("b").unwrap()).unwrap();
    assert_eq!(ab.atf.walk(), Duration::new(600));
    assert!(g.edge(g.node("a").unwrap(), g.node("c").unwrap()).is_none());
}

#[test]
fn walk_speed_scales_and_rounds_up() {
    let dir = tempfile::tempdir().unwrap();
    dataset(
        dir.path(),
        NODES,
        "from_id,to_id,duration_s\na,b,301\n",
        NO_RIDES,
    );
    let opts = LoadOptions {
        walk_speed_mps: 1.5,
        ..LoadOptions::default()
    };
    let g = load_dataset(dir.path(), opts).unwrap();
    let ab = g.edge(g.node("a").unwrap(), g.node("b").unwrap()).unwrap();
    assert_eq!(ab.atf.walk(), Duration::new(201));
    let bad = LoadOptions {
        walk_speed_mps: 0.0,
        ..LoadOptions::default()
    };
    assert!(matches!(
        load_dataset(dir.path(), bad),
        Err(Error::InvalidParameters(_))
    ));
}

#[test]
fn parallel_entries_merge_into_one_edge() {
    let g = load(
        "from_id,to_id,duration_s\na,b,500\na,b,300\n",
        "from_id,to_id,dep_s,arr_s,trip_label\na,b,100,200,x\na,b,1000,1100,y\na,b,50,400,z\n",
    )
    .unwrap();
    assert_eq!(g.edge_count(), 1);
    let e = g.edge(g.node("a").unwrap(), g.node("b").unwrap()).unwrap();
    assert_eq!(e.atf.walk(), Duration::new(300));
    // 50 -> 400 is beaten by walking (50 + 300 = 350); 100 -> 200 is kept.
    assert_eq!(e.atf.eval(TimePoint::new(50)), TimePoint::new(200));
    assert_eq!(e.atf.eval(TimePoint::new(900)), TimePoint::new(1100));
    assert_eq!(g.trips().len(), 3);
}

#[test]
fn arrival_before_departure_is_rejected() {
    let err = load(
        "from_id,to_id,duration_s\n",
        "from_id,to_id,dep_s,arr_s,trip_label\na,b,100,200,x\na,b,500,400,x\n",
    )
    .unwrap_err();
    assert_eq!(parse_line(err), ("connections.csv".into(), 3));
}

#[test]
fn malformed_rows_report_file_and_line() {
    let err = load("from_id,to_id,duration_s\na,b,10\na,c,ten\n", NO_RIDES).unwrap_err();
    assert_eq!(parse_line(err), ("footpaths.csv".into(), 3));
    let err = load(
        "from_id,to_id,duration_s\n",
        "from_id,to_id,dep_s,arr_s,trip_label\na,b,1,2\n",
    )
    .unwrap_err();
    assert_eq!(parse_line(err), ("connections.csv".into(), 2));
    let dir = tempfile::tempdir().unwrap();
    dataset(
        dir.path(),
        "node_id,lat,lon\na,48,11\na,49,11\n",
        "from_id,to_id,duration_s\n",
        NO_RIDES,
    );
    assert_eq!(
        parse_line(load_dataset(dir.path(), LoadOptions::default()).unwrap_err()),
        ("nodes.csv".into(), 3)
    );
    dataset(
        dir.path(),
        "node_id,lat,lon\na,98,11\n",
        "from_id,to_id,duration_s\n",
        NO_RIDES,
    );
    assert_eq!(
        parse_line(load_dataset(dir.path(), LoadOptions::default()).unwrap_err()),
        ("nodes.csv".into(), 2)
    );
}

#[test]
fn dangling_node_is_rejected() {
    let err = load("from_id,to_id,duration_s\na,zz,10\n", NO_RIDES).unwrap_err();
    assert_eq!(parse_line(err), ("footpaths.csv".into(), 2));
    let err = load(
        "from_id,to_id,duration_s\n",
        "from_id,to_id,dep_s,arr_s,trip_label\nqq,b,1,2,x\n",
    )
    .unwrap_err();
    assert_eq!(parse_line(err), ("connections.csv".into(), 2));
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_dataset(dir.path(), LoadOptions::default()).is_err());
}

#[test]
fn synthetic_is_deterministic_and_round_trips() {
    let p = SynthParams::new(60, 20, 70.0, 42);
    let a = generate_synthetic(&p).unwrap();
    let b = generate_synthetic(&p).unwrap();
    assert_eq!(to_csv_string(&a).unwrap(), to_csv_string(&b).unwrap());
    let c = generate_synthetic(&SynthParams::new(60, 20, 70.0, 43)).unwrap();
    assert_ne!(to_csv_string(&a).unwrap(), to_csv_string(&c).unwrap());

    let dir = tempfile::tempdir().unwrap();
    write_csv(&a, dir.path()).unwrap();
    let back = load_dataset(dir.path(), LoadOptions::default()).unwrap();
    assert_eq!(to_csv_string(&back).unwrap(), to_csv_string(&a).unwrap());
}

#[test]
fn zero_percent_is_walk_only() {
    let g = generate_synthetic(&SynthParams::new(60, 10, 0.0, 1)).unwrap();
    assert_eq!(g.connection_count(), 0);
    assert!(g.edges().all(|(_, e)| e.atf.walk() == Duration::new(404)));
    for kind in [
        TtnKind::Cst,
        TtnKind::Fc(OrderingStrategy::Asc),
        TtnKind::Fc(OrderingStrategy::Dsc),
    ] {
        let idx = TtnIndex::build(&g, kind, None).unwrap();
        assert_eq!(idx.element_count(), 0);
        assert_eq!(idx.indexed_nodes(), 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn synthetic_counts_are_exact(n in 2usize..50, k_frac in 0.0..1.0f64, pct in 0.0..=100.0f64, seed in any::<u64>()) {
        let k = ((n - 1) as f64 * k_frac) as usize;
        let p = SynthParams::new(n, k, pct, seed);
        let g = generate_synthetic(&p).unwrap();
        prop_assert_eq!(g.node_count(), n);
        prop_assert_eq!(g.edge_count(), n * k);
        for v in 0..n as u32 {
            let out = g.out_edges(ttn_core::NodeId(v));
            prop_assert_eq!(out.len(), k);
            prop_assert!(out.iter().all(|e| e.target.0 != v));
        }
        let timetabled = g.edges().filter(|(_, e)| e.atf.size() > 0).count();
        prop_assert_eq!(timetabled, p.timetabled_edges());
        prop_assert_eq!(timetabled, (pct * (n * k) as f64 / 100.0).round() as usize);
        prop_assert!(g.edges().all(|(_, e)| e.atf.size() == 0 || e.atf.size() == 59));
        for r in g.records() {
            prop_assert!((48.0..=48.1).contains(&r.lat) && (11.0..=11.1).contains(&r.lon));
        }
    }
}
