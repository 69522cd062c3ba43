use ttn_core::bench::{
    check_agreement, prepare_with_report, run_bench, sample_queries, BenchConfig, BenchReport,
    DAY_SECS,
};
use ttn_core::datagen::{generate_synthetic, SynthParams};
use ttn_core::{Algorithm, Engine, Error, TimePoint};

fn config(n: usize) -> BenchConfig {
    BenchConfig {
        algorithms: Algorithm::ALL.to_vec(),
        n_queries: n,
        seed: 9,
        parallel: false,
    }
}

fn engine(n: usize, k: usize, pct: f64) -> (Engine, ttn_core::bench::BuildReport) {
    let g = generate_synthetic(&SynthParams::new(n, k, pct, 5)).unwrap();
    let mut e = Engine::new(g);
    let report = prepare_with_report(&mut e, &Algorithm::ALL).unwrap();
    (e, report)
}

#[test]
fn sampling_is_uniform_range_and_deterministic() {
    let q = sample_queries(50, 2000, 1);
    assert_eq!(q.len(), 2000);
    assert_eq!(q, sample_queries(50, 2000, 1));
    assert_ne!(q, sample_queries(50, 2000, 2));
    assert!(q
        .iter()
        .all(|s| s.source.0 < 50 && s.target.0 < 50 && s.depart.secs() < DAY_SECS));
    // Every node shows up as a source in 2000 draws over 50 nodes.
    let mut seen = [false; 50];
    q.iter().for_each(|s| seen[s.source.index()] = true);
    assert!(seen.iter().all(|&b| b));
    assert!(sample_queries(0, 10, 1).is_empty());
}

#[test]
fn empty_run_gives_empty_report() {
    let (e, _) = engine(20, 3, 50.0);
    let r = run_bench(&e, &config(0)).unwrap();
    assert!(r.queries.is_empty() && r.records.is_empty());
    assert!(r.summaries().is_empty());
    let s = r.summary(Algorithm::Csa);
    assert_eq!(
        (s.queries, s.found, s.pct_found(), s.mean_ns),
        (0, 0, 0.0, 0.0)
    );
}

#[test]
fn report_aggregates_match_records() {
    let (e, _) = engine(40, 5, 60.0);
    let r = run_bench(&e, &config(101)).unwrap();
    assert_eq!(r.records.len(), 101 * Algorithm::ALL.len());
    assert_eq!(r.algorithms().len(), Algorithm::ALL.len());
    for a in Algorithm::ALL {
        let recs: Vec<_> = r.records.iter().filter(|x| x.algorithm == a).collect();
        let s = r.summary(a);
        assert_eq!(s.queries, 101);
        assert_eq!(
            s.found,
            recs.iter().filter(|x| x.arrival.is_finite()).count()
        );
        let mean = recs.iter().map(|x| x.expanded as f64).sum::<f64>() / 101.0;
        assert!((s.mean_expanded - mean).abs() < 1e-9);
        let mut ns: Vec<u64> = recs.iter().map(|x| x.wall_ns).collect();
        ns.sort_unstable();
        assert_eq!(s.median_ns, ns[50] as f64);
    }
    let graph = r.summary(Algorithm::DijTte).pct_found();
    assert!(r.summary(Algorithm::Csa).pct_found() <= graph);

    let dir = tempfile::tempdir().unwrap();
    r.write(dir.path()).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("queries.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + r.records.len());
    let md = std::fs::read_to_string(dir.path().join("summary.md")).unwrap();
    for a in Algorithm::ALL {
        assert!(md.contains(&format!("| {a} |")), "{a}");
    }
}

#[test]
fn reruns_are_reproducible() {
    let (e, _) = engine(40, 5, 60.0);
    let strip = |r: BenchReport| {
        r.records
            .into_iter()
            .map(|x| (x.query, x.algorithm, x.arrival, x.expanded))
            .collect::<Vec<_>>()
    };
    let a = strip(run_bench(&e, &config(50)).unwrap());
    let mut par = config(50);
    par.parallel = true;
    let b = strip(run_bench(&e, &par).unwrap());
    assert_eq!(a, b);
}

#[test]
fn build_report_sizes() {
    let (_, dense) = engine(60, 40, 100.0);
    let cst = dense.get("cst").unwrap();
    let asc = dense.get("fc-asc").unwrap();
    let dsc = dense.get("fc-dsc").unwrap();
    assert!(cst.bytes > asc.bytes, "{} vs {}", cst.bytes, asc.bytes);
    // Uniform list lengths: both orderings build the same amount.
    assert_eq!(asc.bytes, dsc.bytes);
    assert_eq!(asc.elements, dsc.elements);
    for name in [
        "graph",
        "csa",
        "tch",
        "tch-cst",
        "tch-fc-asc",
        "tch-fc-dsc",
        "tch-fc-chs",
    ] {
        assert!(dense.get(name).is_some(), "{name}");
    }
    assert!(dense.markdown().lines().count() >= 2 + dense.entries.len());

    let (_, walk_only) = engine(60, 40, 0.0);
    for name in ["cst", "fc-asc", "fc-dsc", "tch-cst", "tch-fc-chs"] {
        assert_eq!(walk_only.get(name).unwrap().elements, 0, "{name}");
    }
}

#[test]
fn forced_mismatch_is_a_violation() {
    let t = TimePoint::new;
    let ok = vec![
        (Algorithm::DijTte, vec![t(10), TimePoint::INFINITE]),
        (Algorithm::FsTchCst, vec![t(10), TimePoint::INFINITE]),
        (Algorithm::Csa, vec![t(12), TimePoint::INFINITE]),
    ];
    check_agreement(&ok).unwrap();
    let mut graph_split = ok.clone();
    graph_split[1].1[0] = t(11);
    assert!(matches!(
        check_agreement(&graph_split),
        Err(Error::AgreementViolation { query: 0, .. })
    ));
    let mut csa_early = ok;
    csa_early[2].1[1] = t(5);
    assert!(matches!(
        check_agreement(&csa_early),
        Err(Error::AgreementViolation { query: 1, .. })
    ));
}
