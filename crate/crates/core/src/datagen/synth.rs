use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Connection, EdgeAtf, NodeId, TransportGraph};
use crate::time::{Duration, TimePoint};
use crate::{Error, Result};

/// Walk and departure pattern copied onto generated edges.
#[derive(Clone, Debug, PartialEq)]
pub struct Template {
    pub walk: Duration,
    /// `(departure, arrival)` pairs.
    pub rides: Vec<(TimePoint, TimePoint)>,
}

impl Template {
    /// `count` departures every `headway` from `first`, each riding `ride`.
    pub fn periodic(
        walk: Duration,
        first: TimePoint,
        headway: Duration,
        ride: Duration,
        count: u32,
    ) -> Template {
        let rides = (0..count)
            .map(|i| {
                let d = TimePoint::new(first.secs() + i * headway.secs());
                (d, d + ride)
            })
            .collect();
        Template { walk, rides }
    }

    /// 59 departures 15 minutes apart from 06:00, 10 minute rides, 404 s
    /// walk. Walking always beats these rides.
    pub fn standard() -> Template {
        Self::periodic(
            Duration::new(404),
            TimePoint::hms(6, 0, 0),
            Duration::minutes(15),
            Duration::minutes(10),
            59,
        )
    }

    /// Same shape as [`Template::standard`] with 3 minute rides, so riding
    /// pays off whenever a departure is close.
    pub fn fast() -> Template {
        Self::periodic(
            Duration::new(404),
            TimePoint::hms(6, 0, 0),
            Duration::minutes(15),
            Duration::minutes(3),
            59,
        )
    }
}

impl Default for Template {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthParams {
    pub nodes: usize,
    /// Exact out-degree of every node.
    pub out_degree: usize,
    /// Percentage of edges carrying the template timetable.
    pub pct_timetable: f64,
    pub seed: u64,
    pub template: Template,
}

impl SynthParams {
    pub fn new(nodes: usize, out_degree: usize, pct_timetable: f64, seed: u64) -> Self {
        SynthParams {
            nodes,
            out_degree,
            pct_timetable,
            seed,
            template: Template::standard(),
        }
    }

    pub fn with_template(mut self, template: Template) -> Self {
        self.template = template;
        self
    }

    /// Number of edges that get the timetable.
    pub fn timetabled_edges(&self) -> usize {
        (self.pct_timetable * (self.nodes * self.out_degree) as f64 / 100.0).round() as usize
    }
}

/// Random graph: every node gets `out_degree` distinct uniform targets,
/// every edge the template walk, and a seeded uniform choice of
/// `pct_timetable` percent of the edges also the template timetable. Node
/// coordinates are uniform over a 0.1 x 0.1 degree patch.
pub fn generate_synthetic(p: &SynthParams) -> Result<TransportGraph> {
    if p.nodes == 0 || p.out_degree >= p.nodes {
        return Err(Error::InvalidParameters(format!(
            "out-degree {} needs more than that many nodes (have {})",
            p.out_degree, p.nodes
        )));
    }
    if !(0.0..=100.0).contains(&p.pct_timetable) {
        return Err(Error::InvalidParameters(format!(
            "timetable percentage {} outside [0, 100]",
            p.pct_timetable
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut g = TransportGraph::new();
    for i in 0..p.nodes {
        let lat = 48.0 + rng.gen::<f64>() * 0.1;
        let lon = 11.0 + rng.gen::<f64>() * 0.1;
        g.add_node(format!("n{i}"), lat, lon)?;
    }

    let mut pairs = Vec::with_capacity(p.nodes * p.out_degree);
    for u in 0..p.nodes {
        let mut targets: Vec<usize> = sample(&mut rng, p.nodes - 1, p.out_degree)
            .into_iter()
            .map(|t| if t >= u { t + 1 } else { t })
            .collect();
        targets.sort_unstable();
        pairs.extend(targets.into_iter().map(|t| (u, t)));
    }
    let mut with_tt = vec![false; pairs.len()];
    for i in sample(&mut rng, pairs.len(), p.timetabled_edges().min(pairs.len())) {
        with_tt[i] = true;
    }

    let trips: Vec<_> = (0..p.template.rides.len())
        .map(|i| g.intern_trip(&format!("tpl{i}")))
        .collect();
    let timetable: Vec<Connection> = p
        .template
        .rides
        .iter()
        .zip(&trips)
        .map(|(&(d, a), &trip)| Connection::new(d, a, trip))
        .collect::<Result<_>>()?;
    for ((u, w), tt) in pairs.into_iter().zip(with_tt) {
        let conns = if tt { timetable.clone() } else { Vec::new() };
        g.add_edge(
            NodeId(u as u32),
            NodeId(w as u32),
            EdgeAtf::from_connections(p.template.walk, conns),
        )?;
    }
    Ok(g)
}
