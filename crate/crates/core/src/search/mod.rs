//! Earliest-arrival queries: Dijkstra over edge functions (optionally
//! accelerated by node indices), forward search over the contraction
//! hierarchy, and the connection scan.

mod dijkstra;
mod forward;
mod geo;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

pub use dijkstra::dijkstra;
pub use forward::forward_search;
pub use geo::{great_circle_m, GeoBound};

use crate::csa::MergedTimetable;
use crate::model::{Adjacency, Journey, NodeId, TransportGraph};
use crate::tch::{ContractionParams, TchGraph};
use crate::time::TimePoint;
use crate::ttn::{OrderingStrategy, TtnIndex, TtnKind};
use crate::{Error, Result};

/// Every query algorithm the engine runs.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Algorithm {
    Csa,
    DijTte,
    DijCst,
    DijFcAsc,
    DijFcDsc,
    FsTchTte,
    FsTchCst,
    FsTchFcAsc,
    FsTchFcDsc,
    FsTchFcChs,
}

impl Algorithm {
    pub const ALL: [Algorithm; 10] = [
        Algorithm::Csa,
        Algorithm::DijTte,
        Algorithm::DijCst,
        Algorithm::DijFcAsc,
        Algorithm::DijFcDsc,
        Algorithm::FsTchTte,
        Algorithm::FsTchCst,
        Algorithm::FsTchFcAsc,
        Algorithm::FsTchFcDsc,
        Algorithm::FsTchFcChs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Csa => "csa",
            Algorithm::DijTte => "dij-tte",
            Algorithm::DijCst => "dij-cst",
            Algorithm::DijFcAsc => "dij-fc-asc",
            Algorithm::DijFcDsc => "dij-fc-dsc",
            Algorithm::FsTchTte => "fs-tch-tte",
            Algorithm::FsTchCst => "fs-tch-cst",
            Algorithm::FsTchFcAsc => "fs-tch-fc-asc",
            Algorithm::FsTchFcDsc => "fs-tch-fc-dsc",
            Algorithm::FsTchFcChs => "fs-tch-fc-chs",
        }
    }

    /// Everything except the connection scan works on the graph.
    pub fn is_graph_based(self) -> bool {
        self != Algorithm::Csa
    }

    pub fn uses_tch(self) -> bool {
        matches!(
            self,
            Algorithm::FsTchTte
                | Algorithm::FsTchCst
                | Algorithm::FsTchFcAsc
                | Algorithm::FsTchFcDsc
                | Algorithm::FsTchFcChs
        )
    }

    /// Node index used, if any.
    pub fn ttn(self) -> Option<TtnKind> {
        use OrderingStrategy::*;
        match self {
            Algorithm::Csa | Algorithm::DijTte | Algorithm::FsTchTte => None,
            Algorithm::DijCst | Algorithm::FsTchCst => Some(TtnKind::Cst),
            Algorithm::DijFcAsc | Algorithm::FsTchFcAsc => Some(TtnKind::Fc(Asc)),
            Algorithm::DijFcDsc | Algorithm::FsTchFcDsc => Some(TtnKind::Fc(Dsc)),
            Algorithm::FsTchFcChs => Some(TtnKind::Fc(Chs)),
        }
    }

    /// Combines a search family (`csa`, `dij`, `fs-tch`) with an index name
    /// (`none`, `tte`, `cst`, `fc-asc`, `fc-dsc`, `fc-chs`).
    pub fn from_parts(family: &str, ttn: &str) -> Result<Algorithm> {
        let ttn = match ttn {
            "none" => "tte",
            other => other,
        };
        let name = match family {
            "csa" if ttn == "tte" => "csa".to_string(),
            "dij" | "fs-tch" => format!("{family}-{ttn}"),
            _ => String::new(),
        };
        name.parse().map_err(|_| {
            Error::InvalidParameters(format!("no algorithm for `{family}` with index `{ttn}`"))
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('_', "-");
        if s == "fs-tch-chs" {
            return Ok(Algorithm::FsTchFcChs);
        }
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameters(format!("unknown algorithm `{s}`")))
    }
}

/// Lower bound guiding forward search.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Default)]
pub enum Heuristic {
    #[default]
    Zero,
    /// Great-circle distance over the fastest observed speed.
    GeoLowerBound,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct QueryRequest {
    pub source: NodeId,
    pub target: NodeId,
    pub depart: TimePoint,
    pub algorithm: Algorithm,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QueryResult {
    /// [`TimePoint::INFINITE`] when the target is unreachable.
    pub arrival: TimePoint,
    /// Present iff `arrival` is finite.
    pub journey: Option<Journey>,
    pub expanded_nodes: u64,
    pub settled_edges: u64,
    pub wall_time_ns: u64,
    /// Node sequence in the hierarchy (forward search only).
    pub tch_path: Option<Vec<NodeId>>,
}

impl QueryResult {
    pub fn found(&self) -> bool {
        self.arrival.is_finite()
    }
}

/// Search outcome before journey materialisation.
pub(crate) struct Outcome {
    pub arrival: TimePoint,
    pub journey: Option<Journey>,
    pub expanded: u64,
    pub relaxed: u64,
    pub tch_path: Option<Vec<NodeId>>,
}

/// Owns a graph and whatever precomputation the requested algorithms need.
pub struct Engine {
    graph: TransportGraph,
    params: ContractionParams,
    heuristic: Heuristic,
    tch: Option<TchGraph>,
    ttn_base: HashMap<TtnKind, TtnIndex>,
    ttn_tch: HashMap<TtnKind, TtnIndex>,
    csa: Option<MergedTimetable>,
    geo: Option<GeoBound>,
}

impl Engine {
    pub fn new(graph: TransportGraph) -> Engine {
        Engine {
            graph,
            params: ContractionParams::default(),
            heuristic: Heuristic::Zero,
            tch: None,
            ttn_base: HashMap::new(),
            ttn_tch: HashMap::new(),
            csa: None,
            geo: None,
        }
    }

    /// Engine around a graph and an already contracted hierarchy of it.
    pub fn with_tch(graph: TransportGraph, tch: TchGraph) -> Engine {
        let mut e = Engine::new(graph);
        e.tch = Some(tch);
        e
    }

    pub fn set_contraction_params(&mut self, params: ContractionParams) {
        self.params = params;
    }

    pub fn set_heuristic(&mut self, heuristic: Heuristic) {
        self.heuristic = heuristic;
        if heuristic == Heuristic::GeoLowerBound && self.geo.is_none() {
            self.geo = Some(GeoBound::new(&self.graph));
        }
    }

    pub fn graph(&self) -> &TransportGraph {
        &self.graph
    }

    pub fn tch(&self) -> Option<&TchGraph> {
        self.tch.as_ref()
    }

    pub fn ttn(&self, on_tch: bool, kind: TtnKind) -> Option<&TtnIndex> {
        if on_tch {
            self.ttn_tch.get(&kind)
        } else {
            self.ttn_base.get(&kind)
        }
    }

    pub fn csa(&self) -> Option<&MergedTimetable> {
        self.csa.as_ref()
    }

    /// Installs a prebuilt index (e.g. loaded from a cache).
    pub fn insert_ttn(&mut self, on_tch: bool, index: TtnIndex) {
        let map = if on_tch {
            &mut self.ttn_tch
        } else {
            &mut self.ttn_base
        };
        map.insert(index.kind(), index);
    }

    /// Builds the contraction hierarchy if missing.
    pub fn ensure_tch(&mut self) -> Result<&TchGraph> {
        if self.tch.is_none() {
            self.tch = Some(TchGraph::build(self.graph.clone(), self.params)?);
        }
        Ok(self.tch.as_ref().unwrap())
    }

    /// Builds every structure `algorithms` depend on.
    pub fn prepare(&mut self, algorithms: &[Algorithm]) -> Result<()> {
        for &a in algorithms {
            if a == Algorithm::Csa && self.csa.is_none() {
                self.csa = Some(MergedTimetable::build(&self.graph));
            }
            if a.uses_tch() {
                self.ensure_tch()?;
            }
            if let Some(kind) = a.ttn() {
                if a.uses_tch() {
                    if !self.ttn_tch.contains_key(&kind) {
                        let tch = self.tch.as_ref().unwrap();
                        let idx = TtnIndex::build(tch, kind, Some(tch.levels()))?;
                        self.ttn_tch.insert(kind, idx);
                    }
                } else if !self.ttn_base.contains_key(&kind) {
                    let idx = TtnIndex::build(&self.graph, kind, None)?;
                    self.ttn_base.insert(kind, idx);
                }
            }
        }
        Ok(())
    }

    fn check_node(&self, v: NodeId) -> Result<()> {
        if v.index() < self.graph.node_count() {
            Ok(())
        } else {
            Err(Error::UnknownNode(v.to_string()))
        }
    }

    pub fn query(&self, req: &QueryRequest) -> Result<QueryResult> {
        self.check_node(req.source)?;
        self.check_node(req.target)?;
        if !req.depart.is_finite() {
            return Err(Error::InvalidParameters("departure must be finite".into()));
        }
        let start = Instant::now();
        let alg = req.algorithm;
        let outcome = match alg {
            Algorithm::Csa => {
                let mt = self
                    .csa
                    .as_ref()
                    .ok_or(Error::NotPrepared("merged timetable"))?;
                mt.query(req.source, req.target, req.depart)?
            }
            _ if alg.uses_tch() => {
                let tch = self
                    .tch
                    .as_ref()
                    .ok_or(Error::NotPrepared("contraction hierarchy"))?;
                let ttn = match alg.ttn() {
                    Some(kind) => Some(
                        self.ttn_tch
                            .get(&kind)
                            .ok_or(Error::NotPrepared("node index"))?,
                    ),
                    None => None,
                };
                let geo = match self.heuristic {
                    Heuristic::Zero => None,
                    Heuristic::GeoLowerBound => self.geo.as_ref(),
                };
                forward::run(tch, ttn, req, geo)?
            }
            _ => {
                let ttn = match alg.ttn() {
                    Some(kind) => Some(
                        self.ttn_base
                            .get(&kind)
                            .ok_or(Error::NotPrepared("node index"))?,
                    ),
                    None => None,
                };
                dijkstra::run(&self.graph, ttn, req)
            }
        };
        let wall_time_ns = start.elapsed().as_nanos() as u64;
        Ok(QueryResult {
            arrival: outcome.arrival,
            journey: outcome.journey,
            expanded_nodes: outcome.expanded,
            settled_edges: outcome.relaxed,
            wall_time_ns,
            tch_path: outcome.tch_path,
        })
    }
}
