//! Domain model: connections, timetables, edge arrival time functions and the
//! multimodal transport graph.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::time::{Duration, TimePoint};

/// Dense node index into a [`TransportGraph`].
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Interned trip label. The strings live in [`TripLabels`], out of the hot
/// timetable arrays.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct TripId(pub u32);

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TripLabels {
    labels: Vec<String>,
    lookup: HashMap<String, TripId>,
}

impl TripLabels {
    pub fn intern(&mut self, label: &str) -> TripId {
        if let Some(&id) = self.lookup.get(label) {
            return id;
        }
        let id = TripId(self.labels.len() as u32);
        self.labels.push(label.to_owned());
        self.lookup.insert(label.to_owned(), id);
        id
    }

    pub fn get(&self, id: TripId) -> Option<&str> {
        self.labels.get(id.0 as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct Connection {
    pub departure: TimePoint,
    pub arrival: TimePoint,
    pub trip: TripId,
}

impl Connection {
    pub fn new(departure: TimePoint, arrival: TimePoint, trip: TripId) -> Result<Self> {
        if arrival < departure {
            return Err(Error::InvalidConnection {
                dep: departure.secs(),
                arr: arrival.secs(),
            });
        }
        Ok(Connection {
            departure,
            arrival,
            trip,
        })
    }

    pub fn is_zero_length(&self) -> bool {
        self.departure == self.arrival
    }
}

/// Connections of one edge, sorted by departure then arrival.
///
/// Stored column-wise so that the departure binary search touches one
/// contiguous array.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Timetable {
    deps: Vec<TimePoint>,
    arrs: Vec<TimePoint>,
    trips: Vec<TripId>,
}

impl Timetable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sorts the given connections into a timetable.
    pub fn from_connections(mut conns: Vec<Connection>) -> Self {
        conns.sort_by_key(|c| (c.departure, c.arrival, c.trip));
        Self::from_sorted_unchecked(conns)
    }

    pub(crate) fn from_sorted_unchecked(conns: Vec<Connection>) -> Self {
        let mut tt = Timetable {
            deps: Vec::with_capacity(conns.len()),
            arrs: Vec::with_capacity(conns.len()),
            trips: Vec::with_capacity(conns.len()),
        };
        for c in conns {
            tt.deps.push(c.departure);
            tt.arrs.push(c.arrival);
            tt.trips.push(c.trip);
        }
        debug_assert!(tt.is_sorted());
        tt
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.deps.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.deps.is_empty()
    }

    #[inline]
    pub fn departures(&self) -> &[TimePoint] {
        &self.deps
    }

    #[inline]
    pub fn arrivals(&self) -> &[TimePoint] {
        &self.arrs
    }

    #[inline]
    pub fn trips(&self) -> &[TripId] {
        &self.trips
    }

    #[inline]
    pub fn get(&self, i: usize) -> Connection {
        Connection {
            departure: self.deps[i],
            arrival: self.arrs[i],
            trip: self.trips[i],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Connection> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn to_vec(&self) -> Vec<Connection> {
        self.iter().collect()
    }

    /// Index of the first connection departing at or after `t`.
    #[inline]
    pub fn next_departure(&self, t: TimePoint) -> Option<usize> {
        let i = self.deps.partition_point(|&d| d < t);
        (i < self.deps.len()).then_some(i)
    }

    pub fn is_sorted(&self) -> bool {
        (1..self.len())
            .all(|i| (self.deps[i - 1], self.arrs[i - 1]) <= (self.deps[i], self.arrs[i]))
    }

    /// True when departures and arrivals both strictly increase: the first
    /// boardable connection is the earliest arriving one and no connection
    /// is dominated by a later one.
    pub fn is_fifo(&self) -> bool {
        (1..self.len()).all(|i| self.deps[i - 1] < self.deps[i] && self.arrs[i - 1] < self.arrs[i])
    }
}

impl fmt::Debug for Timetable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.iter().map(|c| (c.departure, c.arrival)))
            .finish()
    }
}

/// Arrival time function of one edge: an optional constant walk plus a
/// timetable. `eval(t) = min(t + walk, first arrival departing >= t)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EdgeAtf {
    walk: Duration,
    timetable: Timetable,
}

/// Which component of an [`EdgeAtf`] produced an evaluation.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum LegChoice {
    Walk,
    Ride(usize),
}

/// Neither walkable nor served.
impl Default for EdgeAtf {
    fn default() -> Self {
        EdgeAtf::walk_only(Duration::INFINITE)
    }
}

impl EdgeAtf {
    /// Builds an ATF, dropping connections overtaken by a later-or-equal
    /// departure that arrives no later.
    pub fn new(walk: Duration, timetable: Timetable) -> Self {
        let timetable = if timetable.is_fifo() {
            timetable
        } else {
            crate::atf::prune_overtaken(&timetable)
        };
        EdgeAtf { walk, timetable }
    }

    pub fn walk_only(walk: Duration) -> Self {
        EdgeAtf {
            walk,
            timetable: Timetable::new(),
        }
    }

    pub fn from_connections(walk: Duration, conns: Vec<Connection>) -> Self {
        Self::new(walk, Timetable::from_connections(conns))
    }

    pub(crate) fn from_parts_unchecked(walk: Duration, timetable: Timetable) -> Self {
        debug_assert!(timetable.is_fifo());
        EdgeAtf { walk, timetable }
    }

    #[inline]
    pub fn walk(&self) -> Duration {
        self.walk
    }

    #[inline]
    pub fn timetable(&self) -> &Timetable {
        &self.timetable
    }

    /// Number of connections, the "size" of the function.
    #[inline]
    pub fn size(&self) -> usize {
        self.timetable.len()
    }

    /// Neither walkable nor served.
    pub fn is_empty(&self) -> bool {
        !self.walk.is_finite() && self.timetable.is_empty()
    }

    #[inline]
    pub fn eval(&self, t: TimePoint) -> TimePoint {
        crate::atf::eval_atf(self, t)
    }

    /// Like [`EdgeAtf::eval`] but also reports the component used. Walking
    /// wins ties.
    pub fn choose(&self, t: TimePoint) -> Option<(LegChoice, TimePoint)> {
        if !t.is_finite() {
            return None;
        }
        let walk = t + self.walk;
        let ride = self
            .timetable
            .next_departure(t)
            .map(|i| (i, self.timetable.arrivals()[i]));
        match ride {
            Some((i, arr)) if arr < walk => Some((LegChoice::Ride(i), arr)),
            _ if walk.is_finite() => Some((LegChoice::Walk, walk)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeRecord {
    pub id: String,
    pub lat: f64,
    pub lon: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub target: NodeId,
    pub atf: EdgeAtf,
}

/// Anything with indexable out-adjacency; implemented by the plain graph and
/// by the contracted graph so that indices and searches work over both.
pub trait Adjacency {
    fn node_count(&self) -> usize;
    fn out_edges(&self, v: NodeId) -> &[Edge];
}

/// Multimodal transport graph. Each `(source, target)` pair carries at most
/// one [`EdgeAtf`]; adjacency lists are sorted by target.
#[derive(Clone, Debug, Default)]
pub struct TransportGraph {
    nodes: Vec<NodeRecord>,
    lookup: HashMap<String, NodeId>,
    out: Vec<Vec<Edge>>,
    edge_count: usize,
    trips: TripLabels,
}

impl TransportGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, id: impl Into<String>, lat: f64, lon: f64) -> Result<NodeId> {
        let id = id.into();
        if self.lookup.contains_key(&id) {
            return Err(Error::DuplicateNode(id));
        }
        let nid = NodeId(self.nodes.len() as u32);
        self.lookup.insert(id.clone(), nid);
        self.nodes.push(NodeRecord { id, lat, lon });
        self.out.push(Vec::new());
        Ok(nid)
    }

    /// Inserts `from -> to`, merging with an existing edge via
    /// [`crate::atf::merge_atf`].
    pub fn add_edge(&mut self, from: NodeId, to: NodeId, atf: EdgeAtf) -> Result<()> {
        self.check(from)?;
        self.check(to)?;
        let adj = &mut self.out[from.index()];
        match adj.binary_search_by_key(&to, |e| e.target) {
            Ok(i) => {
                let merged = crate::atf::merge_atf(&adj[i].atf, &atf);
                adj[i].atf = merged;
            }
            Err(i) => {
                adj.insert(i, Edge { target: to, atf });
                self.edge_count += 1;
            }
        }
        Ok(())
    }

    fn check(&self, v: NodeId) -> Result<()> {
        if v.index() < self.nodes.len() {
            Ok(())
        } else {
            Err(Error::UnknownNode(v.to_string()))
        }
    }

    pub fn node(&self, id: &str) -> Option<NodeId> {
        self.lookup.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<NodeId> {
        self.node(id)
            .ok_or_else(|| Error::UnknownNode(id.to_owned()))
    }

    pub fn record(&self, v: NodeId) -> &NodeRecord {
        &self.nodes[v.index()]
    }

    pub fn records(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn edge(&self, from: NodeId, to: NodeId) -> Option<&Edge> {
        let adj = self.out.get(from.index())?;
        adj.binary_search_by_key(&to, |e| e.target)
            .ok()
            .map(|i| &adj[i])
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, &Edge)> {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, adj)| adj.iter().map(move |e| (NodeId(u as u32), e)))
    }

    pub fn trips(&self) -> &TripLabels {
        &self.trips
    }

    pub fn intern_trip(&mut self, label: &str) -> TripId {
        self.trips.intern(label)
    }

    pub fn connection_count(&self) -> usize {
        self.edges().map(|(_, e)| e.atf.size()).sum()
    }

    /// Checks the structural invariants; used after loading.
    pub fn validate(&self) -> Result<()> {
        for (u, adj) in self.out.iter().enumerate() {
            for w in adj.windows(2) {
                if w[0].target >= w[1].target {
                    return Err(Error::InvalidParameters(format!(
                        "adjacency of node {} not strictly sorted",
                        self.nodes[u].id
                    )));
                }
            }
            for e in adj {
                self.check(e.target)?;
                if e.atf.is_empty() {
                    return Err(Error::InvalidParameters(format!(
                        "edge {} -> {} has neither walk nor timetable",
                        self.nodes[u].id,
                        self.nodes[e.target.index()].id
                    )));
                }
                if !e.atf.timetable().is_fifo() {
                    return Err(Error::InvalidParameters("timetable not FIFO".into()));
                }
            }
        }
        Ok(())
    }
}

impl Adjacency for TransportGraph {
    fn node_count(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    fn out_edges(&self, v: NodeId) -> &[Edge] {
        &self.out[v.index()]
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum LegMode {
    Walk,
    Transit,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Leg {
    pub from: NodeId,
    pub to: NodeId,
    pub board: TimePoint,
    pub alight: TimePoint,
    pub mode: LegMode,
    pub trip: Option<TripId>,
}

impl Leg {
    /// Leg for travelling `from -> to` over `atf` starting at `t`.
    pub fn over(from: NodeId, to: NodeId, atf: &EdgeAtf, t: TimePoint) -> Option<Leg> {
        let (choice, alight) = atf.choose(t)?;
        Some(match choice {
            LegChoice::Walk => Leg {
                from,
                to,
                board: t,
                alight,
                mode: LegMode::Walk,
                trip: None,
            },
            LegChoice::Ride(i) => Leg {
                from,
                to,
                board: atf.timetable().departures()[i],
                alight,
                mode: LegMode::Transit,
                trip: Some(atf.timetable().trips()[i]),
            },
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Journey {
    pub legs: Vec<Leg>,
    pub arrival: TimePoint,
}

impl Journey {
    pub fn empty(at: TimePoint) -> Self {
        Journey {
            legs: Vec::new(),
            arrival: at,
        }
    }

    /// Contiguity and time ordering of the legs.
    pub fn validate(
        &self,
        source: NodeId,
        target: NodeId,
        depart: TimePoint,
    ) -> Result<(), String> {
        let Some(first) = self.legs.first() else {
            return if source == target && self.arrival == depart {
                Ok(())
            } else {
                Err("empty journey between distinct nodes".into())
            };
        };
        if first.from != source {
            return Err(format!(
                "journey starts at {} instead of {}",
                first.from, source
            ));
        }
        if first.board < depart {
            return Err(format!(
                "first board {} before departure {}",
                first.board, depart
            ));
        }
        for (i, leg) in self.legs.iter().enumerate() {
            if leg.alight < leg.board {
                return Err(format!("leg {i} alights before boarding"));
            }
            if let Some(next) = self.legs.get(i + 1) {
                if leg.to != next.from {
                    return Err(format!("legs {i} and {} are not contiguous", i + 1));
                }
                if leg.alight > next.board {
                    return Err(format!("leg {} boards before leg {i} alights", i + 1));
                }
            }
        }
        let last = self.legs.last().unwrap();
        if last.to != target {
            return Err(format!("journey ends at {} instead of {}", last.to, target));
        }
        if last.alight != self.arrival {
            return Err("journey arrival differs from last alight".into());
        }
        Ok(())
    }

    /// True if two walking legs follow each other.
    pub fn has_chained_walks(&self) -> bool {
        self.legs
            .windows(2)
            .any(|w| w[0].mode == LegMode::Walk && w[1].mode == LegMode::Walk)
    }
}
