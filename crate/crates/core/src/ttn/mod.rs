//! Per-node indices answering "next departure on every outgoing edge" with
//! fewer binary searches than one per edge.

pub(crate) mod cst;
mod fc;

use rayon::prelude::*;

pub use cst::CstIndex;
pub use fc::{AugmentedList, Element, FcIndex};

use crate::model::{Adjacency, Edge, NodeId};
use crate::time::TimePoint;
use crate::{Error, Result};

/// Cell value meaning "no departure at or after this time".
pub(crate) const NONE: u32 = u32::MAX;

/// Top-to-bottom order of the cascade's lists.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub enum OrderingStrategy {
    /// Smallest timetable on top.
    Asc,
    /// Largest timetable on top.
    Dsc,
    /// Lowest target level on top; needs a hierarchy.
    Chs,
}

/// Which index to build.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub enum TtnKind {
    Cst,
    Fc(OrderingStrategy),
}

impl TtnKind {
    pub fn name(self) -> &'static str {
        match self {
            TtnKind::Cst => "cst",
            TtnKind::Fc(OrderingStrategy::Asc) => "fc-asc",
            TtnKind::Fc(OrderingStrategy::Dsc) => "fc-dsc",
            TtnKind::Fc(OrderingStrategy::Chs) => "fc-chs",
        }
    }
}

/// Next departure of one outgoing edge. `connection` indexes the edge's
/// timetable; `None` means nothing leaves at or after the query time.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct NextDeparture {
    pub slot: u32,
    pub target: NodeId,
    pub connection: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeIndex {
    Cst(CstIndex),
    Fc(FcIndex),
}

impl NodeIndex {
    pub fn build(edges: &[Edge], kind: TtnKind, levels: Option<&[u32]>) -> Result<NodeIndex> {
        Ok(match kind {
            TtnKind::Cst => NodeIndex::Cst(CstIndex::build(edges)),
            TtnKind::Fc(s) => NodeIndex::Fc(FcIndex::build(edges, s, levels)?),
        })
    }

    pub fn element_count(&self) -> usize {
        match self {
            NodeIndex::Cst(c) => c.element_count(),
            NodeIndex::Fc(f) => f.element_count(),
        }
    }

    pub fn query(&self, t: TimePoint, truncate_above: Option<u32>) -> Vec<NextDeparture> {
        match self {
            NodeIndex::Cst(c) => c.query(t),
            NodeIndex::Fc(f) => f.query(t, truncate_above),
        }
    }

    #[inline]
    pub fn evaluate(
        &self,
        edges: &[Edge],
        t: TimePoint,
        truncate_above: Option<u32>,
        visit: impl FnMut(usize, TimePoint),
    ) {
        match self {
            NodeIndex::Cst(c) => c.evaluate(edges, t, visit),
            NodeIndex::Fc(f) => f.evaluate(edges, t, truncate_above, visit),
        }
    }
}

/// Indices for every node of a graph. Nodes with fewer than two timetable
/// edges get none and are evaluated edge by edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TtnIndex {
    pub(crate) kind: TtnKind,
    pub(crate) nodes: Vec<Option<NodeIndex>>,
}

/// Minimum number of timetable edges for a node to get an index.
pub const MIN_INDEXED_EDGES: usize = 2;

impl TtnIndex {
    /// Builds the index of every node in parallel. `levels` (indexed by node)
    /// is required for [`OrderingStrategy::Chs`].
    pub fn build<G: Adjacency + Sync>(
        graph: &G,
        kind: TtnKind,
        levels: Option<&[u32]>,
    ) -> Result<TtnIndex> {
        if kind == TtnKind::Fc(OrderingStrategy::Chs) && levels.is_none() {
            return Err(Error::MissingHierarchy);
        }
        let nodes = (0..graph.node_count())
            .into_par_iter()
            .map(|v| {
                let edges = graph.out_edges(NodeId(v as u32));
                let timetabled = edges
                    .iter()
                    .filter(|e| !e.atf.timetable().is_empty())
                    .count();
                if timetabled < MIN_INDEXED_EDGES {
                    Ok(None)
                } else {
                    NodeIndex::build(edges, kind, levels).map(Some)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TtnIndex { kind, nodes })
    }

    pub fn kind(&self) -> TtnKind {
        self.kind
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, v: NodeId) -> Option<&NodeIndex> {
        self.nodes.get(v.index()).and_then(Option::as_ref)
    }

    pub fn indexed_nodes(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_some()).count()
    }

    pub fn element_count(&self) -> usize {
        self.nodes
            .iter()
            .flatten()
            .map(NodeIndex::element_count)
            .sum()
    }

    /// Earliest arrival over each out-edge of `v` standing there at `t`.
    /// Unindexed nodes fall back to one evaluation per edge.
    #[inline]
    pub fn evaluate(
        &self,
        v: NodeId,
        edges: &[Edge],
        t: TimePoint,
        truncate_above: Option<u32>,
        mut visit: impl FnMut(usize, TimePoint),
    ) {
        match self.node(v) {
            Some(idx) => idx.evaluate(edges, t, truncate_above, visit),
            None => {
                for (slot, e) in edges.iter().enumerate() {
                    visit(slot, e.atf.eval(t));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Connection, EdgeAtf, Timetable, TripId};
    use crate::time::Duration;

    fn tp(h: u32, m: u32) -> TimePoint {
        TimePoint::hms(h, m, 0)
    }

    fn atf(walk: Duration, pairs: &[(TimePoint, TimePoint)]) -> EdgeAtf {
        EdgeAtf::new(
            walk,
            Timetable::from_connections(
                pairs
                    .iter()
                    .map(|&(d, a)| Connection::new(d, a, TripId(0)).unwrap())
                    .collect(),
            ),
        )
    }

    /// Out-edges of the example node: targets B=1, C=2, D=3.
    fn example_edges() -> Vec<Edge> {
        vec![
            Edge {
                target: NodeId(1),
                atf: atf(
                    Duration::minutes(40),
                    &[(tp(14, 0), tp(14, 20)), (tp(15, 15), tp(15, 20))],
                ),
            },
            Edge {
                target: NodeId(2),
                atf: atf(
                    Duration::INFINITE,
                    &[
                        (tp(13, 30), tp(13, 50)),
                        (tp(18, 0), tp(18, 20)),
                        (tp(20, 10), tp(20, 50)),
                    ],
                ),
            },
            Edge {
                target: NodeId(3),
                atf: atf(
                    Duration::minutes(20),
                    &[
                        (tp(12, 0), tp(12, 30)),
                        (tp(12, 45), tp(13, 30)),
                        (tp(15, 15), tp(15, 30)),
                        (tp(16, 5), tp(16, 30)),
                    ],
                ),
            },
        ]
    }

    fn departures(edges: &[Edge], hits: &[NextDeparture]) -> Vec<(u32, Option<TimePoint>)> {
        hits.iter()
            .map(|h| {
                let deps = edges[h.slot as usize].atf.timetable().departures();
                (h.target.0, h.connection.map(|c| deps[c as usize]))
            })
            .collect()
    }

    #[test]
    fn cst_worked_example() {
        let edges = example_edges();
        let cst = CstIndex::build(&edges);
        assert_eq!(cst.combined().len(), 9);
        let mut distinct = cst.combined().to_vec();
        distinct.dedup();
        assert_eq!(distinct.len(), 8);
        let hits = cst.query(tp(13, 15));
        assert_eq!(
            departures(&edges, &hits),
            vec![
                (1, Some(tp(14, 0))),
                (2, Some(tp(13, 30))),
                (3, Some(tp(15, 15)))
            ]
        );
        assert!(cst.query(tp(20, 11)).iter().all(|h| h.connection.is_none()));
    }

    #[test]
    fn fc_worked_example_asc() {
        let edges = example_edges();
        let fc = FcIndex::build(&edges, OrderingStrategy::Asc, None).unwrap();
        let vals: Vec<Vec<TimePoint>> = (0..fc.lists().len())
            .map(|i| fc.values(i).collect())
            .collect();
        assert_eq!(
            vals,
            vec![
                vec![tp(13, 30), tp(14, 0), tp(15, 15), tp(18, 0)],
                vec![tp(12, 45), tp(13, 30), tp(16, 5), tp(18, 0), tp(20, 10)],
                vec![tp(12, 0), tp(12, 45), tp(15, 15), tp(16, 5)],
            ]
        );
        let (hits, steps) = fc.query_traced(tp(13, 15), None);
        assert_eq!(
            departures(&edges, &hits),
            vec![
                (1, Some(tp(14, 0))),
                (2, Some(tp(13, 30))),
                (3, Some(tp(15, 15)))
            ]
        );
        assert!(steps <= 2);
        fc.validate(&edges).unwrap();

        let mut arrivals = vec![TimePoint::INFINITE; 3];
        fc.evaluate(&edges, tp(13, 15), None, |s, a| arrivals[s] = a);
        assert_eq!(arrivals, vec![tp(13, 55), tp(13, 50), tp(13, 35)]);
    }

    #[test]
    fn fc_worked_example_chs_truncates() {
        let edges = example_edges();
        let levels = [54, 60, 52, 15];
        let fc = FcIndex::build(&edges, OrderingStrategy::Chs, Some(&levels)).unwrap();
        let targets: Vec<u32> = fc.lists().iter().map(|l| l.target().0).collect();
        assert_eq!(targets, vec![3, 2, 1]);
        let vals: Vec<Vec<TimePoint>> = (0..fc.lists().len())
            .map(|i| fc.values(i).collect())
            .collect();
        assert_eq!(
            vals,
            vec![
                vec![tp(12, 0), tp(12, 45), tp(15, 15), tp(16, 5), tp(20, 10)],
                vec![tp(13, 30), tp(15, 15), tp(18, 0), tp(20, 10)],
                vec![tp(14, 0), tp(15, 15)],
            ]
        );

        let hits = fc.query(tp(13, 15), Some(54));
        assert_eq!(
            departures(&edges, &hits),
            vec![(3, Some(tp(15, 15))), (2, Some(tp(13, 30)))]
        );
        let full = fc.query(tp(13, 15), None);
        assert_eq!(full.len(), 3);
        assert_eq!(departures(&edges, &full)[2], (1, Some(tp(14, 0))));
    }

    #[test]
    fn chs_requires_levels() {
        let edges = example_edges();
        assert!(matches!(
            FcIndex::build(&edges, OrderingStrategy::Chs, None),
            Err(Error::MissingHierarchy)
        ));
    }

    #[test]
    fn fc_size_bound_and_dsc_order() {
        let edges = example_edges();
        let fc = FcIndex::build(&edges, OrderingStrategy::Dsc, None).unwrap();
        let targets: Vec<u32> = fc.lists().iter().map(|l| l.target().0).collect();
        assert_eq!(targets, vec![3, 2, 1]);
        assert!(fc.element_count() <= 18);
        fc.validate(&edges).unwrap();
    }
}
