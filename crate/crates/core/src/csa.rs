//! Connection scan over one departure-sorted list of every connection.
//!
//! Walking is only allowed directly after a ride (or at the source), never
//! after another walk. Zero-length connections are re-scanned until nothing
//! improves, since a connection departing when another one arrives at the
//! same instant may sort before it.

use crate::model::{Adjacency, Journey, Leg, LegMode, NodeId, TransportGraph, TripId};
use crate::search::Outcome;
use crate::time::{Duration, TimePoint};
use crate::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ScanConnection {
    pub from: NodeId,
    pub to: NodeId,
    pub departure: TimePoint,
    pub arrival: TimePoint,
    pub trip: TripId,
}

#[derive(Clone, Debug, Default)]
pub struct MergedTimetable {
    connections: Vec<ScanConnection>,
    footpaths: Vec<Vec<(NodeId, Duration)>>,
    zero_length: Vec<u32>,
}

#[derive(Copy, Clone, Debug)]
enum Via {
    None,
    Ride(u32),
    /// Walk from a stop, starting at the given time.
    Walk(NodeId, TimePoint),
}

impl MergedTimetable {
    pub fn build(graph: &TransportGraph) -> MergedTimetable {
        let n = graph.node_count();
        let mut connections = Vec::with_capacity(graph.connection_count());
        let mut footpaths = vec![Vec::new(); n];
        for (u, e) in graph.edges() {
            if e.atf.walk().is_finite() {
                footpaths[u.index()].push((e.target, e.atf.walk()));
            }
            for c in e.atf.timetable().iter() {
                connections.push(ScanConnection {
                    from: u,
                    to: e.target,
                    departure: c.departure,
                    arrival: c.arrival,
                    trip: c.trip,
                });
            }
        }
        connections.sort_by_key(|c| (c.departure, c.arrival, c.from, c.to));
        let zero_length = connections
            .iter()
            .enumerate()
            .filter(|(_, c)| c.departure == c.arrival)
            .map(|(i, _)| i as u32)
            .collect();
        MergedTimetable {
            connections,
            footpaths,
            zero_length,
        }
    }

    pub fn connections(&self) -> &[ScanConnection] {
        &self.connections
    }

    pub fn footpaths(&self, v: NodeId) -> &[(NodeId, Duration)] {
        &self.footpaths[v.index()]
    }

    pub fn zero_length(&self) -> &[u32] {
        &self.zero_length
    }

    pub fn stop_count(&self) -> usize {
        self.footpaths.len()
    }

    pub(crate) fn query(
        &self,
        source: NodeId,
        target: NodeId,
        depart: TimePoint,
    ) -> Result<Outcome> {
        let n = self.stop_count();
        for v in [source, target] {
            if v.index() >= n {
                return Err(Error::UnknownNode(v.to_string()));
            }
        }
        let mut scan = Scan {
            mt: self,
            any: vec![TimePoint::INFINITE; n],
            transit: vec![TimePoint::INFINITE; n],
            via_any: vec![Via::None; n],
            via_transit: vec![u32::MAX; n],
            scanned: 0,
        };
        scan.any[source.index()] = depart;
        scan.transit[source.index()] = depart;
        scan.walk_from(source, depart);

        let cs = &self.connections;
        let first = cs.partition_point(|c| c.departure < depart);
        let zl_first = self.zero_length.partition_point(|&i| (i as usize) < first);
        for i in first..cs.len() {
            let c = cs[i];
            if c.departure > scan.any[target.index()] {
                break;
            }
            if scan.relax(i) {
                // Zero-length connections departing in [depart, now] may
                // have become boardable.
                let zl_end = self
                    .zero_length
                    .partition_point(|&z| cs[z as usize].departure <= c.departure);
                loop {
                    let mut improved = false;
                    for &z in &self.zero_length[zl_first..zl_end] {
                        improved |= scan.relax(z as usize);
                    }
                    if !improved {
                        break;
                    }
                }
            }
        }

        let arrival = scan.any[target.index()];
        let journey = if arrival.is_finite() {
            Some(scan.journey(source, target)?)
        } else {
            None
        };
        Ok(Outcome {
            arrival,
            journey,
            expanded: scan.scanned,
            relaxed: scan.scanned,
            tch_path: None,
        })
    }
}

struct Scan<'a> {
    mt: &'a MergedTimetable,
    /// Earliest arrival by any means; decides boarding.
    any: Vec<TimePoint>,
    /// Earliest arrival by a ride (or the departure at the source); walks
    /// start from here only.
    transit: Vec<TimePoint>,
    via_any: Vec<Via>,
    via_transit: Vec<u32>,
    scanned: u64,
}

impl Scan<'_> {
    fn walk_from(&mut self, v: NodeId, t: TimePoint) {
        for &(w, d) in self.mt.footpaths(v) {
            let a = t + d;
            if a < self.any[w.index()] {
                self.any[w.index()] = a;
                self.via_any[w.index()] = Via::Walk(v, t);
            }
        }
    }

    /// Boards connection `i` if possible; true if any label improved.
    fn relax(&mut self, i: usize) -> bool {
        self.scanned += 1;
        let c = self.mt.connections[i];
        if self.any[c.from.index()] > c.departure {
            return false;
        }
        let to = c.to.index();
        let mut improved = false;
        if c.arrival < self.any[to] {
            self.any[to] = c.arrival;
            self.via_any[to] = Via::Ride(i as u32);
            improved = true;
        }
        if c.arrival < self.transit[to] {
            self.transit[to] = c.arrival;
            self.via_transit[to] = i as u32;
            self.walk_from(c.to, c.arrival);
            improved = true;
        }
        improved
    }

    fn journey(&self, source: NodeId, target: NodeId) -> Result<Journey> {
        let arrival = self.any[target.index()];
        let mut legs = Vec::new();
        let mut v = target;
        // After a walk the stop was reached by its transit label.
        let mut by_transit = false;
        let limit = 2 * (self.mt.connections.len() + self.any.len()) + 2;
        while v != source {
            if legs.len() > limit {
                return Err(Error::Corrupt(
                    "journey reconstruction does not terminate".into(),
                ));
            }
            let ride = |i: u32| {
                let c = self.mt.connections[i as usize];
                Leg {
                    from: c.from,
                    to: c.to,
                    board: c.departure,
                    alight: c.arrival,
                    mode: LegMode::Transit,
                    trip: Some(c.trip),
                }
            };
            let leg = if by_transit {
                ride(self.via_transit[v.index()])
            } else {
                match self.via_any[v.index()] {
                    Via::Ride(i) => ride(i),
                    Via::Walk(u, t) => {
                        let d = self
                            .mt
                            .footpaths(u)
                            .iter()
                            .find(|(w, _)| *w == v)
                            .map(|f| f.1);
                        let d = d.ok_or_else(|| Error::Corrupt("walk without footpath".into()))?;
                        by_transit = true;
                        legs.push(Leg {
                            from: u,
                            to: v,
                            board: t,
                            alight: t + d,
                            mode: LegMode::Walk,
                            trip: None,
                        });
                        v = u;
                        continue;
                    }
                    Via::None => return Err(Error::Corrupt(format!("no predecessor at {v}"))),
                }
            };
            by_transit = false;
            v = leg.from;
            legs.push(leg);
        }
        legs.reverse();
        Ok(Journey { legs, arrival })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Connection, EdgeAtf};

    fn tp(h: u32, m: u32) -> TimePoint {
        TimePoint::hms(h, m, 0)
    }

    #[test]
    fn walk_never_follows_walk() {
        let mut g = TransportGraph::new();
        let a = g.add_node("a", 0.0, 0.0).unwrap();
        let b = g.add_node("b", 0.0, 0.0).unwrap();
        let c = g.add_node("c", 0.0, 0.0).unwrap();
        g.add_edge(a, b, EdgeAtf::walk_only(Duration::new(60)))
            .unwrap();
        g.add_edge(b, c, EdgeAtf::walk_only(Duration::new(60)))
            .unwrap();
        let mt = MergedTimetable::build(&g);
        let o = mt.query(a, c, tp(8, 0)).unwrap();
        assert!(!o.arrival.is_finite());
        let o = mt.query(a, b, tp(8, 0)).unwrap();
        assert_eq!(o.arrival, tp(8, 1));
    }

    #[test]
    fn zero_length_chain_out_of_order() {
        // b -> c sorts before a -> b although it needs it first.
        let mut g = TransportGraph::new();
        let b = g.add_node("b", 0.0, 0.0).unwrap();
        let a = g.add_node("a", 0.0, 0.0).unwrap();
        let c = g.add_node("c", 0.0, 0.0).unwrap();
        let t = tp(9, 0);
        let trip = g.intern_trip("z");
        let zero = |trip| {
            EdgeAtf::from_connections(
                Duration::INFINITE,
                vec![Connection::new(t, t, trip).unwrap()],
            )
        };
        g.add_edge(b, c, zero(trip)).unwrap();
        g.add_edge(a, b, zero(trip)).unwrap();
        let mt = MergedTimetable::build(&g);
        assert_eq!(mt.zero_length().len(), 2);
        assert_eq!(mt.connections()[0].from, b);
        let o = mt.query(a, c, tp(8, 0)).unwrap();
        assert_eq!(o.arrival, t);
        let j = o.journey.unwrap();
        j.validate(a, c, tp(8, 0)).unwrap();
        assert_eq!(j.legs.len(), 2);
    }
}
