//! Evaluation, chaining and merging of walk + timetable arrival time
//! functions.
//!
//! Every function produced here is FIFO: departures strictly increase and so
//! do arrivals, so the first connection departing at or after `t` is also
//! the earliest arriving one and evaluation is a single binary search.

use crate::model::{Connection, EdgeAtf, Timetable};
use crate::time::{Duration, TimePoint};

/// `min(t + walk, arrival of the first connection departing >= t)`.
#[inline]
pub fn eval_atf(atf: &EdgeAtf, t: TimePoint) -> TimePoint {
    if !t.is_finite() {
        return TimePoint::INFINITE;
    }
    let walk = t + atf.walk();
    let tt = atf.timetable();
    match tt.next_departure(t) {
        Some(i) => walk.min(tt.arrivals()[i]),
        None => walk,
    }
}

/// Function of the two-edge path `u -> v -> w`: `eval(result, t) ==
/// eval(second, eval(first, t))` for every `t`.
///
/// The result is materialised as a walk (sum of both walks) plus a timetable
/// holding every ride of `first` continued through `second`, and every ride
/// of `second` reached by walking `first`.
pub fn chain_atf(first: &EdgeAtf, second: &EdgeAtf) -> EdgeAtf {
    let walk = first.walk() + second.walk();
    let ftt = first.timetable();
    let stt = second.timetable();
    let mut conns = Vec::with_capacity(ftt.len() + stt.len());

    for c in ftt.iter() {
        let arrival = eval_atf(second, c.arrival);
        if arrival.is_finite() {
            conns.push(Connection {
                departure: c.departure,
                arrival,
                trip: c.trip,
            });
        }
    }
    if first.walk().is_finite() {
        // Rides of `second` that would need a start before midnight are unusable.
        for c in stt.iter() {
            if let Some(departure) = c.departure.checked_sub(first.walk()) {
                conns.push(Connection {
                    departure,
                    arrival: c.arrival,
                    trip: c.trip,
                });
            }
        }
    }
    let tt = prune_dominated(&Timetable::from_connections(conns), walk);
    EdgeAtf::from_parts_unchecked(walk, tt)
}

/// Pointwise minimum of two functions over the same edge.
///
/// Only connections dominated by another connection are dropped; rides that
/// the merged walk beats are kept so that merging is idempotent on any
/// stored edge.
pub fn merge_atf(a: &EdgeAtf, b: &EdgeAtf) -> EdgeAtf {
    let walk = a.walk().min(b.walk());
    let (x, y) = (a.timetable(), b.timetable());
    let mut conns = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    let key = |tt: &Timetable, k: usize| (tt.departures()[k], tt.arrivals()[k], tt.trips()[k]);
    while i < x.len() || j < y.len() {
        let take_x = j == y.len() || (i < x.len() && key(x, i) <= key(y, j));
        if take_x {
            conns.push(x.get(i));
            i += 1;
        } else {
            conns.push(y.get(j));
            j += 1;
        }
    }
    let tt = prune_overtaken(&Timetable::from_sorted_unchecked(conns));
    EdgeAtf::from_parts_unchecked(walk, tt)
}

/// Removes every connection that is dominated by another connection (departs
/// no earlier and arrives no later) or by walking (`arrival >= departure +
/// walk`). Evaluation is unchanged.
pub fn prune_dominated(tt: &Timetable, walk: Duration) -> Timetable {
    prune(tt, |c| walk.is_finite() && c.arrival >= c.departure + walk)
}

/// [`prune_dominated`] without the walk rule.
pub fn prune_overtaken(tt: &Timetable) -> Timetable {
    prune(tt, |_| false)
}

fn prune(tt: &Timetable, drop: impl Fn(&Connection) -> bool) -> Timetable {
    debug_assert!(tt.is_sorted());
    let mut kept: Vec<Connection> = Vec::with_capacity(tt.len());
    let mut best = TimePoint::INFINITE;
    for i in (0..tt.len()).rev() {
        let c = tt.get(i);
        if drop(&c) || c.arrival >= best {
            continue;
        }
        // Same departure, earlier arrival: the one kept before is dominated.
        if kept.last().is_some_and(|k| k.departure == c.departure) {
            kept.pop();
        }
        best = c.arrival;
        kept.push(c);
    }
    kept.reverse();
    Timetable::from_sorted_unchecked(kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TripId;

    fn tp(h: u32, m: u32) -> TimePoint {
        TimePoint::hms(h, m, 0)
    }

    fn tt(pairs: &[(TimePoint, TimePoint)]) -> Timetable {
        Timetable::from_connections(
            pairs
                .iter()
                .map(|&(d, a)| Connection::new(d, a, TripId(0)).unwrap())
                .collect(),
        )
    }

    fn pairs(tt: &Timetable) -> Vec<(TimePoint, TimePoint)> {
        tt.iter().map(|c| (c.departure, c.arrival)).collect()
    }

    #[test]
    fn eval_example_edges() {
        let a_d = EdgeAtf::new(
            Duration::minutes(20),
            tt(&[
                (tp(12, 0), tp(12, 30)),
                (tp(12, 45), tp(13, 30)),
                (tp(15, 15), tp(15, 30)),
                (tp(16, 5), tp(16, 30)),
            ]),
        );
        assert_eq!(eval_atf(&a_d, tp(13, 15)), tp(13, 35));
        let a_c = EdgeAtf::new(
            Duration::INFINITE,
            tt(&[
                (tp(13, 30), tp(13, 50)),
                (tp(18, 0), tp(18, 20)),
                (tp(20, 10), tp(20, 50)),
            ]),
        );
        assert_eq!(eval_atf(&a_c, tp(13, 15)), tp(13, 50));
        assert_eq!(eval_atf(&a_c, tp(20, 11)), TimePoint::INFINITE);
        assert_eq!(eval_atf(&EdgeAtf::default(), tp(1, 0)), TimePoint::INFINITE);
        assert_eq!(eval_atf(&a_c, TimePoint::INFINITE), TimePoint::INFINITE);
    }

    #[test]
    fn chain_walks() {
        let r = chain_atf(
            &EdgeAtf::walk_only(Duration::minutes(10)),
            &EdgeAtf::walk_only(Duration::minutes(5)),
        );
        assert_eq!(r.walk(), Duration::minutes(15));
        assert!(r.timetable().is_empty());
    }

    #[test]
    fn chain_example_ab_with_single_ride() {
        let a_b = EdgeAtf::new(
            Duration::minutes(40),
            tt(&[(tp(14, 0), tp(14, 20)), (tp(15, 15), tp(15, 20))]),
        );
        let b_x = EdgeAtf::new(Duration::INFINITE, tt(&[(tp(14, 30), tp(14, 45))]));
        let r = chain_atf(&a_b, &b_x);
        // 14:00 bus reaches the 14:30 ride; the 15:15 bus has no onward ride.
        // Walking from 13:50 reaches the same ride but departs earlier, so
        // the bus-bus connection dominates it.
        assert_eq!(pairs(r.timetable()), vec![(tp(14, 0), tp(14, 45))]);
        assert!(!r.walk().is_finite());
        for m in 0..24 * 60 {
            let t = TimePoint::new(m * 60);
            assert_eq!(eval_atf(&r, t), eval_atf(&b_x, eval_atf(&a_b, t)));
        }
    }

    #[test]
    fn chain_bus_bus_without_walk() {
        let a_b = EdgeAtf::new(
            Duration::INFINITE,
            tt(&[(tp(14, 0), tp(14, 20)), (tp(15, 15), tp(15, 20))]),
        );
        let b_x = EdgeAtf::new(Duration::INFINITE, tt(&[(tp(14, 30), tp(14, 45))]));
        let r = chain_atf(&a_b, &b_x);
        assert_eq!(pairs(r.timetable()), vec![(tp(14, 0), tp(14, 45))]);
    }

    #[test]
    fn merge_walks_and_idempotence() {
        let r = merge_atf(
            &EdgeAtf::walk_only(Duration::minutes(5)),
            &EdgeAtf::walk_only(Duration::minutes(7)),
        );
        assert_eq!(r.walk(), Duration::minutes(5));
        let f = EdgeAtf::new(
            Duration::minutes(20),
            tt(&[(tp(12, 0), tp(12, 30)), (tp(15, 15), tp(15, 30))]),
        );
        assert_eq!(merge_atf(&f, &f), f);
    }

    #[test]
    fn prune_examples() {
        let t = tt(&[(tp(10, 0), tp(11, 0)), (tp(10, 30), tp(10, 50))]);
        assert_eq!(
            pairs(&prune_dominated(&t, Duration::INFINITE)),
            vec![(tp(10, 30), tp(10, 50))]
        );

        let t = tt(&[(tp(10, 0), tp(10, 40))]);
        assert!(prune_dominated(&t, Duration::minutes(30)).is_empty());
        assert_eq!(prune_dominated(&t, Duration::minutes(45)).len(), 1);
    }

    #[test]
    fn prune_same_departure_keeps_earliest_arrival() {
        let t = tt(&[
            (tp(9, 0), tp(9, 20)),
            (tp(9, 0), tp(9, 10)),
            (tp(9, 0), tp(9, 10)),
        ]);
        let p = prune_overtaken(&t);
        assert_eq!(pairs(&p), vec![(tp(9, 0), tp(9, 10))]);
        assert!(p.is_fifo());
    }
}
