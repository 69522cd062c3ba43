use crate::model::{Edge, NodeId};
use crate::time::TimePoint;

use super::{NextDeparture, OrderingStrategy, NONE};

/// One entry of an augmented list, with both bridges stored inline so a
/// cascade step touches a single record.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub value: TimePoint,
    /// Nearest element of the next list (ties to the earlier one). Unused on
    /// the last list.
    pub next: u32,
    /// Nearest departure of the list's own edge (ties to the earlier one).
    pub orig: u32,
    /// The bridged departure lies before `value`: the successor is one on.
    pub orig_behind: bool,
}

/// Header of one level of the cascade: the edge's own departures merged
/// with every second element of the list below, a promoted value equal to
/// an own departure stored once. The elements live in the index's shared
/// buffer, lists stored back to back in cascade order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedList {
    pub(crate) start: u32,
    pub(crate) len: u32,
    /// Number of departures of the list's own edge.
    pub(crate) own: u32,
    pub(crate) slot: u32,
    pub(crate) target: NodeId,
    pub(crate) level: u32,
}

impl AugmentedList {
    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn target(&self) -> NodeId {
        self.target
    }

    pub fn slot(&self) -> usize {
        self.slot as usize
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    #[inline]
    fn range(&self) -> std::ops::Range<usize> {
        self.start as usize..(self.start + self.len) as usize
    }
}

/// Fractional cascading over the timetable edges of one node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FcIndex {
    pub(crate) strategy: OrderingStrategy,
    pub(crate) lists: Vec<AugmentedList>,
    pub(crate) elements: Vec<Element>,
    /// Adjacency slots of edges without a timetable, evaluated directly.
    pub(crate) walk_only: Vec<u32>,
}

/// Index of the element of `list` nearest to each value of `queries`
/// (both sorted); ties go to the earlier element.
fn nearest_indices(queries: &[TimePoint], list: &[TimePoint]) -> Vec<u32> {
    debug_assert!(!list.is_empty());
    let mut s = 0;
    queries
        .iter()
        .map(|&v| {
            while s < list.len() && list[s] < v {
                s += 1;
            }
            let best = if s == list.len() {
                s - 1
            } else if s == 0 {
                0
            } else if v.secs() - list[s - 1].secs() <= list[s].secs() - v.secs() {
                s - 1
            } else {
                s
            };
            best as u32
        })
        .collect()
}

impl FcIndex {
    /// Builds the cascade over the timetable edges of one node. `levels` is
    /// consulted only by [`OrderingStrategy::Chs`] (indexed by node).
    pub fn build(
        edges: &[Edge],
        strategy: OrderingStrategy,
        levels: Option<&[u32]>,
    ) -> crate::Result<FcIndex> {
        if strategy == OrderingStrategy::Chs && levels.is_none() {
            return Err(crate::Error::MissingHierarchy);
        }
        let level_of = |v: NodeId| levels.map_or(0, |l| l[v.index()]);

        let mut order = Vec::new();
        let mut walk_only = Vec::new();
        for (slot, e) in edges.iter().enumerate() {
            if e.atf.timetable().is_empty() {
                walk_only.push(slot as u32);
            } else {
                order.push(slot);
            }
        }
        let size = |s: usize| edges[s].atf.size();
        let target = |s: usize| edges[s].target;
        match strategy {
            OrderingStrategy::Asc => order.sort_by_key(|&s| (size(s), target(s))),
            OrderingStrategy::Dsc => {
                order.sort_by_key(|&s| (std::cmp::Reverse(size(s)), target(s)))
            }
            OrderingStrategy::Chs => order.sort_by_key(|&s| (level_of(target(s)), target(s))),
        }

        // Built bottom-up, then laid out top-down.
        let mut built: Vec<(usize, Vec<Element>)> = Vec::with_capacity(order.len());
        for &slot in order.iter().rev() {
            let deps = edges[slot].atf.timetable().departures();
            let (values, next) = match built.last() {
                None => (deps.to_vec(), vec![NONE; deps.len()]),
                Some((_, below)) => {
                    let below: Vec<TimePoint> = below.iter().map(|e| e.value).collect();
                    let mut values = Vec::with_capacity(deps.len() + below.len() / 2);
                    let mut own = deps.iter().peekable();
                    let mut promoted = below.iter().skip(1).step_by(2).peekable();
                    loop {
                        match (own.peek(), promoted.peek()) {
                            (Some(&&a), Some(&&b)) if a <= b => {
                                values.push(a);
                                own.next();
                                if a == b {
                                    promoted.next();
                                }
                            }
                            (_, Some(&&b)) => {
                                values.push(b);
                                promoted.next();
                            }
                            (Some(&&a), None) => {
                                values.push(a);
                                own.next();
                            }
                            (None, None) => break,
                        }
                    }
                    let next = nearest_indices(&values, &below);
                    (values, next)
                }
            };
            let orig = nearest_indices(&values, deps);
            let elements = values
                .iter()
                .zip(next)
                .zip(orig)
                .map(|((&value, next), orig)| Element {
                    value,
                    next,
                    orig,
                    orig_behind: deps[orig as usize] < value,
                })
                .collect();
            built.push((slot, elements));
        }

        let total = built.iter().map(|(_, e)| e.len()).sum();
        let mut elements = Vec::with_capacity(total);
        let mut lists = Vec::with_capacity(built.len());
        for (slot, list) in built.into_iter().rev() {
            lists.push(AugmentedList {
                start: elements.len() as u32,
                len: list.len() as u32,
                own: size(slot) as u32,
                slot: slot as u32,
                target: target(slot),
                level: level_of(target(slot)),
            });
            elements.extend(list);
        }

        let index = FcIndex {
            strategy,
            lists,
            elements,
            walk_only,
        };
        let original: usize = order.iter().map(|&s| size(s)).sum();
        assert!(
            index.element_count() <= 2 * original,
            "augmented lists exceed twice the original departures"
        );
        Ok(index)
    }

    pub fn strategy(&self) -> OrderingStrategy {
        self.strategy
    }

    pub fn lists(&self) -> &[AugmentedList] {
        &self.lists
    }

    /// Elements of list `i`.
    pub fn elements(&self, i: usize) -> &[Element] {
        &self.elements[self.lists[i].range()]
    }

    /// Values of list `i`.
    pub fn values(&self, i: usize) -> impl ExactSizeIterator<Item = TimePoint> + '_ {
        self.elements(i).iter().map(|e| e.value)
    }

    pub fn walk_only_slots(&self) -> &[u32] {
        &self.walk_only
    }

    /// Sum of augmented list lengths.
    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    /// Walks the cascade for `t`, reporting `(list index, connection)` per
    /// visited list. Returns the largest post-bridge adjustment (in
    /// positions) made on the way.
    ///
    /// With `truncate_above = Some(level)` and CHS ordering the walk stops
    /// before the first list whose target lies above `level`; the lists
    /// below it all lead upwards.
    #[inline]
    pub fn cascade(
        &self,
        t: TimePoint,
        truncate_above: Option<u32>,
        mut visit: impl FnMut(usize, Option<u32>),
    ) -> usize {
        let Some(top) = self.lists.first() else {
            return 0;
        };
        let limit = match (self.strategy, truncate_above) {
            (OrderingStrategy::Chs, Some(level)) => level,
            _ => u32::MAX,
        };
        let mut max_steps = 0;
        let mut p = self.elements[top.range()].partition_point(|e| e.value < t);
        for (i, list) in self.lists.iter().enumerate() {
            if list.level > limit {
                break;
            }
            let mut steps = 0;
            let here = (p < list.len()).then(|| &self.elements[list.start as usize + p]);
            let connection = here.and_then(|e| {
                // Nearest own departure, stepped past if it precedes `t`.
                steps += e.orig_behind as usize;
                let o = e.orig + e.orig_behind as u32;
                (o < list.own).then_some(o)
            });
            visit(i, connection);

            if let Some(next) = self.lists.get(i + 1) {
                let next = &self.elements[next.range()];
                let mut q = here.map_or(next.len(), |e| e.next as usize);
                while q < next.len() && next[q].value < t {
                    q += 1;
                    steps += 1;
                }
                while q > 0 && next[q - 1].value >= t {
                    q -= 1;
                    steps += 1;
                }
                p = q;
            }
            max_steps = max_steps.max(steps);
        }
        max_steps
    }

    /// Next departure on every visited timetable edge, in cascade order.
    pub fn query(&self, t: TimePoint, truncate_above: Option<u32>) -> Vec<NextDeparture> {
        self.query_traced(t, truncate_above).0
    }

    /// [`FcIndex::query`] plus the largest post-bridge adjustment.
    pub fn query_traced(
        &self,
        t: TimePoint,
        truncate_above: Option<u32>,
    ) -> (Vec<NextDeparture>, usize) {
        let mut out = Vec::with_capacity(self.lists.len());
        let steps = self.cascade(t, truncate_above, |i, connection| {
            out.push(NextDeparture {
                slot: self.lists[i].slot,
                target: self.lists[i].target,
                connection,
            })
        });
        (out, steps)
    }

    /// Earliest arrival per adjacency slot, comparing each ride with the
    /// edge's walk. Walk-only edges are evaluated after the cascade.
    #[inline]
    pub fn evaluate(
        &self,
        edges: &[Edge],
        t: TimePoint,
        truncate_above: Option<u32>,
        mut visit: impl FnMut(usize, TimePoint),
    ) {
        self.cascade(t, truncate_above, |i, connection| {
            let slot = self.lists[i].slot as usize;
            let atf = &edges[slot].atf;
            let mut arrival = t + atf.walk();
            if let Some(c) = connection {
                arrival = arrival.min(atf.timetable().arrivals()[c as usize]);
            }
            visit(slot, arrival);
        });
        for &slot in &self.walk_only {
            visit(slot as usize, t + edges[slot as usize].atf.walk());
        }
    }

    /// Checks the structural invariants against the edges it was built from.
    pub fn validate(&self, edges: &[Edge]) -> Result<(), String> {
        let original: usize = self.lists.iter().map(|l| edges[l.slot()].atf.size()).sum();
        if self.element_count() > 2 * original {
            return Err(format!(
                "size {} exceeds 2 x {original}",
                self.element_count()
            ));
        }
        if let Some(last) = self.lists.last() {
            if !self.values(self.lists.len() - 1).eq(edges[last.slot()]
                .atf
                .timetable()
                .departures()
                .iter()
                .copied())
            {
                return Err("last augmented list differs from its departures".into());
            }
        }
        for (i, list) in self.lists.iter().enumerate() {
            let deps = edges[list.slot()].atf.timetable().departures();
            if list.own as usize != deps.len() {
                return Err(format!(
                    "list {i}: own length {} vs {}",
                    list.own,
                    deps.len()
                ));
            }
            for (e, el) in self.elements(i).iter().enumerate() {
                let o = el.orig as usize;
                let nearest = deps
                    .iter()
                    .map(|d| d.secs().abs_diff(el.value.secs()))
                    .min();
                if o >= deps.len()
                    || Some(deps[o].secs().abs_diff(el.value.secs())) != nearest
                    || el.orig_behind != (deps[o] < el.value)
                {
                    return Err(format!(
                        "list {i} element {e}: bad bridge to own departures"
                    ));
                }
                if i + 1 < self.lists.len() {
                    let next = self.elements(i + 1);
                    let succ = next.partition_point(|x| x.value < el.value);
                    let b = el.next as usize;
                    if b >= next.len() || b.abs_diff(succ) > 1 {
                        return Err(format!(
                            "list {i} element {e}: bridge {b} vs successor {succ}"
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_prefers_earlier_on_ties() {
        let list = [10, 20, 30].map(TimePoint::new);
        let q = [0, 15, 16, 25, 30, 99].map(TimePoint::new);
        assert_eq!(nearest_indices(&q, &list), vec![0, 0, 1, 1, 2, 2]);
    }
}
