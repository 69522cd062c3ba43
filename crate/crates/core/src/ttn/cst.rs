use crate::model::{Edge, NodeId};
use crate::time::TimePoint;

use super::{NextDeparture, NONE};

/// Integer width of a matrix cell; the type's maximum marks an empty cell.
pub(crate) trait Cell: Copy {
    const EMPTY: Self;
    fn wide(self) -> u32;
}

macro_rules! cell {
    ($t:ty) => {
        impl Cell for $t {
            const EMPTY: Self = <$t>::MAX;
            #[inline]
            fn wide(self) -> u32 {
                if self == Self::EMPTY {
                    NONE
                } else {
                    self as u32
                }
            }
        }
    };
}
cell!(u8);
cell!(u16);
cell!(u32);

/// Matrix cells at the narrowest width that fits every row's timetable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Cells {
    U8(Vec<u8>),
    U16(Vec<u16>),
    U32(Vec<u32>),
}

impl Cells {
    /// Narrows `wide` (empty cells as [`NONE`]) given the longest timetable.
    pub(crate) fn narrow(wide: Vec<u32>, longest: usize) -> Cells {
        if longest < u8::MAX as usize {
            Cells::U8(
                wide.iter()
                    .map(|&c| if c == NONE { u8::MAX } else { c as u8 })
                    .collect(),
            )
        } else if longest < u16::MAX as usize {
            Cells::U16(
                wide.iter()
                    .map(|&c| if c == NONE { u16::MAX } else { c as u16 })
                    .collect(),
            )
        } else {
            Cells::U32(wide)
        }
    }

    pub(crate) fn len(&self) -> usize {
        match self {
            Cells::U8(v) => v.len(),
            Cells::U16(v) => v.len(),
            Cells::U32(v) => v.len(),
        }
    }

    /// Bytes per cell.
    pub(crate) fn width(&self) -> usize {
        match self {
            Cells::U8(_) => 1,
            Cells::U16(_) => 2,
            Cells::U32(_) => 4,
        }
    }

    #[inline]
    pub(crate) fn get(&self, i: usize) -> u32 {
        match self {
            Cells::U8(v) => v[i].wide(),
            Cells::U16(v) => v[i].wide(),
            Cells::U32(v) => v[i].wide(),
        }
    }
}

/// Arrival over each row of one column, then over the walk-only edges.
#[inline]
fn visit_column<C: Cell>(
    col: &[C],
    rows: &[u32],
    edges: &[Edge],
    t: TimePoint,
    visit: &mut impl FnMut(usize, TimePoint),
) {
    for (&slot, &cell) in rows.iter().zip(col) {
        let atf = &edges[slot as usize].atf;
        let mut arrival = t + atf.walk();
        let c = cell.wide();
        if c != NONE {
            arrival = arrival.min(atf.timetable().arrivals()[c as usize]);
        }
        visit(slot as usize, arrival);
    }
}

/// Combined search tree of one node.
///
/// `combined` holds every departure of every outgoing timetable edge, sorted,
/// duplicates kept. For column `j` and row `i`, the cell stores the index of
/// the first connection of row `i`'s timetable departing at or after
/// `combined[j]`, or nothing. Cells are stored column-major so that one
/// query reads a single contiguous column of `k` entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CstIndex {
    pub(crate) combined: Vec<TimePoint>,
    pub(crate) cells: Cells,
    /// Adjacency slot of each row.
    pub(crate) rows: Vec<u32>,
    pub(crate) targets: Vec<NodeId>,
    /// Adjacency slots of edges without a timetable.
    pub(crate) walk_only: Vec<u32>,
}

impl CstIndex {
    pub fn build(edges: &[Edge]) -> CstIndex {
        let mut rows = Vec::new();
        let mut targets = Vec::new();
        let mut walk_only = Vec::new();
        for (slot, e) in edges.iter().enumerate() {
            if e.atf.timetable().is_empty() {
                walk_only.push(slot as u32);
            } else {
                rows.push(slot as u32);
                targets.push(e.target);
            }
        }

        let mut combined: Vec<TimePoint> = rows
            .iter()
            .flat_map(|&s| {
                edges[s as usize]
                    .atf
                    .timetable()
                    .departures()
                    .iter()
                    .copied()
            })
            .collect();
        combined.sort_unstable();

        let k = rows.len();
        let longest = rows
            .iter()
            .map(|&s| edges[s as usize].atf.size())
            .max()
            .unwrap_or(0);
        let mut cells = vec![NONE; k * combined.len()];
        for (i, &slot) in rows.iter().enumerate() {
            let deps = edges[slot as usize].atf.timetable().departures();
            let mut p = 0;
            for (j, &c) in combined.iter().enumerate() {
                while p < deps.len() && deps[p] < c {
                    p += 1;
                }
                if p < deps.len() {
                    cells[j * k + i] = p as u32;
                }
            }
        }

        CstIndex {
            combined,
            cells: Cells::narrow(cells, longest),
            rows,
            targets,
            walk_only,
        }
    }

    /// Number of timetable edges (matrix rows).
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn combined(&self) -> &[TimePoint] {
        &self.combined
    }

    /// Matrix cell `(row, column)`.
    pub fn cell(&self, row: usize, column: usize) -> Option<u32> {
        let c = self.cells.get(column * self.rows.len() + row);
        (c != NONE).then_some(c)
    }

    /// Bytes per stored matrix cell.
    pub fn cell_width(&self) -> usize {
        self.cells.width()
    }

    pub fn walk_only_slots(&self) -> &[u32] {
        &self.walk_only
    }

    /// Matrix entries plus combined-list entries.
    pub fn element_count(&self) -> usize {
        self.cells.len() + self.combined.len()
    }

    /// First cell of the column for `t`, if any departure is left.
    #[inline]
    fn column(&self, t: TimePoint) -> Option<usize> {
        let j = self.combined.partition_point(|&d| d < t);
        (j < self.combined.len()).then_some(j * self.rows.len())
    }

    /// Next departure on every timetable edge: one binary search over the
    /// combined list, then `k` cell lookups.
    pub fn query(&self, t: TimePoint) -> Vec<NextDeparture> {
        let col = self.column(t);
        (0..self.rows.len())
            .map(|i| NextDeparture {
                slot: self.rows[i],
                target: self.targets[i],
                connection: col.map(|c| self.cells.get(c + i)).filter(|&c| c != NONE),
            })
            .collect()
    }

    /// Earliest arrival over every outgoing edge when standing at the node
    /// at `t`. Calls `visit(slot, arrival)` once per adjacency slot.
    #[inline]
    pub fn evaluate(&self, edges: &[Edge], t: TimePoint, mut visit: impl FnMut(usize, TimePoint)) {
        let k = self.rows.len();
        match self.column(t) {
            Some(c) => match &self.cells {
                Cells::U8(v) => visit_column(&v[c..c + k], &self.rows, edges, t, &mut visit),
                Cells::U16(v) => visit_column(&v[c..c + k], &self.rows, edges, t, &mut visit),
                Cells::U32(v) => visit_column(&v[c..c + k], &self.rows, edges, t, &mut visit),
            },
            None => {
                for &slot in &self.rows {
                    visit(slot as usize, t + edges[slot as usize].atf.walk());
                }
            }
        }
        for &slot in &self.walk_only {
            visit(slot as usize, t + edges[slot as usize].atf.walk());
        }
    }
}
