//! Versioned binary container for a graph and its precomputation.
//!
//! Layout (little-endian): magic `TTNCACHE`, `u32` version, then sections of
//! `u32` tag, `u64` payload length, payload, closed by an empty end
//! section so truncation at a section boundary is detected. Unknown tags
//! are skipped.

use std::fs;
use std::path::Path;

use crate::model::{
    Adjacency, Connection, Edge, EdgeAtf, NodeId, Timetable, TransportGraph, TripId,
};
use crate::tch::{BoundingBox, Composition, TchGraph};
use crate::time::{Duration, TimePoint};
use crate::ttn::cst::Cells;
use crate::ttn::{
    AugmentedList, CstIndex, Element, FcIndex, NodeIndex, OrderingStrategy, TtnIndex, TtnKind,
};
use crate::{Error, Result};

pub const MAGIC: &[u8; 8] = b"TTNCACHE";
pub const VERSION: u32 = 1;

const TAG_END: u32 = 0;
const TAG_GRAPH: u32 = 1;
const TAG_TCH: u32 = 2;
const TAG_TTN: u32 = 3;

/// Decoded cache contents.
#[derive(Debug)]
pub struct Cache {
    pub graph: TransportGraph,
    pub tch: Option<TchGraph>,
    /// `(built on the hierarchy, index)`
    pub ttn: Vec<(bool, TtnIndex)>,
}

#[derive(Default)]
struct Enc(Vec<u8>);

impl Enc {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn len(&mut self, n: usize) {
        self.u64(n as u64);
    }
    fn str(&mut self, s: &str) {
        self.len(s.len());
        self.0.extend_from_slice(s.as_bytes());
    }
    fn u32s(&mut self, v: impl ExactSizeIterator<Item = u32>) {
        self.len(v.len());
        for x in v {
            self.u32(x);
        }
    }
    fn times(&mut self, v: &[TimePoint]) {
        self.u32s(v.iter().map(|t| t.secs()));
    }
    /// Width byte, count, then each cell at that width.
    fn cells(&mut self, c: &Cells) {
        self.u8(c.width() as u8);
        self.len(c.len());
        match c {
            Cells::U8(v) => self.0.extend_from_slice(v),
            Cells::U16(v) => v
                .iter()
                .for_each(|x| self.0.extend_from_slice(&x.to_le_bytes())),
            Cells::U32(v) => v.iter().for_each(|&x| self.u32(x)),
        }
    }
    fn atf(&mut self, atf: &EdgeAtf) {
        let tt = atf.timetable();
        self.u32(atf.walk().secs());
        self.times(tt.departures());
        self.times(tt.arrivals());
        self.u32s(tt.trips().iter().map(|t| t.0));
    }
    fn edges(&mut self, edges: &[Edge]) {
        self.len(edges.len());
        for e in edges {
            self.u32(e.target.0);
            self.atf(&e.atf);
        }
    }
    fn section(&mut self, tag: u32, body: Enc) {
        self.u32(tag);
        self.len(body.0.len());
        self.0.extend(body.0);
    }
}

struct Dec<'a> {
    buf: &'a [u8],
    pos: usize,
}

fn corrupt(what: impl Into<String>) -> Error {
    Error::Cache(what.into())
}

impl<'a> Dec<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| corrupt("truncated"))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    /// Length prefix, sanity-checked against the remaining bytes.
    fn len(&mut self, elem: usize) -> Result<usize> {
        let n = self.u64()?;
        let remaining = (self.buf.len() - self.pos) as u64;
        if n.saturating_mul(elem.max(1) as u64) > remaining {
            return Err(corrupt("length exceeds payload"));
        }
        Ok(n as usize)
    }
    fn str(&mut self) -> Result<String> {
        let n = self.len(1)?;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| corrupt("invalid utf-8"))
    }
    fn u32s(&mut self) -> Result<Vec<u32>> {
        let n = self.len(4)?;
        (0..n).map(|_| self.u32()).collect()
    }
    fn times(&mut self) -> Result<Vec<TimePoint>> {
        Ok(self.u32s()?.into_iter().map(TimePoint::new).collect())
    }
    fn cells(&mut self) -> Result<Cells> {
        let width = self.u8()?;
        if !matches!(width, 1 | 2 | 4) {
            return Err(corrupt(format!("cell width {width}")));
        }
        let n = self.len(width as usize)?;
        let raw = self.take(n * width as usize)?;
        Ok(match width {
            1 => Cells::U8(raw.to_vec()),
            2 => Cells::U16(
                raw.chunks_exact(2)
                    .map(|b| u16::from_le_bytes([b[0], b[1]]))
                    .collect(),
            ),
            _ => Cells::U32(
                raw.chunks_exact(4)
                    .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
                    .collect(),
            ),
        })
    }
    fn atf(&mut self) -> Result<EdgeAtf> {
        let walk = Duration::new(self.u32()?);
        let deps = self.times()?;
        let arrs = self.times()?;
        let trips = self.u32s()?;
        if deps.len() != arrs.len() || deps.len() != trips.len() {
            return Err(corrupt("timetable columns differ in length"));
        }
        let conns = deps
            .into_iter()
            .zip(arrs)
            .zip(trips)
            .map(|((d, a), t)| Connection::new(d, a, TripId(t)).map_err(|e| corrupt(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let tt = Timetable::from_connections(conns);
        if !tt.is_fifo() {
            return Err(corrupt("timetable is not FIFO"));
        }
        Ok(EdgeAtf::new(walk, tt))
    }
    fn edges(&mut self, n: usize) -> Result<Vec<Edge>> {
        let k = self.len(4)?;
        (0..k)
            .map(|_| {
                let target = self.u32()?;
                if target as usize >= n {
                    return Err(corrupt("edge target out of range"));
                }
                Ok(Edge {
                    target: NodeId(target),
                    atf: self.atf()?,
                })
            })
            .collect()
    }
    fn done(&self) -> bool {
        self.pos == self.buf.len()
    }
}

fn encode_graph(g: &TransportGraph) -> Enc {
    let mut e = Enc::default();
    e.len(g.node_count());
    for r in g.records() {
        e.str(&r.id);
        e.f64(r.lat);
        e.f64(r.lon);
    }
    e.len(g.trips().len());
    for label in g.trips().iter() {
        e.str(label);
    }
    for v in 0..g.node_count() {
        e.edges(g.out_edges(NodeId(v as u32)));
    }
    e
}

fn decode_graph(d: &mut Dec<'_>) -> Result<TransportGraph> {
    let mut g = TransportGraph::new();
    let n = d.len(1)?;
    for _ in 0..n {
        let id = d.str()?;
        let (lat, lon) = (d.f64()?, d.f64()?);
        g.add_node(id, lat, lon)
            .map_err(|e| corrupt(e.to_string()))?;
    }
    let trips = d.len(1)?;
    for _ in 0..trips {
        let label = d.str()?;
        g.intern_trip(&label);
    }
    for v in 0..n {
        for e in d.edges(n)? {
            if e.atf
                .timetable()
                .trips()
                .iter()
                .any(|t| t.0 as usize >= trips)
            {
                return Err(corrupt("unknown trip"));
            }
            g.add_edge(NodeId(v as u32), e.target, e.atf)?;
        }
    }
    Ok(g)
}

fn encode_tch(t: &TchGraph) -> Enc {
    let mut e = Enc::default();
    e.u32s(t.levels().iter().copied());
    for v in 0..t.node_count() {
        let v = NodeId(v as u32);
        e.edges(t.out_edges(v));
        for c in t.compositions(v) {
            e.u8(c.original as u8);
            e.u32s(c.via.iter().map(|m| m.0));
        }
        let b = t.down_bbox(v);
        for x in [b.min_lat, b.max_lat, b.min_lon, b.max_lon] {
            e.f64(x);
        }
    }
    e
}

fn decode_tch(d: &mut Dec<'_>, base: TransportGraph) -> Result<TchGraph> {
    let n = base.node_count();
    let level = d.u32s()?;
    if level.len() != n {
        return Err(corrupt("level count differs from node count"));
    }
    let mut out = Vec::with_capacity(n);
    let mut composition = Vec::with_capacity(n);
    let mut down_bbox = Vec::with_capacity(n);
    for _ in 0..n {
        let edges = d.edges(n)?;
        let comps = edges
            .iter()
            .map(|_| {
                let original = d.u8()? != 0;
                let via = d.u32s()?.into_iter().map(NodeId).collect();
                Ok(Composition { original, via })
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(edges);
        composition.push(comps);
        down_bbox.push(BoundingBox {
            min_lat: d.f64()?,
            max_lat: d.f64()?,
            min_lon: d.f64()?,
            max_lon: d.f64()?,
        });
    }
    Ok(TchGraph {
        base,
        level,
        out,
        composition,
        down_bbox,
    })
}

fn strategy_code(s: OrderingStrategy) -> u8 {
    match s {
        OrderingStrategy::Asc => 0,
        OrderingStrategy::Dsc => 1,
        OrderingStrategy::Chs => 2,
    }
}

fn strategy_from(c: u8) -> Result<OrderingStrategy> {
    Ok(match c {
        0 => OrderingStrategy::Asc,
        1 => OrderingStrategy::Dsc,
        2 => OrderingStrategy::Chs,
        _ => return Err(corrupt("unknown ordering strategy")),
    })
}

fn encode_ttn(on_tch: bool, idx: &TtnIndex) -> Enc {
    let mut e = Enc::default();
    e.u8(on_tch as u8);
    match idx.kind() {
        TtnKind::Cst => e.u8(0),
        TtnKind::Fc(s) => {
            e.u8(1);
            e.u8(strategy_code(s));
        }
    }
    e.len(idx.nodes.len());
    for node in &idx.nodes {
        match node {
            None => e.u8(0),
            Some(NodeIndex::Cst(c)) => {
                e.u8(1);
                e.times(&c.combined);
                e.cells(&c.cells);
                e.u32s(c.rows.iter().copied());
                e.u32s(c.targets.iter().map(|t| t.0));
                e.u32s(c.walk_only.iter().copied());
            }
            Some(NodeIndex::Fc(f)) => {
                e.u8(2);
                e.u8(strategy_code(f.strategy));
                e.len(f.lists.len());
                for l in &f.lists {
                    e.u32(l.len);
                    e.u32(l.own);
                    e.u32(l.slot);
                    e.u32(l.target.0);
                    e.u32(l.level);
                }
                e.len(f.elements.len());
                for el in &f.elements {
                    e.u32(el.value.secs());
                    e.u32(el.next);
                    e.u32(el.orig);
                    e.u8(el.orig_behind as u8);
                }
                e.u32s(f.walk_only.iter().copied());
            }
        }
    }
    e
}

fn decode_ttn(d: &mut Dec<'_>) -> Result<(bool, TtnIndex)> {
    let on_tch = d.u8()? != 0;
    let kind = match d.u8()? {
        0 => TtnKind::Cst,
        1 => TtnKind::Fc(strategy_from(d.u8()?)?),
        _ => return Err(corrupt("unknown index kind")),
    };
    let n = d.len(1)?;
    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        nodes.push(match d.u8()? {
            0 => None,
            1 => {
                let combined = d.times()?;
                let cells = d.cells()?;
                let rows = d.u32s()?;
                let targets = d.u32s()?.into_iter().map(NodeId).collect::<Vec<_>>();
                let walk_only = d.u32s()?;
                if cells.len() != rows.len() * combined.len() || targets.len() != rows.len() {
                    return Err(corrupt("combined search tree shape mismatch"));
                }
                Some(NodeIndex::Cst(CstIndex {
                    combined,
                    cells,
                    rows,
                    targets,
                    walk_only,
                }))
            }
            2 => {
                let strategy = strategy_from(d.u8()?)?;
                let k = d.len(1)?;
                let mut lists = Vec::with_capacity(k);
                let mut start = 0u32;
                for _ in 0..k {
                    let len = d.u32()?;
                    lists.push(AugmentedList {
                        start,
                        len,
                        own: d.u32()?,
                        slot: d.u32()?,
                        target: NodeId(d.u32()?),
                        level: d.u32()?,
                    });
                    start = start
                        .checked_add(len)
                        .ok_or_else(|| corrupt("list lengths overflow"))?;
                }
                let n = d.len(13)?;
                if n != start as usize {
                    return Err(corrupt("cascade element count mismatch"));
                }
                let mut elements = Vec::with_capacity(n);
                for _ in 0..n {
                    elements.push(Element {
                        value: TimePoint::new(d.u32()?),
                        next: d.u32()?,
                        orig: d.u32()?,
                        orig_behind: d.u8()? != 0,
                    });
                }
                for (i, l) in lists.iter().enumerate() {
                    let below = lists.get(i + 1).map(|b| b.len);
                    let els = &elements[l.start as usize..(l.start + l.len) as usize];
                    if els
                        .iter()
                        .any(|e| e.orig >= l.own || below.is_some_and(|b| e.next >= b))
                    {
                        return Err(corrupt("cascade bridge out of range"));
                    }
                }
                Some(NodeIndex::Fc(FcIndex {
                    strategy,
                    lists,
                    elements,
                    walk_only: d.u32s()?,
                }))
            }
            _ => return Err(corrupt("unknown node index tag")),
        });
    }
    Ok((on_tch, TtnIndex { kind, nodes }))
}

/// Serialises a graph with optional hierarchy and indices.
pub fn encode(
    graph: &TransportGraph,
    tch: Option<&TchGraph>,
    ttn: &[(bool, &TtnIndex)],
) -> Vec<u8> {
    let mut e = Enc::default();
    e.0.extend_from_slice(MAGIC);
    e.u32(VERSION);
    e.section(TAG_GRAPH, encode_graph(graph));
    if let Some(t) = tch {
        e.section(TAG_TCH, encode_tch(t));
    }
    for &(on_tch, idx) in ttn {
        e.section(TAG_TTN, encode_ttn(on_tch, idx));
    }
    e.section(TAG_END, Enc::default());
    e.0
}

pub fn decode(bytes: &[u8]) -> Result<Cache> {
    let mut d = Dec { buf: bytes, pos: 0 };
    if d.take(MAGIC.len()).ok() != Some(&MAGIC[..]) {
        return Err(corrupt("not a cache file"));
    }
    let version = d.u32()?;
    if version != VERSION {
        return Err(corrupt(format!("unsupported version {version}")));
    }
    let mut graph = None;
    let mut tch = None;
    let mut ttn = Vec::new();
    loop {
        let tag = d.u32()?;
        let len = d.len(1)?;
        if tag == TAG_END {
            if len != 0 || !d.done() {
                return Err(corrupt("data after end marker"));
            }
            break;
        }
        let mut body = Dec {
            buf: d.take(len)?,
            pos: 0,
        };
        match tag {
            TAG_GRAPH => graph = Some(decode_graph(&mut body)?),
            TAG_TCH => {
                let base = graph
                    .clone()
                    .ok_or_else(|| corrupt("hierarchy before graph"))?;
                tch = Some(decode_tch(&mut body, base)?);
            }
            TAG_TTN => ttn.push(decode_ttn(&mut body)?),
            _ => continue,
        }
        if !body.done() {
            return Err(corrupt(format!("trailing bytes in section {tag}")));
        }
    }
    let graph = graph.ok_or_else(|| corrupt("missing graph section"))?;
    Ok(Cache { graph, tch, ttn })
}

pub fn save(
    path: &Path,
    graph: &TransportGraph,
    tch: Option<&TchGraph>,
    ttn: &[(bool, &TtnIndex)],
) -> Result<()> {
    fs::write(path, encode(graph, tch, ttn))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Cache> {
    decode(&fs::read(path)?)
}

/// Serialised size of the graph section payload.
pub fn graph_bytes(graph: &TransportGraph) -> usize {
    encode_graph(graph).0.len()
}

/// Serialised size of the hierarchy section payload.
pub fn tch_bytes(tch: &TchGraph) -> usize {
    encode_tch(tch).0.len()
}

/// Serialised size of an index section payload.
pub fn ttn_bytes(idx: &TtnIndex) -> usize {
    encode_ttn(false, idx).0.len()
}
