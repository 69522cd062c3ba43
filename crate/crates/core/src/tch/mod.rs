//! Time-dependent contraction hierarchy over a [`TransportGraph`].

mod order;

pub use order::{count_shortcuts, order_nodes, ContractionParams};

use crate::atf::{chain_atf, merge_atf};
use crate::model::{Adjacency, Edge, Leg, NodeId, TransportGraph};
use crate::time::TimePoint;
use crate::{Error, Result};

/// How an edge of the hierarchy came about: the original edge (if any)
/// and every node whose contraction improved it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Composition {
    pub original: bool,
    pub via: Vec<NodeId>,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct BoundingBox {
    pub min_lat: f64,
    pub max_lat: f64,
    pub min_lon: f64,
    pub max_lon: f64,
}

impl BoundingBox {
    pub fn point(lat: f64, lon: f64) -> Self {
        BoundingBox {
            min_lat: lat,
            max_lat: lat,
            min_lon: lon,
            max_lon: lon,
        }
    }

    pub fn extend(&mut self, other: &BoundingBox) {
        self.min_lat = self.min_lat.min(other.min_lat);
        self.max_lat = self.max_lat.max(other.max_lat);
        self.min_lon = self.min_lon.min(other.min_lon);
        self.max_lon = self.max_lon.max(other.max_lon);
    }

    #[inline]
    pub fn contains(&self, lat: f64, lon: f64) -> bool {
        (self.min_lat..=self.max_lat).contains(&lat) && (self.min_lon..=self.max_lon).contains(&lon)
    }
}

/// Contracted graph: original edges plus shortcuts, every node with a level.
/// An edge `u -> w` is upward when `level(u) < level(w)`.
#[derive(Clone, Debug)]
pub struct TchGraph {
    pub(crate) base: TransportGraph,
    pub(crate) level: Vec<u32>,
    pub(crate) out: Vec<Vec<Edge>>,
    pub(crate) composition: Vec<Vec<Composition>>,
    /// Box around everything reachable from a node by downward edges only.
    pub(crate) down_bbox: Vec<BoundingBox>,
}

impl TchGraph {
    /// Orders and contracts `graph`.
    pub fn build(graph: TransportGraph, params: ContractionParams) -> Result<TchGraph> {
        if !(params.w_edge_diff.is_finite() && params.w_depth.is_finite()) {
            return Err(Error::InvalidParameters(
                "contraction weights must be finite".into(),
            ));
        }
        let order = order_nodes(&graph, params);
        Self::contract(graph, &order)
    }

    /// Contracts nodes in `order` (first = lowest level). Every pair of live
    /// neighbours `u -> v -> w` gets the chained function merged into
    /// `u -> w`; no witness search is done.
    pub fn contract(base: TransportGraph, order: &[NodeId]) -> Result<TchGraph> {
        let n = base.node_count();
        let mut level = vec![u32::MAX; n];
        if order.len() != n {
            return Err(Error::InvalidParameters(format!(
                "order has {} nodes, graph has {n}",
                order.len()
            )));
        }
        for (i, v) in order.iter().enumerate() {
            match level.get_mut(v.index()) {
                Some(l) if *l == u32::MAX => *l = i as u32,
                _ => {
                    return Err(Error::InvalidParameters(format!(
                        "order is not a permutation at {v}"
                    )))
                }
            }
        }

        let mut out: Vec<Vec<Edge>> = (0..n)
            .map(|v| base.out_edges(NodeId(v as u32)).to_vec())
            .collect();
        let mut composition: Vec<Vec<Composition>> = out
            .iter()
            .map(|es| {
                vec![
                    Composition {
                        original: true,
                        via: Vec::new()
                    };
                    es.len()
                ]
            })
            .collect();
        let mut inc: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (u, es) in out.iter().enumerate() {
            for e in es {
                inc[e.target.index()].push(u as u32);
            }
        }
        let mut contracted = vec![false; n];

        for &v in order {
            let vi = v.index();
            let outs: Vec<Edge> = out[vi]
                .iter()
                .filter(|e| e.target != v && !contracted[e.target.index()])
                .cloned()
                .collect();
            let mut ins = inc[vi].clone();
            ins.sort_unstable();
            ins.dedup();
            for u in ins {
                let ui = u as usize;
                if ui == vi || contracted[ui] {
                    continue;
                }
                let Ok(k) = out[ui].binary_search_by_key(&v, |e| e.target) else {
                    continue;
                };
                let first = out[ui][k].atf.clone();
                for second in &outs {
                    let w = second.target;
                    if w.index() == ui {
                        continue;
                    }
                    let shortcut = chain_atf(&first, &second.atf);
                    if shortcut.is_empty() {
                        continue;
                    }
                    match out[ui].binary_search_by_key(&w, |e| e.target) {
                        Ok(i) => {
                            let merged = merge_atf(&out[ui][i].atf, &shortcut);
                            if merged != out[ui][i].atf {
                                out[ui][i].atf = merged;
                                composition[ui][i].via.push(v);
                            }
                        }
                        Err(i) => {
                            out[ui].insert(
                                i,
                                Edge {
                                    target: w,
                                    atf: shortcut,
                                },
                            );
                            composition[ui].insert(
                                i,
                                Composition {
                                    original: false,
                                    via: vec![v],
                                },
                            );
                            inc[w.index()].push(u);
                        }
                    }
                }
            }
            contracted[vi] = true;
        }

        let mut down_bbox: Vec<BoundingBox> = base
            .records()
            .iter()
            .map(|r| BoundingBox::point(r.lat, r.lon))
            .collect();
        for &v in order {
            let vi = v.index();
            for e in &out[vi] {
                if level[e.target.index()] < level[vi] {
                    let child = down_bbox[e.target.index()];
                    down_bbox[vi].extend(&child);
                }
            }
        }

        Ok(TchGraph {
            base,
            level,
            out,
            composition,
            down_bbox,
        })
    }

    pub fn base(&self) -> &TransportGraph {
        &self.base
    }

    pub fn levels(&self) -> &[u32] {
        &self.level
    }

    #[inline]
    pub fn level(&self, v: NodeId) -> u32 {
        self.level[v.index()]
    }

    /// Nodes sorted by level.
    pub fn order(&self) -> Vec<NodeId> {
        let mut order: Vec<NodeId> = (0..self.level.len() as u32).map(NodeId).collect();
        order.sort_by_key(|v| self.level(*v));
        order
    }

    #[inline]
    pub fn is_up(&self, from: NodeId, to: NodeId) -> bool {
        self.level(from) < self.level(to)
    }

    #[inline]
    pub fn down_bbox(&self, v: NodeId) -> &BoundingBox {
        &self.down_bbox[v.index()]
    }

    pub fn compositions(&self, v: NodeId) -> &[Composition] {
        &self.composition[v.index()]
    }

    pub fn edge(&self, from: NodeId, to: NodeId) -> Option<(&Edge, &Composition)> {
        let es = &self.out[from.index()];
        let i = es.binary_search_by_key(&to, |e| e.target).ok()?;
        Some((&es[i], &self.composition[from.index()][i]))
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// Edges with no original counterpart.
    pub fn shortcut_count(&self) -> usize {
        self.composition
            .iter()
            .flatten()
            .filter(|c| !c.original)
            .count()
    }

    pub fn connection_count(&self) -> usize {
        self.out.iter().flatten().map(|e| e.atf.size()).sum()
    }

    /// Expands the edge `from -> to`, entered at `t`, into legs over original
    /// edges arriving exactly when the edge's function says.
    pub fn unpack(&self, from: NodeId, to: NodeId, t: TimePoint) -> Result<Vec<Leg>> {
        let mut legs = Vec::new();
        self.unpack_into(from, to, t, &mut legs)?;
        Ok(legs)
    }

    fn unpack_into(
        &self,
        from: NodeId,
        to: NodeId,
        t: TimePoint,
        legs: &mut Vec<Leg>,
    ) -> Result<TimePoint> {
        let corrupt = || Error::Corrupt(format!("cannot unpack {from} -> {to} at {t}"));
        let (edge, comp) = self.edge(from, to).ok_or_else(corrupt)?;
        let arrival = edge.atf.eval(t);
        if !arrival.is_finite() {
            return Err(corrupt());
        }
        if comp.original {
            if let Some(orig) = self.base.edge(from, to) {
                if orig.atf.eval(t) == arrival {
                    legs.push(Leg::over(from, to, &orig.atf, t).ok_or_else(corrupt)?);
                    return Ok(arrival);
                }
            }
        }
        for &m in &comp.via {
            let (Some((first, _)), Some((second, _))) = (self.edge(from, m), self.edge(m, to))
            else {
                continue;
            };
            let mid = first.atf.eval(t);
            if mid.is_finite() && second.atf.eval(mid) == arrival {
                let reached = self.unpack_into(from, m, t, legs)?;
                debug_assert_eq!(reached, mid);
                self.unpack_into(m, to, mid, legs)?;
                return Ok(arrival);
            }
        }
        Err(corrupt())
    }

    /// Checks that `path` climbs strictly to one apex and then strictly
    /// descends in level, and that consecutive nodes are joined by edges.
    pub fn validate_path(&self, path: &[NodeId]) -> std::result::Result<(), String> {
        let mut descending = false;
        for w in path.windows(2) {
            let (a, b) = (w[0], w[1]);
            if self.edge(a, b).is_none() {
                return Err(format!("no edge {a} -> {b}"));
            }
            let (la, lb) = (self.level(a), self.level(b));
            if la == lb {
                return Err(format!("equal levels at {a} -> {b}"));
            }
            if la < lb && descending {
                return Err(format!("path climbs again at {a} -> {b}"));
            }
            descending |= la > lb;
        }
        Ok(())
    }
}

impl Adjacency for TchGraph {
    fn node_count(&self) -> usize {
        self.out.len()
    }

    #[inline]
    fn out_edges(&self, v: NodeId) -> &[Edge] {
        &self.out[v.index()]
    }
}
