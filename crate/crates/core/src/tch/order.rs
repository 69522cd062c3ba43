use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};

use crate::model::{Adjacency, NodeId};

/// Weights of the contraction priority `w_edge_diff * edge_difference +
/// w_depth * depth`; lower priority is contracted first.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ContractionParams {
    pub w_edge_diff: f64,
    pub w_depth: f64,
}

impl Default for ContractionParams {
    fn default() -> Self {
        ContractionParams {
            w_edge_diff: 1.0,
            w_depth: 1.0,
        }
    }
}

#[derive(Copy, Clone, Debug)]
struct Priority(f64, u32);

impl PartialEq for Priority {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Priority {}
impl PartialOrd for Priority {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Priority {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Structural view of the graph during simulated contraction: only which
/// directed edges exist, no functions.
pub(crate) struct Skeleton {
    out: Vec<HashSet<u32>>,
    inc: Vec<HashSet<u32>>,
    contracted: Vec<bool>,
}

impl Skeleton {
    pub(crate) fn new<G: Adjacency>(graph: &G) -> Skeleton {
        let n = graph.node_count();
        let mut out = vec![HashSet::new(); n];
        let mut inc = vec![HashSet::new(); n];
        for (u, targets) in out.iter_mut().enumerate() {
            for e in graph.out_edges(NodeId(u as u32)) {
                if e.target.index() != u {
                    targets.insert(e.target.0);
                    inc[e.target.index()].insert(u as u32);
                }
            }
        }
        Skeleton {
            out,
            inc,
            contracted: vec![false; n],
        }
    }

    fn live(&self, set: &HashSet<u32>) -> Vec<u32> {
        let mut v: Vec<u32> = set
            .iter()
            .copied()
            .filter(|&x| !self.contracted[x as usize])
            .collect();
        v.sort_unstable();
        v
    }

    /// `(new edges, removed edges)` if `v` were contracted now.
    fn simulate(&self, v: u32) -> (usize, usize) {
        let ins = self.live(&self.inc[v as usize]);
        let outs = self.live(&self.out[v as usize]);
        let mut added = 0;
        for &u in &ins {
            for &w in &outs {
                if u != w && !self.out[u as usize].contains(&w) {
                    added += 1;
                }
            }
        }
        (added, ins.len() + outs.len())
    }

    /// Contracts `v`, returning the new edges and its live neighbours.
    pub(crate) fn contract(&mut self, v: u32) -> (Vec<(u32, u32)>, Vec<u32>) {
        let ins = self.live(&self.inc[v as usize]);
        let outs = self.live(&self.out[v as usize]);
        let mut added = Vec::new();
        for &u in &ins {
            for &w in &outs {
                if u != w && self.out[u as usize].insert(w) {
                    self.inc[w as usize].insert(u);
                    added.push((u, w));
                }
            }
        }
        self.contracted[v as usize] = true;
        let mut neighbours = ins;
        neighbours.extend(outs);
        neighbours.sort_unstable();
        neighbours.dedup();
        (added, neighbours)
    }
}

/// Contraction order by lazily re-evaluated priority (edge difference and
/// depth). Position in the returned vector is the node's level.
pub fn order_nodes<G: Adjacency>(graph: &G, params: ContractionParams) -> Vec<NodeId> {
    let n = graph.node_count();
    let mut sk = Skeleton::new(graph);
    let mut depth = vec![0u32; n];
    let priority = |sk: &Skeleton, depth: &[u32], v: u32| {
        let (added, removed) = sk.simulate(v);
        let diff = added as f64 - removed as f64;
        Priority(
            params.w_edge_diff * diff + params.w_depth * depth[v as usize] as f64,
            v,
        )
    };

    let mut heap: BinaryHeap<Reverse<Priority>> = (0..n as u32)
        .map(|v| Reverse(priority(&sk, &depth, v)))
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(Priority(_, v))) = heap.pop() {
        let fresh = priority(&sk, &depth, v);
        if heap.peek().is_some_and(|Reverse(top)| fresh > *top) {
            heap.push(Reverse(fresh));
            continue;
        }
        let (_, neighbours) = sk.contract(v);
        for x in neighbours {
            depth[x as usize] = depth[x as usize].max(depth[v as usize] + 1);
        }
        order.push(NodeId(v));
    }
    order
}

/// Number of shortcuts a structural contraction in `order` inserts.
pub fn count_shortcuts<G: Adjacency>(graph: &G, order: &[NodeId]) -> usize {
    let mut sk = Skeleton::new(graph);
    order.iter().map(|v| sk.contract(v.0).0.len()).sum()
}
