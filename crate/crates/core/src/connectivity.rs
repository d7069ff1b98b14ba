//! k-connectivity demands, extraction of k arc-disjoint shortest paths
//! from the min-cost flow, and the vertex-capacity splitting reduction.

use thiserror::Error;

use crate::graph::{Arc, DirectedSubgraph, VertexId, WeightedGraph};
use crate::mcf::{min_cost_flow, Demand, IntegralFlow};

#[derive(Error, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathError {
    #[error("source and target coincide")]
    SourceEqualsTarget,
    #[error("vertex index out of range")]
    VertexOutOfRange,
    #[error("fewer than k disjoint paths exist")]
    Infeasible,
    #[error("flow support does not decompose into s-t paths")]
    CyclicSupport,
}

/// k arc-disjoint directed (s,t)-paths, as vertex sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSet {
    pub paths: Vec<Vec<VertexId>>,
    pub total_weight: u64,
}

/// The demand routing `k` units from `s` to `t`.
pub fn st_demand(n: usize, s: VertexId, t: VertexId, k: u32) -> Result<Demand, PathError> {
    if s.0 < 1 || t.0 < 1 || s.0 as usize > n || t.0 as usize > n {
        return Err(PathError::VertexOutOfRange);
    }
    if s == t {
        return Err(PathError::SourceEqualsTarget);
    }
    let mut values = vec![0i64; n];
    values[s.index()] = k as i64;
    values[t.index()] = -(k as i64);
    Ok(Demand::new(values).expect("st demand sums to zero"))
}

/// Split a min-cost k-unit (s,t)-flow into k arc-disjoint paths.
///
/// The walk from `s` always takes the lowest remaining arc index, so the
/// decomposition is deterministic. The support of a min-cost flow under
/// positive weights is acyclic, which makes the greedy walk terminate and
/// partition the support exactly; a failure to do so means the flow did
/// not come from the solver and is reported as `CyclicSupport`.
pub fn decompose_flow(
    g: &WeightedGraph,
    flow: &IntegralFlow,
    s: VertexId,
    t: VertexId,
    k: u32,
) -> Result<PathSet, PathError> {
    let n = g.vertex_count();
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for a in flow.support.iter() {
        outgoing[g.arc_at(a).tail.index()].push(a);
    }
    let mut cursor = vec![0usize; n];
    let total_arcs = flow.support.len();
    let mut used = 0usize;
    let mut paths = Vec::with_capacity(k as usize);
    for _ in 0..k {
        let mut path = vec![s];
        let mut at = s;
        while at != t {
            let outs = &outgoing[at.index()];
            let c = &mut cursor[at.index()];
            if *c >= outs.len() {
                return Err(PathError::CyclicSupport);
            }
            let arc = g.arc_at(outs[*c]);
            *c += 1;
            used += 1;
            at = arc.head;
            path.push(at);
            if path.len() > total_arcs + 1 {
                return Err(PathError::CyclicSupport);
            }
        }
        paths.push(path);
    }
    if used != total_arcs {
        return Err(PathError::CyclicSupport);
    }
    Ok(PathSet {
        paths,
        total_weight: flow.cost.base,
    })
}

/// The minimal collection of k arc-disjoint (s,t)-paths within the arcs
/// of `restriction`, via the k-unit min-cost flow.
pub fn k_disjoint_paths(
    g: &WeightedGraph,
    restriction: &DirectedSubgraph,
    s: VertexId,
    t: VertexId,
    k: u32,
) -> Result<PathSet, PathError> {
    let demand = st_demand(g.vertex_count(), s, t, k)?;
    let flow = min_cost_flow(g, restriction, &demand).ok_or(PathError::Infeasible)?;
    decompose_flow(g, &flow, s, t, k)
}

/// The vertex-capacity reduction: each capped vertex `v` becomes an
/// in-node (the original index) and an out-node joined by a unit-weight
/// internal edge.
///
/// An original edge {u,v} re-attaches as the directional edge
/// {out(u), in(v)} and, when an endpoint is split, additionally as
/// {out(v), in(u)}, keeping both traversal directions available while the
/// whole construction stays a symmetric digraph. The internal edges carry
/// weight 1 (weights must stay positive), and path weights are corrected
/// by subtracting internal-edge contributions when projecting back.
pub struct SplitGraph {
    pub graph: WeightedGraph,
    /// Per original vertex: the out-node (the vertex itself if unsplit).
    out_node: Vec<VertexId>,
    /// Per split-graph vertex: the original vertex it came from.
    origin: Vec<VertexId>,
    /// Per original edge: the {out(u),in(v)} slot and, when present, the
    /// {out(v),in(u)} slot (0-based slots in the split graph).
    edge_slots: Vec<(usize, Option<usize>)>,
    /// Per original vertex: its internal-edge slot, if split.
    internal_slot: Vec<Option<usize>>,
}

pub fn vertex_split(g: &WeightedGraph, capped: &[VertexId]) -> SplitGraph {
    let n = g.vertex_count();
    let mut split = vec![false; n];
    for v in capped {
        split[v.index()] = true;
    }
    let mut out_node: Vec<VertexId> = (1..=n as u32).map(VertexId).collect();
    let mut origin: Vec<VertexId> = (1..=n as u32).map(VertexId).collect();
    let mut next = n as u32;
    for v in 0..n {
        if split[v] {
            next += 1;
            out_node[v] = VertexId(next);
            origin.push(VertexId(v as u32 + 1));
        }
    }

    let mut edges: Vec<(Arc, u64)> = Vec::new();
    let mut edge_slots = Vec::with_capacity(g.edge_count());
    for e in 0..g.edge_count() {
        let r = g.reference_arc(e);
        let (u, v) = (r.tail, r.head);
        let forward = Arc {
            tail: out_node[u.index()],
            head: v,
        };
        let forward_slot = edges.len();
        edges.push((forward, g.weight(e)));
        let backward_slot = if split[u.index()] || split[v.index()] {
            let backward = Arc {
                tail: out_node[v.index()],
                head: u,
            };
            edges.push((backward, g.weight(e)));
            Some(forward_slot + 1)
        } else {
            None
        };
        edge_slots.push((forward_slot, backward_slot));
    }
    let mut internal_slot = vec![None; n];
    for v in 0..n {
        if split[v] {
            internal_slot[v] = Some(edges.len());
            edges.push((
                Arc {
                    tail: VertexId(v as u32 + 1),
                    head: out_node[v],
                },
                1,
            ));
        }
    }
    let graph = WeightedGraph::new(next as usize, edges).expect("split graph is simple");
    SplitGraph {
        graph,
        out_node,
        origin,
        edge_slots,
        internal_slot,
    }
}

impl SplitGraph {
    /// Where flow leaving original vertex `v` starts in the split graph.
    pub fn source(&self, v: VertexId) -> VertexId {
        self.out_node[v.index()]
    }

    /// Where flow entering original vertex `v` arrives in the split graph.
    pub fn target(&self, v: VertexId) -> VertexId {
        v
    }

    /// The split-graph arc realizing a directed traversal of an original
    /// arc `u>v`, i.e. `out(u) > in(v)`.
    pub fn map_arc(&self, original: &WeightedGraph, a: Arc) -> Arc {
        let idx = original.arc_index(a).expect("arc not in original graph");
        let (forward_slot, backward_slot) = self.edge_slots[idx / 2];
        if idx % 2 == 0 {
            self.graph.reference_arc(forward_slot)
        } else {
            match backward_slot {
                Some(slot) => self.graph.reference_arc(slot),
                None => self.graph.reference_arc(forward_slot).rev(),
            }
        }
    }

    /// Both traversal directions of every original edge, plus the internal
    /// arcs of every split vertex. The leaky arcs (reverses of directional
    /// slots, which would bypass a capacity) are excluded.
    pub fn default_arcs(&self) -> DirectedSubgraph {
        let mut d = DirectedSubgraph::with_arc_count(self.graph.arc_count());
        for &(forward_slot, backward_slot) in &self.edge_slots {
            d.insert_index(2 * forward_slot);
            match backward_slot {
                Some(slot) => d.insert_index(2 * slot),
                None => d.insert_index(2 * forward_slot + 1),
            }
        }
        for slot in self.internal_slot.iter().flatten() {
            d.insert_index(2 * slot);
        }
        d
    }

    /// Lift an arc set of the original graph: each original arc maps to
    /// its directional split arc, and all internal arcs are included.
    pub fn lift(&self, original: &WeightedGraph, d: &DirectedSubgraph) -> DirectedSubgraph {
        let mut lifted = DirectedSubgraph::with_arc_count(self.graph.arc_count());
        for a in d.iter() {
            let mapped = self.map_arc(original, original.arc_at(a));
            lifted.insert_index(self.graph.arc_index(mapped).expect("mapped arc exists"));
        }
        for slot in self.internal_slot.iter().flatten() {
            lifted.insert_index(2 * slot);
        }
        lifted
    }

    /// Collapse split-graph paths back onto original vertices and subtract
    /// the internal-edge weight contributions.
    pub fn project_paths(&self, paths: &PathSet) -> PathSet {
        let mut internal_traversals = 0u64;
        let mut projected = Vec::with_capacity(paths.paths.len());
        for path in &paths.paths {
            let mut out: Vec<VertexId> = Vec::with_capacity(path.len());
            for &v in path {
                let orig = self.origin[v.index()];
                if out.last() == Some(&orig) {
                    internal_traversals += 1;
                } else {
                    out.push(orig);
                }
            }
            projected.push(out);
        }
        PathSet {
            paths: projected,
            total_weight: paths.total_weight - internal_traversals,
        }
    }
}
