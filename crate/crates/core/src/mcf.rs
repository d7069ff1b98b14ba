//! Exact unit-capacity min-cost flow with a unique, deterministic optimum.
//!
//! The optimum of the plain weight cost need not be unique, so every arc
//! carries a secondary cost of `2^arc_index`. Distinct 0/1 flows have
//! distinct supports and hence distinct power-of-two subset sums, so the
//! lexicographic (base, tiebreak) optimum is unique. Internally both
//! components are folded into a single big integer `w * 2^(2m) + 2^arc_index`
//! and the solver runs successive shortest augmenting paths with vertex
//! potentials over that exact cost.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::{BigInt, BigUint};
use thiserror::Error;

use crate::graph::{DirectedSubgraph, VertexId, WeightedGraph};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DemandError {
    #[error("demand values must sum to zero (sum = {sum})")]
    NonZeroSum { sum: i64 },
    #[error("line {line}: malformed demand line")]
    Malformed { line: usize },
    #[error("line {line}: vertex index out of range")]
    VertexOutOfRange { line: usize },
    #[error("line {line}: duplicate vertex")]
    DuplicateVertex { line: usize },
}

/// Integer vertex labeling summing to zero; `value(u)` is the required
/// net out-flow at `u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Demand {
    values: Vec<i64>,
}

impl Demand {
    pub fn new(values: Vec<i64>) -> Result<Self, DemandError> {
        let sum: i64 = values.iter().sum();
        if sum != 0 {
            return Err(DemandError::NonZeroSum { sum });
        }
        Ok(Demand { values })
    }

    pub fn zero(n: usize) -> Self {
        Demand {
            values: vec![0; n],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn value(&self, v: VertexId) -> i64 {
        self.values[v.index()]
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Parse the demand file format: lines `d <u> <value>`, unlisted
    /// vertices default to 0.
    pub fn parse(n: usize, text: &str) -> Result<Self, DemandError> {
        let mut values = vec![0i64; n];
        let mut seen = vec![false; n];
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 3 || fields[0] != "d" {
                return Err(DemandError::Malformed { line });
            }
            let u: usize = fields[1]
                .parse()
                .map_err(|_| DemandError::Malformed { line })?;
            let value: i64 = fields[2]
                .parse()
                .map_err(|_| DemandError::Malformed { line })?;
            if u < 1 || u > n {
                return Err(DemandError::VertexOutOfRange { line });
            }
            if seen[u - 1] {
                return Err(DemandError::DuplicateVertex { line });
            }
            seen[u - 1] = true;
            values[u - 1] = value;
        }
        Demand::new(values)
    }
}

/// Exact flow cost compared lexicographically: weight first, then the
/// power-of-two tiebreak over the support.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LexCost {
    pub base: u64,
    pub tiebreak: BigUint,
}

impl LexCost {
    pub fn zero() -> Self {
        LexCost {
            base: 0,
            tiebreak: BigUint::default(),
        }
    }
}

/// A 0/1 flow identified with its support, plus its exact cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralFlow {
    pub support: DirectedSubgraph,
    pub cost: LexCost,
}

/// Exact lexicographic cost of an arbitrary arc set.
pub fn lex_cost(g: &WeightedGraph, support: &DirectedSubgraph) -> LexCost {
    let mut base = 0u64;
    let mut tiebreak = BigUint::default();
    for a in support.iter() {
        base += g.weight(a / 2);
        tiebreak.set_bit(a as u64, true);
    }
    LexCost { base, tiebreak }
}

/// `A(D)`: the unique lex-min integral `d`-flow supported on
/// the arcs of `restriction`, or `None` when no `d`-flow exists there.
pub fn min_cost_flow(
    g: &WeightedGraph,
    restriction: &DirectedSubgraph,
    demand: &Demand,
) -> Option<IntegralFlow> {
    assert_eq!(demand.len(), g.vertex_count(), "demand/graph size mismatch");
    assert_eq!(restriction.arc_count(), g.arc_count());

    let n = g.vertex_count();
    let arcs: Vec<usize> = restriction.iter().collect();
    let mut tails = Vec::with_capacity(arcs.len());
    let mut heads = Vec::with_capacity(arcs.len());
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    for (pos, &a) in arcs.iter().enumerate() {
        let arc = g.arc_at(a);
        let (t, h) = (arc.tail.index(), arc.head.index());
        tails.push(t);
        heads.push(h);
        adj[t].push((pos, true));
        adj[h].push((pos, false));
    }
    // combined exact cost: w * 2^(2m) + 2^arc_index
    let shift = g.arc_count();
    let cost: Vec<BigInt> = arcs
        .iter()
        .map(|&a| (BigInt::from(g.weight(a / 2)) << shift) + (BigInt::from(1) << a))
        .collect();

    let mut flow = vec![false; arcs.len()];
    let mut excess: Vec<i64> = demand.values().to_vec();
    let mut potential: Vec<BigInt> = vec![BigInt::from(0); n];
    let supply: i64 = excess.iter().filter(|&&x| x > 0).sum();

    for _ in 0..supply {
        // Dijkstra on reduced costs from all remaining sources. Active
        // sources keep potential 0, so multi-source initialization with
        // distance 0 is sound.
        let mut dist: Vec<Option<BigInt>> = vec![None; n];
        let mut parent: Vec<Option<(usize, bool)>> = vec![None; n];
        let mut settled = vec![false; n];
        let mut heap: BinaryHeap<Reverse<(BigInt, usize)>> = BinaryHeap::new();
        for u in 0..n {
            if excess[u] > 0 {
                dist[u] = Some(BigInt::from(0));
                heap.push(Reverse((BigInt::from(0), u)));
            }
        }
        let mut target = None;
        while let Some(Reverse((du, u))) = heap.pop() {
            if settled[u] {
                continue;
            }
            settled[u] = true;
            if excess[u] < 0 {
                target = Some(u);
                break;
            }
            for &(pos, fwd) in &adj[u] {
                let available = if fwd { !flow[pos] } else { flow[pos] };
                if !available {
                    continue;
                }
                let to = if fwd { heads[pos] } else { tails[pos] };
                if settled[to] {
                    continue;
                }
                let reduced = if fwd {
                    &cost[pos] + &potential[u] - &potential[to]
                } else {
                    &potential[u] - &potential[to] - &cost[pos]
                };
                debug_assert!(reduced >= BigInt::from(0));
                let nd = &du + reduced;
                let better = match &dist[to] {
                    None => true,
                    Some(old) => nd < *old,
                };
                if better {
                    dist[to] = Some(nd.clone());
                    parent[to] = Some((pos, fwd));
                    heap.push(Reverse((nd, to)));
                }
            }
        }
        let t = target?; // no deficit reachable: no d-flow on D
        let dt = dist[t].clone().expect("target has a distance");
        for u in 0..n {
            match &dist[u] {
                Some(du) if *du < dt => potential[u] += du,
                _ => potential[u] += &dt,
            }
        }
        // augment one unit along the parent chain
        let mut v = t;
        while let Some((pos, fwd)) = parent[v] {
            flow[pos] = fwd;
            v = if fwd { tails[pos] } else { heads[pos] };
        }
        excess[v] -= 1;
        excess[t] += 1;
    }

    let mut support = DirectedSubgraph::with_arc_count(g.arc_count());
    for (pos, &a) in arcs.iter().enumerate() {
        if flow[pos] {
            support.insert_index(a);
        }
    }
    for e in 0..g.edge_count() {
        assert!(
            !(support.contains_index(2 * e) && support.contains_index(2 * e + 1)),
            "optimal support contains an antiparallel pair"
        );
    }
    Some(IntegralFlow {
        cost: lex_cost(g, &support),
        support,
    })
}

/// Membership test for `D_f`: does a `d`-flow exist on `restriction`?
pub fn feasible(g: &WeightedGraph, restriction: &DirectedSubgraph, demand: &Demand) -> bool {
    min_cost_flow(g, restriction, demand).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{brute_force_mcf, EnumConfig};
    use crate::graph::Arc;
    use num_bigint::BigUint;

    fn g_edge() -> WeightedGraph {
        WeightedGraph::parse("p 2 1\ne 1 2 1").unwrap()
    }

    fn g_tri() -> WeightedGraph {
        WeightedGraph::parse("p 3 3\ne 1 3 5\ne 1 2 1\ne 2 3 1").unwrap()
    }

    fn assert_matches_oracle(g: &WeightedGraph, d_set: &DirectedSubgraph, demand: &Demand) {
        let got = min_cost_flow(g, d_set, demand);
        let want = brute_force_mcf(g, d_set, demand, &EnumConfig::default()).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn lex_cost_examples() {
        let g = g_tri();
        assert_eq!(
            lex_cost(&g, &DirectedSubgraph::empty(&g)),
            LexCost::zero()
        );
        let one = DirectedSubgraph::from_arcs(&g, [Arc::new(1, 3)]);
        assert_eq!(
            lex_cost(&g, &one),
            LexCost {
                base: 5,
                tiebreak: BigUint::from(1u32)
            }
        );
        let path = DirectedSubgraph::from_arcs(&g, [Arc::new(1, 2), Arc::new(2, 3)]);
        assert_eq!(
            lex_cost(&g, &path),
            LexCost {
                base: 2,
                tiebreak: BigUint::from((1u32 << 2) + (1u32 << 4))
            }
        );
    }

    #[test]
    fn lex_cost_orders_lexicographically() {
        let cheap_late = LexCost {
            base: 2,
            tiebreak: BigUint::from(1u32 << 5),
        };
        let costly_early = LexCost {
            base: 5,
            tiebreak: BigUint::from(1u32),
        };
        assert!(cheap_late < costly_early);
    }

    #[test]
    fn tri_full_unit_demand() {
        let g = g_tri();
        let demand = Demand::new(vec![1, 0, -1]).unwrap();
        let full = DirectedSubgraph::all(&g);
        let f = min_cost_flow(&g, &full, &demand).unwrap();
        assert_eq!(
            f.support,
            DirectedSubgraph::from_arcs(&g, [Arc::new(1, 2), Arc::new(2, 3)])
        );
        assert_eq!(f.cost.base, 2);
        assert_matches_oracle(&g, &full, &demand);
    }

    #[test]
    fn tri_orientation_unit_demand() {
        let g = g_tri();
        let demand = Demand::new(vec![1, 0, -1]).unwrap();
        let d = DirectedSubgraph::from_arcs(&g, [Arc::new(1, 3), Arc::new(1, 2), Arc::new(2, 3)]);
        let f = min_cost_flow(&g, &d, &demand).unwrap();
        assert_eq!(
            f.support,
            DirectedSubgraph::from_arcs(&g, [Arc::new(1, 2), Arc::new(2, 3)])
        );
        assert_eq!(f.cost.base, 2);
        assert_matches_oracle(&g, &d, &demand);
    }

    #[test]
    fn empty_restriction_is_infeasible() {
        let g = g_edge();
        let demand = Demand::new(vec![1, -1]).unwrap();
        assert!(min_cost_flow(&g, &DirectedSubgraph::empty(&g), &demand).is_none());
    }

    #[test]
    fn zero_demand_yields_zero_flow() {
        let g = g_tri();
        let f = min_cost_flow(&g, &DirectedSubgraph::all(&g), &Demand::zero(3)).unwrap();
        assert!(f.support.is_empty());
        assert_eq!(f.cost, LexCost::zero());
    }

    #[test]
    fn feasible_examples() {
        let edge = g_edge();
        let demand = Demand::new(vec![1, -1]).unwrap();
        assert!(feasible(&edge, &DirectedSubgraph::all(&edge), &demand));
        let wrong_way = DirectedSubgraph::from_arcs(&edge, [Arc::new(2, 1)]);
        assert!(!feasible(&edge, &wrong_way, &demand));

        let tri = g_tri();
        let d = DirectedSubgraph::from_arcs(&tri, [Arc::new(1, 2), Arc::new(2, 1)]);
        assert!(!feasible(&tri, &d, &Demand::new(vec![1, 0, -1]).unwrap()));
    }

    #[test]
    fn conservation_holds_on_returned_flows() {
        let g = g_tri();
        let demand = Demand::new(vec![2, 0, -2]).unwrap();
        let f = min_cost_flow(&g, &DirectedSubgraph::all(&g), &demand).unwrap();
        let mut net = vec![0i64; 3];
        for a in f.support.iter() {
            let arc = g.arc_at(a);
            net[arc.tail.index()] += 1;
            net[arc.head.index()] -= 1;
        }
        assert_eq!(net, demand.values());
    }

    #[test]
    fn demand_parse() {
        let d = Demand::parse(3, "# c\nd 1 2\nd 3 -2\n").unwrap();
        assert_eq!(d.values(), &[2, 0, -2]);
        assert_eq!(
            Demand::parse(3, "d 1 1").unwrap_err(),
            DemandError::NonZeroSum { sum: 1 }
        );
        assert_eq!(
            Demand::parse(3, "d 4 0").unwrap_err(),
            DemandError::VertexOutOfRange { line: 1 }
        );
        assert_eq!(
            Demand::parse(3, "d 1 1\nd 1 -1").unwrap_err(),
            DemandError::DuplicateVertex { line: 2 }
        );
        assert_eq!(
            Demand::parse(3, "d one 1").unwrap_err(),
            DemandError::Malformed { line: 1 }
        );
    }

    #[test]
    fn matches_oracle_on_every_tri_subset() {
        let g = g_tri();
        let demand = Demand::new(vec![1, 0, -1]).unwrap();
        for bits in 0u32..64 {
            let mut d = DirectedSubgraph::empty(&g);
            for i in 0..6 {
                if bits >> i & 1 == 1 {
                    d.insert_index(i);
                }
            }
            assert_matches_oracle(&g, &d, &demand);
        }
    }

    #[test]
    fn optimum_is_unique_on_tri() {
        // enumerate all conserving 0/1 flows on the full arc set and check
        // the lex costs are pairwise distinct
        let g = g_tri();
        let demand = Demand::new(vec![1, 0, -1]).unwrap();
        let mut costs: Vec<LexCost> = Vec::new();
        for bits in 0u32..64 {
            let mut d = DirectedSubgraph::empty(&g);
            for i in 0..6 {
                if bits >> i & 1 == 1 {
                    d.insert_index(i);
                }
            }
            let mut net = vec![0i64; 3];
            for a in d.iter() {
                let arc = g.arc_at(a);
                net[arc.tail.index()] += 1;
                net[arc.head.index()] -= 1;
            }
            if net == demand.values() {
                costs.push(lex_cost(&g, &d));
            }
        }
        costs.sort();
        for pair in costs.windows(2) {
            assert!(pair[0] < pair[1]);
        }
    }
}
