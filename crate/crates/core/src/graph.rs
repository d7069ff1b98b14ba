//! Base graph representation and arc algebra.
//!
//! Arcs are indexed by their edge slot: edge `e_i` (1-based, file order)
//! owns arc index `2(i-1)` for its reference arc (the direction written in
//! the file) and `2(i-1)+1` for the reverse arc. Arc sets are bit masks
//! over these indices.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// 1-based vertex identifier.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct VertexId(pub u32);

impl VertexId {
    /// 0-based position, for indexing vectors of per-vertex data.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A directed edge between two vertices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Arc {
    pub tail: VertexId,
    pub head: VertexId,
}

impl Arc {
    pub fn new(tail: u32, head: u32) -> Self {
        Arc {
            tail: VertexId(tail),
            head: VertexId(head),
        }
    }

    /// The reverse arc. An involution: `a.rev().rev() == a`.
    pub fn rev(self) -> Self {
        Arc {
            tail: self.head,
            head: self.tail,
        }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}>{}", self.tail, self.head)
    }
}

/// One undirected edge viewed through its slot in the fixed edge order.
#[derive(Clone, Copy, Debug)]
pub struct EdgeSlot {
    /// 1-based position in the edge order.
    pub edge_index: usize,
    pub reference_arc: Arc,
    pub reverse_arc: Arc,
    pub weight: u64,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: malformed line")]
    Malformed { line: usize },
    #[error("line {line}: self-loop")]
    SelfLoop { line: usize },
    #[error("line {line}: duplicate undirected edge")]
    DuplicateEdge { line: usize },
    #[error("line {line}: weight must be a positive integer")]
    NonPositiveWeight { line: usize },
    #[error("line {line}: vertex index out of range")]
    VertexOutOfRange { line: usize },
    #[error("missing 'p <n> <m>' header")]
    MissingHeader,
    #[error("header declares {expected} edges, file has {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
}

#[derive(Debug)]
struct Edge {
    reference: Arc,
    weight: u64,
}

/// Immutable weighted graph with a fixed edge order and reference
/// orientation. Safe to share across threads.
#[derive(Debug)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    by_pair: HashMap<(u32, u32), usize>,
}

impl WeightedGraph {
    /// Build from an explicit edge list; `line` in errors is the 1-based
    /// edge position.
    pub fn new(n: usize, edges: Vec<(Arc, u64)>) -> Result<Self, GraphError> {
        let mut g = WeightedGraph {
            n,
            edges: Vec::with_capacity(edges.len()),
            by_pair: HashMap::new(),
        };
        for (pos, (arc, weight)) in edges.into_iter().enumerate() {
            g.push_edge(arc, weight, pos + 1)?;
        }
        Ok(g)
    }

    fn push_edge(&mut self, arc: Arc, weight: u64, line: usize) -> Result<(), GraphError> {
        let (u, v) = (arc.tail.0, arc.head.0);
        if u < 1 || v < 1 || u as usize > self.n || v as usize > self.n {
            return Err(GraphError::VertexOutOfRange { line });
        }
        if u == v {
            return Err(GraphError::SelfLoop { line });
        }
        if weight == 0 {
            return Err(GraphError::NonPositiveWeight { line });
        }
        let key = (u.min(v), u.max(v));
        if self.by_pair.insert(key, self.edges.len()).is_some() {
            return Err(GraphError::DuplicateEdge { line });
        }
        self.edges.push(Edge {
            reference: arc,
            weight,
        });
        Ok(())
    }

    /// Parse the line-oriented text format: `#` comments, a `p <n> <m>`
    /// header, then `m` lines `e <u> <v> <w>`. Edge order and reference
    /// orientation are exactly the file order and as-written direction.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut graph: Option<WeightedGraph> = None;
        let mut declared = 0usize;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            match fields[0] {
                "p" => {
                    if graph.is_some() || fields.len() != 3 {
                        return Err(GraphError::Malformed { line });
                    }
                    let n: usize = fields[1]
                        .parse()
                        .map_err(|_| GraphError::Malformed { line })?;
                    declared = fields[2]
                        .parse()
                        .map_err(|_| GraphError::Malformed { line })?;
                    graph = Some(WeightedGraph {
                        n,
                        edges: Vec::with_capacity(declared),
                        by_pair: HashMap::new(),
                    });
                }
                "e" => {
                    let g = graph.as_mut().ok_or(GraphError::MissingHeader)?;
                    if fields.len() != 4 {
                        return Err(GraphError::Malformed { line });
                    }
                    let u: u32 = fields[1]
                        .parse()
                        .map_err(|_| GraphError::Malformed { line })?;
                    let v: u32 = fields[2]
                        .parse()
                        .map_err(|_| GraphError::Malformed { line })?;
                    let w: i64 = fields[3]
                        .parse()
                        .map_err(|_| GraphError::Malformed { line })?;
                    if w < 1 {
                        return Err(GraphError::NonPositiveWeight { line });
                    }
                    g.push_edge(Arc::new(u, v), w as u64, line)?;
                }
                _ => return Err(GraphError::Malformed { line }),
            }
        }
        let g = graph.ok_or(GraphError::MissingHeader)?;
        if g.edges.len() != declared {
            return Err(GraphError::EdgeCountMismatch {
                expected: declared,
                found: g.edges.len(),
            });
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of arcs, `2m`.
    pub fn arc_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (1..=self.n as u32).map(VertexId)
    }

    /// Edge weight by 0-based edge position.
    pub fn weight(&self, edge: usize) -> u64 {
        self.edges[edge].weight
    }

    /// Reference arc of the edge at 0-based position `edge`.
    pub fn reference_arc(&self, edge: usize) -> Arc {
        self.edges[edge].reference
    }

    pub fn slot(&self, edge_index: usize) -> EdgeSlot {
        let e = &self.edges[edge_index - 1];
        EdgeSlot {
            edge_index,
            reference_arc: e.reference,
            reverse_arc: e.reference.rev(),
            weight: e.weight,
        }
    }

    /// The arc with the given canonical index in `[0, 2m)`.
    pub fn arc_at(&self, arc_index: usize) -> Arc {
        let r = self.edges[arc_index / 2].reference;
        if arc_index % 2 == 0 {
            r
        } else {
            r.rev()
        }
    }

    /// Canonical index of an arc, if its edge exists in this graph.
    pub fn arc_index(&self, a: Arc) -> Option<usize> {
        let (u, v) = (a.tail.0, a.head.0);
        let key = (u.min(v), u.max(v));
        let edge = *self.by_pair.get(&key)?;
        if self.edges[edge].reference == a {
            Some(2 * edge)
        } else if self.edges[edge].reference == a.rev() {
            Some(2 * edge + 1)
        } else {
            None
        }
    }

    pub fn contains_arc(&self, a: Arc) -> bool {
        self.arc_index(a).is_some()
    }

    /// The reference arc of `a`'s edge slot; equal for `a` and `a.rev()`.
    pub fn chi(&self, a: Arc) -> Option<Arc> {
        let idx = self.arc_index(a)?;
        Some(self.edges[idx / 2].reference)
    }
}

/// How an arc set relates to the subgraph/orientation dichotomy.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Classification {
    /// Every edge slot holds 0 or 2 arcs.
    Subgraph,
    /// Every edge slot holds exactly 1 arc.
    Orientation,
    Mixed,
}

/// An arbitrary set of arcs of a fixed graph, as a `2m`-bit mask.
///
/// Mixed sets (neither subgraph nor orientation) are first-class: the
/// intermediate states of the bijection are mixed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DirectedSubgraph {
    bits: Vec<u64>,
    arc_count: usize,
}

impl fmt::Debug for DirectedSubgraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DirectedSubgraph({})", self.bitstring())
    }
}

impl DirectedSubgraph {
    pub fn empty(g: &WeightedGraph) -> Self {
        Self::with_arc_count(g.arc_count())
    }

    pub fn with_arc_count(arc_count: usize) -> Self {
        DirectedSubgraph {
            bits: vec![0; arc_count.div_ceil(64)],
            arc_count,
        }
    }

    /// All `2m` arcs.
    pub fn all(g: &WeightedGraph) -> Self {
        let mut d = Self::empty(g);
        for i in 0..g.arc_count() {
            d.insert_index(i);
        }
        d
    }

    pub fn from_arcs<I: IntoIterator<Item = Arc>>(g: &WeightedGraph, arcs: I) -> Self {
        let mut d = Self::empty(g);
        for a in arcs {
            let idx = g.arc_index(a).expect("arc not in graph");
            d.insert_index(idx);
        }
        d
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    pub fn contains_index(&self, i: usize) -> bool {
        debug_assert!(i < self.arc_count);
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert_index(&mut self, i: usize) {
        debug_assert!(i < self.arc_count);
        self.bits[i / 64] |= 1 << (i % 64);
    }

    pub fn remove_index(&mut self, i: usize) {
        debug_assert!(i < self.arc_count);
        self.bits[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, g: &WeightedGraph, a: Arc) -> bool {
        g.arc_index(a).is_some_and(|i| self.contains_index(i))
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Arc indices present, ascending.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.arc_count).filter(|&i| self.contains_index(i))
    }

    pub fn arcs(&self, g: &WeightedGraph) -> Vec<Arc> {
        self.iter().map(|i| g.arc_at(i)).collect()
    }

    pub fn is_subset_of(&self, other: &DirectedSubgraph) -> bool {
        self.bits
            .iter()
            .zip(&other.bits)
            .all(|(a, b)| a & !b == 0)
    }

    /// The orientation operation `D ⊕ a`: insert `a`, drop its reverse.
    pub fn orient_insert(&self, g: &WeightedGraph, a: Arc) -> Self {
        let idx = g.arc_index(a).expect("arc not in graph");
        let mut d = self.clone();
        d.insert_index(idx);
        d.remove_index(idx ^ 1);
        d
    }

    /// The symmetric inclusion `D + e`: insert both arcs of `e`'s edge.
    pub fn pair_insert(&self, g: &WeightedGraph, e: Arc) -> Self {
        let idx = g.arc_index(e).expect("arc not in graph");
        let mut d = self.clone();
        d.insert_index(idx);
        d.insert_index(idx ^ 1);
        d
    }

    /// The symmetric exclusion `D − e`: drop both arcs of `e`'s edge.
    pub fn pair_remove(&self, g: &WeightedGraph, e: Arc) -> Self {
        let idx = g.arc_index(e).expect("arc not in graph");
        let mut d = self.clone();
        d.remove_index(idx);
        d.remove_index(idx ^ 1);
        d
    }

    pub fn classify(&self) -> Classification {
        let mut all_paired = true;
        let mut all_single = true;
        for e in 0..self.arc_count / 2 {
            let count =
                self.contains_index(2 * e) as usize + self.contains_index(2 * e + 1) as usize;
            match count {
                0 | 2 => all_single = false,
                1 => all_paired = false,
                _ => unreachable!(),
            }
        }
        if all_paired {
            Classification::Subgraph
        } else if all_single {
            Classification::Orientation
        } else {
            Classification::Mixed
        }
    }

    /// Raw `2m`-character arc bitstring (arc-index order), mostly for
    /// debugging and witness reports.
    pub fn bitstring(&self) -> String {
        (0..self.arc_count)
            .map(|i| if self.contains_index(i) { '1' } else { '0' })
            .collect()
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MaskError {
    #[error("mask has length {found}, expected {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("mask position {pos}: expected '0' or '1'")]
    BadChar { pos: usize },
    #[error("arc set is not a subgraph")]
    NotASubgraph,
    #[error("arc set is not an orientation")]
    NotAnOrientation,
}

fn mask_bits(m: usize, mask: &str) -> Result<Vec<bool>, MaskError> {
    if mask.len() != m {
        return Err(MaskError::WrongLength {
            expected: m,
            found: mask.len(),
        });
    }
    mask.chars()
        .enumerate()
        .map(|(pos, c)| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(MaskError::BadChar { pos }),
        })
        .collect()
}

/// `m`-bit mask, bit `i-1` set iff both arcs of `e_i` are present.
pub fn encode_subgraph_mask(d: &DirectedSubgraph) -> Result<String, MaskError> {
    if d.classify() != Classification::Subgraph {
        return Err(MaskError::NotASubgraph);
    }
    Ok((0..d.arc_count() / 2)
        .map(|e| if d.contains_index(2 * e) { '1' } else { '0' })
        .collect())
}

pub fn decode_subgraph_mask(g: &WeightedGraph, mask: &str) -> Result<DirectedSubgraph, MaskError> {
    let bits = mask_bits(g.edge_count(), mask)?;
    let mut d = DirectedSubgraph::empty(g);
    for (e, &on) in bits.iter().enumerate() {
        if on {
            d.insert_index(2 * e);
            d.insert_index(2 * e + 1);
        }
    }
    Ok(d)
}

/// `m`-bit mask, bit `i-1` set iff `e_i` is oriented as its reference arc.
pub fn encode_orientation_mask(d: &DirectedSubgraph) -> Result<String, MaskError> {
    if d.classify() != Classification::Orientation {
        return Err(MaskError::NotAnOrientation);
    }
    Ok((0..d.arc_count() / 2)
        .map(|e| if d.contains_index(2 * e) { '1' } else { '0' })
        .collect())
}

pub fn decode_orientation_mask(
    g: &WeightedGraph,
    mask: &str,
) -> Result<DirectedSubgraph, MaskError> {
    let bits = mask_bits(g.edge_count(), mask)?;
    let mut d = DirectedSubgraph::empty(g);
    for (e, &on) in bits.iter().enumerate() {
        d.insert_index(if on { 2 * e } else { 2 * e + 1 });
    }
    Ok(d)
}
