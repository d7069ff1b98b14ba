//! Flow-preserving bijection between subgraphs and orientations of a
//! weighted graph under an integer circulation demand.
//!
//! A graph is treated as a symmetric digraph: every undirected edge is a
//! pair of antiparallel arcs. A *subgraph* keeps both arcs of an edge or
//! neither; an *orientation* keeps exactly one. Given a demand `d` that
//! sums to zero, the map [`bijection::phi`] turns every subgraph admitting
//! a `d`-flow into an orientation admitting the same flow, one edge at a
//! time, and [`bijection::psi`] inverts it. The min-cost flow `A(D)` that
//! drives the construction is made unique by a lexicographic cost
//! perturbation, see [`mcf`].
//!
//! The construction is only canonical relative to the reference
//! orientation and edge order fixed by the input file: edges are numbered
//! in file order and the as-written direction of each edge line is its
//! reference arc. Permuting edge lines or flipping their endpoints yields
//! a different (equally valid) bijection.

pub mod bijection;
pub mod connectivity;
pub mod enumeration;
pub mod graph;
pub mod mcf;

pub use graph::{Arc, Classification, DirectedSubgraph, VertexId, WeightedGraph};
pub use mcf::{Demand, IntegralFlow, LexCost};
