//! Shared fixtures for the integration and acceptance suites.
#![allow(dead_code)] // not every test binary uses every fixture

use flowbij::{Demand, VertexId, WeightedGraph};

pub const EDGE: &str = "p 2 1\ne 1 2 1\n";
pub const TRI: &str = "p 3 3\ne 1 3 5\ne 1 2 1\ne 2 3 1\n";
pub const DIAMOND: &str = "p 4 5\ne 1 2 1\ne 1 3 1\ne 2 4 1\ne 3 4 1\ne 2 3 1\n";
pub const K4: &str = "p 4 6\ne 1 2 1\ne 1 3 1\ne 1 4 1\ne 2 3 1\ne 2 4 1\ne 3 4 1\n";
pub const P4: &str = "p 4 3\ne 1 2 1\ne 2 3 1\ne 3 4 1\n";

pub fn fixtures() -> Vec<(&'static str, WeightedGraph)> {
    vec![
        ("edge", WeightedGraph::parse(EDGE).unwrap()),
        ("tri", WeightedGraph::parse(TRI).unwrap()),
        ("diamond", WeightedGraph::parse(DIAMOND).unwrap()),
        ("k4", WeightedGraph::parse(K4).unwrap()),
        ("p4", WeightedGraph::parse(P4).unwrap()),
    ]
}

/// All st-demands with k in {1,2} over ordered vertex pairs.
pub fn st_demand_grid(g: &WeightedGraph) -> Vec<Demand> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    for s in 1..=n as u32 {
        for t in 1..=n as u32 {
            if s == t {
                continue;
            }
            for k in 1..=2u32 {
                out.push(
                    flowbij::connectivity::st_demand(n, VertexId(s), VertexId(t), k).unwrap(),
                );
            }
        }
    }
    out
}
