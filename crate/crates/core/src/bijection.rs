//! The subgraph ↔ orientation maps.
//!
//! `phi` orients edges `e_1, e_2, ..., e_m` in order; `psi` decides
//! pair-inclusion for `e_m, ..., e_1` in reverse order. Each per-edge step
//! first checks whether forcing either decision changes the min-cost flow
//! `A(D)` (rules 1 and 2); only when both decisions preserve it does the
//! reference-orientation default apply (rules 3 and 4). Every step leaves
//! `A` unchanged, so the composed maps preserve the min-cost flow and are
//! mutually inverse.

use thiserror::Error;

use crate::graph::{Arc, Classification, DirectedSubgraph, WeightedGraph};
use crate::mcf::{min_cost_flow, Demand, IntegralFlow};

#[derive(Error, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BijectionError {
    #[error("no feasible flow on the input arc set")]
    Infeasible,
    #[error("input arc set is not a subgraph")]
    NotASubgraph,
    #[error("input arc set is not an orientation")]
    NotAnOrientation,
}

/// One per-edge step: which rule fired and the state afterwards.
#[derive(Clone, Debug)]
pub struct StepTrace {
    /// 1-based edge index the step acted on.
    pub slot: usize,
    /// Rule number 1-4.
    pub rule: u8,
    /// For phi: the arc the slot was oriented to. For psi: the slot's
    /// reference arc (rules 2/3 include the pair, rules 1/4 exclude it).
    pub arc: Arc,
    pub after: DirectedSubgraph,
}

/// Result of a full phi or psi evaluation.
#[derive(Clone, Debug)]
pub struct MapRun {
    pub image: DirectedSubgraph,
    pub steps: Vec<StepTrace>,
    /// Number of min-cost-flow solves issued (at most `2m + 1`).
    pub solver_calls: usize,
}

fn preserves(candidate: &Option<IntegralFlow>, current: &IntegralFlow) -> bool {
    candidate
        .as_ref()
        .is_some_and(|f| f.support == current.support)
}

/// `phi_i` with the flow on the incoming state already known.
fn phi_step_inner(
    g: &WeightedGraph,
    demand: &Demand,
    d: &DirectedSubgraph,
    slot: usize, // 0-based
    current: &IntegralFlow,
    calls: &mut usize,
) -> (DirectedSubgraph, u8, Arc) {
    let e = g.reference_arc(slot);
    let with_ref = d.orient_insert(g, e);
    let with_rev = d.orient_insert(g, e.rev());
    let a_ref = min_cost_flow(g, &with_ref, demand);
    let a_rev = min_cost_flow(g, &with_rev, demand);
    *calls += 2;
    let keeps_ref = preserves(&a_ref, current);
    let keeps_rev = preserves(&a_rev, current);
    // rules (1.) and (2.) cannot both fire
    assert!(
        keeps_ref || keeps_rev,
        "phi rules (1.) and (2.) both fired at edge {}",
        slot + 1
    );
    if !keeps_ref {
        (with_rev, 1, e.rev())
    } else if !keeps_rev {
        (with_ref, 2, e)
    } else if d.contains_index(2 * slot) {
        (with_ref, 3, e)
    } else {
        (with_rev, 4, e.rev())
    }
}

/// `psi_i` with the flow on the incoming state already known.
fn psi_step_inner(
    g: &WeightedGraph,
    demand: &Demand,
    d: &DirectedSubgraph,
    slot: usize, // 0-based
    current: &IntegralFlow,
    calls: &mut usize,
) -> (DirectedSubgraph, u8, Arc) {
    let e = g.reference_arc(slot);
    let with_pair = d.pair_insert(g, e);
    let without_pair = d.pair_remove(g, e);
    let a_plus = min_cost_flow(g, &with_pair, demand);
    let a_minus = min_cost_flow(g, &without_pair, demand);
    *calls += 2;
    let keeps_plus = preserves(&a_plus, current);
    let keeps_minus = preserves(&a_minus, current);
    // rules (1.) and (2.) cannot both fire
    assert!(
        keeps_plus || keeps_minus,
        "psi rules (1.) and (2.) both fired at edge {}",
        slot + 1
    );
    if !keeps_plus {
        (without_pair, 1, e)
    } else if !keeps_minus {
        (with_pair, 2, e)
    } else if d.contains_index(2 * slot) {
        (with_pair, 3, e)
    } else {
        (without_pair, 4, e)
    }
}

/// The single step `phi_i` on an arbitrary feasible arc set; `edge_index`
/// is 1-based.
pub fn phi_step(
    g: &WeightedGraph,
    demand: &Demand,
    d: &DirectedSubgraph,
    edge_index: usize,
) -> Result<DirectedSubgraph, BijectionError> {
    let current = min_cost_flow(g, d, demand).ok_or(BijectionError::Infeasible)?;
    let mut calls = 0;
    Ok(phi_step_inner(g, demand, d, edge_index - 1, &current, &mut calls).0)
}

/// The single step `psi_i` on an arbitrary feasible arc set; `edge_index`
/// is 1-based.
pub fn psi_step(
    g: &WeightedGraph,
    demand: &Demand,
    d: &DirectedSubgraph,
    edge_index: usize,
) -> Result<DirectedSubgraph, BijectionError> {
    let current = min_cost_flow(g, d, demand).ok_or(BijectionError::Infeasible)?;
    let mut calls = 0;
    Ok(psi_step_inner(g, demand, d, edge_index - 1, &current, &mut calls).0)
}

/// Map a feasible subgraph to a feasible orientation with the same
/// min-cost flow, recording each step.
pub fn phi_run(
    g: &WeightedGraph,
    demand: &Demand,
    subgraph: &DirectedSubgraph,
) -> Result<MapRun, BijectionError> {
    if subgraph.classify() != Classification::Subgraph {
        return Err(BijectionError::NotASubgraph);
    }
    let current = min_cost_flow(g, subgraph, demand).ok_or(BijectionError::Infeasible)?;
    let mut calls = 1;
    let mut state = subgraph.clone();
    let mut steps = Vec::with_capacity(g.edge_count());
    for slot in 0..g.edge_count() {
        let (next, rule, arc) = phi_step_inner(g, demand, &state, slot, &current, &mut calls);
        steps.push(StepTrace {
            slot: slot + 1,
            rule,
            arc,
            after: next.clone(),
        });
        state = next;
    }
    debug_assert_eq!(state.classify(), Classification::Orientation);
    Ok(MapRun {
        image: state,
        steps,
        solver_calls: calls,
    })
}

pub fn phi(
    g: &WeightedGraph,
    demand: &Demand,
    subgraph: &DirectedSubgraph,
) -> Result<DirectedSubgraph, BijectionError> {
    phi_run(g, demand, subgraph).map(|r| r.image)
}

/// Map a feasible orientation back to a feasible subgraph with the same
/// min-cost flow, recording each step (applied for `i = m, ..., 1`).
pub fn psi_run(
    g: &WeightedGraph,
    demand: &Demand,
    orientation: &DirectedSubgraph,
) -> Result<MapRun, BijectionError> {
    if orientation.classify() != Classification::Orientation {
        return Err(BijectionError::NotAnOrientation);
    }
    let current = min_cost_flow(g, orientation, demand).ok_or(BijectionError::Infeasible)?;
    let mut calls = 1;
    let mut state = orientation.clone();
    let mut steps = Vec::with_capacity(g.edge_count());
    for slot in (0..g.edge_count()).rev() {
        let (next, rule, arc) = psi_step_inner(g, demand, &state, slot, &current, &mut calls);
        steps.push(StepTrace {
            slot: slot + 1,
            rule,
            arc,
            after: next.clone(),
        });
        state = next;
    }
    debug_assert_eq!(state.classify(), Classification::Subgraph);
    Ok(MapRun {
        image: state,
        steps,
        solver_calls: calls,
    })
}

pub fn psi(
    g: &WeightedGraph,
    demand: &Demand,
    orientation: &DirectedSubgraph,
) -> Result<DirectedSubgraph, BijectionError> {
    psi_run(g, demand, orientation).map(|r| r.image)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{
        decode_orientation_mask, decode_subgraph_mask, encode_orientation_mask,
        encode_subgraph_mask,
    };
    use crate::mcf::feasible;

    fn g_edge() -> WeightedGraph {
        WeightedGraph::parse("p 2 1\ne 1 2 1").unwrap()
    }

    fn g_tri() -> WeightedGraph {
        WeightedGraph::parse("p 3 3\ne 1 3 5\ne 1 2 1\ne 2 3 1").unwrap()
    }

    fn unit_demand_tri() -> Demand {
        Demand::new(vec![1, 0, -1]).unwrap()
    }

    #[test]
    fn phi_step_rule3_on_full_tri() {
        let g = g_tri();
        let d = unit_demand_tri();
        let full = DirectedSubgraph::all(&g);
        let after = phi_step(&g, &d, &full, 1).unwrap();
        // slot 1 oriented to chi(e_1) = (1,3); other slots unchanged
        assert!(after.contains(&g, Arc::new(1, 3)));
        assert!(!after.contains(&g, Arc::new(3, 1)));
        for i in 2..6 {
            assert!(after.contains_index(i));
        }
    }

    #[test]
    fn phi_step_rule2_keeps_cheap_edge() {
        let g = g_tri();
        let d = unit_demand_tri();
        let mut state = DirectedSubgraph::all(&g);
        state.remove_index(1); // slot 1 already oriented to (1,3)
        let after = phi_step(&g, &d, &state, 2).unwrap();
        // dropping (1,2) would reroute onto (1,3) at base cost 5, so rule
        // (2.) keeps the reference arc
        assert!(after.contains(&g, Arc::new(1, 2)));
        assert!(!after.contains(&g, Arc::new(2, 1)));
    }

    #[test]
    fn phi_traced_example_on_tri() {
        let g = g_tri();
        let d = unit_demand_tri();
        let k = decode_subgraph_mask(&g, "111").unwrap();
        let run = phi_run(&g, &d, &k).unwrap();
        assert_eq!(encode_orientation_mask(&run.image).unwrap(), "111");
        assert_eq!(
            run.steps.iter().map(|s| s.rule).collect::<Vec<_>>(),
            vec![3, 2, 2]
        );
        assert_eq!(run.solver_calls, 7);
    }

    #[test]
    fn phi_on_single_edge() {
        let g = g_edge();
        let d = Demand::new(vec![1, -1]).unwrap();
        let k = decode_subgraph_mask(&g, "1").unwrap();
        let run = phi_run(&g, &d, &k).unwrap();
        assert_eq!(encode_orientation_mask(&run.image).unwrap(), "1");
        assert_eq!(run.steps[0].rule, 2);
    }

    #[test]
    fn phi_zero_demand_closed_form() {
        let g = g_tri();
        let d = Demand::zero(3);
        let k = decode_subgraph_mask(&g, "000").unwrap();
        let run = phi_run(&g, &d, &k).unwrap();
        assert_eq!(encode_orientation_mask(&run.image).unwrap(), "000");
        assert!(run.steps.iter().all(|s| s.rule == 4));
    }

    #[test]
    fn psi_step_examples_on_tri() {
        let g = g_tri();
        let d = unit_demand_tri();
        let ori = decode_orientation_mask(&g, "111").unwrap();
        // removing e_3 reroutes onto (1,3): rule (2.) makes it a pair
        let after = psi_step(&g, &d, &ori, 3).unwrap();
        assert!(after.contains(&g, Arc::new(2, 3)));
        assert!(after.contains(&g, Arc::new(3, 2)));

        // with slots 2 and 3 pair-complete, slot 1 holds chi(e_1): rule (3.)
        let mut state = DirectedSubgraph::all(&g);
        state.remove_index(1);
        let after = psi_step(&g, &d, &state, 1).unwrap();
        assert_eq!(after, DirectedSubgraph::all(&g));
    }

    #[test]
    fn psi_zero_demand_rule4() {
        let g = g_tri();
        let d = Demand::zero(3);
        // slot holding only the reverse of its reference arc empties
        let state = DirectedSubgraph::from_arcs(&g, [Arc::new(3, 1)]);
        let after = psi_step(&g, &d, &state, 1).unwrap();
        assert!(after.is_empty());
    }

    #[test]
    fn psi_examples() {
        let g = g_tri();
        let d = unit_demand_tri();
        let l = decode_orientation_mask(&g, "111").unwrap();
        let run = psi_run(&g, &d, &l).unwrap();
        assert_eq!(encode_subgraph_mask(&run.image).unwrap(), "111");

        let edge = g_edge();
        let l = decode_orientation_mask(&edge, "1").unwrap();
        let sub = psi(&edge, &Demand::new(vec![1, -1]).unwrap(), &l).unwrap();
        assert_eq!(encode_subgraph_mask(&sub).unwrap(), "1");

        let l = decode_orientation_mask(&g, "101").unwrap();
        let sub = psi(&g, &Demand::zero(3), &l).unwrap();
        assert_eq!(encode_subgraph_mask(&sub).unwrap(), "101");
    }

    #[test]
    fn input_validation() {
        let g = g_tri();
        let d = unit_demand_tri();
        let mixed = DirectedSubgraph::from_arcs(&g, [Arc::new(1, 3)]);
        assert_eq!(
            phi(&g, &d, &mixed).unwrap_err(),
            BijectionError::NotASubgraph
        );
        assert_eq!(
            psi(&g, &d, &mixed).unwrap_err(),
            BijectionError::NotAnOrientation
        );
        let infeasible = decode_subgraph_mask(&g, "000").unwrap();
        assert_eq!(
            phi(&g, &d, &infeasible).unwrap_err(),
            BijectionError::Infeasible
        );
    }

    #[test]
    fn step_inverse_exhaustive_on_tri() {
        // single-step inversion over every feasible arc subset and every slot
        let g = g_tri();
        for demand in [unit_demand_tri(), Demand::zero(3)] {
            for bits in 0u32..64 {
                let mut d = DirectedSubgraph::empty(&g);
                for i in 0..6 {
                    if bits >> i & 1 == 1 {
                        d.insert_index(i);
                    }
                }
                if !feasible(&g, &d, &demand) {
                    continue;
                }
                for i in 1..=3 {
                    let slot_arcs = d.contains_index(2 * (i - 1)) as usize
                        + d.contains_index(2 * (i - 1) + 1) as usize;
                    if slot_arcs == 1 {
                        let roundtrip =
                            phi_step(&g, &demand, &psi_step(&g, &demand, &d, i).unwrap(), i)
                                .unwrap();
                        assert_eq!(roundtrip, d, "phi_i . psi_i at slot {i}");
                    } else {
                        let roundtrip =
                            psi_step(&g, &demand, &phi_step(&g, &demand, &d, i).unwrap(), i)
                                .unwrap();
                        assert_eq!(roundtrip, d, "psi_i . phi_i at slot {i}");
                    }
                }
            }
        }
    }

    #[test]
    fn steps_change_only_their_slot() {
        let g = g_tri();
        let d = unit_demand_tri();
        let full = DirectedSubgraph::all(&g);
        for i in 1..=3 {
            let after = phi_step(&g, &d, &full, i).unwrap();
            for a in 0..6 {
                if a / 2 != i - 1 {
                    assert_eq!(after.contains_index(a), full.contains_index(a));
                }
            }
        }
    }
}
