//! Brute-force oracles and exhaustive verification at desk scale.
//!
//! Everything here exists to check the rest of the crate against
//! independent computations: the solver against subset enumeration, the
//! per-edge lemmas against all arc sets, and the bijection against a full
//! walk over the feasible subgraphs and orientations.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bijection::{phi_run, phi_step, psi_run, psi_step};
use crate::graph::{
    decode_orientation_mask, decode_subgraph_mask, Arc, DirectedSubgraph, WeightedGraph,
};
use crate::mcf::{feasible, lex_cost, min_cost_flow, Demand, IntegralFlow, LexCost};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("{what} needs {needed}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: usize,
        cap: usize,
    },
}

/// Size caps for exhaustive runs. Configuration, not constants.
#[derive(Clone, Copy, Debug)]
pub struct EnumConfig {
    /// Max edge count for 2^m mask enumeration.
    pub mask_cap: usize,
    /// Max |D| for the brute-force solver oracle.
    pub brute_arc_cap: usize,
    /// Max edge count for exhaustive verification over all 2^(2m) arc sets.
    pub verify_edge_cap: usize,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            mask_cap: 20,
            brute_arc_cap: 22,
            verify_edge_cap: 7,
        }
    }
}

/// Which of the two classified families to enumerate.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MaskKind {
    Subgraph,
    Orientation,
}

/// The m-character mask for the mask integer `bits` (bit `i-1` is `e_i`).
pub fn mask_string(bits: u64, m: usize) -> String {
    (0..m)
        .map(|i| if bits >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// All feasible subgraph or orientation masks, in ascending binary order.
pub fn enumerate_feasible(
    g: &WeightedGraph,
    demand: &Demand,
    kind: MaskKind,
    config: &EnumConfig,
) -> Result<Vec<String>, EnumError> {
    let m = g.edge_count();
    if m > config.mask_cap {
        return Err(EnumError::CapExceeded {
            what: "mask enumeration",
            needed: m,
            cap: config.mask_cap,
        });
    }
    let mut out = Vec::new();
    for bits in 0u64..1 << m {
        let mask = mask_string(bits, m);
        let d = match kind {
            MaskKind::Subgraph => decode_subgraph_mask(g, &mask).expect("mask is valid"),
            MaskKind::Orientation => decode_orientation_mask(g, &mask).expect("mask is valid"),
        };
        if feasible(g, &d, demand) {
            out.push(mask);
        }
    }
    Ok(out)
}

/// Independent oracle for `A(D)`: lexicographic minimum over every subset
/// of `D`'s arcs satisfying conservation. Byte-identical result contract
/// with `min_cost_flow`.
pub fn brute_force_mcf(
    g: &WeightedGraph,
    restriction: &DirectedSubgraph,
    demand: &Demand,
    config: &EnumConfig,
) -> Result<Option<IntegralFlow>, EnumError> {
    let arcs: Vec<usize> = restriction.iter().collect();
    if arcs.len() > config.brute_arc_cap {
        return Err(EnumError::CapExceeded {
            what: "brute-force flow oracle",
            needed: arcs.len(),
            cap: config.brute_arc_cap,
        });
    }
    let n = g.vertex_count();
    let deltas: Vec<(usize, usize)> = arcs
        .iter()
        .map(|&a| {
            let arc = g.arc_at(a);
            (arc.tail.index(), arc.head.index())
        })
        .collect();
    let mut best: Option<(LexCost, u64)> = None;
    for subset in 0u64..1 << arcs.len() {
        let mut net = vec![0i64; n];
        for (pos, &(t, h)) in deltas.iter().enumerate() {
            if subset >> pos & 1 == 1 {
                net[t] += 1;
                net[h] -= 1;
            }
        }
        if net != demand.values() {
            continue;
        }
        let mut support = DirectedSubgraph::with_arc_count(g.arc_count());
        for (pos, &a) in arcs.iter().enumerate() {
            if subset >> pos & 1 == 1 {
                support.insert_index(a);
            }
        }
        let cost = lex_cost(g, &support);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, subset));
        }
    }
    Ok(best.map(|(cost, subset)| {
        let mut support = DirectedSubgraph::with_arc_count(g.arc_count());
        for (pos, &a) in arcs.iter().enumerate() {
            if subset >> pos & 1 == 1 {
                support.insert_index(a);
            }
        }
        IntegralFlow { support, cost }
    }))
}

#[derive(Clone, Copy, Debug)]
pub enum VerifyMode {
    Exhaustive,
    Sampled { seed: u64, trials: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimResult {
    pub id: String,
    pub pass: bool,
    /// First counterexample, if any.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub graph: String,
    pub demand: Vec<i64>,
    /// (|S_f|, |O_f|); present iff exhaustive mode ran to completion.
    pub counts: Option<(u64, u64)>,
    pub claims: Vec<ClaimResult>,
    pub wall_time_ms: u128,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }

    /// One claim per line: `claim_id PASS|FAIL [witness]`.
    pub fn render(&self, timing: bool) -> String {
        let mut out = String::new();
        for c in &self.claims {
            out.push_str(&c.id);
            out.push_str(if c.pass { " PASS" } else { " FAIL" });
            if let Some(w) = &c.witness {
                out.push(' ');
                out.push_str(w);
            }
            out.push('\n');
        }
        if timing {
            out.push_str(&format!("time_ms {}\n", self.wall_time_ms));
        }
        out
    }
}

struct Claim {
    id: &'static str,
    witness: Option<String>,
}

impl Claim {
    fn new(id: &'static str) -> Self {
        Claim { id, witness: None }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
    }

    fn into_result(self) -> ClaimResult {
        ClaimResult {
            id: self.id.to_string(),
            pass: self.witness.is_none(),
            witness: self.witness,
        }
    }
}

fn subgraph_from_subset(g: &WeightedGraph, subset: u64) -> DirectedSubgraph {
    let mut d = DirectedSubgraph::with_arc_count(g.arc_count());
    for i in 0..g.arc_count() {
        if subset >> i & 1 == 1 {
            d.insert_index(i);
        }
    }
    d
}

fn same_flow(a: &Option<IntegralFlow>, b: &Option<IntegralFlow>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => x.support == y.support && x.cost == y.cost,
        _ => false,
    }
}

/// `lemma1` claim: orienting an edge either way, at least one choice keeps A(D).
fn check_lemma1(
    g: &WeightedGraph,
    demand: &Demand,
    d: &DirectedSubgraph,
    current: &IntegralFlow,
    edge: usize,
    claim: &mut Claim,
) {
    let e = g.reference_arc(edge);
    let a_ref = min_cost_flow(g, &d.orient_insert(g, e), demand);
    let a_rev = min_cost_flow(g, &d.orient_insert(g, e.rev()), demand);
    let keeps = |f: &Option<IntegralFlow>| {
        f.as_ref().is_some_and(|f| f.support == current.support)
    };
    claim.check(keeps(&a_ref) || keeps(&a_rev), || {
        format!("D={} e={}", d.bitstring(), edge + 1)
    });
}

/// `lemma2` claim: adding the reverse of a flow arc never changes A(D).
fn check_lemma2(
    g: &WeightedGraph,
    demand: &Demand,
    d: &DirectedSubgraph,
    current: &IntegralFlow,
    claim: &mut Claim,
) {
    for a in current.support.iter() {
        let arc = g.arc_at(a);
        let widened = min_cost_flow(g, &d.pair_insert(g, arc), demand);
        claim.check(
            widened
                .as_ref()
                .is_some_and(|f| f.support == current.support),
            || format!("D={} arc={}", d.bitstring(), arc),
        );
    }
}

fn check_solver_oracle(
    g: &WeightedGraph,
    demand: &Demand,
    d: &DirectedSubgraph,
    solved: &Option<IntegralFlow>,
    config: &EnumConfig,
    claim: &mut Claim,
) -> Result<(), EnumError> {
    let oracle = brute_force_mcf(g, d, demand, config)?;
    claim.check(same_flow(solved, &oracle), || {
        format!("D={}", d.bitstring())
    });
    Ok(())
}

/// The per-edge steps invert each other.
fn check_step_inverse(
    g: &WeightedGraph,
    demand: &Demand,
    d: &DirectedSubgraph,
    edge_index: usize, // 1-based
    claim: &mut Claim,
) {
    let arcs_at_slot = d.contains_index(2 * (edge_index - 1)) as usize
        + d.contains_index(2 * edge_index - 1) as usize;
    let round_trip = if arcs_at_slot == 1 {
        psi_step(g, demand, d, edge_index).and_then(|x| phi_step(g, demand, &x, edge_index))
    } else {
        phi_step(g, demand, d, edge_index).and_then(|x| psi_step(g, demand, &x, edge_index))
    };
    claim.check(round_trip.as_ref() == Ok(d), || {
        format!("D={} e={}", d.bitstring(), edge_index)
    });
}

/// Run every verification claim over one (graph, demand) instance.
pub fn verify_bijection(
    g: &WeightedGraph,
    demand: &Demand,
    mode: VerifyMode,
    config: &EnumConfig,
) -> Result<VerificationReport, EnumError> {
    let started = std::time::Instant::now();
    let (counts, claims) = match mode {
        VerifyMode::Exhaustive => verify_exhaustive(g, demand, config)?,
        VerifyMode::Sampled { seed, trials } => {
            (None, verify_sampled(g, demand, seed, trials, config)?)
        }
    };
    Ok(VerificationReport {
        graph: format!("n={} m={}", g.vertex_count(), g.edge_count()),
        demand: demand.values().to_vec(),
        counts,
        claims,
        wall_time_ms: started.elapsed().as_millis(),
    })
}

#[allow(clippy::type_complexity)]
fn verify_exhaustive(
    g: &WeightedGraph,
    demand: &Demand,
    config: &EnumConfig,
) -> Result<(Option<(u64, u64)>, Vec<ClaimResult>), EnumError> {
    let m = g.edge_count();
    if m > config.verify_edge_cap {
        return Err(EnumError::CapExceeded {
            what: "exhaustive verification",
            needed: m,
            cap: config.verify_edge_cap,
        });
    }
    let subgraphs = enumerate_feasible(g, demand, MaskKind::Subgraph, config)?;
    let orientations = enumerate_feasible(g, demand, MaskKind::Orientation, config)?;
    let mut counting = Claim::new("counting");
    counting.check(subgraphs.len() == orientations.len(), || {
        format!("|S_f|={} |O_f|={}", subgraphs.len(), orientations.len())
    });

    let mut phi_into = Claim::new("phi_into");
    let mut psi_into = Claim::new("psi_into");
    let mut inverse_sf = Claim::new("inverse_sf");
    let mut inverse_of = Claim::new("inverse_of");
    let mut flow_preserved = Claim::new("flow_preserved");

    let mut images = std::collections::HashSet::new();
    for mask in &subgraphs {
        let k = decode_subgraph_mask(g, mask).expect("enumerated mask is valid");
        let a_k = min_cost_flow(g, &k, demand).expect("enumerated mask is feasible");
        let run = phi_run(g, demand, &k).expect("feasible subgraph maps");
        // per-step A-preservation, support and cost
        for step in &run.steps {
            let a_step = min_cost_flow(g, &step.after, demand);
            flow_preserved.check(
                a_step
                    .as_ref()
                    .is_some_and(|f| f.support == a_k.support && f.cost == a_k.cost),
                || format!("K={} step={}", mask, step.slot),
            );
        }
        let image_mask = crate::graph::encode_orientation_mask(&run.image);
        phi_into.check(
            image_mask
                .as_ref()
                .is_ok_and(|im| orientations.contains(im)),
            || format!("K={}", mask),
        );
        phi_into.check(images.insert(run.image.clone()), || {
            format!("K={} (image collision)", mask)
        });
        let back = psi_run(g, demand, &run.image).expect("image is feasible");
        inverse_sf.check(back.image == k, || format!("K={}", mask));
    }
    // onto by count
    phi_into.check(images.len() == orientations.len(), || {
        format!("|phi(S_f)|={} |O_f|={}", images.len(), orientations.len())
    });

    for mask in &orientations {
        let l = decode_orientation_mask(g, mask).expect("enumerated mask is valid");
        let a_l = min_cost_flow(g, &l, demand).expect("enumerated mask is feasible");
        let run = psi_run(g, demand, &l).expect("feasible orientation maps");
        for step in &run.steps {
            let a_step = min_cost_flow(g, &step.after, demand);
            flow_preserved.check(
                a_step
                    .as_ref()
                    .is_some_and(|f| f.support == a_l.support && f.cost == a_l.cost),
                || format!("L={} step={}", mask, step.slot),
            );
        }
        psi_into.check(
            crate::graph::encode_subgraph_mask(&run.image)
                .as_ref()
                .is_ok_and(|im| subgraphs.contains(im)),
            || format!("L={}", mask),
        );
        let back = phi_run(g, demand, &run.image).expect("image is feasible");
        inverse_of.check(back.image == l, || format!("L={}", mask));
    }

    // lemmas and the solver oracle over every arc subset
    let mut lemma1 = Claim::new("lemma1");
    let mut lemma2 = Claim::new("lemma2");
    let mut solver_oracle = Claim::new("solver_oracle");
    for subset in 0u64..1 << g.arc_count() {
        let d = subgraph_from_subset(g, subset);
        let solved = min_cost_flow(g, &d, demand);
        check_solver_oracle(g, demand, &d, &solved, config, &mut solver_oracle)?;
        if let Some(current) = &solved {
            for edge in 0..m {
                check_lemma1(g, demand, &d, current, edge, &mut lemma1);
            }
            check_lemma2(g, demand, &d, current, &mut lemma2);
        }
    }

    let claims = vec![
        counting.into_result(),
        phi_into.into_result(),
        psi_into.into_result(),
        inverse_sf.into_result(),
        inverse_of.into_result(),
        flow_preserved.into_result(),
        lemma1.into_result(),
        lemma2.into_result(),
        solver_oracle.into_result(),
    ];
    Ok((
        Some((subgraphs.len() as u64, orientations.len() as u64)),
        claims,
    ))
}

/// Rejection-sample a feasible arc set; None if the per-trial cap runs out.
fn sample_feasible(
    g: &WeightedGraph,
    demand: &Demand,
    rng: &mut ChaCha8Rng,
    rejection_cap: usize,
) -> Option<DirectedSubgraph> {
    for _ in 0..rejection_cap {
        let mut d = DirectedSubgraph::with_arc_count(g.arc_count());
        for i in 0..g.arc_count() {
            if rng.gen_bool(0.5) {
                d.insert_index(i);
            }
        }
        if feasible(g, &d, demand) {
            return Some(d);
        }
    }
    None
}

fn verify_sampled(
    g: &WeightedGraph,
    demand: &Demand,
    seed: u64,
    trials: usize,
    config: &EnumConfig,
) -> Result<Vec<ClaimResult>, EnumError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lemma1 = Claim::new("lemma1");
    let mut lemma2 = Claim::new("lemma2");
    let mut solver_oracle = Claim::new("solver_oracle");
    let mut step_inverse = Claim::new("step_inverse");
    for _ in 0..trials {
        let Some(d) = sample_feasible(g, demand, &mut rng, 64) else {
            continue;
        };
        let current = min_cost_flow(g, &d, demand).expect("sampled D is feasible");
        let edge = rng.gen_range(0..g.edge_count());
        check_lemma1(g, demand, &d, &current, edge, &mut lemma1);
        check_lemma2(g, demand, &d, &current, &mut lemma2);
        if d.len() <= config.brute_arc_cap {
            check_solver_oracle(g, demand, &d, &Some(current), config, &mut solver_oracle)?;
        }
        let edge_index = rng.gen_range(1..=g.edge_count());
        check_step_inverse(g, demand, &d, edge_index, &mut step_inverse);
    }
    Ok(vec![
        lemma1.into_result(),
        lemma2.into_result(),
        solver_oracle.into_result(),
        step_inverse.into_result(),
    ])
}

/// Seeded random connected graph for verification fixtures. Requires
/// `n - 1 <= m <= n(n-1)/2`.
pub fn random_connected_graph(
    n: usize,
    m: usize,
    max_weight: u64,
    rng: &mut ChaCha8Rng,
) -> WeightedGraph {
    assert!(m + 1 >= n && m <= n * (n - 1) / 2, "edge count out of range");
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(m);
    // random spanning tree
    for v in 2..=n as u32 {
        pairs.push((rng.gen_range(1..v), v));
    }
    let mut extra: Vec<(u32, u32)> = Vec::new();
    for u in 1..=n as u32 {
        for v in u + 1..=n as u32 {
            extra.push((u, v));
        }
    }
    extra.shuffle(rng);
    for pair in extra {
        if pairs.len() >= m {
            break;
        }
        if !pairs.contains(&pair) && !pairs.contains(&(pair.1, pair.0)) {
            pairs.push(pair);
        }
    }
    let edges: Vec<(Arc, u64)> = pairs
        .into_iter()
        .map(|(u, v)| {
            let arc = if rng.gen_bool(0.5) {
                Arc::new(u, v)
            } else {
                Arc::new(v, u)
            };
            (arc, rng.gen_range(1..=max_weight))
        })
        .collect();
    WeightedGraph::new(n, edges).expect("random graph is simple")
}

/// Seeded random circulation demand with per-vertex values roughly in
/// `[-bound, bound]`.
pub fn random_circulation(n: usize, bound: i64, rng: &mut ChaCha8Rng) -> Demand {
    let mut values: Vec<i64> = (0..n - 1).map(|_| rng.gen_range(-bound..=bound)).collect();
    let sum: i64 = values.iter().sum();
    values.push(-sum);
    Demand::new(values).expect("balanced by construction")
}
