//! Reversible witness graphs.
//!
//! A witness graph is reversible when every path can be answered by a path
//! back with the opposite displacement. Three equivalent tests are provided:
//! the displacement monoid is a group, a total Kirchhoff function with zero
//! displacement exists, and (sampled) paths admit such return paths.

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::zero_kirchhoff_bound;
use crate::diophantine::DiophantineSystem;
use crate::error::{stage_failure, Result, VasError};
use crate::flow::{
    bounded_kirchhoff_for, cycle_with_parikh, displacement_monoid_member,
    simple_cycle_displacements, KirchhoffFunction, Limits,
};
use crate::graph::{GraphPath, SubreachabilityGraph};

fn require_witness(g: &SubreachabilityGraph) -> Result<()> {
    if g.is_witness() {
        Ok(())
    } else {
        Err(VasError::Precondition("graph is not strongly connected".into()))
    }
}

/// Balance rows (one per state) stacked on displacement rows (one per slot).
fn zero_flow_system(g: &SubreachabilityGraph) -> Result<DiophantineSystem> {
    let n = g.num_transitions();
    let mut rows = vec![vec![0i64; n]; g.num_states() + g.dim()];
    for (t, tr) in g.transitions().iter().enumerate() {
        rows[tr.target][t] += 1;
        rows[tr.source][t] -= 1;
        for (i, v) in tr.action.as_slice().iter().enumerate() {
            rows[g.num_states() + i][t] = *v;
        }
    }
    rows.retain(|r| r.iter().any(|&v| v != 0));
    if rows.is_empty() {
        rows.push(vec![0; n]);
    }
    DiophantineSystem::from_rows(&rows)
}

/// Whether the zero vector is the displacement of a total Kirchhoff function.
///
/// Sums of minimal zero-displacement Kirchhoff functions realise the union of
/// their supports, so it suffices that those supports cover every transition.
pub fn is_reversible(g: &SubreachabilityGraph, limits: &Limits) -> Result<bool> {
    require_witness(g)?;
    if g.num_transitions() == 0 {
        return Ok(true);
    }
    let generators = zero_flow_system(g)?.min_solutions(limits.solver_budget)?;
    let covered: BTreeSet<usize> = generators
        .iter()
        .flat_map(|v| v.iter().enumerate().filter(|(_, &c)| c > 0).map(|(t, _)| t))
        .collect();
    Ok(covered.len() == g.num_transitions())
}

/// Simple cycles covering every transition, summed.
fn covering_cycles(g: &SubreachabilityGraph) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; g.num_transitions()];
    for (t, tr) in g.transitions().iter().enumerate() {
        let back = g.find_path(tr.target, tr.source)?;
        counts[t] += 1;
        for &e in back.edges() {
            counts[e] += 1;
        }
    }
    Ok(counts)
}

/// A total Kirchhoff function with zero displacement and
/// `||mu||_inf <= (q(1+2a))^(d(d+1))`.
pub fn zero_total_kirchhoff(
    g: &SubreachabilityGraph,
    limits: &Limits,
) -> Result<KirchhoffFunction> {
    require_witness(g)?;
    let cover = KirchhoffFunction::new(g, covering_cycles(g)?)?;
    let z: Vec<i64> = cover.displacement(g)?.iter().map(|v| -v).collect();
    let correction = match bounded_kirchhoff_for(g, &z, limits) {
        Err(VasError::NotInMonoid) => return Err(VasError::NotReversible),
        other => other?,
    };
    let mu = cover.plus(&correction)?;
    if !mu.is_total() || mu.displacement(g)?.iter().any(|&v| v != 0) {
        return Err(stage_failure("zero-kirchhoff", "result is not a total zero flow"));
    }
    let bound = zero_kirchhoff_bound(g.num_states() as u64, g.dim() as u32, g.action_norm());
    if BigUint::from(mu.norm_inf()) > bound {
        return Err(stage_failure(
            "zero-kirchhoff",
            format!("count {} exceeds the bound {bound}", mu.norm_inf()),
        ));
    }
    Ok(mu)
}

/// Outcome of searching for a return path with opposite displacement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReturnSearch {
    Found,
    /// Search inside the radius completed without success.
    Missing,
    /// Node budget ran out.
    Exhausted,
}

/// Breadth-first search over `(state, displacement)` pairs for a path from
/// `from` to `to` with displacement `-z`, keeping partial sums of
/// `z + prefix` within `radius`.
pub fn search_return(
    g: &SubreachabilityGraph,
    from: usize,
    to: usize,
    z: &[i64],
    radius: u64,
    node_budget: usize,
) -> ReturnSearch {
    let start = (from, z.to_vec());
    let mut seen: HashSet<(usize, Vec<i64>)> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some((s, disp)) = queue.pop_front() {
        if s == to && disp.iter().all(|&v| v == 0) {
            return ReturnSearch::Found;
        }
        for &t in g.outgoing(s) {
            let tr = g.transition(t);
            let next: Vec<i64> = disp
                .iter()
                .zip(tr.action.as_slice())
                .map(|(a, b)| a + b)
                .collect();
            if next.iter().any(|v| v.unsigned_abs() > radius) {
                continue;
            }
            let node = (tr.target, next);
            if seen.contains(&node) {
                continue;
            }
            if seen.len() >= node_budget {
                return ReturnSearch::Exhausted;
            }
            seen.insert(node.clone());
            queue.push_back(node);
        }
    }
    ReturnSearch::Missing
}

/// Settings for the sampled path-reversal test.
#[derive(Clone, Copy, Debug)]
pub struct SamplingPolicy {
    pub random_walks: usize,
    pub seed: u64,
    pub node_budget: usize,
}

impl Default for SamplingPolicy {
    fn default() -> Self {
        SamplingPolicy {
            random_walks: 50,
            seed: 0,
            node_budget: 200_000,
        }
    }
}

/// Paths tried by the path-reversal test: a shortest path between every
/// ordered pair of distinct states, one total cycle and seeded random walks.
pub fn sample_paths(g: &SubreachabilityGraph, policy: &SamplingPolicy) -> Result<Vec<GraphPath>> {
    let q = g.num_states();
    let mut paths = Vec::new();
    for x in 0..q {
        for y in 0..q {
            if x != y {
                paths.push(g.find_path(x, y)?);
            }
        }
    }
    if g.num_transitions() > 0 {
        paths.push(cycle_with_parikh(g, &covering_cycles(g)?, 0)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    for _ in 0..policy.random_walks {
        let start = rng.gen_range(0..q);
        let steps = rng.gen_range(0..=2 * q);
        let mut edges = Vec::with_capacity(steps);
        let mut at = start;
        for _ in 0..steps {
            let out = g.outgoing(at);
            if out.is_empty() {
                break;
            }
            let t = out[rng.gen_range(0..out.len())];
            edges.push(t);
            at = g.transition(t).target;
        }
        paths.push(GraphPath::from_edges(g, start, edges)?);
    }
    Ok(paths)
}

/// The three characterizations of reversibility, each possibly inconclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Characterizations {
    pub subgroup: Option<bool>,
    pub zero_total: Option<bool>,
    pub path_reversal: Option<bool>,
}

impl Characterizations {
    /// `None` when the algebraic tests are inconclusive; otherwise whether
    /// they agree and the sampled test does not contradict them.
    pub fn verdict(&self) -> Option<bool> {
        let (a, b) = (self.subgroup?, self.zero_total?);
        Some(a == b && self.path_reversal.is_none_or(|c| c == b))
    }
}

fn conclusive(r: Result<bool>) -> Result<Option<bool>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(VasError::BudgetExceeded { .. } | VasError::CycleCapExceeded(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn subgroup_test(g: &SubreachabilityGraph, limits: &Limits) -> Result<bool> {
    for (z, _) in simple_cycle_displacements(g, limits)? {
        let neg: Vec<i64> = z.iter().map(|v| -v).collect();
        if !displacement_monoid_member(g, &neg, limits)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn path_reversal_test(g: &SubreachabilityGraph, policy: &SamplingPolicy) -> Result<Option<bool>> {
    let reach = 2 * g.num_states() as u64 * g.action_norm();
    let mut exhausted = false;
    for p in sample_paths(g, policy)? {
        let z = p.displacement(g)?;
        let radius = z.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) + reach;
        match search_return(g, p.target(), p.source(), &z, radius, policy.node_budget) {
            ReturnSearch::Found => {}
            ReturnSearch::Missing => return Ok(Some(false)),
            ReturnSearch::Exhausted => exhausted = true,
        }
    }
    Ok(if exhausted { None } else { Some(true) })
}

/// Evaluates all three characterizations on a witness graph.
pub fn characterizations(
    g: &SubreachabilityGraph,
    limits: &Limits,
    policy: &SamplingPolicy,
) -> Result<Characterizations> {
    require_witness(g)?;
    Ok(Characterizations {
        subgroup: conclusive(subgroup_test(g, limits))?,
        zero_total: conclusive(is_reversible(g, limits))?,
        path_reversal: path_reversal_test(g, policy)?,
    })
}

/// `Some(true)` when the characterizations agree, `None` when inconclusive.
pub fn characterizations_agree(g: &SubreachabilityGraph, limits: &Limits) -> Result<Option<bool>> {
    Ok(characterizations(g, limits, &SamplingPolicy::default())?.verdict())
}
