//! Kirchhoff functions, Euler decompositions and displacement monoids.
//!
//! A Kirchhoff function assigns a count to every transition so that inflow
//! equals outflow at every state. Such functions are exactly the sums of
//! Parikh images of cycles; total ones (every count positive) are exactly
//! Parikh images of total cycles.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use crate::bounds::kirchhoff_bound;
use crate::diophantine::{monoid_combination, DEFAULT_SOLVER_BUDGET};
use crate::error::{stage_failure, Result, VasError};
use crate::graph::{GraphPath, ParikhImage, SubreachabilityGraph, DEFAULT_CYCLE_CAP};
use crate::vector::{Action, Configuration};

/// Resource limits shared by the enumeration-based operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub cycle_cap: usize,
    pub solver_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            cycle_cap: DEFAULT_CYCLE_CAP,
            solver_budget: DEFAULT_SOLVER_BUDGET,
        }
    }
}

/// A balanced assignment of counts to the transitions of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KirchhoffFunction {
    counts: Vec<u64>,
}

impl KirchhoffFunction {
    pub fn new(g: &SubreachabilityGraph, counts: Vec<u64>) -> Result<Self> {
        if let Some(state) = imbalance(g, &counts)? {
            return Err(VasError::FlowImbalance(state));
        }
        Ok(KirchhoffFunction { counts })
    }

    pub fn zero(g: &SubreachabilityGraph) -> Self {
        KirchhoffFunction {
            counts: vec![0; g.num_transitions()],
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, t: usize) -> u64 {
        self.counts[t]
    }

    pub fn is_total(&self) -> bool {
        self.counts.iter().all(|&c| c >= 1)
    }

    pub fn norm_inf(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `sum_t mu(t) * action(t)`, over all `d` coordinates.
    pub fn displacement(&self, g: &SubreachabilityGraph) -> Result<Vec<i64>> {
        weighted_displacement(g, &self.counts)
    }

    pub fn plus(&self, other: &KirchhoffFunction) -> Result<KirchhoffFunction> {
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(a, b)| a.checked_add(*b).ok_or(VasError::Overflow))
            .collect::<Result<_>>()?;
        Ok(KirchhoffFunction { counts })
    }

    pub fn scaled(&self, k: u64) -> Result<KirchhoffFunction> {
        let counts = self
            .counts
            .iter()
            .map(|a| a.checked_mul(k).ok_or(VasError::Overflow))
            .collect::<Result<_>>()?;
        Ok(KirchhoffFunction { counts })
    }

    pub fn into_parikh(self) -> ParikhImage {
        ParikhImage::from_counts(self.counts)
    }
}

fn weighted_displacement(g: &SubreachabilityGraph, counts: &[u64]) -> Result<Vec<i64>> {
    let mut z = vec![0i64; g.dim()];
    for (t, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let c = i64::try_from(c).map_err(|_| VasError::Overflow)?;
        for (zi, ai) in z.iter_mut().zip(g.transition(t).action.as_slice()) {
            *zi = ai
                .checked_mul(c)
                .and_then(|p| zi.checked_add(p))
                .ok_or(VasError::Overflow)?;
        }
    }
    Ok(z)
}

/// First state whose inflow differs from its outflow.
fn imbalance(g: &SubreachabilityGraph, counts: &[u64]) -> Result<Option<usize>> {
    if counts.len() != g.num_transitions() {
        return Err(VasError::DimensionMismatch {
            expected: g.num_transitions(),
            found: counts.len(),
        });
    }
    let mut balance = vec![0i128; g.num_states()];
    for (t, &c) in counts.iter().enumerate() {
        let tr = g.transition(t);
        balance[tr.target] += c as i128;
        balance[tr.source] -= c as i128;
    }
    Ok(balance.iter().position(|&b| b != 0))
}

/// Flow balance at every state.
pub fn is_kirchhoff(g: &SubreachabilityGraph, counts: &[u64]) -> Result<bool> {
    Ok(imbalance(g, counts)?.is_none())
}

/// Turns `(x, a, y) -> count` pairs into a count vector indexed by transition.
pub fn counts_from_triples<'a>(
    g: &SubreachabilityGraph,
    entries: impl IntoIterator<Item = (&'a Configuration, &'a Action, &'a Configuration, u64)>,
) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; g.num_transitions()];
    for (x, a, y, c) in entries {
        let t = g
            .state_index(x)
            .and_then(|s| g.transition_from(s, a))
            .filter(|&t| g.state(g.transition(t).target) == y)
            .ok_or_else(|| VasError::NotATransition(format!("({x}, {a}, {y})")))?;
        counts[t] += c;
    }
    Ok(counts)
}

/// Splits a count vector into simple cycles whose Parikh images sum to it.
///
/// Walks along transitions with remaining count until a state repeats, cuts
/// out that cycle and subtracts it. A walk that gets stuck proves the flow
/// unbalanced.
pub fn euler_decompose(g: &SubreachabilityGraph, counts: &[u64]) -> Result<Vec<GraphPath>> {
    if counts.len() != g.num_transitions() {
        return Err(VasError::DimensionMismatch {
            expected: g.num_transitions(),
            found: counts.len(),
        });
    }
    let mut remaining = counts.to_vec();
    let mut cycles = Vec::new();
    while let Some(first) = remaining.iter().position(|&c| c > 0) {
        let start = g.transition(first).source;
        let mut position = BTreeMap::from([(start, 0usize)]);
        let mut edges: Vec<usize> = Vec::new();
        let mut at = start;
        loop {
            let t = g
                .outgoing(at)
                .iter()
                .copied()
                .find(|&t| remaining[t] > 0)
                .ok_or(VasError::FlowImbalance(at))?;
            edges.push(t);
            at = g.transition(t).target;
            if let Some(&p) = position.get(&at) {
                let cycle = edges.split_off(p);
                for &e in &cycle {
                    remaining[e] -= 1;
                }
                cycles.push(GraphPath::from_edges(g, at, cycle)?);
                break;
            }
            position.insert(at, edges.len());
        }
    }
    Ok(cycles)
}

/// Hierholzer's algorithm on a multigraph given by `(source, target)` edges
/// with multiplicities. Returns the edge sequence of a closed walk from
/// `start` using every edge exactly `counts[e]` times, or `None` when the
/// support is not connected to `start` or some state is unbalanced.
pub(crate) fn eulerian_circuit(
    num_states: usize,
    edges: &[(usize, usize)],
    counts: &[u64],
    start: usize,
) -> Option<Vec<usize>> {
    let mut adjacency = vec![Vec::new(); num_states];
    let mut balance = vec![0i128; num_states];
    for (e, &(s, t)) in edges.iter().enumerate() {
        adjacency[s].push(e);
        balance[s] += counts[e] as i128;
        balance[t] -= counts[e] as i128;
    }
    if balance.iter().any(|&b| b != 0) {
        return None;
    }
    let total: u64 = counts.iter().sum();
    let mut remaining = counts.to_vec();
    let mut cursor = vec![0usize; num_states];
    let mut stack: Vec<(usize, Option<usize>)> = vec![(start, None)];
    let mut circuit = Vec::with_capacity(total as usize);
    while let Some(&(v, _)) = stack.last() {
        while cursor[v] < adjacency[v].len() && remaining[adjacency[v][cursor[v]]] == 0 {
            cursor[v] += 1;
        }
        if let Some(&e) = adjacency[v].get(cursor[v]) {
            remaining[e] -= 1;
            stack.push((edges[e].1, Some(e)));
        } else {
            let (_, via) = stack.pop().expect("stack is non-empty");
            if let Some(e) = via {
                circuit.push(e);
            }
        }
    }
    circuit.reverse();
    (circuit.len() as u64 == total).then_some(circuit)
}

/// A cycle from `start` whose Parikh image is the total Kirchhoff function `mu`.
pub fn euler_total_cycle(
    g: &SubreachabilityGraph,
    mu: &[u64],
    start: usize,
) -> Result<GraphPath> {
    if start >= g.num_states() {
        return Err(VasError::InvalidGraph(format!("no state with index {start}")));
    }
    if let Some(state) = imbalance(g, mu)? {
        return Err(VasError::FlowImbalance(state));
    }
    if mu.contains(&0) {
        return Err(VasError::NotTotal);
    }
    cycle_with_parikh(g, mu, start)
}

/// Eulerian circuit through the support of a balanced `counts` vector.
pub(crate) fn cycle_with_parikh(
    g: &SubreachabilityGraph,
    counts: &[u64],
    start: usize,
) -> Result<GraphPath> {
    let edges: Vec<(usize, usize)> = g
        .transitions()
        .iter()
        .map(|t| (t.source, t.target))
        .collect();
    let circuit = eulerian_circuit(g.num_states(), &edges, counts, start)
        .ok_or_else(|| VasError::Precondition("support is not connected to the start".into()))?;
    GraphPath::from_edges(g, start, circuit)
}

/// Distinct non-zero simple-cycle displacements, each with the Parikh image
/// of the first simple cycle realising it. Sorted by displacement.
pub fn simple_cycle_displacements(
    g: &SubreachabilityGraph,
    limits: &Limits,
) -> Result<Vec<(Vec<i64>, ParikhImage)>> {
    let mut table: BTreeMap<Vec<i64>, ParikhImage> = BTreeMap::new();
    for cycle in g.simple_cycles(limits.cycle_cap)? {
        let z = cycle.displacement(g)?;
        if z.iter().all(|&v| v == 0) {
            continue;
        }
        table.entry(z).or_insert_with(|| cycle.parikh(g));
    }
    Ok(table.into_iter().collect())
}

fn monoid_solution(
    g: &SubreachabilityGraph,
    z: &[i64],
    limits: &Limits,
) -> Result<Option<KirchhoffFunction>> {
    if z.len() != g.dim() {
        return Err(VasError::DimensionMismatch {
            expected: g.dim(),
            found: z.len(),
        });
    }
    if z.iter().all(|&v| v == 0) {
        return Ok(Some(KirchhoffFunction::zero(g)));
    }
    let generators = simple_cycle_displacements(g, limits)?;
    let columns: Vec<Vec<i64>> = generators.iter().map(|(z, _)| z.clone()).collect();
    let Some(coefficients) = monoid_combination(g.dim(), &columns, z, limits.solver_budget)? else {
        return Ok(None);
    };
    let mut counts = vec![0u64; g.num_transitions()];
    for (k, (_, parikh)) in coefficients.iter().zip(&generators) {
        for (c, p) in counts.iter_mut().zip(parikh.counts()) {
            *c += k * p;
        }
    }
    Ok(Some(KirchhoffFunction::new(g, counts)?))
}

/// Whether `z` is a finite sum of cycle displacements of `g`.
pub fn displacement_monoid_member(
    g: &SubreachabilityGraph,
    z: &[i64],
    limits: &Limits,
) -> Result<bool> {
    Ok(monoid_solution(g, z, limits)?.is_some())
}

/// A Kirchhoff function with displacement `z` and
/// `||mu||_inf <= (q^(d+1) a (1+2a)^d + m)^d`.
pub fn bounded_kirchhoff_for(
    g: &SubreachabilityGraph,
    z: &[i64],
    limits: &Limits,
) -> Result<KirchhoffFunction> {
    let mu = monoid_solution(g, z, limits)?.ok_or(VasError::NotInMonoid)?;
    if mu.displacement(g)? != z {
        return Err(stage_failure("kirchhoff", "displacement differs from the target"));
    }
    let m = z.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    let bound = kirchhoff_bound(g.num_states() as u64, g.dim() as u32, g.action_norm(), m);
    if BigUint::from(mu.norm_inf()) > bound {
        return Err(stage_failure(
            "kirchhoff",
            format!("count {} exceeds the bound {bound}", mu.norm_inf()),
        ));
    }
    Ok(mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::{IndexSet, Slot};

    fn cfg(values: &[i64]) -> Configuration {
        Configuration::from_ints(values).unwrap()
    }

    fn act(values: &[i64]) -> Action {
        Action::new(values.to_vec())
    }

    fn projected_figure() -> SubreachabilityGraph {
        let t = |x: &[i64], a: &[i64], y: &[i64]| (cfg(x), act(a), cfg(y));
        SubreachabilityGraph::new(
            [cfg(&[1, 1, 0]), cfg(&[0, 2, 1]), cfg(&[1, 0, 1]), cfg(&[0, 1, 2])],
            [
                t(&[1, 1, 0], &[-1, 1, 1], &[0, 2, 1]),
                t(&[0, 2, 1], &[1, -1, -1], &[1, 1, 0]),
                t(&[0, 1, 2], &[1, -1, -1], &[1, 0, 1]),
                t(&[0, 2, 1], &[0, -1, 1], &[0, 1, 2]),
                t(&[1, 0, 1], &[0, 1, -1], &[1, 1, 0]),
            ],
        )
        .unwrap()
        .project(&[1, 2].into_iter().collect::<IndexSet>())
        .unwrap()
    }

    fn star_state(g: &SubreachabilityGraph, first: i64) -> usize {
        g.state_index(
            &Configuration::from_slots(vec![Slot::Int(first), Slot::Star, Slot::Star]).unwrap(),
        )
        .unwrap()
    }

    /// Index of the transition leaving state `s` with action `a`.
    fn edge(g: &SubreachabilityGraph, s: usize, a: &[i64]) -> usize {
        g.transition_from(s, &act(a)).unwrap()
    }

    #[test]
    fn kirchhoff_iff_the_two_crossing_counts_agree() {
        let g = projected_figure();
        let (one, zero) = (star_state(&g, 1), star_state(&g, 0));
        let t1 = edge(&g, one, &[-1, 1, 1]);
        let t2 = edge(&g, zero, &[1, -1, -1]);
        for c1 in 0..3 {
            for c2 in 0..3 {
                let mut counts = vec![2; 4];
                counts[t1] = c1;
                counts[t2] = c2;
                assert_eq!(is_kirchhoff(&g, &counts).unwrap(), c1 == c2);
            }
        }
        assert!(is_kirchhoff(&g, &[0; 4]).unwrap());
        assert!(is_kirchhoff(&g, &[0; 3]).is_err());
    }

    #[test]
    fn counts_from_unknown_triple_is_rejected() {
        let g = projected_figure();
        let s = g.state(0).clone();
        let err = counts_from_triples(&g, [(&s, &act(&[5, 5, 5]), &s, 1)]);
        assert!(matches!(err, Err(VasError::NotATransition(_))));
    }

    #[test]
    fn decompose_examples() {
        let g = projected_figure();
        assert!(euler_decompose(&g, &[0; 4]).unwrap().is_empty());
        let (one, zero) = (star_state(&g, 1), star_state(&g, 0));
        let mut counts = vec![0; 4];
        counts[edge(&g, one, &[-1, 1, 1])] = 1;
        counts[edge(&g, zero, &[1, -1, -1])] = 1;
        let cycles = euler_decompose(&g, &counts).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].parikh(&g).counts(), counts.as_slice());
        counts[edge(&g, one, &[-1, 1, 1])] = 2;
        assert!(matches!(
            euler_decompose(&g, &counts),
            Err(VasError::FlowImbalance(_))
        ));
    }

    #[test]
    fn total_cycle_examples() {
        let g = projected_figure();
        let start = star_state(&g, 1);
        let cycle = euler_total_cycle(&g, &[1; 4], start).unwrap();
        assert_eq!(cycle.len(), 4);
        assert!(cycle.is_cycle());
        assert_eq!(cycle.source(), start);
        assert_eq!(cycle.parikh(&g).counts(), &[1; 4]);

        let s = Configuration::from_slots(vec![Slot::Star]).unwrap();
        let lp = SubreachabilityGraph::new([s.clone()], [(s.clone(), act(&[1]), s)]).unwrap();
        let c = euler_total_cycle(&lp, &[3], 0).unwrap();
        assert_eq!(c.label(&lp), vec![act(&[1]); 3]);

        let mut partial = vec![1; 4];
        partial[edge(&g, start, &[0, 1, -1])] = 0;
        assert_eq!(euler_total_cycle(&g, &partial, start), Err(VasError::NotTotal));
    }

    #[test]
    fn displacement_monoid_of_projected_figure() {
        let g = projected_figure();
        let limits = Limits::default();
        assert!(displacement_monoid_member(&g, &[0, 1, -1], &limits).unwrap());
        assert!(displacement_monoid_member(&g, &[0, -3, 3], &limits).unwrap());
        assert!(!displacement_monoid_member(&g, &[1, 0, 0], &limits).unwrap());
        assert!(displacement_monoid_member(&g, &[0, 0, 0], &limits).unwrap());
    }

    #[test]
    fn bounded_kirchhoff_on_projected_figure() {
        let g = projected_figure();
        let limits = Limits::default();
        let mu = bounded_kirchhoff_for(&g, &[0, -1, 1], &limits).unwrap();
        assert_eq!(mu.displacement(&g).unwrap(), vec![0, -1, 1]);
        let lp = edge(&g, star_state(&g, 0), &[0, -1, 1]);
        let mut expected = vec![0; 4];
        expected[lp] = 1;
        assert_eq!(mu.counts(), expected.as_slice());
        let zero = bounded_kirchhoff_for(&g, &[0, 0, 0], &limits).unwrap();
        assert_eq!(zero.total_count(), 0);
        assert_eq!(
            bounded_kirchhoff_for(&g, &[1, 0, 0], &limits),
            Err(VasError::NotInMonoid)
        );
    }
}
