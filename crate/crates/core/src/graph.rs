//! Subreachability graphs, witness graphs, paths, cycles and Parikh images.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Result, VasError};
use crate::vector::{displacement, Action, Configuration, IndexSet, Run};

/// Default cap on the number of simple cycles enumerated before giving up.
pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

/// A transition `(source, action, target)` with endpoints given as state indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub source: usize,
    pub action: Action,
    pub target: usize,
}

/// A finite graph of configurations sharing one projection set, whose edges
/// are single steps of the system.
///
/// States are kept sorted in the canonical order (lexicographic, `*`
/// greatest); transitions are sorted by `(source, action, target)`.
#[derive(Clone, Debug)]
pub struct SubreachabilityGraph {
    dim: usize,
    projected: IndexSet,
    states: Vec<Configuration>,
    index: HashMap<Configuration, usize>,
    transitions: Vec<Transition>,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
}

impl PartialEq for SubreachabilityGraph {
    fn eq(&self, other: &Self) -> bool {
        self.states == other.states && self.transitions == other.transitions
    }
}

impl Eq for SubreachabilityGraph {}

impl SubreachabilityGraph {
    /// Builds a graph from states and `(x, a, y)` triples. Duplicates collapse.
    pub fn new(
        states: impl IntoIterator<Item = Configuration>,
        transitions: impl IntoIterator<Item = (Configuration, Action, Configuration)>,
    ) -> Result<Self> {
        let states: BTreeSet<Configuration> = states.into_iter().collect();
        let states: Vec<Configuration> = states.into_iter().collect();
        let first = states
            .first()
            .ok_or_else(|| VasError::InvalidGraph("a graph needs at least one state".into()))?;
        let dim = first.dim();
        let projected = first.projected();
        for s in &states {
            if s.dim() != dim {
                return Err(VasError::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
            if s.projected() != projected {
                return Err(VasError::InvalidGraph(
                    "states have different projected components".into(),
                ));
            }
        }
        let index: HashMap<Configuration, usize> = states
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let mut edges = BTreeSet::new();
        for (x, a, y) in transitions {
            let lookup = |c: &Configuration| {
                index.get(c).copied().ok_or_else(|| {
                    VasError::InvalidGraph(format!("transition endpoint {c} is not a state"))
                })
            };
            let (source, target) = (lookup(&x)?, lookup(&y)?);
            if a.dim() != dim {
                return Err(VasError::DimensionMismatch {
                    expected: dim,
                    found: a.dim(),
                });
            }
            if x.step(&a)?.as_ref() != Some(&y) {
                return Err(VasError::InvalidGraph(format!(
                    "({x}, {a}, {y}) is not a step of the system"
                )));
            }
            edges.insert(Transition {
                source,
                action: a,
                target,
            });
        }
        let transitions: Vec<Transition> = edges.into_iter().collect();
        let mut outgoing = vec![Vec::new(); states.len()];
        let mut incoming = vec![Vec::new(); states.len()];
        for (t, tr) in transitions.iter().enumerate() {
            outgoing[tr.source].push(t);
            incoming[tr.target].push(t);
        }
        Ok(SubreachabilityGraph {
            dim,
            projected,
            states,
            index,
            transitions,
            outgoing,
            incoming,
        })
    }

    /// Builds a graph from a state list and transitions that refer to
    /// positions in that list.
    pub fn from_indexed(
        states: Vec<Configuration>,
        transitions: &[(usize, Action, usize)],
    ) -> Result<Self> {
        let triples = transitions
            .iter()
            .map(|(s, a, t)| {
                let get = |i: usize| {
                    states.get(i).cloned().ok_or_else(|| {
                        VasError::InvalidGraph(format!("state index {} out of range", i + 1))
                    })
                };
                Ok((get(*s)?, a.clone(), get(*t)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(states, triples)
    }

    /// The graph whose states are the configurations of `run` and whose
    /// transitions are its steps.
    pub fn from_run(run: &Run) -> Result<Self> {
        let configs = run.configurations();
        let triples = run
            .word()
            .iter()
            .enumerate()
            .map(|(j, a)| (configs[j].clone(), a.clone(), configs[j + 1].clone()));
        Self::new(configs.iter().cloned(), triples)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The projection set shared by all states.
    pub fn projected(&self) -> &IndexSet {
        &self.projected
    }

    pub fn is_standard(&self) -> bool {
        self.projected.is_empty()
    }

    pub fn states(&self) -> &[Configuration] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &Configuration {
        &self.states[i]
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, c: &Configuration) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, t: usize) -> &Transition {
        &self.transitions[t]
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn outgoing(&self, state: usize) -> &[usize] {
        &self.outgoing[state]
    }

    pub fn incoming(&self, state: usize) -> &[usize] {
        &self.incoming[state]
    }

    /// The transition leaving `source` with `action`, if any.
    pub fn transition_from(&self, source: usize, action: &Action) -> Option<usize> {
        self.outgoing[source]
            .iter()
            .copied()
            .find(|&t| self.transitions[t].action == *action)
    }

    /// Largest action norm over the transitions.
    pub fn action_norm(&self) -> u64 {
        self.transitions
            .iter()
            .map(|t| t.action.norm_inf())
            .max()
            .unwrap_or(0)
    }

    /// Distinct actions labelling transitions.
    pub fn actions(&self) -> BTreeSet<Action> {
        self.transitions.iter().map(|t| t.action.clone()).collect()
    }

    /// Strong connectivity of the state graph. A single state counts.
    pub fn is_witness(&self) -> bool {
        let n = self.num_states();
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(v) = queue.pop_front() {
                let edges = if forward {
                    &self.outgoing[v]
                } else {
                    &self.incoming[v]
                };
                for &t in edges {
                    let tr = &self.transitions[t];
                    let w = if forward { tr.target } else { tr.source };
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(true) && reach(false)
    }

    /// `pi_L(G)`.
    pub fn project(&self, l: &IndexSet) -> Result<SubreachabilityGraph> {
        let states = self
            .states
            .iter()
            .map(|s| s.project(l))
            .collect::<Result<Vec<_>>>()?;
        let triples = self
            .transitions
            .iter()
            .map(|t| {
                (
                    states[t.source].clone(),
                    t.action.clone(),
                    states[t.target].clone(),
                )
            })
            .collect::<Vec<_>>();
        Self::new(states, triples)
    }

    /// The graph with every transition `(x, a, y)` replaced by `(y, -a, x)`.
    pub fn reversed(&self) -> SubreachabilityGraph {
        let triples = self
            .transitions
            .iter()
            .map(|t| {
                (
                    self.states[t.target].clone(),
                    t.action.negated(),
                    self.states[t.source].clone(),
                )
            })
            .collect::<Vec<_>>();
        Self::new(self.states.clone(), triples).expect("reversal preserves graph invariants")
    }

    /// A shortest path from `from` to `to`; BFS explores transitions in
    /// canonical order so the result is deterministic.
    pub fn find_path(&self, from: usize, to: usize) -> Result<GraphPath> {
        self.check_state(from)?;
        self.check_state(to)?;
        if from == to {
            return Ok(GraphPath::empty(from));
        }
        let parents = self.bfs_parents(from);
        if parents[to].is_none() {
            return Err(VasError::NoPath { from, to });
        }
        Ok(self.path_from_parents(&parents, from, to))
    }

    /// BFS tree from `from`: `parents[v]` is the transition used to reach `v`.
    pub(crate) fn bfs_parents(&self, from: usize) -> Vec<Option<usize>> {
        let mut parents = vec![None; self.num_states()];
        let mut seen = vec![false; self.num_states()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for &t in &self.outgoing[v] {
                let w = self.transitions[t].target;
                if !seen[w] {
                    seen[w] = true;
                    parents[w] = Some(t);
                    queue.push_back(w);
                }
            }
        }
        parents
    }

    pub(crate) fn path_from_parents(
        &self,
        parents: &[Option<usize>],
        from: usize,
        to: usize,
    ) -> GraphPath {
        let mut edges = Vec::new();
        let mut v = to;
        while v != from {
            let t = parents[v].expect("state reached by BFS");
            edges.push(t);
            v = self.transitions[t].source;
        }
        edges.reverse();
        GraphPath {
            source: from,
            target: to,
            edges,
        }
    }

    /// BFS distances from `from` (`None` when unreachable).
    pub fn distances(&self, from: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_states()];
        dist[from] = Some(0);
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].expect("queued states have a distance");
            for &t in &self.outgoing[v] {
                let w = self.transitions[t].target;
                if dist[w].is_none() {
                    dist[w] = Some(dv + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// All simple cycles, each reported once, anchored at its least state.
    ///
    /// Johnson's circuit enumeration restricted, for each anchor `s`, to the
    /// states `>= s`. Parallel transitions yield distinct cycles.
    pub fn simple_cycles(&self, cap: usize) -> Result<Vec<GraphPath>> {
        let n = self.num_states();
        let mut out = Vec::new();
        for s in 0..n {
            let mut search = Johnson {
                graph: self,
                anchor: s,
                blocked: vec![false; n],
                blocked_by: vec![BTreeSet::new(); n],
                stack: Vec::new(),
                out: &mut out,
                cap,
            };
            search.circuit(s)?;
        }
        Ok(out)
    }

    fn check_state(&self, i: usize) -> Result<()> {
        if i < self.num_states() {
            Ok(())
        } else {
            Err(VasError::InvalidGraph(format!("no state with index {i}")))
        }
    }
}

struct Johnson<'a> {
    graph: &'a SubreachabilityGraph,
    anchor: usize,
    blocked: Vec<bool>,
    blocked_by: Vec<BTreeSet<usize>>,
    stack: Vec<usize>,
    out: &'a mut Vec<GraphPath>,
    cap: usize,
}

impl Johnson<'_> {
    fn circuit(&mut self, v: usize) -> Result<bool> {
        let mut found = false;
        self.blocked[v] = true;
        for &t in self.graph.outgoing(v) {
            let w = self.graph.transitions[t].target;
            if w < self.anchor {
                continue;
            }
            if w == self.anchor {
                if self.out.len() >= self.cap {
                    return Err(VasError::CycleCapExceeded(self.cap));
                }
                let mut edges = self.stack.clone();
                edges.push(t);
                self.out.push(GraphPath {
                    source: self.anchor,
                    target: self.anchor,
                    edges,
                });
                found = true;
            } else if !self.blocked[w] {
                self.stack.push(t);
                if self.circuit(w)? {
                    found = true;
                }
                self.stack.pop();
            }
        }
        if found {
            self.unblock(v);
        } else {
            for &t in self.graph.outgoing(v) {
                let w = self.graph.transitions[t].target;
                if w >= self.anchor {
                    self.blocked_by[w].insert(v);
                }
            }
        }
        Ok(found)
    }

    fn unblock(&mut self, v: usize) {
        let mut pending = vec![v];
        while let Some(u) = pending.pop() {
            if !self.blocked[u] {
                continue;
            }
            self.blocked[u] = false;
            pending.extend(std::mem::take(&mut self.blocked_by[u]));
        }
    }
}

/// A path `t1 .. tk` in a graph, identified by transition indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphPath {
    source: usize,
    target: usize,
    edges: Vec<usize>,
}

impl GraphPath {
    pub fn empty(state: usize) -> Self {
        GraphPath {
            source: state,
            target: state,
            edges: Vec::new(),
        }
    }

    /// Checks that consecutive transitions chain.
    pub fn from_edges(g: &SubreachabilityGraph, source: usize, edges: Vec<usize>) -> Result<Self> {
        g.check_state(source)?;
        let mut at = source;
        for &t in &edges {
            let tr = g
                .transitions
                .get(t)
                .ok_or_else(|| VasError::InvalidPath(format!("no transition {t}")))?;
            if tr.source != at {
                return Err(VasError::InvalidPath(format!(
                    "transition {t} does not leave state {at}"
                )));
            }
            at = tr.target;
        }
        Ok(GraphPath {
            source,
            target: at,
            edges,
        })
    }

    /// The unique path from `source` labelled by `word`, if it exists.
    pub fn follow(g: &SubreachabilityGraph, source: usize, word: &[Action]) -> Option<Self> {
        let mut at = source;
        let mut edges = Vec::with_capacity(word.len());
        for a in word {
            let t = g.transition_from(at, a)?;
            edges.push(t);
            at = g.transitions[t].target;
        }
        Some(GraphPath {
            source,
            target: at,
            edges,
        })
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_cycle(&self) -> bool {
        self.source == self.target
    }

    pub fn label(&self, g: &SubreachabilityGraph) -> Vec<Action> {
        self.edges
            .iter()
            .map(|&t| g.transitions[t].action.clone())
            .collect()
    }

    /// State indices visited, `source` first.
    pub fn state_sequence(&self, g: &SubreachabilityGraph) -> Vec<usize> {
        let mut seq = Vec::with_capacity(self.edges.len() + 1);
        seq.push(self.source);
        seq.extend(self.edges.iter().map(|&t| g.transitions[t].target));
        seq
    }

    pub fn configurations(&self, g: &SubreachabilityGraph) -> Vec<Configuration> {
        self.state_sequence(g)
            .into_iter()
            .map(|s| g.states[s].clone())
            .collect()
    }

    /// The run induced by the path.
    pub fn to_run(&self, g: &SubreachabilityGraph) -> Run {
        Run::execute(&g.states[self.source], &self.label(g))
            .ok()
            .flatten()
            .expect("graph paths induce runs")
    }

    pub fn displacement(&self, g: &SubreachabilityGraph) -> Result<Vec<i64>> {
        displacement(g.dim(), &self.label(g))
    }

    pub fn parikh(&self, g: &SubreachabilityGraph) -> ParikhImage {
        let mut counts = vec![0u64; g.num_transitions()];
        for &t in &self.edges {
            counts[t] += 1;
        }
        ParikhImage { counts }
    }

    /// A cycle with no repeated state except its endpoints.
    pub fn is_simple(&self, g: &SubreachabilityGraph) -> bool {
        if !self.is_cycle() || self.is_empty() {
            return false;
        }
        let seq = self.state_sequence(g);
        let inner = &seq[..seq.len() - 1];
        inner.iter().collect::<BTreeSet<_>>().len() == inner.len()
    }

    pub fn concat(&self, other: &GraphPath) -> Result<GraphPath> {
        if self.target != other.source {
            return Err(VasError::InvalidPath("paths do not chain".into()));
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Ok(GraphPath {
            source: self.source,
            target: other.target,
            edges,
        })
    }

    pub fn repeat(&self, n: usize) -> Result<GraphPath> {
        if !self.is_cycle() {
            return Err(VasError::InvalidPath("only cycles can be repeated".into()));
        }
        Ok(GraphPath {
            source: self.source,
            target: self.target,
            edges: self.edges.repeat(n),
        })
    }

    /// Splits a cycle into simple cycles by repeatedly cutting out the first
    /// repetition of a state.
    pub fn simple_decomposition(&self, g: &SubreachabilityGraph) -> Result<Vec<GraphPath>> {
        if !self.is_cycle() {
            return Err(VasError::InvalidPath("not a cycle".into()));
        }
        let mut pieces = Vec::new();
        // stack of (state, edge that led to it)
        let mut states = vec![self.source];
        let mut edges: Vec<usize> = Vec::new();
        let mut position: HashMap<usize, usize> = HashMap::from([(self.source, 0)]);
        for &t in &self.edges {
            let w = g.transitions[t].target;
            edges.push(t);
            if let Some(&p) = position.get(&w) {
                let cut: Vec<usize> = edges.drain(p..).collect();
                for s in states.drain(p + 1..) {
                    position.remove(&s);
                }
                pieces.push(GraphPath {
                    source: w,
                    target: w,
                    edges: cut,
                });
            } else {
                position.insert(w, states.len());
                states.push(w);
            }
        }
        debug_assert!(edges.is_empty());
        Ok(pieces)
    }
}

/// Occurrence counts of transitions, indexed like the graph's transitions.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParikhImage {
    counts: Vec<u64>,
}

impl ParikhImage {
    pub fn zero(num_transitions: usize) -> Self {
        ParikhImage {
            counts: vec![0; num_transitions],
        }
    }

    pub fn from_counts(counts: Vec<u64>) -> Self {
        ParikhImage { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn into_counts(self) -> Vec<u64> {
        self.counts
    }

    pub fn get(&self, t: usize) -> u64 {
        self.counts[t]
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(t, _)| t)
            .collect()
    }

    pub fn add_assign(&mut self, other: &ParikhImage) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }
}

/// `graph_from_run`.
pub fn graph_from_run(run: &Run) -> Result<SubreachabilityGraph> {
    SubreachabilityGraph::from_run(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::Slot;

    fn cfg(values: &[i64]) -> Configuration {
        Configuration::from_ints(values).unwrap()
    }

    fn act(values: &[i64]) -> Action {
        Action::new(values.to_vec())
    }

    fn figure_graph() -> SubreachabilityGraph {
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
    }

    fn projected_figure() -> SubreachabilityGraph {
        figure_graph().project(&[1, 2].into_iter().collect()).unwrap()
    }

    #[test]
    fn figure_graph_is_witness() {
        let g = figure_graph();
        assert_eq!(g.num_states(), 4);
        assert_eq!(g.num_transitions(), 5);
        assert!(g.is_witness());
    }

    #[test]
    fn projection_of_figure_graph() {
        let p = projected_figure();
        let star = |v| Configuration::from_slots(vec![Slot::Int(v), Slot::Star, Slot::Star]);
        assert_eq!(p.states(), &[star(0).unwrap(), star(1).unwrap()]);
        assert_eq!(p.num_transitions(), 4);
        let loops = p
            .transitions()
            .iter()
            .filter(|t| t.source == t.target)
            .count();
        assert_eq!(loops, 2);
        assert!(p.is_witness());
        let g = figure_graph();
        assert_eq!(g.project(&IndexSet::new()).unwrap(), g);
    }

    #[test]
    fn graph_from_runs() {
        let r = Run::execute(&cfg(&[2, 0]), &[act(&[-1, 1]), act(&[-1, 1])])
            .unwrap()
            .unwrap();
        let g = graph_from_run(&r).unwrap();
        assert_eq!((g.num_states(), g.num_transitions()), (3, 2));
        assert!(!g.is_witness());
        let p = GraphPath::follow(&g, g.state_index(&cfg(&[2, 0])).unwrap(), r.word()).unwrap();
        assert_eq!(g.state(p.target()), &cfg(&[0, 2]));

        let single = graph_from_run(&Run::trivial(cfg(&[3]))).unwrap();
        assert_eq!((single.num_states(), single.num_transitions()), (1, 0));
        assert!(single.is_witness());

        let cyc = Run::execute(&cfg(&[1, 1, 0]), &[act(&[-1, 1, 1]), act(&[1, -1, -1])])
            .unwrap()
            .unwrap();
        let g = graph_from_run(&cyc).unwrap();
        assert_eq!((g.num_states(), g.num_transitions()), (2, 2));
        assert!(g.is_witness());
    }

    #[test]
    fn rejects_inconsistent_transitions() {
        let err = SubreachabilityGraph::new(
            [cfg(&[1]), cfg(&[3])],
            [(cfg(&[1]), act(&[1]), cfg(&[3]))],
        );
        assert!(matches!(err, Err(VasError::InvalidGraph(_))));
    }

    #[test]
    fn shortest_path_in_projected_figure() {
        let p = projected_figure();
        let path = p.find_path(0, 1).unwrap();
        assert_eq!(path.label(&p), vec![act(&[1, -1, -1])]);
        assert!(p.find_path(1, 1).unwrap().is_empty());
    }

    #[test]
    fn simple_cycles_of_projected_figure() {
        let p = projected_figure();
        let cycles = p.simple_cycles(DEFAULT_CYCLE_CAP).unwrap();
        assert_eq!(cycles.len(), 3);
        assert!(cycles.iter().all(|c| c.is_simple(&p)));
        let lengths: Vec<_> = cycles.iter().map(GraphPath::len).collect();
        assert_eq!(lengths.iter().filter(|&&l| l == 1).count(), 2);
        assert_eq!(lengths.iter().filter(|&&l| l == 2).count(), 1);
        assert!(matches!(
            p.simple_cycles(2),
            Err(VasError::CycleCapExceeded(2))
        ));
    }

    #[test]
    fn decomposition_of_a_figure_cycle() {
        let p = projected_figure();
        // loop at (0,*,*) inside the 2-cycle, then the loop at (1,*,*)
        let word = [
            act(&[1, -1, -1]),
            act(&[0, 1, -1]),
            act(&[-1, 1, 1]),
            act(&[0, -1, 1]),
        ];
        let start = p.state_index(&Configuration::from_slots(vec![Slot::Int(0), Slot::Star, Slot::Star]).unwrap()).unwrap();
        let cycle = GraphPath::follow(&p, start, &word).unwrap();
        assert!(cycle.is_cycle());
        let pieces = cycle.simple_decomposition(&p).unwrap();
        assert_eq!(pieces.len(), 3);
        let mut sum = ParikhImage::zero(p.num_transitions());
        for piece in &pieces {
            assert!(piece.is_simple(&p));
            sum.add_assign(&piece.parikh(&p));
        }
        assert_eq!(sum, cycle.parikh(&p));
    }
}
