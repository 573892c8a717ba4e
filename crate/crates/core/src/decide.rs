//! Deciding reversible reachability between standard configurations, a
//! brute-force oracle for it, and the reduction from coverability.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::bounds::{corollary_x, run_length_bound, PowerBound};
use crate::diophantine::{monoid_combination, DEFAULT_SOLVER_BUDGET};
use crate::error::{Result, VasError};
use crate::vector::{displacement, Action, Configuration, Run, Vas};

/// Runs `p -> q` labelled `alpha` and `q -> p` labelled `beta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReversibilityCertificate {
    pub forward: Run,
    pub backward: Run,
}

impl ReversibilityCertificate {
    pub fn new(forward: Run, backward: Run) -> Result<Self> {
        let cert = ReversibilityCertificate { forward, backward };
        cert.validate()?;
        Ok(cert)
    }

    /// Builds the runs by executing both words.
    pub fn from_words(p: &Configuration, alpha: &[Action], beta: &[Action]) -> Result<Self> {
        let forward = Run::execute(p, alpha)?
            .ok_or_else(|| VasError::InvalidPath("forward word does not run".into()))?;
        let backward = Run::execute(forward.last(), beta)?
            .ok_or_else(|| VasError::InvalidPath("backward word does not run".into()))?;
        Self::new(forward, backward)
    }

    pub fn source(&self) -> &Configuration {
        self.forward.first()
    }

    pub fn target(&self) -> &Configuration {
        self.forward.last()
    }

    pub fn alpha(&self) -> &[Action] {
        self.forward.word()
    }

    pub fn beta(&self) -> &[Action] {
        self.backward.word()
    }

    /// Both runs replay, they close a loop, and the displacements cancel.
    pub fn validate(&self) -> Result<()> {
        if !self.forward.replays() || !self.backward.replays() {
            return Err(VasError::InvalidPath("certificate run does not replay".into()));
        }
        if self.backward.first() != self.forward.last() || self.backward.last() != self.forward.first() {
            return Err(VasError::InvalidPath("certificate runs do not form a loop".into()));
        }
        let alpha = self.forward.displacement()?;
        let beta = self.backward.displacement()?;
        if alpha.iter().zip(&beta).any(|(a, b)| a + b != 0) {
            return Err(VasError::InvalidPath("displacements do not cancel".into()));
        }
        Ok(())
    }

    /// Checks that every action belongs to `vas`.
    pub fn uses_only(&self, vas: &Vas) -> bool {
        self.alpha().iter().chain(self.beta()).all(|a| vas.contains(a))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NoReason {
    /// The difference of the endpoints is not a sum of actions.
    StateEquation { from_source: bool },
    /// Every configuration reachable from one endpoint was enumerated.
    ForwardClosed { from_source: bool },
    /// Every configuration reaching one endpoint was enumerated.
    BackwardClosed { to_source: bool },
    /// A search up to the complete run-length bound found nothing.
    BoundExhausted,
}

impl fmt::Display for NoReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |b: bool| if b { "source" } else { "target" };
        match self {
            NoReason::StateEquation { from_source } => {
                write!(f, "state equation has no solution from the {}", side(*from_source))
            }
            NoReason::ForwardClosed { from_source } => {
                write!(f, "forward closure of the {} is finite", side(*from_source))
            }
            NoReason::BackwardClosed { to_source } => {
                write!(f, "backward closure of the {} is finite", side(*to_source))
            }
            NoReason::BoundExhausted => f.write_str("no run within the length bound"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes(ReversibilityCertificate),
    No(NoReason),
    Unknown {
        /// Run length at which a search would be complete.
        bound: PowerBound,
        reason: String,
    },
}

impl Verdict {
    pub fn is_conclusive(&self) -> bool {
        !matches!(self, Verdict::Unknown { .. })
    }

    pub fn answer(&self) -> Option<bool> {
        match self {
            Verdict::Yes(_) => Some(true),
            Verdict::No(_) => Some(false),
            Verdict::Unknown { .. } => None,
        }
    }
}

fn check_endpoints(vas: &Vas, x: &Configuration, y: &Configuration) -> Result<(Vec<i64>, Vec<i64>)> {
    for c in [x, y] {
        if c.dim() != vas.dim() {
            return Err(VasError::DimensionMismatch {
                expected: vas.dim(),
                found: c.dim(),
            });
        }
    }
    match (x.to_ints(), y.to_ints()) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(VasError::Precondition("endpoints must be standard".into())),
    }
}

fn add(c: &[i64], a: &Action, sign: i64) -> Vec<i64> {
    c.iter().zip(a.as_slice()).map(|(x, y)| x + sign * y).collect()
}

fn config(values: &[i64]) -> Configuration {
    Configuration::from_ints(values).expect("search only visits natural vectors")
}

/// Forward exploration of every configuration reachable from `start` inside
/// `[0, bound]^d`.
struct Closure {
    parent: HashMap<Vec<i64>, Option<(usize, Vec<i64>)>>,
    clipped: bool,
    exhausted: bool,
}

impl Closure {
    fn explore(vas: &Vas, start: &[i64], bound: i64, node_budget: usize) -> Closure {
        let mut parent = HashMap::from([(start.to_vec(), None)]);
        let mut queue = VecDeque::from([start.to_vec()]);
        let mut clipped = false;
        let mut exhausted = false;
        'search: while let Some(c) = queue.pop_front() {
            for (k, a) in vas.actions().iter().enumerate() {
                let next = add(&c, a, 1);
                if next.iter().any(|&v| v < 0) {
                    continue;
                }
                if next.iter().any(|&v| v > bound) {
                    clipped = true;
                    continue;
                }
                if parent.contains_key(&next) {
                    continue;
                }
                if parent.len() >= node_budget {
                    exhausted = true;
                    break 'search;
                }
                parent.insert(next.clone(), Some((k, c.clone())));
                queue.push_back(next);
            }
        }
        Closure {
            parent,
            clipped,
            exhausted,
        }
    }

    fn complete(&self) -> bool {
        !self.clipped && !self.exhausted
    }

    fn word_to(&self, vas: &Vas, target: &[i64]) -> Option<Vec<Action>> {
        let mut word = Vec::new();
        let mut at = target.to_vec();
        while let Some(step) = self.parent.get(&at)? {
            word.push(vas.actions()[step.0].clone());
            at = step.1.clone();
        }
        word.reverse();
        Some(word)
    }
}

/// A word leading from `from` to `to` inside `[0, bound]^d`, and whether the
/// exploration from `from` was complete.
pub(crate) fn word_in_box(
    vas: &Vas,
    from: &[i64],
    to: &[i64],
    bound: i64,
    node_budget: usize,
) -> (Option<Vec<Action>>, bool) {
    let closure = Closure::explore(vas, from, bound, node_budget);
    (closure.word_to(vas, to), closure.complete())
}

/// Default node budget of the box searches.
pub const DEFAULT_NODE_BUDGET: usize = 2_000_000;

/// Brute-force answer inside the box `[0, bound]^d`.
///
/// YES when runs both ways exist inside the box; NO when the forward closure
/// of one endpoint was enumerated without leaving the box and misses the
/// other endpoint.
pub fn oracle_reversible(
    vas: &Vas,
    x: &Configuration,
    y: &Configuration,
    bound: u64,
) -> Result<Verdict> {
    let (xs, ys) = check_endpoints(vas, x, y)?;
    let b = i64::try_from(bound).map_err(|_| VasError::Overflow)?;
    let unknown = |reason: &str| Verdict::Unknown {
        bound: corollary_bound(vas, x, y),
        reason: reason.into(),
    };
    if xs.iter().chain(&ys).any(|&v| v > b) {
        return Ok(unknown("endpoint lies outside the box"));
    }
    let from_x = Closure::explore(vas, &xs, b, DEFAULT_NODE_BUDGET);
    let from_y = Closure::explore(vas, &ys, b, DEFAULT_NODE_BUDGET);
    match (from_x.word_to(vas, &ys), from_y.word_to(vas, &xs)) {
        (Some(alpha), Some(beta)) => Ok(Verdict::Yes(ReversibilityCertificate::from_words(
            x, &alpha, &beta,
        )?)),
        (None, _) if from_x.complete() => Ok(Verdict::No(NoReason::ForwardClosed { from_source: true })),
        (_, None) if from_y.complete() => Ok(Verdict::No(NoReason::ForwardClosed { from_source: false })),
        _ => Ok(unknown("exploration left the box")),
    }
}

/// The run-length bound beyond which no search is needed.
pub fn corollary_bound(vas: &Vas, x: &Configuration, y: &Configuration) -> PowerBound {
    let m = x.norm_inf().max(y.norm_inf());
    run_length_bound(vas.dim() as u64, &corollary_x(vas.norm_inf(), m))
}

/// Resource limits of [`decide_reversible`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchPolicy {
    /// Largest box side explored by the iterative deepening.
    pub max_box: u64,
    /// Node budget of one bidirectional search.
    pub node_budget: usize,
    /// Run-length bounds up to this value are searched exhaustively.
    pub exhaustive_limit: u64,
    pub solver_budget: u64,
}

impl Default for SearchPolicy {
    fn default() -> Self {
        SearchPolicy {
            max_box: 20,
            node_budget: DEFAULT_NODE_BUDGET,
            exhaustive_limit: 64,
            solver_budget: DEFAULT_SOLVER_BUDGET,
        }
    }
}

impl SearchPolicy {
    pub fn with_box(max_box: u64) -> Self {
        SearchPolicy {
            max_box,
            ..Self::default()
        }
    }
}

enum Search {
    Found(Vec<Action>),
    Unreachable(NoReason),
    Open,
}

struct Side {
    parent: HashMap<Vec<i64>, Option<(usize, Vec<i64>)>>,
    frontier: Vec<Vec<i64>>,
    clipped: bool,
    sign: i64,
}

impl Side {
    fn new(start: &[i64], sign: i64) -> Side {
        Side {
            parent: HashMap::from([(start.to_vec(), None)]),
            frontier: vec![start.to_vec()],
            clipped: false,
            sign,
        }
    }

    /// Expands one layer; returns a node also seen by `other`, if any.
    fn expand(&mut self, vas: &Vas, bound: i64, other: &Side) -> Option<Vec<i64>> {
        let mut next_frontier = Vec::new();
        let mut meet = None;
        for c in std::mem::take(&mut self.frontier) {
            for (k, a) in vas.actions().iter().enumerate() {
                let next = add(&c, a, self.sign);
                if next.iter().any(|&v| v < 0) {
                    continue;
                }
                if next.iter().any(|&v| v > bound) {
                    self.clipped = true;
                    continue;
                }
                if self.parent.contains_key(&next) {
                    continue;
                }
                self.parent.insert(next.clone(), Some((k, c.clone())));
                if meet.is_none() && other.parent.contains_key(&next) {
                    meet = Some(next.clone());
                }
                next_frontier.push(next);
            }
        }
        self.frontier = next_frontier;
        meet
    }

    /// Actions from the root to `node` (forward side) or from `node` to the
    /// root (backward side), in run order.
    fn word(&self, vas: &Vas, node: &[i64]) -> Vec<Action> {
        let mut word = Vec::new();
        let mut at = node.to_vec();
        while let Some(Some((k, prev))) = self.parent.get(&at) {
            word.push(vas.actions()[*k].clone());
            at = prev.clone();
        }
        if self.sign > 0 {
            word.reverse();
        }
        word
    }
}

/// Meet-in-the-middle search for a run `x -> y` inside `[0, bound]^d`.
fn bidirectional(vas: &Vas, x: &[i64], y: &[i64], bound: i64, node_budget: usize, x_is_source: bool) -> Search {
    if x == y {
        return Search::Found(Vec::new());
    }
    let mut fwd = Side::new(x, 1);
    let mut bwd = Side::new(y, -1);
    loop {
        if fwd.frontier.is_empty() {
            return if fwd.clipped {
                Search::Open
            } else {
                Search::Unreachable(NoReason::ForwardClosed { from_source: x_is_source })
            };
        }
        if bwd.frontier.is_empty() {
            return if bwd.clipped {
                Search::Open
            } else {
                Search::Unreachable(NoReason::BackwardClosed { to_source: !x_is_source })
            };
        }
        if fwd.parent.len() + bwd.parent.len() > node_budget {
            return Search::Open;
        }
        let meet = if fwd.frontier.len() <= bwd.frontier.len() {
            fwd.expand(vas, bound, &bwd)
        } else {
            bwd.expand(vas, bound, &fwd)
        };
        if let Some(m) = meet {
            let mut word = fwd.word(vas, &m);
            word.extend(bwd.word(vas, &m));
            return Search::Found(word);
        }
    }
}

/// Breadth-first search from `x` over runs of length at most `depth`.
fn bounded_depth(vas: &Vas, x: &[i64], y: &[i64], depth: u64, node_budget: usize) -> Option<Search> {
    let mut closure: HashMap<Vec<i64>, Option<(usize, Vec<i64>)>> = HashMap::from([(x.to_vec(), None)]);
    let mut layer = vec![x.to_vec()];
    for _ in 0..=depth {
        if layer.iter().any(|c| c == y) {
            let side = Side {
                parent: closure,
                frontier: Vec::new(),
                clipped: false,
                sign: 1,
            };
            return Some(Search::Found(side.word(vas, y)));
        }
        let mut next = Vec::new();
        for c in &layer {
            for (k, a) in vas.actions().iter().enumerate() {
                let n = add(c, a, 1);
                if n.iter().any(|&v| v < 0) || closure.contains_key(&n) {
                    continue;
                }
                if closure.len() >= node_budget {
                    return None;
                }
                closure.insert(n.clone(), Some((k, c.clone())));
                next.push(n);
            }
        }
        layer = next;
    }
    Some(Search::Unreachable(NoReason::BoundExhausted))
}

fn in_monoid(vas: &Vas, from: &[i64], to: &[i64], budget: u64) -> Option<bool> {
    let z: Vec<i64> = to.iter().zip(from).map(|(a, b)| a - b).collect();
    let gens: Vec<Vec<i64>> = vas.actions().iter().map(|a| a.as_slice().to_vec()).collect();
    monoid_combination(vas.dim(), &gens, &z, budget).ok().map(|r| r.is_some())
}

/// Decides whether standard `x` and `y` are reachable from each other.
///
/// Tries the state equation first, then bidirectional searches in boxes of
/// doubling size up to `policy.max_box`, then (when the complete run-length
/// bound is small enough) an unboxed search to that depth. Inconclusive
/// searches give UNKNOWN carrying that bound.
pub fn decide_reversible(
    vas: &Vas,
    x: &Configuration,
    y: &Configuration,
    policy: &SearchPolicy,
) -> Result<Verdict> {
    let (xs, ys) = check_endpoints(vas, x, y)?;
    let bound = corollary_bound(vas, x, y);
    if xs == ys {
        return Ok(Verdict::Yes(ReversibilityCertificate::from_words(x, &[], &[])?));
    }
    for (from, to, from_source) in [(&xs, &ys, true), (&ys, &xs, false)] {
        if in_monoid(vas, from, to, policy.solver_budget) == Some(false) {
            return Ok(Verdict::No(NoReason::StateEquation { from_source }));
        }
    }
    let start = x.norm_inf().max(y.norm_inf()) + vas.norm_inf().max(1);
    let mut side = start.min(policy.max_box.max(x.norm_inf().max(y.norm_inf())));
    let mut words: [Option<Vec<Action>>; 2] = [None, None];
    loop {
        let b = i64::try_from(side).map_err(|_| VasError::Overflow)?;
        for (slot, (from, to, from_source)) in [(&xs, &ys, true), (&ys, &xs, false)].into_iter().enumerate() {
            if words[slot].is_some() {
                continue;
            }
            match bidirectional(vas, from, to, b, policy.node_budget, from_source) {
                Search::Found(w) => words[slot] = Some(w),
                Search::Unreachable(reason) => return Ok(Verdict::No(reason)),
                Search::Open => {}
            }
        }
        if let [Some(alpha), Some(beta)] = &words {
            return Ok(Verdict::Yes(ReversibilityCertificate::from_words(x, alpha, beta)?));
        }
        if side >= policy.max_box {
            break;
        }
        side = (side * 2).min(policy.max_box);
    }
    if let Some(depth) = bound.value().and_then(|v| u64::try_from(v).ok()) {
        if depth <= policy.exhaustive_limit {
            for (slot, (from, to)) in [(&xs, &ys), (&ys, &xs)].into_iter().enumerate() {
                if words[slot].is_some() {
                    continue;
                }
                match bounded_depth(vas, from, to, depth, policy.node_budget) {
                    Some(Search::Found(w)) => words[slot] = Some(w),
                    Some(Search::Unreachable(reason)) => return Ok(Verdict::No(reason)),
                    _ => {}
                }
            }
            if let [Some(alpha), Some(beta)] = &words {
                return Ok(Verdict::Yes(ReversibilityCertificate::from_words(x, alpha, beta)?));
            }
        }
    }
    Ok(Verdict::Unknown {
        bound,
        reason: format!("searches up to box {} were inconclusive", policy.max_box),
    })
}

/// The instance `(V, source, target)` of reversible reachability equivalent
/// to covering `y` from `x` in `vas`.
pub fn reduce_coverability(
    vas: &Vas,
    x: &Configuration,
    y: &Configuration,
) -> Result<(Vas, Configuration, Configuration)> {
    let (xs, ys) = check_endpoints(vas, x, y)?;
    let d = vas.dim();
    let lift = |head: [i64; 2], tail: &[i64]| {
        let mut v = head.to_vec();
        v.extend_from_slice(tail);
        Action::new(v)
    };
    let mut actions: Vec<Action> = Vec::new();
    let mut push = |a: Action| {
        if !actions.contains(&a) {
            actions.push(a);
        }
    };
    for i in 0..d {
        let mut e = vec![0; d];
        e[i] = -1;
        push(lift([0, 0], &e));
    }
    for a in vas.actions() {
        push(lift([0, 0], a.as_slice()));
    }
    push(lift([-1, 1], &ys.iter().map(|v| -v).collect::<Vec<_>>()));
    push(lift([1, -1], &xs));
    let reduced = Vas::new(d + 2, actions)?;
    let source = config(lift([1, 0], &xs).as_slice());
    let target = config(lift([0, 1], &vec![0; d]).as_slice());
    Ok((reduced, source, target))
}

/// Whether some configuration `>= y` is reachable from `x`, searching inside
/// `[0, bound]^d`; `None` when the box was too small to tell.
pub fn coverability_oracle(vas: &Vas, x: &Configuration, y: &Configuration, bound: u64) -> Result<Option<bool>> {
    let (xs, ys) = check_endpoints(vas, x, y)?;
    let b = i64::try_from(bound).map_err(|_| VasError::Overflow)?;
    if xs.iter().any(|&v| v > b) {
        return Ok(None);
    }
    let closure = Closure::explore(vas, &xs, b, DEFAULT_NODE_BUDGET);
    if closure
        .parent
        .keys()
        .any(|c| c.iter().zip(&ys).all(|(a, b)| a >= b))
    {
        return Ok(Some(true));
    }
    Ok(closure.complete().then_some(false))
}

/// Configurations reachable from `x` inside the box, or `None` if the box
/// clipped the exploration.
pub fn reachable_in_box(vas: &Vas, x: &Configuration, bound: u64) -> Result<(HashSet<Configuration>, bool)> {
    let xs = x
        .to_ints()
        .ok_or_else(|| VasError::Precondition("configuration must be standard".into()))?;
    let b = i64::try_from(bound).map_err(|_| VasError::Overflow)?;
    let closure = Closure::explore(vas, &xs, b, DEFAULT_NODE_BUDGET);
    let complete = closure.complete();
    Ok((closure.parent.keys().map(|c| config(c)).collect(), complete))
}

/// `Delta(alpha) + Delta(beta)`.
pub fn loop_displacement(dim: usize, alpha: &[Action], beta: &[Action]) -> Result<Vec<i64>> {
    let a = displacement(dim, alpha)?;
    let b = displacement(dim, beta)?;
    Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(values: &[i64]) -> Configuration {
        Configuration::from_ints(values).unwrap()
    }

    fn vas(dim: usize, rows: &[&[i64]]) -> Vas {
        Vas::from_rows(dim, rows).unwrap()
    }

    #[test]
    fn oracle_examples() {
        let swap = vas(2, &[&[1, -1], &[-1, 1]]);
        let v = oracle_reversible(&swap, &cfg(&[1, 0]), &cfg(&[0, 1]), 2).unwrap();
        let Verdict::Yes(cert) = v else { panic!("expected YES, got {v:?}") };
        assert!(cert.validate().is_ok());
        assert!(cert.uses_only(&swap));

        let down = vas(1, &[&[-1]]);
        assert_eq!(oracle_reversible(&down, &cfg(&[1]), &cfg(&[0]), 5).unwrap().answer(), Some(false));
        let same = oracle_reversible(&down, &cfg(&[3]), &cfg(&[3]), 5).unwrap();
        let Verdict::Yes(cert) = same else { panic!() };
        assert!(cert.alpha().is_empty() && cert.beta().is_empty());
    }

    #[test]
    fn decider_examples() {
        let swap = vas(2, &[&[1, -1], &[-1, 1]]);
        let policy = SearchPolicy::default();
        assert_eq!(
            decide_reversible(&swap, &cfg(&[1, 0]), &cfg(&[0, 1]), &policy).unwrap().answer(),
            Some(true)
        );
        let down = vas(1, &[&[-1]]);
        assert_eq!(
            decide_reversible(&down, &cfg(&[1]), &cfg(&[0]), &policy).unwrap().answer(),
            Some(false)
        );
        assert_eq!(
            decide_reversible(&down, &cfg(&[2]), &cfg(&[2]), &policy).unwrap().answer(),
            Some(true)
        );
    }

    #[test]
    fn unknown_carries_corollary_bound() {
        let swap = vas(2, &[&[1, -1], &[-1, 1]]);
        let starved = SearchPolicy {
            node_budget: 1,
            ..SearchPolicy::default()
        };
        let v = decide_reversible(&swap, &cfg(&[1, 0]), &cfg(&[0, 1]), &starved).unwrap();
        let Verdict::Unknown { bound, .. } = v else { panic!("expected UNKNOWN, got {v:?}") };
        assert_eq!(bound.to_string(), "68*9^240");
        assert_eq!(bound, corollary_bound(&swap, &cfg(&[1, 0]), &cfg(&[1, 0])));
    }

    #[test]
    fn reduction_example() {
        let a = vas(1, &[&[-1]]);
        let (v, s, t) = reduce_coverability(&a, &cfg(&[1]), &cfg(&[1])).unwrap();
        assert_eq!(v, vas(3, &[&[0, 0, -1], &[-1, 1, -1], &[1, -1, 1]]));
        assert_eq!(s, cfg(&[1, 0, 1]));
        assert_eq!(t, cfg(&[0, 1, 0]));
        assert_eq!(oracle_reversible(&v, &s, &t, 3).unwrap().answer(), Some(true));
        assert_eq!(coverability_oracle(&a, &cfg(&[1]), &cfg(&[1]), 3).unwrap(), Some(true));
    }

    #[test]
    fn reduction_of_empty_system() {
        let a = Vas::new(1, vec![]).unwrap();
        assert_eq!(coverability_oracle(&a, &cfg(&[0]), &cfg(&[1]), 8).unwrap(), Some(false));
        let (v, s, t) = reduce_coverability(&a, &cfg(&[0]), &cfg(&[1])).unwrap();
        assert_eq!(oracle_reversible(&v, &s, &t, 8).unwrap().answer(), Some(false));
        let (v, s, t) = reduce_coverability(&a, &cfg(&[0]), &cfg(&[0])).unwrap();
        assert_eq!(oracle_reversible(&v, &s, &t, 8).unwrap().answer(), Some(true));
    }

    #[test]
    fn certificate_rejects_non_loops() {
        let p = cfg(&[1, 0]);
        let a = Action::new(vec![-1, 1]);
        assert!(ReversibilityCertificate::from_words(&p, std::slice::from_ref(&a), &[]).is_err());
        assert!(ReversibilityCertificate::from_words(&p, std::slice::from_ref(&a), &[a.negated()]).is_ok());
    }
}
