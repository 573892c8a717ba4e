//! Iterable words, limits and pumping cycles of witness graphs.

use std::fmt;

use num_bigint::BigUint;

use crate::bounds::pump_state_bound;
use crate::error::{stage_failure, Result, VasError};
use crate::extract::{build_adapted, is_normalized, min_excluding_set, Extractor};
use crate::graph::{GraphPath, SubreachabilityGraph};
use crate::vector::{displacement, Action, Configuration, IndexSet, Run};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

/// `pi_L(c)` with `L` the slots where `c` and `other` differ.
fn limit_against(c: &Configuration, other: &Configuration) -> Result<Configuration> {
    let l: IndexSet = (0..c.dim()).filter(|&i| c.slot(i) != other.slot(i)).collect();
    c.project(&l)
}

/// The forward limit of `word` from `c`, when `word` is forward iterable.
pub fn forward_limit(word: &[Action], c: &Configuration) -> Result<Option<Configuration>> {
    let Some(run) = Run::execute(c, word)? else {
        return Ok(None);
    };
    if !c.leq(run.last())? {
        return Ok(None);
    }
    limit_against(c, run.last()).map(Some)
}

/// The backward limit of `word` from `c`, when `word` is backward iterable.
pub fn backward_limit(word: &[Action], c: &Configuration) -> Result<Option<Configuration>> {
    let delta: Vec<i64> = displacement(c.dim(), word)?.iter().map(|v| -v).collect();
    let Ok(start) = Configuration::new(c.add_ints(&delta)?) else {
        return Ok(None);
    };
    if !c.leq(&start)? {
        return Ok(None);
    }
    match Run::execute(&start, word)? {
        Some(run) if run.last() == c => limit_against(c, &start).map(Some),
        _ => Ok(None),
    }
}

pub fn limit(direction: Direction, word: &[Action], c: &Configuration) -> Result<Option<Configuration>> {
    match direction {
        Direction::Forward => forward_limit(word, c),
        Direction::Backward => backward_limit(word, c),
    }
}

/// Whether `c` is pumpable in `direction` by `cycle` of `g`.
///
/// The anchor of the cycle must be `pi_I(c)` for the projected components
/// `I` of `g`; otherwise [`VasError::AnchorMismatch`] is returned.
pub fn is_pumpable(
    c: &Configuration,
    g: &SubreachabilityGraph,
    cycle: &GraphPath,
    direction: Direction,
) -> Result<bool> {
    if !cycle.is_cycle() {
        return Err(VasError::InvalidPath("not a cycle".into()));
    }
    let anchor = g.state(cycle.source());
    if *anchor != c.project(g.projected())? {
        return Err(VasError::AnchorMismatch);
    }
    Ok(limit(direction, &cycle.label(g), c)?.as_ref() == Some(anchor))
}

/// Pumping cycles for one state of the witness graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PumpEntry {
    pub state: Configuration,
    /// Index of `pi_J(state)` in the projected graph.
    pub anchor: usize,
    pub forward: GraphPath,
    pub backward: GraphPath,
}

/// Result of pumping a witness graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PumpCertificate {
    pub s: u64,
    pub a: u64,
    /// `(1+a)s`.
    pub x: u64,
    pub extractor: Extractor,
    pub j: IndexSet,
    /// `pi_J(G)`.
    pub projected: SubreachabilityGraph,
    pub entries: Vec<PumpEntry>,
}

impl PumpCertificate {
    pub fn entry(&self, state: &Configuration) -> Option<&PumpEntry> {
        self.entries.iter().find(|e| e.state == *state)
    }

    /// `x^(d^d)`.
    pub fn state_bound(&self) -> BigUint {
        pump_state_bound(self.x, self.projected.dim() as u32)
    }
}

/// Run from state `q` whose extracted components all reach `l_{|J|}`, and
/// whose projection is a path of `pi_J(G)`.
///
/// Walks to the nearest state that is not normalized (ties broken by the
/// state order), projects the components it makes large and recurses.
fn growing_word(g: &SubreachabilityGraph, q: usize, lambda: &Extractor) -> Result<Vec<Action>> {
    let i = g.projected().clone();
    let j = min_excluding_set(lambda, g.states())?;
    if j == i {
        return Ok(Vec::new());
    }
    let dist = g.distances(q);
    let p = (0..g.num_states())
        .filter(|&p| !is_normalized(lambda, g.state(p)))
        .filter_map(|p| dist[p].map(|d| (d, p)))
        .min()
        .map(|(_, p)| p)
        .ok_or_else(|| stage_failure("pump", "no reachable state is large"))?;
    let mut word = g.find_path(q, p)?.label(g);
    let k = min_excluding_set(lambda, [g.state(p)])?;
    let gk = g.project(&k)?;
    let pk = gk
        .state_index(&g.state(p).project(&k)?)
        .expect("projected state is a state of the projected graph");
    word.extend(growing_word(&gk, pk, lambda)?);
    Ok(word)
}

struct Pumper<'a> {
    lambda: &'a Extractor,
    j: &'a IndexSet,
    s: u64,
    length_cap: BigUint,
}

impl Pumper<'_> {
    /// Forward pumping cycle of `pi_J(G)` for state `q` of `g`.
    fn forward(
        &self,
        g: &SubreachabilityGraph,
        projected: &SubreachabilityGraph,
        q: usize,
    ) -> Result<GraphPath> {
        let state = g.state(q);
        let mut word = growing_word(g, q, self.lambda)?;
        let mid = Run::execute(state, &word)?
            .ok_or_else(|| stage_failure("pump", "growing word does not lift"))?;
        let top = self.lambda.level(self.j.len().max(1));
        let large = self
            .j
            .difference(g.projected())
            .iter()
            .all(|i| mid.last().slot(i).value().is_some_and(|v| BigUint::from(v as u64) >= *top));
        if !self.j.is_empty() && !large {
            return Err(stage_failure("pump", "growing word leaves a component small"));
        }
        let index = |c: &Configuration| -> Result<usize> {
            projected
                .state_index(&c.project(self.j)?)
                .ok_or_else(|| stage_failure("pump", "projection is not a state"))
        };
        let anchor = index(state)?;
        let back = projected.find_path(index(mid.last())?, anchor)?;
        word.extend(back.label(projected));
        let cycle = GraphPath::follow(projected, anchor, &word)
            .ok_or_else(|| stage_failure("pump", "word is not a cycle of the projected graph"))?;
        if BigUint::from(cycle.len()) > self.length_cap {
            return Err(stage_failure("pump", "cycle is longer than d x^(d^d)"));
        }
        let end = Run::execute(state, &word)?
            .ok_or_else(|| stage_failure("pump", "return path does not lift"))?;
        let grown: IndexSet = (0..state.dim())
            .filter(|&i| state.slot(i) != end.last().slot(i))
            .collect();
        if state.norm_inf() < self.s && grown != self.j.difference(g.projected()) {
            return Err(stage_failure("pump", "cycle does not grow exactly the extracted components"));
        }
        Ok(cycle)
    }
}

/// Forward and backward pumping cycles for every state `q` of the witness
/// graph `g` with `||q||_inf < s`, using `x = (1+a)s`.
///
/// `a` must be at least the largest action norm of `g`.
pub fn pump_witness_with(g: &SubreachabilityGraph, s: u64, a: u64) -> Result<PumpCertificate> {
    if s == 0 {
        return Err(VasError::Precondition("s must be positive".into()));
    }
    if a < g.action_norm() {
        return Err(VasError::Precondition("a is below the action norm of the graph".into()));
    }
    if !g.is_witness() {
        return Err(VasError::Precondition("graph is not strongly connected".into()));
    }
    let d = g.dim();
    let lambda = build_adapted(d, s, a)?;
    let j = min_excluding_set(&lambda, g.states())?;
    let projected = g.project(&j)?;
    let x = (1 + a).checked_mul(s).ok_or(VasError::Overflow)?;
    let state_bound = pump_state_bound(x, d as u32);
    if BigUint::from(projected.num_states()) > state_bound {
        return Err(stage_failure("pump", "projected graph has more than x^(d^d) states"));
    }
    let pumper = Pumper {
        lambda: &lambda,
        j: &j,
        s,
        length_cap: BigUint::from(d) * &state_bound,
    };
    let reversed = g.reversed();
    let projected_reversed = projected.reversed();
    let mut entries = Vec::new();
    for q in 0..g.num_states() {
        let state = g.state(q);
        if state.norm_inf() >= s {
            continue;
        }
        let forward = pumper.forward(g, &projected, q)?;
        let rq = reversed.state_index(state).expect("same states");
        let mirrored = pumper.forward(&reversed, &projected_reversed, rq)?;
        let label: Vec<Action> = mirrored
            .label(&projected_reversed)
            .iter()
            .rev()
            .map(Action::negated)
            .collect();
        let anchor = forward.source();
        let backward = GraphPath::follow(&projected, anchor, &label)
            .ok_or_else(|| stage_failure("pump", "mirrored cycle is not a cycle"))?;
        if !is_pumpable(state, &projected, &forward, Direction::Forward)?
            || !is_pumpable(state, &projected, &backward, Direction::Backward)?
        {
            return Err(stage_failure("pump", format!("state {state} is not pumpable")));
        }
        entries.push(PumpEntry {
            state: state.clone(),
            anchor,
            forward,
            backward,
        });
    }
    Ok(PumpCertificate {
        s,
        a,
        x,
        extractor: lambda,
        j,
        projected,
        entries,
    })
}

/// [`pump_witness_with`] using the action norm of `g`.
pub fn pump_witness(g: &SubreachabilityGraph, s: u64) -> Result<PumpCertificate> {
    pump_witness_with(g, s, g.action_norm())
}
