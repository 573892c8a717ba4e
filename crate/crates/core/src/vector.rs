//! Projected vectors, configurations, actions and runs.
//!
//! A projected vector has `d` slots, each holding an integer or the marker
//! `*`. The set of `*` slots is its projection set `I`; arithmetic only
//! combines vectors with the same `I` and never touches `*` slots. The order
//! on slots places `*` above every integer.
//!
//! Projection acts on sets as a plain image: projecting
//! `{(2,0), (1,1), (2,0)}` by the first coordinate yields `{(*,0), (*,1)}`.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;

use crate::error::{Result, VasError};

/// A coordinate of a projected vector.
///
/// The derived order puts every `Int` below `Star`, which is both the
/// comparison order on slots and the canonical sort order of configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Int(i64),
    Star,
}

impl Slot {
    pub fn value(self) -> Option<i64> {
        match self {
            Slot::Int(v) => Some(v),
            Slot::Star => None,
        }
    }

    pub fn is_star(self) -> bool {
        matches!(self, Slot::Star)
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Int(v) => write!(f, "{v}"),
            Slot::Star => f.write_str("*"),
        }
    }
}

/// A set of coordinate indices, 0-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexSet(BTreeSet<usize>);

impl IndexSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// `{0, .., d-1}`.
    pub fn full(dim: usize) -> Self {
        (0..dim).collect()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    pub fn insert(&mut self, i: usize) -> bool {
        self.0.insert(i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        self.0.union(&other.0).copied().collect()
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        self.0.difference(&other.0).copied().collect()
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn max(&self) -> Option<usize> {
        self.0.iter().next_back().copied()
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        match self.max() {
            Some(index) if index >= dim => Err(VasError::IndexOutOfRange { index, dim }),
            _ => Ok(()),
        }
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        IndexSet(iter.into_iter().collect())
    }
}

/// Displays the set with 1-based indices, e.g. `{1,3}`.
impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}

/// A vector of `Z*^d`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjectedVector {
    slots: Vec<Slot>,
}

impl ProjectedVector {
    pub fn new(slots: Vec<Slot>) -> Self {
        Self { slots }
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Self::new(values.iter().map(|&v| Slot::Int(v)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(vec![Slot::Int(0); dim])
    }

    pub fn dim(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn slot(&self, i: usize) -> Slot {
        self.slots[i]
    }

    /// The projection set `I = { i : slot(i) = * }`.
    pub fn projected(&self) -> IndexSet {
        self.slots
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_star())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_standard(&self) -> bool {
        self.slots.iter().all(|s| !s.is_star())
    }

    /// The integer slots, when the vector has no `*`.
    pub fn to_ints(&self) -> Option<Vec<i64>> {
        self.slots.iter().map(|s| s.value()).collect()
    }

    fn check_same_shape(&self, other: &ProjectedVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(VasError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let same = self
            .slots
            .iter()
            .zip(&other.slots)
            .all(|(a, b)| a.is_star() == b.is_star());
        if same {
            Ok(())
        } else {
            Err(VasError::ProjectionMismatch)
        }
    }

    fn zip_with(
        &self,
        other: &ProjectedVector,
        op: impl Fn(i64, i64) -> Option<i64>,
    ) -> Result<ProjectedVector> {
        self.check_same_shape(other)?;
        let slots = self
            .slots
            .iter()
            .zip(&other.slots)
            .map(|(a, b)| match (a, b) {
                (Slot::Int(x), Slot::Int(y)) => op(*x, *y).map(Slot::Int).ok_or(VasError::Overflow),
                _ => Ok(Slot::Star),
            })
            .collect::<Result<_>>()?;
        Ok(ProjectedVector { slots })
    }

    pub fn add(&self, other: &ProjectedVector) -> Result<ProjectedVector> {
        self.zip_with(other, i64::checked_add)
    }

    pub fn sub(&self, other: &ProjectedVector) -> Result<ProjectedVector> {
        self.zip_with(other, i64::checked_sub)
    }

    /// `k * v`; the projection set is kept even for `k = 0`.
    pub fn scale(&self, k: i64) -> Result<ProjectedVector> {
        let slots = self
            .slots
            .iter()
            .map(|s| match s {
                Slot::Int(v) => v.checked_mul(k).map(Slot::Int).ok_or(VasError::Overflow),
                Slot::Star => Ok(Slot::Star),
            })
            .collect::<Result<_>>()?;
        Ok(ProjectedVector { slots })
    }

    /// `self + pi_I(delta)` where `I` is the projection set of `self`.
    pub fn add_ints(&self, delta: &[i64]) -> Result<ProjectedVector> {
        if delta.len() != self.dim() {
            return Err(VasError::DimensionMismatch {
                expected: self.dim(),
                found: delta.len(),
            });
        }
        let slots = self
            .slots
            .iter()
            .zip(delta)
            .map(|(s, d)| match s {
                Slot::Int(v) => v.checked_add(*d).map(Slot::Int).ok_or(VasError::Overflow),
                Slot::Star => Ok(Slot::Star),
            })
            .collect::<Result<_>>()?;
        Ok(ProjectedVector { slots })
    }

    /// `pi_L(self)`: the slots indexed by `L` become `*`.
    pub fn project(&self, l: &IndexSet) -> Result<ProjectedVector> {
        l.check_dim(self.dim())?;
        let mut slots = self.slots.clone();
        for i in l.iter() {
            slots[i] = Slot::Star;
        }
        Ok(ProjectedVector { slots })
    }

    /// Slot-wise comparison with `*` maximal.
    pub fn leq(&self, other: &ProjectedVector) -> Result<bool> {
        if self.dim() != other.dim() {
            return Err(VasError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.slots.iter().zip(&other.slots).all(|(a, b)| a <= b))
    }

    /// Maximum absolute value over the integer slots, 0 when all slots are `*`.
    pub fn norm_inf(&self) -> u64 {
        self.slots
            .iter()
            .filter_map(|s| s.value())
            .map(i64::unsigned_abs)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for ProjectedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, s) in self.slots.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str(")")
    }
}

/// A projected vector whose integer slots are natural numbers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration(ProjectedVector);

impl Configuration {
    pub fn new(vector: ProjectedVector) -> Result<Self> {
        if let Some(slot) = vector
            .slots
            .iter()
            .position(|s| matches!(s, Slot::Int(v) if *v < 0))
        {
            return Err(VasError::NegativeSlot { slot });
        }
        Ok(Configuration(vector))
    }

    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::new(ProjectedVector::from_ints(values))
    }

    pub fn from_slots(slots: Vec<Slot>) -> Result<Self> {
        Self::new(ProjectedVector::new(slots))
    }

    pub fn zero(dim: usize) -> Self {
        Configuration(ProjectedVector::zero(dim))
    }

    pub fn vector(&self) -> &ProjectedVector {
        &self.0
    }

    pub fn into_vector(self) -> ProjectedVector {
        self.0
    }

    /// One step `self -> self + pi_I(a)`; `None` when a slot would go negative.
    pub fn step(&self, action: &Action) -> Result<Option<Configuration>> {
        let next = self.0.add_ints(action.as_slice())?;
        Ok(Configuration::new(next).ok())
    }

    pub fn project(&self, l: &IndexSet) -> Result<Configuration> {
        Ok(Configuration(self.0.project(l)?))
    }
}

impl Deref for Configuration {
    type Target = ProjectedVector;

    fn deref(&self) -> &ProjectedVector {
        &self.0
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An action of a VAS: an integer vector without `*`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action(Vec<i64>);

impl Action {
    pub fn new(values: Vec<i64>) -> Self {
        Action(values)
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm_inf(&self) -> u64 {
        self.0.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn negated(&self) -> Action {
        Action(self.0.iter().map(|v| -v).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0)
    }
}

impl From<Vec<i64>> for Action {
    fn from(values: Vec<i64>) -> Self {
        Action(values)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        ProjectedVector::from_ints(&self.0).fmt(f)
    }
}

/// A vector addition system: a finite, duplicate-free set of actions in `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vas {
    dim: usize,
    actions: Vec<Action>,
}

impl Vas {
    pub fn new(dim: usize, actions: Vec<Action>) -> Result<Self> {
        if dim == 0 {
            return Err(VasError::InvalidVas("dimension must be at least 1".into()));
        }
        let mut seen = BTreeSet::new();
        for (k, a) in actions.iter().enumerate() {
            if a.dim() != dim {
                return Err(VasError::InvalidVas(format!(
                    "action {} has {} slots, expected {dim}",
                    k + 1,
                    a.dim()
                )));
            }
            if !seen.insert(a.clone()) {
                return Err(VasError::InvalidVas(format!("duplicate action {a}")));
            }
        }
        Ok(Vas { dim, actions })
    }

    pub fn from_rows(dim: usize, rows: &[&[i64]]) -> Result<Self> {
        Self::new(dim, rows.iter().map(|r| Action::new(r.to_vec())).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn contains(&self, action: &Action) -> bool {
        self.actions.contains(action)
    }

    /// `||A||_inf`, 0 for the empty system.
    pub fn norm_inf(&self) -> u64 {
        self.actions.iter().map(Action::norm_inf).max().unwrap_or(0)
    }

    /// The system `-A`, whose runs are the reversed runs of `A`.
    pub fn negated(&self) -> Vas {
        Vas {
            dim: self.dim,
            actions: self.actions.iter().map(Action::negated).collect(),
        }
    }
}

/// `Delta(word)`: the slot-wise sum of the actions.
pub fn displacement(dim: usize, word: &[Action]) -> Result<Vec<i64>> {
    let mut total = vec![0i64; dim];
    for a in word {
        if a.dim() != dim {
            return Err(VasError::DimensionMismatch {
                expected: dim,
                found: a.dim(),
            });
        }
        for (t, v) in total.iter_mut().zip(a.as_slice()) {
            *t = t.checked_add(*v).ok_or(VasError::Overflow)?;
        }
    }
    Ok(total)
}

/// A run `c0 c1 .. ck` labelled by `a1 .. ak`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    configs: Vec<Configuration>,
    word: Vec<Action>,
}

impl Run {
    /// The unique run from `start` labelled by `word`, or `None` when some
    /// intermediate configuration would leave `N_I^d`.
    pub fn execute(start: &Configuration, word: &[Action]) -> Result<Option<Run>> {
        let mut configs = Vec::with_capacity(word.len() + 1);
        configs.push(start.clone());
        for a in word {
            if a.dim() != start.dim() {
                return Err(VasError::DimensionMismatch {
                    expected: start.dim(),
                    found: a.dim(),
                });
            }
            match configs.last().expect("non-empty").step(a)? {
                Some(next) => configs.push(next),
                None => return Ok(None),
            }
        }
        Ok(Some(Run {
            configs,
            word: word.to_vec(),
        }))
    }

    pub fn trivial(c: Configuration) -> Run {
        Run {
            configs: vec![c],
            word: Vec::new(),
        }
    }

    pub fn first(&self) -> &Configuration {
        &self.configs[0]
    }

    pub fn last(&self) -> &Configuration {
        self.configs.last().expect("runs are non-empty")
    }

    pub fn configurations(&self) -> &[Configuration] {
        &self.configs
    }

    pub fn word(&self) -> &[Action] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.first().dim()
    }

    pub fn displacement(&self) -> Result<Vec<i64>> {
        displacement(self.dim(), &self.word)
    }

    /// `pi_L(run)`, slot-wise on every configuration.
    pub fn project(&self, l: &IndexSet) -> Result<Run> {
        Ok(Run {
            configs: self
                .configs
                .iter()
                .map(|c| c.project(l))
                .collect::<Result<_>>()?,
            word: self.word.clone(),
        })
    }

    /// Concatenation; `other` must start where `self` ends.
    pub fn concat(&self, other: &Run) -> Result<Run> {
        if self.last() != other.first() {
            return Err(VasError::Precondition(
                "runs do not share an endpoint".into(),
            ));
        }
        let mut configs = self.configs.clone();
        configs.extend_from_slice(&other.configs[1..]);
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        Ok(Run { configs, word })
    }

    /// Re-executes the label from the first configuration and compares.
    pub fn replays(&self) -> bool {
        matches!(Run::execute(self.first(), &self.word), Ok(Some(r)) if r == *self)
    }
}

/// `run(start, word)`.
pub fn run(start: &Configuration, word: &[Action]) -> Result<Option<Run>> {
    Run::execute(start, word)
}

/// `pi_L(v)`.
pub fn project(v: &ProjectedVector, l: &IndexSet) -> Result<ProjectedVector> {
    v.project(l)
}

/// The `*`-maximal slot-wise order.
pub fn leq(u: &ProjectedVector, v: &ProjectedVector) -> Result<bool> {
    u.leq(v)
}

/// Lifts a run of `pi_L(c)` back to `c`.
///
/// Requires that a run from `pi_L(c)` labelled by `word` exists and that
/// `c(i) >= |word| * ||A||_inf` for every `i` in `L \ I`. Returns the run from
/// `c`; its projection by `L` is the given projected run.
pub fn lift_run(vas: &Vas, c: &Configuration, l: &IndexSet, word: &[Action]) -> Result<Run> {
    if c.dim() != vas.dim() {
        return Err(VasError::DimensionMismatch {
            expected: vas.dim(),
            found: c.dim(),
        });
    }
    let norm = vas.norm_inf();
    if let Some(a) = word.iter().find(|a| a.norm_inf() > norm) {
        return Err(VasError::Precondition(format!(
            "action {a} exceeds the norm of the system"
        )));
    }
    let projected_start = c.project(l)?;
    let projected = Run::execute(&projected_start, word)?.ok_or_else(|| {
        VasError::Precondition(format!("no run from {projected_start} labelled by the word"))
    })?;
    let need = (word.len() as u64)
        .checked_mul(norm)
        .ok_or(VasError::Overflow)?;
    for i in l.difference(&c.projected()).iter() {
        let have = c.slot(i).value().unwrap_or(0) as u64;
        if have < need {
            return Err(VasError::Precondition(format!(
                "slot {} holds {have}, lifting needs at least {need}",
                i + 1
            )));
        }
    }
    let lifted = Run::execute(c, word)?
        .ok_or_else(|| crate::error::stage_failure("lift", "lifted run does not exist"))?;
    if lifted.project(l)? != projected {
        return Err(crate::error::stage_failure(
            "lift",
            "lifted run does not project onto the given run",
        ));
    }
    Ok(lifted)
}
