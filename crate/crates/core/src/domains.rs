//! Reversibility domains: the standard configurations `c` such that
//! `c -a-> c+a` and `c+a` reaches `c` back.

use rayon::prelude::*;

use crate::bounds::{domain_bound, PowerBound};
use crate::decide::{word_in_box, DEFAULT_NODE_BUDGET};
use crate::diophantine::{monoid_combination, DEFAULT_SOLVER_BUDGET};
use crate::error::{Result, VasError};
use crate::vector::{displacement, Action, Configuration, Run, Vas};

/// Largest number of candidates enumerated in one box.
pub const MAX_BOX_CANDIDATES: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// In the domain; carries the word leading `c+a` back to `c`.
    Member(Vec<Action>),
    NonMember,
    Inconclusive,
}

impl Membership {
    pub fn answer(&self) -> Option<bool> {
        match self {
            Membership::Member(_) => Some(true),
            Membership::NonMember => Some(false),
            Membership::Inconclusive => None,
        }
    }
}

/// A member of the domain with its return word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainElement {
    pub config: Configuration,
    pub return_word: Vec<Action>,
}

impl DomainElement {
    /// Replays `c -a-> c+a -alpha-> c`.
    pub fn replays(&self, a: &Action) -> bool {
        let mut word = vec![a.clone()];
        word.extend(self.return_word.iter().cloned());
        match Run::execute(&self.config, &word) {
            Ok(Some(run)) => run.last() == &self.config,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainResult {
    pub action: Action,
    pub box_size: u64,
    /// Minimal members found in the box, sorted.
    pub minimal: Vec<DomainElement>,
    pub complete: bool,
    /// Norm bound on the minimal elements of the whole domain.
    pub bound: PowerBound,
}

struct Query {
    slack: i64,
    /// `Some(false)` when `-a` is not a sum of actions.
    solvable: Option<bool>,
}

impl Query {
    fn new(vas: &Vas, a: &Action, box_size: u64) -> Result<Query> {
        if a.dim() != vas.dim() {
            return Err(VasError::DimensionMismatch {
                expected: vas.dim(),
                found: a.dim(),
            });
        }
        if !vas.contains(a) {
            return Err(VasError::Precondition("action does not belong to the system".into()));
        }
        let gens: Vec<Vec<i64>> = vas.actions().iter().map(|b| b.as_slice().to_vec()).collect();
        let solvable = match monoid_combination(vas.dim(), &gens, a.negated().as_slice(), DEFAULT_SOLVER_BUDGET) {
            Ok(found) => Some(found.is_some()),
            Err(_) => None,
        };
        let slack = box_size.checked_add(vas.norm_inf()).ok_or(VasError::Overflow)?;
        Ok(Query {
            slack: i64::try_from(slack).map_err(|_| VasError::Overflow)?,
            solvable,
        })
    }

    fn member(&self, vas: &Vas, a: &Action, c: &[i64]) -> Membership {
        let after: Vec<i64> = c.iter().zip(a.as_slice()).map(|(x, y)| x + y).collect();
        if after.iter().any(|&v| v < 0) || self.solvable == Some(false) {
            return Membership::NonMember;
        }
        match word_in_box(vas, &after, c, self.slack, DEFAULT_NODE_BUDGET) {
            (Some(word), _) => Membership::Member(word),
            (None, true) => Membership::NonMember,
            (None, false) => Membership::Inconclusive,
        }
    }
}

/// Decides `c` in the domain of `a` by a search in the box `[0, box+||A||]^d`.
pub fn domain_membership(vas: &Vas, a: &Action, c: &Configuration, box_size: u64) -> Result<Membership> {
    let values = c
        .to_ints()
        .ok_or_else(|| VasError::Precondition("configuration must be standard".into()))?;
    if values.len() != vas.dim() {
        return Err(VasError::DimensionMismatch {
            expected: vas.dim(),
            found: values.len(),
        });
    }
    let box_size = box_size.max(c.norm_inf());
    Ok(Query::new(vas, a, box_size)?.member(vas, a, &values))
}

fn box_points(d: usize, box_size: u64) -> Result<Vec<Vec<i64>>> {
    let side = usize::try_from(box_size + 1).map_err(|_| VasError::Overflow)?;
    let total = side
        .checked_pow(d as u32)
        .filter(|&n| n <= MAX_BOX_CANDIDATES)
        .ok_or(VasError::BudgetExceeded {
            what: "box candidates",
            limit: MAX_BOX_CANDIDATES as u64,
        })?;
    let mut points = Vec::with_capacity(total);
    let mut cur = vec![0i64; d];
    for _ in 0..total {
        points.push(cur.clone());
        for v in cur.iter_mut() {
            *v += 1;
            if *v as usize == side {
                *v = 0;
            } else {
                break;
            }
        }
    }
    Ok(points)
}

fn all_memberships(vas: &Vas, a: &Action, box_size: u64) -> Result<Vec<(Vec<i64>, Membership)>> {
    let query = Query::new(vas, a, box_size)?;
    let points = box_points(vas.dim(), box_size)?;
    Ok(points
        .into_par_iter()
        .map(|c| {
            let m = query.member(vas, a, &c);
            (c, m)
        })
        .collect())
}

fn leq(x: &[i64], y: &[i64]) -> bool {
    x.iter().zip(y).all(|(a, b)| a <= b)
}

fn minimal_members(members: &mut [(Vec<i64>, Vec<Action>)]) -> Vec<(Vec<i64>, Vec<Action>)> {
    members.sort_by(|(x, _), (y, _)| {
        let (sx, sy): (i64, i64) = (x.iter().sum(), y.iter().sum());
        sx.cmp(&sy).then_with(|| x.cmp(y))
    });
    let mut minimal: Vec<(Vec<i64>, Vec<Action>)> = Vec::new();
    for (c, w) in members.iter() {
        if !minimal.iter().any(|(m, _)| leq(m, c)) {
            minimal.push((c.clone(), w.clone()));
        }
    }
    minimal.sort_by(|(x, _), (y, _)| x.cmp(y));
    minimal
}

/// Whether some conclusive non-member dominates a member.
fn violates_upward_closure(decided: &[(Vec<i64>, Membership)], minimal: &[(Vec<i64>, Vec<Action>)]) -> bool {
    decided.iter().any(|(c, m)| {
        *m == Membership::NonMember && minimal.iter().any(|(low, _)| leq(low, c))
    })
}

/// Minimal elements of the domain of `a` among configurations in `[0, box]^d`.
pub fn reversibility_domain_min(vas: &Vas, a: &Action, box_size: u64) -> Result<DomainResult> {
    let decided = all_memberships(vas, a, box_size)?;
    let conclusive = decided.iter().all(|(_, m)| *m != Membership::Inconclusive);
    let mut members: Vec<(Vec<i64>, Vec<Action>)> = decided
        .iter()
        .filter_map(|(c, m)| match m {
            Membership::Member(w) => Some((c.clone(), w.clone())),
            _ => None,
        })
        .collect();
    let minimal = minimal_members(&mut members);
    let complete = conclusive && !violates_upward_closure(&decided, &minimal);
    let bound = domain_bound(vas.dim() as u64, vas.norm_inf());
    let minimal: Vec<DomainElement> = minimal
        .into_iter()
        .map(|(c, w)| DomainElement {
            config: Configuration::from_ints(&c).expect("box points are natural"),
            return_word: w,
        })
        .collect();
    for e in &minimal {
        debug_assert!(e.replays(a));
        debug_assert_eq!(
            displacement(vas.dim(), &e.return_word).ok(),
            Some(a.negated().as_slice().to_vec())
        );
        debug_assert!(bound.admits_u64(e.config.norm_inf()));
    }
    Ok(DomainResult {
        action: a.clone(),
        box_size,
        minimal,
        complete,
        bound,
    })
}

/// For conclusive `c <= c'` in the box, `c` in the domain implies `c'` in it.
pub fn is_upward_closed_in_box(vas: &Vas, a: &Action, box_size: u64) -> Result<bool> {
    let decided = all_memberships(vas, a, box_size)?;
    let members: Vec<&Vec<i64>> = decided
        .iter()
        .filter(|(_, m)| matches!(m, Membership::Member(_)))
        .map(|(c, _)| c)
        .collect();
    Ok(!decided.iter().any(|(c, m)| {
        *m == Membership::NonMember && members.iter().any(|low| leq(low, c))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(values: &[i64]) -> Configuration {
        Configuration::from_ints(values).unwrap()
    }

    #[test]
    fn swap_domain() {
        let vas = Vas::from_rows(2, &[&[-1, 1], &[1, -1]]).unwrap();
        let a = Action::new(vec![-1, 1]);
        let r = reversibility_domain_min(&vas, &a, 3).unwrap();
        assert_eq!(r.minimal.len(), 1);
        assert_eq!(r.minimal[0].config, cfg(&[1, 0]));
        assert!(r.minimal[0].replays(&a));
        assert!(r.complete);
        assert!(is_upward_closed_in_box(&vas, &a, 3).unwrap());
    }

    #[test]
    fn empty_domain() {
        let vas = Vas::from_rows(1, &[&[-1]]).unwrap();
        let a = Action::new(vec![-1]);
        let r = reversibility_domain_min(&vas, &a, 5).unwrap();
        assert!(r.minimal.is_empty());
        assert!(r.complete);
        assert!(is_upward_closed_in_box(&vas, &a, 5).unwrap());
    }

    #[test]
    fn zero_action_domain_is_everything() {
        let vas = Vas::from_rows(2, &[&[0, 0], &[1, -1]]).unwrap();
        let a = Action::new(vec![0, 0]);
        let r = reversibility_domain_min(&vas, &a, 2).unwrap();
        assert_eq!(r.minimal.len(), 1);
        assert_eq!(r.minimal[0].config, cfg(&[0, 0]));
        assert!(r.minimal[0].return_word.is_empty());
        assert!(is_upward_closed_in_box(&vas, &a, 2).unwrap());
    }

    #[test]
    fn membership_queries() {
        let vas = Vas::from_rows(2, &[&[-1, 1], &[1, -1]]).unwrap();
        let a = Action::new(vec![-1, 1]);
        assert_eq!(domain_membership(&vas, &a, &cfg(&[0, 3]), 3).unwrap(), Membership::NonMember);
        assert!(matches!(domain_membership(&vas, &a, &cfg(&[2, 0]), 3).unwrap(), Membership::Member(_)));
        assert!(domain_membership(&vas, &Action::new(vec![1, 1]), &cfg(&[0, 0]), 1).is_err());
    }
}
