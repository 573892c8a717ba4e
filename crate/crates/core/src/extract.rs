//! Extractors: thresholds that decide which components of a set of
//! configurations are large enough to be projected away.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::bounds::pump_state_bound;
use crate::error::{stage_failure, Result, VasError};
use crate::vector::{Configuration, IndexSet, Slot};

/// A non-increasing sequence `l_1 >= .. >= l_d` of natural numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extractor {
    levels: Vec<BigUint>,
}

impl Extractor {
    pub fn new(levels: Vec<BigUint>) -> Result<Self> {
        if levels.is_empty() {
            return Err(VasError::InvalidExtractor("extractor is empty".into()));
        }
        if levels.windows(2).any(|w| w[0] < w[1]) {
            return Err(VasError::InvalidExtractor("levels must be non-increasing".into()));
        }
        Ok(Extractor { levels })
    }

    pub fn from_u64(levels: &[u64]) -> Result<Self> {
        Self::new(levels.iter().map(|&v| BigUint::from(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[BigUint] {
        &self.levels
    }

    /// `l_n` for `1 <= n <= d`.
    pub fn level(&self, n: usize) -> &BigUint {
        &self.levels[n - 1]
    }

    /// Whether `x(i) >= l_n`, reading `*` as infinite.
    fn reaches(&self, slot: Slot, n: usize) -> bool {
        match slot {
            Slot::Star => true,
            Slot::Int(v) => BigUint::from(v.max(0) as u64) >= *self.level(n),
        }
    }
}

impl fmt::Display for Extractor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, l) in self.levels.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str(")")
    }
}

fn check_dims<'a>(
    lambda: &Extractor,
    xs: impl IntoIterator<Item = &'a Configuration>,
) -> Result<()> {
    for x in xs {
        if x.dim() != lambda.dim() {
            return Err(VasError::DimensionMismatch {
                expected: lambda.dim(),
                found: x.dim(),
            });
        }
    }
    Ok(())
}

/// The least `J` with `x(i) < l_{|J|+1}` for every `i` outside `J` and every
/// `x` in `xs`.
///
/// Grows `J` from the empty set by every index that reaches the current
/// threshold; each added index belongs to every excluding set, so the
/// fixpoint is the minimum.
pub fn min_excluding_set<'a>(
    lambda: &Extractor,
    xs: impl IntoIterator<Item = &'a Configuration> + Clone,
) -> Result<IndexSet> {
    check_dims(lambda, xs.clone())?;
    let d = lambda.dim();
    let mut j = IndexSet::new();
    while j.len() < d {
        let n = j.len() + 1;
        let grow: Vec<usize> = (0..d)
            .filter(|&i| !j.contains(i))
            .filter(|&i| xs.clone().into_iter().any(|x| lambda.reaches(x.slot(i), n)))
            .collect();
        if grow.is_empty() {
            break;
        }
        for i in grow {
            j.insert(i);
        }
    }
    if !j.is_empty() {
        let n = j.len();
        let witnessed = j
            .iter()
            .all(|i| xs.clone().into_iter().any(|x| lambda.reaches(x.slot(i), n)));
        if !witnessed {
            return Err(stage_failure("extract", "excluding set is not minimal"));
        }
    }
    Ok(j)
}

/// `l(X) = pi_J(X)` for the minimal excluding set `J`.
pub fn extract<'a>(
    lambda: &Extractor,
    xs: impl IntoIterator<Item = &'a Configuration> + Clone,
) -> Result<BTreeSet<Configuration>> {
    let j = min_excluding_set(lambda, xs.clone())?;
    xs.into_iter().map(|x| x.project(&j)).collect()
}

/// `x(i) < l_{|I|+1}` for every integer slot `i` of `x`.
pub fn is_normalized(lambda: &Extractor, x: &Configuration) -> bool {
    let n = x.projected().len() + 1;
    n > lambda.dim() || x.slots().iter().all(|&s| s.is_star() || !lambda.reaches(s, n))
}

/// `l_{n-1} >= l_n^(d-n+1) a + l_n` for `n` in `2..=d`.
pub fn is_adapted(lambda: &Extractor, a: u64) -> bool {
    let d = lambda.dim();
    (2..=d).all(|n| {
        let ln = lambda.level(n);
        *lambda.level(n - 1) >= num_traits::pow(ln.clone(), d - n + 1) * BigUint::from(a) + ln
    })
}

/// `l_d = s` and `l_{n-1} = l_n^d (1+a)`.
pub fn build_adapted(d: usize, s: u64, a: u64) -> Result<Extractor> {
    if d == 0 || s == 0 {
        return Err(VasError::Precondition("dimension and s must be positive".into()));
    }
    let mut levels = vec![BigUint::zero(); d];
    levels[d - 1] = BigUint::from(s);
    for n in (1..d).rev() {
        levels[n - 1] = num_traits::pow(levels[n].clone(), d) * BigUint::from(1 + a);
    }
    let lambda = Extractor::new(levels)?;
    if !is_adapted(&lambda, a) {
        return Err(stage_failure("extract", "constructed extractor is not adapted"));
    }
    let x = (1 + a).checked_mul(s).ok_or(VasError::Overflow)?;
    let cap = pump_state_bound(x, d as u32);
    for n in 1..=d {
        if num_traits::pow(lambda.level(n).clone(), d + 1 - n) > cap {
            return Err(stage_failure("extract", "extractor level exceeds x^(d^d)"));
        }
    }
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(values: &[i64]) -> Configuration {
        Configuration::from_ints(values).unwrap()
    }

    fn set(values: &[usize]) -> IndexSet {
        values.iter().copied().collect()
    }

    #[test]
    fn extractor_examples() {
        let lambda = Extractor::from_u64(&[5, 3, 2]).unwrap();
        let one = [cfg(&[1, 8, 1])];
        assert_eq!(min_excluding_set(&lambda, &one).unwrap(), set(&[1]));
        let star = |v: &[Option<i64>]| {
            Configuration::from_slots(v.iter().map(|s| s.map_or(Slot::Star, Slot::Int)).collect())
                .unwrap()
        };
        assert_eq!(
            extract(&lambda, &one).unwrap(),
            BTreeSet::from([star(&[Some(1), None, Some(1)])])
        );
        let two = [cfg(&[1, 8, 1]), cfg(&[3, 1, 1])];
        assert_eq!(min_excluding_set(&lambda, &two).unwrap(), set(&[0, 1]));
        assert_eq!(
            extract(&lambda, &two).unwrap(),
            BTreeSet::from([star(&[None, None, Some(1)])])
        );
    }

    #[test]
    fn empty_and_normalized_sets() {
        let lambda = Extractor::from_u64(&[5, 3, 2]).unwrap();
        assert!(min_excluding_set(&lambda, &[] as &[Configuration]).unwrap().is_empty());
        let zeros = [cfg(&[0, 0, 0])];
        assert!(min_excluding_set(&lambda, &zeros).unwrap().is_empty());
        assert!(is_normalized(&lambda, &zeros[0]));
        assert!(!is_normalized(&lambda, &cfg(&[5, 0, 0])));
        assert_eq!(extract(&lambda, &zeros).unwrap(), BTreeSet::from([zeros[0].clone()]));
    }

    #[test]
    fn everything_large_gives_full_set() {
        let lambda = Extractor::from_u64(&[2, 2]).unwrap();
        assert_eq!(min_excluding_set(&lambda, &[cfg(&[9, 9])]).unwrap(), set(&[0, 1]));
    }

    #[test]
    fn adapted_examples() {
        let built = build_adapted(2, 2, 1).unwrap();
        assert_eq!(built, Extractor::from_u64(&[8, 2]).unwrap());
        assert!(is_adapted(&built, 1));
        assert_eq!(build_adapted(1, 5, 3).unwrap(), Extractor::from_u64(&[5]).unwrap());
        assert!(is_adapted(&Extractor::from_u64(&[7]).unwrap(), 9));
        assert_eq!(build_adapted(3, 1, 0).unwrap(), Extractor::from_u64(&[1, 1, 1]).unwrap());
        assert!(!is_adapted(&Extractor::from_u64(&[2, 2]).unwrap(), 1));
    }

    #[test]
    fn rejects_increasing_levels() {
        assert!(Extractor::from_u64(&[1, 2]).is_err());
    }
}
