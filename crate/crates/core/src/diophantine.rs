//! Minimal non-zero natural solutions of homogeneous systems `H v = 0`.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Result, VasError};

/// Default number of candidate vectors the solver may generate.
pub const DEFAULT_SOLVER_BUDGET: u64 = 5_000_000;

/// A `rows x cols` integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiophantineSystem {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

impl DiophantineSystem {
    pub fn new(rows: usize, cols: usize, entries: Vec<i64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(VasError::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(VasError::DimensionMismatch {
                expected: cols,
                found: r.len(),
            });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// The system whose columns are the given vectors.
    pub fn from_columns(height: usize, columns: &[Vec<i64>]) -> Result<Self> {
        let mut entries = vec![0; height * columns.len()];
        for (j, col) in columns.iter().enumerate() {
            if col.len() != height {
                return Err(VasError::DimensionMismatch {
                    expected: height,
                    found: col.len(),
                });
            }
            for (i, v) in col.iter().enumerate() {
                entries[i * columns.len() + j] = *v;
            }
        }
        Self::new(height, columns.len(), entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// `max_i sum_j |h_ij|`.
    pub fn norm_1_inf(&self) -> u64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.unsigned_abs()).sum::<u64>())
            .max()
            .unwrap_or(0)
    }

    /// Rank by fraction-free (Bareiss) elimination.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        let mut rank = 0;
        let mut prev = BigInt::one();
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, pivot);
            for r in rank + 1..self.rows {
                for c in col + 1..self.cols {
                    let v = &m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c];
                    m[r][c] = v / &prev;
                }
                m[r][col] = BigInt::zero();
            }
            prev = m[rank][col].abs();
            if prev.is_zero() {
                prev = BigInt::one();
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// `(1 + ||H||_{1,inf})^rank`, an upper bound on `||v||_1` for minimal solutions.
    pub fn pottier_bound(&self) -> BigUint {
        num_traits::pow(BigUint::from(1 + self.norm_1_inf()), self.rank())
    }

    /// `H v`.
    pub fn apply(&self, v: &[u64]) -> Vec<i64> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(&h, &x)| h * x as i64)
                    .sum()
            })
            .collect()
    }

    fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// The minimal non-zero natural solutions, sorted lexicographically.
    ///
    /// Contejean–Devie completion: starting from the unit vectors, a
    /// non-solution `v` is extended by `e_j` only when `<Hv, He_j> < 0`,
    /// and candidates dominating a known solution are discarded. Each round
    /// raises `||v||_1` by one, so rounds beyond the Pottier bound cannot
    /// produce minimal solutions and the search stops there.
    pub fn min_solutions(&self, budget: u64) -> Result<Vec<Vec<u64>>> {
        let n = self.cols;
        if n == 0 {
            return Ok(Vec::new());
        }
        let cols: Vec<Vec<i64>> = (0..n).map(|j| self.column(j)).collect();
        let bound = self.pottier_bound();
        let mut solutions: Vec<Vec<u64>> = Vec::new();
        let mut frontier: BTreeSet<Vec<u64>> = (0..n)
            .map(|j| {
                let mut e = vec![0u64; n];
                e[j] = 1;
                e
            })
            .collect();
        let mut level: u64 = 1;
        let mut work: u64 = 0;
        while !frontier.is_empty() {
            if BigUint::from(level) > bound {
                break;
            }
            let mut pending = Vec::new();
            for v in frontier {
                let hv = self.apply(&v);
                if hv.iter().all(|&x| x == 0) {
                    solutions.push(v);
                } else {
                    pending.push((v, hv));
                }
            }
            let mut next = BTreeSet::new();
            for (v, hv) in pending {
                for (j, col) in cols.iter().enumerate() {
                    let dot: i64 = hv.iter().zip(col).map(|(a, b)| a * b).sum();
                    if dot >= 0 {
                        continue;
                    }
                    let mut w = v.clone();
                    w[j] += 1;
                    if solutions.iter().any(|s| dominated(s, &w)) {
                        continue;
                    }
                    work += 1;
                    if work > budget {
                        return Err(VasError::BudgetExceeded {
                            what: "diophantine solver",
                            limit: budget,
                        });
                    }
                    next.insert(w);
                }
            }
            frontier = next;
            level += 1;
        }
        solutions.sort();
        Ok(solutions)
    }
}

fn dominated(small: &[u64], big: &[u64]) -> bool {
    small.iter().zip(big).all(|(a, b)| a <= b)
}

/// Solves `sum_j v_j g_j = z` over the naturals using the homogeneous system
/// `[g_1 .. g_k | -z]`: among minimal solutions with last coordinate 1, the
/// lexicographically least one gives the coefficients.
pub fn monoid_combination(
    dim: usize,
    generators: &[Vec<i64>],
    z: &[i64],
    budget: u64,
) -> Result<Option<Vec<u64>>> {
    if z.len() != dim {
        return Err(VasError::DimensionMismatch {
            expected: dim,
            found: z.len(),
        });
    }
    if z.iter().all(|&x| x == 0) {
        return Ok(Some(vec![0; generators.len()]));
    }
    let mut columns = generators.to_vec();
    columns.push(z.iter().map(|v| -v).collect());
    let system = DiophantineSystem::from_columns(dim, &columns)?;
    let k = generators.len();
    Ok(system
        .min_solutions(budget)?
        .into_iter()
        .filter(|v| v[k] == 1)
        .min()
        .map(|mut v| {
            v.truncate(k);
            v
        }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(rows: &[&[i64]]) -> DiophantineSystem {
        DiophantineSystem::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn single_equation_examples() {
        assert_eq!(
            sys(&[&[1, -1]]).min_solutions(DEFAULT_SOLVER_BUDGET).unwrap(),
            vec![vec![1, 1]]
        );
        let h = sys(&[&[2, -3]]);
        assert_eq!(h.min_solutions(DEFAULT_SOLVER_BUDGET).unwrap(), vec![vec![3, 2]]);
        assert_eq!(h.pottier_bound(), BigUint::from(6u32));
    }

    #[test]
    fn chained_equalities() {
        let h = sys(&[&[1, -1, 0], &[0, 1, -1]]);
        assert_eq!(h.rank(), 2);
        assert_eq!(
            h.min_solutions(DEFAULT_SOLVER_BUDGET).unwrap(),
            vec![vec![1, 1, 1]]
        );
    }

    #[test]
    fn zero_columns_are_solutions() {
        let h = sys(&[&[0, 1, -1]]);
        assert_eq!(
            h.min_solutions(DEFAULT_SOLVER_BUDGET).unwrap(),
            vec![vec![0, 1, 1], vec![1, 0, 0]]
        );
        assert_eq!(sys(&[&[1, 2]]).min_solutions(DEFAULT_SOLVER_BUDGET).unwrap(), Vec::<Vec<u64>>::new());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(sys(&[&[0, 0], &[0, 0]]).rank(), 0);
        assert_eq!(sys(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(sys(&[&[2, 3, 1], &[4, 1, 0], &[0, 5, 2]]).rank(), 2);
        assert_eq!(sys(&[&[2, 3, 1], &[4, 1, 0], &[0, 5, 3]]).rank(), 3);
        assert_eq!(sys(&[&[0, 1], &[1, 0], &[1, 1]]).rank(), 2);
    }

    #[test]
    fn budget_is_enforced() {
        let h = sys(&[&[5, 7, -11, -13]]);
        assert!(matches!(
            h.min_solutions(3),
            Err(VasError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn monoid_membership() {
        let gens = vec![vec![2], vec![3]];
        assert_eq!(monoid_combination(1, &gens, &[7], 1000).unwrap(), Some(vec![2, 1]));
        assert_eq!(monoid_combination(1, &gens, &[1], 1000).unwrap(), None);
        assert_eq!(monoid_combination(1, &gens, &[0], 1000).unwrap(), Some(vec![0, 0]));
        assert_eq!(monoid_combination(1, &[], &[-1], 1000).unwrap(), None);
    }
}
