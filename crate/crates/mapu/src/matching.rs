//! Exact min-cost perfect bipartite matching on rational weights.
//!
//! The kernel is the classical successive-shortest-paths / Hungarian
//! algorithm with dual potentials, O(n³). Rational entries are scaled by the
//! least common multiple of their denominators into integers first; the
//! integer kernel then runs in `i128` when a conservative overflow bound
//! allows it and falls back to arbitrary-precision integers otherwise, so
//! results are exact in every case. In debug and test builds the returned
//! matching carries a dual-feasibility certificate check (reduced costs
//! non-negative everywhere, zero on matched edges), which proves optimality
//! of each individual result rather than trusting the implementation.
//!
//! On top of the kernel sits the Lagrangian subproblem of the solver: for a
//! penalty λ ≥ 0, each supplier–customer edge costs
//! `min(c_i·d_j, b_i·d_j + λ)`, and a minimum perfect matching yields the
//! upgrade set minimizing `cost(X) + λ·|X|` over all X, unconstrained by the
//! budget.

use crate::error::{Error, Result};
use crate::instance::{self, Assignment, Instance, UpgradeSet};
use crate::rational::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::ops::{Add, Sub};

/// A square grid of exact rational edge costs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostMatrix {
    entries: Vec<Vec<Rational>>,
}

impl CostMatrix {
    /// Validates that `entries` is a non-empty square grid.
    pub fn new(entries: Vec<Vec<Rational>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::Precondition("cost matrix must be non-empty".into()));
        }
        if let Some(row) = entries.iter().find(|row| row.len() != n) {
            return Err(Error::Precondition(format!(
                "cost matrix must be square: {n} rows but a row of width {}",
                row.len()
            )));
        }
        Ok(CostMatrix { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row][col]
    }
}

/// A minimum-cost perfect matching: `permutation[row] = col`, with the exact
/// total along it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingResult {
    pub permutation: Vec<usize>,
    pub total: Rational,
}

/// Integer weight the Hungarian kernel runs over. `i128` for speed, `BigInt`
/// for unbounded magnitudes.
trait Weight: Clone + Ord + Zero + Add<Output = Self> + Sub<Output = Self> {}
impl<T: Clone + Ord + Zero + Add<Output = T> + Sub<Output = T>> Weight for T {}

/// Hungarian algorithm with potentials over integer weights.
///
/// Returns `(col_to_row, u, v)`, all 1-indexed with a virtual index 0: column
/// `j` is matched to row `col_to_row[j]`, and the duals satisfy
/// `u[i] + v[j] <= a[i-1][j-1]` with equality on matched edges.
fn hungarian<W: Weight>(a: &[Vec<W>]) -> (Vec<usize>, Vec<W>, Vec<W>) {
    let n = a.len();
    let mut u = vec![W::zero(); n + 1];
    let mut v = vec![W::zero(); n + 1];
    let mut col_to_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        // Grow the matching by one row, Dijkstra-style over reduced costs.
        col_to_row[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<W>> = vec![None; n + 1]; // None = +infinity
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = col_to_row[j0];
            let mut delta: Option<W> = None;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = a[i0 - 1][j - 1].clone() - u[i0].clone() - v[j].clone();
                if minv[j].as_ref().map_or(true, |m| cur < *m) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                if let Some(m) = &minv[j] {
                    if delta.as_ref().map_or(true, |d| m < d) {
                        delta = Some(m.clone());
                        j1 = j;
                    }
                }
            }
            let delta = delta.expect("some unmatched column is always reachable");
            for j in 0..=n {
                if used[j] {
                    let row = col_to_row[j];
                    u[row] = u[row].clone() + delta.clone();
                    v[j] = v[j].clone() - delta.clone();
                } else if let Some(m) = minv[j].take() {
                    minv[j] = Some(m - delta.clone());
                }
            }
            j0 = j1;
            if col_to_row[j0] == 0 {
                break;
            }
        }
        // Augment along the alternating path back to the virtual column.
        loop {
            let j1 = way[j0];
            col_to_row[j0] = col_to_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (col_to_row, u, v)
}

/// Optimality certificate: every reduced cost non-negative, matched edges
/// tight. Compiled only into debug/test builds.
#[cfg(debug_assertions)]
fn assert_dual_certificate<W: Weight + std::fmt::Debug>(
    a: &[Vec<W>],
    col_to_row: &[usize],
    u: &[W],
    v: &[W],
) {
    let n = a.len();
    for i in 1..=n {
        for j in 1..=n {
            let rc = a[i - 1][j - 1].clone() - u[i].clone() - v[j].clone();
            assert!(
                rc >= W::zero(),
                "dual infeasibility at edge ({i},{j}): reduced cost {rc:?}"
            );
            if col_to_row[j] == i {
                assert!(
                    rc.is_zero(),
                    "matched edge ({i},{j}) not tight: reduced cost {rc:?}"
                );
            }
        }
    }
}

/// Scale rational entries to integers by the LCM of all denominators.
/// Returns the scaled grid and the scale factor.
fn scale_to_integers(m: &CostMatrix) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut scale = BigInt::from(1);
    for row in &m.entries {
        for e in row {
            scale = scale.lcm(e.denom());
        }
    }
    let grid = m
        .entries
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| e.numer() * (&scale / e.denom()))
                .collect()
        })
        .collect();
    (grid, scale)
}

/// Conservative magnitude bound under which the whole Hungarian run provably
/// stays inside `i128`: potentials are bounded by n·(n·C) for entry bound C,
/// so 4(n+1)² headroom covers every intermediate difference.
fn fits_i128(grid: &[Vec<BigInt>]) -> bool {
    let n = grid.len() as i128;
    let limit = BigInt::from(i128::MAX / (4 * (n + 1) * (n + 1)));
    grid.iter().flatten().all(|e| e.abs() <= limit)
}

/// Exact minimum-cost perfect matching.
pub fn min_cost_perfect_matching(m: &CostMatrix) -> MatchingResult {
    let (grid, scale) = scale_to_integers(m);
    let n = m.n();
    let col_to_row = if fits_i128(&grid) {
        let small: Vec<Vec<i128>> = grid
            .iter()
            .map(|row| row.iter().map(|e| e.to_i128().expect("checked by fits_i128")).collect())
            .collect();
        let (col_to_row, _u, _v) = hungarian(&small);
        #[cfg(debug_assertions)]
        assert_dual_certificate(&small, &col_to_row, &_u, &_v);
        col_to_row
    } else {
        let (col_to_row, _u, _v) = hungarian(&grid);
        #[cfg(debug_assertions)]
        assert_dual_certificate(&grid, &col_to_row, &_u, &_v);
        col_to_row
    };
    let _ = scale;
    let mut permutation = vec![0usize; n];
    let mut total = Rational::zero();
    for j in 1..=n {
        let i = col_to_row[j];
        permutation[i - 1] = j - 1;
        total += m.entry(i - 1, j - 1);
    }
    MatchingResult { permutation, total }
}

/// Index-level result of [`lagrangian_matching`].
#[derive(Clone, Debug)]
pub(crate) struct LagrangianMatching {
    /// Membership mask of the minimizing upgrade set X*.
    pub mask: Vec<bool>,
    /// Matched `(supplier, customer)` index pairs.
    pub pairs: Vec<(usize, usize)>,
    /// `min over X of cost(X) + penalty·|X|`, attained by `mask`.
    pub total: Rational,
}

pub(crate) fn lagrangian_matching_mask(
    instance: &Instance,
    penalty: &Rational,
) -> Result<LagrangianMatching> {
    if !instance.is_square() {
        return Err(Error::Precondition(
            "lagrangian matching requires a normalized (square) instance".into(),
        ));
    }
    if penalty.is_negative() {
        return Err(Error::Precondition(format!(
            "lagrangian penalty must be non-negative, got {penalty}"
        )));
    }
    let n = instance.n_suppliers();
    // Each (supplier, customer) edge carries the cheaper of its two variants:
    // stay at base cost, or upgrade and pay the penalty once per upgraded
    // supplier (a perfect matching touches each supplier once, so the
    // per-edge penalty sums to penalty·|X|).
    let suppliers = instance.suppliers();
    let customers = instance.customers();
    let mut entries = Vec::with_capacity(n);
    for s in suppliers {
        let mut row = Vec::with_capacity(n);
        for c in customers {
            let blue = &s.base_cost * &c.demand;
            let red = &s.upgraded_cost * &c.demand + penalty;
            row.push(if red < blue { red } else { blue });
        }
        entries.push(row);
    }
    let result = min_cost_perfect_matching(&CostMatrix::new(entries)?);

    let mut mask = vec![false; n];
    let mut pairs = Vec::with_capacity(n);
    for (i, &j) in result.permutation.iter().enumerate() {
        // Recover which variant the min picked; ties resolve to no upgrade,
        // which is valid (equal contribution) and keeps |X*| minimal.
        let blue = &suppliers[i].base_cost * &customers[j].demand;
        let red = &suppliers[i].upgraded_cost * &customers[j].demand + penalty;
        mask[i] = red < blue;
        pairs.push((i, j));
    }
    // Self-consistency: the matching total decomposes as cost-of-this-
    // matching + penalty·|X*|, and since the total is also the minimum of
    // cost(X) + penalty·|X| over all X, the matching must be optimal for X*.
    debug_assert_eq!(
        {
            let size = mask.iter().filter(|&&m| m).count();
            instance::cost_of_mask(instance, &mask) + Rational::from(size) * penalty.clone()
        },
        result.total
    );
    Ok(LagrangianMatching { mask, pairs, total: result.total })
}

/// Solve the penalized upgrade problem: returns the upgrade set `X*`
/// minimizing `cost(X) + penalty·|X|` (no budget constraint), the matching
/// realizing it, and the minimum value itself.
///
/// The instance must be normalized (square); the penalty must be ≥ 0. At
/// equal edge cost the tie resolves to "not upgraded", so `X*` is the
/// minimal minimizer.
pub fn lagrangian_matching(
    instance: &Instance,
    penalty: &Rational,
) -> Result<(UpgradeSet, Assignment, Rational)> {
    let lm = lagrangian_matching_mask(instance, penalty)?;
    let upgrades = UpgradeSet::from_mask(instance, &lm.mask);
    let mut assignment = Assignment::new();
    for (i, j) in lm.pairs {
        assignment.insert(
            instance.customers()[j].id.clone(),
            instance.suppliers()[i].id.clone(),
        );
    }
    Ok((upgrades, assignment, lm.total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{inst, r, upgrades};
    use itertools::Itertools;

    fn matrix(rows: &[&[&str]]) -> CostMatrix {
        CostMatrix::new(
            rows.iter()
                .map(|row| row.iter().map(|e| r(e)).collect())
                .collect(),
        )
        .unwrap()
    }

    /// Exhaustive minimum over all n! permutations.
    fn factorial_oracle(m: &CostMatrix) -> Rational {
        (0..m.n())
            .permutations(m.n())
            .map(|perm| {
                perm.iter()
                    .enumerate()
                    .map(|(i, &j)| m.entry(i, j).clone())
                    .sum::<Rational>()
            })
            .min()
            .unwrap()
    }

    #[test]
    fn one_by_one() {
        let res = min_cost_perfect_matching(&matrix(&[&["5"]]));
        assert_eq!(res.total, r("5"));
        assert_eq!(res.permutation, vec![0]);
    }

    #[test]
    fn rejects_non_square() {
        assert!(CostMatrix::new(vec![vec![r("1"), r("2")]]).is_err());
        assert!(CostMatrix::new(vec![]).is_err());
    }

    #[test]
    fn diagonal_dominant_picks_identity() {
        let res = min_cost_perfect_matching(&matrix(&[
            &["0", "9", "9"],
            &["9", "0", "9"],
            &["9", "9", "0"],
        ]));
        assert_eq!(res.total, r("0"));
        assert_eq!(res.permutation, vec![0, 1, 2]);
    }

    #[test]
    fn matches_factorial_oracle_on_fixed_matrices() {
        let cases = [
            matrix(&[&["4", "1", "3"], &["2", "0", "5"], &["3", "2", "2"]]),
            matrix(&[
                &["1/2", "2/3", "7"],
                &["3/4", "1/6", "1"],
                &["2", "1/3", "1/5"],
            ]),
            matrix(&[
                &["-3", "5", "0", "2"],
                &["1", "-2", "4", "-1"],
                &["0", "3", "-4", "6"],
                &["2", "-1", "3", "0"],
            ]),
            matrix(&[
                &["7", "7", "7", "7", "7"],
                &["7", "7", "7", "7", "6"],
                &["7", "7", "7", "6", "7"],
                &["7", "7", "6", "7", "7"],
                &["9", "7", "7", "7", "7"],
            ]),
        ];
        for m in &cases {
            let res = min_cost_perfect_matching(m);
            assert_eq!(res.total, factorial_oracle(m));
            // the permutation must realize the reported total
            let realized: Rational = res
                .permutation
                .iter()
                .enumerate()
                .map(|(i, &j)| m.entry(i, j).clone())
                .sum();
            assert_eq!(realized, res.total);
        }
    }

    #[test]
    fn bigint_fallback_path_is_exact() {
        // magnitudes far beyond i128 force the arbitrary-precision kernel
        let huge = "100000000000000000000000000000000000000000000000000"; // 10^50
        let m = matrix(&[
            &[huge, "1"],
            &["2", huge],
        ]);
        let res = min_cost_perfect_matching(&m);
        assert_eq!(res.total, r("3"));
        assert_eq!(res.permutation, vec![1, 0]);
    }

    #[test]
    fn lagrangian_requires_square_instance_and_nonnegative_penalty() {
        let tall = inst(&[(0, 1), (1, 2), (2, 3)], &[1, 1], 1);
        assert!(matches!(
            lagrangian_matching(&tall, &r("1")),
            Err(Error::Precondition(_))
        ));
        let square = inst(&[(0, 1), (1, 2)], &[1, 1], 1);
        assert!(matches!(
            lagrangian_matching(&square, &r("-1")),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn huge_penalty_yields_no_upgrades() {
        let i = inst(&[(0, 1), (2, 3)], &[1, 1], 1);
        let (x, _, total) = lagrangian_matching(&i, &r("1000")).unwrap();
        assert!(x.is_empty());
        assert_eq!(total, crate::cost(&i, &x).unwrap());
        assert_eq!(total, r("4"));
    }

    #[test]
    fn zero_penalty_reaches_full_upgrade_value() {
        let i = inst(&[(0, 1), (2, 3)], &[1, 1], 1);
        let (x, _, total) = lagrangian_matching(&i, &r("0")).unwrap();
        assert_eq!(total, crate::cost(&i, &UpgradeSet::all_suppliers(&i)).unwrap());
        assert_eq!(total, r("2"));
        // value matches even though ties may drop useless upgrades from X*
        assert_eq!(total, crate::cost(&i, &x).unwrap());
    }

    #[test]
    fn matches_subset_enumeration_for_sampled_penalties() {
        let i = inst(&[(0, 1), (1, 1), (1, 4)], &[3, 2, 1], 1);
        for p in ["0", "1/2", "1", "3/2", "2", "7/3", "10"] {
            let penalty = r(p);
            let (x, pi, total) = lagrangian_matching(&i, &penalty).unwrap();
            // oracle: min over all 2^3 subsets
            let expect = (0..8u32)
                .map(|bits| {
                    let ids: Vec<&str> = ["s1", "s2", "s3"]
                        .iter()
                        .enumerate()
                        .filter(|(idx, _)| bits >> idx & 1 == 1)
                        .map(|(_, id)| *id)
                        .collect();
                    let size = Rational::from(ids.len());
                    crate::cost(&i, &upgrades(&ids)).unwrap() + size * penalty.clone()
                })
                .min()
                .unwrap();
            assert_eq!(total, expect, "penalty {p}");
            // self-consistency
            let size = Rational::from(x.len());
            assert_eq!(
                crate::cost(&i, &x).unwrap() + size * penalty.clone(),
                total
            );
            // the returned matching attains cost(X*) exactly
            assert_eq!(
                crate::evaluate(&i, &x, &pi).unwrap() + Rational::from(x.len()) * penalty,
                total
            );
        }
    }

    #[test]
    fn lagrangian_value_is_nondecreasing_in_penalty() {
        let i = inst(&[(1, 5), (0, 3), (3, 10)], &[1, 2, 3], 2);
        let penalties = ["0", "1/3", "1", "2", "5", "100"];
        let values: Vec<Rational> = penalties
            .iter()
            .map(|p| lagrangian_matching(&i, &r(p)).unwrap().2)
            .collect();
        for w in values.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }
}
