//! Ground-truth brute force and diagnostics.
//!
//! Everything here is deliberately independent of the polynomial solver: the
//! oracles enumerate, so they are slow but trivially correct, and the test
//! suite certifies the solver against them. The module also houses the
//! budget profile `h`, the (provably suboptimal) greedy baseline, and a
//! supermodularity spot-checker for `cost` as a set function.

use crate::error::{Error, Result};
use crate::instance::{self, Instance, Solution, UpgradeSet};
use crate::rational::Rational;
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Default supplier-count cap for the exponential oracles. Enumeration at
/// this size is still tractable (≈10⁶ subset evaluations) but far past what
/// interactive use should need; callers wanting more must opt in explicitly.
pub const DEFAULT_ORACLE_CAP: usize = 20;

fn check_cap(what: &str, size: usize, cap: usize) -> Result<()> {
    if size > cap {
        return Err(Error::CapExceeded { what: what.to_string(), size, cap });
    }
    Ok(())
}

/// Exact optimum by enumerating every upgrade set of size exactly
/// `min(k, #suppliers)` — equivalent to enumerating all sizes `<= k`, since
/// adding an upgrade never increases `cost`. Ties break to the
/// lexicographically smallest supplier-index set.
pub fn brute_force(instance: &Instance) -> Result<Solution> {
    brute_force_with_cap(instance, DEFAULT_ORACLE_CAP)
}

/// [`brute_force`] with an explicit supplier-count cap.
pub fn brute_force_with_cap(instance: &Instance, cap: usize) -> Result<Solution> {
    let n = instance.n_suppliers();
    check_cap("brute-force subset enumeration", n, cap)?;
    let size = instance.k().min(n);
    let (mask, value) = min_cost_over_size(instance, size);
    let upgrades = UpgradeSet::from_mask(instance, &mask);
    let (assignment, check) = instance::optimal_assignment(instance, &upgrades)?;
    debug_assert_eq!(check, value);
    Ok(Solution { upgrades, assignment, value })
}

/// Minimum cost over all upgrade sets of exactly `size` suppliers, with the
/// lexicographically first minimizing index set as witness.
fn min_cost_over_size(instance: &Instance, size: usize) -> (Vec<bool>, Rational) {
    let n = instance.n_suppliers();
    let mut best: Option<(Vec<bool>, Rational)> = None;
    // `combinations` yields index sets in lexicographic order, so keeping
    // only strict improvements realizes the documented tie-break.
    for combo in (0..n).combinations(size) {
        let mut mask = vec![false; n];
        for i in combo {
            mask[i] = true;
        }
        let value = instance::cost_of_mask(instance, &mask);
        match &best {
            Some((_, incumbent)) if *incumbent <= value => {}
            _ => best = Some((mask, value)),
        }
    }
    best.expect("at least one subset of each size 0..=n exists")
}

/// The budget profile `h(k') = min { cost(X) : |X| = k' }` for
/// `k' = 0 ..= #suppliers`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HProfile {
    pub values: Vec<Rational>,
}

impl HProfile {
    /// `h(k') >= h(k'+1)` everywhere (upgrades never hurt).
    pub fn is_non_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }

    /// Consecutive differences `h(k'+1) - h(k')` are non-decreasing.
    pub fn is_convex(&self) -> bool {
        let diffs: Vec<Rational> =
            self.values.windows(2).map(|w| &w[1] - &w[0]).collect();
        diffs.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Compute the full budget profile by subset enumeration.
pub fn h_profile(instance: &Instance) -> Result<HProfile> {
    h_profile_with_cap(instance, DEFAULT_ORACLE_CAP)
}

/// [`h_profile`] with an explicit supplier-count cap.
pub fn h_profile_with_cap(instance: &Instance, cap: usize) -> Result<HProfile> {
    let n = instance.n_suppliers();
    check_cap("h-profile subset enumeration", n, cap)?;
    let values = (0..=n)
        .map(|size| min_cost_over_size(instance, size).1)
        .collect();
    Ok(HProfile { values })
}

/// Greedy baseline: `k` rounds, each adding the single supplier whose
/// upgrade lowers `cost` the most (ties to the smallest supplier index).
/// Polynomial, deterministic — and demonstrably suboptimal on some
/// instances, which is exactly what it is kept around to show.
pub fn greedy(instance: &Instance) -> Result<Solution> {
    let n = instance.n_suppliers();
    let mut mask = vec![false; n];
    for _ in 0..instance.k() {
        let mut best: Option<(usize, Rational)> = None;
        for i in 0..n {
            if mask[i] {
                continue;
            }
            mask[i] = true;
            let value = instance::cost_of_mask(instance, &mask);
            mask[i] = false;
            match &best {
                Some((_, incumbent)) if *incumbent <= value => {}
                _ => best = Some((i, value)),
            }
        }
        let (i, _) = best.expect("k <= #suppliers leaves a candidate each round");
        mask[i] = true;
    }
    let upgrades = UpgradeSet::from_mask(instance, &mask);
    let (assignment, value) = instance::optimal_assignment(instance, &upgrades)?;
    Ok(Solution { upgrades, assignment, value })
}

/// A violation witness for the supermodularity inequality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupermodularViolation {
    pub base: UpgradeSet,
    pub s: String,
    pub t: String,
    /// `cost(A) + cost(A ∪ {s,t})`
    pub lhs: Rational,
    /// `cost(A ∪ {s}) + cost(A ∪ {t})`
    pub rhs: Rational,
}

/// Outcome of [`check_supermodular`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupermodularityReport {
    pub holds: bool,
    pub violation: Option<SupermodularViolation>,
    pub triples_checked: usize,
    /// True when every triple `(A, s, t)` was enumerated rather than sampled.
    pub exhaustive: bool,
}

/// Check the supermodularity inequality
/// `cost(A) + cost(A ∪ {s,t}) >= cost(A ∪ {s}) + cost(A ∪ {t})`
/// over triples `(A, s, t)` with `s != t`, `s, t ∉ A`.
///
/// With at most 6 suppliers every triple is enumerated; above that,
/// `trials` triples are sampled from the seeded generator. The inequality
/// is a theorem for this cost function, so `holds == false` indicates a
/// library bug, and the report carries the witness.
pub fn check_supermodular(instance: &Instance, trials: usize, seed: u64) -> SupermodularityReport {
    let n = instance.n_suppliers();
    let mut checked = 0usize;

    let mut test = |mask: &[bool], s: usize, t: usize| -> Option<SupermodularViolation> {
        let mut with_s = mask.to_vec();
        with_s[s] = true;
        let mut with_t = mask.to_vec();
        with_t[t] = true;
        let mut with_both = with_s.clone();
        with_both[t] = true;
        let lhs = instance::cost_of_mask(instance, mask) + instance::cost_of_mask(instance, &with_both);
        let rhs = instance::cost_of_mask(instance, &with_s) + instance::cost_of_mask(instance, &with_t);
        checked += 1;
        if lhs < rhs {
            Some(SupermodularViolation {
                base: UpgradeSet::from_mask(instance, mask),
                s: instance.suppliers()[s].id.clone(),
                t: instance.suppliers()[t].id.clone(),
                lhs,
                rhs,
            })
        } else {
            None
        }
    };

    let exhaustive = n <= 6;
    let mut violation = None;
    if exhaustive {
        'outer: for bits in 0u32..(1 << n) {
            let mask: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            for s in 0..n {
                if mask[s] {
                    continue;
                }
                for t in s + 1..n {
                    if mask[t] {
                        continue;
                    }
                    if let Some(v) = test(&mask, s, t) {
                        violation = Some(v);
                        break 'outer;
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let mut mask: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            let outside: Vec<usize> = (0..n).filter(|&i| !mask[i]).collect();
            if outside.len() < 2 {
                // Make room: clear two random positions instead of resampling.
                let a = rng.gen_range(0..n);
                let b = (a + 1 + rng.gen_range(0..n - 1)) % n;
                mask[a] = false;
                mask[b] = false;
            }
            let outside: Vec<usize> = (0..n).filter(|&i| !mask[i]).collect();
            let si = rng.gen_range(0..outside.len());
            let ti = loop {
                let t = rng.gen_range(0..outside.len());
                if t != si {
                    break t;
                }
            };
            if let Some(v) = test(&mask, outside[si].min(outside[ti]), outside[si].max(outside[ti])) {
                violation = Some(v);
                break;
            }
        }
    }

    SupermodularityReport { holds: violation.is_none(), violation, triples_checked: checked, exhaustive }
}

/// Minimum objective over *every* injective assignment of customers to
/// suppliers, by direct enumeration. This is the independent reference the
/// sorting rule behind [`crate::cost`] is certified against.
pub fn min_assignment_by_enumeration(instance: &Instance, x: &UpgradeSet) -> Result<Rational> {
    let n = instance.n_suppliers();
    check_cap("assignment enumeration", n, 8)?;
    let costs: Vec<Rational> = {
        let map = instance::effective_costs(instance, x)?;
        instance.suppliers().iter().map(|s| map[&s.id].clone()).collect()
    };
    let m = instance.n_customers();
    let mut best: Option<Rational> = None;
    for perm in (0..n).permutations(m) {
        let mut value = Rational::zero();
        for (j, &i) in perm.iter().enumerate() {
            value += &(&costs[i] * &instance.customers()[j].demand);
        }
        if best.as_ref().map_or(true, |b| value < *b) {
            best = Some(value);
        }
    }
    Ok(best.expect("n >= 1 guarantees at least one assignment"))
}
