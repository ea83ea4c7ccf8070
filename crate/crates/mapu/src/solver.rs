//! The exact, strongly polynomial solver.
//!
//! The budget profile `h(k') = min {cost(X) : |X| = k'}` is non-increasing
//! and convex, which makes a Lagrangian attack sound: the solve pipeline is
//!
//! 1. **Narrowing** ([`find_optimal_pair`]). Maintain a pair of upgrade sets
//!    `A, B` with `|A| < k < |B|`, starting from `(∅, I)`. The penalty
//!    `λ = (cost(A) − cost(B)) / (|B| − |A|)` — the negated secant slope of
//!    `h` — defines the auxiliary cost `g(X) = cost(X) + λ·|X|`, minimized
//!    exactly by one penalized matching ([`crate::matching`]). A minimizer
//!    with `g(X*) < g(A)` is an *extreme set*: it lies strictly below the
//!    chord, its size falls strictly between `|A|` and `|B|`, and it is
//!    cardinality-optimal, so it replaces the endpoint on its side of `k`.
//!    When no extreme set exists the pair is *optimal*: the convex
//!    combination [`f_value`] at `k` equals the LP optimum.
//! 2. **Simplification** ([`simplify_pair`]). Drop upgrades wasted on
//!    zero-demand customers from both sets; costs are preserved. If `B`
//!    shrinks to within the budget the LP bound is attained integrally and
//!    the solve finishes here.
//! 3. **Rounding** ([`round_pair`]). Repeatedly *redistribute* the sorted
//!    symmetric difference `A △ B` alternately into two sets whose sizes
//!    flank `k` more tightly; a selection inequality from the integrality
//!    proof picks a replacement that keeps the pair optimal, and after at
//!    most `|I|` shrinking steps a set of size exactly `k` with
//!    `cost = f_value = LP optimum` falls out — an executable form of the
//!    proof that the relaxation always has an integral optimum.
//!
//! Every step's claimed invariant is checked at runtime with exact
//! arithmetic; violations surface as [`Error::Invariant`], never as wrong
//! answers. [`SolveTrace`] records the whole decision history, and
//! [`SolveTrace::audit`] re-verifies it after the fact.

use crate::error::{Error, Result};
use crate::instance::{self, Instance, Solution, UpgradeSet};
use crate::matching::lagrangian_matching_mask;
use crate::rational::Rational;
use serde::Serialize;

/// Two upgrade sets flanking the budget: `|A| < k < |B|`, with their exact
/// costs. Construction recomputes and stores `cost(A)`, `cost(B)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pair {
    a: UpgradeSet,
    b: UpgradeSet,
    cost_a: Rational,
    cost_b: Rational,
}

impl Pair {
    /// Validates `|A| < k < |B|` against the instance's budget and computes
    /// both costs. Rejects pairs with `cost(A) < cost(B)` — every pair the
    /// algorithm works on satisfies `cost(A) ≥ cost(B)` (for weakly optimal
    /// pairs because `h` is non-increasing, for optimal pairs because
    /// `f_value` could otherwise not reach the LP optimum), and the penalty
    /// sign logic depends on it.
    pub fn new(instance: &Instance, a: UpgradeSet, b: UpgradeSet) -> Result<Pair> {
        let k = instance.k();
        if !(a.len() < k && k < b.len()) {
            return Err(Error::Precondition(format!(
                "pair sizes must satisfy |A| < k < |B|, got |A| = {}, k = {k}, |B| = {}",
                a.len(),
                b.len()
            )));
        }
        let cost_a = instance::cost(instance, &a)?;
        let cost_b = instance::cost(instance, &b)?;
        if cost_a < cost_b {
            return Err(Error::Precondition(format!(
                "pair costs must satisfy cost(A) ≥ cost(B), got {cost_a} < {cost_b}"
            )));
        }
        Ok(Pair { a, b, cost_a, cost_b })
    }

    pub fn a(&self) -> &UpgradeSet {
        &self.a
    }

    pub fn b(&self) -> &UpgradeSet {
        &self.b
    }

    pub fn cost_a(&self) -> &Rational {
        &self.cost_a
    }

    pub fn cost_b(&self) -> &Rational {
        &self.cost_b
    }
}

/// Result of a pipeline stage that either keeps a pair alive or finishes
/// with an exact solution.
#[derive(Clone, Debug, Serialize)]
pub enum PairOutcome {
    /// The stage produced a pair for the next stage to consume.
    Pair(Pair),
    /// The stage hit a budget-sized set and solved the instance outright.
    Solved(Solution),
}

/// The convex combination `((|B|−k)·cost(A) + (k−|A|)·cost(B)) / (|B|−|A|)`.
/// For an optimal pair this equals the LP optimum at budget `k`.
pub fn f_value(pair: &Pair, k: usize) -> Result<Rational> {
    if !(pair.a.len() < k && k < pair.b.len()) {
        return Err(Error::Precondition(format!(
            "f requires |A| < k < |B|, got |A| = {}, k = {k}, |B| = {}",
            pair.a.len(),
            pair.b.len()
        )));
    }
    Ok(f_of(pair.a.len(), &pair.cost_a, pair.b.len(), &pair.cost_b, k))
}

fn f_of(size_a: usize, cost_a: &Rational, size_b: usize, cost_b: &Rational, k: usize) -> Rational {
    let gap = Rational::from(size_b - size_a);
    (Rational::from(size_b - k) * cost_a + Rational::from(k - size_a) * cost_b) / gap
}

/// The Lagrangian penalty `(cost(A) − cost(B)) / (|B| − |A|)` ≥ 0: the
/// per-upgrade price at which `A` and `B` tie under the auxiliary cost `g`.
pub fn penalty(pair: &Pair) -> Rational {
    penalty_of(pair.a.len(), &pair.cost_a, pair.b.len(), &pair.cost_b)
}

fn penalty_of(size_a: usize, cost_a: &Rational, size_b: usize, cost_b: &Rational) -> Rational {
    (cost_a - cost_b) / Rational::from(size_b - size_a)
}

// ---------------------------------------------------------------------------
// Trace
// ---------------------------------------------------------------------------

/// What a narrowing iteration did with the minimizer `X*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NarrowingAction {
    /// `g(X*) = g(A)`: no extreme set; the pair is optimal and narrowing stops.
    NoExtremeSet,
    /// `|X*| = k`: a budget-sized cardinality-optimal set; solved outright.
    ExactBudget,
    /// `|A| < |X*| < k`: `A` replaced by `X*`.
    ReplaceA,
    /// `k < |X*| < |B|`: `B` replaced by `X*`.
    ReplaceB,
}

/// One iteration of the narrowing loop, recorded before the action applies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NarrowingStep {
    pub size_a: usize,
    pub size_b: usize,
    pub cost_a: Rational,
    pub cost_b: Rational,
    pub penalty: Rational,
    /// `f_{A,B}(k)` of the pair this iteration started from.
    pub f: Rational,
    /// `|X*|` of the Lagrangian minimizer.
    pub size_x: usize,
    /// `g(A) = cost(A) + penalty·|A|`.
    pub g_a: Rational,
    /// `g(X*)`, the matching total — the global minimum of `g`.
    pub g_x: Rational,
    pub action: NarrowingAction,
}

/// Wasted upgrades dropped by simplification; costs are preserved exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplificationRecord {
    pub removed_from_a: Vec<String>,
    pub removed_from_b: Vec<String>,
    pub size_a_after: usize,
    pub size_b_after: usize,
    pub cost_a: Rational,
    pub cost_b: Rational,
}

/// Which redistribution half replaced a pair endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundingChoice {
    APrime,
    BPrime,
}

/// One redistribution iteration of the rounding loop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundingStep {
    pub size_a: usize,
    pub size_b: usize,
    pub cost_a: Rational,
    pub cost_b: Rational,
    /// Cleanliness of `(A, B)` — always true; recorded for the audit.
    pub clean: bool,
    pub size_a_prime: usize,
    pub size_b_prime: usize,
    pub cost_a_prime: Rational,
    pub cost_b_prime: Rational,
    pub chosen: RoundingChoice,
    pub chosen_size: usize,
    /// `f_{A,B}(k)` before the replacement.
    pub f_before: Rational,
    /// `f` of the successor pair; `None` on the terminal step (`|X| = k`).
    pub f_after: Option<Rational>,
}

/// Complete decision history of one [`solve`] call.
#[derive(Clone, Debug, Serialize)]
pub struct SolveTrace {
    /// Supplier count (identical before and after normalization).
    pub n_suppliers: usize,
    /// Customer count of the instance as given, before dummy padding.
    pub n_customers: usize,
    pub k: usize,
    /// Set when `k = 0` or `k = |I|` bypassed the pair machinery.
    pub shortcut: Option<String>,
    pub narrowing: Vec<NarrowingStep>,
    pub simplification: Option<SimplificationRecord>,
    pub rounding: Vec<RoundingStep>,
    #[serde(rename = "final")]
    pub final_solution: Solution,
}

impl SolveTrace {
    /// Re-verify every invariant the trace claims, with exact arithmetic:
    /// penalties non-negative, gaps strictly shrinking, `f` non-increasing
    /// through narrowing and constant through rounding, redistribution size
    /// and cost laws, the selection inequality, and the final
    /// value's consistency with the terminating step. Returns the first
    /// violation as [`Error::Invariant`].
    pub fn audit(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Invariant(format!("trace audit: {msg}")));
        let k = self.k;
        let n = self.n_suppliers;
        let value = &self.final_solution.value;

        if self.final_solution.upgrades.len() != k.min(n) {
            return fail(format!(
                "final upgrade set has {} members, expected exactly min(k, n) = {}",
                self.final_solution.upgrades.len(),
                k.min(n)
            ));
        }
        if self.shortcut.is_some() {
            if !(self.narrowing.is_empty() && self.rounding.is_empty()) {
                return fail("shortcut solves must not record pipeline steps".into());
            }
            return Ok(());
        }

        // --- narrowing ---
        for (idx, s) in self.narrowing.iter().enumerate() {
            let ctx = format!("narrowing step {idx}");
            if !(s.size_a < k && k < s.size_b) {
                return fail(format!("{ctx}: sizes {}..{} do not flank k = {k}", s.size_a, s.size_b));
            }
            if s.cost_a < s.cost_b {
                return fail(format!("{ctx}: cost(A) = {} < cost(B) = {}", s.cost_a, s.cost_b));
            }
            if s.penalty.is_negative() {
                return fail(format!("{ctx}: negative penalty {}", s.penalty));
            }
            if s.penalty != penalty_of(s.size_a, &s.cost_a, s.size_b, &s.cost_b) {
                return fail(format!("{ctx}: penalty does not match the recorded pair"));
            }
            if s.f != f_of(s.size_a, &s.cost_a, s.size_b, &s.cost_b, k) {
                return fail(format!("{ctx}: f does not match the recorded pair"));
            }
            if s.g_a != &s.cost_a + &(s.penalty.clone() * Rational::from(s.size_a)) {
                return fail(format!("{ctx}: g(A) does not match cost(A) + penalty·|A|"));
            }
            if s.g_x > s.g_a {
                return fail(format!("{ctx}: g(X*) = {} exceeds g(A) = {}", s.g_x, s.g_a));
            }
            let terminal = idx + 1 == self.narrowing.len();
            match s.action {
                NarrowingAction::NoExtremeSet => {
                    if s.g_x != s.g_a {
                        return fail(format!("{ctx}: no-extreme-set despite g(X*) < g(A)"));
                    }
                    if !terminal {
                        return fail(format!("{ctx}: narrowing continued past its terminal step"));
                    }
                }
                NarrowingAction::ExactBudget => {
                    if s.g_x >= s.g_a || s.size_x != k {
                        return fail(format!("{ctx}: exact-budget action inconsistent"));
                    }
                    if !terminal {
                        return fail(format!("{ctx}: narrowing continued past its terminal step"));
                    }
                }
                NarrowingAction::ReplaceA => {
                    if s.g_x >= s.g_a || !(s.size_a < s.size_x && s.size_x < k) {
                        return fail(format!("{ctx}: replace-A action inconsistent"));
                    }
                }
                NarrowingAction::ReplaceB => {
                    if s.g_x >= s.g_a || !(k < s.size_x && s.size_x < s.size_b) {
                        return fail(format!("{ctx}: replace-B action inconsistent"));
                    }
                }
            }
        }
        for (idx, w) in self.narrowing.windows(2).enumerate() {
            if w[1].size_b - w[1].size_a >= w[0].size_b - w[0].size_a {
                return fail(format!("narrowing gap did not shrink at step {}", idx + 1));
            }
            if w[1].f > w[0].f {
                return fail(format!("narrowing f increased at step {}", idx + 1));
            }
        }
        let last_narrow = match self.narrowing.last() {
            Some(s) => s,
            None => return fail("pipeline solve recorded no narrowing steps".into()),
        };
        if last_narrow.action == NarrowingAction::ExactBudget {
            let expect = &last_narrow.g_x - &(last_narrow.penalty.clone() * Rational::from(k));
            if *value != expect {
                return fail(format!(
                    "exact-budget value {value} differs from g(X*) − penalty·k = {expect}"
                ));
            }
            if self.simplification.is_some() || !self.rounding.is_empty() {
                return fail("exact-budget termination must end the pipeline".into());
            }
            return Ok(());
        }
        // Narrowing ended on an optimal pair; from here f is pinned to the
        // LP optimum, which the final value must realize (integrality).
        let f_target = &last_narrow.f;
        if value != f_target {
            return fail(format!(
                "final value {value} differs from the optimal pair's f = {f_target}"
            ));
        }

        // --- simplification (costs preserved, sizes only shrink) ---
        if let Some(rec) = &self.simplification {
            if rec.cost_a != last_narrow.cost_a || rec.cost_b != last_narrow.cost_b {
                return fail("simplification changed a cost".into());
            }
            if rec.size_a_after + rec.removed_from_a.len() != last_narrow.size_a
                || rec.size_b_after + rec.removed_from_b.len() != last_narrow.size_b
            {
                return fail("simplification sizes inconsistent with removals".into());
            }
        }

        // --- rounding ---
        for (idx, s) in self.rounding.iter().enumerate() {
            let ctx = format!("rounding step {idx}");
            if !s.clean {
                return fail(format!("{ctx}: pair not clean"));
            }
            if !(s.size_a < k && k < s.size_b) {
                return fail(format!("{ctx}: sizes {}..{} do not flank k = {k}", s.size_a, s.size_b));
            }
            if !(s.size_a < s.size_a_prime
                && s.size_a_prime <= s.size_b_prime
                && s.size_b_prime < s.size_b)
            {
                return fail(format!(
                    "{ctx}: redistribution sizes violate |A| < |A'| ≤ |B'| < |B|: {} {} {} {}",
                    s.size_a, s.size_a_prime, s.size_b_prime, s.size_b
                ));
            }
            if &s.cost_a_prime + &s.cost_b_prime > &s.cost_a + &s.cost_b {
                return fail(format!("{ctx}: redistribution increased the summed cost"));
            }
            if s.f_before != f_of(s.size_a, &s.cost_a, s.size_b, &s.cost_b, k) {
                return fail(format!("{ctx}: f_before does not match the recorded pair"));
            }
            if s.f_before != *f_target {
                return fail(format!("{ctx}: f drifted from the LP optimum during rounding"));
            }
            let (chosen_size, chosen_cost) = match s.chosen {
                RoundingChoice::APrime => (s.size_a_prime, &s.cost_a_prime),
                RoundingChoice::BPrime => (s.size_b_prime, &s.cost_b_prime),
            };
            if chosen_size != s.chosen_size {
                return fail(format!("{ctx}: chosen_size does not match the chosen half"));
            }
            // Selection inequality s·cost(X) + t·|X| ≤ r.
            let sv = Rational::from(s.size_b - s.size_a);
            let tv = &s.cost_a - &s.cost_b;
            let rv = Rational::from(s.size_b) * &s.cost_a - Rational::from(s.size_a) * &s.cost_b;
            if sv * chosen_cost + tv * Rational::from(chosen_size) > rv {
                return fail(format!("{ctx}: chosen set fails the selection inequality"));
            }
            let terminal = idx + 1 == self.rounding.len();
            match &s.f_after {
                None => {
                    if !terminal || chosen_size != k {
                        return fail(format!("{ctx}: missing successor f on a non-terminal step"));
                    }
                }
                Some(f_after) => {
                    if terminal {
                        return fail(format!("{ctx}: terminal step recorded a successor f"));
                    }
                    if chosen_size == k {
                        return fail(format!("{ctx}: budget-sized choice did not terminate"));
                    }
                    if f_after != f_target {
                        return fail(format!("{ctx}: successor f drifted from the LP optimum"));
                    }
                }
            }
        }
        for (idx, w) in self.rounding.windows(2).enumerate() {
            if w[1].size_b - w[1].size_a >= w[0].size_b - w[0].size_a {
                return fail(format!("rounding gap did not shrink at step {}", idx + 1));
            }
        }
        if let Some(last) = self.rounding.last() {
            if last.chosen_size != k {
                return fail("rounding ended without reaching the budget size".into());
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Mask-level pipeline internals
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
struct MaskPair {
    a: Vec<bool>,
    b: Vec<bool>,
    size_a: usize,
    size_b: usize,
    cost_a: Rational,
    cost_b: Rational,
}

impl MaskPair {
    fn from_masks(instance: &Instance, a: Vec<bool>, b: Vec<bool>) -> MaskPair {
        let size_a = a.iter().filter(|&&m| m).count();
        let size_b = b.iter().filter(|&&m| m).count();
        let cost_a = instance::cost_of_mask(instance, &a);
        let cost_b = instance::cost_of_mask(instance, &b);
        MaskPair { a, b, size_a, size_b, cost_a, cost_b }
    }

    fn to_pair(&self, instance: &Instance) -> Pair {
        Pair {
            a: UpgradeSet::from_mask(instance, &self.a),
            b: UpgradeSet::from_mask(instance, &self.b),
            cost_a: self.cost_a.clone(),
            cost_b: self.cost_b.clone(),
        }
    }

    fn f(&self, k: usize) -> Rational {
        f_of(self.size_a, &self.cost_a, self.size_b, &self.cost_b, k)
    }
}

enum StageOutcome {
    Pair(MaskPair),
    Solved { mask: Vec<bool>, value: Rational },
}

fn invariant(msg: String) -> Error {
    Error::Invariant(msg)
}

/// The narrowing loop over masks. Preconditions (square instance,
/// 0 < k < n) are the caller's responsibility.
fn narrow(normalized: &Instance, steps: &mut Vec<NarrowingStep>) -> Result<StageOutcome> {
    let n = normalized.n_suppliers();
    let k = normalized.k();
    let mut pair = MaskPair::from_masks(normalized, vec![false; n], vec![true; n]);
    for _ in 0..=n + 1 {
        if pair.cost_a < pair.cost_b {
            return Err(invariant(format!(
                "narrowing: cost(A) = {} < cost(B) = {}",
                pair.cost_a, pair.cost_b
            )));
        }
        let lambda = penalty_of(pair.size_a, &pair.cost_a, pair.size_b, &pair.cost_b);
        let lm = lagrangian_matching_mask(normalized, &lambda)?;
        let size_x = lm.mask.iter().filter(|&&m| m).count();
        let g_a = &pair.cost_a + &(lambda.clone() * Rational::from(pair.size_a));
        let g_x = lm.total;
        if g_x > g_a {
            return Err(invariant(format!(
                "narrowing: matching total {g_x} exceeds g(A) = {g_a}, yet A was available"
            )));
        }
        let mut step = NarrowingStep {
            size_a: pair.size_a,
            size_b: pair.size_b,
            cost_a: pair.cost_a.clone(),
            cost_b: pair.cost_b.clone(),
            penalty: lambda.clone(),
            f: pair.f(k),
            size_x,
            g_a: g_a.clone(),
            g_x: g_x.clone(),
            action: NarrowingAction::NoExtremeSet,
        };
        if g_x == g_a {
            // No extreme set: the pair is optimal.
            steps.push(step);
            return Ok(StageOutcome::Pair(pair));
        }
        // Extreme set found: it is cardinality-optimal and strictly inside.
        let cost_x = &g_x - &(lambda * Rational::from(size_x));
        debug_assert_eq!(cost_x, instance::cost_of_mask(normalized, &lm.mask));
        if size_x == k {
            step.action = NarrowingAction::ExactBudget;
            steps.push(step);
            return Ok(StageOutcome::Solved { mask: lm.mask, value: cost_x });
        }
        if size_x <= pair.size_a || size_x >= pair.size_b {
            return Err(invariant(format!(
                "narrowing: extreme set size {size_x} outside the open interval ({}, {})",
                pair.size_a, pair.size_b
            )));
        }
        if size_x > k {
            step.action = NarrowingAction::ReplaceB;
            pair.b = lm.mask;
            pair.size_b = size_x;
            pair.cost_b = cost_x;
        } else {
            step.action = NarrowingAction::ReplaceA;
            pair.a = lm.mask;
            pair.size_a = size_x;
            pair.cost_a = cost_x;
        }
        steps.push(step);
    }
    Err(invariant(format!(
        "narrowing failed to terminate within {} iterations",
        n + 2
    )))
}

/// Remove upgrades wasted on zero-demand customers from one set. Returns the
/// shrunken mask and the removed supplier ids; `cost` is unchanged (each
/// removed supplier contributed `effective cost · 0`, and re-optimizing
/// cannot help or hurt a set that only lost zero-effect members).
fn strip_wasted_upgrades(instance: &Instance, mask: &[bool]) -> (Vec<bool>, Vec<String>) {
    let (pairs, _) = instance::optimal_assignment_indices(instance, mask);
    let mut out = mask.to_vec();
    let mut removed = Vec::new();
    for (i, j) in pairs {
        if mask[i] && instance.customers()[j].demand.is_zero() {
            out[i] = false;
            removed.push(instance.suppliers()[i].id.clone());
        }
    }
    removed.sort();
    (out, removed)
}

fn simplify_masks(
    normalized: &Instance,
    pair: MaskPair,
    record: &mut Option<SimplificationRecord>,
) -> Result<StageOutcome> {
    let k = normalized.k();
    let (a, removed_a) = strip_wasted_upgrades(normalized, &pair.a);
    let (b, removed_b) = strip_wasted_upgrades(normalized, &pair.b);
    let cost_a = instance::cost_of_mask(normalized, &a);
    let cost_b = instance::cost_of_mask(normalized, &b);
    if cost_a != pair.cost_a || cost_b != pair.cost_b {
        return Err(invariant(format!(
            "simplification changed a cost: A {} -> {cost_a}, B {} -> {cost_b}",
            pair.cost_a, pair.cost_b
        )));
    }
    let size_a = pair.size_a - removed_a.len();
    let size_b = pair.size_b - removed_b.len();
    *record = Some(SimplificationRecord {
        removed_from_a: removed_a,
        removed_from_b: removed_b,
        size_a_after: size_a,
        size_b_after: size_b,
        cost_a: cost_a.clone(),
        cost_b: cost_b.clone(),
    });
    if size_b <= k {
        // B fits the budget at the LP-optimal cost: solved.
        return Ok(StageOutcome::Solved { mask: b, value: cost_b });
    }
    Ok(StageOutcome::Pair(MaskPair { a, b, size_a, size_b, cost_a, cost_b }))
}

/// Cleanliness over masks: the `(b, c)` intervals in `A △ B`, sorted
/// lexicographically, must have non-decreasing `c` — equivalently, no two
/// members strictly nest (`b_i < b_{i'}` and `c_{i'} < c_i`).
fn clean_masks(instance: &Instance, a: &[bool], b: &[bool]) -> bool {
    let mut sym: Vec<usize> = (0..instance.n_suppliers()).filter(|&i| a[i] != b[i]).collect();
    sym.sort_by(|&x, &y| {
        let sx = &instance.suppliers()[x];
        let sy = &instance.suppliers()[y];
        sx.upgraded_cost
            .cmp(&sy.upgraded_cost)
            .then_with(|| sx.base_cost.cmp(&sy.base_cost))
            .then(x.cmp(&y))
    });
    sym.windows(2).all(|w| {
        instance.suppliers()[w[0]].base_cost <= instance.suppliers()[w[1]].base_cost
    })
}

/// Redistribution over masks: sort `A △ B` by `(b, c)` (ties by index) and
/// deal the sorted run alternately — odd 1-indexed positions to `B'`, even
/// to `A'` — on top of the common part `A ∩ B`.
fn redistribute_masks(instance: &Instance, a: &[bool], b: &[bool]) -> (Vec<bool>, Vec<bool>) {
    let n = instance.n_suppliers();
    let mut sym: Vec<usize> = (0..n).filter(|&i| a[i] != b[i]).collect();
    sym.sort_by(|&x, &y| {
        let sx = &instance.suppliers()[x];
        let sy = &instance.suppliers()[y];
        sx.upgraded_cost
            .cmp(&sy.upgraded_cost)
            .then_with(|| sx.base_cost.cmp(&sy.base_cost))
            .then(x.cmp(&y))
    });
    let mut a_prime: Vec<bool> = (0..n).map(|i| a[i] && b[i]).collect();
    let mut b_prime = a_prime.clone();
    for (pos0, &i) in sym.iter().enumerate() {
        if (pos0 + 1) % 2 == 0 {
            a_prime[i] = true;
        } else {
            b_prime[i] = true;
        }
    }
    (a_prime, b_prime)
}

fn round_masks(
    normalized: &Instance,
    mut pair: MaskPair,
    steps: &mut Vec<RoundingStep>,
) -> Result<(Vec<bool>, Rational)> {
    let n = normalized.n_suppliers();
    let k = normalized.k();
    let f_target = pair.f(k);
    for _ in 0..=n + 1 {
        let clean = clean_masks(normalized, &pair.a, &pair.b);
        if !clean {
            return Err(invariant(
                "rounding: pair is not clean, redistribution order would be unsound".into(),
            ));
        }
        let (a_prime, b_prime) = redistribute_masks(normalized, &pair.a, &pair.b);
        let size_a_prime = a_prime.iter().filter(|&&m| m).count();
        let size_b_prime = b_prime.iter().filter(|&&m| m).count();
        if !(pair.size_a < size_a_prime && size_a_prime <= size_b_prime && size_b_prime < pair.size_b)
        {
            return Err(invariant(format!(
                "rounding: redistribution sizes {size_a_prime}, {size_b_prime} violate |A| < |A'| ≤ |B'| < |B| for |A| = {}, |B| = {}",
                pair.size_a, pair.size_b
            )));
        }
        let cost_a_prime = instance::cost_of_mask(normalized, &a_prime);
        let cost_b_prime = instance::cost_of_mask(normalized, &b_prime);
        if &cost_a_prime + &cost_b_prime > &pair.cost_a + &pair.cost_b {
            return Err(invariant(format!(
                "rounding: redistribution increased the summed cost: {} + {} > {} + {}",
                cost_a_prime, cost_b_prime, pair.cost_a, pair.cost_b
            )));
        }
        // Selection inequality: s·cost(X) + t·|X| ≤ r, which at |X| = k means
        // cost(X) ≤ f and in general keeps the successor pair optimal.
        let sv = Rational::from(pair.size_b - pair.size_a);
        let tv = &pair.cost_a - &pair.cost_b;
        let rv = Rational::from(pair.size_b) * &pair.cost_a
            - Rational::from(pair.size_a) * &pair.cost_b;
        let qualifies = |cost: &Rational, size: usize| {
            sv.clone() * cost + tv.clone() * Rational::from(size) <= rv
        };
        // Candidate order puts B' first so that a complete tie (equal sizes,
        // both qualifying) resolves to B', the half holding the smallest
        // (b, c) members.
        let mut candidates: Vec<(RoundingChoice, usize, &Rational, &Vec<bool>)> = Vec::new();
        if qualifies(&cost_b_prime, size_b_prime) {
            candidates.push((RoundingChoice::BPrime, size_b_prime, &cost_b_prime, &b_prime));
        }
        if qualifies(&cost_a_prime, size_a_prime) {
            candidates.push((RoundingChoice::APrime, size_a_prime, &cost_a_prime, &a_prime));
        }
        if candidates.is_empty() {
            return Err(invariant(
                "rounding: neither redistribution half satisfies the selection inequality".into(),
            ));
        }
        let &(choice, size_x, cost_x, mask_x) = candidates
            .iter()
            .min_by_key(|(_, size, _, _)| (size.abs_diff(k), *size))
            .expect("candidates checked non-empty");
        let mut step = RoundingStep {
            size_a: pair.size_a,
            size_b: pair.size_b,
            cost_a: pair.cost_a.clone(),
            cost_b: pair.cost_b.clone(),
            clean,
            size_a_prime,
            size_b_prime,
            cost_a_prime: cost_a_prime.clone(),
            cost_b_prime: cost_b_prime.clone(),
            chosen: choice,
            chosen_size: size_x,
            f_before: pair.f(k),
            f_after: None,
        };
        if size_x == k {
            if *cost_x != f_target {
                return Err(invariant(format!(
                    "rounding: budget-sized set costs {cost_x}, expected the LP optimum {f_target}"
                )));
            }
            steps.push(step);
            return Ok((mask_x.clone(), cost_x.clone()));
        }
        let successor = if size_x < k {
            MaskPair {
                a: mask_x.clone(),
                size_a: size_x,
                cost_a: cost_x.clone(),
                b: pair.b,
                size_b: pair.size_b,
                cost_b: pair.cost_b,
            }
        } else {
            MaskPair {
                a: pair.a,
                size_a: pair.size_a,
                cost_a: pair.cost_a,
                b: mask_x.clone(),
                size_b: size_x,
                cost_b: cost_x.clone(),
            }
        };
        if successor.size_b - successor.size_a >= step.size_b - step.size_a {
            return Err(invariant("rounding: cardinality gap failed to shrink".into()));
        }
        let f_after = successor.f(k);
        if f_after != f_target {
            return Err(invariant(format!(
                "rounding: successor pair has f = {f_after}, drifting from the LP optimum {f_target}"
            )));
        }
        step.f_after = Some(f_after);
        steps.push(step);
        pair = successor;
    }
    Err(invariant(format!(
        "rounding failed to terminate within {} iterations",
        n + 2
    )))
}

// ---------------------------------------------------------------------------
// Public stage wrappers
// ---------------------------------------------------------------------------

fn require_pipeline_preconditions(instance: &Instance) -> Result<()> {
    if !instance.is_square() {
        return Err(Error::Precondition(
            "pair narrowing requires a normalized (square) instance".into(),
        ));
    }
    let k = instance.k();
    let n = instance.n_suppliers();
    if k == 0 || k >= n {
        return Err(Error::Precondition(format!(
            "pair narrowing requires 0 < k < |I|, got k = {k}, |I| = {n}"
        )));
    }
    Ok(())
}

/// Narrow from `(∅, I)` to an optimal pair, or solve outright when a
/// Lagrangian minimizer of size exactly `k` appears.
///
/// Requires a normalized instance with `0 < k < |I|`; [`solve`] handles the
/// boundary budgets separately.
pub fn find_optimal_pair(instance: &Instance) -> Result<PairOutcome> {
    require_pipeline_preconditions(instance)?;
    let mut steps = Vec::new();
    match narrow(instance, &mut steps)? {
        StageOutcome::Pair(p) => Ok(PairOutcome::Pair(p.to_pair(instance))),
        StageOutcome::Solved { mask, value } => Ok(PairOutcome::Solved(assemble_solution(
            instance, instance, &mask, value,
        )?)),
    }
}

/// Drop upgrades wasted on zero-demand customers from both sets of an
/// optimal pair; costs are preserved exactly. If `B` shrinks to `|B'| ≤ k`
/// the pair's LP bound is attained by `B'` itself and the result is a
/// finished [`Solution`] (padded to exactly `min(k, |I|)` upgrades).
pub fn simplify_pair(instance: &Instance, pair: &Pair) -> Result<PairOutcome> {
    let masks = MaskPair::from_masks(instance, pair.a.mask(instance)?, pair.b.mask(instance)?);
    let mut record = None;
    match simplify_masks(instance, masks, &mut record)? {
        StageOutcome::Pair(p) => Ok(PairOutcome::Pair(p.to_pair(instance))),
        StageOutcome::Solved { mask, value } => Ok(PairOutcome::Solved(assemble_solution(
            instance, instance, &mask, value,
        )?)),
    }
}

/// Is the symmetric difference `A △ B` free of strictly nested
/// `(b, c)` intervals?
pub fn is_clean(instance: &Instance, a: &UpgradeSet, b: &UpgradeSet) -> Result<bool> {
    Ok(clean_masks(instance, &a.mask(instance)?, &b.mask(instance)?))
}

/// One redistribution of a clean pair: the sorted `A △ B` is dealt
/// alternately on top of `A ∩ B` — odd 1-indexed positions to `B'`, even to
/// `A'` — so that `|A| < |A'| ≤ |B'| < |B|`. For clean *optimal* pairs the
/// deal additionally guarantees
/// `cost(A') + cost(B') ≤ cost(A) + cost(B)`; the rounding loop asserts that
/// at runtime.
pub fn redistribute(instance: &Instance, pair: &Pair) -> Result<(UpgradeSet, UpgradeSet)> {
    let a = pair.a.mask(instance)?;
    let b = pair.b.mask(instance)?;
    if !clean_masks(instance, &a, &b) {
        return Err(Error::Precondition(
            "redistribute requires a clean pair (no strictly nested (b, c) intervals in A △ B)"
                .into(),
        ));
    }
    let (a_prime, b_prime) = redistribute_masks(instance, &a, &b);
    Ok((
        UpgradeSet::from_mask(instance, &a_prime),
        UpgradeSet::from_mask(instance, &b_prime),
    ))
}

/// Round a clean optimal pair down to an exact integral optimum of size
/// exactly `k` by iterated redistribution.
pub fn round_pair(instance: &Instance, pair: &Pair) -> Result<Solution> {
    let masks = MaskPair::from_masks(instance, pair.a.mask(instance)?, pair.b.mask(instance)?);
    let mut steps = Vec::new();
    let (mask, value) = round_masks(instance, masks, &mut steps)?;
    assemble_solution(instance, instance, &mask, value)
}

// ---------------------------------------------------------------------------
// Full solve
// ---------------------------------------------------------------------------

/// Build the reported [`Solution`] from a winning mask on the normalized
/// instance: canonical assignment, dummy customers stripped, upgrade set
/// padded to exactly `min(k, |I|)` members, and the value re-verified
/// against [`instance::evaluate`] on the original instance.
fn assemble_solution(
    original: &Instance,
    normalized: &Instance,
    mask: &[bool],
    value: Rational,
) -> Result<Solution> {
    let (pairs, matched_value) = instance::optimal_assignment_indices(normalized, mask);
    if matched_value != value {
        return Err(invariant(format!(
            "solution assembly: assignment value {matched_value} differs from claimed optimum {value}"
        )));
    }
    // Dummy customers appended by normalization sit at indices ≥ the
    // original customer count; everything below maps back verbatim.
    let m = original.n_customers();
    let mut assignment = instance::Assignment::new();
    let mut matched_real_customer: Vec<Option<usize>> = vec![None; normalized.n_suppliers()];
    for (i, j) in pairs {
        if j < m {
            matched_real_customer[i] = Some(j);
            assignment.insert(
                original.customers()[j].id.clone(),
                original.suppliers()[i].id.clone(),
            );
        }
    }
    // Pad to exactly min(k, n) upgrades. At a true optimum every candidate
    // is value-neutral, but only provably-neutral suppliers are accepted:
    // unassigned ones, or assigned ones whose upgrade discount × demand is 0.
    let target = original.k().min(original.n_suppliers());
    let mut padded = mask.to_vec();
    let mut count = padded.iter().filter(|&&x| x).count();
    if count > target {
        return Err(invariant(format!(
            "solution assembly: {count} upgrades exceed the budget target {target}"
        )));
    }
    for i in 0..original.n_suppliers() {
        if count == target {
            break;
        }
        if padded[i] {
            continue;
        }
        let neutral = match matched_real_customer[i] {
            None => true,
            Some(j) => {
                let s = &original.suppliers()[i];
                let discount = &s.base_cost - &s.upgraded_cost;
                (discount * &original.customers()[j].demand).is_zero()
            }
        };
        if neutral {
            padded[i] = true;
            count += 1;
        }
    }
    if count != target {
        return Err(invariant(format!(
            "solution assembly: only {count} of {target} upgrades could be padded without \
             changing the value — the claimed optimum cannot be optimal"
        )));
    }
    let upgrades = UpgradeSet::from_mask(original, &padded);
    let check = instance::evaluate(original, &upgrades, &assignment)?;
    if check != value {
        return Err(invariant(format!(
            "solution assembly: evaluate() gives {check}, claimed optimum is {value}"
        )));
    }
    Ok(Solution { upgrades, assignment, value })
}

/// Solve an instance exactly. Convenience wrapper over [`solve_with_trace`].
pub fn solve(instance: &Instance) -> Result<Solution> {
    Ok(solve_with_trace(instance)?.0)
}

/// Solve an instance exactly and return the full decision trace.
///
/// Pipeline: normalize → boundary budgets (`k = 0`, `k = |I|`) directly via
/// the sorting rule → narrowing → simplification → rounding. The returned
/// solution always carries exactly `min(k, |I|)` upgrades, an assignment
/// over the original customers only, and a value verified against
/// [`instance::evaluate`].
pub fn solve_with_trace(instance: &Instance) -> Result<(Solution, SolveTrace)> {
    let normalized = instance::normalize(instance);
    let n = normalized.n_suppliers();
    let k = normalized.k();

    let mut narrowing = Vec::new();
    let mut simplification = None;
    let mut rounding = Vec::new();
    let mut shortcut = None;

    let (mask, value) = if k == 0 || k == n {
        shortcut = Some(if k == 0 { "k = 0".to_string() } else { "k = |I|".to_string() });
        let mask = vec![k == n; n];
        let value = instance::cost_of_mask(&normalized, &mask);
        (mask, value)
    } else {
        let outcome = narrow(&normalized, &mut narrowing)?;
        let outcome = match outcome {
            StageOutcome::Pair(pair) => simplify_masks(&normalized, pair, &mut simplification)?,
            solved => solved,
        };
        match outcome {
            StageOutcome::Pair(pair) => round_masks(&normalized, pair, &mut rounding)?,
            StageOutcome::Solved { mask, value } => (mask, value),
        }
    };

    let solution = assemble_solution(instance, &normalized, &mask, value)?;
    let trace = SolveTrace {
        n_suppliers: n,
        n_customers: instance.n_customers(),
        k,
        shortcut,
        narrowing,
        simplification,
        rounding,
        final_solution: solution.clone(),
    };
    debug_assert!(trace.audit().is_ok(), "audit failed: {:?}", trace.audit());
    Ok((solution, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{inst, r, upgrades};

    /// The bundled two-supplier example: (b,c) = (0,1),(2,3), unit demands.
    fn two_supplier(k: usize) -> Instance {
        inst(&[(0, 1), (2, 3)], &[1, 1], k)
    }

    /// Three-supplier instance with optimum 6 at k = 1.
    fn three_supplier() -> Instance {
        inst(&[(0, 1), (1, 1), (1, 4)], &[3, 2, 1], 1)
    }

    /// Greedy-gap instance: (b,c) = (1,5),(0,3),(3,10), demands 1,2,3.
    fn gap_instance(k: usize) -> Instance {
        inst(&[(1, 5), (0, 3), (3, 10)], &[1, 2, 3], k)
    }

    #[test]
    fn pair_construction_validates_sizes_and_costs() {
        let i = gap_instance(2);
        // |A| < k < |B| violated
        assert!(Pair::new(&i, upgrades(&["s1"]), upgrades(&["s1", "s2"])).is_err());
        assert!(Pair::new(&i, upgrades(&[]), upgrades(&["s1"])).is_err());
        // valid
        let p = Pair::new(&i, upgrades(&["s1"]), UpgradeSet::all_suppliers(&i)).unwrap();
        assert_eq!(*p.cost_a(), r("19"));
        assert_eq!(*p.cost_b(), r("5"));
        // cost(A) < cost(B) rejected: A upgrades the useful supplier, B wastes three
        let j = inst(&[(0, 10), (10, 10), (10, 10), (10, 10)], &[5, 1, 1], 2);
        assert!(matches!(
            Pair::new(&j, upgrades(&["s1"]), upgrades(&["s2", "s3", "s4"])),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn f_value_examples() {
        let i = gap_instance(2);
        let p = Pair::new(&i, upgrades(&[]), UpgradeSet::all_suppliers(&i)).unwrap();
        // (29·(3−2) + 5·(2−0)) / 3 = 39/3 = 13
        assert_eq!(f_value(&p, 2).unwrap(), r("13"));
        // midpoint form at k = 1: (29·2 + 5·1)/3 = 21
        assert_eq!(f_value(&p, 1).unwrap(), r("21"));
        // k outside (|A|, |B|) rejected
        assert!(f_value(&p, 0).is_err());
        assert!(f_value(&p, 3).is_err());
    }

    #[test]
    fn f_value_of_an_optimal_pair_hits_the_lp_optimum() {
        // (∅, {1,3}) on the three-supplier instance: cost(∅) = 9, cost({1,3}) = 3,
        // f at k = 1 is (9 + 3)/2 = 6 — exactly the instance's optimum.
        let i = three_supplier();
        let p = Pair::new(&i, upgrades(&[]), upgrades(&["s1", "s3"])).unwrap();
        assert_eq!(*p.cost_a(), r("9"));
        assert_eq!(*p.cost_b(), r("3"));
        assert_eq!(f_value(&p, 1).unwrap(), r("6"));
        assert_eq!(solve(&i).unwrap().value, r("6"));
    }

    #[test]
    fn penalty_examples() {
        let i = gap_instance(2);
        let p = Pair::new(&i, upgrades(&[]), UpgradeSet::all_suppliers(&i)).unwrap();
        // (29 − 5)/3 = 8
        assert_eq!(penalty(&p), r("8"));
        // equal costs → zero penalty
        let flat = inst(&[(2, 2), (3, 3), (4, 4)], &[1, 1, 1], 1);
        let q = Pair::new(&flat, upgrades(&[]), UpgradeSet::all_suppliers(&flat)).unwrap();
        assert_eq!(penalty(&q), r("0"));
    }

    #[test]
    fn is_clean_examples() {
        // A = B → empty symmetric difference → clean
        let i = inst(&[(0, 3), (1, 2)], &[1, 1], 1);
        let a = upgrades(&["s1"]);
        assert!(is_clean(&i, &a, &a).unwrap());
        // (0,3) strictly nests (1,2) → not clean
        assert!(!is_clean(&i, &upgrades(&[]), &upgrades(&["s1", "s2"])).unwrap());
        // boundary contact is not strict nesting → clean
        let j = inst(&[(0, 2), (1, 2)], &[1, 1], 1);
        assert!(is_clean(&j, &upgrades(&[]), &upgrades(&["s1", "s2"])).unwrap());
    }

    #[test]
    fn redistribute_two_element_difference() {
        // A = ∅, B = {s1, s2}, sorted (0,1) < (2,3): B' takes position 1 (s1),
        // A' takes position 2 (s2).
        let i = two_supplier(1);
        let p = Pair::new(&i, upgrades(&[]), upgrades(&["s1", "s2"])).unwrap();
        let (a_prime, b_prime) = redistribute(&i, &p).unwrap();
        assert_eq!(a_prime, upgrades(&["s2"]));
        assert_eq!(b_prime, upgrades(&["s1"]));
    }

    #[test]
    fn redistribute_rejects_unclean_pairs() {
        let i = inst(&[(0, 3), (1, 2), (2, 4)], &[1, 1, 1], 1);
        let p = Pair::new(&i, upgrades(&[]), upgrades(&["s1", "s2"])).unwrap();
        assert!(matches!(redistribute(&i, &p), Err(Error::Precondition(_))));
    }

    #[test]
    fn round_pair_on_the_two_supplier_instance() {
        let i = two_supplier(1);
        let p = Pair::new(&i, upgrades(&[]), upgrades(&["s1", "s2"])).unwrap();
        let sol = round_pair(&i, &p).unwrap();
        assert_eq!(sol.value, r("3"));
        assert_eq!(sol.upgrades.len(), 1);
        // full tie between {s1} and {s2} (both cost 3) resolves to B' = {s1}
        assert_eq!(sol.upgrades, upgrades(&["s1"]));
    }

    #[test]
    fn find_optimal_pair_requires_normalized_interior_budget() {
        let tall = inst(&[(0, 1), (1, 2), (2, 3)], &[1, 1], 1);
        assert!(matches!(find_optimal_pair(&tall), Err(Error::Precondition(_))));
        let boundary = two_supplier(0);
        assert!(matches!(find_optimal_pair(&boundary), Err(Error::Precondition(_))));
    }

    #[test]
    fn find_optimal_pair_two_supplier_instance() {
        // λ = 1 makes both edges tie → X* = ∅ → no extreme set → pair (∅, I).
        let i = two_supplier(1);
        match find_optimal_pair(&i).unwrap() {
            PairOutcome::Pair(p) => {
                assert_eq!(p.a().len(), 0);
                assert_eq!(p.b().len(), 2);
                assert_eq!(*p.cost_a(), r("4"));
                assert_eq!(*p.cost_b(), r("2"));
                assert_eq!(f_value(&p, 1).unwrap(), r("3"));
            }
            PairOutcome::Solved(s) => panic!("expected a pair, got solution {s:?}"),
        }
    }

    #[test]
    fn simplify_strips_upgrades_wasted_on_dummies() {
        // 4 suppliers, 2 real customers; normalized to 4 with two dummies.
        // B = I wastes two upgrades on the dummies.
        let i = instance::normalize(&inst(&[(1, 4), (2, 5), (0, 6), (3, 7)], &[3, 1], 2));
        let p = Pair::new(&i, upgrades(&[]), UpgradeSet::all_suppliers(&i)).unwrap();
        match simplify_pair(&i, &p).unwrap() {
            PairOutcome::Solved(sol) => {
                // M_I: effective costs 1,2,0,3 → s3 serves demand 3, s1 serves 1;
                // s2 and s4 land on dummies and drop out, leaving B' = {s1, s3},
                // |B'| = 2 ≤ k → solved at cost(B') = 0·3 + 1·1 = 1.
                assert_eq!(sol.value, r("1"));
                assert_eq!(sol.upgrades, upgrades(&["s1", "s3"]));
                assert_eq!(*p.cost_b(), r("1")); // cost preserved
            }
            PairOutcome::Pair(q) => panic!("expected a solution, got pair {q:?}"),
        }
    }

    #[test]
    fn simplify_keeps_pairs_with_positive_demands_unchanged() {
        let i = gap_instance(2);
        let p = Pair::new(&i, upgrades(&[]), UpgradeSet::all_suppliers(&i)).unwrap();
        match simplify_pair(&i, &p).unwrap() {
            PairOutcome::Pair(q) => {
                assert_eq!(q.a(), p.a());
                assert_eq!(q.b(), p.b());
            }
            PairOutcome::Solved(s) => panic!("expected a pair, got solution {s:?}"),
        }
    }

    #[test]
    fn solve_two_supplier_instance() {
        let (sol, trace) = solve_with_trace(&two_supplier(1)).unwrap();
        assert_eq!(sol.value, r("3"));
        assert_eq!(sol.upgrades.len(), 1);
        trace.audit().unwrap();
    }

    #[test]
    fn solve_three_supplier_instance() {
        let (sol, trace) = solve_with_trace(&three_supplier()).unwrap();
        assert_eq!(sol.value, r("6"));
        assert_eq!(sol.upgrades.len(), 1);
        trace.audit().unwrap();
    }

    #[test]
    fn solve_gap_instance_all_budgets() {
        let expect = [r("29"), r("19"), r("11"), r("5")];
        for k in 0..=3 {
            let i = gap_instance(k);
            let (sol, trace) = solve_with_trace(&i).unwrap();
            assert_eq!(sol.value, expect[k], "k = {k}");
            assert_eq!(sol.upgrades.len(), k);
            assert_eq!(
                instance::evaluate(&i, &sol.upgrades, &sol.assignment).unwrap(),
                sol.value
            );
            trace.audit().unwrap();
        }
        // the k = 2 optimum upgrades suppliers 2 and 3
        assert_eq!(solve(&gap_instance(2)).unwrap().upgrades, upgrades(&["s2", "s3"]));
    }

    #[test]
    fn solve_boundary_budgets_take_the_shortcut() {
        let (sol, trace) = solve_with_trace(&gap_instance(0)).unwrap();
        assert_eq!(sol.value, r("29"));
        assert_eq!(trace.shortcut.as_deref(), Some("k = 0"));
        assert!(trace.narrowing.is_empty() && trace.rounding.is_empty());
        let (sol, trace) = solve_with_trace(&gap_instance(3)).unwrap();
        assert_eq!(sol.value, r("5"));
        assert_eq!(trace.shortcut.as_deref(), Some("k = |I|"));
        trace.audit().unwrap();
    }

    #[test]
    fn solve_useless_upgrades_instance() {
        // all b = c: every budget yields cost(∅), via the degenerate λ = 0 path
        let i = inst(&[(3, 3), (1, 1), (4, 4)], &[3, 1, 2], 2);
        let (sol, trace) = solve_with_trace(&i).unwrap();
        assert_eq!(sol.value, r("13")); // 1·3 + 3·2 + 4·1
        assert_eq!(sol.upgrades.len(), 2);
        trace.audit().unwrap();
    }

    #[test]
    fn solve_non_square_instance_strips_dummies_and_pads() {
        // 3 suppliers, 1 customer, k = 1: upgrade s1 to serve demand 2 at 0.
        let i = inst(&[(0, 4), (1, 2), (2, 2)], &[2], 1);
        let (sol, trace) = solve_with_trace(&i).unwrap();
        assert_eq!(sol.value, r("0"));
        assert_eq!(sol.assignment.len(), 1);
        assert_eq!(sol.assignment.supplier_for("c1"), Some("s1"));
        assert_eq!(sol.upgrades.len(), 1);
        trace.audit().unwrap();
    }

    #[test]
    fn solve_instance_with_no_customers() {
        let i = Instance::new(
            vec![
                crate::Supplier { id: "s1".into(), base_cost: r("2"), upgraded_cost: r("1") },
                crate::Supplier { id: "s2".into(), base_cost: r("3"), upgraded_cost: r("0") },
            ],
            vec![],
            1,
        )
        .unwrap();
        let (sol, trace) = solve_with_trace(&i).unwrap();
        assert_eq!(sol.value, r("0"));
        assert!(sol.assignment.is_empty());
        assert_eq!(sol.upgrades.len(), 1);
        trace.audit().unwrap();
    }

    #[test]
    fn solve_matches_oracle_on_fractional_costs() {
        // decimal data: (b,c) = (0.9,2),(2,5),(2,3),(3,5), demands 4,3,2,1
        let suppliers = [
            ("0.9".to_string(), "2".to_string()),
            ("2".to_string(), "5".to_string()),
            ("2".to_string(), "3".to_string()),
            ("3".to_string(), "5".to_string()),
        ];
        let demands: Vec<String> = ["4", "3", "2", "1"].iter().map(|s| s.to_string()).collect();
        for k in 0..=4 {
            let i = crate::testutil::inst_r(&suppliers, &demands, k);
            let (sol, trace) = solve_with_trace(&i).unwrap();
            let oracle = crate::oracle::brute_force(&i).unwrap();
            assert_eq!(sol.value, oracle.value, "k = {k}");
            trace.audit().unwrap();
        }
    }

    #[test]
    fn solve_matches_oracle_on_a_seeded_mini_sweep() {
        for seed in 0..60u64 {
            let base = crate::generator::random_instance(seed, 6);
            for k in 0..=base.n_suppliers() {
                let i = base.with_budget(k).unwrap();
                let (sol, trace) = solve_with_trace(&i)
                    .unwrap_or_else(|e| panic!("seed {seed}, k = {k}: {e}"));
                let oracle = crate::oracle::brute_force(&i).unwrap();
                assert_eq!(sol.value, oracle.value, "seed {seed}, k = {k}");
                trace.audit().unwrap_or_else(|e| panic!("seed {seed}, k = {k}: {e}"));
            }
        }
    }

    #[test]
    fn trace_audit_rejects_tampering() {
        let (_, mut trace) = solve_with_trace(&gap_instance(2)).unwrap();
        assert!(!trace.narrowing.is_empty());
        trace.narrowing[0].penalty = r("-1");
        assert!(matches!(trace.audit(), Err(Error::Invariant(_))));
    }
}
