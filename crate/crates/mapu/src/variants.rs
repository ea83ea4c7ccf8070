//! Constrained variants of the upgrade problem and their integrality-gap
//! fixtures.
//!
//! The core model's LP relaxation always has an integral optimum — that is
//! what [`crate::solver`] exploits. This module makes the *boundary* of that
//! guarantee executable: three natural extensions — forbidden supplier/
//! customer edges ([`EdgeMask`]), per-group upgrade budgets
//! ([`PartitionBudget`]), and demand-reducing customer upgrades
//! ([`DualUpgradeSpec`]) — each admit a small instance whose best fractional
//! LP point is strictly cheaper than every integral solution. For each
//! variant the module provides exact brute-force optima, an exact evaluator
//! for explicit fractional points, and [`builtin_fixtures`]: instances that
//! carry their expected values and a verification checklist
//! ([`verify_fixture`]) reproducing every claimed number.
//!
//! No solver is provided for the variants — the point of the fixtures is
//! precisely that the rounding argument behind [`crate::solver::solve`]
//! cannot work for them.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{self, Assignment, Instance, UpgradeSet};
use crate::oracle;
use crate::rational::Rational;

/// Largest instance (suppliers) accepted by [`brute_force_masked`], which
/// enumerates matchings.
pub const MASKED_CAP: usize = 8;
/// Largest instance (suppliers) accepted by [`brute_force_partition`].
pub const PARTITION_CAP: usize = 12;
/// Largest instance (suppliers + customers) accepted by [`brute_force_dual`].
pub const DUAL_CAP: usize = 12;

// ---------------------------------------------------------------------------
// Variant constraint types
// ---------------------------------------------------------------------------

/// Which supplier/customer pairs may be assigned at all.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeMask {
    allowed: BTreeSet<(String, String)>,
}

impl EdgeMask {
    /// Build from explicit `(supplier id, customer id)` pairs; must be
    /// non-empty.
    pub fn new<I, S, C>(pairs: I) -> Result<EdgeMask>
    where
        I: IntoIterator<Item = (S, C)>,
        S: Into<String>,
        C: Into<String>,
    {
        let allowed: BTreeSet<(String, String)> =
            pairs.into_iter().map(|(s, c)| (s.into(), c.into())).collect();
        if allowed.is_empty() {
            return Err(Error::InvalidInstance("edge mask must allow at least one edge".into()));
        }
        Ok(EdgeMask { allowed })
    }

    /// The complete bipartite mask of an instance minus the given forbidden
    /// pairs.
    pub fn complete_except(
        instance: &Instance,
        forbidden: &[(&str, &str)],
    ) -> Result<EdgeMask> {
        let forbidden: BTreeSet<(&str, &str)> = forbidden.iter().copied().collect();
        EdgeMask::new(
            instance
                .suppliers()
                .iter()
                .flat_map(|s| instance.customers().iter().map(move |c| (s, c)))
                .filter(|(s, c)| !forbidden.contains(&(s.id.as_str(), c.id.as_str())))
                .map(|(s, c)| (s.id.clone(), c.id.clone())),
        )
    }

    pub fn allows(&self, supplier: &str, customer: &str) -> bool {
        self.allowed.contains(&(supplier.to_string(), customer.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.allowed.iter().map(|(s, c)| (s.as_str(), c.as_str()))
    }

    /// Every referenced id must exist in the instance.
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        let suppliers = instance.supplier_index();
        let customers = instance.customer_index();
        for (s, c) in &self.allowed {
            if !suppliers.contains_key(s.as_str()) {
                return Err(Error::UnknownSupplier(s.clone()));
            }
            if !customers.contains_key(c.as_str()) {
                return Err(Error::UnknownCustomer(c.clone()));
            }
        }
        Ok(())
    }
}

/// Per-group upgrade budgets over a partition of the supplier set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionBudget {
    groups: Vec<(BTreeSet<String>, usize)>,
}

impl PartitionBudget {
    pub fn new(groups: Vec<(BTreeSet<String>, usize)>) -> Result<PartitionBudget> {
        if groups.is_empty() {
            return Err(Error::InvalidInstance("partition budget needs at least one group".into()));
        }
        Ok(PartitionBudget { groups })
    }

    pub fn groups(&self) -> &[(BTreeSet<String>, usize)] {
        &self.groups
    }

    /// The groups must partition the instance's supplier set exactly.
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for (group, _) in &self.groups {
            for id in group {
                if !seen.insert(id.as_str()) {
                    return Err(Error::InvalidInstance(format!(
                        "supplier `{id}` appears in more than one budget group"
                    )));
                }
            }
        }
        for s in instance.suppliers() {
            if !seen.remove(s.id.as_str()) {
                return Err(Error::InvalidInstance(format!(
                    "supplier `{}` is missing from the budget groups",
                    s.id
                )));
            }
        }
        if let Some(extra) = seen.iter().next() {
            return Err(Error::UnknownSupplier((*extra).to_string()));
        }
        Ok(())
    }
}

/// Customer-side upgrades: upgrading customer `j` lowers its demand to
/// `d'_j ≤ d_j`, and supplier and customer upgrades share one budget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualUpgradeSpec {
    /// `d'_j` per customer; customers absent from the map cannot be
    /// meaningfully upgraded (`d'_j = d_j`).
    upgraded_demands: BTreeMap<String, Rational>,
    /// Total budget shared by supplier and customer upgrades.
    k: usize,
}

impl DualUpgradeSpec {
    pub fn new(upgraded_demands: BTreeMap<String, Rational>, k: usize) -> DualUpgradeSpec {
        DualUpgradeSpec { upgraded_demands, k }
    }

    pub fn upgraded_demands(&self) -> &BTreeMap<String, Rational> {
        &self.upgraded_demands
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Referenced customers must exist with `0 ≤ d'_j ≤ d_j`.
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        let customers = instance.customer_index();
        for (id, reduced) in &self.upgraded_demands {
            let Some(&j) = customers.get(id.as_str()) else {
                return Err(Error::UnknownCustomer(id.clone()));
            };
            let original = &instance.customers()[j].demand;
            if reduced.is_negative() || reduced > original {
                return Err(Error::InvalidInstance(format!(
                    "upgraded demand for `{id}` must lie in [0, {original}], got {reduced}"
                )));
            }
        }
        if self.k > instance.n_suppliers() + instance.n_customers() {
            return Err(Error::InvalidInstance(format!(
                "dual budget {} exceeds the number of upgradeable entities",
                self.k
            )));
        }
        Ok(())
    }
}

/// A variant problem: the core model or one of its three extensions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Variant {
    /// The core model (total supplier budget from the instance).
    Plain,
    /// Only masked edges may be used.
    Masked(EdgeMask),
    /// Per-group supplier budgets replace the total budget.
    Partition(PartitionBudget),
    /// Shared supplier/customer upgrade budget.
    Dual(DualUpgradeSpec),
}

impl Variant {
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        match self {
            Variant::Plain => Ok(()),
            Variant::Masked(m) => m.validate(instance),
            Variant::Partition(p) => p.validate(instance),
            Variant::Dual(d) => d.validate(instance),
        }
    }
}

// ---------------------------------------------------------------------------
// Fractional solutions
// ---------------------------------------------------------------------------

/// Whether a fractional entry buys at the supplier's upgraded or base rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rate {
    Upgraded,
    Base,
}

/// One weighted edge of a fractional LP point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FractionalEntry {
    pub supplier: String,
    pub customer: String,
    pub rate: Rate,
    pub weight: Rational,
}

/// An explicit fractional LP point: weighted, rate-annotated edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FractionalSolution {
    pub entries: Vec<FractionalEntry>,
}

impl FractionalSolution {
    pub fn new(entries: Vec<FractionalEntry>) -> FractionalSolution {
        FractionalSolution { entries }
    }

    /// The fractional image of an integral solution: every assigned edge at
    /// weight 1, rated by upgrade-set membership.
    pub fn from_integral(
        instance: &Instance,
        upgrades: &UpgradeSet,
        assignment: &Assignment,
    ) -> Result<FractionalSolution> {
        // Reuse the full integral validation (unknown ids, injectivity, …).
        instance::evaluate(instance, upgrades, assignment)?;
        let entries = assignment
            .iter()
            .map(|(customer, supplier)| FractionalEntry {
                supplier: supplier.to_string(),
                customer: customer.to_string(),
                rate: if upgrades.contains(supplier) { Rate::Upgraded } else { Rate::Base },
                weight: Rational::one(),
            })
            .collect();
        Ok(FractionalSolution { entries })
    }

    /// Convex combination `Σ αᵢ · fsᵢ`; the weights must be non-negative and
    /// sum to 1. Entries with the same (supplier, customer, rate) aggregate.
    pub fn mix(parts: &[(Rational, &FractionalSolution)]) -> Result<FractionalSolution> {
        let total: Rational = parts.iter().map(|(alpha, _)| alpha.clone()).sum();
        if parts.iter().any(|(alpha, _)| alpha.is_negative()) || total != Rational::one() {
            return Err(Error::InfeasibleFractional(format!(
                "mix coefficients must be non-negative and sum to 1, got total {total}"
            )));
        }
        let mut acc: BTreeMap<(String, String, Rate), Rational> = BTreeMap::new();
        for (alpha, fs) in parts {
            for e in &fs.entries {
                let key = (e.supplier.clone(), e.customer.clone(), e.rate);
                let w = alpha.clone() * &e.weight;
                acc.entry(key).and_modify(|v| *v += w.clone()).or_insert(w);
            }
        }
        Ok(FractionalSolution {
            entries: acc
                .into_iter()
                .filter(|(_, w)| !w.is_zero())
                .map(|((supplier, customer, rate), weight)| FractionalEntry {
                    supplier,
                    customer,
                    rate,
                    weight,
                })
                .collect(),
        })
    }
}

/// Exact objective of a fractional point, after checking LP feasibility
/// under the given variant: weights in `[0, 1]`, every customer served with
/// total weight exactly 1, no supplier oversubscribed, masked edges
/// respected, and the upgraded mass within the (per-group) budget.
///
/// [`Variant::Dual`] points carry customer upgrades, which edge weightings
/// cannot express — certify those via convex combinations of integral
/// solutions instead (see [`FractionalWitness::DualMix`]).
pub fn eval_fractional(
    instance: &Instance,
    variant: &Variant,
    fs: &FractionalSolution,
) -> Result<Rational> {
    variant.validate(instance)?;
    let mask = match variant {
        Variant::Plain | Variant::Partition(_) => None,
        Variant::Masked(m) => Some(m),
        Variant::Dual(_) => {
            return Err(Error::Precondition(
                "fractional points with customer upgrades are certified via integral mixes, \
                 not edge weightings"
                    .into(),
            ))
        }
    };
    let suppliers = instance.supplier_index();
    let customers = instance.customer_index();
    let one = Rational::one();
    let mut supplier_load = vec![Rational::zero(); instance.n_suppliers()];
    let mut customer_load = vec![Rational::zero(); instance.n_customers()];
    let mut upgraded_load = vec![Rational::zero(); instance.n_suppliers()];
    let mut value = Rational::zero();
    for e in &fs.entries {
        let Some(&i) = suppliers.get(e.supplier.as_str()) else {
            return Err(Error::UnknownSupplier(e.supplier.clone()));
        };
        let Some(&j) = customers.get(e.customer.as_str()) else {
            return Err(Error::UnknownCustomer(e.customer.clone()));
        };
        if e.weight.is_negative() || e.weight > one {
            return Err(Error::InfeasibleFractional(format!(
                "weight {} on ({}, {}) is outside [0, 1]",
                e.weight, e.supplier, e.customer
            )));
        }
        if let Some(mask) = mask {
            if !e.weight.is_zero() && !mask.allows(&e.supplier, &e.customer) {
                return Err(Error::InfeasibleFractional(format!(
                    "positive weight on the forbidden edge ({}, {})",
                    e.supplier, e.customer
                )));
            }
        }
        supplier_load[i] += e.weight.clone();
        customer_load[j] += e.weight.clone();
        let s = &instance.suppliers()[i];
        let unit = match e.rate {
            Rate::Upgraded => {
                upgraded_load[i] += e.weight.clone();
                &s.upgraded_cost
            }
            Rate::Base => &s.base_cost,
        };
        value += e.weight.clone() * unit * &instance.customers()[j].demand;
    }
    for (j, load) in customer_load.iter().enumerate() {
        if *load != one {
            return Err(Error::InfeasibleFractional(format!(
                "customer `{}` is served with total weight {load}, expected exactly 1",
                instance.customers()[j].id
            )));
        }
    }
    for (i, load) in supplier_load.iter().enumerate() {
        if *load > one {
            return Err(Error::InfeasibleFractional(format!(
                "supplier `{}` is used with total weight {load} > 1",
                instance.suppliers()[i].id
            )));
        }
    }
    match variant {
        Variant::Partition(pb) => {
            for (group, budget) in pb.groups() {
                let load: Rational = group
                    .iter()
                    .map(|id| upgraded_load[suppliers[id.as_str()]].clone())
                    .sum();
                if load > Rational::from(*budget) {
                    return Err(Error::InfeasibleFractional(format!(
                        "group {{{}}} carries upgraded weight {load} > its budget {budget}",
                        group.iter().join(", ")
                    )));
                }
            }
        }
        _ => {
            let load: Rational = upgraded_load.iter().cloned().sum();
            if load > Rational::from(instance.k()) {
                return Err(Error::InfeasibleFractional(format!(
                    "total upgraded weight {load} exceeds the budget {}",
                    instance.k()
                )));
            }
        }
    }
    Ok(value)
}

// ---------------------------------------------------------------------------
// Brute-force optima for the variants
// ---------------------------------------------------------------------------

/// Exact optimum when only masked edges may be assigned and at most `k`
/// suppliers may be upgraded.
///
/// Enumerates every mask-respecting perfect matching; for a fixed matching
/// the best upgrade set is simply the `k` largest savings
/// `(c_i − b_i) · d_j` over matched edges, because upgrades act
/// independently per edge.
pub fn brute_force_masked(instance: &Instance, mask: &EdgeMask, k: usize) -> Result<Rational> {
    mask.validate(instance)?;
    let n = instance.n_suppliers();
    let m = instance.n_customers();
    if n > MASKED_CAP {
        return Err(Error::CapExceeded { what: "masked brute force".into(), size: n, cap: MASKED_CAP });
    }
    let allowed: Vec<Vec<bool>> = instance
        .suppliers()
        .iter()
        .map(|s| instance.customers().iter().map(|c| mask.allows(&s.id, &c.id)).collect())
        .collect();
    let mut best: Option<Rational> = None;
    for perm in (0..n).permutations(m) {
        // perm[j] = supplier serving customer j
        if !(0..m).all(|j| allowed[perm[j]][j]) {
            continue;
        }
        let mut base = Rational::zero();
        let mut savings: Vec<Rational> = Vec::with_capacity(m);
        for (j, &i) in perm.iter().enumerate() {
            let s = &instance.suppliers()[i];
            let d = &instance.customers()[j].demand;
            base += &s.base_cost * d;
            savings.push((&s.base_cost - &s.upgraded_cost) * d);
        }
        savings.sort();
        let saved: Rational = savings.iter().rev().take(k).cloned().sum();
        let total = base - saved;
        if best.as_ref().is_none_or(|b| total < *b) {
            best = Some(total);
        }
    }
    best.ok_or_else(|| {
        Error::Infeasible("no perfect matching respects the edge restrictions".into())
    })
}

/// Exact optimum when each budget group may upgrade at most its own quota.
pub fn brute_force_partition(instance: &Instance, budgets: &PartitionBudget) -> Result<Rational> {
    budgets.validate(instance)?;
    let n = instance.n_suppliers();
    if n > PARTITION_CAP {
        return Err(Error::CapExceeded {
            what: "partition brute force".into(),
            size: n,
            cap: PARTITION_CAP,
        });
    }
    let index = instance.supplier_index();
    let group_of: HashMap<usize, usize> = budgets
        .groups()
        .iter()
        .enumerate()
        .flat_map(|(g, (ids, _))| ids.iter().map(move |id| (g, id)))
        .map(|(g, id)| (index[id.as_str()], g))
        .collect();
    let mut best: Option<Rational> = None;
    for bits in 0u32..(1 << n) {
        let mask: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
        let mut counts = vec![0usize; budgets.groups().len()];
        for i in (0..n).filter(|&i| mask[i]) {
            counts[group_of[&i]] += 1;
        }
        if counts.iter().zip(budgets.groups()).any(|(&used, (_, quota))| used > *quota) {
            continue;
        }
        let total = instance::cost_of_mask(instance, &mask);
        if best.as_ref().is_none_or(|b| total < *b) {
            best = Some(total);
        }
    }
    Ok(best.expect("the empty upgrade set always qualifies"))
}

/// Cost of one forced dual choice: suppliers in `x` buy at their upgraded
/// rate, customers in `y` shrink to their upgraded demand, and the
/// assignment is re-optimized by the sorting rule (which applies verbatim —
/// a dual choice just replaces the cost and demand vectors).
fn dual_value(
    instance: &Instance,
    spec: &DualUpgradeSpec,
    x: &UpgradeSet,
    y: &BTreeSet<String>,
) -> Result<Rational> {
    spec.validate(instance)?;
    let supplier_index = instance.supplier_index();
    let customer_index = instance.customer_index();
    for id in x.iter() {
        if !supplier_index.contains_key(id) {
            return Err(Error::UnknownSupplier(id.to_string()));
        }
    }
    for id in y {
        if !customer_index.contains_key(id.as_str()) {
            return Err(Error::UnknownCustomer(id.clone()));
        }
    }
    let mut costs: Vec<Rational> = instance
        .suppliers()
        .iter()
        .map(|s| {
            if x.contains(&s.id) { s.upgraded_cost.clone() } else { s.base_cost.clone() }
        })
        .collect();
    let mut demands: Vec<Rational> = instance
        .customers()
        .iter()
        .map(|c| {
            if y.contains(&c.id) {
                spec.upgraded_demands().get(&c.id).cloned().unwrap_or_else(|| c.demand.clone())
            } else {
                c.demand.clone()
            }
        })
        .collect();
    costs.sort();
    demands.sort_by(|a, b| b.cmp(a));
    Ok(costs.iter().zip(demands.iter()).map(|(c, d)| c * d).sum())
}

/// Exact optimum when suppliers and customers share one upgrade budget:
/// minimum of [`dual_value`] over all `(X, Y)` with `|X| + |Y| ≤ spec.k()`.
pub fn brute_force_dual(instance: &Instance, spec: &DualUpgradeSpec) -> Result<Rational> {
    spec.validate(instance)?;
    let n = instance.n_suppliers();
    let m = instance.n_customers();
    if n + m > DUAL_CAP {
        return Err(Error::CapExceeded {
            what: "dual brute force".into(),
            size: n + m,
            cap: DUAL_CAP,
        });
    }
    let mut best: Option<Rational> = None;
    for sbits in 0u32..(1 << n) {
        let x = UpgradeSet::from_ids(
            (0..n).filter(|i| sbits >> i & 1 == 1).map(|i| instance.suppliers()[i].id.clone()),
        );
        if x.len() > spec.k() {
            continue;
        }
        for cbits in 0u32..(1 << m) {
            let y: BTreeSet<String> = (0..m)
                .filter(|j| cbits >> j & 1 == 1)
                .map(|j| instance.customers()[j].id.clone())
                .collect();
            if x.len() + y.len() > spec.k() {
                continue;
            }
            let total = dual_value(instance, spec, &x, &y)?;
            if best.as_ref().is_none_or(|b| total < *b) {
                best = Some(total);
            }
        }
    }
    Ok(best.expect("the empty choice always qualifies"))
}

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

/// How a fixture certifies its fractional value.
#[derive(Clone, Debug, Serialize)]
pub enum FractionalWitness {
    /// An explicit LP point for [`eval_fractional`].
    Point(FractionalSolution),
    /// A convex combination `Σ αᵢ · (Xᵢ, Yᵢ)` of integral dual solutions;
    /// feasible for the dual LP because the *expected* budget
    /// `Σ αᵢ (|Xᵢ| + |Yᵢ|)` stays within `k`.
    DualMix(Vec<(Rational, UpgradeSet, BTreeSet<String>)>),
}

/// Additional checklist rows beyond the automatic optimum/fractional/gap
/// rows.
#[derive(Clone, Debug, Serialize)]
pub enum CheckSpec {
    /// The exact solver's value on the (core-model) fixture instance.
    Solver(Rational),
    /// Cost of a forced supplier upgrade set under the core model.
    Forced(UpgradeSet, Rational),
    /// The core-model optimum, ignoring the fixture's extra constraints.
    Unrestricted(Rational),
    /// [`dual_value`] of a forced supplier/customer choice.
    ForcedDual(UpgradeSet, BTreeSet<String>, Rational),
    /// [`brute_force_dual`] with the budget overridden.
    DualOptimumAt(usize, Rational),
}

/// A self-verifying example: instance, variant, fractional witness, expected
/// exact values, and extra checklist rows reproducing published quantities.
#[derive(Clone, Debug, Serialize)]
pub struct Fixture {
    pub name: String,
    pub description: String,
    pub instance: Instance,
    pub variant: Variant,
    pub fractional: FractionalWitness,
    pub expected_integral: Rational,
    pub expected_fractional: Rational,
    pub extra_checks: Vec<CheckSpec>,
}

/// One row of a fixture's verification checklist.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixtureCheck {
    pub label: String,
    pub expected: Rational,
    pub got: Rational,
    pub pass: bool,
}

fn check(label: impl Into<String>, expected: Rational, got: Rational) -> FixtureCheck {
    let pass = expected == got;
    FixtureCheck { label: label.into(), expected, got, pass }
}

fn ids_or_none(ids: Vec<&str>) -> String {
    if ids.is_empty() {
        "none".to_string()
    } else {
        format!("{{{}}}", ids.join(", "))
    }
}

/// The variant-appropriate brute-force optimum of a fixture.
fn fixture_optimum(fixture: &Fixture) -> Result<Rational> {
    let instance = &fixture.instance;
    match &fixture.variant {
        Variant::Plain => Ok(oracle::brute_force(instance)?.value),
        Variant::Masked(mask) => brute_force_masked(instance, mask, instance.k()),
        Variant::Partition(pb) => brute_force_partition(instance, pb),
        Variant::Dual(spec) => brute_force_dual(instance, spec),
    }
}

/// The value of a fixture's fractional witness.
fn fixture_fractional(fixture: &Fixture) -> Result<Rational> {
    match (&fixture.fractional, &fixture.variant) {
        (FractionalWitness::Point(fs), variant) => {
            eval_fractional(&fixture.instance, variant, fs)
        }
        (FractionalWitness::DualMix(parts), Variant::Dual(spec)) => {
            let total: Rational = parts.iter().map(|(alpha, _, _)| alpha.clone()).sum();
            if total != Rational::one() || parts.iter().any(|(a, _, _)| a.is_negative()) {
                return Err(Error::InfeasibleFractional(
                    "mix coefficients must be non-negative and sum to 1".into(),
                ));
            }
            let budget: Rational = parts
                .iter()
                .map(|(alpha, x, y)| alpha.clone() * Rational::from(x.len() + y.len()))
                .sum();
            if budget > Rational::from(spec.k()) {
                return Err(Error::InfeasibleFractional(format!(
                    "mix spends expected budget {budget} > {}",
                    spec.k()
                )));
            }
            let mut value = Rational::zero();
            for (alpha, x, y) in parts {
                value += alpha.clone() * dual_value(&fixture.instance, spec, x, y)?;
            }
            Ok(value)
        }
        (FractionalWitness::DualMix(_), _) => Err(Error::Precondition(
            "integral mixes certify dual fixtures only".into(),
        )),
    }
}

/// Run a fixture's entire checklist: the constrained optimum, the fractional
/// witness value, the integrality gap, and every extra row. Each row
/// compares an exactly computed quantity against the fixture's expectation.
pub fn verify_fixture(fixture: &Fixture) -> Result<Vec<FixtureCheck>> {
    fixture.variant.validate(&fixture.instance)?;
    let mut rows = Vec::new();
    let optimum = fixture_optimum(fixture)?;
    let fractional = fixture_fractional(fixture)?;
    let constrained = match fixture.variant {
        Variant::Plain => "enumerated optimum",
        _ => "constrained optimum",
    };
    rows.push(check(constrained, fixture.expected_integral.clone(), optimum.clone()));
    rows.push(check(
        "fractional relaxation value",
        fixture.expected_fractional.clone(),
        fractional.clone(),
    ));
    rows.push(check(
        "integrality gap",
        &fixture.expected_integral - &fixture.expected_fractional,
        optimum - fractional,
    ));
    for spec in &fixture.extra_checks {
        rows.push(match spec {
            CheckSpec::Solver(expected) => check(
                "exact solver value",
                expected.clone(),
                crate::solver::solve(&fixture.instance)?.value,
            ),
            CheckSpec::Forced(x, expected) => check(
                format!("cost with upgrades {}", ids_or_none(x.iter().collect())),
                expected.clone(),
                instance::cost(&fixture.instance, x)?,
            ),
            CheckSpec::Unrestricted(expected) => check(
                "optimum without the extra constraints",
                expected.clone(),
                oracle::brute_force(&fixture.instance)?.value,
            ),
            CheckSpec::ForcedDual(x, y, expected) => {
                let Variant::Dual(spec) = &fixture.variant else {
                    return Err(Error::Precondition(
                        "forced dual rows apply to dual fixtures only".into(),
                    ));
                };
                check(
                    format!(
                        "cost with supplier upgrades {} and customer upgrades {}",
                        ids_or_none(x.iter().collect()),
                        ids_or_none(y.iter().map(String::as_str).collect()),
                    ),
                    expected.clone(),
                    dual_value(&fixture.instance, spec, x, y)?,
                )
            }
            CheckSpec::DualOptimumAt(k, expected) => {
                let Variant::Dual(spec) = &fixture.variant else {
                    return Err(Error::Precondition(
                        "dual optimum rows apply to dual fixtures only".into(),
                    ));
                };
                let overridden = DualUpgradeSpec::new(spec.upgraded_demands().clone(), *k);
                check(
                    format!("optimum with budget {k}"),
                    expected.clone(),
                    brute_force_dual(&fixture.instance, &overridden)?,
                )
            }
        });
    }
    Ok(rows)
}

fn rat(s: &str) -> Rational {
    s.parse().expect("fixture literal must parse")
}

fn entry(supplier: &str, customer: &str, rate: Rate, weight: &str) -> FractionalEntry {
    FractionalEntry {
        supplier: supplier.to_string(),
        customer: customer.to_string(),
        rate,
        weight: rat(weight),
    }
}

fn fixture_instance(suppliers: &[(&str, &str, &str)], customers: &[(&str, &str)], k: usize) -> Instance {
    Instance::new(
        suppliers
            .iter()
            .map(|(id, b, c)| instance::Supplier {
                id: id.to_string(),
                base_cost: rat(c),
                upgraded_cost: rat(b),
            })
            .collect(),
        customers
            .iter()
            .map(|(id, d)| instance::Customer { id: id.to_string(), demand: rat(d) })
            .collect(),
        k,
    )
    .expect("fixture instance must validate")
}

fn set(ids: &[&str]) -> BTreeSet<String> {
    ids.iter().map(|s| s.to_string()).collect()
}

/// The built-in examples: two core-model instances whose LP relaxations are
/// tight (gap zero), and one instance per variant whose best fractional
/// point is strictly cheaper than every integral solution.
pub fn builtin_fixtures() -> Vec<Fixture> {
    let mut fixtures = Vec::new();

    // Core model, two suppliers: the half-integral vertex matches the
    // integral optimum of 3.
    {
        let instance = fixture_instance(
            &[("s1", "0", "1"), ("s2", "2", "3")],
            &[("c1", "1"), ("c2", "1")],
            1,
        );
        fixtures.push(Fixture {
            name: "two-suppliers".into(),
            description: "Two suppliers, unit demands, one upgrade: the relaxation has a \
                          half-integral vertex of value 3, and 3 is also attained integrally — \
                          no gap."
                .into(),
            instance,
            variant: Variant::Plain,
            fractional: FractionalWitness::Point(FractionalSolution::new(vec![
                entry("s1", "c1", Rate::Upgraded, "1/2"),
                entry("s1", "c2", Rate::Upgraded, "1/2"),
                entry("s2", "c1", Rate::Base, "1/2"),
                entry("s2", "c2", Rate::Base, "1/2"),
            ])),
            expected_integral: rat("3"),
            expected_fractional: rat("3"),
            extra_checks: vec![
                CheckSpec::Solver(rat("3")),
                CheckSpec::Forced(UpgradeSet::from_ids(["s1"]), rat("3")),
                CheckSpec::Forced(UpgradeSet::from_ids(["s2"]), rat("3")),
            ],
        });
    }

    // Core model, three suppliers: mixing the no-upgrade matching (cost 9)
    // with the two-upgrade matching (cost 3) spends an expected budget of 1
    // and costs 6 — again attained integrally.
    {
        let instance = fixture_instance(
            &[("s1", "0", "1"), ("s2", "1", "1"), ("s3", "1", "4")],
            &[("c1", "3"), ("c2", "2"), ("c3", "1")],
            1,
        );
        fixtures.push(Fixture {
            name: "three-suppliers".into(),
            description: "Three suppliers, one upgrade: the half/half mix of the no-upgrade \
                          and both-upgrades matchings costs 6, equal to the integral optimum — \
                          no gap."
                .into(),
            instance,
            variant: Variant::Plain,
            fractional: FractionalWitness::Point(FractionalSolution::new(vec![
                entry("s1", "c1", Rate::Base, "1/2"),
                entry("s1", "c1", Rate::Upgraded, "1/2"),
                entry("s2", "c2", Rate::Base, "1"),
                entry("s3", "c3", Rate::Base, "1/2"),
                entry("s3", "c3", Rate::Upgraded, "1/2"),
            ])),
            expected_integral: rat("6"),
            expected_fractional: rat("6"),
            extra_checks: vec![
                CheckSpec::Solver(rat("6")),
                CheckSpec::Forced(UpgradeSet::empty(), rat("9")),
                CheckSpec::Forced(UpgradeSet::from_ids(["s1", "s3"]), rat("3")),
            ],
        });
    }

    // Forbidden edge: s3 cannot serve c2. Every integral solution pays 5,
    // but splitting s1's upgrade across c1 and c2 pays 9/2.
    {
        let instance = fixture_instance(
            &[("s1", "0", "1"), ("s2", "2", "5"), ("s3", "2", "2")],
            &[("c1", "3"), ("c2", "1"), ("c3", "0")],
            1,
        );
        let mask = EdgeMask::complete_except(&instance, &[("s3", "c2")])
            .expect("fixture mask must build");
        fixtures.push(Fixture {
            name: "noncomplete".into(),
            description: "One forbidden edge (s3 cannot serve c2): the integral optimum is 5, \
                          but a half-integral point splitting s1 between c1 and c2 pays 9/2 — \
                          the relaxation is no longer tight."
                .into(),
            instance,
            variant: Variant::Masked(mask),
            fractional: FractionalWitness::Point(FractionalSolution::new(vec![
                entry("s1", "c1", Rate::Upgraded, "1/2"),
                entry("s1", "c2", Rate::Base, "1/2"),
                entry("s2", "c2", Rate::Upgraded, "1/2"),
                entry("s2", "c3", Rate::Base, "1/2"),
                entry("s3", "c1", Rate::Base, "1/2"),
                entry("s3", "c3", Rate::Base, "1/2"),
            ])),
            expected_integral: rat("5"),
            expected_fractional: rat("9/2"),
            extra_checks: vec![CheckSpec::Unrestricted(rat("2"))],
        });
    }

    // Per-group budgets: one upgrade allowed in {s1, s2} and one in
    // {s3, s4}. The four feasible two-upgrade choices cost 24.6, 23.6, 23,
    // 23; spreading each group's budget half/half over its two suppliers
    // pays 22.8.
    {
        let instance = fixture_instance(
            &[
                ("s1", "0.9", "2"),
                ("s2", "2", "5"),
                ("s3", "2", "3"),
                ("s4", "3", "5"),
            ],
            &[("c1", "4"), ("c2", "3"), ("c3", "2"), ("c4", "1")],
            2,
        );
        let budgets = PartitionBudget::new(vec![(set(&["s1", "s2"]), 1), (set(&["s3", "s4"]), 1)])
            .expect("fixture budgets must build");
        fixtures.push(Fixture {
            name: "partition".into(),
            description: "Group budgets (one upgrade per pair of suppliers): the best integral \
                          choice pays 23, while half-upgrading both members of each group pays \
                          22.8."
                .into(),
            instance,
            variant: Variant::Partition(budgets),
            fractional: FractionalWitness::Point(FractionalSolution::new(vec![
                entry("s1", "c1", Rate::Upgraded, "1/2"),
                entry("s1", "c1", Rate::Base, "1/2"),
                entry("s2", "c2", Rate::Upgraded, "1/2"),
                entry("s2", "c4", Rate::Base, "1/2"),
                entry("s3", "c2", Rate::Upgraded, "1/2"),
                entry("s3", "c3", Rate::Base, "1/2"),
                entry("s4", "c3", Rate::Upgraded, "1/2"),
                entry("s4", "c4", Rate::Base, "1/2"),
            ])),
            expected_integral: rat("23"),
            expected_fractional: rat("22.8"),
            extra_checks: vec![
                CheckSpec::Forced(UpgradeSet::from_ids(["s1", "s3"]), rat("24.6")),
                CheckSpec::Forced(UpgradeSet::from_ids(["s1", "s4"]), rat("23.6")),
                CheckSpec::Forced(UpgradeSet::from_ids(["s2", "s3"]), rat("23")),
                CheckSpec::Forced(UpgradeSet::from_ids(["s2", "s4"]), rat("23")),
                CheckSpec::Unrestricted(rat("20.6")),
            ],
        });
    }

    // Shared supplier/customer budget: with two upgrades every integral
    // choice pays at least 113, but mixing the best one-upgrade solution
    // (146) with the best three-upgrade solution (78) spends an expected
    // budget of 2 and pays 112.
    {
        let instance = fixture_instance(
            &[("s1", "7", "7"), ("s2", "2", "5"), ("s3", "1", "3")],
            &[("c1", "9"), ("c2", "15"), ("c3", "20")],
            2,
        );
        let spec = DualUpgradeSpec::new(
            [
                ("c1".to_string(), rat("4")),
                ("c2".to_string(), rat("15")),
                ("c3".to_string(), rat("8")),
            ]
            .into_iter()
            .collect(),
            2,
        );
        fixtures.push(Fixture {
            name: "dual".into(),
            description: "Customers can be upgraded too (their demand shrinks), sharing the \
                          supplier budget: integrally two upgrades pay 113, but averaging a \
                          one-upgrade solution (146) with a three-upgrade solution (78) pays \
                          112."
                .into(),
            instance,
            variant: Variant::Dual(spec),
            fractional: FractionalWitness::DualMix(vec![
                (rat("1/2"), UpgradeSet::empty(), set(&["c3"])),
                (rat("1/2"), UpgradeSet::from_ids(["s2", "s3"]), set(&["c1"])),
            ]),
            expected_integral: rat("113"),
            expected_fractional: rat("112"),
            extra_checks: vec![
                CheckSpec::ForcedDual(UpgradeSet::from_ids(["s2", "s3"]), set(&[]), rat("113")),
                CheckSpec::ForcedDual(UpgradeSet::from_ids(["s2"]), set(&["c1"]), rat("113")),
                CheckSpec::ForcedDual(UpgradeSet::from_ids(["s2"]), set(&["c3"]), rat("113")),
                CheckSpec::ForcedDual(UpgradeSet::from_ids(["s3"]), set(&["c1"]), rat("123")),
                CheckSpec::ForcedDual(UpgradeSet::from_ids(["s3"]), set(&["c3"]), rat("116")),
                CheckSpec::ForcedDual(UpgradeSet::empty(), set(&["c1", "c3"]), rat("113")),
                CheckSpec::DualOptimumAt(1, rat("146")),
                CheckSpec::DualOptimumAt(3, rat("78")),
            ],
        });
    }

    fixtures
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{inst, r, upgrades};

    fn fixture(name: &str) -> Fixture {
        builtin_fixtures()
            .into_iter()
            .find(|f| f.name == name)
            .unwrap_or_else(|| panic!("no fixture named {name}"))
    }

    #[test]
    fn every_builtin_fixture_passes_its_checklist() {
        let fixtures = builtin_fixtures();
        assert_eq!(fixtures.len(), 5);
        for f in &fixtures {
            let rows = verify_fixture(f).unwrap_or_else(|e| panic!("{}: {e}", f.name));
            assert!(!rows.is_empty());
            for row in &rows {
                assert!(
                    row.pass,
                    "{}: `{}` expected {} got {}",
                    f.name, row.label, row.expected, row.got
                );
            }
        }
    }

    #[test]
    fn gap_fixtures_have_strict_gaps_and_core_fixtures_none() {
        for f in builtin_fixtures() {
            match f.variant {
                Variant::Plain => assert_eq!(
                    f.expected_integral, f.expected_fractional,
                    "{} should be tight",
                    f.name
                ),
                _ => assert!(
                    f.expected_fractional < f.expected_integral,
                    "{} should have a strict gap",
                    f.name
                ),
            }
        }
    }

    #[test]
    fn integral_fractional_solution_matches_evaluate() {
        let i = inst(&[(1, 5), (0, 3), (3, 10)], &[1, 2, 3], 2);
        let sol = crate::solver::solve(&i).unwrap();
        let fs = FractionalSolution::from_integral(&i, &sol.upgrades, &sol.assignment).unwrap();
        assert_eq!(eval_fractional(&i, &Variant::Plain, &fs).unwrap(), sol.value);
    }

    #[test]
    fn mix_of_integral_solutions_evaluates_to_the_mixed_value() {
        let i = inst(&[(1, 5), (0, 3), (3, 10)], &[1, 2, 3], 2);
        let (a, a_cost) = {
            let x = upgrades(&["s1", "s2"]);
            let (asg, v) = instance::optimal_assignment(&i, &x).unwrap();
            (FractionalSolution::from_integral(&i, &x, &asg).unwrap(), v)
        };
        let (b, b_cost) = {
            let x = upgrades(&["s2", "s3"]);
            let (asg, v) = instance::optimal_assignment(&i, &x).unwrap();
            (FractionalSolution::from_integral(&i, &x, &asg).unwrap(), v)
        };
        let mixed = FractionalSolution::mix(&[(r("1/3"), &a), (r("2/3"), &b)]).unwrap();
        assert_eq!(
            eval_fractional(&i, &Variant::Plain, &mixed).unwrap(),
            r("1/3") * a_cost + r("2/3") * b_cost
        );
    }

    #[test]
    fn eval_fractional_rejects_infeasible_points() {
        let i = inst(&[(0, 1), (2, 3)], &[1, 1], 1);
        // undercovered customer
        let fs = FractionalSolution::new(vec![entry("s1", "c1", Rate::Base, "1")]);
        assert!(matches!(
            eval_fractional(&i, &Variant::Plain, &fs),
            Err(Error::InfeasibleFractional(_))
        ));
        // oversubscribed supplier
        let fs = FractionalSolution::new(vec![
            entry("s1", "c1", Rate::Base, "1"),
            entry("s1", "c2", Rate::Base, "1"),
        ]);
        assert!(matches!(
            eval_fractional(&i, &Variant::Plain, &fs),
            Err(Error::InfeasibleFractional(_))
        ));
        // budget exceeded: upgraded mass 2 > k = 1
        let fs = FractionalSolution::new(vec![
            entry("s1", "c1", Rate::Upgraded, "1"),
            entry("s2", "c2", Rate::Upgraded, "1"),
        ]);
        assert!(matches!(
            eval_fractional(&i, &Variant::Plain, &fs),
            Err(Error::InfeasibleFractional(_))
        ));
        // unknown id
        let fs = FractionalSolution::new(vec![entry("zz", "c1", Rate::Base, "1")]);
        assert!(matches!(
            eval_fractional(&i, &Variant::Plain, &fs),
            Err(Error::UnknownSupplier(_))
        ));
    }

    #[test]
    fn eval_fractional_enforces_the_mask() {
        let f = fixture("noncomplete");
        let Variant::Masked(mask) = &f.variant else { panic!("expected a masked fixture") };
        let fs = FractionalSolution::new(vec![
            entry("s1", "c1", Rate::Upgraded, "1"),
            entry("s3", "c2", Rate::Base, "1"),
            entry("s2", "c3", Rate::Base, "1"),
        ]);
        assert!(matches!(
            eval_fractional(&f.instance, &Variant::Masked(mask.clone()), &fs),
            Err(Error::InfeasibleFractional(_))
        ));
    }

    #[test]
    fn full_mask_equals_plain_brute_force() {
        let i = inst(&[(1, 5), (0, 3), (3, 10)], &[1, 2, 3], 1);
        let mask = EdgeMask::complete_except(&i, &[]).unwrap();
        assert_eq!(
            brute_force_masked(&i, &mask, 1).unwrap(),
            oracle::brute_force(&i).unwrap().value
        );
    }

    #[test]
    fn masked_brute_force_detects_infeasibility() {
        let i = inst(&[(0, 1), (2, 3)], &[1, 1], 1);
        // both customers can only be served by s1
        let mask = EdgeMask::new([("s1", "c1"), ("s1", "c2")]).unwrap();
        assert!(matches!(brute_force_masked(&i, &mask, 1), Err(Error::Infeasible(_))));
    }

    #[test]
    fn masked_brute_force_respects_the_cap() {
        let i = crate::generator::random_square_integer_instance(1, MASKED_CAP + 1);
        let mask = EdgeMask::complete_except(&i, &[]).unwrap();
        assert!(matches!(
            brute_force_masked(&i, &mask, 1),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn single_group_partition_equals_plain_brute_force() {
        let i = inst(&[(1, 5), (0, 3), (3, 10)], &[1, 2, 3], 2);
        let all: BTreeSet<String> = i.suppliers().iter().map(|s| s.id.clone()).collect();
        let pb = PartitionBudget::new(vec![(all, 2)]).unwrap();
        assert_eq!(
            brute_force_partition(&i, &pb).unwrap(),
            oracle::brute_force(&i).unwrap().value
        );
    }

    #[test]
    fn partition_validation_rejects_non_partitions() {
        let i = inst(&[(0, 1), (2, 3)], &[1, 1], 1);
        // missing supplier
        let pb = PartitionBudget::new(vec![(set(&["s1"]), 1)]).unwrap();
        assert!(pb.validate(&i).is_err());
        // duplicated supplier
        let pb = PartitionBudget::new(vec![(set(&["s1", "s2"]), 1), (set(&["s2"]), 1)]).unwrap();
        assert!(pb.validate(&i).is_err());
        // unknown supplier
        let pb = PartitionBudget::new(vec![(set(&["s1", "s2", "zz"]), 1)]).unwrap();
        assert!(pb.validate(&i).is_err());
    }

    #[test]
    fn dual_with_zero_budget_is_the_unupgraded_cost() {
        let f = fixture("dual");
        let Variant::Dual(spec) = &f.variant else { panic!("expected the dual fixture") };
        let zero = DualUpgradeSpec::new(spec.upgraded_demands().clone(), 0);
        assert_eq!(
            brute_force_dual(&f.instance, &zero).unwrap(),
            instance::cost(&f.instance, &UpgradeSet::empty()).unwrap()
        );
    }

    #[test]
    fn dual_spec_validation_rejects_bad_demands() {
        let i = inst(&[(0, 1), (2, 3)], &[1, 1], 1);
        let bad = DualUpgradeSpec::new([("c1".to_string(), r("2"))].into_iter().collect(), 1);
        assert!(bad.validate(&i).is_err());
        let unknown = DualUpgradeSpec::new([("zz".to_string(), r("0"))].into_iter().collect(), 1);
        assert!(matches!(unknown.validate(&i), Err(Error::UnknownCustomer(_))));
    }

    #[test]
    fn noncomplete_missing_edge_is_what_costs_the_extra_half() {
        // Dropping the restriction recovers the cheap solution: 2 vs 5.
        let f = fixture("noncomplete");
        let unrestricted = oracle::brute_force(&f.instance).unwrap().value;
        assert_eq!(unrestricted, r("2"));
        let Variant::Masked(mask) = &f.variant else { panic!("expected a masked fixture") };
        let constrained = brute_force_masked(&f.instance, mask, f.instance.k()).unwrap();
        assert_eq!(constrained, r("5"));
    }
}
