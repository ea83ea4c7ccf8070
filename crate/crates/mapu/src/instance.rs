//! Problem model and the fixed-upgrade-set primitives.
//!
//! An instance pairs suppliers (unit base cost `c_i`, unit upgraded cost
//! `b_i` with `0 <= b_i <= c_i`) with customers (demand `d_j >= 0`) and a
//! budget `k` of suppliers that may be upgraded. An assignment maps every
//! customer to a distinct supplier; its value is the sum of
//! `demand * effective unit cost` over customers. For a *fixed* upgrade set
//! the optimal assignment is computed directly by a sorting rule: suppliers
//! by effective cost non-decreasing, customers by demand non-increasing,
//! matched in order. That rule defines [`cost`], the function everything
//! else in the crate is built on.

use crate::error::{Error, Result};
use crate::rational::Rational;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

/// Reserved marker embedded in the ids of customers that [`normalize`]
/// appends. Input customers may only carry it with zero demand (so that
/// serialized normalized instances parse back), and reports strip such
/// customers.
pub const DUMMY_MARKER: &str = "~dummy";

/// A supplier with per-unit base cost `c` and upgraded cost `b`, `0 <= b <= c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Supplier {
    pub id: String,
    pub base_cost: Rational,
    pub upgraded_cost: Rational,
}

/// A customer with non-negative demand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Customer {
    pub id: String,
    pub demand: Rational,
}

/// A validated problem instance.
///
/// Invariants enforced at construction:
/// * at least as many suppliers as customers,
/// * `0 <= k <= #suppliers`,
/// * `0 <= upgraded_cost <= base_cost` per supplier, `demand >= 0` per
///   customer,
/// * unique, non-empty ids; the [`DUMMY_MARKER`] only on zero-demand
///   customers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Instance {
    suppliers: Vec<Supplier>,
    customers: Vec<Customer>,
    k: usize,
}

impl Instance {
    pub fn new(suppliers: Vec<Supplier>, customers: Vec<Customer>, k: usize) -> Result<Self> {
        if suppliers.is_empty() {
            return Err(Error::InvalidInstance("at least one supplier required".into()));
        }
        if suppliers.len() < customers.len() {
            return Err(Error::InvalidInstance(format!(
                "need at least as many suppliers as customers, got {} suppliers for {} customers",
                suppliers.len(),
                customers.len()
            )));
        }
        if k > suppliers.len() {
            return Err(Error::InvalidInstance(format!(
                "budget k = {k} exceeds the number of suppliers {}",
                suppliers.len()
            )));
        }
        let mut seen = HashSet::new();
        for s in &suppliers {
            if s.id.is_empty() {
                return Err(Error::InvalidInstance("empty supplier id".into()));
            }
            if s.id.contains(DUMMY_MARKER) {
                return Err(Error::InvalidInstance(format!(
                    "supplier id `{}` uses the reserved marker `{DUMMY_MARKER}`",
                    s.id
                )));
            }
            if !seen.insert(&s.id) {
                return Err(Error::InvalidInstance(format!("duplicate supplier id `{}`", s.id)));
            }
            if s.upgraded_cost.is_negative() {
                return Err(Error::InvalidInstance(format!(
                    "supplier `{}` has negative upgraded cost {}",
                    s.id, s.upgraded_cost
                )));
            }
            if s.upgraded_cost > s.base_cost {
                return Err(Error::InvalidInstance(format!(
                    "supplier `{}` has upgraded cost {} above base cost {}",
                    s.id, s.upgraded_cost, s.base_cost
                )));
            }
        }
        let mut seen = HashSet::new();
        for c in &customers {
            if c.id.is_empty() {
                return Err(Error::InvalidInstance("empty customer id".into()));
            }
            if !seen.insert(&c.id) {
                return Err(Error::InvalidInstance(format!("duplicate customer id `{}`", c.id)));
            }
            if c.demand.is_negative() {
                return Err(Error::InvalidInstance(format!(
                    "customer `{}` has negative demand {}",
                    c.id, c.demand
                )));
            }
            if c.id.contains(DUMMY_MARKER) && !c.demand.is_zero() {
                return Err(Error::InvalidInstance(format!(
                    "customer id `{}` uses the reserved marker `{DUMMY_MARKER}` but has non-zero demand",
                    c.id
                )));
            }
        }
        Ok(Instance { suppliers, customers, k })
    }

    pub fn suppliers(&self) -> &[Supplier] {
        &self.suppliers
    }

    pub fn customers(&self) -> &[Customer] {
        &self.customers
    }

    /// Upgrade budget: at most `k` suppliers may be upgraded.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_suppliers(&self) -> usize {
        self.suppliers.len()
    }

    pub fn n_customers(&self) -> usize {
        self.customers.len()
    }

    /// True when `#suppliers == #customers`.
    pub fn is_square(&self) -> bool {
        self.suppliers.len() == self.customers.len()
    }

    /// Same instance with a different budget.
    pub fn with_budget(&self, k: usize) -> Result<Instance> {
        Instance::new(self.suppliers.clone(), self.customers.clone(), k)
    }

    /// supplier id -> index lookup.
    pub(crate) fn supplier_index(&self) -> HashMap<&str, usize> {
        self.suppliers
            .iter()
            .enumerate()
            .map(|(i, s)| (s.id.as_str(), i))
            .collect()
    }

    /// customer id -> index lookup.
    pub(crate) fn customer_index(&self) -> HashMap<&str, usize> {
        self.customers
            .iter()
            .enumerate()
            .map(|(j, c)| (c.id.as_str(), j))
            .collect()
    }
}

/// A set of supplier ids selected for upgrade.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct UpgradeSet(BTreeSet<String>);

impl UpgradeSet {
    pub fn empty() -> Self {
        UpgradeSet(BTreeSet::new())
    }

    pub fn from_ids<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        UpgradeSet(ids.into_iter().map(Into::into).collect())
    }

    /// Every supplier of the instance.
    pub fn all_suppliers(instance: &Instance) -> Self {
        UpgradeSet(instance.suppliers.iter().map(|s| s.id.clone()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.0.contains(id)
    }

    pub fn insert(&mut self, id: impl Into<String>) {
        self.0.insert(id.into());
    }

    pub fn remove(&mut self, id: &str) {
        self.0.remove(id);
    }

    /// Ids in sorted order.
    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    /// Membership mask over the instance's supplier indices; errors on
    /// members that do not exist in the instance.
    pub(crate) fn mask(&self, instance: &Instance) -> Result<Vec<bool>> {
        let index = instance.supplier_index();
        let mut mask = vec![false; instance.n_suppliers()];
        for id in &self.0 {
            match index.get(id.as_str()) {
                Some(&i) => mask[i] = true,
                None => return Err(Error::UnknownSupplier(id.clone())),
            }
        }
        Ok(mask)
    }

    /// Build from a membership mask over supplier indices.
    pub(crate) fn from_mask(instance: &Instance, mask: &[bool]) -> Self {
        UpgradeSet(
            mask.iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(i, _)| instance.suppliers[i].id.clone())
                .collect(),
        )
    }
}

impl<'a> IntoIterator for &'a UpgradeSet {
    type Item = &'a String;
    type IntoIter = std::collections::btree_set::Iter<'a, String>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// An injective map customer id -> supplier id, defined on every customer of
/// the instance it belongs to.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Assignment(BTreeMap<String, String>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn from_pairs<I, S, T>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        Assignment(pairs.into_iter().map(|(c, s)| (c.into(), s.into())).collect())
    }

    /// Supplier assigned to `customer`, if any.
    pub fn supplier_for(&self, customer: &str) -> Option<&str> {
        self.0.get(customer).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(customer, supplier)` pairs in customer-id order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(c, s)| (c.as_str(), s.as_str()))
    }

    pub(crate) fn insert(&mut self, customer: String, supplier: String) {
        self.0.insert(customer, supplier);
    }
}

/// An upgrade set together with an assignment and the exact objective value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub upgrades: UpgradeSet,
    pub assignment: Assignment,
    pub value: Rational,
}

/// Append zero-demand customers until the instance is square
/// (`#suppliers == #customers`). Supplier list and budget are unchanged, and
/// so is the optimal value: the new customers contribute nothing to any
/// assignment. Already-square instances are returned unchanged.
pub fn normalize(instance: &Instance) -> Instance {
    if instance.is_square() {
        return instance.clone();
    }
    let mut customers = instance.customers.clone();
    let existing: HashSet<String> = customers.iter().map(|c| c.id.clone()).collect();
    let mut seq = customers.len() + 1;
    while customers.len() < instance.suppliers.len() {
        let id = loop {
            let candidate = format!("{DUMMY_MARKER}:{seq}");
            seq += 1;
            if !existing.contains(candidate.as_str()) {
                break candidate;
            }
        };
        customers.push(Customer { id, demand: Rational::zero() });
    }
    Instance {
        suppliers: instance.suppliers.clone(),
        customers,
        k: instance.k,
    }
}

/// True for customers that [`normalize`] appended.
pub fn is_dummy_customer(customer: &Customer) -> bool {
    customer.id.contains(DUMMY_MARKER)
}

/// Per-supplier effective unit cost under upgrade set `X`: `b_i` for members,
/// `c_i` otherwise.
pub fn effective_costs(instance: &Instance, x: &UpgradeSet) -> Result<BTreeMap<String, Rational>> {
    let mask = x.mask(instance)?;
    Ok(instance
        .suppliers
        .iter()
        .zip(&mask)
        .map(|(s, &m)| {
            let cost = if m { s.upgraded_cost.clone() } else { s.base_cost.clone() };
            (s.id.clone(), cost)
        })
        .collect())
}

fn effective_cost_of<'a>(instance: &'a Instance, i: usize, mask: &[bool]) -> &'a Rational {
    let s = &instance.suppliers[i];
    if mask[i] {
        &s.upgraded_cost
    } else {
        &s.base_cost
    }
}

/// Index-level optimal assignment for a membership mask: returns
/// `(supplier, customer)` index pairs and the exact value.
///
/// Ties are fixed for determinism: equal effective costs break by ascending
/// supplier index, equal demands by ascending customer index. Works for
/// non-square instances too; with more suppliers than customers the cheapest
/// `#customers` suppliers are used and the rest stay unmatched.
pub(crate) fn optimal_assignment_indices(
    instance: &Instance,
    mask: &[bool],
) -> (Vec<(usize, usize)>, Rational) {
    let mut supplier_order: Vec<usize> = (0..instance.n_suppliers()).collect();
    supplier_order.sort_by(|&a, &b| {
        effective_cost_of(instance, a, mask)
            .cmp(effective_cost_of(instance, b, mask))
            .then(a.cmp(&b))
    });
    let mut customer_order: Vec<usize> = (0..instance.n_customers()).collect();
    customer_order.sort_by(|&a, &b| {
        instance.customers[b]
            .demand
            .cmp(&instance.customers[a].demand)
            .then(a.cmp(&b))
    });
    let mut value = Rational::zero();
    let mut pairs = Vec::with_capacity(customer_order.len());
    for (&i, &j) in supplier_order.iter().zip(&customer_order) {
        value += &(effective_cost_of(instance, i, mask) * &instance.customers[j].demand);
        pairs.push((i, j));
    }
    (pairs, value)
}

/// Optimal assignment for the fixed upgrade set `X`, along with its exact
/// value `cost(X)`: sort suppliers by effective cost non-decreasing and
/// customers by demand non-increasing, then match in order. `X` may have any
/// cardinality; the rule does not look at the budget.
pub fn optimal_assignment(instance: &Instance, x: &UpgradeSet) -> Result<(Assignment, Rational)> {
    let mask = x.mask(instance)?;
    let (pairs, value) = optimal_assignment_indices(instance, &mask);
    let mut assignment = Assignment::new();
    for (i, j) in pairs {
        assignment.insert(
            instance.customers[j].id.clone(),
            instance.suppliers[i].id.clone(),
        );
    }
    Ok((assignment, value))
}

/// `cost(X)`: the value of [`optimal_assignment`] under upgrade set `X`.
pub fn cost(instance: &Instance, x: &UpgradeSet) -> Result<Rational> {
    let mask = x.mask(instance)?;
    Ok(optimal_assignment_indices(instance, &mask).1)
}

/// Index-level `cost(X)` for solver hot paths.
pub(crate) fn cost_of_mask(instance: &Instance, mask: &[bool]) -> Rational {
    optimal_assignment_indices(instance, mask).1
}

/// Exact objective value of an explicit assignment under upgrade set `X`:
/// the sum over customers of `demand * effective cost of the assigned
/// supplier`. The assignment must be injective, defined on every customer of
/// the instance, and reference only known ids.
pub fn evaluate(instance: &Instance, x: &UpgradeSet, assignment: &Assignment) -> Result<Rational> {
    let mask = x.mask(instance)?;
    let supplier_index = instance.supplier_index();
    let customer_index = instance.customer_index();
    for (customer, _) in assignment.iter() {
        if !customer_index.contains_key(customer) {
            return Err(Error::UnknownCustomer(customer.to_string()));
        }
    }
    let mut used = HashSet::new();
    let mut value = Rational::zero();
    for c in &instance.customers {
        let supplier = assignment.supplier_for(&c.id).ok_or_else(|| {
            Error::InvalidAssignment(format!("customer `{}` is unassigned", c.id))
        })?;
        let &i = supplier_index
            .get(supplier)
            .ok_or_else(|| Error::UnknownSupplier(supplier.to_string()))?;
        if !used.insert(i) {
            return Err(Error::InvalidAssignment(format!(
                "supplier `{supplier}` is assigned to more than one customer"
            )));
        }
        value += &(effective_cost_of(instance, i, &mask) * &c.demand);
    }
    Ok(value)
}
