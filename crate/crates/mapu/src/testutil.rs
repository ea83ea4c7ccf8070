//! Shorthand constructors for unit tests.

use crate::instance::{Customer, Instance, Supplier, UpgradeSet};
use crate::rational::Rational;

/// Exact rational from a literal like `"22.8"`, `"9/2"`, or `"5"`.
pub(crate) fn r(s: &str) -> Rational {
    s.parse().unwrap_or_else(|e| panic!("bad rational literal `{s}`: {e}"))
}

/// Instance with suppliers `s1..` from `(upgraded, base)` integer pairs and
/// customers `c1..` from integer demands.
pub(crate) fn inst(suppliers: &[(i64, i64)], demands: &[i64], k: usize) -> Instance {
    inst_r(
        &suppliers
            .iter()
            .map(|&(b, c)| (b.to_string(), c.to_string()))
            .collect::<Vec<_>>(),
        &demands.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        k,
    )
}

/// Like [`inst`] but with rational literals for costs and demands.
pub(crate) fn inst_r(suppliers: &[(String, String)], demands: &[String], k: usize) -> Instance {
    let suppliers = suppliers
        .iter()
        .enumerate()
        .map(|(i, (b, c))| Supplier {
            id: format!("s{}", i + 1),
            base_cost: r(c),
            upgraded_cost: r(b),
        })
        .collect();
    let customers = demands
        .iter()
        .enumerate()
        .map(|(j, d)| Customer { id: format!("c{}", j + 1), demand: r(d) })
        .collect();
    Instance::new(suppliers, customers, k).expect("test instance must validate")
}

/// Upgrade set from supplier ids.
pub(crate) fn upgrades(ids: &[&str]) -> UpgradeSet {
    UpgradeSet::from_ids(ids.iter().copied())
}
