//! Exact, strongly polynomial solver for the multiplicative assignment
//! problem with supplier upgrades.
//!
//! # Problem
//!
//! Suppliers quote a per-unit base cost `c_i` that drops to `b_i <= c_i` if
//! the supplier is upgraded; at most `k` suppliers may be upgraded.
//! Customers have demands `d_j`, and every customer must be served by a
//! distinct supplier. The goal is to pick the upgrade set and the assignment
//! together so that the total cost — the sum of `demand * effective unit
//! cost` — is minimized.
//!
//! For a *fixed* upgrade set the inner assignment problem is solved by a
//! classical exchange argument: sort suppliers by effective cost, customers
//! by demand in the opposite order, and match ([`optimal_assignment`]).
//! Choosing the upgrade set is the combinatorial heart of the problem: the
//! map from budget to optimal cost is non-increasing and convex, and [`solve`]
//! exploits that structure — a Lagrangian search over penalized matchings
//! narrows an envelope of upgrade sets around the budget, and a rounding
//! phase recombines the two envelope sets into an optimal set of size exactly
//! `min(k, #suppliers)` — in strongly polynomial time, with every
//! intermediate value kept in exact rational arithmetic.
//!
//! # Crate layout
//!
//! * [`instance`] — problem model, validation, and the fixed-set primitives
//!   ([`cost`], [`optimal_assignment`], [`evaluate`], [`normalize`]).
//! * [`solver`] — the exact algorithm ([`solve`]) with its full decision
//!   trace, plus the narrowing/rounding internals it is assembled from.
//! * [`matching`] — exact min-cost perfect matching on rational weight
//!   matrices, used for the Lagrangian subproblems.
//! * [`oracle`] — brute-force references and diagnostics: subset enumeration,
//!   budget profiles, the greedy heuristic, supermodularity spot-checks.
//! * [`variants`] — linear-relaxation variants of the problem on small
//!   instances: fractional upgrades, group budgets, customer-side upgrades,
//!   incomplete supplier/customer compatibility; includes the built-in
//!   integrality-gap fixtures.
//! * [`scheduling`] — application: minimizing total completion time on
//!   uniform machines where up to `k` jobs can be shortened.
//! * [`json`] — serde-based readers for instances and fixtures with exact
//!   decimal parsing.
//! * [`generator`] — seeded random instance families for tests and benches.
//! * [`rational`] — arbitrary-precision rational scalar used throughout.
//!
//! # Quick start
//!
//! ```
//! use mapu::instance::{Customer, Instance, Supplier};
//! use mapu::{solve, Rational};
//!
//! fn r(s: &str) -> Rational {
//!     s.parse().expect("valid rational literal")
//! }
//!
//! let instance = Instance::new(
//!     vec![
//!         Supplier { id: "s1".into(), base_cost: r("1"), upgraded_cost: r("0") },
//!         Supplier { id: "s2".into(), base_cost: r("3"), upgraded_cost: r("2") },
//!     ],
//!     vec![
//!         Customer { id: "c1".into(), demand: r("1") },
//!         Customer { id: "c2".into(), demand: r("1") },
//!     ],
//!     1,
//! )?;
//! let solution = solve(&instance)?;
//! assert_eq!(solution.value, r("3"));
//! assert!(solution.upgrades.contains("s1"));
//! # Ok::<(), mapu::Error>(())
//! ```

mod error;
pub mod generator;
pub mod instance;
pub mod json;
pub mod matching;
pub mod oracle;
pub mod rational;
pub mod scheduling;
pub mod solver;
pub mod variants;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use instance::{
    cost, effective_costs, evaluate, is_dummy_customer, normalize, optimal_assignment, Assignment,
    Customer, Instance, Solution, Supplier, UpgradeSet, DUMMY_MARKER,
};
pub use rational::Rational;
pub use solver::{solve, solve_with_trace, SolveTrace};
