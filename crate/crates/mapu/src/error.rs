//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the library.
///
/// `Invariant` deserves a note: the solver asserts the structural guarantees
/// of its narrowing/rounding machinery at runtime (penalties non-negative,
/// gap shrinking, cleanliness, redistribution inequalities, ...). Those
/// conditions are theorems for valid inputs, so an `Invariant` error always
/// indicates a bug in the library, never a problem with the input. It is
/// reported as an error instead of a panic so that callers can surface the
/// diagnostic without crashing.
#[derive(Debug, Error)]
pub enum Error {
    /// Input text could not be decoded; `path` locates the offending field
    /// (e.g. `suppliers[2].base_cost`).
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    /// The instance violates a structural invariant (sizes, ranges, ids).
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// An upgrade set or assignment references a supplier id that does not
    /// exist in the instance.
    #[error("unknown supplier id `{0}`")]
    UnknownSupplier(String),

    /// An assignment or constraint references a customer id that does not
    /// exist in the instance.
    #[error("unknown customer id `{0}`")]
    UnknownCustomer(String),

    /// An assignment is not an injective map defined on every customer.
    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    /// A documented precondition of an operation was violated by the caller.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The problem has no feasible solution (e.g. no perfect matching under
    /// an edge mask).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A fractional solution failed a feasibility check; the message names
    /// the violated constraint.
    #[error("infeasible fractional solution: {0}")]
    InfeasibleFractional(String),

    /// An exhaustive-enumeration routine was asked to run above its size cap.
    #[error("{what} supports at most {cap} elements, got {size}")]
    CapExceeded {
        what: String,
        size: usize,
        cap: usize,
    },

    /// An internal structural guarantee failed; this is a library bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
