//! Shared helpers for the criterion benches live in the bench files
//! themselves; this crate exists to group them in the workspace.
