//! Library side of the experiment runner, so the integration tests can drive
//! everything the binary does.

// Negated float comparisons are NaN-rejecting validation guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod artifacts;
pub mod config;
pub mod experiment;
