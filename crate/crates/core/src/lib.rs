//! Validated numerics for negative moments of Steinhaus sums.
//!
//! The crate computes sharp Khinchin-type constants, evaluates negative
//! moments `E|a_1 xi_1 + ... + a_n xi_n|^{-p}` of sums of independent
//! uniform unit-circle variables by three independent methods, and re-checks
//! the numerical inequalities behind the sharp bound with interval
//! arithmetic.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod entropy;
pub mod error;
pub mod interval;
pub mod moments;
pub(crate) mod series;
pub mod specfun;
pub mod verifier;

pub use error::{Error, Result};
pub use interval::{enclose_arith, ArithOp, Enclosure};
