//! Transfer operators, Ruelle–Perron–Frobenius solvers, ℕ^k semigroup cocycles,
//! quasi-invariant measures and KMS states on symbolic spaces and finite
//! higher-rank graphs.
//!
//! Every algebraic identity is computed on locally constant (cylinder) data,
//! so it can be checked exactly in rational arithmetic ([`ExpPoly`]) or to a
//! stated tolerance in `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod io;
pub mod kgraph;
pub mod ksystem;
pub mod nkmod;
pub(crate) mod perron;
pub mod ruelle;
pub mod scalar;
pub mod symspace;

pub use error::{Error, Result};
pub use scalar::{ExpPoly, Potential, Rational, Scalar};
