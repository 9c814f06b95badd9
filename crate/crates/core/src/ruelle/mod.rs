//! Ruelle transfer operators, their duals, composition, and the
//! Ruelle–Perron–Frobenius eigen-solver.

mod matrix;
mod operator;
mod solver;

pub use matrix::{dual_apply, transfer_matrix, TransferMatrix};
pub use operator::{apply_ruelle, compose_triples, lift_rational, RuelleTriple};
pub use solver::{rpf_solve, RpfOptions, RpfSolution, Uniqueness};
