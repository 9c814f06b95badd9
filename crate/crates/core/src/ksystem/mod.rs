//! Commuting families of Ruelle operators on a symbolic space.

mod beta;
mod groupoid;
mod joint;
mod kms;
mod system;

pub use beta::{beta_search, BetaSearchOptions, BetaSearchResult, CoordinateRoots};
pub use groupoid::{groupoid_cocycle_eval, GroupoidElement};
pub use joint::{
    joint_rpf_solve, normalize_system, quasi_invariance_check, quasi_invariance_residuals, JointRpfOptions,
    JointRpfSolution,
};
pub use kms::kms_functional;
pub use system::{
    check_cocycle_condition, cocycle_condition_witness, commutation_witness, operators_commute, CommutationWitness,
    KRuelleSystem,
};
