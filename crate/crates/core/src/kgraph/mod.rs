//! Finite higher-rank graphs, their eigenmeasures and KMS checks on matrix units.

mod algebra;
mod graph;
mod kms;
mod measure;
mod spec;

pub use algebra::{adjoint, convolve, gauge_action, state, FiniteOperator, GaugeDynamics, MatrixUnit};
pub use graph::{validate, KGraph, Path};
pub use kms::{kms_check, kms_check_all_pairs, KmsReport, MAX_MATRIX_UNITS};
pub use measure::{
    kgraph_rpf_solve, vertex_matrices, verify_rpf_identity, CategoricalCocycle, KGraphMeasure, KGraphRpfOptions,
    RpfIdentityReport,
};
pub use spec::{EdgeSpec, GraphValidationReport, KGraphSpec, SquareSpec, Violation, ViolationKind};
