//! Symbolic state spaces, the catalog of commuting local homeomorphisms on
//! them, and cylinder functions and measures.

mod function;
mod map;
mod measure;
mod space;
mod word;

pub use function::CylinderFunction;
pub use map::{maps_commute, preimage_words, CatalogMap, FactorAction, MapCertificates, NormalForm, TriState};
pub use measure::{
    measure_consistency_check, CylinderMeasure, MarkovRule, RefinementRule, CONSISTENCY_TOL,
};
pub use space::{exactness_certificate, word_metric, Factor, SpaceKind, SymbolicSpace};
pub use word::Word;
