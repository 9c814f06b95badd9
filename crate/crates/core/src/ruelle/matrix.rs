use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::symspace::{CylinderMeasure, SymbolicSpace, Word};

use super::operator::RuelleTriple;

/// Matrix of a Ruelle operator on depth-`m` cylinder functions.
///
/// Rows index output cylinders and columns input cylinders:
/// `M[u][w] = (L 1_{Z[w]})(u)`, so `(Lf)|_m = M · f|_m`. For the plain shift
/// with zero potential `M` is the transpose of the transition matrix.
#[derive(Clone, Debug)]
pub struct TransferMatrix {
    pub words: Vec<Word>,
    pub matrix: DMatrix<f64>,
}

impl TransferMatrix {
    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.words.binary_search(w).ok()
    }
}

pub(crate) fn required_depth(triple: &RuelleTriple<f64>) -> usize {
    triple
        .potential()
        .depth()
        .saturating_sub(triple.normal_form().min_consumed())
        .max(1)
}

pub fn transfer_matrix(triple: &RuelleTriple<f64>, m: usize) -> Result<TransferMatrix> {
    let required = required_depth(triple);
    if m < required {
        return Err(Error::DepthTooSmall { required, given: m });
    }
    let space: &SymbolicSpace = triple.space();
    let words = space.admissible_words(m);
    let index: HashMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut matrix = DMatrix::zeros(words.len(), words.len());
    for (r, u) in words.iter().enumerate() {
        for y in triple.normal_form().preimage_branches(space, u) {
            let c = index[&y.prefix(m)];
            let phi = triple.potential().eval(&y).expect("branch covers potential depth");
            matrix[(r, c)] += phi.exp();
        }
    }
    Ok(TransferMatrix { words, matrix })
}

/// `(L*μ)(Z[w]) = ∫ L 1_{Z[w]} dμ`, at the depth of `μ`.
pub fn dual_apply(triple: &RuelleTriple<f64>, mu: &CylinderMeasure) -> Result<CylinderMeasure> {
    if mu.space() != triple.space() {
        return Err(Error::SpaceMismatch);
    }
    let tm = transfer_matrix(triple, mu.depth())?;
    let v = DVector::from_iterator(tm.words.len(), tm.words.iter().map(|w| mu.masses()[w]));
    let out = tm.matrix.transpose() * v;
    Ok(CylinderMeasure::from_vec(
        triple.space(),
        mu.depth(),
        &tm.words,
        out.as_slice(),
    ))
}
