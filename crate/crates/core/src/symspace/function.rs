use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::map::CatalogMap;
use super::space::SymbolicSpace;
use super::word::Word;

/// A function constant on every depth-`m` cylinder.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderFunction<V> {
    space: SymbolicSpace,
    depth: usize,
    values: BTreeMap<Word, V>,
}

impl<V: Scalar> CylinderFunction<V> {
    /// Requires a value for exactly the admissible depth-`depth` words.
    pub fn new(space: SymbolicSpace, depth: usize, values: BTreeMap<Word, V>) -> Result<Self> {
        let words = space.admissible_words(depth);
        if words.len() != values.len() {
            return Err(Error::Schema(format!(
                "expected {} values at depth {depth}, got {}",
                words.len(),
                values.len()
            )));
        }
        if let Some(w) = words.iter().find(|w| !values.contains_key(w)) {
            return Err(Error::Schema(format!(
                "missing value for {}",
                space.format_word(w)
            )));
        }
        Ok(CylinderFunction {
            space,
            depth,
            values,
        })
    }

    pub fn from_fn(space: &SymbolicSpace, depth: usize, mut f: impl FnMut(&Word) -> V) -> Self {
        let values = space
            .admissible_words(depth)
            .into_iter()
            .map(|w| {
                let v = f(&w);
                (w, v)
            })
            .collect();
        CylinderFunction {
            space: space.clone(),
            depth,
            values,
        }
    }

    pub fn constant(space: &SymbolicSpace, c: V) -> Self {
        Self::from_fn(space, 0, |_| c.clone())
    }

    pub fn zero(space: &SymbolicSpace) -> Self {
        Self::constant(space, V::zero())
    }

    /// `1_{Z[w]}` at depth `|w|`.
    pub fn indicator(space: &SymbolicSpace, w: &Word) -> Self {
        Self::from_fn(space, w.depth(), |u| if u == w { V::one() } else { V::zero() })
    }

    pub fn space(&self) -> &SymbolicSpace {
        &self.space
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &BTreeMap<Word, V> {
        &self.values
    }

    /// Value on any cylinder at least as deep as the function.
    pub fn eval(&self, w: &Word) -> Option<&V> {
        if w.parts().iter().any(|p| p.len() < self.depth) {
            return None;
        }
        self.values.get(&w.prefix(self.depth))
    }

    pub fn refine(&self, depth: usize) -> Self {
        if depth <= self.depth {
            return self.clone();
        }
        Self::from_fn(&self.space, depth, |w| self.values[&w.prefix(self.depth)].clone())
    }

    pub fn zip_with(&self, other: &Self, mut f: impl FnMut(&V, &V) -> V) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        let d = self.depth.max(other.depth);
        Ok(Self::from_fn(&self.space, d, |w| {
            f(&self.values[&w.prefix(self.depth)], &other.values[&w.prefix(other.depth)])
        }))
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn times(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() * b.clone())
    }

    pub fn scale(&self, c: &V) -> Self {
        self.map_values(|v| c.clone() * v.clone())
    }

    pub fn map_values<W: Scalar>(&self, mut f: impl FnMut(&V) -> W) -> CylinderFunction<W> {
        CylinderFunction {
            space: self.space.clone(),
            depth: self.depth,
            values: self.values.iter().map(|(w, v)| (w.clone(), f(v))).collect(),
        }
    }

    /// Equality after refining both sides to the larger depth; exact for
    /// exact scalars, relative tolerance `1e-12` for floats.
    pub fn approx_eq(&self, other: &Self) -> bool {
        if self.space != other.space {
            return false;
        }
        let d = self.depth.max(other.depth);
        self.space.admissible_words(d).iter().all(|w| {
            self.values[&w.prefix(self.depth)].approx_eq(&other.values[&w.prefix(other.depth)])
        })
    }

    /// First word (at the common depth) where the two functions differ.
    pub fn first_difference(&self, other: &Self) -> Option<Word> {
        let d = self.depth.max(other.depth);
        self.space.admissible_words(d).into_iter().find(|w| {
            !self.values[&w.prefix(self.depth)].approx_eq(&other.values[&w.prefix(other.depth)])
        })
    }

    /// `f ∘ map`, of depth `depth(f) + max symbols consumed`.
    pub fn compose_with_map(&self, map: &CatalogMap) -> Result<Self> {
        let nf = map.normal_form(&self.space)?;
        let d = self.depth + nf.max_consumed();
        Ok(Self::from_fn(&self.space, d, |v| {
            let img = nf.image(v).expect("depth covers consumption");
            self.values[&img.prefix(self.depth)].clone()
        }))
    }

    pub fn to_f64(&self) -> CylinderFunction<f64> {
        self.map_values(|v| v.to_f64())
    }
}

impl CylinderFunction<f64> {
    pub fn max_value(&self) -> f64 {
        self.values.values().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.values().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest pointwise difference at the common depth.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        let d = self.depth.max(other.depth);
        self.space
            .admissible_words(d)
            .iter()
            .map(|w| (self.values[&w.prefix(self.depth)] - other.values[&w.prefix(other.depth)]).abs())
            .fold(0.0, f64::max)
    }
}
