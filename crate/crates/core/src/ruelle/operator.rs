use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{ExpPoly, Potential, Rational};
use crate::symspace::{CatalogMap, CylinderFunction, NormalForm, SymbolicSpace};

/// A space, a catalog map `T` and a potential `φ`.
#[derive(Clone, Debug)]
pub struct RuelleTriple<P: Potential> {
    space: SymbolicSpace,
    map: CatalogMap,
    potential: CylinderFunction<P>,
    weights: CylinderFunction<P::Weight>,
    nf: NormalForm,
}

impl<P: Potential> RuelleTriple<P> {
    pub fn new(space: SymbolicSpace, map: CatalogMap, potential: CylinderFunction<P>) -> Result<Self> {
        if potential.space() != &space {
            return Err(Error::SpaceMismatch);
        }
        let nf = map.normal_form(&space)?;
        let weights = potential.map_values(|v| v.exp_weight());
        Ok(RuelleTriple {
            space,
            map,
            potential,
            weights,
            nf,
        })
    }

    pub fn space(&self) -> &SymbolicSpace {
        &self.space
    }

    pub fn map(&self) -> &CatalogMap {
        &self.map
    }

    pub fn potential(&self) -> &CylinderFunction<P> {
        &self.potential
    }

    pub fn normal_form(&self) -> &NormalForm {
        &self.nf
    }

    /// Depth of `Lf` for `f` of depth `f_depth`.
    pub fn output_depth(&self, f_depth: usize) -> usize {
        self.nf
            .ruelle_output_depth(&self.space, f_depth.max(self.potential.depth()))
    }

    /// `(Lf)(x) = Σ_{T y = x} e^{φ(y)} f(y)`, exact on cylinders.
    pub fn apply(&self, f: &CylinderFunction<P::Weight>) -> Result<CylinderFunction<P::Weight>> {
        if f.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        let m = self.output_depth(f.depth());
        Ok(CylinderFunction::from_fn(&self.space, m, |w| {
            self.nf
                .preimage_branches(&self.space, w)
                .iter()
                .fold(P::Weight::zero(), |acc, y| {
                    let e = self.weights.eval(y).expect("branch covers potential depth");
                    let v = f.eval(y).expect("branch covers input depth");
                    acc + e.clone() * v.clone()
                })
        }))
    }

    pub fn to_f64(&self) -> RuelleTriple<f64> {
        RuelleTriple::new(self.space.clone(), self.map.clone(), self.potential.to_f64())
            .expect("same data")
    }

    /// The triple with potential `c·φ`.
    pub fn scaled(&self, c: &P) -> Self {
        RuelleTriple::new(self.space.clone(), self.map.clone(), self.potential.scale(c))
            .expect("same data")
    }
}

/// `L_{T,φ} f`.
pub fn apply_ruelle<P: Potential>(
    triple: &RuelleTriple<P>,
    f: &CylinderFunction<P::Weight>,
) -> Result<CylinderFunction<P::Weight>> {
    triple.apply(f)
}

/// `(S, φ), (T, ψ) ↦ (S∘T, φ∘T + ψ)`, so that `L_{S,φ} L_{T,ψ} = L_{S∘T, φ∘T+ψ}`.
pub fn compose_triples<P: Potential>(
    first: &RuelleTriple<P>,
    second: &RuelleTriple<P>,
) -> Result<RuelleTriple<P>> {
    if first.space != second.space {
        return Err(Error::SpaceMismatch);
    }
    let potential = first
        .potential
        .compose_with_map(&second.map)?
        .plus(&second.potential)?;
    RuelleTriple::new(first.space.clone(), first.map.after(&second.map), potential)
}

/// Embeds a rational cylinder function into the exponential-polynomial ring.
pub fn lift_rational(f: &CylinderFunction<Rational>) -> CylinderFunction<ExpPoly> {
    f.map_values(|v| ExpPoly::constant(v.clone()))
}
