use crate::error::{Error, Result};
use crate::nkmod::{cocycle_violation, evaluate_semigroup_cocycle, CocycleTuple, NkVector, ShiftAction};
use crate::ruelle::{compose_triples, RuelleTriple};
use crate::scalar::Potential;
use crate::symspace::{CatalogMap, CylinderFunction, SymbolicSpace, Word};

/// `(X, σ, φ)`: commuting catalog maps `σ₁..σ_k` and potentials `φ₁..φ_k`.
///
/// Construction checks that the maps commute; the cocycle condition on the
/// potentials is checked separately by [`check_cocycle_condition`].
#[derive(Clone, Debug)]
pub struct KRuelleSystem<P: Potential> {
    action: ShiftAction<P>,
    potentials: Vec<CylinderFunction<P>>,
}

impl<P: Potential> KRuelleSystem<P> {
    pub fn new(space: SymbolicSpace, maps: Vec<CatalogMap>, potentials: Vec<CylinderFunction<P>>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidArgument("a system needs at least one map".into()));
        }
        if potentials.len() != maps.len() {
            return Err(Error::RankMismatch {
                expected: maps.len(),
                found: potentials.len(),
            });
        }
        if potentials.iter().any(|p| p.space() != &space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(KRuelleSystem {
            action: ShiftAction::new(space, maps)?,
            potentials,
        })
    }

    pub fn space(&self) -> &SymbolicSpace {
        self.action.space()
    }

    pub fn maps(&self) -> &[CatalogMap] {
        self.action.maps()
    }

    pub fn potentials(&self) -> &[CylinderFunction<P>] {
        &self.potentials
    }

    pub fn rank(&self) -> usize {
        self.potentials.len()
    }

    pub fn action(&self) -> &ShiftAction<P> {
        &self.action
    }

    pub fn triple(&self, i: usize) -> RuelleTriple<P> {
        RuelleTriple::new(self.space().clone(), self.maps()[i].clone(), self.potentials[i].clone())
            .expect("validated system")
    }

    /// The semigroup cocycle `c_φ(n)`; fails if the cocycle condition fails.
    pub fn cocycle(&self, n: &NkVector) -> Result<CylinderFunction<P>> {
        let tuple = CocycleTuple::new(&self.action, self.potentials.clone())?;
        evaluate_semigroup_cocycle(&self.action, &tuple, n)
    }

    /// `Ψ(n) = L_{σ^n, c_φ(n)}`, built by composing generator triples.
    pub fn composed_triple(&self, n: &NkVector) -> Result<RuelleTriple<P>> {
        if n.rank() != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                found: n.rank(),
            });
        }
        let mut acc = RuelleTriple::new(
            self.space().clone(),
            CatalogMap::identity(),
            CylinderFunction::zero(self.space()),
        )?;
        for i in 0..self.rank() {
            let t = self.triple(i);
            for _ in 0..n.get(i) {
                acc = compose_triples(&acc, &t)?;
            }
        }
        Ok(acc)
    }

    pub fn with_potentials(&self, potentials: Vec<CylinderFunction<P>>) -> Result<Self> {
        KRuelleSystem::new(self.space().clone(), self.maps().to_vec(), potentials)
    }

    /// The system with potentials `c·φᵢ`.
    pub fn scaled(&self, c: &P) -> Self {
        KRuelleSystem {
            action: self.action.clone(),
            potentials: self.potentials.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn to_f64(&self) -> KRuelleSystem<f64> {
        KRuelleSystem::new(
            self.space().clone(),
            self.maps().to_vec(),
            self.potentials.iter().map(CylinderFunction::to_f64).collect(),
        )
        .expect("same data")
    }
}

/// First pair `i < j` with `φᵢ + φⱼ∘σᵢ ≠ φⱼ + φᵢ∘σⱼ`.
pub fn cocycle_condition_witness<P: Potential>(system: &KRuelleSystem<P>) -> Option<(usize, usize)> {
    cocycle_violation(&system.action, &system.potentials).expect("rank matches")
}

pub fn check_cocycle_condition<P: Potential>(system: &KRuelleSystem<P>) -> bool {
    cocycle_condition_witness(system).is_none()
}

/// A pair of coordinates and a cylinder on which `LᵢLⱼ 1_{Z[w]} ≠ LⱼLᵢ 1_{Z[w]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutationWitness {
    pub i: usize,
    pub j: usize,
    pub word: Word,
}

/// Compares `LᵢLⱼ` and `LⱼLᵢ` on the indicator of every cylinder of depth
/// `max(depth, d*)`, where `d*` is the least depth at which the composed
/// potentials are locally constant and the composed map is injective on
/// cylinders.
pub fn commutation_witness<P: Potential>(
    system: &KRuelleSystem<P>,
    depth: usize,
) -> Result<Option<CommutationWitness>> {
    let space = system.space();
    for i in 0..system.rank() {
        for j in i + 1..system.rank() {
            let (ti, tj) = (system.triple(i), system.triple(j));
            let ij = compose_triples(&ti, &tj)?;
            let ji = compose_triples(&tj, &ti)?;
            let d = depth
                .max(ij.potential().depth())
                .max(ji.potential().depth())
                .max(ij.normal_form().max_consumed());
            for w in space.admissible_words(d) {
                let f = CylinderFunction::<P::Weight>::indicator(space, &w);
                let a = ti.apply(&tj.apply(&f)?)?;
                let b = tj.apply(&ti.apply(&f)?)?;
                if !a.approx_eq(&b) {
                    return Ok(Some(CommutationWitness { i, j, word: w }));
                }
            }
        }
    }
    Ok(None)
}

pub fn operators_commute<P: Potential>(system: &KRuelleSystem<P>, depth: usize) -> Result<bool> {
    Ok(commutation_witness(system, depth)?.is_none())
}
