use super::KRuelleSystem;
use crate::error::{Error, Result};
use crate::nkmod::NkVector;
use crate::scalar::Potential;
use crate::symspace::Word;

/// A compact open bisection `Z(Z[u], p, q, Z[v])` of the Deaconu–Renault
/// groupoid: all `(x, p − q, y)` with `x ∈ Z[u]`, `y ∈ Z[v]` and
/// `σ^p x = σ^q y`.
///
/// The words may be non-uniform; validity asks that `σ^p` and `σ^q` map the
/// two cylinders onto the same cylinder, factor by factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupoidElement {
    x_word: Word,
    p: NkVector,
    q: NkVector,
    y_word: Word,
}

impl GroupoidElement {
    pub fn new<P: Potential>(
        system: &KRuelleSystem<P>,
        x_word: Word,
        p: NkVector,
        q: NkVector,
        y_word: Word,
    ) -> Result<Self> {
        let k = system.rank();
        for n in [&p, &q] {
            if n.rank() != k {
                return Err(Error::RankMismatch {
                    expected: k,
                    found: n.rank(),
                });
            }
        }
        let space = system.space();
        for w in [&x_word, &y_word] {
            if !space.is_admissible(w) {
                return Err(Error::InadmissibleWord(space.format_word(w)));
            }
        }
        let np = system.action().product_normal_form(&p);
        let nq = system.action().product_normal_form(&q);
        let too_short = || {
            Error::InvalidArgument(format!(
                "cylinders {} and {} are too short for degrees {p} and {q}",
                space.format_word(&x_word),
                space.format_word(&y_word)
            ))
        };
        let ix = np.image(&x_word).ok_or_else(too_short)?;
        let iy = nq.image(&y_word).ok_or_else(too_short)?;
        if ix != iy {
            return Err(Error::InvalidArgument(format!(
                "σ^{p} Z[{}] and σ^{q} Z[{}] differ",
                space.format_word(&x_word),
                space.format_word(&y_word)
            )));
        }
        // On a non-full factor σ^p(Z[u]) is a cylinder only once the image keeps a symbol.
        for (j, f) in space.factors().iter().enumerate() {
            let (cp, cq) = (np.parts()[j].consumed, nq.parts()[j].consumed);
            if !f.is_full() && ix.parts()[j].is_empty() && (cp > 0 || cq > 0) {
                return Err(too_short());
            }
        }
        Ok(GroupoidElement { x_word, p, q, y_word })
    }

    /// The unit cylinder `Z(Z[w], 0, 0, Z[w])`.
    pub fn unit(k: usize, w: Word) -> Self {
        GroupoidElement {
            x_word: w.clone(),
            p: NkVector::zero(k),
            q: NkVector::zero(k),
            y_word: w,
        }
    }

    /// `Z(Z[w], eᵢ, 0, σᵢ Z[w])`.
    pub fn generator<P: Potential>(system: &KRuelleSystem<P>, w: Word, i: usize) -> Result<Self> {
        let k = system.rank();
        let p = NkVector::unit(k, i);
        let image = system
            .action()
            .product_normal_form(&p)
            .image(&w)
            .ok_or_else(|| Error::InvalidArgument("cylinder too short for a generator".into()))?;
        GroupoidElement::new(system, w, p, NkVector::zero(k), image)
    }

    pub fn x_word(&self) -> &Word {
        &self.x_word
    }

    pub fn y_word(&self) -> &Word {
        &self.y_word
    }

    pub fn p(&self) -> &NkVector {
        &self.p
    }

    pub fn q(&self) -> &NkVector {
        &self.q
    }

    /// The groupoid degree `p − q ∈ ℤ^k`.
    pub fn degree(&self) -> Vec<i64> {
        self.p.diff(&self.q)
    }

    pub fn is_unit_space(&self) -> bool {
        self.p == self.q && self.x_word == self.y_word
    }

    pub fn inverse(&self) -> Self {
        GroupoidElement {
            x_word: self.y_word.clone(),
            p: self.q.clone(),
            q: self.p.clone(),
            y_word: self.x_word.clone(),
        }
    }

    /// The same bisection written with degrees `(p + r, q + r)`.
    pub fn shifted<P: Potential>(&self, system: &KRuelleSystem<P>, r: &NkVector) -> Result<Self> {
        GroupoidElement::new(
            system,
            self.x_word.clone(),
            &self.p + r,
            &self.q + r,
            self.y_word.clone(),
        )
    }

    /// Splits the bisection into the pieces over each extension of `x_word`
    /// by `extra` symbols.
    pub fn refine<P: Potential>(&self, system: &KRuelleSystem<P>, extra: usize) -> Result<Vec<Self>> {
        let space = system.space();
        let np = system.action().product_normal_form(&self.p);
        let nq = system.action().product_normal_form(&self.q);
        let mut out = Vec::new();
        for x in space.extensions(&self.x_word, extra) {
            let target = np.image(&x).expect("extension of a valid word");
            let y = space
                .extensions(&self.y_word, extra)
                .into_iter()
                .find(|y| nq.image(y).as_ref() == Some(&target));
            if let Some(y) = y {
                out.push(GroupoidElement::new(system, x, self.p.clone(), self.q.clone(), y)?);
            }
        }
        Ok(out)
    }

    /// The product `(x, p−q, y)(y, p'−q', z)` when `other` starts where `self` ends.
    pub fn compose<P: Potential>(&self, system: &KRuelleSystem<P>, other: &Self) -> Result<Option<Self>> {
        if self.y_word != other.x_word {
            return Ok(None);
        }
        GroupoidElement::new(
            system,
            self.x_word.clone(),
            &self.p + &other.p,
            &self.q + &other.q,
            other.y_word.clone(),
        )
        .map(Some)
    }
}

/// `c_φ(p)(x) − c_φ(q)(y)` on the bisection; needs both cylinders to be at
/// least as deep as the cocycles involved.
pub fn groupoid_cocycle_eval<P: Potential>(system: &KRuelleSystem<P>, g: &GroupoidElement) -> Result<P> {
    let cp = system.cocycle(&g.p)?;
    let cq = system.cocycle(&g.q)?;
    let vx = cp.eval(&g.x_word).ok_or(Error::DepthTooSmall {
        required: cp.depth(),
        given: g.x_word.depth(),
    })?;
    let vy = cq.eval(&g.y_word).ok_or(Error::DepthTooSmall {
        required: cq.depth(),
        given: g.y_word.depth(),
    })?;
    Ok(vx.clone() - vy.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use crate::symspace::{CatalogMap, CylinderFunction, SymbolicSpace};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn system() -> KRuelleSystem<Rational> {
        let s = SymbolicSpace::full_shift(2).unwrap();
        let (a, b) = (q(3, 10), q(-7, 10));
        let phi1 = CylinderFunction::from_fn(&s, 2, |w| {
            let p = &w.parts()[0];
            if (p[0] + p[1]) % 2 == 0 { a.clone() } else { b.clone() }
        });
        KRuelleSystem::new(
            s.clone(),
            vec![CatalogMap::Shift, CatalogMap::SymbolBijection(vec![1, 0])],
            vec![phi1, CylinderFunction::constant(&s, q(1, 5))],
        )
        .unwrap()
    }

    fn w(s: &[u16]) -> Word {
        Word::single(s.to_vec())
    }

    #[test]
    fn validity_requires_matching_images() {
        let sys = system();
        let e1 = NkVector::unit(2, 0);
        let z = NkVector::zero(2);
        assert!(GroupoidElement::new(&sys, w(&[0, 1, 1]), e1.clone(), z.clone(), w(&[1, 1])).is_ok());
        assert!(GroupoidElement::new(&sys, w(&[0, 1, 1]), e1.clone(), z.clone(), w(&[1, 0])).is_err());
        assert!(GroupoidElement::new(&sys, w(&[]), e1.clone(), z.clone(), w(&[])).is_err());
        assert!(GroupoidElement::new(&sys, w(&[1]), e1, z, w(&[])).is_ok());
    }

    #[test]
    fn generator_value_is_the_potential() {
        let sys = system();
        let g = GroupoidElement::generator(&sys, w(&[0, 1, 1]), 0).unwrap();
        assert_eq!(g.y_word(), &w(&[1, 1]));
        assert_eq!(groupoid_cocycle_eval(&sys, &g).unwrap(), q(-7, 10));
        let h = GroupoidElement::generator(&sys, w(&[0, 1]), 1).unwrap();
        assert_eq!(h.y_word(), &w(&[1, 0]));
        assert_eq!(groupoid_cocycle_eval(&sys, &h).unwrap(), q(1, 5));
    }

    #[test]
    fn inverse_negates_and_units_vanish() {
        let sys = system();
        let g = GroupoidElement::new(&sys, w(&[0, 0, 1, 1]), NkVector::new(vec![2, 1]), NkVector::new(vec![1, 0]), w(&[1, 0, 0]))
            .unwrap();
        let v = groupoid_cocycle_eval(&sys, &g).unwrap();
        assert_eq!(groupoid_cocycle_eval(&sys, &g.inverse()).unwrap(), -v);
        let u = GroupoidElement::unit(2, w(&[1, 0]));
        assert_eq!(groupoid_cocycle_eval(&sys, &u).unwrap(), q(0, 1));
        assert!(u.is_unit_space());
    }

    #[test]
    fn short_cylinders_report_depth() {
        let sys = system();
        let g = GroupoidElement::new(&sys, w(&[0]), NkVector::unit(2, 0), NkVector::zero(2), w(&[])).unwrap();
        assert!(matches!(groupoid_cocycle_eval(&sys, &g), Err(Error::DepthTooSmall { .. })));
        let pieces = g.refine(&sys, 2).unwrap();
        assert_eq!(pieces.len(), 4);
        for piece in pieces {
            assert!(groupoid_cocycle_eval(&sys, &piece).is_ok());
        }
    }

    #[test]
    fn non_full_factor_needs_a_surviving_symbol() {
        let s = SymbolicSpace::sft(vec![vec![1, 1], vec![1, 0]]).unwrap();
        let sys = KRuelleSystem::<f64>::new(s.clone(), vec![CatalogMap::Shift], vec![CylinderFunction::zero(&s)]).unwrap();
        let one = NkVector::unit(1, 0);
        assert!(GroupoidElement::new(&sys, w(&[1]), one.clone(), NkVector::zero(1), w(&[])).is_err());
        assert!(GroupoidElement::new(&sys, w(&[1, 0]), one, NkVector::zero(1), w(&[0])).is_ok());
    }
}
