//! ℕ^k-modules, the module cocycle condition, semigroup 1-cocycles and
//! coboundaries.

use std::fmt;
use std::ops::Add;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::symspace::{maps_commute, CatalogMap, CylinderFunction, NormalForm, SymbolicSpace};

/// A point of ℕ^k.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NkVector(Vec<u32>);

impl NkVector {
    pub fn new(coords: Vec<u32>) -> NkVector {
        NkVector(coords)
    }

    pub fn zero(k: usize) -> NkVector {
        NkVector(vec![0; k])
    }

    pub fn unit(k: usize, i: usize) -> NkVector {
        let mut v = vec![0; k];
        v[i] = 1;
        NkVector(v)
    }

    pub fn ones(k: usize) -> NkVector {
        NkVector(vec![1; k])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    /// `|n| = Σ nᵢ`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> u64 {
        self.0.iter().map(|&x| x as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn join(&self, other: &NkVector) -> NkVector {
        NkVector(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn le(&self, other: &NkVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn checked_sub(&self, other: &NkVector) -> Option<NkVector> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(NkVector)
    }

    /// `self − other` in ℤ^k.
    pub fn diff(&self, other: &NkVector) -> Vec<i64> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a as i64 - b as i64)
            .collect()
    }

    pub fn scale(&self, t: u32) -> NkVector {
        NkVector(self.0.iter().map(|x| x * t).collect())
    }

    /// All vectors of rank `k` with `|n| ≤ max_len`, in lexicographic order.
    pub fn all_with_len_at_most(k: usize, max_len: u64) -> Vec<NkVector> {
        let bound = NkVector(vec![max_len as u32; k]);
        Self::all_le(&bound)
            .into_iter()
            .filter(|n| n.len() <= max_len)
            .collect()
    }

    /// All `n ≤ bound` componentwise, lexicographic.
    pub fn all_le(bound: &NkVector) -> Vec<NkVector> {
        let mut out = vec![Vec::new()];
        for &b in &bound.0 {
            out = out
                .into_iter()
                .flat_map(|p: Vec<u32>| {
                    (0..=b).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        out.into_iter().map(NkVector).collect()
    }
}

impl Add for &NkVector {
    type Output = NkVector;

    fn add(self, rhs: &NkVector) -> NkVector {
        debug_assert_eq!(self.rank(), rhs.rank());
        NkVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for NkVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// An abelian group with `k` commuting endomorphisms.
pub trait NkModule {
    type Elem: Clone + fmt::Debug;

    fn rank(&self) -> usize;
    fn act(&self, i: usize, a: &Self::Elem) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn zero(&self) -> Self::Elem;
    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    /// `n·a = e₁^{n₁}⋯e_k^{n_k} a`.
    fn act_by(&self, n: &NkVector, a: &Self::Elem) -> Self::Elem {
        let mut out = a.clone();
        for i in 0..self.rank() {
            for _ in 0..n.get(i) {
                out = self.act(i, &out);
            }
        }
        out
    }
}

/// Cylinder functions with generator `i` acting by `f ↦ f∘σᵢ`.
#[derive(Clone, Debug)]
pub struct ShiftAction<V> {
    space: SymbolicSpace,
    maps: Vec<CatalogMap>,
    nfs: Vec<NormalForm>,
    _values: std::marker::PhantomData<V>,
}

impl<V: Scalar> ShiftAction<V> {
    /// The maps must be valid on `space` and commute pairwise.
    pub fn new(space: SymbolicSpace, maps: Vec<CatalogMap>) -> Result<Self> {
        let nfs = maps
            .iter()
            .map(|m| m.normal_form(&space))
            .collect::<Result<Vec<_>>>()?;
        for i in 0..maps.len() {
            for j in i + 1..maps.len() {
                if !maps_commute(&space, &maps[i], &maps[j])? {
                    return Err(Error::NonCommuting { i, j });
                }
            }
        }
        Ok(ShiftAction {
            space,
            maps,
            nfs,
            _values: std::marker::PhantomData,
        })
    }

    pub fn space(&self) -> &SymbolicSpace {
        &self.space
    }

    pub fn maps(&self) -> &[CatalogMap] {
        &self.maps
    }

    /// `σ^n = σ₁^{n₁}∘⋯∘σ_k^{n_k}`.
    pub fn product_map(&self, n: &NkVector) -> CatalogMap {
        CatalogMap::Composition(
            self.maps
                .iter()
                .zip(n.coords())
                .flat_map(|(m, &c)| std::iter::repeat_n(m.clone(), c as usize))
                .collect(),
        )
    }

    pub fn product_normal_form(&self, n: &NkVector) -> NormalForm {
        let mut nf = NormalForm::identity(&self.space);
        for (f, &c) in self.nfs.iter().zip(n.coords()) {
            for _ in 0..c {
                nf = nf.then(f);
            }
        }
        nf
    }

    pub(crate) fn check_element(&self, a: &CylinderFunction<V>) -> Result<()> {
        if a.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }
}

impl<V: Scalar> NkModule for ShiftAction<V> {
    type Elem = CylinderFunction<V>;

    fn rank(&self) -> usize {
        self.maps.len()
    }

    fn act(&self, i: usize, a: &Self::Elem) -> Self::Elem {
        a.compose_with_map(&self.maps[i]).expect("validated map")
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.plus(b).expect("same space")
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.map_values(|v| -v.clone())
    }

    fn zero(&self) -> Self::Elem {
        CylinderFunction::zero(&self.space)
    }

    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        a.approx_eq(b)
    }

    fn act_by(&self, n: &NkVector, a: &Self::Elem) -> Self::Elem {
        a.compose_with_map(&self.product_map(n)).expect("validated maps")
    }
}

/// ℤ^d with generators acting by commuting integer matrices.
#[derive(Clone, Debug)]
pub struct MatrixAction {
    dim: usize,
    generators: Vec<Vec<Vec<i64>>>,
}

impl MatrixAction {
    pub fn new(dim: usize, generators: Vec<Vec<Vec<i64>>>) -> Result<Self> {
        if generators
            .iter()
            .any(|g| g.len() != dim || g.iter().any(|r| r.len() != dim))
        {
            return Err(Error::InvalidArgument(format!("generators must be {dim}×{dim}")));
        }
        let act = MatrixAction { dim, generators };
        let basis: Vec<Vec<i64>> = (0..dim)
            .map(|i| (0..dim).map(|j| (i == j) as i64).collect())
            .collect();
        for i in 0..act.generators.len() {
            for j in i + 1..act.generators.len() {
                if basis
                    .iter()
                    .any(|e| act.act(i, &act.act(j, e)) != act.act(j, &act.act(i, e)))
                {
                    return Err(Error::NonCommuting { i, j });
                }
            }
        }
        Ok(act)
    }
}

impl NkModule for MatrixAction {
    type Elem = Vec<i64>;

    fn rank(&self) -> usize {
        self.generators.len()
    }

    fn act(&self, i: usize, a: &Vec<i64>) -> Vec<i64> {
        self.generators[i]
            .iter()
            .map(|row| row.iter().zip(a).map(|(x, y)| x * y).sum())
            .collect()
    }

    fn add(&self, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn neg(&self, a: &Vec<i64>) -> Vec<i64> {
        a.iter().map(|x| -x).collect()
    }

    fn zero(&self) -> Vec<i64> {
        vec![0; self.dim]
    }

    fn equal(&self, a: &Vec<i64>, b: &Vec<i64>) -> bool {
        a == b
    }
}

fn check_rank<M: NkModule>(action: &M, found: usize) -> Result<()> {
    if found != action.rank() {
        return Err(Error::RankMismatch {
            expected: action.rank(),
            found,
        });
    }
    Ok(())
}

/// First pair `i < j` violating `aᵢ + eᵢaⱼ = aⱼ + eⱼaᵢ`.
pub fn cocycle_violation<M: NkModule>(action: &M, tuple: &[M::Elem]) -> Result<Option<(usize, usize)>> {
    check_rank(action, tuple.len())?;
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            let lhs = action.add(&tuple[i], &action.act(i, &tuple[j]));
            let rhs = action.add(&tuple[j], &action.act(j, &tuple[i]));
            if !action.equal(&lhs, &rhs) {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

pub fn check_module_cocycle_condition<M: NkModule>(action: &M, tuple: &[M::Elem]) -> Result<bool> {
    Ok(cocycle_violation(action, tuple)?.is_none())
}

/// A `k`-tuple known to satisfy the module cocycle condition.
#[derive(Clone, Debug)]
pub struct CocycleTuple<E> {
    entries: Vec<E>,
}

impl<E: Clone + fmt::Debug> CocycleTuple<E> {
    pub fn new<M: NkModule<Elem = E>>(action: &M, entries: Vec<E>) -> Result<Self> {
        if let Some((i, j)) = cocycle_violation(action, &entries)? {
            return Err(Error::CocycleCondition { i, j });
        }
        Ok(CocycleTuple { entries })
    }

    pub fn entries(&self) -> &[E] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<E> {
        self.entries
    }
}

/// `Σᵢ e₁^{n₁}⋯e_{i−1}^{n_{i−1}} Σ_{j<nᵢ} eᵢ^j aᵢ` for any tuple.
pub fn cocycle_formula<M: NkModule>(action: &M, entries: &[M::Elem], n: &NkVector) -> M::Elem {
    let k = action.rank();
    let mut out = action.zero();
    let mut prefix = NkVector::zero(k);
    for (i, a) in entries.iter().enumerate().take(k) {
        let mut inner = action.zero();
        let mut term = a.clone();
        for j in 0..n.get(i) {
            inner = action.add(&inner, &term);
            if j + 1 < n.get(i) {
                term = action.act(i, &term);
            }
        }
        if n.get(i) > 0 {
            out = action.add(&out, &action.act_by(&prefix, &inner));
        }
        prefix.0[i] = n.get(i);
    }
    out
}

/// The unique semigroup 1-cocycle `c_a` with `c_a(eᵢ) = aᵢ`, evaluated at `n`.
pub fn evaluate_semigroup_cocycle<M: NkModule>(
    action: &M,
    tuple: &CocycleTuple<M::Elem>,
    n: &NkVector,
) -> Result<M::Elem> {
    check_rank(action, tuple.entries.len())?;
    check_rank(action, n.rank())?;
    Ok(cocycle_formula(action, &tuple.entries, n))
}

/// Whether `c_a(m+n) = c_a(m) + m·c_a(n)` with `c_a` given by the formula.
pub fn verify_cocycle_identity<M: NkModule>(
    action: &M,
    entries: &[M::Elem],
    m: &NkVector,
    n: &NkVector,
) -> Result<bool> {
    check_rank(action, entries.len())?;
    check_rank(action, m.rank())?;
    check_rank(action, n.rank())?;
    let lhs = cocycle_formula(action, entries, &(m + n));
    let rhs = action.add(
        &cocycle_formula(action, entries, m),
        &action.act_by(m, &cocycle_formula(action, entries, n)),
    );
    Ok(action.equal(&lhs, &rhs))
}

/// `(α − eᵢα)ᵢ`.
pub fn coboundary_tuple<M: NkModule>(action: &M, alpha: &M::Elem) -> CocycleTuple<M::Elem> {
    CocycleTuple {
        entries: (0..action.rank())
            .map(|i| action.sub(alpha, &action.act(i, alpha)))
            .collect(),
    }
}

/// Outcome of a bounded-depth coboundary search.
#[derive(Clone, Debug)]
pub struct CoboundarySearch {
    /// A depth-`depth` solution of `aᵢ = α − α∘σᵢ`, if the residual is small.
    pub alpha: Option<CylinderFunction<f64>>,
    /// Largest absolute equation residual of the least-squares solution.
    pub residual: f64,
    pub depth: usize,
}

pub const COBOUNDARY_TOL: f64 = 1e-10;

/// Least-squares search for `α` of depth `search_depth` with `aᵢ = α − α∘σᵢ`.
pub fn is_coboundary<V: Scalar>(
    action: &ShiftAction<V>,
    entries: &[CylinderFunction<V>],
    search_depth: usize,
) -> Result<CoboundarySearch> {
    check_rank(action, entries.len())?;
    for a in entries {
        action.check_element(a)?;
    }
    let needed = entries.iter().map(CylinderFunction::depth).max().unwrap_or(0);
    if search_depth < needed {
        return Err(Error::DepthTooSmall {
            required: needed,
            given: search_depth,
        });
    }
    let space = action.space();
    let unknowns = space.admissible_words(search_depth);
    let col = |w: &crate::symspace::Word| unknowns.binary_search(w).expect("admissible");
    let mut rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    for (i, a) in entries.iter().enumerate() {
        let nf = &action.nfs[i];
        let d = (search_depth + nf.max_consumed()).max(a.depth());
        for v in space.admissible_words(d) {
            let img = nf.image(&v).expect("depth covers consumption");
            let mut coeffs = vec![(col(&v.prefix(search_depth)), 1.0)];
            coeffs.push((col(&img.prefix(search_depth)), -1.0));
            rows.push((coeffs, a.eval(&v).expect("deep enough").to_f64()));
        }
    }
    let mut mat = DMatrix::zeros(rows.len(), unknowns.len());
    let mut rhs = DVector::zeros(rows.len());
    for (r, (coeffs, b)) in rows.iter().enumerate() {
        for &(c, x) in coeffs {
            mat[(r, c)] += x;
        }
        rhs[r] = *b;
    }
    let svd = mat.clone().svd(true, true);
    let x = svd
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::Verification(format!("least squares failed: {e}")))?;
    let residual = (&mat * &x - &rhs).amax();
    let alpha = (residual < COBOUNDARY_TOL).then(|| {
        let mut it = x.iter();
        CylinderFunction::from_fn(space, search_depth, |_| *it.next().expect("one per word"))
    });
    Ok(CoboundarySearch {
        alpha,
        residual,
        depth: search_depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn shift_flip() -> ShiftAction<Rational> {
        let s = SymbolicSpace::full_shift(2).unwrap();
        ShiftAction::new(s, vec![CatalogMap::Shift, CatalogMap::SymbolBijection(vec![1, 0])]).unwrap()
    }

    #[test]
    fn vector_algebra() {
        let m = NkVector::new(vec![1, 3]);
        let n = NkVector::new(vec![2, 0]);
        assert_eq!((&m + &n).len(), m.len() + n.len());
        assert_eq!(m.join(&n), NkVector::new(vec![2, 3]));
        assert!(!m.le(&n) && m.le(&m.join(&n)));
        assert_eq!(m.checked_sub(&n), None);
        assert_eq!(m.diff(&n), vec![-1, 3]);
        assert_eq!(NkVector::all_with_len_at_most(2, 2).len(), 6);
        assert_eq!(NkVector::all_le(&NkVector::new(vec![1, 2])).len(), 6);
        assert_eq!(m.to_string(), "(1,3)");
    }

    #[test]
    fn constant_and_zero_tuples_pass() {
        let act = shift_flip();
        let s = act.space().clone();
        let five = CylinderFunction::constant(&s, q(5));
        assert!(check_module_cocycle_condition(&act, &[five.clone(), five]).unwrap());
        let z = CylinderFunction::zero(&s);
        assert!(check_module_cocycle_condition(&act, &[z.clone(), z]).unwrap());
    }

    #[test]
    fn depth_one_counterexample_fails() {
        let act = shift_flip();
        let s = act.space().clone();
        let a1 = CylinderFunction::from_fn(&s, 1, |w| q((w.parts()[0][0] == 0) as i64));
        let a2 = CylinderFunction::zero(&s);
        let entries = vec![a1, a2];
        assert!(!check_module_cocycle_condition(&act, &entries).unwrap());
        assert!(matches!(
            CocycleTuple::new(&act, entries),
            Err(Error::CocycleCondition { i: 0, j: 1 })
        ));
    }

    #[test]
    fn rank_mismatch() {
        let act = shift_flip();
        let z = CylinderFunction::zero(act.space());
        assert!(matches!(
            check_module_cocycle_condition(&act, &[z]),
            Err(Error::RankMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn constant_tuple_evaluates_linearly() {
        let act = shift_flip();
        let s = act.space().clone();
        let (u, v) = (Rational::new(3.into(), 7.into()), q(-2));
        let t = CocycleTuple::new(
            &act,
            vec![CylinderFunction::constant(&s, u.clone()), CylinderFunction::constant(&s, v.clone())],
        )
        .unwrap();
        let c = evaluate_semigroup_cocycle(&act, &t, &NkVector::new(vec![2, 3])).unwrap();
        let expected = CylinderFunction::constant(&s, q(2) * u + q(3) * v);
        assert!(c.approx_eq(&expected));
        let c0 = evaluate_semigroup_cocycle(&act, &t, &NkVector::zero(2)).unwrap();
        assert!(c0.approx_eq(&CylinderFunction::zero(&s)));
    }

    #[test]
    fn generators_are_read_back() {
        let act = shift_flip();
        let s = act.space().clone();
        let parity = CylinderFunction::from_fn(&s, 2, |w| {
            let p = &w.parts()[0];
            if p[0] == p[1] { q(1) } else { q(-3) }
        });
        let t = CocycleTuple::new(&act, vec![parity.clone(), CylinderFunction::constant(&s, q(2))]).unwrap();
        let c = evaluate_semigroup_cocycle(&act, &t, &NkVector::unit(2, 0)).unwrap();
        assert!(c.approx_eq(&parity));
    }

    #[test]
    fn coboundary_of_indicator() {
        let act = shift_flip();
        let s = act.space().clone();
        let alpha = CylinderFunction::from_fn(&s, 1, |w| q((w.parts()[0][0] == 0) as i64));
        let t = coboundary_tuple(&act, &alpha);
        assert!(check_module_cocycle_condition(&act, t.entries()).unwrap());
        let a1 = &t.entries()[0];
        assert_eq!(a1.depth(), 2);
        for w in s.admissible_words(2) {
            let p = &w.parts()[0];
            let expected = q((p[0] == 0) as i64) - q((p[1] == 0) as i64);
            assert_eq!(a1.eval(&w), Some(&expected));
        }
    }

    #[test]
    fn coboundary_of_constant_is_zero() {
        let act = shift_flip();
        let c = CylinderFunction::constant(act.space(), q(9));
        for a in coboundary_tuple(&act, &c).entries() {
            assert!(a.approx_eq(&CylinderFunction::zero(act.space())));
        }
    }

    #[test]
    fn coboundary_search() {
        let s = SymbolicSpace::full_shift(2).unwrap();
        let act: ShiftAction<f64> =
            ShiftAction::new(s.clone(), vec![CatalogMap::Shift, CatalogMap::SymbolBijection(vec![1, 0])]).unwrap();
        let alpha = CylinderFunction::from_fn(&s, 2, |w| (w.parts()[0][0] * 2 + w.parts()[0][1]) as f64 * 0.3);
        let t = coboundary_tuple(&act, &alpha);
        let found = is_coboundary(&act, t.entries(), 3).unwrap();
        let beta = found.alpha.expect("coboundary recovered");
        let t2 = coboundary_tuple(&act, &beta);
        for (a, b) in t.entries().iter().zip(t2.entries()) {
            assert!(a.sup_distance(b) < 1e-10);
        }

        let constants = vec![CylinderFunction::constant(&s, 1.0), CylinderFunction::constant(&s, 0.5)];
        let r = is_coboundary(&act, &constants, 3).unwrap();
        assert!(r.alpha.is_none() && r.residual > 0.1);

        let zeros = vec![CylinderFunction::zero(&s), CylinderFunction::zero(&s)];
        let z = is_coboundary(&act, &zeros, 1).unwrap().alpha.unwrap();
        assert!(z.values().values().all(|v| v.abs() < 1e-14));

        assert!(matches!(is_coboundary(&act, t.entries(), 2), Err(Error::DepthTooSmall { .. })));
    }

    #[test]
    fn matrix_module_identity() {
        let act = MatrixAction::new(2, vec![vec![vec![2, 0], vec![0, 3]], vec![vec![1, 1], vec![0, 1]]]);
        assert!(matches!(act, Err(Error::NonCommuting { .. })));
        let act = MatrixAction::new(2, vec![vec![vec![2, 1], vec![0, 2]], vec![vec![1, 1], vec![0, 1]]]).unwrap();
        let alpha = vec![4, -1];
        let t = coboundary_tuple(&act, &alpha);
        for m in NkVector::all_with_len_at_most(2, 3) {
            for n in NkVector::all_with_len_at_most(2, 3) {
                assert!(verify_cocycle_identity(&act, t.entries(), &m, &n).unwrap());
            }
        }
        assert!(matches!(
            CocycleTuple::new(&act, vec![vec![0, 1], vec![0, 0]]),
            Err(Error::CocycleCondition { .. })
        ));
    }
}
