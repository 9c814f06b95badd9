//! Number types used by cylinder functions.
//!
//! Potentials are either `f64` or exact rationals. Ruelle weights `e^{φ}` of a
//! rational potential live in [`ExpPoly`], the ring of finite sums
//! `Σ cᵣ·e^{r}` with rational `cᵣ` and `r`. Distinct rational exponentials are
//! linearly independent over the rationals, so equality in this ring is
//! equality of the real numbers it denotes.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Relative tolerance for floating equality.
pub const FLOAT_TOL: f64 = 1e-12;

pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Whether [`Scalar::approx_eq`] is exact equality.
    const EXACT: bool;

    fn approx_eq(&self, other: &Self) -> bool;
    fn to_f64(&self) -> f64;
    fn from_i64(n: i64) -> Self;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn approx_eq(&self, other: &Self) -> bool {
        let scale = 1.0_f64.max(self.abs()).max(other.abs());
        (self - other).abs() <= FLOAT_TOL * scale
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

/// A potential value type together with the type of its exponential.
pub trait Potential: Scalar {
    type Weight: Scalar;

    fn exp_weight(&self) -> Self::Weight;
}

impl Potential for f64 {
    type Weight = f64;

    fn exp_weight(&self) -> f64 {
        self.exp()
    }
}

impl Potential for BigRational {
    type Weight = ExpPoly;

    fn exp_weight(&self) -> ExpPoly {
        ExpPoly::exp(self.clone())
    }
}

/// Exact element `Σ coeff·e^{exponent}` with rational data.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExpPoly {
    terms: BTreeMap<BigRational, BigRational>,
}

impl ExpPoly {
    /// `e^r`.
    pub fn exp(r: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(r, BigRational::one());
        ExpPoly { terms }
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = ExpPoly::default();
        p.add_term(BigRational::zero(), c);
        p
    }

    /// Map from exponent to coefficient, zero coefficients omitted.
    pub fn terms(&self) -> &BTreeMap<BigRational, BigRational> {
        &self.terms
    }

    fn add_term(&mut self, exponent: BigRational, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exponent) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            if e.is_zero() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}·e^({e})")?;
            }
        }
        Ok(())
    }
}

impl Add for ExpPoly {
    type Output = ExpPoly;

    fn add(mut self, rhs: ExpPoly) -> ExpPoly {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Sub for ExpPoly {
    type Output = ExpPoly;

    fn sub(self, rhs: ExpPoly) -> ExpPoly {
        self + (-rhs)
    }
}

impl Neg for ExpPoly {
    type Output = ExpPoly;

    fn neg(self) -> ExpPoly {
        ExpPoly {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Mul for ExpPoly {
    type Output = ExpPoly;

    fn mul(self, rhs: ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::default();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Zero for ExpPoly {
    fn zero() -> Self {
        ExpPoly::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for ExpPoly {
    fn one() -> Self {
        ExpPoly::constant(BigRational::one())
    }
}

impl Scalar for ExpPoly {
    const EXACT: bool = true;

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| Scalar::to_f64(c) * Scalar::to_f64(e).exp())
            .sum()
    }

    fn from_i64(n: i64) -> Self {
        ExpPoly::constant(BigRational::from_i64(n))
    }
}

/// Parses `"p/q"`, an integer, or a finite decimal into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Ok(r) = s.parse::<BigRational>() {
        return Some(r);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.')?;
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(digits, denom);
    Some(if neg { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn exp_weights_multiply_by_adding_exponents() {
        let a = q(1, 3).exp_weight();
        let b = q(-1, 3).exp_weight();
        assert_eq!(a * b, ExpPoly::one());
    }

    #[test]
    fn cancellation_removes_terms() {
        let a = ExpPoly::exp(q(2, 1));
        let z = a.clone() - a;
        assert!(z.is_zero());
        assert_eq!(z.terms().len(), 0);
    }

    #[test]
    fn distinct_exponentials_stay_distinct() {
        let a = ExpPoly::exp(q(1, 2)) + ExpPoly::exp(q(1, 2));
        let b = ExpPoly::exp(q(1, 1));
        assert_ne!(a, b);
        assert_eq!(a.terms()[&q(1, 2)], q(2, 1));
    }

    #[test]
    fn float_value_matches() {
        let p = ExpPoly::exp(q(1, 2)) * ExpPoly::constant(q(3, 1)) + ExpPoly::one();
        assert!((p.to_f64() - (3.0 * 0.5f64.exp() + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn float_tolerance_is_relative() {
        assert!(1e6_f64.approx_eq(&(1e6 + 1e-7)));
        assert!(!1.0_f64.approx_eq(&(1.0 + 1e-9)));
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3/4"), Some(q(3, 4)));
        assert_eq!(parse_rational("-7"), Some(q(-7, 1)));
        assert_eq!(parse_rational("-0.25"), Some(q(-1, 4)));
        assert_eq!(parse_rational("1.5"), Some(q(3, 2)));
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("1e3"), None);
    }
}
