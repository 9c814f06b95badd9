use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{CategoricalCocycle, KGraph, KGraphMeasure, Path};
use crate::error::{Error, Result};

/// `E_{λ,μ}`, the indicator of `{(λx, d(λ) − d(μ), μx)}`; needs `s(λ) = s(μ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixUnit {
    left: Path,
    right: Path,
}

impl MatrixUnit {
    pub fn new(left: Path, right: Path) -> Result<Self> {
        if left.source() != right.source() {
            return Err(Error::InvalidArgument("matrix unit paths must share a source".into()));
        }
        Ok(MatrixUnit { left, right })
    }

    pub fn left(&self) -> &Path {
        &self.left
    }

    pub fn right(&self) -> &Path {
        &self.right
    }

    /// `d(λ) − d(μ)`.
    pub fn degree(&self) -> Vec<i64> {
        self.left.degree().diff(self.right.degree())
    }

    pub fn adjoint(&self) -> MatrixUnit {
        MatrixUnit {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }
}

/// A finite complex combination of matrix units. Zero coefficients are dropped.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FiniteOperator {
    terms: BTreeMap<MatrixUnit, Complex64>,
}

impl FiniteOperator {
    pub fn zero() -> Self {
        FiniteOperator::default()
    }

    pub fn unit(u: MatrixUnit) -> Self {
        FiniteOperator::zero().plus_term(u, Complex64::new(1.0, 0.0))
    }

    pub fn terms(&self) -> &BTreeMap<MatrixUnit, Complex64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn plus_term(mut self, u: MatrixUnit, c: Complex64) -> Self {
        self.add_term(u, c);
        self
    }

    fn add_term(&mut self, u: MatrixUnit, c: Complex64) {
        let entry = self.terms.entry(u).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (u, c) in &other.terms {
            out.add_term(u.clone(), *c);
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = FiniteOperator::zero();
        for (u, v) in &self.terms {
            out.add_term(u.clone(), v * c);
        }
        out
    }

    /// Largest coefficient modulus of `self − other`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.plus(&other.scale(Complex64::new(-1.0, 0.0)))
            .terms
            .values()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Bilinear extension of `E_{λ,μ} E_{ρ,τ} = Σ_{(α,β)} E_{λα, τβ}` over the
/// minimal common extensions of `μ` and `ρ`.
pub fn convolve(graph: &KGraph, a: &FiniteOperator, b: &FiniteOperator) -> FiniteOperator {
    let mut out = FiniteOperator::zero();
    for (f, x) in &a.terms {
        for (g, y) in &b.terms {
            for (alpha, beta) in graph.minimal_common_extensions(&f.right, &g.left) {
                let left = graph.compose(&f.left, &alpha).expect("s(λ) = s(μ) = r(α)");
                let right = graph.compose(&g.right, &beta).expect("s(τ) = s(ρ) = r(β)");
                out.add_term(MatrixUnit { left, right }, x * y);
            }
        }
    }
    out
}

/// Reverses every unit and conjugates its coefficient.
pub fn adjoint(a: &FiniteOperator) -> FiniteOperator {
    let mut out = FiniteOperator::zero();
    for (u, c) in &a.terms {
        out.add_term(u.adjoint(), c.conj());
    }
    out
}

/// The real cocycle `c(λ, μ) = ⟨a, d(λ) − d(μ)⟩ + b (h(λ) − h(μ))` on matrix units.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeDynamics {
    pub a: Vec<f64>,
    pub b: f64,
    pub weights: Vec<f64>,
}

impl GaugeDynamics {
    /// `ςᵢ = (ln λᵢ − φᵢ) / β` with `φᵢ = −θh`: `a = ln 𝛌 / β`, `b = θ / β`.
    pub fn normalized(measure: &KGraphMeasure, beta: f64) -> Result<Self> {
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!("β must be finite and nonzero, got {beta}")));
        }
        Ok(GaugeDynamics {
            a: measure.eigenvalues.iter().map(|l| l.ln() / beta).collect(),
            b: measure.cocycle.theta / beta,
            weights: measure.cocycle.weights.clone(),
        })
    }

    /// The dynamics of `φᵢ = −θh` itself: `a = 0`, `b = −θ`.
    pub fn unnormalized(cocycle: &CategoricalCocycle, rank: usize) -> Self {
        GaugeDynamics {
            a: vec![0.0; rank],
            b: -cocycle.theta,
            weights: cocycle.weights.clone(),
        }
    }

    pub fn path_weight(&self, p: &Path) -> f64 {
        p.edges().iter().map(|&e| self.weights[e]).sum()
    }

    pub fn value(&self, u: &MatrixUnit) -> f64 {
        let deg: f64 = self.a.iter().zip(u.degree()).map(|(a, d)| a * d as f64).sum();
        deg + self.b * (self.path_weight(&u.left) - self.path_weight(&u.right))
    }
}

/// `α_z(E_{λ,μ}) = e^{i z c(λ,μ)} E_{λ,μ}`, for complex `z`.
pub fn gauge_action(op: &FiniteOperator, dynamics: &GaugeDynamics, z: Complex64) -> FiniteOperator {
    let mut out = FiniteOperator::zero();
    for (u, c) in &op.terms {
        let factor = (Complex64::i() * z * dynamics.value(u)).exp();
        out.add_term(u.clone(), c * factor);
    }
    out
}

/// `ω(E_{λ,μ}) = [λ = μ] μ(Z(λ))`, extended linearly.
pub fn state(measure: &KGraphMeasure, op: &FiniteOperator) -> Complex64 {
    op.terms
        .iter()
        .filter(|(u, _)| u.left == u.right)
        .map(|(u, c)| c * measure.cylinder_mass(&u.left))
        .sum()
}
