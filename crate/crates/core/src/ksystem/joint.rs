use super::{cocycle_condition_witness, KRuelleSystem};
use crate::error::{Error, Result};
use crate::nkmod::NkVector;
use crate::ruelle::{dual_apply, rpf_solve, RpfOptions, RpfSolution};
use crate::symspace::{CylinderFunction, CylinderMeasure};

#[derive(Clone, Debug)]
pub struct JointRpfOptions {
    pub solver: RpfOptions,
    /// Bound on `‖Lᵢ*μ − λᵢμ‖₁ / max(1, λᵢ)` for every coordinate.
    pub verify_tol: f64,
}

impl Default for JointRpfOptions {
    fn default() -> Self {
        JointRpfOptions {
            solver: RpfOptions::default(),
            verify_tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct JointRpfSolution {
    /// `λᵢ = (Lᵢ*μ)(X)`.
    pub eigenvalues: Vec<f64>,
    pub measure: CylinderMeasure,
    /// `‖Lᵢ*μ − λᵢμ‖₁ / max(1, λᵢ)`.
    pub residuals: Vec<f64>,
    /// Solution for the composed operator `Ψ(1,…,1)`.
    pub composed: RpfSolution,
}

impl JointRpfSolution {
    pub fn log_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|l| l.ln()).collect()
    }
}

/// Common eigenmeasure of `L₁*, …, L_k*` at cylinder depth `depth`.
///
/// The measure is the Perron measure of `Ψ(1,…,1)`, whose map must carry
/// both certificates; each `λᵢ` is then read off and checked against
/// `opts.verify_tol`.
pub fn joint_rpf_solve(
    system: &KRuelleSystem<f64>,
    depth: usize,
    opts: &JointRpfOptions,
) -> Result<JointRpfSolution> {
    if let Some((i, j)) = cocycle_condition_witness(system) {
        return Err(Error::CocycleCondition { i, j });
    }
    let composed = system.composed_triple(&NkVector::ones(system.rank()))?;
    let certs = composed.map().certificates(system.space())?;
    if !certs.certified() {
        return Err(Error::MissingCertificate(format!(
            "σ₁∘…∘σ_k: positively expansive {:?}, exact {:?}",
            certs.positively_expansive, certs.exact_certificate
        )));
    }
    let solution = rpf_solve(&composed, depth, &opts.solver)?;
    let mu = solution.measure.normalized();
    let mut eigenvalues = Vec::with_capacity(system.rank());
    let mut residuals = Vec::with_capacity(system.rank());
    for i in 0..system.rank() {
        let image = dual_apply(&system.triple(i), &mu)?;
        let lambda = image.total();
        let residual = image
            .masses()
            .iter()
            .map(|(w, m)| (m - lambda * mu.masses()[w]).abs())
            .sum::<f64>()
            / lambda.max(1.0);
        if !(residual <= opts.verify_tol) {
            return Err(Error::Verification(format!(
                "coordinate {i}: ‖L*μ − λμ‖₁ = {residual:e} exceeds {:e}",
                opts.verify_tol
            )));
        }
        eigenvalues.push(lambda);
        residuals.push(residual);
    }
    log::debug!("joint rpf: lambdas {eigenvalues:?}");
    Ok(JointRpfSolution {
        eigenvalues,
        measure: mu,
        residuals,
        composed: solution,
    })
}

/// `ςᵢ = (ln λᵢ − φᵢ) / β`, the dynamics for which `μ` is a `β`-KMS state.
pub fn normalize_system(
    system: &KRuelleSystem<f64>,
    solution: &JointRpfSolution,
    beta: f64,
) -> Result<KRuelleSystem<f64>> {
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("β must be finite and nonzero, got {beta}")));
    }
    if solution.eigenvalues.len() != system.rank() {
        return Err(Error::RankMismatch {
            expected: system.rank(),
            found: solution.eigenvalues.len(),
        });
    }
    let potentials = system
        .potentials()
        .iter()
        .zip(&solution.eigenvalues)
        .map(|(phi, lambda)| {
            let c = CylinderFunction::constant(system.space(), lambda.ln());
            c.minus(phi).map(|f| f.scale(&(1.0 / beta)))
        })
        .collect::<Result<Vec<_>>>()?;
    system.with_potentials(potentials)
}

/// `‖Lᵢ*μ − μ‖₁` for each coordinate.
pub fn quasi_invariance_residuals(system: &KRuelleSystem<f64>, mu: &CylinderMeasure) -> Result<Vec<f64>> {
    (0..system.rank())
        .map(|i| {
            let image = dual_apply(&system.triple(i), mu)?;
            Ok(image
                .masses()
                .iter()
                .map(|(w, m)| (m - mu.masses()[w]).abs())
                .sum())
        })
        .collect()
}

/// Whether `Lᵢ*μ = μ` for every `i`, up to `tol` in total variation.
///
/// For a normalized dynamics `ς` at inverse temperature `β`, pass the system
/// with potentials `−βςᵢ`.
pub fn quasi_invariance_check(system: &KRuelleSystem<f64>, mu: &CylinderMeasure, tol: f64) -> Result<bool> {
    Ok(quasi_invariance_residuals(system, mu)?.iter().all(|r| *r <= tol))
}
