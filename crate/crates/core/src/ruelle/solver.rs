use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perron;
use crate::symspace::{CylinderFunction, CylinderMeasure};

use super::matrix::transfer_matrix;
use super::operator::RuelleTriple;

#[derive(Clone, Debug)]
pub struct RpfOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Optional strictly positive starting vectors, one entry per depth-`m` word.
    pub start_h: Option<Vec<f64>>,
    pub start_mu: Option<Vec<f64>>,
}

impl Default for RpfOptions {
    fn default() -> Self {
        RpfOptions {
            tol: 1e-12,
            max_iter: 100_000,
            start_h: None,
            start_mu: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Uniqueness {
    /// The map is positively expansive and exact and the potential is
    /// locally constant.
    Certified,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct RpfSolution {
    pub eigenvalue: f64,
    pub measure: CylinderMeasure,
    pub eigenfunction: CylinderFunction<f64>,
    /// `‖Lh − λh‖∞ / max(1, λ)`.
    pub residual_h: f64,
    /// `‖L*μ − λμ‖₁ / max(1, λ)`.
    pub residual_mu: f64,
    pub iterations: usize,
    pub primitivity_exponent: usize,
    pub uniqueness: Uniqueness,
}

/// Perron eigen-data of the depth-`m` transfer matrix.
pub fn rpf_solve(triple: &RuelleTriple<f64>, m: usize, opts: &RpfOptions) -> Result<RpfSolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let tm = transfer_matrix(triple, m)?;
    let exponent = perron::primitivity_exponent(&tm.matrix)
        .map_err(|d| Error::NotPrimitive(format!("depth-{m} transfer matrix is {d}")))?;
    let pair = perron::power_iterate(
        &tm.matrix,
        opts.tol,
        opts.max_iter,
        opts.start_h.as_deref(),
        opts.start_mu.as_deref(),
    )?;
    log::debug!(
        "rpf: lambda={} after {} iterations at depth {m}",
        pair.lambda,
        pair.iterations
    );
    let space = triple.space();
    let mut h_vals = pair.right.iter();
    let eigenfunction =
        CylinderFunction::from_fn(space, m, |_| *h_vals.next().expect("one value per word"));
    let measure = CylinderMeasure::from_vec(space, m, &tm.words, &pair.left);
    let uniqueness = if triple.map().certificates(space)?.certified() {
        Uniqueness::Certified
    } else {
        Uniqueness::Unknown
    };
    Ok(RpfSolution {
        eigenvalue: pair.lambda,
        measure,
        eigenfunction,
        residual_h: pair.residual_right,
        residual_mu: pair.residual_left,
        iterations: pair.iterations,
        primitivity_exponent: exponent,
        uniqueness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symspace::{CatalogMap, SymbolicSpace};

    #[test]
    fn counting_measure_is_uniform() {
        for n in 2..=4 {
            let s = SymbolicSpace::full_shift(n).unwrap();
            let t = RuelleTriple::new(s.clone(), CatalogMap::Shift, CylinderFunction::zero(&s)).unwrap();
            let sol = rpf_solve(&t, 2, &RpfOptions::default()).unwrap();
            assert!((sol.eigenvalue - n as f64).abs() < 1e-12);
            let u = 1.0 / (n * n) as f64;
            assert!(sol.measure.masses().values().all(|m| (m - u).abs() < 1e-14));
            assert!(sol.eigenfunction.values().values().all(|h| (h - 1.0).abs() < 1e-14));
            assert_eq!(sol.uniqueness, Uniqueness::Certified);
        }
    }

    #[test]
    fn golden_mean_eigenvalue() {
        let s = SymbolicSpace::sft(vec![vec![1, 1], vec![1, 0]]).unwrap();
        let t = RuelleTriple::new(s.clone(), CatalogMap::Shift, CylinderFunction::zero(&s)).unwrap();
        let sol = rpf_solve(&t, 3, &RpfOptions::default()).unwrap();
        assert!((sol.eigenvalue - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!(sol.residual_h <= 1e-12 && sol.residual_mu <= 1e-12);
    }

    #[test]
    fn bijection_is_not_primitive() {
        let s = SymbolicSpace::full_shift(2).unwrap();
        let t = RuelleTriple::new(
            s.clone(),
            CatalogMap::SymbolBijection(vec![1, 0]),
            CylinderFunction::zero(&s),
        )
        .unwrap();
        assert!(matches!(rpf_solve(&t, 1, &RpfOptions::default()), Err(Error::NotPrimitive(_))));
    }

    #[test]
    fn non_convergence_is_reported() {
        let s = SymbolicSpace::sft(vec![vec![1, 1], vec![1, 0]]).unwrap();
        let t = RuelleTriple::new(s.clone(), CatalogMap::Shift, CylinderFunction::zero(&s)).unwrap();
        let opts = RpfOptions {
            max_iter: 2,
            ..RpfOptions::default()
        };
        assert!(matches!(rpf_solve(&t, 2, &opts), Err(Error::NoConvergence { .. })));
    }
}
