use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{joint_rpf_solve, JointRpfOptions, KRuelleSystem};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct BetaSearchOptions {
    pub beta_min: f64,
    pub beta_max: f64,
    /// Number of grid points scanned for sign changes.
    pub grid: usize,
    /// Bisection stops once the bracket is shorter than this.
    pub tol: f64,
    /// Roots of different coordinates closer than this are identified.
    pub match_tol: f64,
    pub depth: usize,
    pub joint: JointRpfOptions,
}

impl Default for BetaSearchOptions {
    fn default() -> Self {
        BetaSearchOptions {
            beta_min: -50.0,
            beta_max: 50.0,
            grid: 64,
            tol: 1e-10,
            match_tol: 1e-8,
            depth: 1,
            joint: JointRpfOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoordinateRoots {
    Roots { roots: Vec<f64> },
    /// `ln λᵢ` vanishes at every grid point.
    Everywhere,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaSearchResult {
    pub coordinates: Vec<CoordinateRoots>,
    /// Values of `β` that are roots of every coordinate.
    pub common: Vec<f64>,
}

const VANISHING: f64 = 1e-12;

/// Inverse temperatures `β` in `[beta_min, beta_max]` with
/// `ln λᵢ(−βφ) = 0` for all `i`, where `λᵢ(−βφ)` are the joint eigenvalues
/// of the system with potentials `−βφᵢ`.
///
/// Each coordinate is scanned on a uniform grid and refined by bisection.
/// Fails if no coordinate changes sign on the interval.
pub fn beta_search(system: &KRuelleSystem<f64>, opts: &BetaSearchOptions) -> Result<BetaSearchResult> {
    if !(opts.beta_min < opts.beta_max) || opts.grid < 2 || !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bad search interval [{}, {}] with {} grid points",
            opts.beta_min, opts.beta_max, opts.grid
        )));
    }
    let k = system.rank();
    let log_lambdas = |beta: f64| -> Result<Vec<f64>> {
        let sol = joint_rpf_solve(&system.scaled(&-beta), opts.depth, &opts.joint)?;
        Ok(sol.log_eigenvalues())
    };
    let step = (opts.beta_max - opts.beta_min) / (opts.grid - 1) as f64;
    let grid: Vec<f64> = (0..opts.grid)
        .map(|t| if t + 1 == opts.grid { opts.beta_max } else { opts.beta_min + step * t as f64 })
        .collect();
    let values = grid
        .par_iter()
        .map(|&b| log_lambdas(b))
        .collect::<Result<Vec<_>>>()?;

    let mut coordinates = Vec::with_capacity(k);
    for i in 0..k {
        let g: Vec<f64> = values.iter().map(|v| v[i]).collect();
        if g.iter().all(|v| v.abs() <= VANISHING) {
            coordinates.push(CoordinateRoots::Everywhere);
            continue;
        }
        let mut roots = Vec::new();
        for t in 0..grid.len() {
            if g[t] == 0.0 {
                roots.push(grid[t]);
            } else if t + 1 < grid.len() && g[t + 1] != 0.0 && (g[t] < 0.0) != (g[t + 1] < 0.0) {
                roots.push(bisect(|b| Ok(log_lambdas(b)?[i]), grid[t], grid[t + 1], g[t], opts.tol)?);
            }
        }
        coordinates.push(CoordinateRoots::Roots { roots });
    }

    let finite: Vec<&Vec<f64>> = coordinates
        .iter()
        .filter_map(|c| match c {
            CoordinateRoots::Roots { roots } => Some(roots),
            CoordinateRoots::Everywhere => None,
        })
        .collect();
    if finite.is_empty() {
        return Err(Error::Degenerate("every ln λᵢ vanishes identically".into()));
    }
    if finite.iter().all(|r| r.is_empty()) {
        return Err(Error::InvalidArgument(format!(
            "no ln λᵢ changes sign on [{}, {}]",
            opts.beta_min, opts.beta_max
        )));
    }
    let mut common = Vec::new();
    for &r in finite[0] {
        let mut matched = vec![r];
        for other in &finite[1..] {
            match other.iter().find(|s| (*s - r).abs() <= opts.match_tol) {
                Some(&s) => matched.push(s),
                None => break,
            }
        }
        if matched.len() == finite.len() {
            common.push(matched.iter().sum::<f64>() / matched.len() as f64);
        }
    }
    Ok(BetaSearchResult { coordinates, common })
}

fn bisect(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, f_lo: f64, tol: f64) -> Result<f64> {
    let lo_negative = f_lo < 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if (v < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symspace::{CatalogMap, CylinderFunction, SymbolicSpace};

    fn cuntz(n: usize) -> KRuelleSystem<f64> {
        let s = SymbolicSpace::full_shift(n).unwrap();
        KRuelleSystem::new(s.clone(), vec![CatalogMap::Shift], vec![CylinderFunction::constant(&s, 1.0)]).unwrap()
    }

    #[test]
    fn cuntz_root_is_log_n() {
        for n in 2..=4 {
            let r = beta_search(&cuntz(n), &BetaSearchOptions::default()).unwrap();
            assert_eq!(r.common.len(), 1);
            assert!((r.common[0] - (n as f64).ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn incompatible_coordinates_have_no_common_root() {
        let s = SymbolicSpace::product(vec![
            SymbolicSpace::full_shift(2).unwrap(),
            SymbolicSpace::full_shift(3).unwrap(),
        ])
        .unwrap();
        let one = CylinderFunction::constant(&s, 1.0);
        let sys = KRuelleSystem::new(
            s,
            vec![
                CatalogMap::FactorMap(0, Box::new(CatalogMap::Shift)),
                CatalogMap::FactorMap(1, Box::new(CatalogMap::Shift)),
            ],
            vec![one.clone(), one],
        )
        .unwrap();
        let r = beta_search(&sys, &BetaSearchOptions::default()).unwrap();
        assert!(r.common.is_empty());
        let roots: Vec<f64> = r
            .coordinates
            .iter()
            .map(|c| match c {
                CoordinateRoots::Roots { roots } => roots[0],
                CoordinateRoots::Everywhere => panic!(),
            })
            .collect();
        assert!((roots[0] - 2f64.ln()).abs() < 1e-9);
        assert!((roots[1] - 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn no_sign_change_is_an_error() {
        let opts = BetaSearchOptions {
            beta_min: 1.0,
            beta_max: 2.0,
            ..Default::default()
        };
        assert!(beta_search(&cuntz(10), &opts).is_err());
    }
}
