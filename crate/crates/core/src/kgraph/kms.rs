use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GaugeDynamics, KGraph, KGraphMeasure, MatrixUnit, Path};
use crate::error::{Error, Result};
use crate::nkmod::NkVector;

/// Largest number of matrix units `kms_check` will enumerate.
pub const MAX_MATRIX_UNITS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KmsReport {
    pub beta: f64,
    pub degree_bound: NkVector,
    pub matrix_units: usize,
    /// Pairs whose two sides were computed.
    pub pairs_evaluated: u64,
    /// Pairs of total degree `≠ 0`, where both sides vanish by grading.
    pub pairs_skipped: u64,
    pub max_violation: f64,
    /// Paths `[λ, μ, ρ, τ]` of `f = E_{λ,μ}`, `g = E_{ρ,τ}` attaining the maximum.
    pub worst_pair: Option<[String; 4]>,
    pub tol: f64,
    pub pass: bool,
}

struct Tables {
    paths: Vec<Path>,
    /// `comp[i][j]`: interned id of `pᵢpⱼ`.
    comp: Vec<Vec<Option<usize>>>,
    /// `mce[i][j]`: minimal common extensions of `pᵢ` and `pⱼ`, as ids.
    mce: Vec<Vec<Vec<(usize, usize)>>>,
    masses: Vec<f64>,
}

/// Checks `ω(fg) = ω(g α_{iβ}(f))` for all matrix units `f, g` whose paths
/// have degree at most `degree_bound`, with `ω(E_{λ,μ}) = [λ = μ] μ(Z(λ))`.
///
/// Pairs whose unit degrees do not cancel are counted as skipped: both
/// products then have nonzero degree and every diagonal term vanishes.
pub fn kms_check(
    graph: &KGraph,
    measure: &KGraphMeasure,
    beta: f64,
    dynamics: &GaugeDynamics,
    degree_bound: &NkVector,
    tol: f64,
) -> Result<KmsReport> {
    check(graph, measure, beta, dynamics, degree_bound, tol, false)
}

/// [`kms_check`] evaluating both sides on every pair, graded or not.
pub fn kms_check_all_pairs(
    graph: &KGraph,
    measure: &KGraphMeasure,
    beta: f64,
    dynamics: &GaugeDynamics,
    degree_bound: &NkVector,
    tol: f64,
) -> Result<KmsReport> {
    check(graph, measure, beta, dynamics, degree_bound, tol, true)
}

fn check(
    graph: &KGraph,
    measure: &KGraphMeasure,
    beta: f64,
    dynamics: &GaugeDynamics,
    degree_bound: &NkVector,
    tol: f64,
    all_pairs: bool,
) -> Result<KmsReport> {
    if degree_bound.rank() != graph.rank() {
        return Err(Error::RankMismatch {
            expected: graph.rank(),
            found: degree_bound.rank(),
        });
    }
    if graph.is_degenerate() {
        log::warn!("kms check requested on a graph whose path space is finite");
        return Err(Error::Degenerate(
            "every vertex receives one edge of each color, so the path space is finite".into(),
        ));
    }
    let base: Vec<Path> = (0..graph.num_vertices())
        .flat_map(|v| graph.paths_up_to(v, degree_bound))
        .collect();
    let units: Vec<(usize, usize)> = (0..base.len())
        .flat_map(|i| (0..base.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| base[i].source() == base[j].source())
        .collect();
    if units.len() > MAX_MATRIX_UNITS {
        return Err(Error::InvalidArgument(format!(
            "{} matrix units exceed the limit of {MAX_MATRIX_UNITS}",
            units.len()
        )));
    }
    let tables = build_tables(graph, measure, base);
    let unit_degree: Vec<Vec<i64>> = units
        .iter()
        .map(|&(l, m)| tables.paths[l].degree().diff(tables.paths[m].degree()))
        .collect();
    let factors: Vec<f64> = units
        .iter()
        .map(|&(l, m)| {
            let u = MatrixUnit::new(tables.paths[l].clone(), tables.paths[m].clone()).expect("shared source");
            (-beta * dynamics.value(&u)).exp()
        })
        .collect();
    let mut by_degree: HashMap<&[i64], Vec<usize>> = HashMap::new();
    for (t, d) in unit_degree.iter().enumerate() {
        by_degree.entry(d.as_slice()).or_default().push(t);
    }
    let total_pairs = (units.len() as u64).pow(2);
    let everything: Vec<usize> = (0..units.len()).collect();

    type Partial = (u64, f64, Option<(usize, usize)>);
    let results: Vec<Partial> = (0..units.len())
        .into_par_iter()
        .map(|fi| {
            let (l, m) = units[fi];
            let neg: Vec<i64> = unit_degree[fi].iter().map(|d| -d).collect();
            let partners = if all_pairs {
                everything.as_slice()
            } else {
                by_degree.get(neg.as_slice()).map(Vec::as_slice).unwrap_or(&[])
            };
            let mut worst = (-1.0, None);
            for &gi in partners {
                let (r, t) = units[gi];
                let lhs = omega_product(&tables, l, m, r, t);
                let rhs = factors[fi] * omega_product(&tables, r, t, l, m);
                let v = (lhs - rhs).abs();
                if v > worst.0 {
                    worst = (v, Some((fi, gi)));
                }
            }
            (partners.len() as u64, worst.0, worst.1)
        })
        .collect();

    let pairs_evaluated: u64 = results.iter().map(|r| r.0).sum();
    let (max_violation, worst_pair) = results
        .iter()
        .filter(|r| r.2.is_some())
        .fold((0.0, None), |acc, r| if acc.1.is_none() || r.1 > acc.0 { (r.1, r.2) } else { acc });
    let worst_pair = worst_pair.map(|(fi, gi)| {
        let (l, m) = units[fi];
        let (r, t) = units[gi];
        [l, m, r, t].map(|i| graph.format_path(&tables.paths[i]))
    });
    log::info!("kms check: {pairs_evaluated} pairs evaluated, max violation {max_violation:e}");
    Ok(KmsReport {
        beta,
        degree_bound: degree_bound.clone(),
        matrix_units: units.len(),
        pairs_evaluated,
        pairs_skipped: total_pairs - pairs_evaluated,
        max_violation,
        worst_pair,
        tol,
        pass: max_violation <= tol,
    })
}

/// `ω(E_{λ,μ} E_{ρ,τ}) = Σ_{(α,β)} [λα = τβ] μ(Z(λα))`.
fn omega_product(t: &Tables, l: usize, m: usize, r: usize, tau: usize) -> f64 {
    t.mce[m][r]
        .iter()
        .filter_map(|&(a, b)| {
            let left = t.comp[l][a]?;
            (Some(left) == t.comp[tau][b]).then(|| t.masses[left])
        })
        .sum()
}

fn build_tables(graph: &KGraph, measure: &KGraphMeasure, base: Vec<Path>) -> Tables {
    let nb = base.len();
    let mut index: HashMap<Path, usize> = base.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let mut paths = base;
    let mut intern = |p: Path, paths: &mut Vec<Path>| -> usize {
        *index.entry(p.clone()).or_insert_with(|| {
            paths.push(p);
            paths.len() - 1
        })
    };
    let mut mce = vec![vec![Vec::new(); nb]; nb];
    for i in 0..nb {
        for j in 0..nb {
            for (a, b) in graph.minimal_common_extensions(&paths[i].clone(), &paths[j].clone()) {
                let a = intern(a, &mut paths);
                let b = intern(b, &mut paths);
                mce[i][j].push((a, b));
            }
        }
    }
    // Extensions have degree at most the bound, so they are base paths.
    debug_assert_eq!(paths.len(), nb);
    let mut comp = vec![vec![None; nb]; nb];
    for i in 0..nb {
        for j in 0..nb {
            if let Some(p) = graph.compose(&paths[i].clone(), &paths[j].clone()) {
                comp[i][j] = Some(intern(p, &mut paths));
            }
        }
    }
    let masses = paths.iter().map(|p| measure.cylinder_mass(p)).collect();
    Tables { paths, comp, mce, masses }
}
