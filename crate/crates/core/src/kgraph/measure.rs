use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{KGraph, KGraphSpec, Path};
use crate::error::{Error, Result};
use crate::nkmod::NkVector;
use crate::perron;
use crate::ruelle::{rpf_solve, RpfOptions, RuelleTriple};
use crate::symspace::{CatalogMap, CylinderFunction, SymbolicSpace, Word};

/// Edge weights `h` of a categorical cocycle together with the scale `θ`,
/// giving the potentials `φᵢ(x) = −θ h(x(0, eᵢ))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoricalCocycle {
    pub weights: Vec<f64>,
    pub theta: f64,
}

const SQUARE_TOL: f64 = 1e-12;
const COMMON_VECTOR_TOL: f64 = 1e-10;

impl CategoricalCocycle {
    /// Weights from a graph description; edges missing from `h` weigh 0.
    pub fn from_spec(graph: &KGraph, spec: &KGraphSpec) -> Result<Self> {
        let mut weights = vec![0.0; graph.num_edges()];
        if let Some(h) = &spec.h {
            for (id, w) in h {
                let e = graph
                    .edge(id)
                    .ok_or_else(|| Error::InvalidGraph(format!("h mentions unknown edge {id}")))?;
                weights[e] = *w;
            }
        }
        let c = CategoricalCocycle {
            weights,
            theta: spec.theta.unwrap_or(0.0),
        };
        c.check(graph)?;
        Ok(c)
    }

    pub fn constant(graph: &KGraph, h: f64, theta: f64) -> Self {
        CategoricalCocycle {
            weights: vec![h; graph.num_edges()],
            theta,
        }
    }

    /// `h(e) + h(f) = h(f') + h(e')` on every square.
    pub fn check(&self, graph: &KGraph) -> Result<()> {
        if self.weights.len() != graph.num_edges() {
            return Err(Error::RankMismatch {
                expected: graph.num_edges(),
                found: self.weights.len(),
            });
        }
        for a in 0..graph.num_edges() {
            for b in 0..graph.num_edges() {
                if graph.color(a) >= graph.color(b) || graph.src(a) != graph.rng(b) {
                    continue;
                }
                let p = graph.path(&[a, b])?;
                let (f, e) = graph.factorize(&p, &NkVector::unit(graph.rank(), graph.color(b)), &NkVector::unit(graph.rank(), graph.color(a)))?;
                let lhs = self.weights[a] + self.weights[b];
                let rhs = self.weights[f.edges()[0]] + self.weights[e.edges()[0]];
                if (lhs - rhs).abs() > SQUARE_TOL * lhs.abs().max(rhs.abs()).max(1.0) {
                    return Err(Error::InvalidGraph(format!(
                        "h is not square-consistent on {}.{}",
                        graph.edge_name(a),
                        graph.edge_name(b)
                    )));
                }
            }
        }
        Ok(())
    }

    /// `h(λ)`, the sum of edge weights along any decomposition.
    pub fn path_weight(&self, path: &Path) -> f64 {
        path.edges().iter().map(|&e| self.weights[e]).sum()
    }
}

/// `Aᵢ[v][w] = Σ_{e ∈ vΛ^{eᵢ}w} e^{−θh(e)}`.
pub fn vertex_matrices(graph: &KGraph, cocycle: &CategoricalCocycle) -> Result<Vec<DMatrix<f64>>> {
    cocycle.check(graph)?;
    let nv = graph.num_vertices();
    let mut out = vec![DMatrix::zeros(nv, nv); graph.rank()];
    for e in 0..graph.num_edges() {
        out[graph.color(e)][(graph.rng(e), graph.src(e))] += (-cocycle.theta * cocycle.weights[e]).exp();
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct KGraphRpfOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Bound on `|n|` when searching for a primitivity witness.
    pub primitivity_bound: Option<u64>,
}

impl Default for KGraphRpfOptions {
    fn default() -> Self {
        KGraphRpfOptions {
            tol: 1e-12,
            max_iter: 100_000,
            primitivity_bound: None,
        }
    }
}

/// Eigenvalues `λᵢ` and vertex masses `m` with `Aᵢ m = λᵢ m`, `Σ m = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KGraphMeasure {
    pub eigenvalues: Vec<f64>,
    pub vertex_masses: Vec<f64>,
    pub cocycle: CategoricalCocycle,
    pub primitivity_witness: NkVector,
    /// `‖Aᵢ m − λᵢ m‖∞ / max(1, λᵢ)`.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    /// Set when the graph is primitive and source-free, which makes a power of
    /// the shift positively expansive and exact on the path space.
    pub expansive_exact_certificate: bool,
}

impl KGraphMeasure {
    /// `μ(Z(λ)) = 𝛌^{−d(λ)} e^{−θh(λ)} m(s(λ))`.
    pub fn cylinder_mass(&self, path: &Path) -> f64 {
        let scale: f64 = self
            .eigenvalues
            .iter()
            .zip(path.degree().coords())
            .map(|(l, &d)| l.powi(-(d as i32)))
            .product();
        scale * (-self.cocycle.theta * self.cocycle.path_weight(path)).exp() * self.vertex_masses[path.source()]
    }
}

/// Solves for the common Perron data of the vertex matrices through the
/// product `A₁⋯A_k`.
pub fn kgraph_rpf_solve(
    graph: &KGraph,
    cocycle: &CategoricalCocycle,
    opts: &KGraphRpfOptions,
) -> Result<KGraphMeasure> {
    if !graph.is_source_free() {
        return Err(Error::InvalidGraph("graph has sources".into()));
    }
    let bound = opts.primitivity_bound.unwrap_or_else(|| graph.default_primitivity_bound());
    let witness = graph
        .primitivity_witness(bound)
        .ok_or_else(|| Error::NotPrimitive(format!("no witness of length ≤ {bound}")))?;
    let mats = vertex_matrices(graph, cocycle)?;
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            let ab = &mats[i] * &mats[j];
            let ba = &mats[j] * &mats[i];
            let scale = ab.amax().max(1.0);
            if (&ab - &ba).amax() > 1e-12 * scale {
                return Err(Error::NonCommuting { i, j });
            }
        }
    }
    let nv = graph.num_vertices();
    let product = mats.iter().fold(DMatrix::identity(nv, nv), |acc, m| acc * m);
    let pair = perron::power_iterate(&product, opts.tol, opts.max_iter, None, None)?;
    let total: f64 = pair.right.iter().sum();
    let m: Vec<f64> = pair.right.iter().map(|x| x / total).collect();
    let mv = nalgebra::DVector::from_column_slice(&m);
    let mut eigenvalues = Vec::with_capacity(mats.len());
    let mut residuals = Vec::with_capacity(mats.len());
    for a in &mats {
        let image = a * &mv;
        let lambda = image.sum();
        let r = (image - &mv * lambda).amax() / lambda.max(1.0);
        eigenvalues.push(lambda);
        residuals.push(r);
    }
    if let Some(r) = residuals.iter().find(|r| !(**r <= COMMON_VECTOR_TOL)) {
        return Err(Error::Verification(format!("vertex masses are not a common eigenvector (residual {r:e})")));
    }
    log::debug!("kgraph rpf: lambdas {eigenvalues:?}, masses {m:?}");
    Ok(KGraphMeasure {
        eigenvalues,
        vertex_masses: m,
        cocycle: cocycle.clone(),
        primitivity_witness: witness,
        residuals,
        iterations: pair.iterations,
        expansive_exact_certificate: true,
    })
}

/// Outcome of [`verify_rpf_identity`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RpfIdentityReport {
    pub paths_checked: usize,
    pub max_error: f64,
    /// Perron eigenvalue of the block shift, to compare with `∏ λᵢ`.
    pub block_eigenvalue: f64,
    pub eigenvalue_error: f64,
    pub pass: bool,
}

/// Compares `μ(Z(λ))` with `𝛌^{−d(λ)} e^{−θh(λ)} μ(Z(s(λ)))` on every sample path.
///
/// The left side is computed independently: infinite paths are read as
/// sequences of `(1,…,1)`-blocks, which form a subshift of finite type with
/// potential `−θh(block)`, and its Ruelle eigenmeasure is solved from
/// scratch and summed over block-aligned extensions of `λ`.
pub fn verify_rpf_identity(
    graph: &KGraph,
    measure: &KGraphMeasure,
    sample_paths: &[Path],
    tol: f64,
) -> Result<RpfIdentityReport> {
    let k = graph.rank();
    let ones = NkVector::ones(k);
    let blocks: Vec<Path> = (0..graph.num_vertices())
        .flat_map(|v| graph.paths_of_degree(v, &ones))
        .collect();
    if blocks.len() > u16::MAX as usize {
        return Err(Error::InvalidArgument("too many blocks".into()));
    }
    let matrix: Vec<Vec<u8>> = blocks
        .iter()
        .map(|a| blocks.iter().map(|b| (a.source() == b.range()) as u8).collect())
        .collect();
    let space = SymbolicSpace::sft(matrix)?;
    let potential = CylinderFunction::from_fn(&space, 1, |w| {
        -measure.cocycle.theta * measure.cocycle.path_weight(&blocks[w.parts()[0][0] as usize])
    });
    let triple = RuelleTriple::new(space.clone(), CatalogMap::Shift, potential)?;
    let t = sample_paths
        .iter()
        .flat_map(|p| p.degree().coords().iter().copied())
        .max()
        .unwrap_or(0)
        .max(1) as usize;
    let sol = rpf_solve(&triple, t, &RpfOptions::default())?;
    let index: std::collections::HashMap<&Path, u16> =
        blocks.iter().enumerate().map(|(i, b)| (b, i as u16)).collect();
    let top = ones.scale(t as u32);

    let mut max_error: f64 = 0.0;
    for path in sample_paths {
        let rest = top.checked_sub(path.degree()).expect("degree within the block depth");
        let mut lhs = 0.0;
        for ext in graph.paths_of_degree(path.source(), &rest) {
            let mut whole = graph.compose(path, &ext).expect("composable");
            let mut symbols = Vec::with_capacity(t);
            for s in (0..t).rev() {
                let (head, block) = graph.factorize(&whole, &ones.scale(s as u32), &ones)?;
                symbols.push(index[&block]);
                whole = head;
            }
            symbols.reverse();
            lhs += sol.measure.mass(&Word::single(symbols))?;
        }
        let rhs = measure.cylinder_mass(path);
        max_error = max_error.max((lhs - rhs).abs());
    }
    let product: f64 = measure.eigenvalues.iter().product();
    let eigenvalue_error = (sol.eigenvalue - product).abs() / product.max(1.0);
    Ok(RpfIdentityReport {
        paths_checked: sample_paths.len(),
        max_error,
        block_eigenvalue: sol.eigenvalue,
        eigenvalue_error,
        pass: max_error <= tol && eigenvalue_error <= tol,
    })
}
