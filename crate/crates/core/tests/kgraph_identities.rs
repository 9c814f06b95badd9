//! Eigenmeasures on the path space of a two-vertex 2-graph.

mod common;

use common::two_vertex_spec;
use nalgebra::DMatrix;
use ruelle_kit::kgraph::{
    kgraph_rpf_solve, validate, verify_rpf_identity, CategoricalCocycle, KGraph, KGraphMeasure, KGraphRpfOptions,
};
use ruelle_kit::nkmod::NkVector;

fn solved() -> (KGraph, KGraphMeasure) {
    let spec = two_vertex_spec();
    let g = KGraph::try_from(&spec).unwrap();
    let c = CategoricalCocycle::from_spec(&g, &spec).unwrap();
    let m = kgraph_rpf_solve(&g, &c, &KGraphRpfOptions::default()).unwrap();
    (g, m)
}

/// `Aᵢ[x][y] = Σ e^{−θh(e)}` over color-`i` edges from `y` to `x`, typed in by hand.
fn hand_matrices() -> [DMatrix<f64>; 2] {
    let t = 0.7;
    let e = |h: f64| (-t * h).exp();
    [
        DMatrix::from_row_slice(2, 2, &[e(1.0), e(2.0), e(1.5), e(1.0)]),
        DMatrix::from_row_slice(2, 2, &[0.0, e(0.75), e(0.25), 0.0]),
    ]
}

#[test]
fn fixture_is_a_valid_primitive_two_graph() {
    let r = validate(&two_vertex_spec());
    assert!(r.valid, "{:?}", r.violations);
    assert_eq!(r.strongly_connected, Some(true));
    assert!(r.primitive_witness.is_some());
}

#[test]
fn eigenvalues_match_an_independent_spectral_radius() {
    let (_, m) = solved();
    for (i, a) in hand_matrices().iter().enumerate() {
        let rho = a.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!((m.eigenvalues[i] - rho).abs() < 1e-12, "color {i}: {} vs {rho}", m.eigenvalues[i]);
    }
    // The common eigenvector of the commuting pair, from the red matrix:
    // A₂ m = λ₂ m gives m_u / m_v = e^{−0.7·0.75} / λ₂.
    let ratio = (-0.7f64 * 0.75).exp() / m.eigenvalues[1];
    assert!((m.vertex_masses[0] / m.vertex_masses[1] - ratio).abs() < 1e-12);
}

#[test]
fn rpf_identity_holds_up_to_degree_two_two() {
    let (g, m) = solved();
    let bound = NkVector::new(vec![2, 2]);
    let paths: Vec<_> = (0..2).flat_map(|v| g.paths_up_to(v, &bound)).collect();
    let r = verify_rpf_identity(&g, &m, &paths, 1e-10).unwrap();
    assert!(r.pass, "{r:?}");
    assert_eq!(r.paths_checked, paths.len());
}

#[test]
fn cylinders_are_additive_and_positive() {
    let (g, m) = solved();
    let bound = NkVector::new(vec![2, 2]);
    for v in 0..2 {
        for p in g.paths_up_to(v, &bound) {
            let mass = m.cylinder_mass(&p);
            assert!(mass > 0.0, "{}", g.format_path(&p));
            for color in 0..2 {
                let children: f64 = g
                    .edges_into(p.source(), color)
                    .iter()
                    .map(|&e| m.cylinder_mass(&g.compose(&p, &g.path(&[e]).unwrap()).unwrap()))
                    .sum();
                assert!((children - mass).abs() < 1e-12, "{} color {color}", g.format_path(&p));
            }
        }
    }
    let total: f64 = (0..2).map(|v| m.cylinder_mass(&g.vertex_path(v))).sum();
    assert!((total - 1.0).abs() < 1e-14);
}

#[test]
fn path_counts_match_matrix_products() {
    let spec = two_vertex_spec();
    let g = KGraph::try_from(&spec).unwrap();
    let blue = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
    let red = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    for n in NkVector::all_le(&NkVector::new(vec![3, 3])) {
        let count = blue.pow(n.get(0)) * red.pow(n.get(1));
        for rng in 0..2 {
            let paths = g.paths_of_degree(rng, &n);
            for src in 0..2 {
                let found = paths.iter().filter(|p| p.source() == src).count();
                assert_eq!(found as f64, count[(rng, src)], "degree {n}");
            }
        }
    }
}

#[test]
fn minimal_common_extensions_close_squares() {
    let (g, _) = solved();
    let bound = NkVector::new(vec![1, 2]);
    let paths: Vec<_> = (0..2).flat_map(|v| g.paths_up_to(v, &bound)).collect();
    for a in &paths {
        for b in &paths {
            let top = a.degree().join(b.degree());
            let exts = g.minimal_common_extensions(a, b);
            for (x, y) in &exts {
                let left = g.compose(a, x).unwrap();
                assert_eq!(Some(&left), g.compose(b, y).as_ref());
                assert_eq!(left.degree(), &top);
            }
            // Every path of degree d(a) ∨ d(b) with prefixes a and b appears once.
            let expected = (0..2)
                .flat_map(|v| g.paths_of_degree(v, &top))
                .filter(|p| {
                    p.range() == a.range()
                        && g.factorize(p, a.degree(), &top.checked_sub(a.degree()).unwrap()).unwrap().0 == *a
                        && g.factorize(p, b.degree(), &top.checked_sub(b.degree()).unwrap()).unwrap().0 == *b
                })
                .count();
            assert_eq!(exts.len(), expected);
        }
    }
}
