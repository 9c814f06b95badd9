//! KMS condition on matrix units for gauge dynamics of 1- and 2-graphs.

mod common;

use common::{one_vertex_spec, two_vertex_spec};
use num_complex::Complex64;
use ruelle_kit::kgraph::{
    adjoint, convolve, gauge_action, kgraph_rpf_solve, kms_check, state, CategoricalCocycle, FiniteOperator,
    GaugeDynamics, KGraph, KGraphMeasure, KGraphRpfOptions, MatrixUnit,
};
use ruelle_kit::nkmod::NkVector;

fn solve(g: &KGraph, h: f64, theta: f64) -> KGraphMeasure {
    kgraph_rpf_solve(g, &CategoricalCocycle::constant(g, h, theta), &KGraphRpfOptions::default()).unwrap()
}

#[test]
fn cuntz_states_at_log_n() {
    for n in 2..=5 {
        let g = KGraph::try_from(&one_vertex_spec(n, 0)).unwrap();
        let m = solve(&g, 1.0, -1.0);
        let beta = (n as f64).ln();
        for d in [GaugeDynamics::unnormalized(&m.cocycle, 1), GaugeDynamics::normalized(&m, beta).unwrap()] {
            let r = kms_check(&g, &m, beta, &d, &NkVector::new(vec![2]), 1e-9).unwrap();
            assert!(r.pass, "N={n}: {r:?}");
            assert_eq!(r.pairs_evaluated + r.pairs_skipped, (r.matrix_units as u64).pow(2));
        }
        let off = kms_check(&g, &m, beta + 0.1, &GaugeDynamics::unnormalized(&m.cocycle, 1), &NkVector::new(vec![2]), 1e-9).unwrap();
        assert!(!off.pass);
    }
}

#[test]
fn tensor_product_normalized_dynamics_at_two_two() {
    let g = KGraph::try_from(&one_vertex_spec(2, 3)).unwrap();
    let m = solve(&g, 1.0, -1.0);
    let d = GaugeDynamics::normalized(&m, 1.0).unwrap();
    let r = kms_check(&g, &m, 1.0, &d, &NkVector::new(vec![2, 2]), 1e-9).unwrap();
    assert!(r.pass, "{r:?}");
    assert!(r.pairs_evaluated >= 1000);
    for beta in [2f64.ln(), 3f64.ln()] {
        let raw = kms_check(&g, &m, beta, &GaugeDynamics::unnormalized(&m.cocycle, 2), &NkVector::new(vec![1, 1]), 1e-9).unwrap();
        assert!(!raw.pass);
    }
}

#[test]
fn two_vertex_graph_normalized_dynamics() {
    let spec = two_vertex_spec();
    let g = KGraph::try_from(&spec).unwrap();
    let c = CategoricalCocycle::from_spec(&g, &spec).unwrap();
    let m = kgraph_rpf_solve(&g, &c, &KGraphRpfOptions::default()).unwrap();
    for beta in [0.5, 1.0, 3.0] {
        let d = GaugeDynamics::normalized(&m, beta).unwrap();
        let r = kms_check(&g, &m, beta, &d, &NkVector::new(vec![1, 2]), 1e-9).unwrap();
        assert!(r.pass, "β={beta}: {r:?}");
    }
}

/// Direct evaluation of `ω(fg)` and `ω(g α_{iβ}(f))` for sums of matrix units.
#[test]
fn kms_identity_for_linear_combinations() {
    let g = KGraph::try_from(&one_vertex_spec(2, 3)).unwrap();
    let m = solve(&g, 1.0, -1.0);
    let beta = 1.0;
    let d = GaugeDynamics::normalized(&m, beta).unwrap();
    let paths = g.paths_up_to(0, &NkVector::new(vec![1, 1]));
    let unit = |a: usize, b: usize| FiniteOperator::unit(MatrixUnit::new(paths[a].clone(), paths[b].clone()).unwrap());
    let f = unit(1, 0).scale(Complex64::new(0.5, 1.0)).plus(&unit(3, 2)).plus(&unit(4, 4));
    let h = adjoint(&f).plus(&unit(0, 5).scale(Complex64::new(0.0, -2.0)));
    let lhs = state(&m, &convolve(&g, &f, &h));
    let rotated = gauge_action(&f, &d, Complex64::new(0.0, beta));
    let rhs = state(&m, &convolve(&g, &h, &rotated));
    assert!((lhs - rhs).norm() < 1e-12, "{lhs} vs {rhs}");
    assert!(lhs.norm() > 1e-3);
    // ω(f* f) ≥ 0.
    let positive = state(&m, &convolve(&g, &adjoint(&f), &f));
    assert!(positive.re > 0.0 && positive.im.abs() < 1e-14);
}
