#![allow(dead_code)]

use proptest::prelude::*;
use ruelle_kit::symspace::{CylinderFunction, SymbolicSpace, Word};
use ruelle_kit::Rational;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Small rationals `n/d` with `|n| ≤ 6`, `1 ≤ d ≤ 4`.
pub fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

pub fn full(n: usize) -> SymbolicSpace {
    SymbolicSpace::full_shift(n).unwrap()
}

pub fn golden() -> SymbolicSpace {
    SymbolicSpace::sft(vec![vec![1, 1], vec![1, 0]]).unwrap()
}

/// Assigns `values[i % len]` to the `i`-th admissible word of `depth`.
pub fn tabulate<V: Clone + ruelle_kit::Scalar>(space: &SymbolicSpace, depth: usize, values: &[V]) -> CylinderFunction<V> {
    let mut i = 0;
    CylinderFunction::from_fn(space, depth, |_| {
        let v = values[i % values.len()].clone();
        i += 1;
        v
    })
}

pub fn w(s: &[u16]) -> Word {
    Word::single(s.to_vec())
}

use ruelle_kit::kgraph::{EdgeSpec, KGraphSpec, SquareSpec};

/// Blue edges `b_xy` for every pair of vertices and red edges `r_uv`, `r_vu`,
/// with `b_xy` running from `y` to `x`.
pub fn two_vertex_spec() -> KGraphSpec {
    let vs = ["u", "v"];
    let other = |x: &str| if x == "u" { "v" } else { "u" };
    let mut edges = Vec::new();
    for x in vs {
        for y in vs {
            edges.push(EdgeSpec { id: format!("b_{x}{y}"), color: 0, src: y.into(), rng: x.into() });
        }
    }
    for x in vs {
        edges.push(EdgeSpec { id: format!("r_{x}{}", other(x)), color: 1, src: other(x).into(), rng: x.into() });
    }
    let mut squares = Vec::new();
    for x in vs {
        for y in vs {
            let (xb, yb) = (other(x), other(y));
            squares.push(SquareSpec {
                ef: [format!("b_{x}{yb}"), format!("r_{yb}{y}")],
                fe: [format!("r_{x}{xb}"), format!("b_{xb}{y}")],
            });
        }
    }
    let h = [("b_uu", 1.0), ("b_uv", 2.0), ("b_vu", 1.5), ("b_vv", 1.0), ("r_uv", 0.75), ("r_vu", 0.25)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    KGraphSpec { rank: 2, vertices: vec!["u".into(), "v".into()], edges, squares, h: Some(h), theta: Some(0.7) }
}

/// One vertex with `n₁` blue and `n₂` red loops and every square `bᵢrⱼ = rⱼbᵢ`.
pub fn one_vertex_spec(n1: usize, n2: usize) -> KGraphSpec {
    let mut edges = Vec::new();
    for i in 0..n1 {
        edges.push(EdgeSpec { id: format!("b{i}"), color: 0, src: "v".into(), rng: "v".into() });
    }
    for j in 0..n2 {
        edges.push(EdgeSpec { id: format!("r{j}"), color: 1, src: "v".into(), rng: "v".into() });
    }
    let squares = (0..n1)
        .flat_map(|i| (0..n2).map(move |j| SquareSpec { ef: [format!("b{i}"), format!("r{j}")], fe: [format!("r{j}"), format!("b{i}")] }))
        .collect();
    KGraphSpec { rank: if n2 == 0 { 1 } else { 2 }, vertices: vec!["v".into()], edges, squares, h: None, theta: None }
}
