use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::nkmod::NkVector;

/// Raw graph description as read from JSON. Colors are 0-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KGraphSpec {
    pub rank: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default)]
    pub squares: Vec<SquareSpec>,
    /// Edge weights of a categorical cocycle; unlisted edges weigh 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: String,
    pub color: usize,
    pub src: String,
    pub rng: String,
}

/// The identification `e f = f' e'` of two two-colored paths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareSpec {
    pub ef: [String; 2],
    pub fe: [String; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Reference,
    Color,
    SquareShape,
    NotInjective,
    MissingSquare,
    Cube,
    SourceFree,
    Cocycle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
    /// Edge or vertex ids involved.
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphValidationReport {
    pub valid: bool,
    pub rank: usize,
    pub vertices: usize,
    pub edges: usize,
    pub finite: bool,
    pub row_finite: bool,
    pub source_free: bool,
    pub strongly_connected: Option<bool>,
    pub primitive_witness: Option<NkVector>,
    pub violations: Vec<Violation>,
}

pub(crate) struct Checked {
    pub vertex_index: HashMap<String, usize>,
    pub edge_index: HashMap<String, usize>,
    pub colors: Vec<usize>,
    pub src: Vec<usize>,
    pub rng: Vec<usize>,
    /// Both directions of every square, keyed by the two edges in path order.
    pub swap: HashMap<(usize, usize), (usize, usize)>,
}

const H_TOL: f64 = 1e-12;

impl KGraphSpec {
    /// Structural checks on the raw data. Connectivity and primitivity are
    /// filled in by the caller once the structure is known to be sound.
    pub(crate) fn check(&self) -> (Vec<Violation>, Option<Checked>, bool) {
        let mut violations = Vec::new();
        if self.rank == 0 {
            add(&mut violations, ViolationKind::Color, "rank must be at least 1".into(), vec![]);
        }
        let mut vertex_index = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                add(&mut violations, ViolationKind::Reference, format!("duplicate vertex {v}"), vec![v.clone()]);
            }
        }
        let mut edge_index = HashMap::new();
        let (mut colors, mut src, mut rng) = (Vec::new(), Vec::new(), Vec::new());
        for (i, e) in self.edges.iter().enumerate() {
            if edge_index.insert(e.id.clone(), i).is_some() {
                add(&mut violations, ViolationKind::Reference, format!("duplicate edge {}", e.id), vec![e.id.clone()]);
            }
            if e.color >= self.rank {
                add(&mut violations, 
                    ViolationKind::Color,
                    format!("edge {} has color {} but the rank is {}", e.id, e.color, self.rank),
                    vec![e.id.clone()],
                );
            }
            for v in [&e.src, &e.rng] {
                if !vertex_index.contains_key(v) {
                    add(&mut violations, 
                        ViolationKind::Reference,
                        format!("edge {} mentions unknown vertex {v}", e.id),
                        vec![e.id.clone(), v.clone()],
                    );
                }
            }
            colors.push(e.color);
            src.push(vertex_index.get(&e.src).copied().unwrap_or(0));
            rng.push(vertex_index.get(&e.rng).copied().unwrap_or(0));
        }
        let mut weights = vec![0.0; self.edges.len()];
        if let Some(h) = &self.h {
            for (id, w) in h {
                match edge_index.get(id) {
                    Some(&e) => weights[e] = *w,
                    None => add(&mut violations, 
                        ViolationKind::Reference,
                        format!("h mentions unknown edge {id}"),
                        vec![id.clone()],
                    ),
                }
            }
        }
        if !violations.is_empty() {
            return (violations, None, false);
        }

        let name = |e: usize| self.edges[e].id.clone();
        let mut low_to_high: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        let mut high_to_low: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for sq in &self.squares {
            let ids = [&sq.ef[0], &sq.ef[1], &sq.fe[0], &sq.fe[1]];
            let missing: Vec<String> = ids.iter().filter(|i| !edge_index.contains_key(**i)).map(|i| (*i).clone()).collect();
            if !missing.is_empty() {
                add(&mut violations, ViolationKind::Reference, format!("square mentions unknown edges {missing:?}"), missing);
                continue;
            }
            let [e, f, f2, e2] = ids.map(|i| edge_index[i]);
            let witness = vec![name(e), name(f), name(f2), name(e2)];
            let shape_ok = colors[e] != colors[f]
                && colors[f2] == colors[f]
                && colors[e2] == colors[e]
                && src[e] == rng[f]
                && src[f2] == rng[e2]
                && rng[e] == rng[f2]
                && src[f] == src[e2];
            if !shape_ok {
                add(&mut violations, 
                    ViolationKind::SquareShape,
                    format!(
                        "square {}.{} = {}.{} does not match colors, composability or endpoints",
                        name(e),
                        name(f),
                        name(f2),
                        name(e2)
                    ),
                    witness,
                );
                continue;
            }
            let (low, high) = if colors[e] < colors[f] { ((e, f), (f2, e2)) } else { ((f2, e2), (e, f)) };
            if let Some(prev) = low_to_high.insert(low, high) {
                add(&mut violations, 
                    ViolationKind::NotInjective,
                    format!(
                        "path {}.{} is assigned both {}.{} and {}.{}",
                        name(low.0),
                        name(low.1),
                        name(prev.0),
                        name(prev.1),
                        name(high.0),
                        name(high.1)
                    ),
                    vec![name(low.0), name(low.1)],
                );
            }
            if let Some(prev) = high_to_low.insert(high, low) {
                add(&mut violations, 
                    ViolationKind::NotInjective,
                    format!(
                        "paths {}.{} and {}.{} collide on {}.{}",
                        name(prev.0),
                        name(prev.1),
                        name(low.0),
                        name(low.1),
                        name(high.0),
                        name(high.1)
                    ),
                    vec![name(prev.0), name(prev.1), name(low.0), name(low.1)],
                );
            }
        }
        // Every two-colored path must appear on the matching side of exactly one square.
        let n = self.edges.len();
        for a in 0..n {
            for b in 0..n {
                if colors[a] == colors[b] || src[a] != rng[b] {
                    continue;
                }
                let table = if colors[a] < colors[b] { &low_to_high } else { &high_to_low };
                if !table.contains_key(&(a, b)) {
                    add(&mut violations, 
                        ViolationKind::MissingSquare,
                        format!("no square contains the path {}.{}", name(a), name(b)),
                        vec![name(a), name(b)],
                    );
                }
            }
        }
        let mut swap = HashMap::new();
        for (&l, &h) in &low_to_high {
            swap.insert(l, h);
            swap.insert(h, l);
        }
        let structural_ok = violations.is_empty();

        if structural_ok && self.rank >= 3 {
            for (a, b, c) in cube_paths(&colors, &src, &rng) {
                let s = |p: &mut [usize; 3], t: usize| {
                    let (x, y) = swap[&(p[t], p[t + 1])];
                    p[t] = x;
                    p[t + 1] = y;
                };
                let mut left = [a, b, c];
                s(&mut left, 0);
                s(&mut left, 1);
                s(&mut left, 0);
                let mut right = [a, b, c];
                s(&mut right, 1);
                s(&mut right, 0);
                s(&mut right, 1);
                if left != right {
                    add(&mut violations, 
                        ViolationKind::Cube,
                        format!(
                            "path {}.{}.{} rewrites to {}.{}.{} and {}.{}.{}",
                            name(a),
                            name(b),
                            name(c),
                            name(left[0]),
                            name(left[1]),
                            name(left[2]),
                            name(right[0]),
                            name(right[1]),
                            name(right[2])
                        ),
                        vec![name(a), name(b), name(c)],
                    );
                }
            }
        }

        let mut source_free = true;
        for (v, vname) in self.vertices.iter().enumerate() {
            for c in 0..self.rank {
                if !(0..n).any(|e| rng[e] == v && colors[e] == c) {
                    source_free = false;
                    add(&mut violations, 
                        ViolationKind::SourceFree,
                        format!("no edge of color {c} has range {vname}"),
                        vec![vname.clone()],
                    );
                }
            }
        }

        if structural_ok {
            for (&(x, y), &(u, w)) in &low_to_high {
                let lhs = weights[x] + weights[y];
                let rhs = weights[u] + weights[w];
                if (lhs - rhs).abs() > H_TOL * lhs.abs().max(rhs.abs()).max(1.0) {
                    add(&mut violations, 
                        ViolationKind::Cocycle,
                        format!(
                            "h({}) + h({}) = {lhs} but h({}) + h({}) = {rhs}",
                            name(x),
                            name(y),
                            name(u),
                            name(w)
                        ),
                        vec![name(x), name(y), name(u), name(w)],
                    );
                }
            }
        }
        violations.sort_by(|a, b| (a.kind, &a.message).cmp(&(b.kind, &b.message)));
        let checked = structural_ok.then_some(Checked {
            vertex_index,
            edge_index,
            colors,
            src,
            rng,
            swap,
        });
        (violations, checked, source_free)
    }
}

fn add(violations: &mut Vec<Violation>, kind: ViolationKind, message: String, witness: Vec<String>) {
    violations.push(Violation { kind, message, witness });
}

/// Composable edge triples with strictly increasing colors.
fn cube_paths(colors: &[usize], src: &[usize], rng: &[usize]) -> Vec<(usize, usize, usize)> {
    let n = colors.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if colors[b] <= colors[a] || src[a] != rng[b] {
                continue;
            }
            for c in 0..n {
                if colors[c] > colors[b] && src[b] == rng[c] {
                    out.push((a, b, c));
                }
            }
        }
    }
    out
}
