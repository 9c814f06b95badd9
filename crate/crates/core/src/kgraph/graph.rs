use std::collections::HashMap;
use std::fmt;

use super::spec::{GraphValidationReport, KGraphSpec};
use crate::error::{Error, Result};
use crate::nkmod::NkVector;

/// A finite row-finite `k`-graph given by colored edges and square tables.
#[derive(Clone, Debug)]
pub struct KGraph {
    rank: usize,
    vertices: Vec<String>,
    edge_ids: Vec<String>,
    colors: Vec<usize>,
    src: Vec<usize>,
    rng: Vec<usize>,
    swap: HashMap<(usize, usize), (usize, usize)>,
    /// `into[v][i]`: edges of color `i` with range `v`, i.e. `vΛ^{eᵢ}`.
    into: Vec<Vec<Vec<usize>>>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
}

/// A path in color normal form: edges listed from the range end, colors
/// non-decreasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    range: usize,
    source: usize,
    degree: NkVector,
    edges: Vec<usize>,
}

impl Path {
    pub fn range(&self) -> usize {
        self.range
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn degree(&self) -> &NkVector {
        &self.degree
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn is_vertex(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Validates a graph description. Never fails; problems go in the report.
pub fn validate(spec: &KGraphSpec) -> GraphValidationReport {
    let (violations, checked, source_free) = spec.check();
    let mut report = GraphValidationReport {
        valid: violations.is_empty(),
        rank: spec.rank,
        vertices: spec.vertices.len(),
        edges: spec.edges.len(),
        finite: true,
        row_finite: true,
        source_free,
        strongly_connected: None,
        primitive_witness: None,
        violations,
    };
    if let Some(checked) = checked {
        let g = KGraph::build(spec, checked);
        report.strongly_connected = Some(g.is_strongly_connected());
        report.primitive_witness = g.primitivity_witness(g.default_primitivity_bound());
    }
    report
}

impl TryFrom<&KGraphSpec> for KGraph {
    type Error = Error;

    fn try_from(spec: &KGraphSpec) -> Result<KGraph> {
        let (violations, checked, _) = spec.check();
        let structural = violations
            .iter()
            .find(|v| !matches!(v.kind, super::ViolationKind::SourceFree | super::ViolationKind::Cocycle));
        match (structural, checked) {
            (None, Some(c)) => Ok(KGraph::build(spec, c)),
            (Some(v), _) => Err(Error::InvalidGraph(v.message.clone())),
            (None, None) => Err(Error::InvalidGraph("graph data is inconsistent".into())),
        }
    }
}

impl KGraph {
    fn build(spec: &KGraphSpec, c: super::spec::Checked) -> KGraph {
        let nv = spec.vertices.len();
        let mut into = vec![vec![Vec::new(); spec.rank]; nv];
        for e in 0..c.colors.len() {
            into[c.rng[e]][c.colors[e]].push(e);
        }
        KGraph {
            rank: spec.rank,
            vertices: spec.vertices.clone(),
            edge_ids: spec.edges.iter().map(|e| e.id.clone()).collect(),
            colors: c.colors,
            src: c.src,
            rng: c.rng,
            swap: c.swap,
            into,
            vertex_index: c.vertex_index,
            edge_index: c.edge_index,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.colors.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn edge_name(&self, e: usize) -> &str {
        &self.edge_ids[e]
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.vertex_index.get(name).copied()
    }

    pub fn edge(&self, name: &str) -> Option<usize> {
        self.edge_index.get(name).copied()
    }

    pub fn color(&self, e: usize) -> usize {
        self.colors[e]
    }

    pub fn src(&self, e: usize) -> usize {
        self.src[e]
    }

    pub fn rng(&self, e: usize) -> usize {
        self.rng[e]
    }

    /// `vΛ^{eᵢ}`.
    pub fn edges_into(&self, v: usize, color: usize) -> &[usize] {
        &self.into[v][color]
    }

    pub fn is_source_free(&self) -> bool {
        self.into.iter().all(|per| per.iter().all(|es| !es.is_empty()))
    }

    pub fn vertex_path(&self, v: usize) -> Path {
        Path {
            range: v,
            source: v,
            degree: NkVector::zero(self.rank),
            edges: Vec::new(),
        }
    }

    /// The path with the given edges, listed from the range end in any
    /// composable order.
    pub fn path(&self, edges: &[usize]) -> Result<Path> {
        let (first, last) = match (edges.first(), edges.last()) {
            (Some(&f), Some(&l)) => (f, l),
            _ => return Err(Error::InvalidArgument("use vertex_path for degree-0 paths".into())),
        };
        if edges.iter().any(|&e| e >= self.num_edges()) {
            return Err(Error::InvalidArgument("unknown edge".into()));
        }
        if edges.windows(2).any(|w| self.src[w[0]] != self.rng[w[1]]) {
            return Err(Error::InvalidArgument("edges are not composable".into()));
        }
        let mut degree = vec![0u32; self.rank];
        for &e in edges {
            degree[self.colors[e]] += 1;
        }
        let mut edges = edges.to_vec();
        self.sort_colors(&mut edges);
        Ok(Path {
            range: self.rng[first],
            source: self.src[last],
            degree: NkVector::new(degree),
            edges,
        })
    }

    pub fn path_by_names(&self, names: &[&str]) -> Result<Path> {
        let edges = names
            .iter()
            .map(|n| self.edge(n).ok_or_else(|| Error::InvalidArgument(format!("unknown edge {n}"))))
            .collect::<Result<Vec<_>>>()?;
        self.path(&edges)
    }

    fn swap_at(&self, edges: &mut [usize], t: usize) {
        let (x, y) = self.swap[&(edges[t], edges[t + 1])];
        edges[t] = x;
        edges[t + 1] = y;
    }

    fn sort_colors(&self, edges: &mut [usize]) {
        let target = {
            let mut c: Vec<usize> = edges.iter().map(|&e| self.colors[e]).collect();
            c.sort_unstable();
            c
        };
        self.rewrite_to(edges, &target);
    }

    /// Rewrites a composable edge string to one with the given color sequence.
    fn rewrite_to(&self, edges: &mut [usize], target: &[usize]) {
        for (p, &color) in target.iter().enumerate() {
            let q = (p..edges.len())
                .find(|&q| self.colors[edges[q]] == color)
                .expect("same color multiset");
            for t in (p..q).rev() {
                self.swap_at(edges, t);
            }
        }
    }

    /// `λμ`, if `s(λ) = r(μ)`.
    pub fn compose(&self, a: &Path, b: &Path) -> Option<Path> {
        if a.source != b.range {
            return None;
        }
        let mut edges = a.edges.clone();
        edges.extend_from_slice(&b.edges);
        self.sort_colors(&mut edges);
        Some(Path {
            range: a.range,
            source: b.source,
            degree: &a.degree + &b.degree,
            edges,
        })
    }

    /// The unique `(μ, ν)` with `path = μν`, `d(μ) = m`, `d(ν) = n`.
    pub fn factorize(&self, path: &Path, m: &NkVector, n: &NkVector) -> Result<(Path, Path)> {
        if m.rank() != self.rank || n.rank() != self.rank || &(m + n) != path.degree() {
            return Err(Error::InvalidArgument(format!(
                "degrees {m} + {n} do not add up to {}",
                path.degree
            )));
        }
        let mut target = color_sequence(m);
        target.extend(color_sequence(n));
        let mut edges = path.edges.clone();
        self.rewrite_to(&mut edges, &target);
        let split = m.len() as usize;
        let head = &edges[..split];
        let tail = &edges[split..];
        let mid = head.last().map(|&e| self.src[e]).unwrap_or(path.range);
        let make = |es: &[usize], r: usize, s: usize, d: &NkVector| {
            let mut es = es.to_vec();
            self.sort_colors(&mut es);
            Path {
                range: r,
                source: s,
                degree: d.clone(),
                edges: es,
            }
        };
        Ok((make(head, path.range, mid, m), make(tail, mid, path.source, n)))
    }

    /// `vΛⁿ` in normal form, lexicographic in edge indices.
    pub fn paths_of_degree(&self, v: usize, n: &NkVector) -> Vec<Path> {
        let colors = color_sequence(n);
        let mut out = Vec::new();
        let mut stack = Vec::new();
        self.extend_paths(v, &colors, &mut stack, &mut out, n);
        out
    }

    fn extend_paths(&self, at: usize, colors: &[usize], stack: &mut Vec<usize>, out: &mut Vec<Path>, n: &NkVector) {
        let t = stack.len();
        if t == colors.len() {
            let range = stack.first().map(|&e| self.rng[e]).unwrap_or(at);
            out.push(Path {
                range,
                source: at,
                degree: n.clone(),
                edges: stack.clone(),
            });
            return;
        }
        for &e in &self.into[at][colors[t]] {
            stack.push(e);
            self.extend_paths(self.src[e], colors, stack, out, n);
            stack.pop();
        }
    }

    /// Every path from `v` with degree at most `bound`, grouped by degree.
    pub fn paths_up_to(&self, v: usize, bound: &NkVector) -> Vec<Path> {
        NkVector::all_le(bound)
            .iter()
            .flat_map(|n| self.paths_of_degree(v, n))
            .collect()
    }

    /// All pairs `(α, β)` with `μα = ρβ` and `d(μα) = d(μ) ∨ d(ρ)`.
    pub fn minimal_common_extensions(&self, mu: &Path, rho: &Path) -> Vec<(Path, Path)> {
        if mu.range != rho.range {
            return Vec::new();
        }
        let top = mu.degree.join(&rho.degree);
        let da = top.checked_sub(&mu.degree).expect("join dominates");
        let db = top.checked_sub(&rho.degree).expect("join dominates");
        let mut out = Vec::new();
        for alpha in self.paths_of_degree(mu.source, &da) {
            let whole = self.compose(mu, &alpha).expect("composable");
            let (head, beta) = self.factorize(&whole, &rho.degree, &db).expect("degrees add up");
            if &head == rho {
                out.push((alpha, beta));
            }
        }
        out
    }

    /// `n`-degree counting pattern: `[v][w]` is set when `vΛⁿw ≠ ∅`.
    fn reach_pattern(&self, color: usize) -> Vec<Vec<bool>> {
        let nv = self.num_vertices();
        let mut m = vec![vec![false; nv]; nv];
        for e in 0..self.num_edges() {
            if self.colors[e] == color {
                m[self.rng[e]][self.src[e]] = true;
            }
        }
        m
    }

    pub fn is_strongly_connected(&self) -> bool {
        let nv = self.num_vertices();
        let mut adj = vec![vec![false; nv]; nv];
        for e in 0..self.num_edges() {
            adj[self.rng[e]][self.src[e]] = true;
        }
        (0..nv).all(|start| {
            let mut seen = vec![false; nv];
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for w in 0..nv {
                    if adj[u][w] && !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        })
    }

    /// Default search bound for [`KGraph::primitivity_witness`]: Wielandt's
    /// bound in every coordinate.
    pub fn default_primitivity_bound(&self) -> u64 {
        let n = self.num_vertices() as u64;
        self.rank as u64 * ((n.saturating_sub(1)).pow(2) + 1)
    }

    /// Some nonzero `n` with `|n| ≤ bound` and `vΛⁿw ≠ ∅` for all `v, w`.
    /// Multiples of `(1,…,1)` are tried first.
    pub fn primitivity_witness(&self, bound: u64) -> Option<NkVector> {
        let k = self.rank;
        let nv = self.num_vertices();
        let base: Vec<Vec<Vec<bool>>> = (0..k).map(|c| self.reach_pattern(c)).collect();
        let max_power = bound as usize;
        let mut powers: Vec<Vec<Vec<Vec<bool>>>> = Vec::with_capacity(k);
        for b in &base {
            let mut p = vec![identity(nv)];
            for t in 1..=max_power {
                p.push(bool_mul(&p[t - 1], b));
            }
            powers.push(p);
        }
        let positive = |n: &NkVector| {
            let mut m = identity(nv);
            for (c, &t) in n.coords().iter().enumerate() {
                m = bool_mul(&m, &powers[c][t as usize]);
            }
            m.iter().all(|row| row.iter().all(|&x| x))
        };
        let mut diagonal = Vec::new();
        let mut t = 1;
        while (t * k) as u64 <= bound {
            diagonal.push(NkVector::new(vec![t as u32; k]));
            t += 1;
        }
        let mut others = NkVector::all_with_len_at_most(k, bound);
        others.retain(|n| !n.is_zero() && !diagonal.contains(n));
        others.sort_by_key(|n| (n.len(), n.clone()));
        diagonal.into_iter().chain(others).find(|n| positive(n))
    }

    pub fn is_primitive(&self, bound: u64) -> bool {
        self.primitivity_witness(bound).is_some()
    }

    /// Whether every vertex receives exactly one edge of each color, so that
    /// each vertex carries a single infinite path.
    pub fn is_degenerate(&self) -> bool {
        self.into.iter().all(|per| per.iter().all(|es| es.len() == 1))
    }

    pub fn format_path(&self, p: &Path) -> String {
        PathDisplay { graph: self, path: p }.to_string()
    }
}

struct PathDisplay<'a> {
    graph: &'a KGraph,
    path: &'a Path,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_vertex() {
            return write!(f, "{}", self.graph.vertex_name(self.path.range));
        }
        let names: Vec<&str> = self.path.edges.iter().map(|&e| self.graph.edge_name(e)).collect();
        write!(f, "{}", names.join("."))
    }
}

fn color_sequence(n: &NkVector) -> Vec<usize> {
    n.coords()
        .iter()
        .enumerate()
        .flat_map(|(c, &t)| std::iter::repeat_n(c, t as usize))
        .collect()
}

fn identity(n: usize) -> Vec<Vec<bool>> {
    (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect()
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).any(|t| a[i][t] && b[t][j])).collect())
        .collect()
}
