//! Power iteration for primitive nonnegative matrices.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub(crate) struct PerronPair {
    pub lambda: f64,
    /// Right eigenvector, max entry 1.
    pub right: Vec<f64>,
    /// Left eigenvector, entries summing to 1.
    pub left: Vec<f64>,
    pub residual_right: f64,
    pub residual_left: f64,
    pub iterations: usize,
}

struct BoolMatrix {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl BoolMatrix {
    fn pattern(m: &DMatrix<f64>) -> BoolMatrix {
        let n = m.nrows();
        let words = n.div_ceil(64);
        let mut rows = vec![0u64; n * words];
        for i in 0..n {
            for j in 0..n {
                if m[(i, j)] > 0.0 {
                    rows[i * words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        BoolMatrix { n, words, rows }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn mul(&self, other: &BoolMatrix) -> BoolMatrix {
        let mut rows = vec![0u64; self.rows.len()];
        for i in 0..self.n {
            for k in 0..self.n {
                if self.get(i, k) {
                    for w in 0..self.words {
                        rows[i * self.words + w] |= other.rows[k * self.words + w];
                    }
                }
            }
        }
        BoolMatrix {
            n: self.n,
            words: self.words,
            rows,
        }
    }

    fn all_set(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j)))
    }
}

fn reachable(m: &DMatrix<f64>, start: usize, transpose: bool) -> Vec<Option<usize>> {
    let n = m.nrows();
    let mut level = vec![None; n];
    level[start] = Some(0);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        let lu = level[u].expect("visited");
        for v in 0..n {
            let w = if transpose { m[(v, u)] } else { m[(u, v)] };
            if w > 0.0 && level[v].is_none() {
                level[v] = Some(lu + 1);
                queue.push_back(v);
            }
        }
    }
    level
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Least `m` with `M^m > 0`, or a diagnostic explaining why none exists.
pub(crate) fn primitivity_exponent(m: &DMatrix<f64>) -> std::result::Result<usize, String> {
    let n = m.nrows();
    if n == 0 {
        return Err("empty matrix".into());
    }
    let fwd = reachable(m, 0, false);
    if let Some(v) = fwd.iter().position(Option::is_none) {
        return Err(format!("reducible: index {v} is not reachable from index 0"));
    }
    if let Some(v) = reachable(m, 0, true).iter().position(Option::is_none) {
        return Err(format!("reducible: index 0 is not reachable from index {v}"));
    }
    let mut period = 0;
    for u in 0..n {
        for v in 0..n {
            if m[(u, v)] > 0.0 {
                let lu = fwd[u].expect("irreducible");
                let lv = fwd[v].expect("irreducible");
                period = gcd(period, (lu + 1).abs_diff(lv));
            }
        }
    }
    if period != 1 {
        return Err(format!("irreducible with period {period}"));
    }
    let base = BoolMatrix::pattern(m);
    let mut power = BoolMatrix::pattern(m);
    let wielandt = (n - 1) * (n - 1) + 1;
    for k in 1..=wielandt {
        if power.all_set() {
            return Ok(k);
        }
        power = power.mul(&base);
    }
    Err("no positive power within the Wielandt bound".into())
}

fn normalized_start(start: Option<&[f64]>, n: usize, sup: bool) -> Result<DVector<f64>> {
    let v = match start {
        Some(s) => {
            if s.len() != n || s.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::InvalidArgument(
                    "start vector must be strictly positive with one entry per word".into(),
                ));
            }
            DVector::from_column_slice(s)
        }
        None => DVector::from_element(n, 1.0),
    };
    Ok(if sup { &v / v.max() } else { &v / v.sum() })
}

/// Power iteration on `M` (right vector) and `Mᵀ` (left vector). The
/// eigenvalue is the mass of `Mᵀμ` for the current probability vector `μ`;
/// residuals are scaled by `max(1, λ)`.
pub(crate) fn power_iterate(
    m: &DMatrix<f64>,
    tol: f64,
    max_iter: usize,
    start_right: Option<&[f64]>,
    start_left: Option<&[f64]>,
) -> Result<PerronPair> {
    let n = m.nrows();
    let mt = m.transpose();
    let mut h = normalized_start(start_right, n, true)?;
    let mut mu = normalized_start(start_left, n, false)?;
    let mut last = (f64::INFINITY, f64::INFINITY);
    for it in 1..=max_iter {
        let lmu = &mt * &mu;
        let lambda = lmu.sum();
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::NotPrimitive(format!("eigenvalue estimate {lambda}")));
        }
        let lh = m * &h;
        let scale = lambda.max(1.0);
        let res_left = (&lmu - &mu * lambda).abs().sum() / scale;
        let res_right = (&lh - &h * lambda).abs().max() / scale;
        last = (res_right, res_left);
        if res_left <= tol && res_right <= tol {
            return Ok(PerronPair {
                lambda,
                right: h.iter().copied().collect(),
                left: mu.iter().copied().collect(),
                residual_right: res_right,
                residual_left: res_left,
                iterations: it,
            });
        }
        mu = &lmu / lambda;
        h = &lh / lh.max();
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: last.0.max(last.1),
    })
}
