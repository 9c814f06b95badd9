use crate::error::{Error, Result};

use super::word::Word;

/// One-sided shift factor over the alphabet `0..size`, constrained by a
/// zero-one transition matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    size: usize,
    allowed: Vec<bool>,
    full: bool,
}

impl Factor {
    fn full(size: usize) -> Factor {
        Factor {
            size,
            allowed: vec![true; size * size],
            full: true,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_full(&self) -> bool {
        self.full
    }

    pub fn allows(&self, a: u16, b: u16) -> bool {
        self.allowed[a as usize * self.size + b as usize]
    }

    pub fn matrix(&self) -> Vec<Vec<u8>> {
        (0..self.size)
            .map(|a| {
                (0..self.size)
                    .map(|b| self.allows(a as u16, b as u16) as u8)
                    .collect()
            })
            .collect()
    }

    pub fn is_admissible(&self, symbols: &[u16]) -> bool {
        symbols.iter().all(|&s| (s as usize) < self.size)
            && symbols.windows(2).all(|p| self.allows(p[0], p[1]))
    }

    /// Admissible words of length `m`, lexicographic.
    pub fn words(&self, m: usize) -> Vec<Vec<u16>> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(m);
        self.extend_into(&mut cur, m, &mut out);
        out
    }

    /// Admissible words of length `prefix.len() + by` starting with `prefix`.
    pub fn extensions(&self, prefix: &[u16], by: usize) -> Vec<Vec<u16>> {
        let mut out = Vec::new();
        let mut cur = prefix.to_vec();
        self.extend_into(&mut cur, prefix.len() + by, &mut out);
        out
    }

    fn extend_into(&self, cur: &mut Vec<u16>, target: usize, out: &mut Vec<Vec<u16>>) {
        if cur.len() == target {
            out.push(cur.clone());
            return;
        }
        for s in 0..self.size as u16 {
            if cur.last().is_none_or(|&l| self.allows(l, s)) {
                cur.push(s);
                self.extend_into(cur, target, out);
                cur.pop();
            }
        }
    }

    /// Least `m ≤ bound` with `A^m` entrywise positive.
    pub fn primitivity_exponent(&self, bound: usize) -> Option<usize> {
        let n = self.size;
        let mut power = self.allowed.clone();
        for m in 1..=bound {
            if power.iter().all(|&b| b) {
                return Some(m);
            }
            let mut next = vec![false; n * n];
            for i in 0..n {
                for k in 0..n {
                    if power[i * n + k] {
                        for j in 0..n {
                            next[i * n + j] |= self.allowed[k * n + j];
                        }
                    }
                }
            }
            power = next;
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    FullShift(usize),
    Sft(Vec<Vec<u8>>),
    Product(Vec<SymbolicSpace>),
}

/// A full shift, a subshift of finite type, or a finite product of these.
///
/// Nested products are flattened: the space always exposes a flat list of
/// [`Factor`]s and words carry one part per factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicSpace {
    kind: SpaceKind,
    factors: Vec<Factor>,
}

impl SymbolicSpace {
    pub fn full_shift(n: usize) -> Result<SymbolicSpace> {
        if n == 0 || n > u16::MAX as usize {
            return Err(Error::InvalidSpace(format!("alphabet size {n} out of range")));
        }
        Ok(SymbolicSpace {
            kind: SpaceKind::FullShift(n),
            factors: vec![Factor::full(n)],
        })
    }

    pub fn sft(matrix: Vec<Vec<u8>>) -> Result<SymbolicSpace> {
        let n = matrix.len();
        if n == 0 || n > u16::MAX as usize {
            return Err(Error::InvalidSpace("empty transition matrix".into()));
        }
        if matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidSpace("transition matrix is not square".into()));
        }
        if matrix.iter().flatten().any(|&v| v > 1) {
            return Err(Error::InvalidSpace("transition matrix is not zero-one".into()));
        }
        if let Some(i) = matrix.iter().position(|r| r.iter().all(|&v| v == 0)) {
            return Err(Error::InvalidSpace(format!("row {i} is zero")));
        }
        if let Some(j) = (0..n).find(|&j| matrix.iter().all(|r| r[j] == 0)) {
            return Err(Error::InvalidSpace(format!("column {j} is zero")));
        }
        let allowed: Vec<bool> = matrix.iter().flatten().map(|&v| v == 1).collect();
        let full = allowed.iter().all(|&b| b);
        Ok(SymbolicSpace {
            kind: SpaceKind::Sft(matrix),
            factors: vec![Factor {
                size: n,
                allowed,
                full,
            }],
        })
    }

    pub fn product(components: Vec<SymbolicSpace>) -> Result<SymbolicSpace> {
        if components.is_empty() {
            return Err(Error::InvalidSpace("empty product".into()));
        }
        let mut flat = Vec::new();
        for c in components {
            match c.kind {
                SpaceKind::Product(inner) => flat.extend(inner),
                _ => flat.push(c),
            }
        }
        let factors = flat.iter().flat_map(|c| c.factors.clone()).collect();
        Ok(SymbolicSpace {
            kind: SpaceKind::Product(flat),
            factors,
        })
    }

    /// The single-factor space of factor `j`.
    pub fn factor_space(&self, j: usize) -> Option<SymbolicSpace> {
        let f = self.factors.get(j)?;
        Some(if f.full {
            SymbolicSpace {
                kind: SpaceKind::FullShift(f.size),
                factors: vec![f.clone()],
            }
        } else {
            SymbolicSpace {
                kind: SpaceKind::Sft(f.matrix()),
                factors: vec![f.clone()],
            }
        })
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    /// Whether word `w` has the right shape and every part is admissible.
    pub fn is_admissible(&self, w: &Word) -> bool {
        w.num_factors() == self.factors.len()
            && self
                .factors
                .iter()
                .zip(w.parts())
                .all(|(f, p)| f.is_admissible(p))
    }

    /// All admissible words of uniform depth `m`, lexicographic.
    pub fn admissible_words(&self, m: usize) -> Vec<Word> {
        let per_factor: Vec<Vec<Vec<u16>>> = self.factors.iter().map(|f| f.words(m)).collect();
        cartesian(&per_factor)
    }

    pub fn word_count(&self, m: usize) -> usize {
        self.factors.iter().map(|f| f.words(m).len()).product()
    }

    /// Admissible words extending `w` by `by` symbols in every factor.
    pub fn extensions(&self, w: &Word, by: usize) -> Vec<Word> {
        let per_factor: Vec<Vec<Vec<u16>>> = self
            .factors
            .iter()
            .zip(w.parts())
            .map(|(f, p)| f.extensions(p, by))
            .collect();
        cartesian(&per_factor)
    }

    pub fn format_word(&self, w: &Word) -> String {
        self.factors
            .iter()
            .zip(w.parts())
            .map(|(f, p)| {
                if f.size <= 10 {
                    p.iter().map(|s| char::from(b'0' + *s as u8)).collect()
                } else {
                    p.iter()
                        .map(|s| s.to_string())
                        .collect::<Vec<_>>()
                        .join(".")
                }
            })
            .collect::<Vec<String>>()
            .join("|")
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let pieces: Vec<&str> = s.split('|').collect();
        if pieces.len() != self.factors.len() {
            return Err(Error::Schema(format!(
                "word {s:?} has {} parts, space has {} factors",
                pieces.len(),
                self.factors.len()
            )));
        }
        let mut parts = Vec::with_capacity(pieces.len());
        for (f, piece) in self.factors.iter().zip(pieces) {
            let symbols: Option<Vec<u16>> = if piece.is_empty() {
                Some(Vec::new())
            } else if f.size <= 10 {
                piece
                    .chars()
                    .map(|c| c.to_digit(10).map(|d| d as u16))
                    .collect()
            } else {
                piece.split('.').map(|t| t.parse().ok()).collect()
            };
            let symbols = symbols.ok_or_else(|| Error::Schema(format!("bad word {s:?}")))?;
            parts.push(symbols);
        }
        let w = Word::new(parts);
        if !self.is_admissible(&w) {
            return Err(Error::InadmissibleWord(s.to_string()));
        }
        Ok(w)
    }
}

pub(crate) fn cartesian(per_factor: &[Vec<Vec<u16>>]) -> Vec<Word> {
    let mut out: Vec<Vec<Vec<u16>>> = vec![Vec::new()];
    for choices in per_factor {
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for prefix in &out {
            for c in choices {
                let mut p = prefix.clone();
                p.push(c.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter().map(Word::new).collect()
}

/// Least `m ≤ power_bound` such that every factor's transition matrix has
/// an entrywise positive `m`-th power.
pub fn exactness_certificate(space: &SymbolicSpace, power_bound: usize) -> Option<usize> {
    space
        .factors()
        .iter()
        .map(|f| f.primitivity_exponent(power_bound))
        .try_fold(0, |acc, m| m.map(|m| acc.max(m)))
}

/// `β^N` where `N` is the first index at which the prefixes differ, or `0.0`
/// when they agree on their whole length.
pub fn word_metric(x: &Word, y: &Word, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidArgument(format!("beta {beta} not in (0, 1)")));
    }
    if x.num_factors() != y.num_factors() || x.depth() != y.depth() {
        return Err(Error::InvalidArgument("prefixes of unequal depth".into()));
    }
    Ok(match x.first_disagreement(y) {
        Some(n) => beta.powi(n as i32),
        None => 0.0,
    })
}
