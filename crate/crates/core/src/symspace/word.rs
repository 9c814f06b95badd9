/// A finite label for a cylinder set: one symbol string per factor of the space.
///
/// Words over a single-factor space have one part. Ordering is lexicographic
/// with the first factor most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    parts: Vec<Vec<u16>>,
}

impl Word {
    pub fn new(parts: Vec<Vec<u16>>) -> Word {
        Word { parts }
    }

    pub fn single(symbols: Vec<u16>) -> Word {
        Word {
            parts: vec![symbols],
        }
    }

    pub fn empty(factors: usize) -> Word {
        Word {
            parts: vec![Vec::new(); factors],
        }
    }

    pub fn parts(&self) -> &[Vec<u16>] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<Vec<u16>> {
        self.parts
    }

    pub fn num_factors(&self) -> usize {
        self.parts.len()
    }

    /// Length of the shortest part.
    pub fn depth(&self) -> usize {
        self.parts.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn is_uniform(&self) -> bool {
        self.parts.windows(2).all(|w| w[0].len() == w[1].len())
    }

    /// Truncates every part to length `d`. Parts shorter than `d` are kept whole.
    pub fn prefix(&self, d: usize) -> Word {
        Word {
            parts: self
                .parts
                .iter()
                .map(|p| p[..d.min(p.len())].to_vec())
                .collect(),
        }
    }

    /// Per-factor concatenation.
    pub fn concat(&self, other: &Word) -> Word {
        debug_assert_eq!(self.parts.len(), other.parts.len());
        Word {
            parts: self
                .parts
                .iter()
                .zip(&other.parts)
                .map(|(a, b)| a.iter().chain(b).copied().collect())
                .collect(),
        }
    }

    /// Whether every part of `self` is a prefix of the matching part of `other`.
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        self.parts.len() == other.parts.len()
            && self
                .parts
                .iter()
                .zip(&other.parts)
                .all(|(a, b)| b.starts_with(a))
    }

    /// First coordinate index at which the two words differ in some factor.
    pub fn first_disagreement(&self, other: &Word) -> Option<usize> {
        self.parts
            .iter()
            .zip(&other.parts)
            .filter_map(|(a, b)| a.iter().zip(b).position(|(x, y)| x != y))
            .min()
    }
}
