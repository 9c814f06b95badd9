use crate::error::{Error, Result};

use super::space::{exactness_certificate, SymbolicSpace};
use super::word::Word;

/// The closed catalog of local homeomorphisms.
///
/// `Composition([S, T])` is `S ∘ T`: `T` acts first. The empty composition is
/// the identity. On a product space `Shift` shifts every factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CatalogMap {
    Shift,
    SymbolBijection(Vec<u16>),
    Composition(Vec<CatalogMap>),
    FactorMap(usize, Box<CatalogMap>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriState {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct MapCertificates {
    pub positively_expansive: TriState,
    /// A primitivity exponent of the underlying transition matrices, present
    /// only when the map consumes a symbol in every factor.
    pub exact_certificate: Option<usize>,
}

impl MapCertificates {
    pub fn certified(&self) -> bool {
        self.positively_expansive == TriState::Yes && self.exact_certificate.is_some()
    }
}

/// Action `x ↦ π(σ^c x)` on one factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactorAction {
    pub consumed: usize,
    pub perm: Vec<u16>,
}

/// Every catalog map acts on each factor as a symbol permutation after a shift.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalForm {
    parts: Vec<FactorAction>,
}

impl CatalogMap {
    pub fn identity() -> CatalogMap {
        CatalogMap::Composition(Vec::new())
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &CatalogMap) -> CatalogMap {
        CatalogMap::Composition(vec![self.clone(), inner.clone()])
    }

    pub fn power(&self, n: u32) -> CatalogMap {
        CatalogMap::Composition(vec![self.clone(); n as usize])
    }

    pub fn normal_form(&self, space: &SymbolicSpace) -> Result<NormalForm> {
        match self {
            CatalogMap::Shift => Ok(NormalForm {
                parts: space
                    .factors()
                    .iter()
                    .map(|f| FactorAction {
                        consumed: 1,
                        perm: identity_perm(f.size()),
                    })
                    .collect(),
            }),
            CatalogMap::SymbolBijection(perm) => {
                if space.num_factors() != 1 {
                    return Err(Error::InvalidMap(
                        "symbol bijection on a product needs a factor index".into(),
                    ));
                }
                let f = &space.factors()[0];
                let n = f.size();
                let mut seen = vec![false; n];
                if perm.len() != n
                    || perm
                        .iter()
                        .any(|&p| (p as usize) >= n || std::mem::replace(&mut seen[p as usize], true))
                {
                    return Err(Error::InvalidMap(format!(
                        "{perm:?} is not a permutation of 0..{n}"
                    )));
                }
                for a in 0..n as u16 {
                    for b in 0..n as u16 {
                        if f.allows(a, b) != f.allows(perm[a as usize], perm[b as usize]) {
                            return Err(Error::InvalidMap(format!(
                                "{perm:?} does not preserve admissibility at ({a},{b})"
                            )));
                        }
                    }
                }
                Ok(NormalForm {
                    parts: vec![FactorAction {
                        consumed: 0,
                        perm: perm.clone(),
                    }],
                })
            }
            CatalogMap::Composition(maps) => {
                let mut nf = NormalForm::identity(space);
                for m in maps {
                    nf = nf.then(&m.normal_form(space)?);
                }
                Ok(nf)
            }
            CatalogMap::FactorMap(j, inner) => {
                let sub = space.factor_space(*j).ok_or_else(|| {
                    Error::InvalidMap(format!(
                        "factor {j} out of range for {} factors",
                        space.num_factors()
                    ))
                })?;
                let inner_nf = inner.normal_form(&sub)?;
                let mut nf = NormalForm::identity(space);
                nf.parts[*j] = inner_nf.parts.into_iter().next().expect("one factor");
                Ok(nf)
            }
        }
    }

    pub fn validate(&self, space: &SymbolicSpace) -> Result<()> {
        self.normal_form(space).map(|_| ())
    }

    pub fn certificates(&self, space: &SymbolicSpace) -> Result<MapCertificates> {
        let nf = self.normal_form(space)?;
        if nf.parts.iter().all(|p| p.consumed >= 1) {
            let bound = space
                .factors()
                .iter()
                .map(|f| (f.size() - 1).pow(2) + 1)
                .max()
                .unwrap_or(1);
            return Ok(MapCertificates {
                positively_expansive: TriState::Yes,
                exact_certificate: exactness_certificate(space, bound),
            });
        }
        let infinite_bijective_factor = nf
            .parts
            .iter()
            .zip(space.factors())
            .any(|(p, f)| p.consumed == 0 && f.is_full() && f.size() >= 2);
        Ok(MapCertificates {
            positively_expansive: if infinite_bijective_factor {
                TriState::No
            } else {
                TriState::Unknown
            },
            exact_certificate: None,
        })
    }
}

fn identity_perm(n: usize) -> Vec<u16> {
    (0..n as u16).collect()
}

impl NormalForm {
    pub fn identity(space: &SymbolicSpace) -> NormalForm {
        NormalForm {
            parts: space
                .factors()
                .iter()
                .map(|f| FactorAction {
                    consumed: 0,
                    perm: identity_perm(f.size()),
                })
                .collect(),
        }
    }

    pub fn parts(&self) -> &[FactorAction] {
        &self.parts
    }

    /// `self ∘ inner`. Symbol permutations commute with the shift, so
    /// consumptions add and permutations compose.
    pub fn then(&self, inner: &NormalForm) -> NormalForm {
        NormalForm {
            parts: self
                .parts
                .iter()
                .zip(&inner.parts)
                .map(|(o, i)| FactorAction {
                    consumed: o.consumed + i.consumed,
                    perm: i.perm.iter().map(|&s| o.perm[s as usize]).collect(),
                })
                .collect(),
        }
    }

    pub fn consumption(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.consumed).collect()
    }

    pub fn max_consumed(&self) -> usize {
        self.parts.iter().map(|p| p.consumed).max().unwrap_or(0)
    }

    pub fn min_consumed(&self) -> usize {
        self.parts.iter().map(|p| p.consumed).min().unwrap_or(0)
    }

    /// Per-factor image of a word; `None` if some part is shorter than the
    /// number of symbols consumed in that factor.
    pub fn image(&self, w: &Word) -> Option<Word> {
        let mut parts = Vec::with_capacity(self.parts.len());
        for (a, p) in self.parts.iter().zip(w.parts()) {
            if p.len() < a.consumed {
                return None;
            }
            parts.push(p[a.consumed..].iter().map(|&s| a.perm[s as usize]).collect());
        }
        Some(Word::new(parts))
    }

    /// Image truncated to uniform depth.
    pub fn image_uniform(&self, w: &Word) -> Option<Word> {
        let img = self.image(w)?;
        let d = img.depth();
        Some(img.prefix(d))
    }

    pub(crate) fn inverse_perms(&self) -> Vec<Vec<u16>> {
        self.parts
            .iter()
            .map(|a| {
                let mut inv = vec![0u16; a.perm.len()];
                for (s, &t) in a.perm.iter().enumerate() {
                    inv[t as usize] = s as u16;
                }
                inv
            })
            .collect()
    }

    /// Minimal output depth for a Ruelle operator whose input data has depth
    /// `input_depth`: every preimage branch must pin down the input, and
    /// shifted non-full factors need one symbol to constrain the branch.
    pub(crate) fn ruelle_output_depth(&self, space: &SymbolicSpace, input_depth: usize) -> usize {
        let need_one = self
            .parts
            .iter()
            .zip(space.factors())
            .any(|(a, f)| a.consumed > 0 && !f.is_full()) as usize;
        input_depth.saturating_sub(self.min_consumed()).max(need_one)
    }

    /// All non-uniform words `y` (part `j` of length `|w| + c_j`) with
    /// `image(y) = w` and `Z[y]` admissible, for a uniform target `w`.
    pub(crate) fn preimage_branches(&self, space: &SymbolicSpace, w: &Word) -> Vec<Word> {
        let inverses = self.inverse_perms();
        let per_factor: Vec<Vec<Vec<u16>>> = self
            .parts
            .iter()
            .zip(space.factors())
            .zip(w.parts())
            .zip(&inverses)
            .map(|(((a, f), p), inv)| {
                let tail: Vec<u16> = p.iter().map(|&s| inv[s as usize]).collect();
                f.words(a.consumed)
                    .into_iter()
                    .filter_map(|mut head| {
                        if let (Some(&l), Some(&t)) = (head.last(), tail.first()) {
                            if !f.allows(l, t) {
                                return None;
                            }
                        }
                        head.extend_from_slice(&tail);
                        Some(head)
                    })
                    .collect()
            })
            .collect();
        super::space::cartesian(&per_factor)
    }
}

/// Whether `s ∘ t = t ∘ s`, checked on the images of every admissible word
/// of depth `c_s + c_t + 2`.
pub fn maps_commute(space: &SymbolicSpace, s: &CatalogMap, t: &CatalogMap) -> Result<bool> {
    let ns = s.normal_form(space)?;
    let nt = t.normal_form(space)?;
    let d = ns.max_consumed() + nt.max_consumed() + 2;
    Ok(space.admissible_words(d).iter().all(|v| {
        let st = nt.image(v).and_then(|w| ns.image(&w));
        let ts = ns.image(v).and_then(|w| nt.image(&w));
        st == ts
    }))
}

/// Words `v` of uniform depth `target_depth` whose cylinders map into `Z[w]`.
/// Together they partition the preimage of `Z[w]`.
pub fn preimage_words(
    space: &SymbolicSpace,
    map: &CatalogMap,
    w: &Word,
    target_depth: usize,
) -> Result<Vec<Word>> {
    let nf = map.normal_form(space)?;
    if !w.is_uniform() || !space.is_admissible(w) {
        return Err(Error::InadmissibleWord(space.format_word(w)));
    }
    let required = w.depth() + nf.max_consumed();
    if target_depth < required {
        return Err(Error::DepthTooSmall {
            required,
            given: target_depth,
        });
    }
    Ok(space
        .admissible_words(target_depth)
        .into_iter()
        .filter(|v| nf.image(v).is_some_and(|img| w.is_prefix_of(&img)))
        .collect())
}
