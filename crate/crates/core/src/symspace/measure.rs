use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::function::CylinderFunction;
use super::space::SymbolicSpace;
use super::word::Word;

/// Consistency tolerance for Kolmogorov sums.
pub const CONSISTENCY_TOL: f64 = 1e-12;

/// Markov chain on one factor's alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovRule {
    pub initial: Vec<f64>,
    pub transition: Vec<Vec<f64>>,
}

/// Generates masses of deeper cylinders; on a product it acts factorwise.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinementRule {
    factors: Vec<MarkovRule>,
}

impl RefinementRule {
    pub fn markov(space: &SymbolicSpace, rules: Vec<MarkovRule>) -> Result<RefinementRule> {
        if rules.len() != space.num_factors() {
            return Err(Error::RankMismatch {
                expected: space.num_factors(),
                found: rules.len(),
            });
        }
        for (f, r) in space.factors().iter().zip(&rules) {
            let n = f.size();
            if r.initial.len() != n || r.transition.len() != n || r.transition.iter().any(|row| row.len() != n) {
                return Err(Error::InvalidArgument("Markov rule has wrong dimensions".into()));
            }
            if r.initial.iter().chain(r.transition.iter().flatten()).any(|&p| !(p >= 0.0)) {
                return Err(Error::InvalidArgument("Markov rule has a negative entry".into()));
            }
            if (r.initial.iter().sum::<f64>() - 1.0).abs() > CONSISTENCY_TOL {
                return Err(Error::InvalidArgument("initial distribution does not sum to 1".into()));
            }
            for (a, row) in r.transition.iter().enumerate() {
                if (row.iter().sum::<f64>() - 1.0).abs() > CONSISTENCY_TOL {
                    return Err(Error::InvalidArgument(format!("transition row {a} does not sum to 1")));
                }
                if row
                    .iter()
                    .enumerate()
                    .any(|(b, &p)| p > 0.0 && !f.allows(a as u16, b as u16))
                {
                    return Err(Error::InvalidArgument(format!(
                        "transition row {a} charges a forbidden symbol"
                    )));
                }
            }
        }
        Ok(RefinementRule { factors: rules })
    }

    /// Uniform Bernoulli rule; every factor must be a full shift.
    pub fn uniform_bernoulli(space: &SymbolicSpace) -> Result<RefinementRule> {
        let rules = space
            .factors()
            .iter()
            .map(|f| {
                if !f.is_full() {
                    return Err(Error::InvalidArgument("uniform Bernoulli needs full shifts".into()));
                }
                let p = 1.0 / f.size() as f64;
                Ok(MarkovRule {
                    initial: vec![p; f.size()],
                    transition: vec![vec![p; f.size()]; f.size()],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RefinementRule { factors: rules })
    }

    /// Conditional mass of `Z[w]` given `Z[w.prefix(from)]`.
    fn conditional(&self, w: &Word, from: usize) -> f64 {
        let mut p = 1.0;
        for (r, part) in self.factors.iter().zip(w.parts()) {
            for t in from..part.len() {
                p *= if t == 0 {
                    r.initial[part[0] as usize]
                } else {
                    r.transition[part[t - 1] as usize][part[t] as usize]
                };
            }
        }
        p
    }
}

/// Nonnegative masses on the depth-`m` cylinders.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderMeasure {
    space: SymbolicSpace,
    depth: usize,
    masses: BTreeMap<Word, f64>,
    rule: Option<RefinementRule>,
}

impl CylinderMeasure {
    pub fn new(space: SymbolicSpace, depth: usize, masses: BTreeMap<Word, f64>) -> Result<Self> {
        let words = space.admissible_words(depth);
        if words.len() != masses.len() || words.iter().any(|w| !masses.contains_key(w)) {
            return Err(Error::Schema(format!(
                "measure must assign a mass to each of the {} depth-{depth} words",
                words.len()
            )));
        }
        if masses.values().any(|&m| !(m >= 0.0)) {
            return Err(Error::InvalidArgument("negative or NaN mass".into()));
        }
        Ok(CylinderMeasure {
            space,
            depth,
            masses,
            rule: None,
        })
    }

    pub(crate) fn from_vec(space: &SymbolicSpace, depth: usize, words: &[Word], masses: &[f64]) -> Self {
        CylinderMeasure {
            space: space.clone(),
            depth,
            masses: words.iter().cloned().zip(masses.iter().copied()).collect(),
            rule: None,
        }
    }

    pub fn from_rule(space: &SymbolicSpace, rule: RefinementRule, depth: usize) -> Self {
        let masses = space
            .admissible_words(depth)
            .into_iter()
            .map(|w| {
                let m = rule.conditional(&w, 0);
                (w, m)
            })
            .collect();
        CylinderMeasure {
            space: space.clone(),
            depth,
            masses,
            rule: Some(rule),
        }
    }

    pub fn uniform_bernoulli(space: &SymbolicSpace, depth: usize) -> Result<Self> {
        Ok(Self::from_rule(space, RefinementRule::uniform_bernoulli(space)?, depth))
    }

    pub fn with_rule(mut self, rule: RefinementRule) -> Self {
        self.rule = Some(rule);
        self
    }

    pub fn space(&self) -> &SymbolicSpace {
        &self.space
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn masses(&self) -> &BTreeMap<Word, f64> {
        &self.masses
    }

    pub fn rule(&self) -> Option<&RefinementRule> {
        self.rule.as_ref()
    }

    pub fn total(&self) -> f64 {
        self.masses.values().sum()
    }

    pub fn normalized(&self) -> Self {
        let t = self.total();
        let mut out = self.clone();
        out.masses.values_mut().for_each(|m| *m /= t);
        out
    }

    /// Mass of `Z[w]`. Cylinders deeper than the measure need a rule.
    pub fn mass(&self, w: &Word) -> Result<f64> {
        let d = w.depth();
        if d <= self.depth && w.parts().iter().all(|p| p.len() <= self.depth) {
            return Ok(self
                .masses
                .iter()
                .filter(|(k, _)| w.is_prefix_of(k))
                .map(|(_, m)| m)
                .sum());
        }
        let rule = self.rule.as_ref().ok_or(Error::NoRefinementRule)?;
        let base = self.masses.get(&w.prefix(self.depth)).copied().unwrap_or(0.0);
        Ok(base * rule.conditional(w, self.depth))
    }

    /// The induced measure on depth-`d` cylinders, `d ≤ depth`.
    pub fn marginal(&self, d: usize) -> Result<Self> {
        if d > self.depth {
            return self.refine(d);
        }
        let mut masses: BTreeMap<Word, f64> =
            self.space.admissible_words(d).into_iter().map(|w| (w, 0.0)).collect();
        for (w, m) in &self.masses {
            *masses.get_mut(&w.prefix(d)).expect("prefix admissible") += m;
        }
        Ok(CylinderMeasure {
            space: self.space.clone(),
            depth: d,
            masses,
            rule: self.rule.clone(),
        })
    }

    pub fn refine(&self, d: usize) -> Result<Self> {
        if d <= self.depth {
            return self.marginal(d);
        }
        let rule = self.rule.as_ref().ok_or(Error::NoRefinementRule)?;
        let masses = self
            .space
            .admissible_words(d)
            .into_iter()
            .map(|w| {
                let m = self.masses[&w.prefix(self.depth)] * rule.conditional(&w, self.depth);
                (w, m)
            })
            .collect();
        Ok(CylinderMeasure {
            space: self.space.clone(),
            depth: d,
            masses,
            rule: self.rule.clone(),
        })
    }

    /// Masses of every cylinder of depth `0..=max_depth`.
    pub fn mass_table(&self, max_depth: usize) -> Result<BTreeMap<Word, f64>> {
        let mut table = BTreeMap::new();
        for d in 0..=max_depth {
            table.extend(self.marginal(d)?.masses);
        }
        Ok(table)
    }

    pub fn integrate(&self, f: &CylinderFunction<f64>) -> Result<f64> {
        if f.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        let mu = if f.depth() > self.depth { self.refine(f.depth())? } else { self.clone() };
        Ok(mu
            .masses
            .iter()
            .map(|(w, m)| m * f.eval(w).expect("measure is at least as deep"))
            .sum())
    }

    /// Sum of absolute mass differences at the common depth.
    pub fn l1_distance(&self, other: &Self) -> Result<f64> {
        let d = self.depth.max(other.depth);
        let a = self.refine(d)?;
        let b = other.refine(d)?;
        Ok(a.masses.iter().map(|(w, m)| (m - b.masses[w]).abs()).sum())
    }
}

/// Whether a multi-depth mass table obeys `mass(Z[w]) = Σ_a mass(Z[wa])`
/// wherever a one-step extension of `w` is listed. Missing children count as
/// zero; negative masses fail.
pub fn measure_consistency_check(space: &SymbolicSpace, table: &BTreeMap<Word, f64>, tol: f64) -> bool {
    if table.values().any(|&m| !(m >= 0.0)) {
        return false;
    }
    table.iter().all(|(w, &m)| {
        let children = space.extensions(w, 1);
        if !children.iter().any(|c| table.contains_key(c)) {
            return true;
        }
        let s: f64 = children.iter().map(|c| table.get(c).copied().unwrap_or(0.0)).sum();
        (s - m).abs() <= tol
    })
}
