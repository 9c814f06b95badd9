use super::GroupoidElement;
use crate::error::{Error, Result};
use crate::symspace::{CylinderMeasure, Word};

/// `ψ_μ(f) = ∫_{X} f(x, 0, x) dμ` for `f = Σ cₙ 1_{Bₙ}` over compact open bisections.
///
/// Only the part of a bisection lying in the unit space contributes. Refuses
/// spaces with a single point, where every bisection is a unit.
pub fn kms_functional(mu: &CylinderMeasure, f: &[(f64, GroupoidElement)]) -> Result<f64> {
    let space = mu.space();
    if space.word_count(mu.depth().max(1)) <= 1 {
        log::warn!("kms functional requested on a one-point space");
        return Err(Error::Degenerate("the space has a single point".into()));
    }
    let mut total = 0.0;
    for (c, g) in f {
        if g.p() != g.q() {
            continue;
        }
        if let Some(w) = meet(g.x_word(), g.y_word()) {
            total += c * mu.mass(&w)?;
        }
    }
    Ok(total)
}

/// The cylinder `Z[u] ∩ Z[v]`, if nonempty as a word.
fn meet(u: &Word, v: &Word) -> Option<Word> {
    let mut parts = Vec::with_capacity(u.num_factors());
    for (a, b) in u.parts().iter().zip(v.parts()) {
        if a.starts_with(b) {
            parts.push(a.clone());
        } else if b.starts_with(a) {
            parts.push(b.clone());
        } else {
            return None;
        }
    }
    Some(Word::new(parts))
}
