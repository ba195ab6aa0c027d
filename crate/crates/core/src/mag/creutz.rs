//! Creutz ratios `χ(R,T) = −ln[W(R,T) W(R−1,T−1) / (W(R,T−1) W(R−1,T))]`.

use crate::error::{Error, Result};

/// `W(R,T)` for `R,T ≥ 0`, with `W(0,·) = W(·,0) = 1`.
fn entry(w: &[Vec<f64>], r: usize, t: usize) -> Option<f64> {
    if r == 0 || t == 0 {
        return Some(1.0);
    }
    w.get(r - 1).and_then(|row| row.get(t - 1)).copied()
}

/// Creutz ratio from a loop table indexed `[R−1][T−1]`.
///
/// `R = 1` or `T = 1` use the trivial zero-extent loops.
pub fn creutz_ratio(w: &[Vec<f64>], r: usize, t: usize) -> Result<f64> {
    if r == 0 || t == 0 {
        return Err(Error::Range(format!("Creutz ratio needs R, T >= 1, got ({r}, {t})")));
    }
    let vals = [entry(w, r, t), entry(w, r - 1, t - 1), entry(w, r, t - 1), entry(w, r - 1, t)];
    let mut v = [0.0; 4];
    for (slot, x) in v.iter_mut().zip(vals) {
        match x {
            Some(x) if x > 0.0 && x.is_finite() => *slot = x,
            Some(x) => {
                return Err(Error::UndefinedSignal(format!(
                    "Creutz ratio chi({r},{t}) needs positive loops, got {x}"
                )))
            }
            None => return Err(Error::Range(format!("loop table has no entry for chi({r},{t})"))),
        }
    }
    Ok(-(v[0].ln() + v[1].ln() - v[2].ln() - v[3].ln()))
}

/// `χ(R,T)` for `2 ≤ R,T ≤` table size, indexed `[R−2][T−2]`. Entries whose
/// loops are not all positive come out as `None`.
pub fn creutz_table(w: &[Vec<f64>]) -> Vec<Vec<Option<f64>>> {
    let n = w.len();
    (2..=n)
        .map(|r| (2..=w[r - 1].len()).map(|t| creutz_ratio(w, r, t).ok()).collect())
        .collect()
}
