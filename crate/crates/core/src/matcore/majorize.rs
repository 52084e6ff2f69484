use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute slack allowed on partial-sum comparisons.
pub const PARTIAL_SUM_SLACK: f64 = 1e-10;
/// Relative tolerance on the equality of totals.
pub const TOTAL_REL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct Majorization {
    pub holds: bool,
    /// `min_k (Σ_{i<k} x↓ᵢ − Σ_{i<k} y↓ᵢ)` over proper prefixes; negative values
    /// are violations.
    pub min_slack: f64,
    /// `Σ xᵢ − Σ yᵢ`.
    pub total_diff: f64,
}

/// Whether `x` majorizes `y`: sorted descending, every partial sum of `x`
/// dominates that of `y` and the totals agree.
pub fn majorizes(x: &[f64], y: &[f64]) -> Result<Majorization> {
    if x.len() != y.len() {
        return Err(Error::shape(format!(
            "majorization needs equal lengths, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let sorted_desc = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    };
    let (xs, ys) = (sorted_desc(x), sorted_desc(y));
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut min_slack = f64::INFINITY;
    for k in 0..xs.len() {
        sx += xs[k];
        sy += ys[k];
        if k + 1 < xs.len() {
            min_slack = min_slack.min(sx - sy);
        }
    }
    let total_diff = sx - sy;
    let total_scale = sx.abs().max(sy.abs()).max(1.0);
    let holds = min_slack >= -PARTIAL_SUM_SLACK && total_diff.abs() <= TOTAL_REL_TOL * total_scale;
    Ok(Majorization {
        holds,
        min_slack: if min_slack.is_finite() {
            min_slack
        } else {
            0.0
        },
        total_diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_cases() {
        assert!(majorizes(&[3.0, 1.0], &[2.0, 2.0]).unwrap().holds);
        assert!(!majorizes(&[2.0, 2.0], &[3.0, 1.0]).unwrap().holds);
        assert!(majorizes(&[1.0, 3.0], &[2.0, 2.0]).unwrap().holds);
        // equal partial sums but different totals
        assert!(!majorizes(&[3.0, 1.0], &[2.0, 1.0]).unwrap().holds);
        assert!(majorizes(&[5.0], &[5.0]).unwrap().holds);
        assert!(majorizes(&[1.0], &[1.0, 2.0]).is_err());
    }
}
