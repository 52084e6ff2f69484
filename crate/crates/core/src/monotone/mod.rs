//! Sampling evidence for matrix monotonicity through Loewner matrices of
//! divided differences, and its use as a sufficient condition for the trace
//! inequality (`−f′` matrix monotone).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::ScalarFn;
use crate::matcore::{eig_sym, SymMatrix};
use crate::rng::Stream;

/// PSD tolerance relative to `‖L‖₂`.
pub const PSD_TOL_REL: f64 = 1e-10;
/// Minimum point spacing relative to the configuration span.
pub const MIN_GAP_REL: f64 = 1e-6;
/// Spacing of the near-coincident pair in adversarial trials.
pub const CLUSTER_GAP_REL: f64 = 1e-5;

#[derive(Clone, Debug, Serialize)]
pub struct LoewnerReport {
    pub points: Vec<f64>,
    pub loewner: SymMatrix,
    pub min_eig: f64,
    pub psd: bool,
    pub tol: f64,
}

impl LoewnerReport {
    /// `min_eig / max(‖L‖₂, tiny)`, the quantity trials are ranked by.
    pub fn relative_min_eig(&self) -> f64 {
        self.min_eig / (self.tol / PSD_TOL_REL).max(f64::MIN_POSITIVE)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Passed,
    Failed,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Passed => "PASSED",
            Verdict::Failed => "FAILED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotoneVerdict {
    pub order: usize,
    pub trials: usize,
    pub interval: [f64; 2],
    pub seed: u64,
    pub verdict: Verdict,
    /// Trials whose Loewner matrix was not PSD.
    pub violations: usize,
    /// Trials where `g` or `g′` was not finite at some point.
    pub skipped: usize,
    pub worst_trial: Option<usize>,
    /// Trial with the smallest relative minimum eigenvalue.
    pub worst: Option<LoewnerReport>,
    pub summary: String,
}

/// Loewner matrix of `g` at increasing `points`: divided differences off the
/// diagonal, `g′` on it.
pub fn loewner_matrix(
    g: impl Fn(f64) -> f64,
    gp: impl Fn(f64) -> f64,
    points: &[f64],
) -> Result<LoewnerReport> {
    let n = points.len();
    if n == 0 {
        return Err(Error::DegeneratePoints("no points".into()));
    }
    if points.iter().any(|x| !x.is_finite()) {
        return Err(Error::DegeneratePoints("points must be finite".into()));
    }
    let span = points[n - 1] - points[0];
    for w in points.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::DegeneratePoints(format!(
                "points must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if w[1] - w[0] < MIN_GAP_REL * span {
            return Err(Error::DegeneratePoints(format!(
                "gap {:e} between {} and {} is below {MIN_GAP_REL:e} of the span",
                w[1] - w[0],
                w[0],
                w[1]
            )));
        }
    }
    let values: Vec<f64> = points.iter().map(|&x| g(x)).collect();
    let slopes: Vec<f64> = points.iter().map(|&x| gp(x)).collect();
    for (i, (&v, &d)) in values.iter().zip(&slopes).enumerate() {
        if !v.is_finite() || !d.is_finite() {
            return Err(Error::domain(
                points[i],
                "function or derivative is not finite at this point",
            ));
        }
    }
    let loewner = SymMatrix::from_upper(n, |i, j| {
        if i == j {
            slopes[i]
        } else {
            (values[j] - values[i]) / (points[j] - points[i])
        }
    });
    let eig = eig_sym(&loewner)?;
    let min_eig = eig.min();
    let tol = PSD_TOL_REL * eig.spectral_norm();
    Ok(LoewnerReport {
        points: points.to_vec(),
        loewner,
        min_eig,
        psd: min_eig >= -tol,
        tol,
    })
}

/// Draws `n` sorted log-uniform points in `[lo, hi]` with pairwise gaps of at
/// least `MIN_GAP_REL` of the span. With `cluster`, one point gets a partner
/// at `CLUSTER_GAP_REL` of the interval width.
fn sample_points(s: &mut Stream, lo: f64, hi: f64, n: usize, cluster: bool) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    loop {
        let free = if cluster { n - 1 } else { n };
        let mut pts: Vec<f64> = (0..free).map(|_| s.uniform_in(llo, lhi).exp()).collect();
        if cluster {
            let anchor = pts[s.below(free)];
            let d = CLUSTER_GAP_REL * (hi - lo);
            pts.push(if anchor + d <= hi {
                anchor + d
            } else {
                anchor - d
            });
        }
        pts.sort_by(f64::total_cmp);
        let span = pts[n - 1] - pts[0];
        if pts.windows(2).all(|w| w[1] - w[0] >= MIN_GAP_REL * span) {
            return pts;
        }
    }
}

/// Samples `trials` point configurations of size `order` in `interval` and
/// tests each Loewner matrix for positive semidefiniteness.
///
/// Trial `i` draws from seed `seed + i`, and every tenth trial plants a
/// near-coincident pair. The verdict is FAILED if any matrix has
/// `min_eig < −1e-10·‖L‖₂`, INCONCLUSIVE if more than 1% of trials hit
/// non-finite values, and PASSED otherwise. PASSED is evidence only.
pub fn test_matrix_monotone<G, D>(
    g: G,
    gp: D,
    interval: (f64, f64),
    order: usize,
    trials: usize,
    seed: u64,
) -> Result<MonotoneVerdict>
where
    G: Fn(f64) -> f64 + Sync,
    D: Fn(f64) -> f64 + Sync,
{
    let (lo, hi) = interval;
    if order < 2 {
        return Err(Error::ParamOutOfRange(format!(
            "order must be at least 2, got {order}"
        )));
    }
    if trials == 0 {
        return Err(Error::ParamOutOfRange("trials must be at least 1".into()));
    }
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::ParamOutOfRange(format!(
            "interval must satisfy 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    for x in [lo, (lo * hi).sqrt(), hi] {
        if !g(x).is_finite() || !gp(x).is_finite() {
            return Err(Error::domain(x, "function is not defined on the interval"));
        }
    }

    let outcomes: Vec<Result<LoewnerReport>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut s = Stream::new(seed.wrapping_add(i as u64));
            let pts = sample_points(&mut s, lo, hi, order, i % 10 == 9);
            loewner_matrix(&g, &gp, &pts)
        })
        .collect();

    let mut violations = 0;
    let mut skipped = 0;
    let mut worst: Option<(usize, LoewnerReport)> = None;
    for (i, out) in outcomes.into_iter().enumerate() {
        match out {
            Ok(r) => {
                if !r.psd {
                    violations += 1;
                }
                let better = worst
                    .as_ref()
                    .is_none_or(|(_, w)| r.relative_min_eig() < w.relative_min_eig());
                if better {
                    worst = Some((i, r));
                }
            }
            Err(Error::Domain { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }

    let verdict = if violations > 0 {
        Verdict::Failed
    } else if skipped * 100 > trials || worst.is_none() {
        Verdict::Inconclusive
    } else {
        Verdict::Passed
    };
    let summary = match verdict {
        Verdict::Passed => format!("no violation found in {trials} trials"),
        Verdict::Failed => format!(
            "violation found in {violations} of {trials} trials (worst min eigenvalue {:e})",
            worst.as_ref().map_or(f64::NAN, |(_, w)| w.min_eig)
        ),
        Verdict::Inconclusive => {
            format!("non-finite values in {skipped} of {trials} trials; no verdict")
        }
    };
    Ok(MonotoneVerdict {
        order,
        trials,
        interval: [lo, hi],
        seed,
        verdict,
        violations,
        skipped,
        worst_trial: worst.as_ref().map(|(i, _)| *i),
        worst: worst.map(|(_, r)| r),
        summary,
    })
}

/// Tests whether `−f′` looks matrix monotone, which suffices for `f` to satisfy
/// the trace inequality.
pub fn check_ssa_sufficient(
    f: &ScalarFn,
    interval: (f64, f64),
    order: usize,
    trials: usize,
    seed: u64,
) -> Result<MonotoneVerdict> {
    let mut v = test_matrix_monotone(
        |x| -f.derivative(x),
        |x| -f.second_derivative(x),
        interval,
        order,
        trials,
        seed,
    )?;
    if v.verdict == Verdict::Passed {
        v.summary = format!("sufficient condition numerically supported: {}", v.summary);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::parse_function;

    #[test]
    fn identity_gives_all_ones() {
        let r = loewner_matrix(|x| x, |_| 1.0, &[1.0, 2.0, 3.0]).unwrap();
        assert!(r.loewner.as_mat().as_slice().iter().all(|&v| v == 1.0));
        assert!(r.min_eig.abs() < 1e-14);
        assert!(r.psd);
    }

    #[test]
    fn square_is_not_monotone_of_order_two() {
        let r = loewner_matrix(|x| x * x, |x| 2.0 * x, &[1.0, 2.0]).unwrap();
        assert_eq!(r.loewner.as_mat().as_slice(), &[2.0, 3.0, 3.0, 4.0]);
        assert!(!r.psd);
        let v = test_matrix_monotone(|x| x * x, |x| 2.0 * x, (0.1, 10.0), 2, 50, 1).unwrap();
        assert_eq!(v.verdict, Verdict::Failed);
        assert!(v.worst.unwrap().min_eig < 0.0);
    }

    #[test]
    fn neg_kappa_derivative_is_psd() {
        let g = |x: f64| (x / (x + 1.0)).ln();
        let gp = |x: f64| 1.0 / (x * (x + 1.0));
        let mut s = Stream::new(17);
        for _ in 0..20 {
            let mut pts: Vec<f64> = (0..5)
                .map(|_| s.uniform_in(-3.0, 3.0))
                .map(|e| 10f64.powf(e))
                .collect();
            pts.sort_by(f64::total_cmp);
            assert!(loewner_matrix(g, gp, &pts).unwrap().psd);
        }
    }

    #[test]
    fn spacing_rules() {
        assert!(matches!(
            loewner_matrix(|x| x, |_| 1.0, &[1.0, 1.0]),
            Err(Error::DegeneratePoints(_))
        ));
        assert!(matches!(
            loewner_matrix(|x| x, |_| 1.0, &[0.0, 1e-7, 1.0]),
            Err(Error::DegeneratePoints(_))
        ));
        assert!(matches!(
            loewner_matrix(|x| x, |_| 1.0, &[2.0, 1.0]),
            Err(Error::DegeneratePoints(_))
        ));
    }

    #[test]
    fn operator_monotone_functions_pass() {
        let v =
            test_matrix_monotone(f64::sqrt, |x| 0.5 / x.sqrt(), (1e-2, 1e2), 5, 500, 3).unwrap();
        assert_eq!(v.verdict, Verdict::Passed, "{}", v.summary);
        assert_eq!(v.summary, "no violation found in 500 trials");
        let v = test_matrix_monotone(f64::ln, |x| 1.0 / x, (1e-3, 1e3), 7, 200, 4).unwrap();
        assert_eq!(v.verdict, Verdict::Passed, "{}", v.summary);
    }

    #[test]
    fn catalog_examples() {
        for (spec, expected) in [
            ("kappa", Verdict::Passed),
            ("shifted_entropy:c=1", Verdict::Passed),
            ("f_p:p=0.3", Verdict::Passed),
            ("neg_inverse", Verdict::Failed),
        ] {
            let f = parse_function(spec).unwrap();
            let v = check_ssa_sufficient(&f, (1e-3, 1e3), 5, 200, 42).unwrap();
            assert_eq!(v.verdict, expected, "{spec}: {}", v.summary);
        }
    }

    #[test]
    fn deterministic_and_affine_invariant() {
        let g = |x: f64| x / (1.0 + x);
        let gp = |x: f64| 1.0 / ((1.0 + x) * (1.0 + x));
        let a = test_matrix_monotone(g, gp, (1e-2, 1e2), 4, 100, 9).unwrap();
        let b = test_matrix_monotone(g, gp, (1e-2, 1e2), 4, 100, 9).unwrap();
        assert_eq!(crate::report::to_json(&a), crate::report::to_json(&b));
        let shifted = test_matrix_monotone(
            |x| 3.0 * g(x) - 7.0,
            |x| 3.0 * gp(x),
            (1e-2, 1e2),
            4,
            100,
            9,
        )
        .unwrap();
        assert_eq!(a.verdict, shifted.verdict);
        let sq = test_matrix_monotone(|x| x * x, |x| 2.0 * x, (1e-2, 1e2), 3, 100, 9).unwrap();
        let sq_scaled =
            test_matrix_monotone(|x| 4.0 * x * x + 1.0, |x| 8.0 * x, (1e-2, 1e2), 3, 100, 9)
                .unwrap();
        assert_eq!(sq.verdict, sq_scaled.verdict);
    }

    #[test]
    fn undefined_interval_is_a_domain_error() {
        assert!(matches!(
            test_matrix_monotone(
                |x: f64| (x - 1.0).ln(),
                |x| 1.0 / (x - 1.0),
                (0.5, 2.0),
                3,
                10,
                0
            ),
            Err(Error::Domain { .. })
        ));
    }
}
