//! Integral representations of `xᵗ` and `κ`, evaluated by quadrature.

use std::f64::consts::PI;

use serde::Serialize;

use super::quadrature::{integrate, integrate_half_line, QuadResult, QuadratureSpec};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerVariant {
    /// `xᵗ = (sin πt / π) ∫₀^∞ λ^(t−1) x/(λ+x) dλ`
    Resolvent,
    /// `xᵗ = (t sin πt / π) ∫₀^∞ λ^(t−1) log(1 + x/λ) dλ`
    Log,
}

impl std::str::FromStr for PowerVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "resolvent" => Ok(PowerVariant::Resolvent),
            "log" => Ok(PowerVariant::Log),
            other => Err(Error::ParamOutOfRange(format!(
                "variant must be `resolvent` or `log`, got `{other}`"
            ))),
        }
    }
}

/// `xᵗ` for `x > 0`, `0 < t < 1`, from one of its integral representations.
///
/// The half-line is split at `λ = 1`. On `(0, 1]` the substitution `λ = w^(1/t)`
/// absorbs the `λ^(t−1)` weight; on `[1, ∞)` the substitution
/// `λ = z^(−1/(1−t))` absorbs the algebraic decay. Both pieces have bounded
/// integrands (the log variant keeps an integrable `log w` at the origin).
pub fn power_integral(
    x: f64,
    t: f64,
    variant: PowerVariant,
    quad: &QuadratureSpec,
) -> Result<QuadResult> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::ParamOutOfRange(format!(
            "power_integral needs x>0, got {x}"
        )));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::ParamOutOfRange(format!(
            "power_integral needs 0<t<1, got {t}"
        )));
    }
    let head_exp = 1.0 / t;
    let tail_exp = 1.0 / (1.0 - t);
    let (head, tail) = match variant {
        PowerVariant::Resolvent => (
            integrate(|w| head_exp * x / (w.powf(head_exp) + x), 0.0, 1.0, quad)?,
            integrate(
                |z| tail_exp * x / (1.0 + x * z.powf(tail_exp)),
                0.0,
                1.0,
                quad,
            )?,
        ),
        PowerVariant::Log => (
            // log(1 + x·w^(−1/t)) = log(w^(1/t) + x) − log(w)/t
            integrate(
                |w| head_exp * ((w.powf(head_exp) + x).ln() - head_exp * w.ln()),
                0.0,
                1.0,
                quad,
            )?,
            integrate(
                |z| {
                    let w = z.powf(tail_exp);
                    if w == 0.0 {
                        tail_exp * x
                    } else {
                        tail_exp * (x * w).ln_1p() / w
                    }
                },
                0.0,
                1.0,
                quad,
            )?,
        ),
    };
    let prefactor = (PI * t).sin() / PI;
    let scale = match variant {
        PowerVariant::Resolvent => prefactor,
        PowerVariant::Log => t * prefactor,
    };
    Ok(QuadResult {
        value: scale * (head.value + tail.value),
        error_estimate: scale * (head.error_estimate + tail.error_estimate),
        evals: head.evals + tail.evals,
    })
}

/// `κ(x)` as `∫₀¹ (1 − x/(1+t) − t/(x+t)) dt + ∫₁^∞ ((x+1)/t − x/(1+t) − 1/(x+t)) dt`.
///
/// Both integrands are combined over common denominators,
/// `x(1−x)/((x+t)(1+t))` and `x/(t(1+t)) + x/(t(x+t))`, which avoids the
/// cancellation between `O(1/t)` terms in the tail.
pub fn kappa_integral(x: f64, quad: &QuadratureSpec) -> Result<QuadResult> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::ParamOutOfRange(format!(
            "kappa_integral needs x>=0, got {x}"
        )));
    }
    let head = integrate(|t| x * (1.0 - x) / ((x + t) * (1.0 + t)), 0.0, 1.0, quad)?;
    let tail = integrate_half_line(|t| x / (t * (1.0 + t)) + x / (t * (x + t)), 1.0, quad)?;
    Ok(QuadResult {
        value: head.value + tail.value,
        error_estimate: head.error_estimate + tail.error_estimate,
        evals: head.evals + tail.evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::catalog::kappa;

    #[test]
    fn power_examples() {
        let q = QuadratureSpec::default();
        for v in [PowerVariant::Resolvent, PowerVariant::Log] {
            assert!((power_integral(1.0, 0.5, v, &q).unwrap().value - 1.0).abs() <= 1e-6);
            assert!((power_integral(4.0, 0.5, v, &q).unwrap().value - 2.0).abs() <= 1e-6);
            let r = power_integral(0.1, 0.25, v, &q).unwrap().value;
            assert!((r - 0.1f64.powf(0.25)).abs() <= 1e-6);
        }
    }

    #[test]
    fn power_accuracy_grid() {
        let q = QuadratureSpec::default();
        for v in [PowerVariant::Resolvent, PowerVariant::Log] {
            for &x in &[0.1, 0.5, 1.0, 2.0, 4.0, 10.0] {
                for &t in &[0.1, 0.25, 0.5, 0.75, 0.9] {
                    let r = power_integral(x, t, v, &q).unwrap();
                    assert!(
                        (r.value - x.powf(t)).abs() <= 1e-6,
                        "{v:?} x={x} t={t}: {r:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn kappa_examples() {
        let q = QuadratureSpec::default();
        assert!(kappa_integral(0.0, &q).unwrap().value.abs() <= 1e-6);
        let one = kappa_integral(1.0, &q).unwrap().value;
        assert!((one - 2.0 * 2f64.ln()).abs() <= 1e-6);
        for i in 0..=40 {
            let x = i as f64 * 0.25;
            let r = kappa_integral(x, &q).unwrap().value;
            assert!((r - kappa(x)).abs() <= 1e-6, "x={x}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let q = QuadratureSpec::default();
        assert!(power_integral(0.0, 0.5, PowerVariant::Log, &q).is_err());
        assert!(power_integral(1.0, 1.0, PowerVariant::Log, &q).is_err());
        assert!(kappa_integral(-1.0, &q).is_err());
        let coarse = QuadratureSpec {
            order: 4,
            ..Default::default()
        };
        assert!(power_integral(1.0, 0.5, PowerVariant::Log, &coarse).is_err());
    }
}
