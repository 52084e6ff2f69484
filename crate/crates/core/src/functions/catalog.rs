use std::sync::Arc;

use super::scalar::{Domain, ScalarFn, SsaStatus};
use crate::error::{Error, Result};

/// Names accepted by [`catalog_get`].
pub const CATALOG: &[&str] = &[
    "log",
    "neg_inverse",
    "neg_square",
    "power",
    "neg_power",
    "kappa",
    "shifted_entropy",
    "f_p",
];

struct Entry {
    domain: Domain,
    status: SsaStatus,
    finite_at_zero: bool,
    text: String,
    value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    derivative: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    second: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

fn param(params: &[(&str, f64)], name: &str, key: &str) -> Result<f64> {
    for (k, _) in params {
        if *k != key {
            return Err(Error::ParamOutOfRange(format!(
                "`{name}` takes parameter `{key}`, got `{k}`"
            )));
        }
    }
    params
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::ParamOutOfRange(format!("`{name}` requires parameter `{key}`")))
}

fn no_params(params: &[(&str, f64)], name: &str) -> Result<()> {
    match params.first() {
        Some((k, _)) => Err(Error::ParamOutOfRange(format!(
            "`{name}` takes no parameters, got `{k}`"
        ))),
        None => Ok(()),
    }
}

/// Looks up a catalog function by name with its parameters.
///
/// | name | parameter | f(x) |
/// |------|-----------|------|
/// | `log` | | `log x` |
/// | `neg_inverse` | | `−1/x` |
/// | `neg_square` | | `−x²` |
/// | `power` | `0<t<1` | `xᵗ` |
/// | `neg_power` | `1≤t≤2` | `−xᵗ` |
/// | `kappa` | | `−x log x + (x+1) log(x+1)` |
/// | `shifted_entropy` | `c≥0` | `−(x+c) log(x+c)` |
/// | `f_p` | `0<p<1` | `p(1−p)(x−1)² / ((xᵖ−1)(x¹⁻ᵖ−1))` |
pub fn catalog_get(name: &str, params: &[(&str, f64)]) -> Result<ScalarFn> {
    let (entry, stored) = match name {
        "log" => {
            no_params(params, name)?;
            (
                Entry {
                    domain: Domain::Positive,
                    status: SsaStatus::ProvedSsa,
                    finite_at_zero: false,
                    text: "log(x)".into(),
                    value: Arc::new(f64::ln),
                    derivative: Arc::new(|x| 1.0 / x),
                    second: Arc::new(|x| -1.0 / (x * x)),
                },
                vec![],
            )
        }
        "neg_inverse" => {
            no_params(params, name)?;
            (
                Entry {
                    domain: Domain::Positive,
                    status: SsaStatus::FailsSsa,
                    finite_at_zero: false,
                    text: "-1/x".into(),
                    value: Arc::new(|x| -1.0 / x),
                    derivative: Arc::new(|x| 1.0 / (x * x)),
                    second: Arc::new(|x| -2.0 / (x * x * x)),
                },
                vec![],
            )
        }
        "neg_square" => {
            no_params(params, name)?;
            (
                Entry {
                    domain: Domain::NonNegative,
                    status: SsaStatus::ProvedSsa,
                    finite_at_zero: true,
                    text: "-x^2".into(),
                    value: Arc::new(|x| -x * x),
                    derivative: Arc::new(|x| -2.0 * x),
                    second: Arc::new(|_| -2.0),
                },
                vec![],
            )
        }
        "power" => {
            let t = param(params, name, "t")?;
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::ParamOutOfRange(format!(
                    "power needs 0<t<1, got t={t}"
                )));
            }
            (
                Entry {
                    domain: Domain::NonNegative,
                    status: SsaStatus::ProvedSsa,
                    finite_at_zero: true,
                    text: format!("x^{t}"),
                    value: Arc::new(move |x| x.powf(t)),
                    derivative: Arc::new(move |x| t * x.powf(t - 1.0)),
                    second: Arc::new(move |x| t * (t - 1.0) * x.powf(t - 2.0)),
                },
                vec![("t".to_string(), t)],
            )
        }
        "neg_power" => {
            let t = param(params, name, "t")?;
            if !(1.0..=2.0).contains(&t) {
                return Err(Error::ParamOutOfRange(format!(
                    "neg_power needs 1<=t<=2, got t={t}"
                )));
            }
            (
                Entry {
                    domain: Domain::NonNegative,
                    status: SsaStatus::ProvedSsa,
                    finite_at_zero: true,
                    text: format!("-x^{t}"),
                    value: Arc::new(move |x| -x.powf(t)),
                    derivative: Arc::new(move |x| -t * x.powf(t - 1.0)),
                    second: Arc::new(move |x| {
                        if t == 1.0 {
                            0.0
                        } else {
                            -t * (t - 1.0) * x.powf(t - 2.0)
                        }
                    }),
                },
                vec![("t".to_string(), t)],
            )
        }
        "kappa" => {
            no_params(params, name)?;
            (
                Entry {
                    domain: Domain::NonNegative,
                    status: SsaStatus::ProvedSsa,
                    finite_at_zero: true,
                    text: "-x*log(x)+(x+1)*log(x+1)".into(),
                    value: Arc::new(kappa),
                    derivative: Arc::new(|x| (1.0 / x).ln_1p()),
                    second: Arc::new(|x| -1.0 / (x * (x + 1.0))),
                },
                vec![],
            )
        }
        "shifted_entropy" => {
            let c = param(params, name, "c")?;
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::ParamOutOfRange(format!(
                    "shifted_entropy needs c>=0, got c={c}"
                )));
            }
            (
                Entry {
                    domain: Domain::NonNegative,
                    status: SsaStatus::ProvedSsa,
                    finite_at_zero: true,
                    text: format!("-(x+{c})*log(x+{c})"),
                    value: Arc::new(move |x| {
                        let y = x + c;
                        if y == 0.0 {
                            0.0
                        } else {
                            -y * y.ln()
                        }
                    }),
                    derivative: Arc::new(move |x| -(x + c).ln() - 1.0),
                    second: Arc::new(move |x| -1.0 / (x + c)),
                },
                vec![("c".to_string(), c)],
            )
        }
        "f_p" => {
            let p = param(params, name, "p")?;
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::ParamOutOfRange(format!(
                    "f_p needs 0<p<1, got p={p}"
                )));
            }
            let q = 1.0 - p;
            (
                Entry {
                    domain: Domain::NonNegative,
                    status: if p == 0.5 {
                        SsaStatus::ProvedSsa
                    } else {
                        SsaStatus::Conjectured
                    },
                    finite_at_zero: true,
                    text: format!("{p}*{q}*(x-1)^2/((x^{p}-1)*(x^{q}-1))"),
                    value: Arc::new(move |x| f_p_value(p, x)),
                    derivative: Arc::new(move |x| f_p_derivative(p, x)),
                    second: Arc::new(move |x| f_p_second(p, x)),
                },
                vec![("p".to_string(), p)],
            )
        }
        other => return Err(Error::UnknownFunction(other.to_string())),
    };
    Ok(ScalarFn {
        name: name.to_string(),
        params: stored,
        domain: entry.domain,
        value: entry.value,
        derivative: entry.derivative,
        second_derivative: entry.second,
        concave: true,
        finite_at_zero: entry.finite_at_zero,
        ssa_status: entry.status,
        text: Some(entry.text),
    })
}

/// `κ(x) = −x log x + (x+1) log(x+1)`, written as `x·log(1+1/x) + log(1+x)`
/// so that both terms stay accurate; `κ(0) = 0`.
pub fn kappa(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (1.0 / x).ln_1p() + x.ln_1p()
    }
}

// With x = eˢ, the family reads
//   f_p(x) = r(s)² / (r(ps)·r((1−p)s)),   r(z) = (eᶻ − 1)/z,
// which has no 0/0 at x = 1. Derivatives follow from
//   d/ds log r(z(s)) = z'(s)·σ(z),  σ(z) = 1/(1 − e⁻ᶻ) − 1/z.

/// `(eᶻ − 1)/z`, with value 1 at the origin.
fn expm1_ratio(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        z.exp_m1() / z
    }
}

// σ(z) = 1/2 + Σ B₂ₖ/(2k)! z^(2k−1)
const SIGMA_SERIES: [f64; 9] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / 5109094217170944000.0,
];

const SERIES_RADIUS: f64 = 0.5;

/// `σ(z) = d/dz log r(z)`.
fn sigma(z: f64) -> f64 {
    if z.abs() < SERIES_RADIUS {
        let z2 = z * z;
        let mut acc = 0.0;
        for c in SIGMA_SERIES.iter().rev() {
            acc = acc * z2 + c;
        }
        0.5 + z * acc
    } else {
        -1.0 / (-z).exp_m1() - 1.0 / z
    }
}

/// `σ'(z)`.
fn sigma_prime(z: f64) -> f64 {
    if z.abs() < SERIES_RADIUS {
        let z2 = z * z;
        let mut acc = 0.0;
        for (k, c) in SIGMA_SERIES.iter().enumerate().rev() {
            acc = acc * z2 + c * (2 * k + 1) as f64;
        }
        acc
    } else {
        let em = (-z).exp_m1();
        1.0 / (z * z) - (-z).exp() / (em * em)
    }
}

pub(crate) fn f_p_value(p: f64, x: f64) -> f64 {
    if x == 0.0 {
        return p * (1.0 - p);
    }
    let s = x.ln();
    let r = expm1_ratio(s);
    (r / expm1_ratio(p * s)) * (r / expm1_ratio((1.0 - p) * s))
}

/// `d log f_p / ds` and its s-derivative.
fn f_p_log_slopes(p: f64, s: f64) -> (f64, f64) {
    let q = 1.0 - p;
    let slope = 2.0 * sigma(s) - p * sigma(p * s) - q * sigma(q * s);
    let curv = 2.0 * sigma_prime(s) - p * p * sigma_prime(p * s) - q * q * sigma_prime(q * s);
    (slope, curv)
}

pub(crate) fn f_p_derivative(p: f64, x: f64) -> f64 {
    if x == 0.0 {
        return f64::INFINITY;
    }
    let (slope, _) = f_p_log_slopes(p, x.ln());
    f_p_value(p, x) * slope / x
}

pub(crate) fn f_p_second(p: f64, x: f64) -> f64 {
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    let (slope, curv) = f_p_log_slopes(p, x.ln());
    f_p_value(p, x) * (slope * slope - slope + curv) / (x * x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect()
    }

    fn all_entries() -> Vec<ScalarFn> {
        vec![
            catalog_get("log", &[]).unwrap(),
            catalog_get("neg_inverse", &[]).unwrap(),
            catalog_get("neg_square", &[]).unwrap(),
            catalog_get("power", &[("t", 0.25)]).unwrap(),
            catalog_get("power", &[("t", 0.5)]).unwrap(),
            catalog_get("neg_power", &[("t", 1.0)]).unwrap(),
            catalog_get("neg_power", &[("t", 1.5)]).unwrap(),
            catalog_get("neg_power", &[("t", 2.0)]).unwrap(),
            catalog_get("kappa", &[]).unwrap(),
            catalog_get("shifted_entropy", &[("c", 0.0)]).unwrap(),
            catalog_get("shifted_entropy", &[("c", 1.0)]).unwrap(),
            catalog_get("f_p", &[("p", 0.5)]).unwrap(),
            catalog_get("f_p", &[("p", 0.1)]).unwrap(),
            catalog_get("f_p", &[("p", 0.7)]).unwrap(),
        ]
    }

    #[test]
    fn lookup_examples() {
        let root = catalog_get("power", &[("t", 0.5)]).unwrap();
        assert_eq!(root.value(4.0), 2.0);
        let k = catalog_get("kappa", &[]).unwrap();
        assert_eq!(k.value(0.0), 0.0);
        let half = catalog_get("f_p", &[("p", 0.5)]).unwrap();
        assert_eq!(half.value(1.0), 1.0);
        assert_eq!(half.ssa_status(), SsaStatus::ProvedSsa);
        assert_eq!(
            catalog_get("f_p", &[("p", 0.3)]).unwrap().ssa_status(),
            SsaStatus::Conjectured
        );
        assert_eq!(
            catalog_get("neg_inverse", &[]).unwrap().ssa_status(),
            SsaStatus::FailsSsa
        );
    }

    #[test]
    fn lookup_errors() {
        assert!(matches!(
            catalog_get("sin", &[]),
            Err(Error::UnknownFunction(_))
        ));
        assert!(matches!(
            catalog_get("power", &[("t", 1.5)]),
            Err(Error::ParamOutOfRange(_))
        ));
        assert!(matches!(
            catalog_get("power", &[]),
            Err(Error::ParamOutOfRange(_))
        ));
        assert!(matches!(
            catalog_get("neg_power", &[("t", 0.5)]),
            Err(Error::ParamOutOfRange(_))
        ));
        assert!(matches!(
            catalog_get("shifted_entropy", &[("c", -1.0)]),
            Err(Error::ParamOutOfRange(_))
        ));
        assert!(matches!(
            catalog_get("f_p", &[("p", 1.0)]),
            Err(Error::ParamOutOfRange(_))
        ));
        assert!(matches!(
            catalog_get("log", &[("t", 1.0)]),
            Err(Error::ParamOutOfRange(_))
        ));
        assert!(matches!(
            catalog_get("power", &[("p", 0.5)]),
            Err(Error::ParamOutOfRange(_))
        ));
    }

    #[test]
    fn kappa_derivative_identity() {
        let k = catalog_get("kappa", &[]).unwrap();
        for x in log_grid(1e-3, 1e3, 50) {
            assert!((k.derivative(x) - (1.0 + 1.0 / x).ln()).abs() <= 1e-10);
            let direct = -x * x.ln() + (x + 1.0) * (x + 1.0).ln();
            assert!((k.value(x) - direct).abs() <= 1e-12 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn f_half_is_shifted_square_root_square() {
        // f_{1/2} = (√x + 1)² / 4, constant fixed by the limit at x = 1
        let f = catalog_get("f_p", &[("p", 0.5)]).unwrap();
        let mut xs = log_grid(1e-3, 1e3, 49);
        xs.push(1.0 + 1e-9);
        for x in xs {
            let expected = (x.sqrt() + 1.0).powi(2) / 4.0;
            assert!(
                (f.value(x) - expected).abs() <= 1e-10 * expected,
                "x={x}: {} vs {expected}",
                f.value(x)
            );
            let d_expected = (x.sqrt() + 1.0) / (4.0 * x.sqrt());
            assert!((f.derivative(x) - d_expected).abs() <= 1e-10 * d_expected);
            let dd_expected = -1.0 / (8.0 * x.powf(1.5));
            assert!((f.second_derivative(x) - dd_expected).abs() <= 1e-9 * dd_expected.abs());
        }
    }

    #[test]
    fn f_p_matches_naive_formula_away_from_one() {
        for &p in &[0.1, 0.3, 0.7, 0.9] {
            let f = catalog_get("f_p", &[("p", p)]).unwrap();
            for x in log_grid(1e-2, 1e2, 40) {
                if (x - 1.0).abs() < 0.05 {
                    continue;
                }
                let naive = p * (1.0 - p) * (x - 1.0).powi(2)
                    / ((x.powf(p) - 1.0) * (x.powf(1.0 - p) - 1.0));
                assert!((f.value(x) - naive).abs() <= 1e-12 * naive);
            }
            // continuous through the removable singularity
            let near = [1.0 - 1e-6, 1.0, 1.0 + 1e-6];
            let vals: Vec<f64> = near.iter().map(|&x| f.value(x)).collect();
            assert!((vals[0] - vals[1]).abs() < 1e-6 && (vals[2] - vals[1]).abs() < 1e-6);
            assert_eq!(f.value(1.0), 1.0);
            assert_eq!(f.value(0.0), p * (1.0 - p));
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for f in all_entries() {
            for x in log_grid(1e-2, 1e2, 20) {
                let h = 1e-5 * x;
                let fd = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
                let d = f.derivative(x);
                assert!(
                    (fd - d).abs() <= 1e-6 * d.abs().max(1.0),
                    "{} at {x}: {d} vs {fd}",
                    f.name()
                );
                let fd2 = (f.derivative(x + h) - f.derivative(x - h)) / (2.0 * h);
                let dd = f.second_derivative(x);
                assert!(
                    (fd2 - dd).abs() <= 1e-5 * dd.abs().max(1.0),
                    "{} f'' at {x}: {dd} vs {fd2}",
                    f.name()
                );
            }
        }
    }

    #[test]
    fn finite_at_zero_flag_is_consistent() {
        for f in all_entries() {
            let at_zero = f.eval_clamped(0.0, 0.0);
            assert_eq!(at_zero.is_ok(), f.finite_at_zero(), "{}", f.name());
        }
    }

    #[test]
    fn proved_entries_are_midpoint_concave() {
        use rand_chacha::rand_core::{RngCore, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut uniform = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        for f in all_entries() {
            if f.ssa_status() != SsaStatus::ProvedSsa {
                continue;
            }
            assert!(f.concave());
            for _ in 0..200 {
                let a = 1e-3 * 1e6f64.powf(uniform());
                let b = 1e-3 * 1e6f64.powf(uniform());
                let mid = f.value(0.5 * (a + b));
                let chord = 0.5 * (f.value(a) + f.value(b));
                assert!(
                    mid >= chord - 1e-12 * chord.abs().max(1.0),
                    "{} at {a},{b}",
                    f.name()
                );
            }
        }
    }
}
