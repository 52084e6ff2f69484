use std::cell::Cell;

use crate::error::{Error, Result};

/// Settings for adaptive composite Gauss–Legendre integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss–Legendre nodes per panel; at least 16.
    pub order: usize,
    /// Target for the summed bisection error estimate, relative to
    /// `max(1, |integral|)`.
    pub tol: f64,
    /// Budget on integrand evaluations.
    pub max_evals: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            order: 16,
            tol: 1e-8,
            max_evals: 1 << 14,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evals: usize,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for Pₙ(x) and Pₙ₋₁(x)
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

struct Panel {
    a: f64,
    b: f64,
    /// Sum of the two half-panel rules.
    fine: f64,
    left: f64,
    right: f64,
    err: f64,
}

/// Adaptive bisection on `[a, b]`.
///
/// Every panel carries a one-panel rule and the sum of its two halves; their
/// difference is the panel's error estimate. The panel with the largest
/// estimate is bisected until the summed estimates fall below
/// `tol · max(1, |I|)`. Nodes never touch the endpoints, so integrable endpoint
/// singularities are allowed.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    if spec.order < 16 {
        return Err(Error::ParamOutOfRange(format!(
            "quadrature needs at least 16 nodes per panel, got {}",
            spec.order
        )));
    }
    let (nodes, weights) = gauss_legendre(spec.order);
    let evals = Cell::new(0usize);
    let mut rule = |lo: f64, hi: f64| -> Result<f64> {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut s = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            let v = f(mid + half * x);
            if !v.is_finite() {
                return Err(Error::Quadrature(format!(
                    "integrand is not finite at {}",
                    mid + half * x
                )));
            }
            s += w * v;
        }
        evals.set(evals.get() + nodes.len());
        Ok(s * half)
    };

    let mk = |a: f64, b: f64, coarse: f64, rule: &mut dyn FnMut(f64, f64) -> Result<f64>| {
        let m = 0.5 * (a + b);
        let left = rule(a, m)?;
        let right = rule(m, b)?;
        Ok::<Panel, Error>(Panel {
            a,
            b,
            fine: left + right,
            left,
            right,
            err: (left + right - coarse).abs(),
        })
    };

    let whole = rule(a, b)?;
    let mut panels = vec![mk(a, b, whole, &mut rule)?];
    loop {
        let total: f64 = panels.iter().map(|p| p.fine).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        if err <= spec.tol * total.abs().max(1.0) {
            return Ok(QuadResult {
                value: total,
                error_estimate: err,
                evals: evals.get(),
            });
        }
        if evals.get() + 4 * spec.order > spec.max_evals {
            return Err(Error::Quadrature(format!(
                "error estimate {err:e} above tolerance after {} evaluations",
                evals.get()
            )));
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x.err.total_cmp(&y.err))
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        if (p.b - p.a) <= 64.0 * f64::EPSILON * p.a.abs().max(p.b.abs()) {
            return Err(Error::Quadrature(format!(
                "panel [{}, {}] cannot be bisected further",
                p.a, p.b
            )));
        }
        panels.push(mk(p.a, m, p.left, &mut rule)?);
        panels.push(mk(m, p.b, p.right, &mut rule)?);
    }
}

/// `∫_lower^∞ f(λ) dλ` via `λ = lower + u/(1−u)`, `u ∈ (0, 1)`.
pub fn integrate_half_line(
    f: impl Fn(f64) -> f64,
    lower: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    integrate(
        |u| {
            let w = 1.0 - u;
            f(lower + u / w) / (w * w)
        },
        0.0,
        1.0,
        spec,
    )
}
