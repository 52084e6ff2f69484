//! User-supplied scalar functions: a small expression grammar in `x`, an
//! evaluator generic over the number type, and forward-mode derivatives via
//! dual numbers.
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = primary [ "^" unary ] ;          (* exponent must not contain x *)
//! primary = number | "x" | func "(" expr ")" | "(" expr ")" ;
//! func    = "log" | "exp" | "sqrt" ;
//! number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
//! ```

mod dual;
mod parser;

use std::sync::Arc;

pub use dual::{Dual, DualNumber, Scalar};
pub use parser::{parse_expr, BinaryOp, Expr, UnaryOp};

use crate::error::{Error, Result};
use crate::functions::{Domain, ScalarFn};

fn eval_generic<T: Scalar>(e: &Expr, x: T) -> Result<T> {
    Ok(match e {
        Expr::Const(c) => T::constant(*c),
        Expr::Var => x,
        Expr::Unary(op, a) => {
            let v = eval_generic(a, x)?;
            match op {
                UnaryOp::Neg => -v,
                UnaryOp::Exp => v.exp(),
                UnaryOp::Log => {
                    if !(v.real() > 0.0) {
                        return Err(Error::domain(
                            v.real(),
                            format!("log of a nonpositive argument in `{e}`"),
                        ));
                    }
                    v.ln()
                }
                UnaryOp::Sqrt => {
                    if !(v.real() >= 0.0) {
                        return Err(Error::domain(
                            v.real(),
                            format!("square root of a negative argument in `{e}`"),
                        ));
                    }
                    v.sqrt()
                }
            }
        }
        Expr::Binary(op, a, b) => {
            let l = eval_generic(a, x)?;
            if *op == BinaryOp::Pow {
                let c = eval_generic::<f64>(b, 0.0)?;
                let base = l.real();
                if base < 0.0 && c.fract() != 0.0 {
                    return Err(Error::domain(
                        base,
                        format!("non-integer power of a negative base in `{e}`"),
                    ));
                }
                if base == 0.0 && c < 0.0 {
                    return Err(Error::domain(
                        base,
                        format!("negative power of zero in `{e}`"),
                    ));
                }
                return Ok(l.powf(c));
            }
            let r = eval_generic(b, x)?;
            match op {
                BinaryOp::Add => l + r,
                BinaryOp::Sub => l - r,
                BinaryOp::Mul => l * r,
                BinaryOp::Div => {
                    if r.real() == 0.0 {
                        return Err(Error::domain(0.0, format!("division by zero in `{e}`")));
                    }
                    l / r
                }
                BinaryOp::Pow => unreachable!(),
            }
        }
    })
}

pub fn eval_expr(e: &Expr, x: f64) -> Result<f64> {
    eval_generic(e, x)
}

/// Value and first derivative at `x`.
pub fn eval_dual(e: &Expr, x: f64) -> Result<DualNumber> {
    eval_generic(e, DualNumber::variable(x))
}

/// Value, first and second derivative at `x`.
pub fn eval_second(e: &Expr, x: f64) -> Result<(f64, f64, f64)> {
    let seed = Dual::new(DualNumber::variable(x), DualNumber::new(1.0, 0.0));
    let r = eval_generic(e, seed)?;
    Ok((r.value.value, r.value.deriv, r.deriv.deriv))
}

const PROBES: usize = 50;

/// The points an expression is validated on: log-spaced over `[1e-3, 1e3]`,
/// with `0` replacing the first point on a closed domain.
pub fn probe_points(domain: Domain) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..PROBES)
        .map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / (PROBES - 1) as f64))
        .collect();
    if domain == Domain::NonNegative {
        pts[0] = 0.0;
    }
    pts
}

/// Wraps a parsed expression as a [`ScalarFn`].
///
/// The expression must evaluate to a finite value at every probe point.
/// Concavity is probed with the midpoint inequality over all probe pairs.
pub fn to_scalar_fn(e: &Expr, domain: Domain) -> Result<ScalarFn> {
    let pts = probe_points(domain);
    let mut values = Vec::with_capacity(pts.len());
    let mut failing = Vec::new();
    for &x in &pts {
        match eval_expr(e, x) {
            Ok(v) if v.is_finite() => values.push(v),
            _ => failing.push(x),
        }
    }
    if !failing.is_empty() {
        let listed: Vec<String> = failing.iter().map(|x| format!("{x:e}")).collect();
        return Err(Error::domain(
            failing[0],
            format!(
                "`{e}` is undefined or not finite on {domain} at {}",
                listed.join(", ")
            ),
        ));
    }

    let mut concave = true;
    'pairs: for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let mid = eval_expr(e, 0.5 * (pts[i] + pts[j]));
            let chord = 0.5 * (values[i] + values[j]);
            let slack = 1e-10 * values[i].abs().max(values[j].abs()).max(1.0);
            match mid {
                Ok(m) if m >= chord - slack => {}
                _ => {
                    concave = false;
                    break 'pairs;
                }
            }
        }
    }

    let ast = Arc::new(e.clone());
    let (a0, a1, a2) = (ast.clone(), ast.clone(), ast);
    Ok(ScalarFn::custom(
        "expr",
        domain,
        move |x| eval_expr(&a0, x).unwrap_or(f64::NAN),
        move |x| eval_dual(&a1, x).map_or(f64::NAN, |d| d.deriv),
        move |x| eval_second(&a2, x).map_or(f64::NAN, |r| r.2),
    )
    .with_concave(concave)
    .with_text(e.to_string()))
}

/// Parses `text` and wraps it as a [`ScalarFn`] on `domain`.
pub fn parse_scalar_fn(text: &str, domain: Domain) -> Result<ScalarFn> {
    let e = parse_expr(text)?;
    let f = to_scalar_fn(&e, domain)?;
    Ok(f.with_text(text.trim()))
}
