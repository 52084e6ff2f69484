//! The strong subadditivity gap
//! `Tr f(B) + Tr f(C) − Tr f(A) − Tr f(A₂₂)` for a three-block split of `A`,
//! with `B` and `C` the leading and trailing two-block compressions, plus
//! equality diagnostics.

mod structure;

use std::collections::BTreeMap;

use serde::Serialize;

pub use structure::{
    detect_structure, diagnose, log_equality_residual, stone_weierstrass_check,
    EqualityDiagnostics, KrylovStructure, DEFAULT_STRUCTURE_TOL, MAX_POLY_DEGREE,
};

use crate::error::{Error, Result};
use crate::functions::ScalarFn;
use crate::matcore::{
    compress_b, compress_c, project_form, trace_f, Partition, Projector, SymMatrix,
};

/// Default relative tolerance for the holds/equality verdicts.
pub const DEFAULT_TOL_REL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// Traces of the compressed blocks, each at its own dimension.
    Compressed,
    /// Traces of `P·A·P` at full dimension; needs `f(0)` finite.
    Projected,
}

impl std::str::FromStr for Form {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "compressed" => Ok(Form::Compressed),
            "projected" => Ok(Form::Projected),
            other => Err(Error::ParamOutOfRange(format!(
                "form must be `compressed` or `projected`, got `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Traces {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "A22")]
    pub a22: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

impl Traces {
    /// `(B + C) − A − A₂₂`, always evaluated in this order.
    pub fn gap(&self) -> f64 {
        (self.b + self.c) - self.a - self.a22
    }

    fn abs_sum(&self) -> f64 {
        self.a.abs() + self.a22.abs() + self.b.abs() + self.c.abs()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SsaReport {
    pub function: String,
    pub params: BTreeMap<String, f64>,
    pub dim: usize,
    pub partition: [usize; 3],
    pub form: Form,
    pub gap: f64,
    pub traces: Traces,
    pub holds: bool,
    pub equality: bool,
    /// Absolute tolerance the verdicts used.
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<EqualityDiagnostics>,
}

impl SsaReport {
    /// Attaches equality diagnostics computed at `tol`.
    pub fn with_diagnostics(mut self, a: &SymMatrix, p: &Partition, tol: f64) -> Result<Self> {
        self.diagnostics = Some(diagnose(a, p, tol)?);
        Ok(self)
    }
}

/// The four traces for `f` in the given form.
pub fn ssa_traces(f: &ScalarFn, a: &SymMatrix, p: &Partition, form: Form) -> Result<Traces> {
    p.check(a)?;
    match form {
        Form::Compressed => Ok(Traces {
            a: trace_f(f, a)?,
            a22: trace_f(f, &a.principal(p.range2()))?,
            b: trace_f(f, &compress_b(a, p)?)?,
            c: trace_f(f, &compress_c(a, p)?)?,
        }),
        Form::Projected => {
            if !f.finite_at_zero() {
                return Err(Error::domain(
                    0.0,
                    format!(
                        "the projected form needs `{}` finite at 0; use the compressed form",
                        f.name()
                    ),
                ));
            }
            Ok(Traces {
                a: trace_f(f, a)?,
                a22: trace_f(f, &project_form(a, p, Projector::P2)?)?,
                b: trace_f(f, &project_form(a, p, Projector::P12)?)?,
                c: trace_f(f, &project_form(a, p, Projector::P23)?)?,
            })
        }
    }
}

/// Evaluates the gap and the holds/equality verdicts at
/// `tol = tol_rel · max(1, Σ|traces|)`.
pub fn ssa_gap(
    f: &ScalarFn,
    a: &SymMatrix,
    p: &Partition,
    form: Form,
    tol_rel: f64,
) -> Result<SsaReport> {
    let traces = ssa_traces(f, a, p, form)?;
    let gap = traces.gap();
    let tol = tol_rel * traces.abs_sum().max(1.0);
    let function = match f.text() {
        Some(t) if f.name() == "expr" => t.to_string(),
        _ => f.name().to_string(),
    };
    Ok(SsaReport {
        function,
        params: f.params().iter().cloned().collect(),
        dim: a.dim(),
        partition: p.as_array(),
        form,
        gap,
        traces,
        holds: gap >= -tol,
        equality: gap.abs() <= tol,
        tol,
        diagnostics: None,
    })
}

/// `log det` from a Cholesky factor, `2 Σ log Lᵢᵢ`. This shares nothing with
/// the eigenvalue path behind `Tr log`, so the two can check each other.
fn log_det(a: &SymMatrix, what: &str) -> Result<f64> {
    let l = a
        .as_mat()
        .cholesky()
        .map_err(|_| Error::domain(f64::NAN, format!("{what} is singular or indefinite")))?;
    let diag_min = (0..a.dim()).fold(f64::INFINITY, |m, i| m.min(l[(i, i)]));
    if diag_min <= 1e-8 * a.max_abs().sqrt() {
        return Err(Error::domain(
            diag_min * diag_min,
            format!("{what} is numerically singular"),
        ));
    }
    Ok((0..a.dim()).fold(0.0, |acc, i| acc + 2.0 * l[(i, i)].ln()))
}

/// `log det B + log det C − log det A − log det A₂₂`.
pub fn gap_log_det(a: &SymMatrix, p: &Partition) -> Result<f64> {
    p.check(a)?;
    let lb = log_det(&compress_b(a, p)?, "B")?;
    let lc = log_det(&compress_c(a, p)?, "C")?;
    let la = log_det(a, "A")?;
    let l22 = log_det(&a.principal(p.range2()), "A22")?;
    Ok((lb + lc) - la - l22)
}

/// Frobenius scale `max(1, ‖A‖_F)` used for absolute tolerances.
pub fn scale(a: &SymMatrix) -> f64 {
    a.frobenius().max(1.0)
}
