use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Domain of a scalar function: the closed or open positive half-line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Domain {
    /// `[0, ∞)`
    #[serde(rename = "[0,inf)")]
    NonNegative,
    /// `(0, ∞)`
    #[serde(rename = "(0,inf)")]
    Positive,
}

impl Domain {
    pub fn contains(&self, x: f64) -> bool {
        match self {
            Domain::NonNegative => x >= 0.0,
            Domain::Positive => x > 0.0,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::NonNegative => f.write_str("[0,inf)"),
            Domain::Positive => f.write_str("(0,inf)"),
        }
    }
}

impl std::str::FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace(' ', "").as_str() {
            "[0,inf)" | "[0,∞)" => Ok(Domain::NonNegative),
            "(0,inf)" | "(0,∞)" => Ok(Domain::Positive),
            other => Err(Error::ParamOutOfRange(format!(
                "domain must be \"(0,inf)\" or \"[0,inf)\", got `{other}`"
            ))),
        }
    }
}

/// Known status of the trace inequality for a function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SsaStatus {
    ProvedSsa,
    FailsSsa,
    Conjectured,
    Unknown,
}

/// A real function on the positive half-line with its first two derivatives
/// and metadata.
#[derive(Clone)]
pub struct ScalarFn {
    pub(crate) name: String,
    pub(crate) params: Vec<(String, f64)>,
    pub(crate) domain: Domain,
    pub(crate) value: RealFn,
    pub(crate) derivative: RealFn,
    pub(crate) second_derivative: RealFn,
    pub(crate) concave: bool,
    pub(crate) finite_at_zero: bool,
    pub(crate) ssa_status: SsaStatus,
    pub(crate) text: Option<String>,
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFn")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("domain", &self.domain)
            .field("concave", &self.concave)
            .field("finite_at_zero", &self.finite_at_zero)
            .field("ssa_status", &self.ssa_status)
            .finish()
    }
}

impl ScalarFn {
    /// A user-supplied function. Metadata defaults to non-concave, unknown
    /// status; finiteness at zero follows the domain.
    pub fn custom(
        name: impl Into<String>,
        domain: Domain,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
        second_derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ScalarFn {
            name: name.into(),
            params: Vec::new(),
            domain,
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            second_derivative: Arc::new(second_derivative),
            concave: false,
            finite_at_zero: domain == Domain::NonNegative,
            ssa_status: SsaStatus::Unknown,
            text: None,
        }
    }

    pub fn with_concave(mut self, concave: bool) -> Self {
        self.concave = concave;
        self
    }

    pub fn with_status(mut self, status: SsaStatus) -> Self {
        self.ssa_status = status;
        self
    }

    pub fn with_params(mut self, params: Vec<(String, f64)>) -> Self {
        self.params = params;
        self
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = Some(text.into());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn concave(&self) -> bool {
        self.concave
    }

    pub fn finite_at_zero(&self) -> bool {
        self.finite_at_zero
    }

    pub fn ssa_status(&self) -> SsaStatus {
        self.ssa_status
    }

    /// Expression-grammar form of the function, when it has one.
    pub fn text(&self) -> Option<&str> {
        self.text.as_deref()
    }

    /// `name[:k=v,...]`, the form accepted by [`parse_function`](super::parse_function).
    pub fn spec_string(&self) -> String {
        if self.params.is_empty() {
            self.name.clone()
        } else {
            let ps: Vec<String> = self
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            format!("{}:{}", self.name, ps.join(","))
        }
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        (self.derivative)(x)
    }

    #[inline]
    pub fn second_derivative(&self, x: f64) -> f64 {
        (self.second_derivative)(x)
    }

    /// Evaluates at an eigenvalue, clamping values within `tol` below the
    /// domain boundary onto it when the function is finite there.
    pub fn eval_clamped(&self, x: f64, tol: f64) -> Result<f64> {
        let arg = if self.domain.contains(x) {
            x
        } else if self.domain == Domain::NonNegative && self.finite_at_zero && x >= -tol {
            0.0
        } else {
            return Err(Error::domain(
                x,
                format!(
                    "eigenvalue outside the domain {} of `{}`",
                    self.domain, self.name
                ),
            ));
        };
        let v = self.value(arg);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::domain(
                x,
                format!("`{}` is not finite at this eigenvalue", self.name),
            ))
        }
    }
}
