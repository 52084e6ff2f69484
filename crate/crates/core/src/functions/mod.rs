//! Scalar functions on the positive half-line: the built-in catalog, the
//! `name[:key=value,...]` naming grammar, and quadrature evaluators for the
//! integral representations of `xᵗ` and `κ`.

mod catalog;
mod integrals;
mod quadrature;
mod scalar;

pub use catalog::{catalog_get, kappa, CATALOG};
pub use integrals::{kappa_integral, power_integral, PowerVariant};
pub use quadrature::{gauss_legendre, integrate, integrate_half_line, QuadResult, QuadratureSpec};
pub use scalar::{Domain, RealFn, ScalarFn, SsaStatus};

use crate::error::{Error, Result};

/// Splits `name[:key=value,...]` into the name and its parameters.
pub fn parse_fn_spec(spec: &str) -> Result<(String, Vec<(String, f64)>)> {
    let spec = spec.trim();
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n.trim(), Some(r)),
        None => (spec, None),
    };
    if name.is_empty() {
        return Err(Error::UnknownFunction(spec.to_string()));
    }
    let mut params = Vec::new();
    if let Some(rest) = rest {
        for kv in rest.split(',') {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::ParamOutOfRange(format!("expected key=value, got `{kv}`")))?;
            let v: f64 = v.trim().parse().map_err(|_| {
                Error::ParamOutOfRange(format!("invalid number `{}` for `{}`", v.trim(), k.trim()))
            })?;
            params.push((k.trim().to_string(), v));
        }
    }
    Ok((name.to_string(), params))
}

/// Resolves a catalog function from its `name[:key=value,...]` string.
pub fn parse_function(spec: &str) -> Result<ScalarFn> {
    let (name, params) = parse_fn_spec(spec)?;
    let borrowed: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    catalog_get(&name, &borrowed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn naming_grammar() {
        let f = parse_function("power:t=0.5").unwrap();
        assert_eq!(f.name(), "power");
        assert_eq!(f.param("t"), Some(0.5));
        assert_eq!(f.spec_string(), "power:t=0.5");
        assert_eq!(parse_function("f_p:p=0.3").unwrap().param("p"), Some(0.3));
        assert_eq!(
            parse_function("shifted_entropy:c=1").unwrap().param("c"),
            Some(1.0)
        );
        assert_eq!(parse_function(" kappa ").unwrap().name(), "kappa");
        assert!(matches!(
            parse_function("power:t"),
            Err(Error::ParamOutOfRange(_))
        ));
        assert!(matches!(
            parse_function("power:t=abc"),
            Err(Error::ParamOutOfRange(_))
        ));
        assert!(matches!(parse_function(""), Err(Error::UnknownFunction(_))));
        assert!(matches!(
            parse_function("nope"),
            Err(Error::UnknownFunction(_))
        ));
    }

    #[test]
    fn every_catalog_name_resolves() {
        let sample = |name: &str| match name {
            "power" => "power:t=0.5".to_string(),
            "neg_power" => "neg_power:t=1.5".to_string(),
            "shifted_entropy" => "shifted_entropy:c=0".to_string(),
            "f_p" => "f_p:p=0.5".to_string(),
            other => other.to_string(),
        };
        for name in CATALOG {
            let f = parse_function(&sample(name)).unwrap();
            assert_eq!(f.name(), *name);
            assert_eq!(parse_function(&f.spec_string()).unwrap().name(), *name);
        }
    }
}
