use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Named heavy and intermediate tails that have no parametric family here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinTail {
    /// Tail `1 / (1 + x^2)`.
    InvQuadratic,
    /// Tail `1 / (ln(1 + x) + 1)`.
    InvLog,
    /// Tail `exp(-ln(1 + x)^2)`.
    ExpLogSquared,
}

impl BuiltinTail {
    pub fn name(self) -> &'static str {
        match self {
            BuiltinTail::InvQuadratic => "inv_quadratic",
            BuiltinTail::InvLog => "inv_log",
            BuiltinTail::ExpLogSquared => "exp_log_squared",
        }
    }
}

/// One lifetime law on `[0, inf)`.
///
/// Rates enter every family as `lambda * x`, so the Weibull tail is
/// `exp(-(scale * x)^shape)` and the Gamma tail is
/// `exp(-rate x) * sum_{l < shape} (rate x)^l / l!`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    Exponential {
        rate: f64,
    },
    Weibull {
        shape: f64,
        scale: f64,
    },
    GammaInt {
        shape: u32,
        rate: f64,
    },
    /// `(1 - e^{-rate x})^shape`.
    GenExponential {
        shape: f64,
        rate: f64,
    },
    /// Density `k (x - (left + right)/2)^2` on `[left, right]`.
    UQuadratic {
        left: f64,
        right: f64,
    },
    /// cdf `F_base(x)^exponent`.
    PowerOf {
        base: Box<DistributionSpec>,
        exponent: f64,
    },
    /// tail `(1 - F_base(x))^exponent`.
    TailPowerOf {
        base: Box<DistributionSpec>,
        exponent: f64,
    },
    Builtin {
        name: BuiltinTail,
    },
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Validation(format!("{field} must be a positive finite number, got {v}")))
    }
}

impl DistributionSpec {
    pub fn exponential(rate: f64) -> Self {
        DistributionSpec::Exponential { rate }
    }

    pub fn weibull(shape: f64, scale: f64) -> Self {
        DistributionSpec::Weibull { shape, scale }
    }

    pub fn gamma_int(shape: u32, rate: f64) -> Self {
        DistributionSpec::GammaInt { shape, rate }
    }

    pub fn gen_exponential(shape: f64, rate: f64) -> Self {
        DistributionSpec::GenExponential { shape, rate }
    }

    pub fn u_quadratic(left: f64, right: f64) -> Self {
        DistributionSpec::UQuadratic { left, right }
    }

    pub fn power_of(base: DistributionSpec, exponent: f64) -> Self {
        DistributionSpec::PowerOf { base: Box::new(base), exponent }
    }

    pub fn tail_power_of(base: DistributionSpec, exponent: f64) -> Self {
        DistributionSpec::TailPowerOf { base: Box::new(base), exponent }
    }

    pub fn builtin(name: BuiltinTail) -> Self {
        DistributionSpec::Builtin { name }
    }

    pub fn validate(&self) -> Result<()> {
        use DistributionSpec::*;
        match self {
            Exponential { rate } => positive("rate", *rate),
            Weibull { shape, scale } => {
                positive("shape", *shape)?;
                positive("scale", *scale)
            }
            GammaInt { shape, rate } => {
                if *shape == 0 {
                    return Err(Error::Validation("gamma_int shape must be >= 1".into()));
                }
                positive("rate", *rate)
            }
            GenExponential { shape, rate } => {
                positive("shape", *shape)?;
                positive("rate", *rate)
            }
            UQuadratic { left, right } => {
                if left.is_finite() && right.is_finite() && *left >= 0.0 && right > left {
                    Ok(())
                } else {
                    Err(Error::Validation(format!("u_quadratic needs 0 <= left < right, got [{left}, {right}]")))
                }
            }
            PowerOf { base, exponent } | TailPowerOf { base, exponent } => {
                positive("exponent", *exponent)?;
                base.validate()
            }
            Builtin { .. } => Ok(()),
        }
    }

    /// Parses and validates a distribution document.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let spec: DistributionSpec =
            serde_json::from_value(value.clone()).map_err(|e| Error::schema("distribution", e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn family(&self) -> &'static str {
        use DistributionSpec::*;
        match self {
            Exponential { .. } => "exponential",
            Weibull { .. } => "weibull",
            GammaInt { .. } => "gamma_int",
            GenExponential { .. } => "gen_exponential",
            UQuadratic { .. } => "u_quadratic",
            PowerOf { .. } => "power_of",
            TailPowerOf { .. } => "tail_power_of",
            Builtin { .. } => "builtin",
        }
    }

    /// True for laws whose tail is a finite sum of `N x^p e^{-(lambda x)^alpha}` terms.
    pub fn is_exponential_type(&self) -> bool {
        use DistributionSpec::*;
        match self {
            Exponential { .. } | Weibull { .. } | GammaInt { .. } | GenExponential { .. } => true,
            PowerOf { base, .. } | TailPowerOf { base, .. } => base.is_exponential_type(),
            UQuadratic { .. } | Builtin { .. } => false,
        }
    }

    /// Law of `k X`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        positive("scale factor", k)?;
        use DistributionSpec::*;
        Ok(match self {
            Exponential { rate } => Exponential { rate: rate / k },
            Weibull { shape, scale } => Weibull { shape: *shape, scale: scale / k },
            GammaInt { shape, rate } => GammaInt { shape: *shape, rate: rate / k },
            GenExponential { shape, rate } => GenExponential { shape: *shape, rate: rate / k },
            UQuadratic { left, right } => UQuadratic { left: left * k, right: right * k },
            PowerOf { base, exponent } => PowerOf { base: Box::new(base.scaled(k)?), exponent: *exponent },
            TailPowerOf { base, exponent } => TailPowerOf { base: Box::new(base.scaled(k)?), exponent: *exponent },
            Builtin { name } => {
                return Err(Error::Validation(format!("builtin tail {} has no scale parameter", name.name())))
            }
        })
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DistributionSpec::*;
        match self {
            Exponential { rate } => write!(f, "Exp({rate})"),
            Weibull { shape, scale } => write!(f, "Weibull({shape}, {scale})"),
            GammaInt { shape, rate } => write!(f, "Gamma({shape}, {rate})"),
            GenExponential { shape, rate } => write!(f, "GE({shape}, {rate})"),
            UQuadratic { left, right } => write!(f, "UQuadratic[{left}, {right}]"),
            PowerOf { base, exponent } => write!(f, "({base})^{exponent}"),
            TailPowerOf { base, exponent } => write!(f, "tail({base})^{exponent}"),
            Builtin { name } => f.write_str(name.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn documents_round_trip() {
        let s = DistributionSpec::power_of(DistributionSpec::weibull(2.0, 1.0), 3.0);
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["family"], "power_of");
        assert_eq!(v["base"]["family"], "weibull");
        assert_eq!(DistributionSpec::from_json(&v).unwrap(), s);
    }

    #[test]
    fn missing_field_is_named() {
        let err = DistributionSpec::from_json(&json!({"family": "weibull", "shape": 2.0})).unwrap_err();
        assert!(err.to_string().contains("scale"), "{err}");
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(DistributionSpec::exponential(0.0).validate().is_err());
        assert!(DistributionSpec::gamma_int(0, 1.0).validate().is_err());
        assert!(DistributionSpec::u_quadratic(2.0, 2.0).validate().is_err());
        assert!(DistributionSpec::u_quadratic(-1.0, 2.0).validate().is_err());
        assert!(DistributionSpec::power_of(DistributionSpec::exponential(1.0), -1.0).validate().is_err());
        assert!(DistributionSpec::power_of(DistributionSpec::exponential(-1.0), 2.0).validate().is_err());
    }

    #[test]
    fn builtin_document() {
        let s = DistributionSpec::from_json(&json!({"family": "builtin", "name": "inv_log"})).unwrap();
        assert_eq!(s, DistributionSpec::builtin(BuiltinTail::InvLog));
        assert!(DistributionSpec::from_json(&json!({"family": "builtin", "name": "nope"})).is_err());
    }
}
