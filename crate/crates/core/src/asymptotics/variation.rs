//! Tail variation classes: slow, regular, rapid and exponentially rapid.
//!
//! Parametric families are tagged from their leading tail term. Anything else
//! is classified from ratio limits at `lambda = 2` and `lambda = 1/2`; the shift
//! probe can only refute exponential rapid variation, never confirm it.

use serde::{Deserialize, Serialize};

use super::limits::{erpv_probe, variation_ratio_limit, LimitEstimate, LimitValue, ProbeSequence};
use crate::lifetime::Lifetime;
use crate::systems::{leading_asymptote, SystemSpec};

/// Indices within this distance of zero are read as slow variation.
pub const SLOW_INDEX_BAND: f64 = 0.05;
/// The two one-sided index estimates must agree to this much.
pub const INDEX_AGREEMENT: f64 = 0.1;
pub const SHIFT_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VariationLabel {
    #[serde(rename = "sv")]
    SlowlyVarying,
    #[serde(rename = "rv")]
    RegularlyVarying,
    #[serde(rename = "rpv_minus_inf")]
    RapidlyVaryingMinusInf,
    #[serde(rename = "erpv_minus_inf")]
    ErpvMinusInf,
    #[serde(rename = "unknown")]
    Unknown,
}

impl VariationLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            VariationLabel::SlowlyVarying => "sv",
            VariationLabel::RegularlyVarying => "rv",
            VariationLabel::RapidlyVaryingMinusInf => "rpv_minus_inf",
            VariationLabel::ErpvMinusInf => "erpv_minus_inf",
            VariationLabel::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariationOrigin {
    Analytic,
    Numeric,
}

impl VariationOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            VariationOrigin::Analytic => "analytic",
            VariationOrigin::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationClass {
    pub label: VariationLabel,
    pub origin: VariationOrigin,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uncertainty: Option<f64>,
    /// `Some(false)` once a shift probe has refuted exponential rapid
    /// variation; `Some(true)` only for analytic tags.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub erpv: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<LimitEstimate>,
}

impl VariationClass {
    fn bare(label: VariationLabel, origin: VariationOrigin) -> Self {
        VariationClass { label, origin, index: None, uncertainty: None, erpv: None, probe: None }
    }

    pub fn is_rapidly_varying(&self) -> bool {
        matches!(self.label, VariationLabel::RapidlyVaryingMinusInf | VariationLabel::ErpvMinusInf)
    }

    pub fn is_erpv(&self) -> bool {
        self.label == VariationLabel::ErpvMinusInf
    }
}

/// Analytic tag when the system has an exponential-type leading term,
/// otherwise the numeric classification of its tail.
pub fn classify_variation(sys: &SystemSpec) -> VariationClass {
    if sys.is_exponential_type() {
        if let Ok(lead) = leading_asymptote(sys) {
            if lead.alpha >= 1.0 {
                let mut c = VariationClass::bare(VariationLabel::ErpvMinusInf, VariationOrigin::Analytic);
                c.erpv = Some(true);
                return c;
            }
            // e^{-(lambda x)^alpha} with alpha < 1 is flattened by unit shifts
            let mut c = VariationClass::bare(VariationLabel::RapidlyVaryingMinusInf, VariationOrigin::Analytic);
            c.erpv = Some(false);
            c.probe = erpv_probe(sys, 1.0, &ProbeSequence::default()).ok();
            return c;
        }
    }
    classify_tail(sys)
}

/// Numeric classification from ratio limits.
pub fn classify_tail(law: &dyn Lifetime) -> VariationClass {
    let seq = ProbeSequence::default();
    let unknown = VariationClass::bare(VariationLabel::Unknown, VariationOrigin::Numeric);
    let (Ok(up), Ok(down)) = (variation_ratio_limit(law, 2.0, &seq), variation_ratio_limit(law, 0.5, &seq)) else {
        return unknown;
    };
    match (up.value, down.value) {
        (LimitValue::Zero, LimitValue::Infinite) => {
            let mut c = VariationClass::bare(VariationLabel::RapidlyVaryingMinusInf, VariationOrigin::Numeric);
            if let Ok(p) = erpv_probe(law, 1.0, &seq) {
                if p.is_one(SHIFT_TOLERANCE) {
                    c.erpv = Some(false);
                }
                c.probe = Some(p);
            }
            c
        }
        (LimitValue::Finite(ru), LimitValue::Finite(rd)) if up.converged && down.converged && ru > 0.0 && rd > 0.0 => {
            let rho_up = ru.ln() / std::f64::consts::LN_2;
            let rho_down = -rd.ln() / std::f64::consts::LN_2;
            let spread = (rho_up - rho_down).abs();
            if spread > INDEX_AGREEMENT {
                return unknown;
            }
            let index = 0.5 * (rho_up + rho_down);
            let label = if index.abs() <= SLOW_INDEX_BAND {
                VariationLabel::SlowlyVarying
            } else {
                VariationLabel::RegularlyVarying
            };
            let mut c = VariationClass::bare(label, VariationOrigin::Numeric);
            c.index = Some(index);
            c.uncertainty = Some(0.5 * spread);
            c
        }
        _ => unknown,
    }
}
