//! Comparability decisions for pairs of systems.
//!
//! The cheap structural and asymptotic routes run first; the sign-pattern
//! sweep is the fallback whenever a shortcut does not apply.

use serde::{Deserialize, Serialize};

use super::limits::{tail_ratio_limit, LimitEstimate, LimitValue, ProbeSequence};
use super::line::{asymptotic_line, line_verdict, linearity_defect, LineConfig, LineVerdict, LinearAsymptote};
use super::variation::{classify_variation, VariationClass};
use crate::error::Result;
use crate::evidence::{Evidence, EvidenceKind};
use crate::lifetime::Lifetime;
use crate::orders::{convex_order_test, quantile_compose, star_order_test, ConvexRelation, SweepConfig};
use crate::systems::{leading_asymptote, system_scale_equivalent, SystemSpec, TailLeadingTerm};

const MATCH_TOLERANCE: f64 = 1e-9;
const BULK_QUANTILES: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecideConfig {
    pub sweep: SweepConfig,
    pub line: LineConfig,
    pub probe: ProbeSequence,
    /// Distance from 1 tolerated in the tail-ratio limit.
    pub ratio_tolerance: f64,
    /// Relative departure from the fitted line below which `h` counts as linear.
    pub linearity_tolerance: f64,
}

impl Default for DecideConfig {
    fn default() -> Self {
        DecideConfig {
            sweep: SweepConfig::default(),
            line: LineConfig::default(),
            probe: ProbeSequence::default(),
            ratio_tolerance: 1e-3,
            linearity_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    ConvexLe,
    ConvexGe,
    /// Not comparable in the convex order, but `X <=_* Y`.
    StarLe,
    StarGe,
    ScaleEquivalent,
    NonComparable,
    Inconclusive,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::ConvexLe => "convex_le",
            Relation::ConvexGe => "convex_ge",
            Relation::StarLe => "star_le",
            Relation::StarGe => "star_ge",
            Relation::ScaleEquivalent => "scale_equivalent",
            Relation::NonComparable => "non_comparable",
            Relation::Inconclusive => "inconclusive",
        }
    }

    /// The label seen from the other argument.
    pub fn swapped(self) -> Self {
        match self {
            Relation::ConvexLe => Relation::ConvexGe,
            Relation::ConvexGe => Relation::ConvexLe,
            Relation::StarLe => Relation::StarGe,
            Relation::StarGe => Relation::StarLe,
            other => other,
        }
    }

    pub fn is_decisive(self) -> bool {
        self != Relation::Inconclusive
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    ScaleEquivalence,
    TailRatio,
    AsymptoticLine,
    Sweep,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub lhs_leading: Option<TailLeadingTerm>,
    pub rhs_leading: Option<TailLeadingTerm>,
    pub lhs_variation: Option<VariationClass>,
    pub rhs_variation: Option<VariationClass>,
    pub tail_ratio: Option<LimitEstimate>,
    pub line: Option<LinearAsymptote>,
    pub line_verdict: Option<LineVerdict>,
    pub linearity_defect: Option<f64>,
    /// Why each skipped shortcut did not apply.
    pub refusals: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonVerdict {
    pub relation: Relation,
    pub candidate_c: Option<f64>,
    pub scale_factor: Option<f64>,
    pub route: Route,
    pub evidence: Vec<Evidence>,
    pub diagnostics: Diagnostics,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= MATCH_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// `lambda_X / lambda_Y` when the leading terms of `X(x)` and `Y(c x)`
/// coincide; otherwise the reason they do not.
pub fn matched_candidate(lhs: &TailLeadingTerm, rhs: &TailLeadingTerm) -> std::result::Result<f64, String> {
    if !close(lhs.alpha, rhs.alpha) {
        return Err(format!("leading shapes differ: {} vs {}", lhs.alpha, rhs.alpha));
    }
    if !close(lhs.degree, rhs.degree) {
        return Err(format!("leading polynomial degrees differ: {} vs {}", lhs.degree, rhs.degree));
    }
    let c = lhs.rate / rhs.rate;
    let r = rhs.rescaled(c);
    if !close(lhs.coefficient, r.coefficient) {
        return Err(format!(
            "leading coefficients differ after rescaling by {c}: {} vs {}",
            lhs.coefficient, r.coefficient
        ));
    }
    let same_lower = lhs.lower_order.len() == r.lower_order.len()
        && lhs.lower_order.iter().zip(&r.lower_order).all(|(p, q)| close(p.alpha, q.alpha) && close(p.kappa, q.kappa));
    if !same_lower {
        return Err("lower-order exponents differ".into());
    }
    Ok(c)
}

pub fn decide_comparability(x: &SystemSpec, y: &SystemSpec, cfg: &DecideConfig) -> Result<ComparisonVerdict> {
    x.validate()?;
    y.validate()?;
    cfg.sweep.validate()?;
    cfg.line.validate()?;
    cfg.probe.validate()?;

    let mut evidence = Vec::new();
    let mut diag = Diagnostics::default();

    if let Some(k) = system_scale_equivalent(x, y) {
        evidence.push(Evidence::new(EvidenceKind::ScaleFactor { k }, format!("lhs(x) has the law of rhs({k} x)")));
        return Ok(ComparisonVerdict {
            relation: Relation::ScaleEquivalent,
            candidate_c: None,
            scale_factor: Some(k),
            route: Route::ScaleEquivalence,
            evidence,
            diagnostics: diag,
        });
    }

    let candidate = asymptotic_candidate(x, y, &mut diag, &mut evidence);
    if let Some(c) = candidate {
        if let Some(v) = asymptotic_route(x, y, c, cfg, &mut diag, &mut evidence)? {
            return Ok(ComparisonVerdict {
                relation: v.0,
                candidate_c: Some(c),
                scale_factor: None,
                route: v.1,
                evidence,
                diagnostics: diag,
            });
        }
    }

    let relation = sweep_route(x, y, cfg, &mut evidence)?;
    Ok(ComparisonVerdict {
        relation,
        candidate_c: candidate,
        scale_factor: None,
        route: Route::Sweep,
        evidence,
        diagnostics: diag,
    })
}

fn asymptotic_candidate(
    x: &SystemSpec,
    y: &SystemSpec,
    diag: &mut Diagnostics,
    evidence: &mut Vec<Evidence>,
) -> Option<f64> {
    let (lx, ly) = match (leading_asymptote(x), leading_asymptote(y)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            diag.refusals.push(format!("no leading tail term: {e}"));
            return None;
        }
    };
    evidence.push(Evidence::new(
        EvidenceKind::LeadingTerms {
            lhs: serde_json::to_value(&lx).unwrap_or_default(),
            rhs: serde_json::to_value(&ly).unwrap_or_default(),
        },
        "dominant tail terms N x^p exp(-(lambda x)^alpha)",
    ));
    let out = match matched_candidate(&lx, &ly) {
        Ok(c) => Some(c),
        Err(why) => {
            diag.refusals.push(why);
            None
        }
    };
    diag.lhs_leading = Some(lx);
    diag.rhs_leading = Some(ly);
    out
}

/// Tail-ratio and line routes at the matched scale `c`. `None` hands over to
/// the sweep.
fn asymptotic_route(
    x: &SystemSpec,
    y: &SystemSpec,
    c: f64,
    cfg: &DecideConfig,
    diag: &mut Diagnostics,
    evidence: &mut Vec<Evidence>,
) -> Result<Option<(Relation, Route)>> {
    let vx = classify_variation(x);
    let vy = classify_variation(y);
    for (side, v) in [("lhs", &vx), ("rhs", &vy)] {
        evidence.push(Evidence::new(
            EvidenceKind::VariationTag {
                side: side.into(),
                class: v.label.as_str().into(),
                origin: v.origin.as_str().into(),
            },
            format!("{side} tail class"),
        ));
    }
    let both_erpv = vx.is_erpv() && vy.is_erpv();
    let both_rapid = vx.is_rapidly_varying() && vy.is_rapidly_varying();
    diag.lhs_variation = Some(vx);
    diag.rhs_variation = Some(vy);

    let ratio = tail_ratio_limit(x, y, c, &cfg.probe)?;
    let ratio_one = ratio.is_one(cfg.ratio_tolerance);
    evidence.push(Evidence::new(
        EvidenceKind::TailRatio {
            c,
            limit: match ratio.value {
                LimitValue::Finite(v) => Some(v),
                LimitValue::Zero => Some(0.0),
                LimitValue::Infinite => None,
            },
            converged: ratio.converged,
        },
        format!("lim tail_X(x) / tail_Y({c} x)"),
    ));
    diag.tail_ratio = Some(ratio);

    if !both_rapid {
        diag.refusals.push("tails are not both rapidly varying".into());
        return Ok(None);
    }
    if !ratio_one {
        diag.refusals.push(format!("tail ratio at c = {c} does not tend to 1"));
        return Ok(None);
    }

    let h = |t: f64| quantile_compose(x, y, t);
    let line = asymptotic_line(h, &cfg.line)?;
    let bulk: Vec<f64> = BULK_QUANTILES.iter().map(|&p| x.quantile(p)).collect::<Result<_>>()?;
    let defect = linearity_defect(h, &line, &bulk)?;
    let verdict = line_verdict(&line, defect <= cfg.linearity_tolerance, cfg.line.intercept_tolerance);
    let slope_ok = (line.slope - c).abs() <= cfg.ratio_tolerance * c.max(1.0);
    evidence.push(Evidence::new(
        EvidenceKind::AsymptoticLine {
            slope: line.slope,
            intercept: line.intercept,
            converged: line.converged,
            verdict: verdict.as_str().into(),
        },
        format!("h(x) - b x tends to the intercept; expected slope {c}"),
    ));
    diag.line = Some(line);
    diag.line_verdict = Some(verdict);
    diag.linearity_defect = Some(defect);

    let line_agrees = verdict == LineVerdict::NeitherConvexNorConcave && slope_ok;
    if both_erpv {
        if verdict != LineVerdict::Inconclusive && !line_agrees {
            diag.refusals.push("asymptotic line contradicts the tail ratio".into());
            return Ok(Some((Relation::Inconclusive, Route::TailRatio)));
        }
        return Ok(Some((Relation::NonComparable, Route::TailRatio)));
    }
    if line_agrees {
        return Ok(Some((Relation::NonComparable, Route::AsymptoticLine)));
    }
    diag.refusals
        .push(format!("tails are not exponentially rapidly varying and the line verdict is {}", verdict.as_str()));
    Ok(None)
}

fn sweep_route(x: &SystemSpec, y: &SystemSpec, cfg: &DecideConfig, evidence: &mut Vec<Evidence>) -> Result<Relation> {
    let convex = convex_order_test(x, y, &cfg.sweep, true)?;
    evidence.extend(convex.forward.evidence("convex", "forward"));
    evidence.extend(convex.reverse.evidence("convex", "reverse"));
    Ok(match convex.relation {
        ConvexRelation::Le => Relation::ConvexLe,
        ConvexRelation::Ge => Relation::ConvexGe,
        // no structural scale factor was found, so a clean sweep both ways is not a proof
        ConvexRelation::BothHold => Relation::Inconclusive,
        ConvexRelation::NonComparable => {
            let fwd = star_order_test(x, y, &cfg.sweep)?;
            let rev = star_order_test(y, x, &cfg.sweep)?;
            evidence.extend(fwd.evidence("star", "forward"));
            evidence.extend(rev.evidence("star", "reverse"));
            match (fwd.holds, rev.holds) {
                (true, false) => Relation::StarLe,
                (false, true) => Relation::StarGe,
                _ => Relation::NonComparable,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distcore::DistributionSpec;

    fn exps(r: &[f64]) -> SystemSpec {
        SystemSpec::parallel(r.iter().map(|&v| DistributionSpec::exponential(v)))
    }

    #[test]
    fn exponential_max_pair() {
        let v = decide_comparability(&exps(&[1.0, 2.0, 3.0]), &exps(&[1.5, 2.5]), &DecideConfig::default()).unwrap();
        assert_eq!(v.relation, Relation::NonComparable);
        assert_eq!(v.route, Route::TailRatio);
        assert!((v.candidate_c.unwrap() - 1.0 / 1.5).abs() < 1e-12);
        let line = v.diagnostics.line.unwrap();
        assert!((line.slope - 1.0 / 1.5).abs() < 1e-3 && line.intercept.abs() < 1e-3);
    }

    #[test]
    fn scaled_copy_is_equivalent() {
        let x = exps(&[1.0, 2.0]);
        let v = decide_comparability(&x, &x.scaled(3.0).unwrap(), &DecideConfig::default()).unwrap();
        assert_eq!(v.relation, Relation::ScaleEquivalent);
        assert!((v.scale_factor.unwrap() - 3.0).abs() < 1e-12 || (v.scale_factor.unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_coefficients_refuse_shortcut() {
        let a = TailLeadingTerm { coefficient: 2.0, rate: 1.0, alpha: 1.0, degree: 0.0, lower_order: vec![] };
        let b = TailLeadingTerm { coefficient: 1.0, rate: 2.0, alpha: 1.0, degree: 0.0, lower_order: vec![] };
        assert!(matched_candidate(&a, &b).is_err());
        let b = TailLeadingTerm { coefficient: 2.0, rate: 2.0, alpha: 2.0, degree: 0.0, lower_order: vec![] };
        assert!(matched_candidate(&a, &b).is_err());
        let b = TailLeadingTerm { coefficient: 2.0, rate: 2.0, alpha: 1.0, degree: 0.0, lower_order: vec![] };
        assert_eq!(matched_candidate(&a, &b), Ok(0.5));
    }
}
