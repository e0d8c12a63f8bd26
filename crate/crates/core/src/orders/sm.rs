use serde::Serialize;

use crate::distcore::{default_ageing_grid, DistributionSpec};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::lifetime::Lifetime;
use crate::logspace::log_neg_log1mexp;

/// A one-parameter family `F_alpha`.
pub enum SmFamily {
    /// `F_alpha = F_base^alpha`.
    Power { base: DistributionSpec },
    /// `F_lambda(x) = F_base(lambda x)`.
    Scale { base: DistributionSpec },
    /// Any family; `d/d alpha` by central differences.
    Custom(Box<dyn Fn(f64) -> DistributionSpec + Send + Sync>),
}

impl SmFamily {
    pub fn member(&self, alpha: f64) -> Result<DistributionSpec> {
        let d = match self {
            SmFamily::Power { base } => DistributionSpec::power_of(base.clone(), alpha),
            SmFamily::Scale { base } => base.scaled(1.0 / alpha)?,
            SmFamily::Custom(f) => f(alpha),
        };
        d.validate()?;
        Ok(d)
    }

    pub fn label(&self) -> String {
        match self {
            SmFamily::Power { base } => format!("power family of {base}"),
            SmFamily::Scale { base } => format!("scale family of {base}"),
            SmFamily::Custom(_) => "custom family".into(),
        }
    }
}

/// `D(alpha, x) = (d F_alpha / d alpha)(x) / (x f_alpha(x))`.
pub fn saunders_moran_d(family: &SmFamily, alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Validation(format!("family parameter must be positive, got {alpha}")));
    }
    if !(x > 0.0) {
        return Err(Error::Domain(format!("D needs x > 0, got {x}")));
    }
    match family {
        SmFamily::Scale { .. } => Ok(1.0 / alpha),
        SmFamily::Power { base } => {
            // D = F ln F / (alpha x f) for the base law
            let lc = base.log_cdf(x);
            if lc == 0.0 {
                return Ok(0.0);
            }
            if lc == f64::NEG_INFINITY {
                return Err(Error::Domain(format!("x = {x} lies below the support")));
            }
            let lp = base.log_pdf(x);
            if lp == f64::NEG_INFINITY {
                return Err(Error::SingularPoint { x });
            }
            let lt = base.log_tail(x);
            let l_neg_lc = if lt < -0.7 { log_neg_log1mexp(lt) } else { (-lc).ln() };
            Ok(-(lc + l_neg_lc - alpha.ln() - x.ln() - lp).exp())
        }
        SmFamily::Custom(_) => {
            let member = family.member(alpha)?;
            let lp = member.log_pdf(x);
            if lp == f64::NEG_INFINITY {
                return Err(Error::SingularPoint { x });
            }
            let step = 1e-5 * alpha.max(1.0);
            let lo = family.member(alpha - step.min(0.5 * alpha))?;
            let hi = family.member(alpha + step)?;
            let dalpha = (hi.cdf(x) - lo.cdf(x)) / (step + step.min(0.5 * alpha));
            Ok(dalpha / (x * lp.exp()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
    NonMonotone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SmRelation {
    /// `F_{alpha1} <=_* F_{alpha2}`.
    FirstStarLeSecond,
    /// `F_{alpha2} <=_* F_{alpha1}`.
    SecondStarLeFirst,
    Equivalent,
    NonComparableInStar,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmVerdict {
    pub relation: SmRelation,
    pub monotonicity: [Monotonicity; 2],
    pub grid: GridSpec,
    pub tolerance: f64,
}

const SM_TOLERANCE: f64 = 1e-9;

fn monotonicity(values: &[f64], tol: f64) -> Monotonicity {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = tol * scale;
    let (mut up, mut down) = (false, false);
    for w in values.windows(2) {
        let d = w[1] - w[0];
        up |= d > cut;
        down |= d < -cut;
    }
    match (up, down) {
        (true, true) => Monotonicity::NonMonotone,
        (true, false) => Monotonicity::Increasing,
        (false, true) => Monotonicity::Decreasing,
        (false, false) => Monotonicity::Constant,
    }
}

/// Orders `F_{alpha1}` and `F_{alpha2}` in the star order from the shape of
/// `D(alpha, .)`: increasing `D` puts the larger parameter below, decreasing
/// `D` the smaller one. `grid` defaults to the failure-rate grid of
/// `F_{alpha1}`.
pub fn sm_order_test(family: &SmFamily, alpha1: f64, alpha2: f64, grid: Option<GridSpec>) -> Result<SmVerdict> {
    if alpha1 == alpha2 {
        return Err(Error::Validation("the two family parameters must differ".into()));
    }
    let grid = match grid {
        Some(g) => g,
        None => default_ageing_grid(&family.member(alpha1)?)?,
    };
    grid.validate()?;
    let pts = grid.points();
    let mono = |alpha: f64| -> Result<Monotonicity> {
        let d = pts.iter().map(|&x| saunders_moran_d(family, alpha, x)).collect::<Result<Vec<_>>>()?;
        if d.iter().any(|v| !v.is_finite()) {
            return Ok(Monotonicity::NonMonotone);
        }
        Ok(monotonicity(&d, SM_TOLERANCE))
    };
    let m = [mono(alpha1)?, mono(alpha2)?];
    let relation = match m {
        [Monotonicity::Constant, Monotonicity::Constant] => SmRelation::Equivalent,
        [a, b] if a == b && a != Monotonicity::NonMonotone => {
            // increasing D: the family falls in the star order as alpha grows
            let larger_first = alpha1 > alpha2;
            match (a == Monotonicity::Increasing, larger_first) {
                (true, true) | (false, false) => SmRelation::FirstStarLeSecond,
                _ => SmRelation::SecondStarLeFirst,
            }
        }
        _ => SmRelation::NonComparableInStar,
    };
    Ok(SmVerdict { relation, monotonicity: m, grid, tolerance: SM_TOLERANCE })
}
