use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::lifetime::Lifetime;

/// Points in the default failure-rate grid.
pub const AGEING_GRID_POINTS: usize = 512;
/// Default relative tolerance on successive failure-rate differences.
pub const AGEING_TOLERANCE: f64 = 1e-9;
/// Fraction of the probed range kept away from each support endpoint.
pub const ENDPOINT_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AgeingLabel {
    #[serde(rename = "IFR")]
    Ifr,
    #[serde(rename = "DFR")]
    Dfr,
    #[serde(rename = "constant_fr")]
    ConstantFr,
    #[serde(rename = "non_monotone_fr")]
    NonMonotoneFr,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgeingClass {
    pub label: AgeingLabel,
    pub grid: GridSpec,
    /// Relative tolerance, scaled by `max |r|` on the grid.
    pub tolerance: f64,
    pub min_rate: f64,
    pub max_rate: f64,
}

/// Linear grid over the support, trimmed by [`ENDPOINT_MARGIN`] at both ends.
/// Unbounded supports are cut at the `1 - 1e-12` quantile.
pub fn default_ageing_grid<M: Lifetime + ?Sized>(model: &M) -> Result<GridSpec> {
    let (lo, hi) = model.support();
    let top = if hi.is_finite() { hi } else { model.quantile(1.0 - 1e-12)? };
    let margin = ENDPOINT_MARGIN * (top - lo);
    Ok(GridSpec::linear(lo + margin, top - margin, AGEING_GRID_POINTS))
}

pub fn classify_failure_rate<M: Lifetime + ?Sized>(model: &M, grid: &GridSpec, tolerance: f64) -> Result<AgeingClass> {
    grid.validate()?;
    if !(tolerance > 0.0) {
        return Err(Error::Config(format!("tolerance must be > 0, got {tolerance}")));
    }
    let (lo, hi) = model.support();
    if grid.lo < lo || grid.hi > hi {
        return Err(Error::Domain(format!("grid [{}, {}] leaves the support [{lo}, {hi}]", grid.lo, grid.hi)));
    }
    let rates = grid.points().into_iter().map(|x| model.failure_rate(x)).collect::<Result<Vec<f64>>>()?;
    let min_rate = rates.iter().copied().fold(f64::INFINITY, f64::min);
    let max_rate = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut class = AgeingClass { label: AgeingLabel::Inconclusive, grid: *grid, tolerance, min_rate, max_rate };
    if rates.iter().any(|r| !r.is_finite()) {
        return Ok(class);
    }
    let scale = rates.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let tol = tolerance * scale;
    let (mut up, mut down) = (false, false);
    for w in rates.windows(2) {
        let d = w[1] - w[0];
        up |= d > tol;
        down |= d < -tol;
    }
    class.label = match (up, down) {
        (true, true) => AgeingLabel::NonMonotoneFr,
        (true, false) => AgeingLabel::Ifr,
        (false, true) => AgeingLabel::Dfr,
        (false, false) => {
            if max_rate - min_rate <= tol {
                AgeingLabel::ConstantFr
            } else if rates[rates.len() - 1] > rates[0] {
                AgeingLabel::Ifr
            } else {
                AgeingLabel::Dfr
            }
        }
    };
    Ok(class)
}
