//! Single lifetime laws: specification, evaluators, ageing and scale classes.

mod ageing;
mod eval;
mod scale;
mod spec;

pub use ageing::{
    classify_failure_rate, default_ageing_grid, AgeingClass, AgeingLabel, AGEING_GRID_POINTS, AGEING_TOLERANCE,
};
pub use scale::{canonical, scale_equivalent};
pub use spec::{BuiltinTail, DistributionSpec};

use crate::error::Result;
use crate::lifetime::{Functional, Lifetime};

/// Validates `spec` and evaluates one functional at `x`.
pub fn evaluate(spec: &DistributionSpec, x: f64, functional: Functional) -> Result<f64> {
    spec.validate()?;
    spec.evaluate(x, functional)
}

/// Validates `spec` and returns its `p`-quantile.
pub fn quantile(spec: &DistributionSpec, p: f64) -> Result<f64> {
    spec.validate()?;
    spec.quantile(p)
}
