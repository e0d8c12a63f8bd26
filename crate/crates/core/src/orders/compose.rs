use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lifetime::Lifetime;

/// `h(x) = tail_Y^{-1}(tail_X(x))`.
///
/// Inverts through `ln F` on the lower half of `X` and through `ln(1 - F)`
/// on the upper half, so both ends keep full relative precision.
pub fn quantile_compose(x_law: &dyn Lifetime, y_law: &dyn Lifetime, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("composition point must be >= 0, got {x}")));
    }
    if x <= x_law.support().0 {
        return Ok(y_law.support().0);
    }
    let lc = x_law.log_cdf(x);
    if lc <= -LN_2 {
        y_law.quantile_from_log_cdf(lc)
    } else {
        y_law.quantile_from_log_tail(x_law.log_tail(x))
    }
}

/// `h` at every point, in order.
pub fn sample_composition(x_law: &dyn Lifetime, y_law: &dyn Lifetime, points: &[f64]) -> Result<Vec<f64>> {
    points.par_iter().map(|&t| quantile_compose(x_law, y_law, t)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeMode {
    /// Second differences of `h`.
    Convex,
    /// Monotonicity of `h(x) / x`.
    Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeResult {
    Holds,
    HoldsReversed,
    Neither,
    Inconclusive,
}

pub const MIN_SHAPE_POINTS: usize = 64;

fn trend(values: &[f64], tolerance: f64) -> ShapeResult {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = tolerance * scale;
    let (mut up, mut down) = (false, false);
    for w in values.windows(2) {
        let d = w[1] - w[0];
        up |= d > tol;
        down |= d < -tol;
    }
    match (up, down) {
        (true, true) => ShapeResult::Neither,
        (false, true) => ShapeResult::HoldsReversed,
        _ => ShapeResult::Holds,
    }
}

/// Classifies sampled `h` as convex / concave (or star-shaped / anti) with a
/// tolerance relative to the largest slope (or ratio) magnitude.
pub fn shape_probe(points: &[f64], h: &[f64], mode: ShapeMode, tolerance: f64) -> Result<ShapeResult> {
    if points.len() < MIN_SHAPE_POINTS || points.len() != h.len() {
        return Err(Error::Config(format!(
            "shape probe needs at least {MIN_SHAPE_POINTS} points with matching values, got {} and {}",
            points.len(),
            h.len()
        )));
    }
    if points.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config("shape probe grid must be strictly increasing".into()));
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Ok(ShapeResult::Inconclusive);
    }
    let series: Vec<f64> = match mode {
        ShapeMode::Convex => points.windows(2).zip(h.windows(2)).map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0])).collect(),
        ShapeMode::Star => points.iter().zip(h).filter(|(x, _)| **x > 0.0).map(|(x, y)| y / x).collect(),
    };
    Ok(trend(&series, tolerance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distcore::DistributionSpec;
    use crate::grid::GridSpec;

    #[test]
    fn identity_and_rate_ratio() {
        let x = DistributionSpec::exponential(2.0);
        let y = DistributionSpec::exponential(1.0);
        for t in [0.0, 1e-6, 0.3, 1.0, 40.0, 300.0] {
            assert!((quantile_compose(&x, &x, t).unwrap() - t).abs() <= 1e-12 * t.max(1.0));
            assert!((quantile_compose(&x, &y, t).unwrap() - 2.0 * t).abs() <= 1e-12 * t.max(1.0));
        }
    }

    #[test]
    fn weibull_parallel_constant() {
        let w = DistributionSpec::weibull(2.0, 1.0);
        let x = DistributionSpec::power_of(w.clone(), 2.0);
        let h = quantile_compose(&x, &w, 1.0).unwrap();
        assert!((h - 0.7142267668).abs() < 1e-9, "{h}");
    }

    #[test]
    fn shapes() {
        let g = GridSpec::linear(0.01, 3.0, 200).points();
        let sq: Vec<f64> = g.iter().map(|x| x * x).collect();
        assert_eq!(shape_probe(&g, &sq, ShapeMode::Convex, 1e-9).unwrap(), ShapeResult::Holds);
        let rt: Vec<f64> = g.iter().map(|x| x.sqrt()).collect();
        assert_eq!(shape_probe(&g, &rt, ShapeMode::Star, 1e-9).unwrap(), ShapeResult::HoldsReversed);
        assert!(shape_probe(&g[..10], &rt[..10], ShapeMode::Star, 1e-9).is_err());
    }
}
