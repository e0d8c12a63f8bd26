//! Oblique asymptotes of quantile compositions and the density sandwich.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::lifetime::Lifetime;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineConfig {
    pub x0: f64,
    pub x_max: f64,
    /// Bound on the last residuals for the fit to count as converged.
    pub tolerance: f64,
    /// Intercepts within this distance of zero are read as zero.
    pub intercept_tolerance: f64,
}

impl Default for LineConfig {
    fn default() -> Self {
        LineConfig { x0: 1.0, x_max: 1e6, tolerance: 1e-4, intercept_tolerance: 1e-3 }
    }
}

impl LineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.x0 > 0.0 && self.x_max >= 16.0 * self.x0 && self.x_max.is_finite()) {
            return Err(Error::Config(format!(
                "line probe needs 0 < x0 and x_max >= 16 x0, got x0 = {}, x_max = {}",
                self.x0, self.x_max
            )));
        }
        if !(self.tolerance > 0.0 && self.intercept_tolerance > 0.0) {
            return Err(Error::Config("line tolerances must be positive".into()));
        }
        Ok(())
    }

    fn points(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut x = self.x0;
        while 2.0 * x <= self.x_max {
            out.push(x);
            x *= 2.0;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearAsymptote {
    pub slope: f64,
    pub intercept: f64,
    pub converged: bool,
    pub points: Vec<f64>,
    /// Successive intercept increments `|c_j - c_{j-1}|`, zeroed below the
    /// rounding floor of `h`.
    pub residuals: Vec<f64>,
    pub tolerance: f64,
}

/// Fits `h(x) ~ b x + c` from secants `(h(2x) - h(x)) / x` along `x0 2^j`.
///
/// The intercept is read at the start of the final run of rounding-level
/// increments, where `h(x) - b x` carries the least cancellation error.
pub fn asymptotic_line(h: impl Fn(f64) -> Result<f64>, cfg: &LineConfig) -> Result<LinearAsymptote> {
    cfg.validate()?;
    let xs = cfg.points();
    let mut hx = Vec::with_capacity(xs.len() + 1);
    for &x in &xs {
        hx.push(h(x)?);
    }
    let top = 2.0 * xs[xs.len() - 1];
    hx.push(h(top)?);

    let slopes: Vec<f64> = (0..xs.len()).map(|j| (hx[j + 1] - hx[j]) / xs[j]).collect();
    let slope = slopes[slopes.len() - 1];
    let intercepts: Vec<f64> = xs.iter().zip(&hx).map(|(&x, &v)| v - slope * x).collect();
    let floor = |j: usize| 64.0 * f64::EPSILON * (hx[j].abs() + (slope * xs[j]).abs() + 1.0);

    let mut residuals = vec![f64::INFINITY];
    for j in 1..xs.len() {
        let d = (intercepts[j] - intercepts[j - 1]).abs();
        residuals.push(if d <= floor(j) { 0.0 } else { d });
    }

    let mut start = intercepts.len() - 1;
    while start > 0 && residuals[start] == 0.0 {
        start -= 1;
    }
    let intercept = intercepts[start];

    let n = residuals.len();
    let last = &residuals[n - 3..];
    let slope_settled = (slopes[n - 1] - slopes[n - 2]).abs() <= cfg.tolerance;
    let converged = slope_settled
        && last.iter().all(|r| r.is_finite() && *r <= cfg.tolerance)
        && last[0] >= last[1]
        && last[1] >= last[2];

    Ok(LinearAsymptote { slope, intercept, converged, points: xs, residuals, tolerance: cfg.tolerance })
}

/// Largest relative gap `|h(x) - (b x + c)| / (1 + |b x + c|)` over `points`.
pub fn linearity_defect(h: impl Fn(f64) -> Result<f64>, line: &LinearAsymptote, points: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &x in points {
        let l = line.slope * x + line.intercept;
        worst = worst.max((h(x)? - l).abs() / (1.0 + l.abs()));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineVerdict {
    NotConvex,
    NotConcave,
    NeitherConvexNorConcave,
    Inconclusive,
}

impl LineVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            LineVerdict::NotConvex => "not_convex",
            LineVerdict::NotConcave => "not_concave",
            LineVerdict::NeitherConvexNorConcave => "neither_convex_nor_concave",
            LineVerdict::Inconclusive => "inconclusive",
        }
    }
}

/// Shape information carried by the asymptote of an `h` with `h(0) = 0`.
pub fn line_verdict(line: &LinearAsymptote, h_linear: bool, intercept_tolerance: f64) -> LineVerdict {
    if !line.converged {
        return LineVerdict::Inconclusive;
    }
    if line.intercept > intercept_tolerance {
        LineVerdict::NotConvex
    } else if line.intercept < -intercept_tolerance {
        LineVerdict::NotConcave
    } else if h_linear {
        LineVerdict::Inconclusive
    } else {
        LineVerdict::NeitherConvexNorConcave
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub pass: bool,
    pub first_failure: Option<f64>,
    pub checked: usize,
}

/// Checks `c g(c x + eps) <= f(x) <= c g(c x - eps)` on every grid point.
pub fn density_sandwich_check(
    f: &dyn Lifetime,
    g: &dyn Lifetime,
    c: f64,
    eps: f64,
    threshold: f64,
    grid: &GridSpec,
) -> Result<SandwichReport> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("sandwich scale must be positive, got {c}")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("sandwich width must be positive, got {eps}")));
    }
    grid.validate()?;
    if grid.lo < threshold {
        return Err(Error::Domain(format!("grid starts at {} below the threshold {threshold}", grid.lo)));
    }
    let lc = c.ln();
    let points = grid.points();
    for &x in &points {
        let lf = f.log_pdf(x);
        let lower = lc + g.log_pdf(c * x + eps);
        let upper = if c * x - eps >= 0.0 { lc + g.log_pdf(c * x - eps) } else { f64::NEG_INFINITY };
        if !(lower <= lf && lf <= upper) {
            return Ok(SandwichReport { pass: false, first_failure: Some(x), checked: points.len() });
        }
    }
    Ok(SandwichReport { pass: true, first_failure: None, checked: points.len() })
}

/// Smallest `A` in `candidates` from which the sandwich holds on
/// `[A, A * span]`, with `n` log-spaced points.
pub fn locate_sandwich_threshold(
    f: &dyn Lifetime,
    g: &dyn Lifetime,
    c: f64,
    eps: f64,
    candidates: &[f64],
    span: f64,
    n: usize,
) -> Result<Option<f64>> {
    for &a in candidates {
        let grid = GridSpec::log(a, a * span, n);
        if density_sandwich_check(f, g, c, eps, a, &grid)?.pass {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distcore::DistributionSpec;
    use crate::orders::quantile_compose;
    use crate::systems::SystemSpec;

    #[test]
    fn exact_line_recovered() {
        let l = asymptotic_line(|x| Ok(3.0 * x + 2.0), &LineConfig::default()).unwrap();
        assert!(l.converged);
        assert!((l.slope - 3.0).abs() < 1e-10 && (l.intercept - 2.0).abs() < 1e-10, "{l:?}");
    }

    #[test]
    fn weibull_composition_line() {
        let base = DistributionSpec::weibull(2.0, 1.0);
        let x = DistributionSpec::power_of(base.clone(), 2.0);
        let l = asymptotic_line(|t| quantile_compose(&x, &base, t), &LineConfig::default()).unwrap();
        assert!(l.converged);
        assert!((l.slope - 1.0).abs() < 1e-6 && l.intercept.abs() < 1e-3, "{l:?}");
    }

    #[test]
    fn divergent_input_not_converged() {
        let l = asymptotic_line(|x| Ok(x * x.ln()), &LineConfig::default()).unwrap();
        assert!(!l.converged);
        assert_eq!(line_verdict(&l, false, 1e-3), LineVerdict::Inconclusive);
    }

    #[test]
    fn verdict_cases() {
        let mk = |c: f64| LinearAsymptote {
            slope: 1.0,
            intercept: c,
            converged: true,
            points: vec![],
            residuals: vec![],
            tolerance: 1e-4,
        };
        assert_eq!(line_verdict(&mk(0.5), false, 1e-3), LineVerdict::NotConvex);
        assert_eq!(line_verdict(&mk(-0.5), false, 1e-3), LineVerdict::NotConcave);
        assert_eq!(line_verdict(&mk(0.0), false, 1e-3), LineVerdict::NeitherConvexNorConcave);
        assert_eq!(line_verdict(&mk(0.0), true, 1e-3), LineVerdict::Inconclusive);
    }

    #[test]
    fn sandwich_examples() {
        let e = DistributionSpec::exponential(1.0);
        let grid = GridSpec::linear(0.0, 50.0, 256);
        assert!(density_sandwich_check(&e, &e, 1.0, 0.1, 0.0, &GridSpec::linear(0.2, 50.0, 256)).unwrap().pass);
        for a in [0.0, 10.0, 100.0] {
            let grid = GridSpec::linear(a, a + 50.0, 256);
            let r = density_sandwich_check(&e, &e, 2.0, 0.1, a, &grid).unwrap();
            assert!(!r.pass);
        }
        assert!(density_sandwich_check(&e, &e, 2.0, 0.1, 1.0, &grid).is_err());

        let f = SystemSpec::parallel([1.0, 2.0, 3.0].map(DistributionSpec::exponential));
        let g = SystemSpec::parallel([1.5, 2.5].map(DistributionSpec::exponential));
        let c = 1.0 / 1.5;
        let r = density_sandwich_check(&f, &g, c, 0.01, 40.0, &GridSpec::log(40.0, 4000.0, 512)).unwrap();
        assert!(r.pass, "{r:?}");
        let a = locate_sandwich_threshold(&f, &g, c, 0.01, &[1.0, 2.0, 5.0, 10.0, 20.0, 40.0], 100.0, 256).unwrap();
        assert!(matches!(a, Some(t) if t <= 40.0));
    }
}
