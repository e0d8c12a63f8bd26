use rayon::prelude::*;
use serde::Serialize;

use super::compose::sample_composition;
use super::pattern::{convex_allows, sign_pattern, star_allows, SignPattern};
use crate::error::{Error, Result};
use crate::evidence::{Evidence, EvidenceKind};
use crate::grid::GridSpec;
use crate::lifetime::Lifetime;

/// Parameters of the `(a, b)` sweeps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub a_sweep: Vec<f64>,
    pub b_points: usize,
    /// `b` ranges over `[-B, B]` with `B = b_span * median` of the law whose
    /// tail is evaluated at `x`.
    pub b_span: f64,
    pub grid_points: usize,
    pub lower_quantile: f64,
    pub upper_quantile: f64,
    pub epsilon: f64,
    /// Witnesses are re-checked on a grid with `refine - 1` extra points per cell.
    pub refine: usize,
    pub max_witnesses: usize,
    /// Add chord and ray candidates read off the sampled composition.
    pub shape_candidates: bool,
}

pub fn default_a_sweep() -> Vec<f64> {
    GridSpec::log(0.05, 20.0, 64).points()
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            a_sweep: default_a_sweep(),
            b_points: 33,
            b_span: 5.0,
            grid_points: 4096,
            lower_quantile: 1e-8,
            upper_quantile: 1.0 - 1e-10,
            epsilon: 1e-9,
            refine: 4,
            max_witnesses: 8,
            shape_candidates: true,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.a_sweep.is_empty() || self.a_sweep.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::Config("a sweep must be a non-empty list of positive numbers".into()));
        }
        if self.grid_points < 64 {
            return Err(Error::Config(format!("grid size must be >= 64, got {}", self.grid_points)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Config(format!("sign tolerance must be > 0, got {}", self.epsilon)));
        }
        if self.b_points == 0 || !(self.b_span >= 0.0) {
            return Err(Error::Config("b sweep needs at least one point and a nonnegative span".into()));
        }
        if !(0.0 < self.lower_quantile && self.lower_quantile < self.upper_quantile && self.upper_quantile < 1.0) {
            return Err(Error::Config("grid quantiles must satisfy 0 < lower < upper < 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateSource {
    Sweep,
    Chord,
    Ray,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub a: f64,
    pub b: f64,
    pub pattern: SignPattern,
    pub source: CandidateSource,
}

/// Outcome of the sweep for one ordered pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionReport {
    /// No confirmed violation anywhere in the sweep (numerically supported,
    /// not proved).
    pub holds: bool,
    pub candidates: usize,
    pub violations: usize,
    pub witnesses: Vec<Witness>,
    pub grid: GridSpec,
    pub epsilon: f64,
    pub b_nonnegative: bool,
}

impl DirectionReport {
    pub fn evidence(&self, test: &str, direction: &str) -> Vec<Evidence> {
        if self.holds {
            return vec![Evidence::new(
                EvidenceKind::SweepClean {
                    test: test.into(),
                    direction: direction.into(),
                    candidates: self.candidates,
                    epsilon: self.epsilon,
                    grid: self.grid,
                },
                format!("no forbidden sign pattern over {} (a, b) candidates", self.candidates),
            )];
        }
        self.witnesses
            .iter()
            .map(|w| {
                Evidence::new(
                    EvidenceKind::PatternWitness {
                        test: test.into(),
                        direction: direction.into(),
                        a: w.a,
                        b: w.b,
                        pattern: w.pattern.to_string(),
                        epsilon: self.epsilon,
                        grid: self.grid,
                    },
                    format!("forbidden pattern {} from a {:?} candidate", w.pattern, w.source),
                )
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexRelation {
    /// `X <=_c Y`.
    Le,
    /// `Y <=_c X`.
    Ge,
    /// Both directions clean.
    BothHold,
    NonComparable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexTestResult {
    pub forward: DirectionReport,
    pub reverse: DirectionReport,
    pub relation: ConvexRelation,
}

#[derive(Clone, Copy, PartialEq)]
enum Test {
    Star,
    Convex,
}

/// Scale-free stand-in for `tail_Y - tail_X` built from the log tails.
fn normalized(ly: f64, lx: f64) -> f64 {
    match (ly == f64::NEG_INFINITY, lx == f64::NEG_INFINITY) {
        (true, true) => 0.0,
        (false, true) => 1.0,
        (true, false) => -1.0,
        _ => {
            let den = ly.abs() + lx.abs();
            if den == 0.0 {
                0.0
            } else {
                (ly - lx) / den
            }
        }
    }
}

fn shifted_log_tail(law: &dyn Lifetime, t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        law.log_tail(t)
    }
}

/// `V(x) = tail_Y(x) - tail_X(a x + b)` on `points`, in linear scale.
pub fn v_values(x_law: &dyn Lifetime, y_law: &dyn Lifetime, a: f64, b: f64, points: &[f64]) -> Vec<f64> {
    points.iter().map(|&x| y_law.log_tail(x).exp() - shifted_log_tail(x_law, a * x + b).exp()).collect()
}

fn pattern_for(x_law: &dyn Lifetime, ly: &[f64], points: &[f64], a: f64, b: f64, eps: f64) -> Result<SignPattern> {
    let v: Vec<f64> = points.iter().zip(ly).map(|(&x, &l)| normalized(l, shifted_log_tail(x_law, a * x + b))).collect();
    sign_pattern(&v, eps)
}

fn comparison_grid(x_law: &dyn Lifetime, y_law: &dyn Lifetime, cfg: &SweepConfig) -> Result<GridSpec> {
    let lo = x_law.quantile(cfg.lower_quantile)?.min(y_law.quantile(cfg.lower_quantile)?);
    let hi = x_law.quantile(cfg.upper_quantile)?.max(y_law.quantile(cfg.upper_quantile)?);
    let lo = if lo > 0.0 { lo } else { hi * 1e-12 };
    let g = GridSpec::log(lo, hi, cfg.grid_points);
    g.validate()?;
    Ok(g)
}

fn slopes(t: &[f64], h: &[f64]) -> Vec<f64> {
    t.windows(2).zip(h.windows(2)).map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0])).collect()
}

/// Maximal index ranges `[i, j]` of the series over which it strictly falls.
fn falling_runs(series: &[f64], tol: f64) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start: Option<usize> = None;
    for k in 0..series.len().saturating_sub(1) {
        let falling = series[k + 1] - series[k] < -tol;
        match (falling, start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                runs.push((s, k));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, series.len() - 1));
    }
    runs
}

const SHAPE_RUNS: usize = 6;

/// Lines cutting a concave stretch of `h` twice, as `(a, b)` pairs.
fn chord_candidates(t: &[f64], h: &[f64], eps: f64) -> Vec<(f64, f64)> {
    let s = slopes(t, h);
    let tol = eps * s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut scored: Vec<(f64, f64, f64)> = Vec::new();
    for (i, j) in falling_runs(&s, tol) {
        // slopes s_i > ... > s_j span the points t_i ..= t_{j+1}
        let (lo, hi) = (i, j + 1);
        let quarter = (hi - lo) / 4;
        for (p, q) in [(lo, hi), (lo + quarter, hi - quarter)] {
            if q < p + 2 {
                continue;
            }
            let m = (h[q] - h[p]) / (t[q] - t[p]);
            let c0 = h[p] - m * t[p];
            let gap = (p..=q).map(|k| h[k] - (m * t[k] + c0)).fold(f64::NEG_INFINITY, f64::max);
            if !(m > 0.0 && m.is_finite() && gap > 0.0) {
                continue;
            }
            let c = c0 + 0.5 * gap;
            scored.push((gap / h[q].abs().max(f64::MIN_POSITIVE), 1.0 / m, -c / m));
        }
    }
    scored.sort_by(|x, y| y.0.total_cmp(&x.0));
    scored.into_iter().take(2 * SHAPE_RUNS).map(|(_, a, b)| (a, b)).collect()
}

/// Rays `x / a` crossing a falling stretch of `h(t) / t`.
fn ray_candidates(t: &[f64], h: &[f64], eps: f64) -> Vec<f64> {
    let r: Vec<f64> = t.iter().zip(h).map(|(x, y)| y / x).collect();
    let tol = eps * r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut scored: Vec<(f64, f64)> = falling_runs(&r, tol)
        .into_iter()
        .filter_map(|(i, j)| {
            let s = 0.5 * (r[i] + r[j]);
            (s > 0.0 && s.is_finite()).then(|| ((r[i] - r[j]) / s, 1.0 / s))
        })
        .collect();
    scored.sort_by(|x, y| y.0.total_cmp(&x.0));
    scored.into_iter().take(SHAPE_RUNS).map(|(_, a)| a).collect()
}

fn b_values(y_law: &dyn Lifetime, cfg: &SweepConfig, nonnegative: bool) -> Result<Vec<f64>> {
    let span = cfg.b_span * y_law.quantile(0.5)?;
    let n = cfg.b_points;
    let vals: Vec<f64> =
        if n == 1 { vec![0.0] } else { (0..n).map(|i| -span + 2.0 * span * i as f64 / (n - 1) as f64).collect() };
    Ok(if nonnegative { vals.into_iter().filter(|b| *b >= 0.0).collect() } else { vals })
}

fn run_direction(
    x_law: &dyn Lifetime,
    y_law: &dyn Lifetime,
    test: Test,
    cfg: &SweepConfig,
    b_nonnegative: bool,
) -> Result<DirectionReport> {
    cfg.validate()?;
    let grid = comparison_grid(x_law, y_law, cfg)?;
    let points = grid.points();
    let mut cands: Vec<(f64, f64, CandidateSource)> = Vec::new();
    if cfg.shape_candidates {
        // an unbracketed quantile only costs the shape-derived candidates
        if let Ok(h) = sample_composition(x_law, y_law, &points) {
            match test {
                Test::Star => cands.extend(
                    ray_candidates(&points, &h, cfg.epsilon).into_iter().map(|a| (a, 0.0, CandidateSource::Ray)),
                ),
                Test::Convex => cands.extend(
                    chord_candidates(&points, &h, cfg.epsilon)
                        .into_iter()
                        .filter(|&(_, b)| !b_nonnegative || b >= 0.0)
                        .map(|(a, b)| (a, b, CandidateSource::Chord)),
                ),
            }
        }
    }
    let bs = match test {
        Test::Star => vec![0.0],
        Test::Convex => b_values(y_law, cfg, b_nonnegative)?,
    };
    for &a in &cfg.a_sweep {
        for &b in &bs {
            cands.push((a, b, CandidateSource::Sweep));
        }
    }
    let allows = |p: &SignPattern| match test {
        Test::Star => star_allows(p),
        Test::Convex => convex_allows(p),
    };
    let ly: Vec<f64> = points.par_iter().map(|&x| y_law.log_tail(x)).collect();
    let flagged: Vec<Option<SignPattern>> = cands
        .par_iter()
        .map(|&(a, b, _)| {
            let p = pattern_for(x_law, &ly, &points, a, b, cfg.epsilon)?;
            Ok((!allows(&p)).then_some(p))
        })
        .collect::<Result<_>>()?;
    let mut witnesses = Vec::new();
    let mut violations = 0;
    if flagged.iter().any(Option::is_some) {
        let fine = grid.refined(cfg.refine);
        let fine_points = fine.points();
        let fine_ly: Vec<f64> = fine_points.par_iter().map(|&x| y_law.log_tail(x)).collect();
        let confirmed: Vec<Option<SignPattern>> = cands
            .par_iter()
            .zip(&flagged)
            .map(|(&(a, b, _), f)| match f {
                None => Ok(None),
                Some(_) => {
                    let p = pattern_for(x_law, &fine_ly, &fine_points, a, b, cfg.epsilon)?;
                    Ok((!allows(&p)).then_some(p))
                }
            })
            .collect::<Result<_>>()?;
        for (&(a, b, source), p) in cands.iter().zip(confirmed) {
            if let Some(pattern) = p {
                violations += 1;
                if witnesses.len() < cfg.max_witnesses {
                    witnesses.push(Witness { a, b, pattern, source });
                }
            }
        }
    }
    Ok(DirectionReport {
        holds: violations == 0,
        candidates: cands.len(),
        violations,
        witnesses,
        grid,
        epsilon: cfg.epsilon,
        b_nonnegative,
    })
}

/// Searches for `a > 0` where `tail_Y(x) - tail_X(a x)` leaves the
/// patterns allowed by `X <=_* Y`.
pub fn star_order_test(x_law: &dyn Lifetime, y_law: &dyn Lifetime, cfg: &SweepConfig) -> Result<DirectionReport> {
    run_direction(x_law, y_law, Test::Star, cfg, false)
}

/// Both directions of the convex-order sweep. With `use_star_shortcut`, a
/// direction whose star sweep is clean only scans `b >= 0`.
pub fn convex_order_test(
    x_law: &dyn Lifetime,
    y_law: &dyn Lifetime,
    cfg: &SweepConfig,
    use_star_shortcut: bool,
) -> Result<ConvexTestResult> {
    let shortcut = |p: &dyn Lifetime, q: &dyn Lifetime| -> Result<bool> {
        Ok(use_star_shortcut && star_order_test(p, q, cfg)?.holds)
    };
    let fwd_nonneg = shortcut(x_law, y_law)?;
    let rev_nonneg = shortcut(y_law, x_law)?;
    let forward = run_direction(x_law, y_law, Test::Convex, cfg, fwd_nonneg)?;
    let reverse = run_direction(y_law, x_law, Test::Convex, cfg, rev_nonneg)?;
    let relation = match (forward.holds, reverse.holds) {
        (true, true) => ConvexRelation::BothHold,
        (true, false) => ConvexRelation::Le,
        (false, true) => ConvexRelation::Ge,
        (false, false) => ConvexRelation::NonComparable,
    };
    Ok(ConvexTestResult { forward, reverse, relation })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_sign_matches_difference() {
        for (ly, lx) in [(-1.0, -2.0), (-5.0, -0.1), (-1e-300, -2e-300), (0.0, -3.0)] {
            let v = normalized(ly, lx);
            assert_eq!(v.signum(), (ly.exp() - lx.exp()).signum(), "{ly} {lx}");
        }
        assert_eq!(normalized(f64::NEG_INFINITY, -1.0), -1.0);
        assert_eq!(normalized(-1.0, f64::NEG_INFINITY), 1.0);
    }

    #[test]
    fn falling_runs_are_maximal() {
        let s = [0.0, 1.0, 0.5, 0.2, 0.3, 0.1];
        assert_eq!(falling_runs(&s, 0.0), vec![(1, 3), (4, 5)]);
    }

    #[test]
    fn chord_of_a_concave_arc_cuts_twice() {
        let t: Vec<f64> = (1..=200).map(|i| i as f64 * 0.05).collect();
        let h: Vec<f64> = t.iter().map(|x| x.sqrt()).collect();
        let c = chord_candidates(&t, &h, 1e-9);
        assert!(!c.is_empty());
        let (a, b) = c[0];
        // sign of h(t) - (t - b)/a along the grid
        let v: Vec<f64> = t.iter().zip(&h).map(|(x, y)| y - (x - b) / a).collect();
        assert_eq!(sign_pattern(&v, 1e-9).unwrap().to_string(), "-,+,-");
    }
}
