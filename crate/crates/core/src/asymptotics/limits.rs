//! Limits of tail ratios along geometric probe sequences.
//!
//! Every ratio is formed as a difference of log tails, so probes far in the
//! tail never underflow. A sequence is summarised by, in order: a divergence
//! trend, direct settling of the last values, and polynomial extrapolation in
//! `1 / ln x`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lifetime::Lifetime;

/// Probes whose log tail exceeds this magnitude are dropped.
pub const LOG_TAIL_CUTOFF: f64 = 1e8;
/// A log ratio beyond this magnitude, still moving outward, counts as 0 or +inf.
pub const TREND_THRESHOLD: f64 = 30.0;
pub const LIMIT_TOLERANCE: f64 = 1e-4;
const NEVILLE_POINTS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSequence {
    pub x0: f64,
    pub ratio: f64,
    pub len: usize,
}

impl Default for ProbeSequence {
    fn default() -> Self {
        ProbeSequence { x0: 1.0, ratio: 2.0, len: 41 }
    }
}

impl ProbeSequence {
    pub fn validate(&self) -> Result<()> {
        if !(self.x0 > 0.0 && self.x0.is_finite()) {
            return Err(Error::Config(format!("probe start must be positive, got {}", self.x0)));
        }
        if !(self.ratio > 1.0 && self.ratio.is_finite()) {
            return Err(Error::Config(format!("probe ratio must exceed 1, got {}", self.ratio)));
        }
        if self.len < 3 {
            return Err(Error::Config(format!("probe sequence needs at least 3 points, got {}", self.len)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|j| self.x0 * self.ratio.powi(j as i32)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum LimitValue {
    Finite(f64),
    Zero,
    Infinite,
}

impl LimitValue {
    /// The limit as a number, with `Zero` and `Infinite` mapped to `0` and `+inf`.
    pub fn as_f64(self) -> f64 {
        match self {
            LimitValue::Finite(v) => v,
            LimitValue::Zero => 0.0,
            LimitValue::Infinite => f64::INFINITY,
        }
    }

    pub fn is_near(self, target: f64, tol: f64) -> bool {
        matches!(self, LimitValue::Finite(v) if (v - target).abs() <= tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitMethod {
    Trend,
    Direct,
    Extrapolated,
    Unconverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub value: LimitValue,
    pub converged: bool,
    pub method: LimitMethod,
    /// `(x, ln ratio)` for every usable probe.
    pub trace: Vec<(f64, f64)>,
}

impl LimitEstimate {
    pub fn is_one(&self, tol: f64) -> bool {
        self.converged && self.value.is_near(1.0, tol)
    }
}

/// Limit of `exp(log_num(x) - log_den(x))` along `seq`.
///
/// Each closure returns a log tail. A probe is kept while both logs are finite
/// and no larger in magnitude than [`LOG_TAIL_CUTOFF`]; the walk stops at the
/// first probe that fails.
pub fn log_ratio_limit(
    seq: &ProbeSequence,
    log_num: impl Fn(f64) -> f64,
    log_den: impl Fn(f64) -> f64,
) -> Result<LimitEstimate> {
    seq.validate()?;
    let mut trace = Vec::with_capacity(seq.len);
    for x in seq.points() {
        let (n, d) = (log_num(x), log_den(x));
        let usable = |v: f64| v.is_finite() && v.abs() <= LOG_TAIL_CUTOFF;
        if !usable(n) || !usable(d) {
            break;
        }
        trace.push((x, n - d));
    }
    if trace.is_empty() {
        return Err(Error::Underflow { x0: seq.x0 });
    }
    Ok(summarise(trace))
}

fn summarise(trace: Vec<(f64, f64)>) -> LimitEstimate {
    let logs: Vec<f64> = trace.iter().map(|p| p.1).collect();
    let n = logs.len();
    let last = logs[n - 1];
    let done = |value, converged, method| LimitEstimate { value, converged, method, trace: trace.clone() };

    if n >= 3 {
        let w = &logs[n - 3..];
        let falling = w[0] > w[1] && w[1] > w[2];
        let rising = w[0] < w[1] && w[1] < w[2];
        if last < -TREND_THRESHOLD && falling {
            return done(LimitValue::Zero, true, LimitMethod::Trend);
        }
        if last > TREND_THRESHOLD && rising {
            return done(LimitValue::Infinite, true, LimitMethod::Trend);
        }
        let r: Vec<f64> = w.iter().map(|l| l.exp()).collect();
        let close = |a: f64, b: f64| (a - b).abs() <= LIMIT_TOLERANCE * a.abs().max(b.abs());
        if close(r[0], r[1]) && close(r[1], r[2]) && close(r[0], r[2]) {
            return done(LimitValue::Finite(r[2]), true, LimitMethod::Direct);
        }
    }

    if n >= NEVILLE_POINTS && trace[n - NEVILLE_POINTS].0 > 1.0 {
        let tail = &trace[n - NEVILLE_POINTS..];
        let u: Vec<f64> = tail.iter().map(|p| 1.0 / p.0.ln()).collect();
        let y: Vec<f64> = tail.iter().map(|p| p.1).collect();
        let ext = neville_at_zero(&u, &y);
        let (a, b) = (ext[ext.len() - 2], ext[ext.len() - 1]);
        if a.is_finite() && b.is_finite() && b.abs() < TREND_THRESHOLD {
            let (ra, rb) = (a.exp(), b.exp());
            if (ra - rb).abs() <= LIMIT_TOLERANCE * ra.max(rb) {
                return done(LimitValue::Finite(rb), true, LimitMethod::Extrapolated);
            }
        }
    }

    done(LimitValue::Finite(last.exp()), false, LimitMethod::Unconverged)
}

/// Value at `u = 0` of the interpolating polynomial through the last `k`
/// points, for `k = 1..=len`, taking points from the end of the slices.
pub fn neville_at_zero(u: &[f64], y: &[f64]) -> Vec<f64> {
    debug_assert_eq!(u.len(), y.len());
    let n = u.len();
    // p[i] holds the extrapolant through points i..=top
    let mut p = y.to_vec();
    let mut out = vec![y[n - 1]];
    for width in 1..n {
        for i in (width..n).rev() {
            let lo = i - width;
            p[i] = (u[i] * p[i - 1] - u[lo] * p[i]) / (u[i] - u[lo]);
        }
        out.push(p[n - 1]);
    }
    out
}

/// `lim tail(lambda x) / tail(x)`.
pub fn variation_ratio_limit(law: &dyn Lifetime, lambda: f64, seq: &ProbeSequence) -> Result<LimitEstimate> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("variation factor must be positive, got {lambda}")));
    }
    log_ratio_limit(seq, |x| law.log_tail(lambda * x), |x| law.log_tail(x))
}

/// `lim tail_F(x) / tail_G(c x)`.
pub fn tail_ratio_limit(f: &dyn Lifetime, g: &dyn Lifetime, c: f64, seq: &ProbeSequence) -> Result<LimitEstimate> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("tail ratio scale must be positive, got {c}")));
    }
    log_ratio_limit(seq, |x| f.log_tail(x), |x| g.log_tail(c * x))
}

/// `lim tail(x + delta) / tail(x)`. A limit of 1 rules out exponential rapid
/// variation; any other value is merely consistent with it.
pub fn erpv_probe(law: &dyn Lifetime, delta: f64, seq: &ProbeSequence) -> Result<LimitEstimate> {
    if delta == 0.0 || !delta.is_finite() {
        return Err(Error::Domain(format!("shift must be finite and nonzero, got {delta}")));
    }
    log_ratio_limit(seq, |x| law.log_tail(x + delta), |x| law.log_tail(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distcore::{BuiltinTail, DistributionSpec};

    fn seq() -> ProbeSequence {
        ProbeSequence::default()
    }

    #[test]
    fn neville_reproduces_polynomials() {
        let u = [0.5, 0.4, 0.3, 0.2];
        let y: Vec<f64> = u.iter().map(|t| 2.0 - 3.0 * t + t * t).collect();
        let e = neville_at_zero(&u, &y);
        assert!((e[3] - 2.0).abs() < 1e-12);
        assert!((e[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn variation_examples() {
        let quad = DistributionSpec::builtin(BuiltinTail::InvQuadratic);
        let l = variation_ratio_limit(&quad, 2.0, &seq()).unwrap();
        assert!(l.converged && l.value.is_near(0.25, 1e-6), "{l:?}");

        let exp = DistributionSpec::exponential(1.0);
        let l = variation_ratio_limit(&exp, 2.0, &seq()).unwrap();
        assert_eq!(l.value, LimitValue::Zero);
        let l = variation_ratio_limit(&exp, 0.5, &seq()).unwrap();
        assert_eq!(l.value, LimitValue::Infinite);

        let slow = DistributionSpec::builtin(BuiltinTail::InvLog);
        let l = variation_ratio_limit(&slow, 2.0, &seq()).unwrap();
        assert!(l.converged && l.value.is_near(1.0, 1e-3), "{l:?}");
        assert_eq!(l.method, LimitMethod::Extrapolated);
    }

    #[test]
    fn shift_probe_examples() {
        let exp = DistributionSpec::exponential(1.0);
        let l = erpv_probe(&exp, 1.0, &seq()).unwrap();
        assert!(l.value.is_near((-1.0f64).exp(), 1e-9));
        for b in [BuiltinTail::ExpLogSquared, BuiltinTail::InvQuadratic] {
            let l = erpv_probe(&DistributionSpec::builtin(b), 1.0, &seq()).unwrap();
            assert!(l.is_one(1e-3), "{b:?}: {l:?}");
        }
        assert!(erpv_probe(&exp, 0.0, &seq()).is_err());
    }

    #[test]
    fn identical_tails_ratio_one() {
        let w = DistributionSpec::weibull(2.0, 1.3);
        let l = tail_ratio_limit(&w, &w, 1.0, &seq()).unwrap();
        assert_eq!(l.value, LimitValue::Finite(1.0));
    }

    #[test]
    fn bounded_support_underflows() {
        let u = DistributionSpec::u_quadratic(0.0, 0.5);
        match variation_ratio_limit(&u, 2.0, &seq()) {
            Err(Error::Underflow { x0 }) => assert_eq!(x0, 1.0),
            other => panic!("{other:?}"),
        }
    }
}
