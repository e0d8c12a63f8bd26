//! The evaluator abstraction shared by single laws and composite systems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest upper bracket tried by the bisection quantile before giving up.
pub const BRACKET_LIMIT: f64 = 1e12;
/// Iteration cap of the bisection quantile.
pub const MAX_BISECTION_STEPS: usize = 200;

/// Scalar functionals exposed by [`Lifetime::evaluate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    Cdf,
    Tail,
    LogTail,
    Pdf,
    FailureRate,
}

/// A nonnegative lifetime law known through log-space evaluators.
///
/// Implementors provide `ln F`, `ln(1 - F)` and `ln f`, each accurate in
/// its own far tail. Everything else (plain probabilities, failure rate,
/// quantiles) is derived here.
pub trait Lifetime: Send + Sync {
    fn log_cdf(&self, x: f64) -> f64;
    fn log_tail(&self, x: f64) -> f64;
    fn log_pdf(&self, x: f64) -> f64;

    /// Closed support `[lo, hi]`; `hi` may be `+inf`.
    fn support(&self) -> (f64, f64);

    /// Smallest `x` with `ln F(x) >= lc`.
    fn quantile_from_log_cdf(&self, lc: f64) -> Result<f64> {
        invert_log_cdf(self, lc)
    }

    /// Smallest `x` with `ln(1 - F(x)) <= lt`.
    fn quantile_from_log_tail(&self, lt: f64) -> Result<f64> {
        invert_log_tail(self, lt)
    }

    fn cdf(&self, x: f64) -> f64 {
        self.log_cdf(x).exp()
    }

    fn tail(&self, x: f64) -> f64 {
        self.log_tail(x).exp()
    }

    fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    /// `f(x) / (1 - F(x))`, defined wherever the tail is positive.
    fn failure_rate(&self, x: f64) -> Result<f64> {
        let lt = self.log_tail(x);
        if lt == f64::NEG_INFINITY {
            return Err(Error::Domain(format!("failure rate undefined at x = {x}: the tail vanishes")));
        }
        Ok((self.log_pdf(x) - lt).exp())
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile level must lie in (0, 1), got {p}")));
        }
        if p <= 0.5 {
            self.quantile_from_log_cdf(p.ln())
        } else {
            self.quantile_from_log_tail((-p).ln_1p())
        }
    }

    fn evaluate(&self, x: f64, functional: Functional) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("evaluation point must be >= 0, got {x}")));
        }
        Ok(match functional {
            Functional::Cdf => self.cdf(x),
            Functional::Tail => self.tail(x),
            Functional::LogTail => self.log_tail(x),
            Functional::Pdf => self.pdf(x),
            Functional::FailureRate => return self.failure_rate(x),
        })
    }
}

impl<T: Lifetime + ?Sized> Lifetime for &T {
    fn log_cdf(&self, x: f64) -> f64 {
        (**self).log_cdf(x)
    }
    fn log_tail(&self, x: f64) -> f64 {
        (**self).log_tail(x)
    }
    fn log_pdf(&self, x: f64) -> f64 {
        (**self).log_pdf(x)
    }
    fn support(&self) -> (f64, f64) {
        (**self).support()
    }
    fn quantile_from_log_cdf(&self, lc: f64) -> Result<f64> {
        (**self).quantile_from_log_cdf(lc)
    }
    fn quantile_from_log_tail(&self, lt: f64) -> Result<f64> {
        (**self).quantile_from_log_tail(lt)
    }
}

fn upper_bracket<M, P>(model: &M, p: f64, reached: P) -> Result<f64>
where
    M: Lifetime + ?Sized,
    P: Fn(f64) -> bool,
{
    let (lo, hi) = model.support();
    if hi.is_finite() {
        return Ok(hi);
    }
    let mut x = 1.0f64.max(2.0 * lo);
    while !reached(x) {
        x *= 2.0;
        if x > BRACKET_LIMIT {
            return Err(Error::UnboundedQuantile { p, x_max: BRACKET_LIMIT });
        }
    }
    Ok(x)
}

fn bisect<P: Fn(f64) -> bool>(mut lo: f64, mut hi: f64, below: P) -> f64 {
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bracketed bisection on `ln F`; used by laws without a closed-form inverse.
pub fn invert_log_cdf<M: Lifetime + ?Sized>(model: &M, lc: f64) -> Result<f64> {
    let (lo, hi) = model.support();
    if lc == f64::NEG_INFINITY {
        return Ok(lo);
    }
    if lc >= 0.0 {
        return if hi.is_finite() { Ok(hi) } else { Err(Error::UnboundedQuantile { p: 1.0, x_max: BRACKET_LIMIT }) };
    }
    let top = upper_bracket(model, lc.exp(), |x| model.log_cdf(x) >= lc)?;
    Ok(bisect(lo, top, |x| model.log_cdf(x) < lc))
}

/// Bracketed bisection on `ln(1 - F)`.
pub fn invert_log_tail<M: Lifetime + ?Sized>(model: &M, lt: f64) -> Result<f64> {
    let (lo, hi) = model.support();
    if lt >= 0.0 {
        return Ok(lo);
    }
    if lt == f64::NEG_INFINITY {
        return if hi.is_finite() { Ok(hi) } else { Err(Error::UnboundedQuantile { p: 1.0, x_max: BRACKET_LIMIT }) };
    }
    let p = -lt.exp_m1();
    let top = upper_bracket(model, p, |x| model.log_tail(x) <= lt)?;
    Ok(bisect(lo, top, |x| model.log_tail(x) > lt))
}
