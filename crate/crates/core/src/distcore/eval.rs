use std::f64::consts::LN_2;

use super::spec::{BuiltinTail, DistributionSpec};
use crate::error::{Error, Result};
use crate::lifetime::{invert_log_cdf, invert_log_tail, Lifetime};
use crate::logspace::{ln_factorial, log1mexp, log1mexp_neg_exp, log_neg_log1mexp, log_sum_exp};

const NEG_INF: f64 = f64::NEG_INFINITY;
// below this log-probability the second-order term of 1 - (1 - u)^t is
// negligible and the first-order expansion is used directly
const SMALL_LOG: f64 = -30.0;

fn gamma_log_tail(a: u32, z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    let lz = z.ln();
    let terms: Vec<f64> = (0..a).map(|l| l as f64 * lz - ln_factorial(l)).collect();
    -z + log_sum_exp(&terms)
}

fn gamma_log_cdf(a: u32, z: f64) -> f64 {
    if z <= 0.0 {
        return NEG_INF;
    }
    if z < a as f64 + 1.0 {
        // P(a, z) = z^a e^{-z} / a! * sum_j z^j a! / (a + j)!
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut j = 1u32;
        while term > 1e-17 * sum {
            term *= z / (a + j) as f64;
            sum += term;
            j += 1;
        }
        a as f64 * z.ln() - z - ln_factorial(a) + sum.ln()
    } else {
        log1mexp(gamma_log_tail(a, z))
    }
}

/// `(2/(1 + c + c^2))` with `c = cbrt(1 - 2q)`: the factor turning a small
/// probability `q` into a distance from the nearer endpoint of a u-quadratic.
fn uq_endpoint_offset(q: f64) -> f64 {
    let c = (1.0 - 2.0 * q).cbrt();
    2.0 * q / (1.0 + c + c * c)
}

fn checked(x: f64, p: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::UnboundedQuantile { p, x_max: f64::MAX })
    }
}

impl DistributionSpec {
    fn power_log_cdf(base: &DistributionSpec, t: f64, x: f64) -> f64 {
        t * base.log_cdf(x)
    }

    fn power_log_tail(base: &DistributionSpec, t: f64, x: f64) -> f64 {
        let lt = base.log_tail(x);
        if lt < SMALL_LOG {
            t.ln() + lt + (-(t - 1.0) * 0.5 * lt.exp()).ln_1p()
        } else {
            log1mexp(t * base.log_cdf(x))
        }
    }

    fn power_log_pdf(base: &DistributionSpec, t: f64, x: f64) -> f64 {
        if t == 1.0 {
            return base.log_pdf(x);
        }
        let lp = base.log_pdf(x);
        if lp == NEG_INF {
            return NEG_INF;
        }
        t.ln() + (t - 1.0) * base.log_cdf(x) + lp
    }
}

impl Lifetime for DistributionSpec {
    fn log_cdf(&self, x: f64) -> f64 {
        use DistributionSpec::*;
        match self {
            Exponential { rate } => {
                if x <= 0.0 {
                    NEG_INF
                } else {
                    log1mexp(-rate * x)
                }
            }
            Weibull { shape, scale } => {
                if x <= 0.0 {
                    NEG_INF
                } else {
                    log1mexp(-(scale * x).powf(*shape))
                }
            }
            GammaInt { shape, rate } => gamma_log_cdf(*shape, rate * x),
            GenExponential { shape, rate } => Self::power_log_cdf(&Exponential { rate: *rate }, *shape, x),
            UQuadratic { left, right } => {
                if x <= *left {
                    return NEG_INF;
                }
                if x >= *right {
                    return 0.0;
                }
                let (m, w) = (0.5 * (left + right), 0.5 * (right - left));
                let u = x - m;
                (x - left).ln() + (u * u - u * w + w * w).ln() - (2.0 * w * w * w).ln()
            }
            PowerOf { base, exponent } => Self::power_log_cdf(base, *exponent, x),
            TailPowerOf { base, exponent } => {
                let t = *exponent;
                let lc = base.log_cdf(x);
                if lc < SMALL_LOG {
                    if lc == NEG_INF {
                        return NEG_INF;
                    }
                    t.ln() + lc + (-(t - 1.0) * 0.5 * lc.exp()).ln_1p()
                } else {
                    log1mexp(t * base.log_tail(x))
                }
            }
            Builtin { name } => {
                if x <= 0.0 {
                    return NEG_INF;
                }
                match name {
                    BuiltinTail::InvQuadratic => -(1.0 / (x * x)).ln_1p(),
                    BuiltinTail::InvLog => {
                        let l = x.ln_1p();
                        l.ln() - l.ln_1p()
                    }
                    BuiltinTail::ExpLogSquared => {
                        let l = x.ln_1p();
                        log1mexp(-l * l)
                    }
                }
            }
        }
    }

    fn log_tail(&self, x: f64) -> f64 {
        use DistributionSpec::*;
        match self {
            Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -rate * x
                }
            }
            Weibull { shape, scale } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(scale * x).powf(*shape)
                }
            }
            GammaInt { shape, rate } => gamma_log_tail(*shape, rate * x),
            GenExponential { shape, rate } => Self::power_log_tail(&Exponential { rate: *rate }, *shape, x),
            UQuadratic { left, right } => {
                if x <= *left {
                    return 0.0;
                }
                if x >= *right {
                    return NEG_INF;
                }
                let (m, w) = (0.5 * (left + right), 0.5 * (right - left));
                let u = x - m;
                (right - x).ln() + (u * u + u * w + w * w).ln() - (2.0 * w * w * w).ln()
            }
            PowerOf { base, exponent } => Self::power_log_tail(base, *exponent, x),
            TailPowerOf { base, exponent } => exponent * base.log_tail(x),
            Builtin { name } => {
                if x <= 0.0 {
                    return 0.0;
                }
                match name {
                    BuiltinTail::InvQuadratic => {
                        if x > 1e100 {
                            -2.0 * x.ln()
                        } else {
                            -(x * x).ln_1p()
                        }
                    }
                    BuiltinTail::InvLog => -x.ln_1p().ln_1p(),
                    BuiltinTail::ExpLogSquared => {
                        let l = x.ln_1p();
                        -l * l
                    }
                }
            }
        }
    }

    fn log_pdf(&self, x: f64) -> f64 {
        use DistributionSpec::*;
        match self {
            Exponential { rate } => {
                if x < 0.0 {
                    NEG_INF
                } else {
                    rate.ln() - rate * x
                }
            }
            Weibull { shape, scale } => {
                if x < 0.0 {
                    return NEG_INF;
                }
                if x == 0.0 {
                    return match shape.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => scale.ln(),
                        _ => NEG_INF,
                    };
                }
                let z = scale * x;
                shape.ln() + scale.ln() + (shape - 1.0) * z.ln() - z.powf(*shape)
            }
            GammaInt { shape, rate } => {
                if x < 0.0 {
                    return NEG_INF;
                }
                let z = rate * x;
                if z == 0.0 {
                    return if *shape == 1 { rate.ln() } else { NEG_INF };
                }
                rate.ln() + (*shape as f64 - 1.0) * z.ln() - z - ln_factorial(shape - 1)
            }
            GenExponential { shape, rate } => Self::power_log_pdf(&Exponential { rate: *rate }, *shape, x),
            UQuadratic { left, right } => {
                if x < *left || x > *right {
                    return NEG_INF;
                }
                let (m, w) = (0.5 * (left + right), 0.5 * (right - left));
                let u = x - m;
                (3.0 * u * u).ln() - (2.0 * w * w * w).ln()
            }
            PowerOf { base, exponent } => Self::power_log_pdf(base, *exponent, x),
            TailPowerOf { base, exponent } => {
                let t = *exponent;
                if t == 1.0 {
                    return base.log_pdf(x);
                }
                let lp = base.log_pdf(x);
                if lp == NEG_INF {
                    return NEG_INF;
                }
                t.ln() + (t - 1.0) * base.log_tail(x) + lp
            }
            Builtin { name } => {
                if x < 0.0 {
                    return NEG_INF;
                }
                match name {
                    BuiltinTail::InvQuadratic => {
                        if x > 1e100 {
                            LN_2 - 3.0 * x.ln()
                        } else {
                            LN_2 + x.ln() - 2.0 * (x * x).ln_1p()
                        }
                    }
                    BuiltinTail::InvLog => {
                        let l = x.ln_1p();
                        -l - 2.0 * l.ln_1p()
                    }
                    BuiltinTail::ExpLogSquared => {
                        let l = x.ln_1p();
                        LN_2 + l.ln() - l - l * l
                    }
                }
            }
        }
    }

    fn support(&self) -> (f64, f64) {
        use DistributionSpec::*;
        match self {
            UQuadratic { left, right } => (*left, *right),
            PowerOf { base, .. } | TailPowerOf { base, .. } => base.support(),
            _ => (0.0, f64::INFINITY),
        }
    }

    fn quantile_from_log_cdf(&self, lc: f64) -> Result<f64> {
        use DistributionSpec::*;
        if lc >= 0.0 || lc == NEG_INF {
            return invert_log_cdf(self, lc);
        }
        match self {
            Exponential { .. } | Weibull { .. } | TailPowerOf { .. } | Builtin { .. } => {
                self.quantile_from_log_tail(log1mexp(lc))
            }
            GammaInt { .. } => invert_log_cdf(self, lc),
            GenExponential { shape, rate } => Exponential { rate: *rate }.quantile_from_log_cdf(lc / shape),
            UQuadratic { left, right } => {
                let p = lc.exp();
                if p <= 0.5 {
                    let w = 0.5 * (right - left);
                    Ok(left + w * uq_endpoint_offset(p))
                } else {
                    self.quantile_from_log_tail(log1mexp(lc))
                }
            }
            PowerOf { base, exponent } => base.quantile_from_log_cdf(lc / exponent),
        }
    }

    fn quantile_from_log_tail(&self, lt: f64) -> Result<f64> {
        use DistributionSpec::*;
        if lt >= 0.0 || lt == NEG_INF {
            return invert_log_tail(self, lt);
        }
        let p = -lt.exp_m1();
        match self {
            Exponential { rate } => Ok(-lt / rate),
            Weibull { shape, scale } => Ok((-lt).powf(1.0 / shape) / scale),
            GammaInt { .. } => invert_log_tail(self, lt),
            // F^n = 1 - e^lt  =>  ln(-ln F) = ln(-ln(1 - e^lt)) - ln n, which stays
            // finite where 1 - e^lt rounds to 1
            GenExponential { shape, rate } => {
                let s = log_neg_log1mexp(lt) - shape.ln();
                Exponential { rate: *rate }.quantile_from_log_tail(log1mexp_neg_exp(s))
            }
            PowerOf { base, exponent } => {
                let s = log_neg_log1mexp(lt) - exponent.ln();
                base.quantile_from_log_tail(log1mexp_neg_exp(s))
            }
            UQuadratic { left, right } => {
                let q = lt.exp();
                if q <= 0.5 {
                    let w = 0.5 * (right - left);
                    Ok(right - w * uq_endpoint_offset(q))
                } else {
                    self.quantile_from_log_cdf(log1mexp(lt))
                }
            }
            TailPowerOf { base, exponent } => base.quantile_from_log_tail(lt / exponent),
            Builtin { name } => {
                let x = match name {
                    // 1/(1+x^2) = q  =>  x^2 = (1 - q)/q
                    BuiltinTail::InvQuadratic => (0.5 * (log1mexp(lt) - lt)).exp(),
                    BuiltinTail::InvLog => (-lt).exp_m1().exp_m1(),
                    BuiltinTail::ExpLogSquared => (-lt).sqrt().exp_m1(),
                };
                checked(x, p)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifetime::Functional;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn exponential_median_tail() {
        let e = DistributionSpec::exponential(1.0);
        assert!(close(e.evaluate(LN_2, Functional::Tail).unwrap(), 0.5, 1e-15));
    }

    #[test]
    fn gamma_tail_closed_form() {
        let g = DistributionSpec::gamma_int(2, 1.0);
        assert!(close(g.tail(1.0), 2.0 / std::f64::consts::E, 1e-14));
        let q = g.quantile(1.0 - 2.0 / std::f64::consts::E).unwrap();
        assert!((q - 1.0).abs() < 1e-10, "{q}");
    }

    #[test]
    fn gamma_cdf_branches_meet() {
        for a in 1..8u32 {
            let z = a as f64 + 1.0;
            let lo = gamma_log_cdf(a, z * (1.0 - 1e-12));
            let hi = gamma_log_cdf(a, z);
            assert!((lo - hi).abs() < 1e-10, "a={a}: {lo} vs {hi}");
        }
    }

    #[test]
    fn u_quadratic_vertex_density_vanishes() {
        let u = DistributionSpec::u_quadratic(0.0, 4.0);
        assert_eq!(u.pdf(2.0), 0.0);
        assert!(close(u.pdf(0.0), 3.0 / 4.0, 1e-15));
        assert!(close(u.cdf(2.0), 0.5, 1e-15));
        assert!(close(u.cdf(1.0), 7.0 / 16.0, 1e-15));
        assert!(close(u.quantile(7.0 / 16.0).unwrap(), 1.0, 1e-14));
        assert!(close(u.quantile(1e-9).unwrap(), 4e-9 / 3.0, 1e-6));
    }

    #[test]
    fn closed_form_quantiles() {
        let e = DistributionSpec::exponential(2.0);
        let p = 1.0 - (-2.0f64).exp();
        assert!(close(e.quantile(p).unwrap(), 1.0, 1e-14));
        let pe = DistributionSpec::power_of(DistributionSpec::exponential(1.0), 2.0);
        assert!(close(pe.quantile(0.25).unwrap(), LN_2, 1e-14));
    }

    #[test]
    fn far_tail_stays_finite_in_log_space() {
        let w = DistributionSpec::power_of(DistributionSpec::weibull(2.0, 1.0), 3.0);
        let lt = w.log_tail(100.0);
        assert!(close(lt, 3f64.ln() - 1e4, 1e-12), "{lt}");
        let m = DistributionSpec::tail_power_of(DistributionSpec::exponential(1.0), 2.0);
        assert!(close(m.log_tail(1e5), -2e5, 1e-14));
        let q = m.quantile_from_log_tail(-2e5).unwrap();
        assert!(close(q, 1e5, 1e-12));
    }

    #[test]
    fn builtin_quantiles_invert() {
        for name in [BuiltinTail::InvQuadratic, BuiltinTail::InvLog, BuiltinTail::ExpLogSquared] {
            let d = DistributionSpec::builtin(name);
            for p in [1e-6, 0.1, 0.5, 0.9, 0.99] {
                let x = d.quantile(p).unwrap();
                assert!((d.cdf(x) - p).abs() < 1e-10, "{name:?} p={p}");
            }
        }
        // e^{1e6} is not representable
        let d = DistributionSpec::builtin(BuiltinTail::InvLog);
        assert!(matches!(d.quantile(1.0 - 1e-6), Err(Error::UnboundedQuantile { .. })));
    }

    #[test]
    fn failure_rate_beyond_support_is_an_error() {
        let u = DistributionSpec::u_quadratic(0.0, 4.0);
        assert!(u.failure_rate(4.0).is_err());
        assert!(u.evaluate(-1.0, Functional::Cdf).is_err());
    }

    #[test]
    fn power_quantile_deep_in_tail() {
        // tail of the max of two ~ 2 e^{-x^2}
        let m = DistributionSpec::power_of(DistributionSpec::weibull(2.0, 1.0), 2.0);
        let x = m.quantile_from_log_tail(-3e12).unwrap();
        assert!(close(x, (3e12 + LN_2).sqrt(), 1e-14), "{x}");
        let g = DistributionSpec::gen_exponential(3.0, 2.0);
        let x = g.quantile_from_log_tail(-800.0).unwrap();
        assert!(close(x, (800.0 + 3f64.ln()) / 2.0, 1e-12), "{x}");
    }
}
