//! Underflow-safe helpers for probabilities kept as natural logarithms.
//!
//! Tails at the far right of the support are routinely far below the
//! smallest positive `f64`, so every evaluator works with `ln F` and
//! `ln (1 - F)` and only exponentiates at the very end.

use std::f64::consts::LN_2;

/// `ln(1 - e^x)` for `x <= 0`.
#[inline]
pub fn log1mexp(x: f64) -> f64 {
    if x > -LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `ln(sum_i e^{x_i})`, returning `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    if m == f64::INFINITY {
        return m;
    }
    m + xs.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

/// `ln(-ln(1 - e^l))` for `l <= 0`.
///
/// Given the log of a tail probability `l = ln t`, this is the log of the
/// cumulative "cdf hazard" `-ln(1 - t)`; accurate for both tiny and
/// near-one `t`.
#[inline]
pub fn log_neg_log1mexp(l: f64) -> f64 {
    if l == f64::NEG_INFINITY {
        return l;
    }
    if l < -20.0 {
        // -ln(1-t) = t (1 + t/2 + ...), the t^2 term is below 1e-18
        l + (0.5 * l.exp()).ln_1p()
    } else {
        (-log1mexp(l)).ln()
    }
}

/// `ln(1 - exp(-e^s))`: the log of `1 - e^{-H}` given `s = ln H`.
#[inline]
pub fn log1mexp_neg_exp(s: f64) -> f64 {
    if s == f64::NEG_INFINITY {
        return s;
    }
    let h = s.exp();
    if s < -20.0 {
        // 1 - e^{-h} = h (1 - h/2 + h^2/6 - ...)
        s + (-0.5 * h).ln_1p()
    } else {
        log1mexp(-h)
    }
}

/// Natural log of `|sum_i s_i e^{l_i}|` for signed terms, returned as
/// `(sign, ln|sum|)`. Cancellation is resolved by summing the positive and
/// negative groups separately.
pub fn signed_log_sum(terms: &[(f64, f64)]) -> (f64, f64) {
    let (pos, neg) = split_signed(terms);
    if pos == neg {
        return (0.0, f64::NEG_INFINITY);
    }
    if pos > neg {
        (1.0, pos + log1mexp(neg - pos))
    } else {
        (-1.0, neg + log1mexp(pos - neg))
    }
}

/// Log-sums of the positive and negative groups of `(sign, ln|term|)` pairs.
pub fn split_signed(terms: &[(f64, f64)]) -> (f64, f64) {
    let pos: Vec<f64> = terms.iter().filter(|t| t.0 > 0.0).map(|t| t.1).collect();
    let neg: Vec<f64> = terms.iter().filter(|t| t.0 < 0.0).map(|t| t.1).collect();
    (log_sum_exp(&pos), log_sum_exp(&neg))
}

/// `ln(n!)` by direct summation; exact enough for the small shapes used
/// by integer-shape Gamma laws.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log1mexp_matches_naive_in_the_middle() {
        for &x in &[-0.1, -0.5, -1.0, -3.0, -10.0] {
            let naive = (1.0 - f64::exp(x)).ln();
            assert!((log1mexp(x) - naive).abs() < 1e-14);
        }
    }

    #[test]
    fn log1mexp_is_accurate_near_zero() {
        // ln(1 - e^{-1e-20}) = ln(1e-20) to first order
        let v = log1mexp(-1e-20);
        assert!((v - (1e-20f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_handles_infinities() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]), f64::NEG_INFINITY);
        let v = log_sum_exp(&[-1000.0, -1000.0]);
        assert!((v - (-1000.0 + LN_2)).abs() < 1e-12);
    }

    #[test]
    fn neg_log_hazard_roundtrip() {
        for &l in &[-1e-8, -0.3, -2.0, -25.0, -800.0] {
            let s = log_neg_log1mexp(l);
            let back = log1mexp_neg_exp(s);
            // back = ln(1 - exp(ln(1 - t))) = ln t
            assert!((back - l).abs() <= 1e-12 * l.abs().max(1.0), "{l}: {back}");
        }
    }

    #[test]
    fn signed_sum_cancels() {
        let (s, l) = signed_log_sum(&[(1.0, 0.0), (-1.0, (0.25f64).ln())]);
        assert_eq!(s, 1.0);
        assert!((l - (0.75f64).ln()).abs() < 1e-15);
        let (s, _) = signed_log_sum(&[(1.0, 0.0), (-1.0, 0.0)]);
        assert_eq!(s, 0.0);
    }
}
