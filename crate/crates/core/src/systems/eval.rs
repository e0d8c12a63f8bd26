use super::{Dependence, FgmCoefficients, SystemSpec};
use crate::error::Result;
use crate::lifetime::{Functional, Lifetime};
use crate::logspace::{log1mexp_neg_exp, log_neg_log1mexp, log_sum_exp, signed_log_sum};

const NEG_INF: f64 = f64::NEG_INFINITY;

/// `ln(-ln p)` from the pair `(ln p, ln(1 - p))`, using whichever is accurate.
fn log_hazard(lp: f64, lq: f64) -> f64 {
    if lq < -0.7 {
        log_neg_log1mexp(lq)
    } else {
        (-lp).ln()
    }
}

/// `ln(1 - prod_i p_i)` given `ln p_i` and `ln(1 - p_i)`.
fn log_one_minus_product(lp: &[f64], lq: &[f64]) -> f64 {
    if lp.contains(&NEG_INF) {
        return 0.0;
    }
    let h: Vec<f64> = lp.iter().zip(lq).map(|(&p, &q)| log_hazard(p, q)).collect();
    log1mexp_neg_exp(log_sum_exp(&h))
}

/// `ln sum_i d_i prod_{j != i} p_j` with `d_i` the child densities.
fn log_product_derivative(ld: &[f64], lp: &[f64]) -> f64 {
    let terms: Vec<f64> = (0..ld.len())
        .map(|i| {
            let rest: f64 = lp.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).sum();
            let t = ld[i] + rest;
            if t.is_nan() {
                NEG_INF
            } else {
                t
            }
        })
        .collect();
    log_sum_exp(&terms)
}

struct Children {
    lc: Vec<f64>,
    lt: Vec<f64>,
}

fn children_at(children: &[SystemSpec], x: f64) -> Children {
    Children {
        lc: children.iter().map(|c| c.log_cdf(x)).collect(),
        lt: children.iter().map(|c| c.log_tail(x)).collect(),
    }
}

/// `ln |C|` and its sign, `C = sum c_ij T_i T_j`.
fn fgm_c(c: &FgmCoefficients, lt: &[f64]) -> (f64, f64) {
    let terms: Vec<(f64, f64)> = c
        .pairs()
        .filter(|&(_, _, cij)| cij != 0.0)
        .map(|(i, j, cij)| (cij.signum(), cij.abs().ln() + lt[i] + lt[j]))
        .collect();
    signed_log_sum(&terms)
}

fn fgm_log_cdf(c: &FgmCoefficients, ch: &Children) -> f64 {
    let lp: f64 = ch.lc.iter().sum();
    if lp == NEG_INF {
        return NEG_INF;
    }
    let (s, l) = fgm_c(c, &ch.lt);
    lp + (s * l.exp()).ln_1p()
}

fn fgm_log_tail(c: &FgmCoefficients, ch: &Children) -> f64 {
    // 1 - P(1 + C) = (1 - P)(1 - R),  R = P C / (1 - P)
    let lt_ind = log_one_minus_product(&ch.lc, &ch.lt);
    let lp: f64 = ch.lc.iter().sum();
    if lp == NEG_INF {
        return 0.0;
    }
    let (s, l) = fgm_c(c, &ch.lt);
    if s == 0.0 {
        return lt_ind;
    }
    lt_ind + (-s * (lp + l - lt_ind).exp()).ln_1p()
}

fn fgm_log_pdf(c: &FgmCoefficients, children: &[SystemSpec], x: f64) -> f64 {
    // g = sum_i f_i prod_{j != i} F_j (1 + C) - P sum c_ij (f_i T_j + T_i f_j)
    let ch = children_at(children, x);
    let ld: Vec<f64> = children.iter().map(|c| c.log_pdf(x)).collect();
    let lp: f64 = ch.lc.iter().sum();
    let (s, l) = fgm_c(c, &ch.lt);
    let one_plus_c = (s * l.exp()).ln_1p();
    let mut terms = vec![(1.0, log_product_derivative(&ld, &ch.lc) + one_plus_c)];
    if lp > NEG_INF {
        for (i, j, cij) in c.pairs() {
            if cij == 0.0 {
                continue;
            }
            let base = lp + cij.abs().ln();
            terms.push((-cij.signum(), base + ld[i] + ch.lt[j]));
            terms.push((-cij.signum(), base + ch.lt[i] + ld[j]));
        }
    }
    let (sign, v) = signed_log_sum(&terms);
    if sign > 0.0 {
        v
    } else {
        NEG_INF
    }
}

impl Lifetime for SystemSpec {
    fn log_cdf(&self, x: f64) -> f64 {
        match self {
            SystemSpec::Component(d) => d.log_cdf(x),
            SystemSpec::Max { children, dependence: Dependence::Independent } => {
                children.iter().map(|c| c.log_cdf(x)).sum()
            }
            SystemSpec::Max { children, dependence: Dependence::Fgm(c) } => fgm_log_cdf(c, &children_at(children, x)),
            SystemSpec::Min { children, .. } => {
                let ch = children_at(children, x);
                log_one_minus_product(&ch.lt, &ch.lc)
            }
        }
    }

    fn log_tail(&self, x: f64) -> f64 {
        match self {
            SystemSpec::Component(d) => d.log_tail(x),
            SystemSpec::Max { children, dependence: Dependence::Independent } => {
                let ch = children_at(children, x);
                log_one_minus_product(&ch.lc, &ch.lt)
            }
            SystemSpec::Max { children, dependence: Dependence::Fgm(c) } => fgm_log_tail(c, &children_at(children, x)),
            SystemSpec::Min { children, .. } => children.iter().map(|c| c.log_tail(x)).sum(),
        }
    }

    fn log_pdf(&self, x: f64) -> f64 {
        match self {
            SystemSpec::Component(d) => d.log_pdf(x),
            SystemSpec::Max { children, dependence: Dependence::Independent } => {
                let ld: Vec<f64> = children.iter().map(|c| c.log_pdf(x)).collect();
                let lc: Vec<f64> = children.iter().map(|c| c.log_cdf(x)).collect();
                log_product_derivative(&ld, &lc)
            }
            SystemSpec::Max { children, dependence: Dependence::Fgm(c) } => fgm_log_pdf(c, children, x),
            SystemSpec::Min { children, .. } => {
                let ld: Vec<f64> = children.iter().map(|c| c.log_pdf(x)).collect();
                let lt: Vec<f64> = children.iter().map(|c| c.log_tail(x)).collect();
                log_product_derivative(&ld, &lt)
            }
        }
    }

    fn support(&self) -> (f64, f64) {
        match self {
            SystemSpec::Component(d) => d.support(),
            SystemSpec::Max { children, .. } => children
                .iter()
                .map(Lifetime::support)
                .fold((0.0, 0.0), |(a, b), (lo, hi)| (f64::max(a, lo), f64::max(b, hi))),
            SystemSpec::Min { children, .. } => children
                .iter()
                .map(Lifetime::support)
                .fold((f64::INFINITY, f64::INFINITY), |(a, b), (lo, hi)| (f64::min(a, lo), f64::min(b, hi))),
        }
    }

    fn quantile_from_log_cdf(&self, lc: f64) -> Result<f64> {
        match self {
            SystemSpec::Component(d) => d.quantile_from_log_cdf(lc),
            _ => crate::lifetime::invert_log_cdf(self, lc),
        }
    }

    fn quantile_from_log_tail(&self, lt: f64) -> Result<f64> {
        match self {
            SystemSpec::Component(d) => d.quantile_from_log_tail(lt),
            _ => crate::lifetime::invert_log_tail(self, lt),
        }
    }
}

/// Validates `sys` and evaluates one functional at `x`.
pub fn evaluate_system(sys: &SystemSpec, x: f64, functional: Functional) -> Result<f64> {
    sys.validate()?;
    sys.evaluate(x, functional)
}
