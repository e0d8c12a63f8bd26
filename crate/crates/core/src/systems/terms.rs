//! Symbolic tail expansions: finite sums of `N x^p exp(-sum_a k_a x^a)`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{Dependence, SystemSpec};
use crate::distcore::DistributionSpec;
use crate::error::{Error, Result};
use crate::logspace::ln_factorial;

const REL: f64 = 1e-12;
// non-integer powers keep this many terms of the binomial series
const BINOMIAL_TERMS: usize = 6;

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL * a.abs().max(b.abs()).max(1e-300)
}

/// One summand `kappa x^alpha` of the exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpPart {
    pub alpha: f64,
    pub kappa: f64,
}

/// `coef * x^degree * exp(-sum kappa_a x^alpha_a)`; parts sorted by
/// decreasing `alpha`, none with zero `kappa`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coef: f64,
    pub degree: f64,
    pub exponent: Vec<ExpPart>,
}

impl Term {
    fn constant(coef: f64) -> Self {
        Term { coef, degree: 0.0, exponent: Vec::new() }
    }

    fn new(coef: f64, degree: f64, parts: impl IntoIterator<Item = ExpPart>) -> Self {
        let mut t = Term { coef, degree, exponent: Vec::new() };
        for p in parts {
            t.add_part(p);
        }
        t
    }

    fn add_part(&mut self, p: ExpPart) {
        match self.exponent.iter_mut().find(|q| same(q.alpha, p.alpha)) {
            Some(q) => q.kappa += p.kappa,
            None => self.exponent.push(p),
        }
        self.exponent.retain(|q| q.kappa != 0.0);
        self.exponent.sort_by(|a, b| b.alpha.total_cmp(&a.alpha));
    }

    fn times(&self, other: &Term) -> Term {
        let mut t =
            Term { coef: self.coef * other.coef, degree: self.degree + other.degree, exponent: self.exponent.clone() };
        for &p in &other.exponent {
            t.add_part(p);
        }
        t.snap();
        t
    }

    fn over(&self, other: &Term) -> Term {
        let inv = Term::new(
            1.0 / other.coef,
            -other.degree,
            other.exponent.iter().map(|p| ExpPart { alpha: p.alpha, kappa: -p.kappa }),
        );
        self.times(&inv)
    }

    fn powf(&self, t: f64) -> Term {
        Term::new(
            self.coef.powf(t),
            self.degree * t,
            self.exponent.iter().map(|p| ExpPart { alpha: p.alpha, kappa: p.kappa * t }),
        )
    }

    /// Rounds cancelled exponent parts to exactly zero.
    fn snap(&mut self) {
        self.exponent.retain(|q| q.kappa.abs() > 1e-12);
    }

    fn same_shape(&self, other: &Term) -> bool {
        same(self.degree, other.degree)
            && self.exponent.len() == other.exponent.len()
            && self.exponent.iter().zip(&other.exponent).all(|(a, b)| same(a.alpha, b.alpha) && same(a.kappa, b.kappa))
    }

    fn kappa_at(&self, alpha: f64) -> f64 {
        self.exponent.iter().find(|p| same(p.alpha, alpha)).map_or(0.0, |p| p.kappa)
    }

    /// `ln |coef| + degree ln x - sum kappa x^alpha`.
    pub fn log_abs_value(&self, x: f64) -> f64 {
        self.coef.abs().ln() + self.degree * x.ln()
            - self.exponent.iter().map(|p| p.kappa * x.powf(p.alpha)).sum::<f64>()
    }
}

/// Orders terms by asymptotic size: `Less` means `a` is the slower-decaying.
pub fn decay_order(a: &Term, b: &Term) -> Ordering {
    let mut alphas: Vec<f64> = a.exponent.iter().chain(&b.exponent).map(|p| p.alpha).collect();
    alphas.sort_by(|x, y| y.total_cmp(x));
    alphas.dedup_by(|x, y| same(*x, *y));
    for al in alphas {
        let (ka, kb) = (a.kappa_at(al), b.kappa_at(al));
        if !same(ka, kb) {
            return ka.total_cmp(&kb);
        }
    }
    if !same(a.degree, b.degree) {
        return b.degree.total_cmp(&a.degree);
    }
    Ordering::Equal
}

type Expansion = Vec<Term>;

fn simplify(terms: Expansion) -> Expansion {
    let mut groups: Vec<(Term, f64)> = Vec::new();
    for t in terms {
        if t.coef == 0.0 {
            continue;
        }
        match groups.iter_mut().find(|(g, _)| g.same_shape(&t)) {
            Some((g, scale)) => {
                g.coef += t.coef;
                *scale += t.coef.abs();
            }
            None => {
                let s = t.coef.abs();
                groups.push((t, s));
            }
        }
    }
    let mut out: Expansion =
        groups.into_iter().filter(|(g, scale)| g.coef.abs() > REL * scale).map(|(g, _)| g).collect();
    out.sort_by(decay_order);
    out
}

fn product(a: &[Term], b: &[Term]) -> Expansion {
    simplify(a.iter().flat_map(|s| b.iter().map(move |t| s.times(t))).collect())
}

fn scaled(a: &[Term], c: f64) -> Expansion {
    a.iter().map(|t| Term { coef: t.coef * c, ..t.clone() }).collect()
}

fn one_minus(a: &[Term]) -> Expansion {
    let mut v = vec![Term::constant(1.0)];
    v.extend(scaled(a, -1.0));
    simplify(v)
}

fn power_int(a: &[Term], n: u32) -> Expansion {
    let mut out = vec![Term::constant(1.0)];
    for _ in 0..n {
        out = product(&out, a);
    }
    out
}

fn binomial(t: f64, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (t - i as f64) / (i as f64 + 1.0))
}

/// `a^t` as a truncated binomial series around the leading term.
fn power_real(a: &[Term], t: f64) -> Result<Expansion> {
    if t.fract() == 0.0 && t <= 64.0 {
        return Ok(power_int(a, t as u32));
    }
    let lead = a
        .iter()
        .min_by(|x, y| decay_order(x, y))
        .ok_or_else(|| Error::NoExponentialAsymptote("empty expansion".into()))?;
    if lead.coef <= 0.0 {
        return Err(Error::NoExponentialAsymptote(
            "non-integer power of an expansion with a negative leading term".into(),
        ));
    }
    let rest: Expansion = a.iter().filter(|s| !std::ptr::eq(*s, lead)).map(|s| s.over(lead)).collect();
    let mut series = vec![Term::constant(1.0)];
    let mut power = vec![Term::constant(1.0)];
    for j in 1..BINOMIAL_TERMS {
        if rest.is_empty() {
            break;
        }
        power = product(&power, &rest);
        series.extend(scaled(&power, binomial(t, j)));
    }
    Ok(product(&[lead.powf(t)], &simplify(series)))
}

fn leaf_expansion(d: &DistributionSpec) -> Result<Expansion> {
    use DistributionSpec::*;
    Ok(match d {
        Exponential { rate } => vec![Term::new(1.0, 0.0, [ExpPart { alpha: 1.0, kappa: *rate }])],
        Weibull { shape, scale } => {
            vec![Term::new(1.0, 0.0, [ExpPart { alpha: *shape, kappa: scale.powf(*shape) }])]
        }
        GammaInt { shape, rate } => (0..*shape)
            .map(|l| {
                let coef = (l as f64 * rate.ln() - ln_factorial(l)).exp();
                Term::new(coef, l as f64, [ExpPart { alpha: 1.0, kappa: *rate }])
            })
            .collect(),
        GenExponential { shape, rate } => {
            leaf_expansion(&DistributionSpec::power_of(Exponential { rate: *rate }, *shape))?
        }
        PowerOf { base, exponent } => {
            let cdf = one_minus(&leaf_expansion(base)?);
            one_minus(&power_real(&cdf, *exponent)?)
        }
        TailPowerOf { base, exponent } => power_real(&leaf_expansion(base)?, *exponent)?,
        UQuadratic { .. } | Builtin { .. } => {
            return Err(Error::NoExponentialAsymptote(format!(
                "{d} has no tail of the form N x^p exp(-(lambda x)^alpha)"
            )))
        }
    })
}

/// The tail of `sys` as a simplified sum of terms, slowest-decaying first.
pub fn tail_expansion(sys: &SystemSpec) -> Result<Vec<Term>> {
    Ok(match sys {
        SystemSpec::Component(d) => simplify(leaf_expansion(d)?),
        SystemSpec::Min { children, .. } => {
            let mut acc = vec![Term::constant(1.0)];
            for c in children {
                acc = product(&acc, &tail_expansion(c)?);
            }
            acc
        }
        SystemSpec::Max { children, dependence } => {
            let tails = children.iter().map(tail_expansion).collect::<Result<Vec<_>>>()?;
            let mut cdf = vec![Term::constant(1.0)];
            for t in &tails {
                cdf = product(&cdf, &one_minus(t));
            }
            if let Dependence::Fgm(c) = dependence {
                let mut corr = vec![Term::constant(1.0)];
                for (i, j, cij) in c.pairs() {
                    corr.extend(scaled(&product(&tails[i], &tails[j]), cij));
                }
                cdf = product(&cdf, &simplify(corr));
            }
            one_minus(&cdf)
        }
    })
}

/// Dominant term `N x^p exp(-(lambda x)^alpha - lower order)` of a tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailLeadingTerm {
    pub coefficient: f64,
    pub rate: f64,
    pub alpha: f64,
    pub degree: f64,
    /// Exponent parts with smaller powers of `x`, e.g. from series systems of
    /// mixed-shape Weibull components.
    pub lower_order: Vec<ExpPart>,
}

impl TailLeadingTerm {
    fn from_term(t: &Term) -> Result<Self> {
        let (first, rest) = t
            .exponent
            .split_first()
            .ok_or_else(|| Error::NoExponentialAsymptote("leading term does not decay".into()))?;
        if t.coef <= 0.0 || first.kappa <= 0.0 {
            return Err(Error::NoExponentialAsymptote(format!(
                "leading term is not a positive decaying term (coef {}, kappa {})",
                t.coef, first.kappa
            )));
        }
        Ok(TailLeadingTerm {
            coefficient: t.coef,
            rate: first.kappa.powf(1.0 / first.alpha),
            alpha: first.alpha,
            degree: t.degree,
            lower_order: rest.to_vec(),
        })
    }

    /// `ln(N x^p e^{-(lambda x)^alpha - ...})`.
    pub fn log_value(&self, x: f64) -> f64 {
        self.coefficient.ln() + self.degree * x.ln()
            - (self.rate * x).powf(self.alpha)
            - self.lower_order.iter().map(|p| p.kappa * x.powf(p.alpha)).sum::<f64>()
    }

    /// Leading term of `x -> tail(c x)`.
    pub fn rescaled(&self, c: f64) -> Self {
        TailLeadingTerm {
            coefficient: self.coefficient * c.powf(self.degree),
            rate: self.rate * c,
            alpha: self.alpha,
            degree: self.degree,
            lower_order: self
                .lower_order
                .iter()
                .map(|p| ExpPart { alpha: p.alpha, kappa: p.kappa * c.powf(p.alpha) })
                .collect(),
        }
    }
}

pub fn leading_asymptote(sys: &SystemSpec) -> Result<TailLeadingTerm> {
    sys.validate()?;
    let terms = tail_expansion(sys)?;
    let lead = terms.first().ok_or_else(|| Error::NoExponentialAsymptote("tail expansion cancelled to zero".into()))?;
    TailLeadingTerm::from_term(lead)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp(r: f64) -> DistributionSpec {
        DistributionSpec::exponential(r)
    }

    #[test]
    fn parallel_exponentials() {
        let s = SystemSpec::parallel([exp(1.0), exp(2.0), exp(3.0)]);
        let l = leading_asymptote(&s).unwrap();
        assert_eq!((l.coefficient, l.rate, l.alpha, l.degree), (1.0, 1.0, 1.0, 0.0));
        // e^{-3x} from the third component cancels against the (1, 2) pair
        let e = tail_expansion(&s).unwrap();
        let rates: Vec<f64> = e.iter().map(|t| t.exponent[0].kappa).collect();
        assert_eq!(rates, vec![1.0, 2.0, 4.0, 5.0, 6.0]);
    }

    #[test]
    fn series_of_parallel_multiplicity() {
        let block = SystemSpec::parallel([exp(1.0), exp(2.0)]);
        let s = SystemSpec::min_of(vec![block.clone(), block]);
        let l = leading_asymptote(&s).unwrap();
        assert_eq!((l.coefficient, l.rate), (1.0, 2.0));
        let s = SystemSpec::min_of(vec![
            SystemSpec::parallel([exp(1.0), exp(3.0)]),
            SystemSpec::parallel([exp(2.0), exp(1.0)]),
            SystemSpec::parallel([exp(3.0), exp(1.0)]),
        ]);
        let l = leading_asymptote(&s).unwrap();
        assert_eq!((l.coefficient, l.rate), (1.0, 3.0));
    }

    #[test]
    fn ge_series_product_of_shapes() {
        let s = SystemSpec::series([
            DistributionSpec::gen_exponential(2.0, 1.0),
            DistributionSpec::gen_exponential(3.0, 2.0),
        ]);
        let l = leading_asymptote(&s).unwrap();
        assert!((l.coefficient - 6.0).abs() < 1e-12);
        assert!((l.rate - 3.0).abs() < 1e-12);
        let s = SystemSpec::series([
            DistributionSpec::gen_exponential(0.5, 1.0),
            DistributionSpec::gen_exponential(2.5, 1.0),
        ]);
        let l = leading_asymptote(&s).unwrap();
        assert!((l.coefficient - 1.25).abs() < 1e-12);
    }

    #[test]
    fn gamma_polynomial_prefactor() {
        let s = SystemSpec::parallel([DistributionSpec::gamma_int(3, 2.0), DistributionSpec::gamma_int(2, 1.0)]);
        let l = leading_asymptote(&s).unwrap();
        assert_eq!((l.coefficient, l.rate, l.degree), (1.0, 1.0, 1.0));
    }

    #[test]
    fn mixed_weibull_slowest_shape_wins() {
        let s = SystemSpec::parallel([DistributionSpec::weibull(2.0, 0.1), DistributionSpec::weibull(0.5, 9.0)]);
        let l = leading_asymptote(&s).unwrap();
        assert_eq!(l.alpha, 0.5);
        assert!((l.rate - 9.0).abs() < 1e-12);
        let s = SystemSpec::series([DistributionSpec::weibull(2.0, 1.0), DistributionSpec::weibull(1.0, 3.0)]);
        let l = leading_asymptote(&s).unwrap();
        assert_eq!((l.alpha, l.rate), (2.0, 1.0));
        assert_eq!(l.lower_order, vec![ExpPart { alpha: 1.0, kappa: 3.0 }]);
    }

    #[test]
    fn bounded_support_has_no_asymptote() {
        let s = SystemSpec::parallel([DistributionSpec::u_quadratic(0.0, 4.0), exp(1.0)]);
        assert!(matches!(leading_asymptote(&s), Err(Error::NoExponentialAsymptote(_))));
    }

    #[test]
    fn rescaling() {
        let l = TailLeadingTerm { coefficient: 2.0, rate: 3.0, alpha: 1.0, degree: 1.0, lower_order: vec![] };
        let r = l.rescaled(0.5);
        assert!((r.log_value(7.0) - l.log_value(3.5)).abs() < 1e-12);
    }
}
