use super::spec::DistributionSpec;

const REL: f64 = 1e-12;

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL * a.abs().max(b.abs())
}

/// Rewrites a law into a unique representative of its parametrisation:
/// unit-shape Weibull, GE and Gamma become exponential, GE becomes a power of
/// an exponential, unit exponents disappear and nested powers are merged.
pub fn canonical(spec: &DistributionSpec) -> DistributionSpec {
    use DistributionSpec::*;
    match spec {
        Weibull { shape, scale } if *shape == 1.0 => Exponential { rate: *scale },
        GammaInt { shape: 1, rate } => Exponential { rate: *rate },
        GenExponential { shape, rate } => canonical(&DistributionSpec::power_of(Exponential { rate: *rate }, *shape)),
        PowerOf { base, exponent } => {
            let b = canonical(base);
            if *exponent == 1.0 {
                return b;
            }
            match b {
                PowerOf { base: inner, exponent: e } => canonical(&PowerOf { base: inner, exponent: e * exponent }),
                other => PowerOf { base: Box::new(other), exponent: *exponent },
            }
        }
        TailPowerOf { base, exponent } => {
            let t = *exponent;
            let b = canonical(base);
            if t == 1.0 {
                return b;
            }
            match b {
                Exponential { rate } => Exponential { rate: rate * t },
                Weibull { shape, scale } => Weibull { shape, scale: scale * t.powf(1.0 / shape) },
                TailPowerOf { base: inner, exponent: e } => canonical(&TailPowerOf { base: inner, exponent: e * t }),
                other => TailPowerOf { base: Box::new(other), exponent: t },
            }
        }
        other => other.clone(),
    }
}

/// `k > 0` with `F_a(x) = F_b(k x)` for every `x`, decided from the
/// parametrisations alone.
pub fn scale_equivalent(a: &DistributionSpec, b: &DistributionSpec) -> Option<f64> {
    canonical_factor(&canonical(a), &canonical(b))
}

fn canonical_factor(a: &DistributionSpec, b: &DistributionSpec) -> Option<f64> {
    use DistributionSpec::*;
    match (a, b) {
        (Exponential { rate: r1 }, Exponential { rate: r2 }) => Some(r1 / r2),
        (Weibull { shape: s1, scale: l1 }, Weibull { shape: s2, scale: l2 }) if same(*s1, *s2) => Some(l1 / l2),
        (GammaInt { shape: s1, rate: r1 }, GammaInt { shape: s2, rate: r2 }) if s1 == s2 => Some(r1 / r2),
        (UQuadratic { left: a1, right: b1 }, UQuadratic { left: a2, right: b2 }) => {
            // [a1, b1] must equal [a2, b2] / k
            let k = b2 / b1;
            if (a2 - k * a1).abs() <= REL * b2.abs() {
                Some(k)
            } else {
                None
            }
        }
        (PowerOf { base: b1, exponent: e1 }, PowerOf { base: b2, exponent: e2 })
        | (TailPowerOf { base: b1, exponent: e1 }, TailPowerOf { base: b2, exponent: e2 })
            if same(*e1, *e2) =>
        {
            canonical_factor(b1, b2)
        }
        (Builtin { name: n1 }, Builtin { name: n2 }) if n1 == n2 => Some(1.0),
        _ => None,
    }
}
