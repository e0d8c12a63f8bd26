//! Acceptance checks, one line per criterion. Exits non-zero on any failure.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Weibull};

use xorder_core::asymptotics::{
    asymptotic_line, classify_variation, decide_comparability, erpv_probe, tail_ratio_limit, DecideConfig, LineConfig,
    LineVerdict, ProbeSequence, Relation, VariationLabel,
};
use xorder_core::distcore::{BuiltinTail, DistributionSpec as D};
use xorder_core::orders::{
    convex_order_test, quantile_compose, saunders_moran_d, sign_pattern, sm_order_test, star_order_test, v_values,
    ConvexRelation, SmFamily, SmRelation, SweepConfig,
};
use xorder_core::report::{to_pretty, verdict_document, write_curve_csv};
use xorder_core::systems::{FgmCoefficients, SystemSpec as S};
use xorder_core::{Lifetime, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn exps(rates: &[f64]) -> S {
    S::parallel(rates.iter().map(|&r| D::exponential(r)))
}

fn weibull_max(alpha: f64, n: f64) -> D {
    D::power_of(D::weibull(alpha, 1.0), n)
}

fn composition_slope() -> Result<Outcome> {
    let (x, y) = (weibull_max(2.0, 2.0), D::weibull(2.0, 1.0));
    let d = |t: f64, h: f64| -> Result<f64> {
        Ok((quantile_compose(&x, &y, t + h)? - quantile_compose(&x, &y, t - h)?) / (2.0 * h))
    };
    let (zero, one, inf) = (d(1e-4, 1e-6)?, d(1.0, 1e-5)?, d(40.0, 1e-4)?);
    let pass = near(one, 1.08453, 1e-3) && near(zero, 0.0, 1e-3) && near(inf, 1.0, 1e-3);
    outcome(pass, format!("h'(0+) = {zero:.2e}, h'(1) = {one:.6}, h'(40) = {inf:.6}"))
}

fn weibull_maxima_orders() -> Result<Outcome> {
    let cfg = SweepConfig::default();
    let mut violations = 0;
    for alpha in [0.5, 1.0, 2.0] {
        for (k, m) in [(2.0, 1.0), (3.0, 2.0), (5.0, 2.0)] {
            violations += star_order_test(&weibull_max(alpha, k), &weibull_max(alpha, m), &cfg)?.violations;
        }
    }
    let c = convex_order_test(&weibull_max(2.0, 2.0), &D::weibull(2.0, 1.0), &cfg, true)?;
    let (f, r) = (c.forward.witnesses.len(), c.reverse.witnesses.len());
    let pass = violations == 0 && c.relation == ConvexRelation::NonComparable && f > 0 && r > 0;
    outcome(pass, format!("{violations} star violations over 9 pairs; convex witnesses {f} forward, {r} reverse"))
}

fn exponential_maxima() -> Result<Outcome> {
    let cfg = DecideConfig::default();
    let mut notes = Vec::new();
    let mut pass = true;
    for (lx, ly, c) in [(&[1.0, 2.0, 3.0][..], &[1.5, 2.5][..], 1.0 / 1.5), (&[1.0, 2.0][..], &[1.0, 3.0][..], 1.0)] {
        let (x, y) = (exps(lx), exps(ly));
        let line = asymptotic_line(|t| quantile_compose(&x, &y, t), &LineConfig::default())?;
        let v = decide_comparability(&x, &y, &cfg)?;
        let ok = line.converged
            && near(line.slope, c, 1e-3)
            && near(line.intercept, 0.0, 1e-3)
            && v.diagnostics.line_verdict == Some(LineVerdict::NeitherConvexNorConcave)
            && v.relation == Relation::NonComparable
            && v.candidate_c.is_some_and(|k| near(k, c, 1e-12));
        pass &= ok;
        notes.push(format!(
            "{lx:?} vs {ly:?}: b = {:.6}, c = {:.1e}, {}",
            line.slope,
            line.intercept,
            v.relation.as_str()
        ));
    }
    outcome(pass, notes.join("; "))
}

fn variation_classes() -> Result<Outcome> {
    let class = |t| classify_variation(&D::builtin(t).into());
    let sv = class(BuiltinTail::InvLog);
    let rv = class(BuiltinTail::InvQuadratic);
    let rpv = class(BuiltinTail::ExpLogSquared);
    let probe = erpv_probe(&D::builtin(BuiltinTail::ExpLogSquared), 1.0, &ProbeSequence::default())?;
    let index = rv.index.unwrap_or(f64::NAN);
    let pass = sv.label == VariationLabel::SlowlyVarying
        && rv.label == VariationLabel::RegularlyVarying
        && near(index, -2.0, 0.05)
        && rpv.label == VariationLabel::RapidlyVaryingMinusInf
        && probe.is_one(1e-3);
    outcome(
        pass,
        format!(
            "{}, {} ({index:.4}), {} with shift limit {:?}",
            sv.label.as_str(),
            rv.label.as_str(),
            rpv.label.as_str(),
            probe.value
        ),
    )
}

fn saunders_moran() -> Result<Outcome> {
    let ge_n = SmFamily::Power { base: D::gen_exponential(1.5, 1.0) };
    let mut in_n = true;
    for (k, m) in [(1.0, 2.0), (2.0, 3.0), (2.0, 5.0)] {
        in_n &= sm_order_test(&ge_n, k, m, None)?.relation == SmRelation::SecondStarLeFirst;
    }
    let lambda = 0.8;
    let ge_l = SmFamily::Scale { base: D::gen_exponential(2.0, 1.0) };
    let v = sm_order_test(&ge_l, lambda, 2.0, None)?;
    let mut exact = true;
    for x in v.grid.points() {
        exact &= saunders_moran_d(&ge_l, lambda, x)? == 1.0 / lambda;
    }
    let u = sm_order_test(&SmFamily::Power { base: D::u_quadratic(0.0, 4.0) }, 1.0, 2.0, None)?;
    let pass = in_n && v.relation == SmRelation::Equivalent && exact && u.relation == SmRelation::NonComparableInStar;
    outcome(
        pass,
        format!(
            "GE in n ordered: {in_n}; GE in lambda {:?}, D exact: {exact}; u-quadratic {:?}",
            v.relation, u.relation
        ),
    )
}

fn application_systems() -> Result<Vec<(&'static str, S, S, f64)>> {
    let w = |a: f64, r: &[f64]| S::parallel(r.iter().map(|&v| D::weibull(a, v)));
    let g = |p: &[(u32, f64)]| S::parallel(p.iter().map(|&(a, r)| D::gamma_int(a, r)));
    let ge = |p: &[(f64, f64)]| S::series(p.iter().map(|&(a, r)| D::gen_exponential(a, r)));
    let fgm3 = FgmCoefficients::from_upper(3, &[vec![0.3, -0.2], vec![0.4]])?;
    let fgm2 = FgmCoefficients::from_upper(2, &[vec![0.5]])?;
    Ok(vec![
        ("weibull 0.5", w(0.5, &[1.0, 2.0]), w(0.5, &[1.5, 2.5]), 1.0 / 1.5),
        ("weibull 2", w(2.0, &[1.0, 2.0]), w(2.0, &[1.5, 2.5]), 1.0 / 1.5),
        ("gamma", g(&[(2, 1.0), (3, 2.0)]), g(&[(2, 1.5), (3, 2.0)]), 1.0 / 1.5),
        ("gen-exp series", ge(&[(2.0, 1.0), (3.0, 2.0)]), ge(&[(1.5, 1.0), (4.0, 2.5)]), 3.0 / 3.5),
        (
            "series of parallel",
            S::min_of(vec![exps(&[1.0, 2.0]), exps(&[1.0, 3.0])]),
            S::min_of(vec![exps(&[1.5, 2.0]), exps(&[1.5, 4.0])]),
            2.0 / 3.0,
        ),
        (
            "fgm exponential",
            exps(&[1.0, 2.0]),
            S::fgm_parallel(vec![D::exponential(1.5), D::exponential(2.0), D::exponential(3.0)], fgm3)?,
            1.0 / 1.5,
        ),
        (
            "fgm weibull",
            S::parallel([D::weibull(2.0, 1.0), D::weibull(2.0, 3.0)]),
            S::fgm_parallel(vec![D::weibull(2.0, 1.5), D::weibull(2.0, 2.0)], fgm2)?,
            1.0 / 1.5,
        ),
    ])
}

fn applications() -> Result<Outcome> {
    let cfg = DecideConfig::default();
    let mut failed = Vec::new();
    let systems = application_systems()?;
    for (name, x, y, c) in &systems {
        let r = tail_ratio_limit(x, y, *c, &ProbeSequence::default())?;
        let v = decide_comparability(x, y, &cfg)?;
        if !(r.is_one(1e-3) && v.relation == Relation::NonComparable) {
            failed.push(format!("{name}: ratio {:?}, {}", r.value, v.relation.as_str()));
        }
    }
    let detail = if failed.is_empty() {
        format!("{} systems: ratio 1 at c, non_comparable", systems.len())
    } else {
        failed.join("; ")
    };
    outcome(failed.is_empty(), detail)
}

/// Tails written out directly, without the library evaluators.
#[derive(Debug, Clone)]
enum Law {
    Exp(f64),
    Weibull(f64, f64),
    Gamma(u32, f64),
    GenExp(f64, f64),
}

impl Law {
    fn tail(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        match *self {
            Law::Exp(l) => (-l * x).exp(),
            Law::Weibull(a, l) => (-(l * x).powf(a)).exp(),
            Law::Gamma(n, l) => {
                let (mut term, mut sum) = (1.0, 1.0);
                for i in 1..n {
                    term *= l * x / f64::from(i);
                    sum += term;
                }
                (-l * x).exp() * sum
            }
            Law::GenExp(a, l) => 1.0 - (1.0 - (-l * x).exp()).powf(a),
        }
    }

    fn spec(&self) -> D {
        match *self {
            Law::Exp(l) => D::exponential(l),
            Law::Weibull(a, l) => D::weibull(a, l),
            Law::Gamma(n, l) => D::gamma_int(n, l),
            Law::GenExp(a, l) => D::gen_exponential(a, l),
        }
    }
}

#[derive(Debug, Clone)]
enum Sys {
    One(Law),
    Max(Vec<Law>),
    Min(Vec<Law>),
}

impl Sys {
    fn tail(&self, x: f64) -> f64 {
        match self {
            Sys::One(l) => l.tail(x),
            Sys::Max(ls) => 1.0 - ls.iter().map(|l| 1.0 - l.tail(x)).product::<f64>(),
            Sys::Min(ls) => ls.iter().map(|l| l.tail(x)).product(),
        }
    }

    fn spec(&self) -> S {
        match self {
            Sys::One(l) => l.spec().into(),
            Sys::Max(ls) => S::parallel(ls.iter().map(Law::spec)),
            Sys::Min(ls) => S::series(ls.iter().map(Law::spec)),
        }
    }
}

fn random_law(rng: &mut ChaCha8Rng) -> Law {
    let rate = rng.random_range(0.5..2.5);
    match rng.random_range(0..4) {
        0 => Law::Exp(rate),
        1 => Law::Weibull(rng.random_range(0.6..3.0), rate),
        2 => Law::Gamma(rng.random_range(1..5), rate),
        _ => Law::GenExp(rng.random_range(0.5..3.0), rate),
    }
}

fn random_system(rng: &mut ChaCha8Rng) -> Sys {
    let kind = rng.random_range(0..3);
    let n = rng.random_range(2..4);
    let laws: Vec<Law> = (0..n).map(|_| random_law(rng)).collect();
    match kind {
        0 => Sys::One(laws[0].clone()),
        1 => Sys::Max(laws),
        _ => Sys::Min(laws),
    }
}

fn brute_force_signs(values: &[f64], epsilon: f64) -> Vec<i8> {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut out: Vec<i8> = Vec::new();
    for &v in values {
        if v.abs() <= epsilon * max {
            continue;
        }
        let s = if v > 0.0 { 1 } else { -1 };
        if out.last() != Some(&s) {
            out.push(s);
        }
    }
    out
}

fn oracle_sign_patterns() -> Result<Outcome> {
    const POINTS: usize = 65536;
    const EPSILON: f64 = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(20240607);
    let mut discrepancies = 0;
    let mut changes = [0usize; 4];
    for _ in 0..50 {
        let (x, y) = (random_system(&mut rng), random_system(&mut rng));
        let a = rng.random_range(0.25f64..4.0);
        let b = rng.random_range(-1.0..1.0);
        let hi = rng.random_range(3.0..12.0);
        let pts: Vec<f64> = (0..POINTS).map(|i| hi * i as f64 / (POINTS - 1) as f64).collect();
        let lib = sign_pattern(&v_values(&x.spec(), &y.spec(), a, b, &pts), EPSILON)?;
        let dense: Vec<f64> = pts.iter().map(|&t| y.tail(t) - x.tail(a * t + b)).collect();
        let oracle = brute_force_signs(&dense, EPSILON);
        if lib.signs != oracle {
            discrepancies += 1;
            eprintln!("  mismatch: {x:?} vs {y:?}, a = {a}, b = {b}: {lib} vs {oracle:?}");
        }
        changes[lib.changes().min(3)] += 1;
    }
    outcome(
        discrepancies == 0,
        format!("{discrepancies} discrepancies in 50 instances (sign changes 0/1/2/3+: {changes:?})"),
    )
}

fn sample(d: &D, rng: &mut ChaCha8Rng) -> f64 {
    match d {
        D::Exponential { rate } => Exp::new(*rate).unwrap().sample(rng),
        D::Weibull { shape, scale } => Weibull::new(1.0 / scale, *shape).unwrap().sample(rng),
        other => panic!("no sampler for {other:?}"),
    }
}

fn monte_carlo_gap(laws: &[D], parallel: bool, rng: &mut ChaCha8Rng) -> Result<f64> {
    const N: usize = 1_000_000;
    let s = if parallel { S::parallel(laws.iter().cloned()) } else { S::series(laws.iter().cloned()) };
    let mut xs: Vec<f64> = (0..N)
        .map(|_| {
            let draws = laws.iter().map(|d| sample(d, rng));
            if parallel {
                draws.fold(f64::NEG_INFINITY, f64::max)
            } else {
                draws.fold(f64::INFINITY, f64::min)
            }
        })
        .collect();
    xs.sort_by(f64::total_cmp);
    let top = s.quantile(0.999)?;
    Ok((1..=200)
        .map(|i| {
            let t = top * i as f64 / 200.0;
            (xs.partition_point(|&v| v <= t) as f64 / N as f64 - s.cdf(t)).abs()
        })
        .fold(0.0, f64::max))
}

fn verdict_bytes(x: &S, y: &S) -> Result<(String, Vec<u8>)> {
    let v = decide_comparability(x, y, &DecideConfig::default())?;
    let pts: Vec<f64> = (0..512).map(|i| i as f64 / 64.0).collect();
    let rows = pts.iter().map(|&t| Ok((t, quantile_compose(x, y, t)?))).collect::<Result<Vec<_>>>()?;
    let mut csv = Vec::new();
    write_curve_csv(&mut csv, &rows).expect("in-memory write");
    Ok((to_pretty(&verdict_document(&v)), csv))
}

fn infrastructure() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut worst_q, mut worst_sum) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let s = random_system(&mut rng).spec();
        let p = rng.random_range(1e-6..1.0 - 1e-6);
        worst_q = worst_q.max((s.cdf(s.quantile(p)?) - p).abs());
        let x = rng.random_range(0.0..20.0);
        worst_sum = worst_sum.max((s.cdf(x) + s.tail(x) - 1.0).abs());
    }
    let started = Instant::now();
    let laws = [D::exponential(1.0), D::weibull(2.0, 1.5), D::weibull(0.7, 0.5)];
    let mc = monte_carlo_gap(&laws, true, &mut rng)?.max(monte_carlo_gap(&laws, false, &mut rng)?);
    let mc_time = started.elapsed().as_secs_f64();

    let x = S::min_of(vec![exps(&[1.0, 2.0]), exps(&[1.0, 3.0])]);
    let y = S::parallel([D::weibull(2.0, 1.0), D::gamma_int(2, 1.5)]);
    let deterministic = verdict_bytes(&x, &y)? == verdict_bytes(&x, &y)?;

    let pass = worst_q <= 1e-10 && worst_sum <= 1e-12 && mc <= 3e-3 && mc_time < 60.0 && deterministic;
    outcome(
        pass,
        format!(
            "round trip {worst_q:.1e}, cdf + tail {worst_sum:.1e}, Monte Carlo {mc:.1e} in {mc_time:.1}s, deterministic: {deterministic}"
        ),
    )
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("composition slope for Weibull maxima", composition_slope),
        ("star order of Weibull maxima, convex witnesses", weibull_maxima_orders),
        ("exponential maxima: asymptotic line and non-comparability", exponential_maxima),
        ("variation classes of builtin tails", variation_classes),
        ("Saunders-Moran families", saunders_moran),
        ("system applications via tail ratios", applications),
        ("sign patterns against a dense brute-force counter", oracle_sign_patterns),
        ("evaluator infrastructure", infrastructure),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!pass);
        println!(
            "{} {}. {name} ({:.2}s): {detail}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            started.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
