use proptest::prelude::*;

use xorder_core::asymptotics::{
    asymptotic_line, decide_comparability, line_verdict, DecideConfig, LineConfig, LineVerdict, LinearAsymptote,
};
use xorder_core::distcore::DistributionSpec as D;
use xorder_core::orders::{quantile_compose, sign_pattern, star_allows, v_values};
use xorder_core::systems::{system_scale_equivalent, SystemSpec as S};
use xorder_core::Lifetime;

fn rate() -> impl Strategy<Value = f64> {
    0.3f64..3.0
}

fn law() -> impl Strategy<Value = D> {
    prop_oneof![
        rate().prop_map(D::exponential),
        (0.5f64..3.0, rate()).prop_map(|(a, l)| D::weibull(a, l)),
        (1u32..5, rate()).prop_map(|(a, l)| D::gamma_int(a, l)),
        (0.5f64..4.0, rate()).prop_map(|(a, l)| D::gen_exponential(a, l)),
    ]
}

fn system() -> impl Strategy<Value = S> {
    prop_oneof![
        law().prop_map(S::from),
        prop::collection::vec(law(), 2..4).prop_map(S::parallel),
        prop::collection::vec(law(), 2..4).prop_map(S::series),
    ]
}

fn exp_parallel() -> impl Strategy<Value = S> {
    prop::collection::vec(0.5f64..3.0, 1..4).prop_map(|r| S::parallel(r.into_iter().map(D::exponential)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cdf_and_tail_sum_to_one(s in system(), x in 0.0f64..20.0) {
        prop_assert!((s.cdf(x) + s.tail(x) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn quantile_inverts_cdf(s in system(), p in 1e-6f64..(1.0 - 1e-6)) {
        let q = s.quantile(p).unwrap();
        prop_assert!((s.cdf(q) - p).abs() <= 1e-10, "p = {}, q = {}, F(q) = {}", p, q, s.cdf(q));
    }

    #[test]
    fn composition_with_itself_is_identity(s in system(), t in 0.01f64..10.0) {
        let h = quantile_compose(&s, &s, t).unwrap();
        prop_assert!((h - t).abs() <= 1e-9 * t.max(1.0), "{} -> {}", t, h);
    }

    #[test]
    fn v_vanishes_on_the_identity_map(s in system()) {
        let pts: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        prop_assert!(v_values(&s, &s, 1.0, 0.0, &pts).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn scaled_copies_are_recognised(s in system(), k in 0.2f64..5.0) {
        let scaled = s.scaled(k).unwrap();
        let found = system_scale_equivalent(&s, &scaled);
        prop_assert!(found.is_some());
        let f = found.unwrap();
        prop_assert!((f - k).abs() <= 1e-9 * k || (f * k - 1.0).abs() <= 1e-9, "k = {}, found {}", k, f);
    }

    #[test]
    fn sign_pattern_is_odd_and_scale_free(v in prop::collection::vec(-1.0f64..1.0, 1..200), s in 1e-6f64..1e6) {
        let p = sign_pattern(&v, 1e-9).unwrap();
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        let big: Vec<f64> = v.iter().map(|x| x * s).collect();
        prop_assert_eq!(sign_pattern(&neg, 1e-9).unwrap().signs, p.flipped().signs);
        prop_assert_eq!(sign_pattern(&big, 1e-9).unwrap().signs, p.signs.clone());
        prop_assert!(p.signs.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn star_pattern_allows_single_upcrossing(n in 1usize..50, m in 1usize..50) {
        let v: Vec<f64> = (0..n).map(|_| -1.0).chain((0..m).map(|_| 1.0)).collect();
        prop_assert!(star_allows(&sign_pattern(&v, 1e-9).unwrap()));
        let w: Vec<f64> = v.iter().map(|x| -x).collect();
        prop_assert!(!star_allows(&sign_pattern(&w, 1e-9).unwrap()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn line_recovered_from_decaying_perturbation(b in 0.1f64..10.0, c in -5.0f64..5.0) {
        let l = asymptotic_line(|x| Ok(b * x + c + (-x).exp()), &LineConfig::default()).unwrap();
        prop_assert!(l.converged);
        prop_assert!((l.slope - b).abs() <= 1e-10 * b.max(1.0), "slope {} vs {}", l.slope, b);
        prop_assert!((l.intercept - c).abs() <= 1e-10 * b.max(1.0), "intercept {} vs {}", l.intercept, c);
    }

    #[test]
    fn intercept_sign_fixes_line_verdict(c in -5.0f64..5.0, linear in any::<bool>()) {
        let line = LinearAsymptote { slope: 1.0, intercept: c, converged: true, points: vec![], residuals: vec![], tolerance: 1e-4 };
        let v = line_verdict(&line, linear, 1e-3);
        let expected = if c > 1e-3 {
            LineVerdict::NotConvex
        } else if c < -1e-3 {
            LineVerdict::NotConcave
        } else if linear {
            LineVerdict::Inconclusive
        } else {
            LineVerdict::NeitherConvexNorConcave
        };
        prop_assert_eq!(v, expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn decision_is_antisymmetric(x in exp_parallel(), y in exp_parallel()) {
        let cfg = DecideConfig::default();
        let fwd = decide_comparability(&x, &y, &cfg).unwrap();
        let rev = decide_comparability(&y, &x, &cfg).unwrap();
        prop_assert_eq!(fwd.relation.swapped(), rev.relation, "{:?} vs {:?}", x, y);
    }
}
