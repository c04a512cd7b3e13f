mod common;

use affthermo::classify::{find_domination_certificate, Domination, DominationSearch};
use affthermo::pressure::{
    measure_diagnostics, phi_weights, pressure_dispatch, pressure_estimate, Certificate, CylinderMeasure,
};
use affthermo::symbolic::SubshiftKind;
use affthermo::Mat2;
use common::*;
use proptest::prelude::*;

fn any_kind() -> impl Strategy<Value = SubshiftKind> {
    prop_oneof![
        Just(SubshiftKind::Full),
        Just(SubshiftKind::Sigma),
        Just(SubshiftKind::Invertible)
    ]
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn leq(a: f64, b: f64, tol: f64) -> bool {
    a == f64::NEG_INFINITY || a <= b + tol * (1.0 + b.abs())
}

/// Similarities: a positive scale times a rotation, sometimes a reflection.
fn similarity() -> impl Strategy<Value = Mat2> {
    (0.05..0.9f64, 0.0..std::f64::consts::TAU, any::<bool>()).prop_map(|(r, t, flip)| {
        let m = Mat2::rotation(t).scale(r);
        if flip {
            m * Mat2::diag(1.0, -1.0)
        } else {
            m
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn level_sums_are_subadditive(mats in contractive_tuple(1..=3), kind in any_kind(), s in 0.0..3.0f64, n in 2usize..=6) {
        let e = pressure_estimate(&ifs(&mats), kind, s, n, None).unwrap();
        let z = &e.log_sums;
        for j in 1..n {
            for k in 1..=n - j {
                prop_assert!(leq(z[j + k - 1], z[j - 1] + z[k - 1], 1e-9), "L{} = {} > L{} + L{} = {}", j + k, z[j + k - 1], j, k, z[j - 1] + z[k - 1]);
            }
        }
        let shorter = pressure_estimate(&ifs(&mats), kind, s, n - 1, None).unwrap();
        prop_assert!(e.upper <= shorter.upper);
        prop_assert!(e.lower <= e.upper);
    }

    #[test]
    fn pressure_is_lipschitz_and_decreasing_in_s(
        mats in contractive_tuple(1..=3),
        kind in any_kind(),
        t in prop_oneof![1 => Just(0.0), 1 => Just(1.0), 6 => 0.0..3.0f64],
        ds in 0.0..1.5f64,
        n in 1usize..=6,
    ) {
        let s = t + ds;
        let t_ifs = ifs(&mats);
        let at_t = pressure_estimate(&t_ifs, kind, t, n, None).unwrap().upper;
        let at_s = pressure_estimate(&t_ifs, kind, s, n, None).unwrap().upper;
        let slope = t_ifs.max_norm().ln();
        let bound = if ds == 0.0 { at_t } else { at_t + ds * slope };
        prop_assert!(leq(at_s, bound, 1e-9), "P({s}) = {at_s} > {bound}");
        prop_assert!(leq(at_s, at_t, 1e-9));
    }

    #[test]
    fn dispatch_matches_the_full_shift(mats in mixed_tuple(3), s in 0.0..3.0f64, n in 1usize..=6) {
        let t = ifs(&mats);
        let routed = pressure_dispatch(&t, s, n).unwrap();
        let full = pressure_estimate(&t, SubshiftKind::Full, s, n, None).unwrap();
        prop_assert!(close(routed.upper, full.upper, 1e-9), "{} vs {}", routed.upper, full.upper);
        for (a, b) in routed.log_sums.iter().zip(&full.log_sums) {
            prop_assert!(close(*a, *b, 1e-9), "{a} vs {b}");
        }
    }

    #[test]
    fn zero_exponent_counts_letters(mats in tuple(any_letter(), 1..=6), n in 1usize..=6) {
        let t = ifs(&mats);
        let full = pressure_dispatch(&t, 0.0, n).unwrap();
        let expected = (mats.len() as f64).ln();
        prop_assert_eq!((full.lower, full.upper), (expected, expected));
        let invertible = pressure_estimate(&t, SubshiftKind::Invertible, 0.0, n, None).unwrap();
        let count = t.invertible_indices().len();
        let expected = if count == 0 { f64::NEG_INFINITY } else { (count as f64).ln() };
        prop_assert_eq!((invertible.lower, invertible.upper), (expected, expected));
    }

    #[test]
    fn similarities_are_exact(mats in tuple(similarity(), 1..=4), s in 0.0..3.0f64, n in 1usize..=6) {
        let e = pressure_estimate(&ifs(&mats), SubshiftKind::Full, s, n, None).unwrap();
        prop_assert_eq!(e.lower, e.upper);
        prop_assert!(matches!(e.certificate, Certificate::Conformal | Certificate::Exact));
        // oracle: φ^s multiplies along words, so P(s) = log Σ r_i^s
        let oracle = mats.iter().map(|m| m.norm().powf(s)).sum::<f64>().ln();
        prop_assert!(close(e.upper, oracle, 1e-9), "{} vs {oracle}", e.upper);
    }

    #[test]
    fn entropy_plus_energy_stays_below_pressure(
        mats in contractive_tuple(1..=3),
        raw in prop::collection::vec(0.0..1.0f64, 3),
        s in 0.0..3.0f64,
        n in 1usize..=5,
    ) {
        let t = ifs(&mats);
        let p: Vec<f64> = raw[..mats.len()].iter().map(|x| x + 1e-3).collect();
        let total: f64 = p.iter().sum();
        let p: Vec<f64> = p.iter().map(|x| x / total).collect();
        let p_total: f64 = p.iter().sum();
        prop_assume!((p_total - 1.0).abs() <= 1e-12);
        let mu = CylinderMeasure::bernoulli(&p, n).unwrap();
        let d = measure_diagnostics(&t, &mu, s).unwrap();
        prop_assert!(d.jensen_holds(1e-9), "{d:?}");
    }

    #[test]
    fn phi_weights_attain_equality(mats in contractive_tuple(1..=3), kind in any_kind(), s in 0.0..3.0f64, n in 1usize..=5) {
        let t = ifs(&mats);
        if let Ok(mu) = phi_weights(&t, kind, s, n) {
            prop_assert!((mu.total() - 1.0).abs() <= 1e-12);
            prop_assert!(mu.weights.iter().all(|w| *w >= 0.0));
            let d = measure_diagnostics(&t, &mu, s).unwrap();
            let lhs = d.entropy_rate + d.energy_rate;
            prop_assert!((lhs - d.pressure_upper).abs() <= 1e-9, "{lhs} vs {}", d.pressure_upper);
        }
    }

    #[test]
    fn lower_bounds_never_pass_upper_bounds(
        mats in contractive_tuple(1..=3),
        kind in any_kind(),
        s in 0.0..2.0f64,
        n in 1usize..=7,
        m in 1usize..=7,
    ) {
        let t = ifs(&mats);
        let cert = match find_domination_certificate(&t, &DominationSearch::default()) {
            Ok(Domination::Certified(c)) => Some(c),
            _ => None,
        };
        let lo = pressure_estimate(&t, kind, s, n, cert.as_ref()).unwrap().lower;
        let hi = pressure_estimate(&t, kind, s, m, None).unwrap().upper;
        prop_assert!(leq(lo, hi, 1e-9), "lower({n}) = {lo} > upper({m}) = {hi}");
    }
}
