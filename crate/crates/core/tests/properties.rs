use std::collections::BTreeMap;

use bubblekit::bubbles::{kelvin_field, kelvin_point, KelvinSpec};
use bubblekit::cli::write_json;
use bubblekit::fraclap::{fraclap_pv, gaussian, FracLapConvention};
use bubblekit::inequalities::{explogl_gap, explogl_gap_sharp};
use bubblekit::par::{self, Exec};
use bubblekit::potentials::{green_half_ball, GreenBallParams};
use bubblekit::verify::{IntegralCheck, ResidualRecord, VerificationReport};
use bubblekit::{Point, QuadratureConfig, ScalarField};
use proptest::prelude::*;

fn point2() -> impl Strategy<Value = Point> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(a, b)| Point::xy(a, b))
}

fn point3_in_ball() -> impl Strategy<Value = Point> {
    (0.05..0.95f64, 0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU).prop_map(|(r, t, p)| {
        Point::xyz(r * t.sin() * p.cos(), r * t.sin() * p.sin(), r * t.cos())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kelvin_point_is_an_involution(x in point2(), x0 in point2(), lambda in 0.1..5.0f64) {
        prop_assume!(x.dist(&x0) > 1e-3);
        let spec = KelvinSpec::new(x0, lambda, 0.0).unwrap();
        let back = kelvin_point(&kelvin_point(&x, &spec).unwrap(), &spec).unwrap();
        // the second inversion amplifies rounding in x* − x0 by |x − x0|²/λ²
        let d = x.dist(&x0);
        let scale = (1.0 + x.norm() + x0.norm()) * (1.0 + d * d / (lambda * lambda));
        prop_assert!(back.dist(&x) <= 1e-13 * scale);
    }

    #[test]
    fn kelvin_field_is_an_involution(x in point2(), lambda in 0.2..3.0f64, nu in 0.0..3.0f64) {
        prop_assume!(x.norm() > 1e-2);
        let f = ScalarField::new(2, |y| (1.0 + y.norm_sq()).recip()).unwrap();
        let spec = KelvinSpec::new(Point::xy(0.0, 0.0), lambda, nu).unwrap();
        let s = spec;
        let g = f.clone();
        let once = ScalarField::new(2, move |y| kelvin_field(&g, &s, y).unwrap()).unwrap();
        let twice = kelvin_field(&once, &spec, &x).unwrap();
        prop_assert!((twice - f.eval(&x)).abs() <= 1e-12);
    }

    #[test]
    fn explogl_gap_is_nonnegative(a in 0.0..50.0f64, b in 0.0..50.0f64) {
        let gap = explogl_gap(a, b).unwrap();
        let sharp = explogl_gap_sharp(a, b).unwrap();
        prop_assert!(gap >= -1e-12 * gap.abs().max(1.0));
        prop_assert!(sharp >= -1e-12 * gap.abs().max(1.0));
        prop_assert!(sharp <= gap + 1e-12 * gap.abs().max(1.0));
    }

    #[test]
    fn green_function_is_symmetric_positive_and_scales(x in point3_in_ball(), y in point3_in_ball(), r in 0.2..5.0f64) {
        prop_assume!(x.dist(&y) > 1e-6);
        let unit = GreenBallParams::new(1.0).unwrap();
        let gxy = green_half_ball(&unit, &x, &y).unwrap();
        prop_assert!(gxy > 0.0);
        prop_assert!((gxy - green_half_ball(&unit, &y, &x).unwrap()).abs() <= 1e-14 * gxy);
        let big = GreenBallParams::new(r).unwrap();
        let scaled = green_half_ball(&big, &(x * r), &(y * r)).unwrap() * r;
        prop_assert!((scaled - gxy).abs() <= 1e-10 * gxy);
        let out = x * (1.5 / x.norm());
        prop_assert_eq!(green_half_ball(&unit, &out, &y).unwrap(), 0.0);
    }

    #[test]
    fn residual_record_error_measures(l in -1e3..1e3f64, r in -1e3..1e3f64, tol in 0.0..1.0f64) {
        let rec = ResidualRecord::new("eq", Point::xy(0.0, 0.0), l, r, tol);
        prop_assert_eq!(rec.abs_err, (l - r).abs());
        prop_assert_eq!(rec.rel_err, (l - r).abs() / r.abs().max(1.0));
        prop_assert_eq!(rec.passed(), rec.rel_err <= tol);
    }

    #[test]
    fn report_json_round_trips(vals in prop::collection::vec((-1e6..1e6f64, -1e6..1e6f64), 0..8), seed in any::<u64>()) {
        let records = vals
            .iter()
            .enumerate()
            .map(|(k, (l, r))| ResidualRecord::new(format!("eq{k}"), Point::xy(*l, -*r), *l, *r, 1e-3))
            .collect();
        let mut integrals = BTreeMap::new();
        integrals.insert("i".to_string(), IntegralCheck::new(seed as f64 * 1e-3, 1.0 / 3.0, 1e-6));
        let rep = VerificationReport::new("s", records, integrals, serde_json::json!({ "seed": seed, "x": 0.1 }));
        let mut buf = Vec::new();
        write_json(&rep, &mut buf).unwrap();
        let back: VerificationReport = serde_json::from_slice(&buf).unwrap();
        prop_assert_eq!(back, rep);
    }

    #[test]
    fn parallel_map_matches_sequential(xs in prop::collection::vec(-1e3..1e3f64, 0..200)) {
        let f = |x: &f64| x.sin() * x.exp2().ln_1p();
        let a = par::map(Exec::Sequential, &xs, f);
        let b = par::map(Exec::Parallel, &xs, f);
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn half_laplacian_is_linear(a in -2.0..2.0f64, b in -2.0..2.0f64, w1 in 0.5..2.0f64, w2 in 0.5..2.0f64, x in point2()) {
        let cfg = QuadratureConfig::default();
        let conv = FracLapConvention::half_laplacian(2).unwrap();
        let (g1, g2) = (gaussian(2, w1).unwrap(), gaussian(2, w2).unwrap());
        let combo = ScalarField::linear_combination(a, &g1, b, &g2).unwrap();
        let lhs = fraclap_pv(&combo, &x, &conv, &cfg).unwrap().value;
        let rhs = a * fraclap_pv(&g1, &x, &conv, &cfg).unwrap().value + b * fraclap_pv(&g2, &x, &conv, &cfg).unwrap().value;
        prop_assert!((lhs - rhs).abs() <= 1e-6 * (a.abs() + b.abs()).max(1e-3));
    }
}
