use std::f64::consts::{FRAC_PI_2, PI, TAU};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wire_billiards::chord::chord_angles;
use wire_billiards::curve::{CurveKind, FourierMode};
use wire_billiards::reflection::{iterate_orbit_all_roots, solve_chord, Reflector, DEFAULT_NICE_GRID, DEFAULT_NICE_MARGIN};
use wire_billiards::{check_nice, iterate_orbit, jacobian_check, reflect, Curve, CurveSpec, Error, PhasePoint, ReflectMode};

fn gap(a: f64, b: f64, len: f64) -> f64 {
    let d = (a - b).rem_euclid(len);
    d.min(len - d)
}

#[test]
fn circle_successor() {
    let c = Curve::new(CurveSpec::circle(1.0)).unwrap();
    for s in [0.3, 1.0, 2.0] {
        for mode in [ReflectMode::Nice, ReflectMode::AllRoots] {
            let z = reflect(&c, PhasePoint::new(0.0, s), mode).unwrap();
            assert_eq!(z.len(), 1);
            assert!(gap(z[0], 2.0 * s, c.length()) < 1e-12);
        }
    }
}

#[test]
fn coil_successor_is_the_shift() {
    let c = Curve::new(CurveSpec::coil(0.05, 2)).unwrap();
    for d in [0.4, 1.3, 2.9] {
        let y = c.x_of_t(d);
        let z = reflect(&c, PhasePoint::new(0.0, y), ReflectMode::Nice).unwrap();
        assert!(gap(z[0], c.x_of_t(2.0 * d), c.length()) < 1e-10, "d = {d}");
    }
}

#[test]
fn orthogonal_circles_are_multivalued() {
    let c = Curve::new(CurveSpec::new(CurveKind::OrthogonalCircles { half_width: 0.6 })).unwrap();
    let r = Reflector::new(&c);
    let x = c.x_of_t(0.1);
    let y = c.x_of_t(PI - 0.05);
    let roots = r.all_roots(PhasePoint::new(x, y)).unwrap();
    assert!(roots.len() > 1, "roots {roots:?}");
    assert!(!check_nice(&c, DEFAULT_NICE_GRID, DEFAULT_NICE_MARGIN).pass);
}

#[test]
fn circle_orbit_closes() {
    let c = Curve::new(CurveSpec::circle(1.0)).unwrap();
    let y0 = solve_chord(&c, 0.0, PI / 4.0, None).unwrap();
    assert!((y0 - FRAC_PI_2).abs() < 1e-12);
    let o = iterate_orbit(&c, PhasePoint::new(0.0, y0), 4).unwrap();
    for (k, p) in o.points.iter().enumerate() {
        assert!(gap(p.x, k as f64 * FRAC_PI_2, c.length()) < 1e-10);
    }
}

#[test]
fn coil_orbit_closes_after_five_steps() {
    let c = Curve::new(CurveSpec::coil(0.05, 2)).unwrap();
    let o = iterate_orbit(&c, PhasePoint::new(0.0, c.x_of_t(TAU / 5.0)), 5).unwrap();
    assert!(gap(o.points[5].x, 0.0, c.length()) < 1e-8);
}

#[test]
fn ellipse_glancing_orbit_residuals() {
    let c = Curve::new(CurveSpec::ellipse(2.0, 1.0)).unwrap();
    let y0 = solve_chord(&c, 0.3, 0.05, None).unwrap();
    let o = iterate_orbit(&c, PhasePoint::new(0.3, y0), 10_000).unwrap();
    assert_eq!(o.steps(), 10_000);
    assert!(o.max_residual() < 1e-10, "{}", o.max_residual());
}

#[test]
fn accepted_roots_satisfy_the_equal_angle_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for spec in [CurveSpec::ellipse(2.0, 1.0), CurveSpec::coil(0.05, 2), CurveSpec::coil(0.1, 3)] {
        let c = Curve::new(spec).unwrap();
        let r = Reflector::new(&c);
        for _ in 0..30 {
            let x = rng.gen_range(0.0..c.length());
            let y = x + rng.gen_range(0.05..0.95) * c.length();
            let p = PhasePoint::new(x, c.reduce(y).unwrap());
            for z in r.all_roots(p).unwrap() {
                let (_, beta, _) = chord_angles(&c, p.x, p.y);
                let (alpha, _, _) = chord_angles(&c, p.y, z);
                assert!((beta.cos() - alpha.cos()).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn twist_is_monotone_on_nice_curves() {
    let c = Curve::new(CurveSpec::coil(0.05, 2)).unwrap();
    let len = c.length();
    for y in [0.0, 1.1, 3.7] {
        let mut last = 0.0;
        for i in 1..200 {
            let z = y + i as f64 * len / 200.0;
            let (alpha, _, _) = chord_angles(&c, y, z);
            assert!(alpha > last, "α not increasing at z = {z}");
            last = alpha;
        }
    }
}

#[test]
fn niceness_examples() {
    let coil = Curve::new(CurveSpec::coil(0.05, 2)).unwrap();
    let report = check_nice(&coil, DEFAULT_NICE_GRID, DEFAULT_NICE_MARGIN);
    assert!(report.pass, "{}", report.summary());
    let ellipse = Curve::new(CurveSpec::ellipse(2.0, 1.0)).unwrap();
    assert!(check_nice(&ellipse, DEFAULT_NICE_GRID, DEFAULT_NICE_MARGIN).pass);
    let flat = Curve::new(CurveSpec::flat_point()).unwrap();
    let report = check_nice(&flat, DEFAULT_NICE_GRID, DEFAULT_NICE_MARGIN);
    assert!(!report.pass && !report.curvature_condition);
    assert!(report.min_curvature < 1e-6);
}

#[test]
fn nice_mode_refuses_a_curve_that_is_not_nice() {
    let flat = Curve::new(CurveSpec::flat_point()).unwrap();
    let err = reflect(&flat, PhasePoint::new(0.0, 1.0), ReflectMode::Nice).unwrap_err();
    assert!(matches!(err, Error::NotNice(_)), "{err:?}");
    let orbit = iterate_orbit(&flat, PhasePoint::new(0.0, 1.0), 10);
    assert!(orbit.is_err());
}

#[test]
fn small_perturbation_stays_nice() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let modes: Vec<FourierMode> = (2..=4)
        .map(|k| FourierMode {
            k,
            cos: (0..4).map(|_| rng.gen_range(-1e-3..1e-3)).collect(),
            sin: (0..4).map(|_| rng.gen_range(-1e-3..1e-3)).collect(),
        })
        .collect();
    let c = Curve::new(CurveSpec::coil(0.05, 2).with_perturbation(modes)).unwrap();
    let report = check_nice(&c, DEFAULT_NICE_GRID, DEFAULT_NICE_MARGIN);
    assert!(report.pass, "{}", report.summary());
}

#[test]
fn jacobian_is_unimodular() {
    let c = Curve::new(CurveSpec::circle(1.0)).unwrap();
    for (x, y) in [(0.0, 1.0), (2.0, 4.5)] {
        let det = jacobian_check(&c, PhasePoint::new(x, y), 1e-5).unwrap();
        assert!((det - 1.0).abs() < 1e-8);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for spec in [CurveSpec::ellipse(2.0, 1.0), CurveSpec::coil(0.05, 2)] {
        let c = Curve::new(spec).unwrap();
        for _ in 0..50 {
            let x = rng.gen_range(0.0..c.length());
            let y = solve_chord(&c, x, rng.gen_range(0.3..2.8), None).unwrap();
            let det = jacobian_check(&c, PhasePoint::new(x, y), 1e-5).unwrap();
            assert!((det - 1.0).abs() < 1e-6);
        }
    }
}

#[test]
fn jacobian_rejects_tangent_chords() {
    let c = Curve::new(CurveSpec::circle(1.0)).unwrap();
    let y = solve_chord(&c, 0.0, 1e-4, None).unwrap();
    assert!(jacobian_check(&c, PhasePoint::new(0.0, y), 1e-3).is_err());
}

#[test]
fn all_roots_orbit_on_a_nice_curve_is_single_valued() {
    let c = Curve::new(CurveSpec::ellipse(2.0, 1.0)).unwrap();
    let r = Reflector::new(&c);
    let y0 = solve_chord(&c, 0.0, 0.7, None).unwrap();
    let o = iterate_orbit_all_roots(&r, PhasePoint::new(0.0, y0), 200).unwrap();
    assert!(o.multivalued_steps.is_empty());
    let nice = iterate_orbit(&c, PhasePoint::new(0.0, y0), 200).unwrap();
    for (a, b) in o.points.iter().zip(&nice.points) {
        assert!(gap(a.x, b.x, c.length()) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ellipse_angle_is_recovered(s in 0.0f64..1.0, alpha in 0.05f64..3.0) {
        let c = Curve::new(CurveSpec::ellipse(1.5, 1.0)).unwrap();
        let x = s * c.length();
        let y = solve_chord(&c, x, alpha, None).unwrap();
        let (a, _, _) = chord_angles(&c, x, y);
        prop_assert!((a - alpha).abs() < 1e-10);
    }
}
