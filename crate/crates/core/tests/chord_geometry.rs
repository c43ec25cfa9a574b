use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wire_billiards::chord::{chord_angles, chord_length};
use wire_billiards::{chord_frame, phase_area, Curve, CurveSpec, Error};

#[test]
fn circle_quarter_chord() {
    let c = Curve::new(CurveSpec::circle(1.0)).unwrap();
    let f = chord_frame(&c, 0.0, FRAC_PI_2).unwrap();
    assert_relative_eq!(f.l, SQRT_2, epsilon = 1e-14);
    assert_relative_eq!(f.alpha, FRAC_PI_4, epsilon = 1e-14);
    assert_relative_eq!(f.beta, FRAC_PI_4, epsilon = 1e-14);
    assert_relative_eq!(f.cos_phi.unwrap(), 1.0, epsilon = 1e-12);
    assert_relative_eq!(f.l12, 0.5 / SQRT_2, epsilon = 1e-14);
}

#[test]
fn circle_diameter() {
    let c = Curve::new(CurveSpec::circle(1.0)).unwrap();
    let f = chord_frame(&c, 0.3, 0.3 + PI).unwrap();
    assert_relative_eq!(f.l, 2.0, epsilon = 1e-14);
    assert_relative_eq!(f.alpha, FRAC_PI_2, epsilon = 1e-12);
    assert_relative_eq!(f.beta, FRAC_PI_2, epsilon = 1e-12);
}

#[test]
fn coil_chords_have_equal_angles() {
    let c = Curve::new(CurveSpec::coil(0.05, 2)).unwrap();
    for d in [0.2, 1.0, 2.5, 4.0] {
        let f = chord_frame(&c, 0.0, c.x_of_t(d)).unwrap();
        assert!((f.alpha - f.beta).abs() < 1e-12, "d = {d}");
    }
}

#[test]
fn diagonal_is_rejected() {
    let c = Curve::new(CurveSpec::circle(1.0)).unwrap();
    assert!(matches!(chord_frame(&c, 1.0, 1.0), Err(Error::DiagonalChord { .. })));
}

#[test]
fn first_and_second_partials_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = 1e-4;
    for spec in [
        CurveSpec::circle(1.0),
        CurveSpec::ellipse(2.0, 1.0),
        CurveSpec::coil(0.05, 2),
        CurveSpec::flat_point(),
    ] {
        let c = Curve::new(spec).unwrap();
        let len = c.length();
        let l = |x: f64, y: f64| (c.position(y) - c.position(x)).norm();
        for _ in 0..200 {
            let x = rng.gen_range(0.0..len);
            let y = x + rng.gen_range(0.1..0.9) * len;
            let f = chord_frame(&c, x, y).unwrap();
            let l0 = l(x, y);
            let l1 = (l(x + h, y) - l(x - h, y)) / (2.0 * h);
            let l2 = (l(x, y + h) - l(x, y - h)) / (2.0 * h);
            let l11 = (l(x + h, y) - 2.0 * l0 + l(x - h, y)) / (h * h);
            let l22 = (l(x, y + h) - 2.0 * l0 + l(x, y - h)) / (h * h);
            let l12 = (l(x + h, y + h) - l(x + h, y - h) - l(x - h, y + h) + l(x - h, y - h)) / (4.0 * h * h);
            for (got, want) in [(f.l1, l1), (f.l2, l2), (f.l11, l11), (f.l22, l22), (f.l12, l12)] {
                assert!((got - want).abs() < 1e-6, "{}: ({x}, {y}) {got} vs {want}", c.spec().kind_name());
            }
        }
    }
}

#[test]
fn symmetry_of_length_and_angles() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let c = Curve::new(CurveSpec::coil(0.1, 3)).unwrap();
    for _ in 0..50 {
        let x = rng.gen_range(0.0..c.length());
        let y = x + rng.gen_range(0.05..0.95) * c.length();
        assert_relative_eq!(chord_length(&c, x, y), chord_length(&c, y, x), epsilon = 1e-13);
        let (a, _, _) = chord_angles(&c, x, y);
        let (_, b, _) = chord_angles(&c, y, x);
        // reversing the chord reverses its direction: α(x,y) = π − β(y,x)
        assert_relative_eq!(a, PI - b, epsilon = 1e-12);
    }
}

#[test]
fn planar_convex_chords_have_phi_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let c = Curve::new(CurveSpec::ellipse(2.0, 1.0)).unwrap();
    for _ in 0..100 {
        let x = rng.gen_range(0.0..c.length());
        let y = x + rng.gen_range(0.01..0.99) * c.length();
        let f = chord_frame(&c, x, y).unwrap();
        assert!((f.cos_phi.unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn short_chord_angle_expansion_is_third_order() {
    let c = Curve::new(CurveSpec::ellipse(2.0, 1.0)).unwrap();
    let x = 0.7;
    let k = c.curvature(x);
    let h = 1e-5;
    let k_dot = (c.curvature(x + h) - c.curvature(x - h)) / (2.0 * h);
    let remainder = |e: f64| {
        let (a, _, _) = chord_angles(&c, x, x + e);
        (a - e * k / 2.0 - e * e * k_dot / 6.0).abs()
    };
    let (e1, e2) = (0.02, 0.005);
    let slope = (remainder(e1) / remainder(e2)).ln() / (e1 / e2).ln();
    assert!(slope >= 2.9, "slope {slope}");
}

#[test]
fn phase_area_is_twice_the_length() {
    for (spec, tol) in [
        (CurveSpec::circle(1.0), 1e-4),
        (CurveSpec::circle(2.0), 1e-4),
        (CurveSpec::coil(0.05, 2), 1e-3),
        (CurveSpec::ellipse(2.0, 1.0), 1e-3),
    ] {
        let c = Curve::new(spec).unwrap();
        let a = phase_area(&c, 256).unwrap();
        assert!((a.area / (2.0 * c.length()) - 1.0).abs() < tol);
    }
    let c = Curve::new(CurveSpec::coil(0.05, 2)).unwrap();
    assert_relative_eq!(c.length(), 2.0 * PI * 1.01f64.sqrt(), max_relative = 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mixed_partial_is_positive_on_nice_curves(s in 0.0f64..1.0, d in 0.02f64..0.98) {
        let c = Curve::new(CurveSpec::coil(0.05, 2)).unwrap();
        let x = s * c.length();
        let f = chord_frame(&c, x, x + d * c.length()).unwrap();
        prop_assert!(f.l12 > 0.0);
        prop_assert!(f.cos_phi.unwrap() > 0.0);
    }
}
