use wire_billiards::caustics::{gutkin_roots, string_invariant, striction_point, striction_profile, ChordFamily};
use wire_billiards::curve::CurveKind;
use wire_billiards::reflection::solve_chord;
use wire_billiards::{iterate_orbit, Curve, CurveSpec, PhasePoint};

fn ellipse_family(c: &Curve) -> ChordFamily {
    let y0 = solve_chord(c, 0.0, 0.4, None).unwrap();
    let orbit = iterate_orbit(c, PhasePoint::new(0.0, y0), 4000).unwrap();
    ChordFamily::from_orbit(c, &orbit, 48, 64).unwrap()
}

#[test]
fn coil_striction_is_the_midpoint() {
    for (eps, m) in [(0.05, 2), (0.2, 3), (0.1, 5)] {
        let c = Curve::new(CurveSpec::coil(eps, m)).unwrap();
        for d in [0.5, 1.7, 3.0, 4.4] {
            let family = ChordFamily::raw_shift(&c, d, 16).unwrap();
            for s in striction_profile(&c, &family) {
                assert!((s.s_ratio - 0.5).abs() < 1e-10, "ε={eps} m={m} d={d}: {}", s.s_ratio);
                assert!(s.non_cylindricity > 0.0);
            }
        }
    }
}

#[test]
fn subgroup_orbit_striction_is_the_midpoint() {
    let c = Curve::new(CurveSpec::new(CurveKind::SubgroupOrbit {
        matrix: vec![
            vec![0.0, -1.0, 0.0, 0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, -2.0, 0.0, 0.0],
            vec![0.0, 0.0, 2.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, -3.0],
            vec![0.0, 0.0, 0.0, 0.0, 3.0, 0.0],
        ],
        seed_point: vec![1.0, 0.0, 0.1, 0.0, 0.05, 0.0],
        period: None,
    }))
    .unwrap();
    let family = ChordFamily::raw_shift(&c, 1.3, 16).unwrap();
    for s in striction_profile(&c, &family) {
        assert!((s.s_ratio - 0.5).abs() < 1e-10);
    }
}

#[test]
fn ellipse_invariant_circle_has_a_caustic() {
    let c = Curve::new(CurveSpec::ellipse(2.0, 1.0)).unwrap();
    let family = ellipse_family(&c);
    for s in striction_profile(&c, &family) {
        assert!(s.s_ratio > 0.0 && s.s_ratio < 1.0);
        assert!(s.deviation.unwrap() < 1e-6);
    }
}

#[test]
fn striction_point_lies_on_the_chord() {
    let c = Curve::new(CurveSpec::coil(0.05, 2)).unwrap();
    let family = ChordFamily::raw_shift(&c, 2.0, 8).unwrap();
    let x = 0.4;
    let y = family.partner(&c, x);
    let p = striction_point(&c, &family, x);
    let (a, b) = (c.position(x), c.position(y));
    let mid = (&a + &b) / 2.0;
    assert!((p - mid).norm() < 1e-10);
}

#[test]
fn gutkin_roots_examples() {
    let roots = gutkin_roots(4).unwrap();
    let expected = 2.0 * 5f64.sqrt().atan();
    assert!(roots.iter().any(|r| (r - expected).abs() < 1e-10), "{roots:?}");
    assert!((expected - 2.3005239).abs() < 1e-7);
    // symmetric partner 2π − d
    assert!(roots.iter().any(|r| (r - (std::f64::consts::TAU - expected)).abs() < 1e-10));
    assert!(gutkin_roots(2).unwrap().is_empty());
    assert!(gutkin_roots(3).unwrap().is_empty());
    assert!(gutkin_roots(1).is_err());
}

#[test]
fn gutkin_roots_solve_the_equation() {
    for m in 4..=8 {
        for d in gutkin_roots(m).unwrap() {
            let m = m as f64;
            let lhs = (m * d / 2.0).tan();
            let rhs = m * (d / 2.0).tan();
            assert!((lhs - rhs).abs() < 1e-8 * (1.0 + rhs.abs()), "m = {m}, d = {d}");
        }
    }
}

#[test]
fn developability_only_at_the_gutkin_root() {
    let c = Curve::new(CurveSpec::coil(0.05, 4)).unwrap();
    let root = 2.0 * 5f64.sqrt().atan();
    let max_dev = |d: f64| {
        let family = ChordFamily::raw_shift(&c, d, 16).unwrap();
        striction_profile(&c, &family)
            .iter()
            .map(|s| s.deviation.unwrap())
            .fold(0.0, f64::max)
    };
    assert!(max_dev(root) < 1e-6);
    assert!(max_dev(root - 0.2) > 1e-3);
    assert!(max_dev(root + 0.2) > 1e-3);
}

#[test]
fn string_identity_examples() {
    let circle = Curve::new(CurveSpec::circle(1.0)).unwrap();
    let family = ChordFamily::raw_shift(&circle, 1.0, 32).unwrap();
    assert!(string_invariant(&circle, &family).max_residual < 1e-8);

    let ellipse = Curve::new(CurveSpec::ellipse(2.0, 1.0)).unwrap();
    let family = ellipse_family(&ellipse);
    let check = string_invariant(&ellipse, &family);
    assert!(check.max_residual < 1e-6 && check.used > 0, "{check:?}");

    let coil = Curve::new(CurveSpec::coil(0.05, 2)).unwrap();
    let family = ChordFamily::raw_shift(&coil, 1.1, 32).unwrap();
    assert!(string_invariant(&coil, &family).max_residual < 1e-6);
}

#[test]
fn fitted_family_recovers_the_circle_shift() {
    let c = Curve::new(CurveSpec::circle(1.0)).unwrap();
    let orbit = iterate_orbit(&c, PhasePoint::new(0.0, 0.9), 500).unwrap();
    let family = ChordFamily::from_orbit(&c, &orbit, 4, 16).unwrap();
    assert!(family.fit_rms() < 1e-10);
    for x in [0.0, 1.0, 3.0] {
        assert!((family.partner(&c, x) - x - 0.9).abs() < 1e-9);
        assert!((family.inverse(&c, x + 0.9) - x).abs() < 1e-9);
    }
}

#[test]
fn shift_must_not_be_a_period() {
    let c = Curve::new(CurveSpec::coil(0.05, 2)).unwrap();
    assert!(ChordFamily::raw_shift(&c, 0.0, 8).is_err());
    assert!(ChordFamily::raw_shift(&c, std::f64::consts::TAU, 8).is_err());
}
