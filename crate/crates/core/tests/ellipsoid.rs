use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wire_billiards::ellipsoid::{
    commute_report, geodesic_flow, geodesic_flow_report, normal_curvature, reflect_line, reflection_jacobian,
    tangency_parameters, tangency_state, ConfocalFamily, FlowMode, GeodesicState, LineState,
};
use wire_billiards::Error;

fn vec(v: &[f64]) -> DVector<f64> {
    DVector::from_vec(v.to_vec())
}

fn point_line_distance(f: &DVector<f64>, line: &LineState) -> f64 {
    let d = f - &line.p;
    (&d - &line.q * d.dot(&line.q)).norm()
}

fn family() -> ConfocalFamily {
    ConfocalFamily::new(vec![2.0, 1.5, 1.0]).unwrap()
}

#[test]
fn axes_must_be_distinct_and_decreasing() {
    assert!(ConfocalFamily::new(vec![1.0, 1.0, 0.5]).is_err());
    assert!(ConfocalFamily::new(vec![1.0, 2.0]).is_err());
    assert!(ConfocalFamily::new(vec![2.0]).is_err());
}

#[test]
fn near_sphere_flow_is_a_great_circle() {
    let r = 1.5;
    let fam = ConfocalFamily::new(vec![r * (1.0 + 3e-6), r * (1.0 + 2e-6), r * (1.0 + 1e-6)]).unwrap();
    let g = GeodesicState::project(&fam, 0.0, &vec(&[1.0, 0.2, 0.3]), &vec(&[0.0, 1.0, -0.4])).unwrap();
    let k = normal_curvature(&fam, 0.0, &g.x, &g.v);
    assert!((k - 1.0 / r).abs() < 1e-5);
    let plane = g.x.cross(&g.v);
    let end = geodesic_flow(&fam, 0.0, &g, 2.0, FlowMode::ArcLength).unwrap();
    assert!(end.x.dot(&plane).abs() / plane.norm() < 1e-5);
    // xi speed k^{-2/3} ≈ r^{2/3}: time τ covers arc length ≈ r^{2/3} τ
    let xi = geodesic_flow(&fam, 0.0, &g, 1.0, FlowMode::Xi).unwrap();
    let angle = g.x.normalize().dot(&xi.x.normalize()).clamp(-1.0, 1.0).acos();
    assert!((angle * r - r.powf(2.0 / 3.0)).abs() < 1e-4);
}

#[test]
fn curvature_formula_matches_the_integrator() {
    let fam = family();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..5 {
        let x = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
        let v = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
        let g = GeodesicState::project(&fam, 0.0, &x, &v).unwrap();
        let flow = |s: f64| geodesic_flow_report(&fam, 0.0, &g, s, FlowMode::ArcLength, 1e-13).unwrap().0.v;
        let diff = |h: f64| (flow(h) - flow(-h)) / (2.0 * h);
        let (d1, d2, d3) = (diff(0.02), diff(0.01), diff(0.005));
        let r1 = (&d2 * 4.0 - &d1) / 3.0;
        let r2 = (&d3 * 4.0 - &d2) / 3.0;
        let accel = ((&r2 * 16.0 - &r1) / 15.0).norm();
        assert!((accel - normal_curvature(&fam, 0.0, &g.x, &g.v)).abs() < 1e-10);
    }
}

#[test]
fn tangency_parameters_are_conserved_by_the_flow() {
    let fam = family();
    let g = GeodesicState::project(&fam, 0.0, &vec(&[1.2, 0.7, 0.4]), &vec(&[0.3, -0.5, 0.8])).unwrap();
    let before = tangency_parameters(&fam, &g.tangent_line()).unwrap();
    assert_eq!(before.len(), 2);
    assert!(before.iter().any(|l| l.abs() < 1e-9));
    let (end, report) = geodesic_flow_report(&fam, 0.0, &g, 50.0, FlowMode::ArcLength, 1e-12).unwrap();
    assert!(report.max_drift < 1e-8);
    let after = tangency_parameters(&fam, &end.tangent_line()).unwrap();
    for (a, b) in before.iter().zip(&after) {
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn ellipse_focal_property() {
    let fam = ConfocalFamily::new(vec![2.0, 1.0]).unwrap();
    let c = 3f64.sqrt();
    for angle in [0.3f64, 1.1, 2.0, 4.0] {
        let line = LineState::new(vec(&[-c, 0.0]), vec(&[angle.cos(), angle.sin()])).unwrap();
        let out = reflect_line(&fam, 0.0, &line).unwrap();
        assert!(point_line_distance(&vec(&[c, 0.0]), &out) < 1e-10);
    }
}

#[test]
fn near_sphere_reflection_keeps_the_radial_angle() {
    let fam = ConfocalFamily::new(vec![1.0 + 2e-9, 1.0 + 1e-9, 1.0]).unwrap();
    let line = LineState::new(vec(&[0.1, -0.2, 0.3]), vec(&[0.5, 0.4, -0.2])).unwrap();
    let out = reflect_line(&fam, 0.0, &line).unwrap();
    let n = out.p.normalize();
    assert!((line.q.dot(&n) + out.q.dot(&n)).abs() < 1e-8);
}

#[test]
fn reflection_is_symplectic() {
    let fam = family();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..100 {
        let p = DVector::from_fn(3, |_, _| rng.gen_range(-0.5..0.5));
        let q = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
        let line = LineState::new(p, q).unwrap();
        let det = reflection_jacobian(&fam, 0.5, &line, 1e-6).unwrap();
        assert!((det - 1.0).abs() < 1e-6, "det {det}");
    }
}

#[test]
fn near_circle_tangency_parameter() {
    let fam = ConfocalFamily::new(vec![1.0, 1.0 - 1e-6]).unwrap();
    for rho in [0.2, 0.5, 0.9, 1.7] {
        let line = LineState::new(vec(&[0.0, rho]), vec(&[1.0, 0.0])).unwrap();
        let l = tangency_parameters(&fam, &line).unwrap();
        assert_eq!(l.len(), 1);
        assert!((l[0] - (rho * rho - 1.0)).abs() < 1e-5, "ρ = {rho}: {}", l[0]);
    }
}

#[test]
fn billiard_preserves_tangency_parameters() {
    let fam = family();
    let mut line = LineState::new(vec(&[0.1, 0.2, -0.1]), vec(&[0.6, 0.3, 0.2])).unwrap();
    let start = tangency_parameters(&fam, &line).unwrap();
    for _ in 0..100 {
        line = reflect_line(&fam, 0.5, &line).unwrap();
        let now = tangency_parameters(&fam, &line).unwrap();
        for (a, b) in start.iter().zip(&now) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}

#[test]
fn tangent_line_touches_at_the_geodesic_point() {
    let fam = family();
    let g = GeodesicState::project(&fam, 0.0, &vec(&[0.3, 1.0, 0.2]), &vec(&[1.0, 0.0, 0.5])).unwrap();
    let back = tangency_state(&fam, 0.0, &g.tangent_line()).unwrap();
    assert!((back.x - &g.x).norm() < 1e-9);
}

#[test]
fn commutation_holds_only_in_the_xi_clock() {
    let fam = family();
    let g = GeodesicState::project(&fam, 0.0, &vec(&[1.2, 0.7, 0.4]), &vec(&[0.3, -0.5, 0.8])).unwrap();
    let r = commute_report(&fam, 0.3, &g, 0.5).unwrap();
    assert!(r.xi_gap < 1e-6, "{r:?}");
    assert!(r.arc_length_gap > 1e-2, "{r:?}");
    assert!(matches!(commute_report(&fam, -0.1, &g, 0.5), Err(Error::InvalidArgument { .. })));
}

#[test]
fn missing_the_ellipsoid_is_reported() {
    let fam = family();
    let line = LineState::new(vec(&[5.0, 5.0, 5.0]), vec(&[1.0, 0.0, 0.0])).unwrap();
    assert!(reflect_line(&fam, 0.0, &line).is_err());
}
