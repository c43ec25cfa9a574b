//! Subcommand bodies. CSV goes to the configured output (stdout by default);
//! the JSON summary goes to stdout when the CSV went to a file, stderr otherwise.

use nalgebra::DVector;
use serde::Serialize;
use serde_json::json;
use wire_billiards::caustics::{gutkin_roots, string_invariant, striction_profile, ChordFamily};
use wire_billiards::ellipsoid::{commute_report_with, ConfocalFamily, GeodesicState};
use wire_billiards::phase::{
    companion_check, deficit_limit, glancing_escape, lazutkin_residuals, periodic_orbit_search,
};
use wire_billiards::reflection::{iterate_orbit_all_roots, solve_chord, Reflector};
use wire_billiards::{check_nice as certify, iterate_orbit, Curve, Orbit, PhasePoint};

use crate::config::{ExperimentConfig, OrbitMode};
use crate::output::Sink;
use crate::{failed, CliError};

fn build_curve(cfg: &ExperimentConfig) -> Result<Curve, CliError> {
    Curve::build(cfg.curve_spec()?.clone(), cfg.resolution).map_err(|e| match e {
        wire_billiards::Error::InvalidSpec { .. } | wire_billiards::Error::Degenerate { .. } => {
            CliError::Schema(format!("field `curve`: {e}"))
        }
        other => failed("curve::build")(other),
    })
}

fn sink(cfg: &ExperimentConfig) -> Sink {
    Sink::new(cfg.out.as_deref())
}

fn summary<T: Serialize>(cfg: &ExperimentConfig, report: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&json!({
        "config_sha256": cfg.digest(),
        "seed": cfg.seed,
        "summary": report,
    }))
    .map_err(|e| CliError::Io(e.to_string()))?;
    if cfg.out.is_some() {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
    Ok(())
}

pub fn curve_info(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let curve = build_curve(cfg)?;
    let samples = 4096;
    let ks: Vec<f64> = (0..samples)
        .map(|i| curve.curvature(i as f64 * curve.length() / samples as f64))
        .collect();
    let report = json!({
        "kind": curve.spec().kind_name(),
        "dimension": curve.dim(),
        "closed": curve.is_closed(),
        "length": curve.length(),
        "min_curvature_sampled": ks.iter().copied().fold(f64::INFINITY, f64::min),
        "max_curvature_sampled": ks.iter().copied().fold(0.0, f64::max),
        "resolution": cfg.resolution,
    });
    sink(cfg).json(&cfg.digest(), cfg.seed, &report)
}

pub fn check_nice(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let curve = build_curve(cfg)?;
    let report = certify(&curve, cfg.nice.grid, cfg.nice.margin);
    sink(cfg).json(&cfg.digest(), cfg.seed, &report)
}

fn run_orbit(curve: &Curve, x0: f64, y0: f64, steps: usize, mode: OrbitMode) -> Result<Orbit, CliError> {
    let p0 = PhasePoint::new(x0, y0);
    match mode {
        OrbitMode::Nice => iterate_orbit(curve, p0, steps).map_err(failed("reflection::iterate_orbit")),
        OrbitMode::AllRoots => iterate_orbit_all_roots(&Reflector::new(curve), p0, steps)
            .map_err(failed("reflection::iterate_orbit_all_roots")),
    }
}

pub fn orbit(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let curve = build_curve(cfg)?;
    let o = &cfg.orbit;
    let y0 = match o.y0 {
        Some(y) => y,
        None => solve_chord(&curve, o.x0, o.alpha0, None).map_err(failed("reflection::solve_chord"))?,
    };
    let orbit = run_orbit(&curve, o.x0, y0, o.steps, o.mode)?;
    let mut csv = sink(cfg).csv(&cfg.digest(), cfg.seed, &["step", "x", "y", "alpha", "beta", "length", "residual"])?;
    for (i, p) in orbit.points.iter().enumerate() {
        csv.row(vec![
            i.into(),
            p.x.into(),
            p.y.into(),
            orbit.alpha[i].into(),
            orbit.beta[i].into(),
            orbit.lengths[i].into(),
            orbit.residuals[i].into(),
        ])?;
    }
    csv.finish()?;
    summary(
        cfg,
        &json!({
            "steps": orbit.steps(),
            "max_residual": orbit.max_residual(),
            "stopped_early": orbit.stopped_early,
            "multivalued_steps": orbit.multivalued_steps.len(),
        }),
    )
}

pub fn phase_portrait(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let curve = build_curve(cfg)?;
    let p = &cfg.portrait;
    let mode = if curve.niceness().pass { OrbitMode::Nice } else { OrbitMode::AllRoots };
    let mut csv = sink(cfg).csv(&cfg.digest(), cfg.seed, &["orbit", "step", "x", "alpha"])?;
    let alpha_cap = p.alpha_max.min(std::f64::consts::PI - 1e-3);
    for k in 0..p.orbits {
        let alpha0 = alpha_cap * (k + 1) as f64 / p.orbits as f64;
        let y0 = solve_chord(&curve, 0.0, alpha0, None).map_err(failed("reflection::solve_chord"))?;
        let orbit = run_orbit(&curve, 0.0, y0, p.steps, mode)?;
        for (i, pt) in orbit.points.iter().enumerate() {
            csv.row(vec![k.into(), i.into(), pt.x.into(), orbit.alpha[i].into()])?;
        }
    }
    csv.finish()?;
    summary(cfg, &json!({ "orbits": p.orbits, "mode": format!("{mode:?}") }))
}

pub fn lazutkin(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let curve = build_curve(cfg)?;
    let fit = lazutkin_residuals(&curve, &cfg.lazutkin.alphas, cfg.lazutkin.points, cfg.seed)
        .map_err(failed("phase_analysis::lazutkin_residuals"))?;
    let mut csv = sink(cfg).csv(
        &cfg.digest(),
        cfg.seed,
        &["alpha", "mean_v", "res_u", "res_v", "used_u", "used_v"],
    )?;
    for s in &fit.samples {
        csv.row(vec![
            s.alpha.into(),
            s.mean_v.into(),
            s.res_u.into(),
            s.res_v.into(),
            s.used_u.into(),
            s.used_v.into(),
        ])?;
    }
    csv.finish()?;
    summary(cfg, &json!({ "e_u": fit.e_u, "e_v": fit.e_v }))
}

pub fn deficit(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let curve = build_curve(cfg)?;
    let d = &cfg.deficit;
    let x_end = d.x_end.unwrap_or(d.x_start + 0.25 * curve.length());
    let r = deficit_limit(&curve, d.x_start, x_end, &d.ns).map_err(failed("phase_analysis::deficit_limit"))?;
    let mut csv = sink(cfg).csv(
        &cfg.digest(),
        cfg.seed,
        &[
            "n",
            "deficit",
            "n2_deficit",
            "chords2_deficit",
            "richardson",
            "limit",
            "reference_cubed",
            "reference_uncubed",
        ],
    )?;
    for (i, &n) in r.ns.iter().enumerate() {
        let rich = if i == 0 { None } else { Some(r.richardson[i - 1]) };
        csv.row(vec![
            n.into(),
            r.deficits[i].into(),
            r.scaled_by_vertices[i].into(),
            r.scaled_by_chords[i].into(),
            rich.into(),
            r.limit.into(),
            r.reference_cubed.into(),
            r.reference_uncubed.into(),
        ])?;
    }
    csv.finish()?;
    summary(
        cfg,
        &json!({
            "limit": r.limit,
            "reference_cubed": r.reference_cubed,
            "reference_uncubed": r.reference_uncubed,
            "richardson_changes": r.richardson_changes,
        }),
    )
}

pub fn periodic(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let curve = build_curve(cfg)?;
    let (p, q) = (cfg.periodic.p, cfg.periodic.q);
    let poly = periodic_orbit_search(&curve, p, q).map_err(failed("phase_analysis::periodic_orbit_search"))?;
    let mut csv = sink(cfg).csv(&cfg.digest(), cfg.seed, &["vertex", "x", "residual"])?;
    for (i, (&x, &r)) in poly.vertices.iter().zip(&poly.residuals).enumerate() {
        csv.row(vec![i.into(), x.into(), r.into()])?;
    }
    csv.finish()?;
    summary(
        cfg,
        &json!({ "p": p, "q": q, "perimeter": poly.length, "max_residual": poly.max_residual() }),
    )
}

pub fn glance(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let curve = build_curve(cfg)?;
    let g = &cfg.glance;
    let (report, orbit) =
        glancing_escape(&curve, g.x0, g.alpha0, g.steps).map_err(failed("phase_analysis::glancing_escape"))?;
    let mut csv = sink(cfg).csv(&cfg.digest(), cfg.seed, &["step", "x", "alpha"])?;
    for (i, p) in orbit.points.iter().enumerate() {
        csv.row(vec![i.into(), p.x.into(), orbit.alpha[i].into()])?;
    }
    csv.finish()?;
    let companion = if curve.curvature(g.x0) < 1e-8 {
        Some(
            companion_check(&curve, g.x0, g.companion_samples, cfg.seed)
                .map_err(failed("phase_analysis::companion_check"))?,
        )
    } else {
        None
    };
    summary(cfg, &json!({ "glance": report, "companion": companion }))
}

pub fn striction(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let curve = build_curve(cfg)?;
    let s = &cfg.striction;
    let family = match s.d {
        Some(d) => ChordFamily::raw_shift(&curve, d, s.samples),
        None => {
            let y0 = solve_chord(&curve, 0.0, s.alpha0, None).map_err(failed("reflection::solve_chord"))?;
            let orbit = iterate_orbit(&curve, PhasePoint::new(0.0, y0), s.orbit_steps)
                .map_err(failed("reflection::iterate_orbit"))?;
            ChordFamily::from_orbit(&curve, &orbit, s.modes, s.samples)
        }
    }
    .map_err(failed("ruled_caustics::chord_family"))?;
    let profile = striction_profile(&curve, &family);
    let mut csv = sink(cfg).csv(
        &cfg.digest(),
        cfg.seed,
        &["t", "sStarOverL", "deviation", "nonCylindricity"],
    )?;
    for p in &profile {
        csv.row(vec![
            p.t.into(),
            p.s_ratio.into(),
            p.deviation.into(),
            p.non_cylindricity.into(),
        ])?;
    }
    csv.finish()?;
    let string = string_invariant(&curve, &family);
    let max_dev = profile.iter().filter_map(|p| p.deviation).fold(0.0, f64::max);
    summary(
        cfg,
        &json!({ "max_deviation": max_dev, "fit_rms": family.fit_rms(), "string_identity": string }),
    )
}

pub fn gutkin(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let roots = gutkin_roots(cfg.gutkin.m).map_err(failed("ruled_caustics::gutkin_roots"))?;
    sink(cfg).json(&cfg.digest(), cfg.seed, &json!({ "m": cfg.gutkin.m, "roots": roots }))
}

pub fn ellipsoid_commute(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let e = &cfg.ellipsoid;
    let family = ConfocalFamily::new(e.axes.clone()).map_err(failed("ellipsoid::confocal_family"))?;
    if e.x.len() != family.dim() || e.v.len() != family.dim() {
        return Err(CliError::Schema(format!(
            "field `ellipsoid.x`/`ellipsoid.v`: need {} coordinates",
            family.dim()
        )));
    }
    let geo = GeodesicState::project(&family, 0.0, &DVector::from_vec(e.x.clone()), &DVector::from_vec(e.v.clone()))
        .map_err(failed("ellipsoid::geodesic_state"))?;
    let report = commute_report_with(&family, e.lambda, &geo, e.tau, e.tolerance)
        .map_err(failed("ellipsoid::commute_report"))?;
    sink(cfg).json(&cfg.digest(), cfg.seed, &report)
}
