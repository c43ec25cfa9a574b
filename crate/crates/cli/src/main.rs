//! `wirebill`: runs wire-billiard experiments from a JSON config and flags.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use config::{read_json, set_path, ExperimentConfig, OrbitMode};

#[derive(Debug)]
pub enum CliError {
    /// Malformed or out-of-range configuration (exit 2).
    Schema(String),
    /// A computation failed (exit 3).
    Numerical { op: &'static str, source: wire_billiards::Error },
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Schema(m) => write!(f, "config error: {m}"),
            CliError::Numerical { op, source } => write!(f, "numerical failure in {op}: {source}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

/// Wraps a library error raised by `op`; argument errors count as config errors.
pub fn failed(op: &'static str) -> impl Fn(wire_billiards::Error) -> CliError {
    move |e| match e {
        wire_billiards::Error::InvalidSpec { .. } | wire_billiards::Error::InvalidArgument { .. } => {
            CliError::Schema(format!("{op}: {e}"))
        }
        source => CliError::Numerical { op, source },
    }
}

#[derive(Parser)]
#[command(name = "wirebill", version, about = "Wire billiard experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Common {
    /// Experiment config (JSON); flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Curve spec (JSON), replacing the config's `curve`.
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Chart resolution of the curve.
    #[arg(long, allow_negative_numbers = true)]
    resolution: Option<i64>,
}

#[derive(Subcommand)]
enum Command {
    /// Length, curvature range and dimension of a curve.
    CurveInfo {
        #[command(flatten)]
        common: Common,
    },
    /// Niceness certificate (JSON).
    CheckNice {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        margin: Option<f64>,
    },
    /// One orbit (CSV).
    Orbit {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        x0: Option<f64>,
        #[arg(long)]
        alpha0: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        y0: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, value_enum)]
        mode: Option<OrbitMode>,
    },
    /// Several orbits in (x, α) coordinates (CSV).
    PhasePortrait {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        orbits: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        alpha_max: Option<f64>,
    },
    /// Near-boundary residuals and fitted exponents (CSV).
    Lazutkin {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Length deficit of longest inscribed chains (CSV).
    Deficit {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        x_start: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        x_end: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<usize>>,
    },
    /// Perimeter-maximizing periodic orbit (CSV).
    Periodic {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
    },
    /// Glancing orbit excursion and the flat-point companion check (CSV).
    Glance {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        x0: Option<f64>,
        #[arg(long)]
        alpha0: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Striction profile of a chord family (CSV).
    Striction {
        #[command(flatten)]
        common: Common,
        /// Raw-parameter shift; fit the family from an orbit when absent.
        #[arg(long, allow_negative_numbers = true)]
        d: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        alpha0: Option<f64>,
        #[arg(long)]
        modes: Option<usize>,
    },
    /// Roots of tan(m d/2) = m tan(d/2) in (0, 2π).
    Gutkin {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m: Option<u32>,
    },
    /// Confocal ellipsoid experiments.
    Ellipsoid {
        #[command(subcommand)]
        command: EllipsoidCommand,
    },
}

#[derive(Subcommand)]
enum EllipsoidCommand {
    /// Reflection/flow commutation gaps in both clocks (JSON).
    Commute {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        axes: Option<Vec<f64>>,
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        x: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        v: Option<Vec<f64>>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

/// Flag overrides as (dotted path, value) pairs.
type Overrides = Vec<(&'static str, Option<Value>)>;

fn opt<T: serde::Serialize>(v: Option<T>) -> Option<Value> {
    v.map(|v| json!(v))
}

fn resolve(common: &Common, overrides: Overrides) -> Result<ExperimentConfig, CliError> {
    let mut root = match &common.config {
        Some(path) => read_json(path)?,
        None => json!({}),
    };
    if !root.is_object() {
        return Err(CliError::Schema("config must be a JSON object".into()));
    }
    if let Some(path) = &common.curve {
        set_path(&mut root, "curve", read_json(path)?);
    }
    let general: Overrides = vec![
        ("out", opt(common.out.clone())),
        ("seed", opt(common.seed)),
        ("resolution", opt(common.resolution)),
    ];
    for (path, value) in general.into_iter().chain(overrides) {
        if let Some(v) = value {
            set_path(&mut root, path, v);
        }
    }
    ExperimentConfig::from_value(root)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::CurveInfo { common } => commands::curve_info(&resolve(&common, vec![])?),
        Command::CheckNice { common, grid, margin } => {
            let cfg = resolve(&common, vec![("nice.grid", opt(grid)), ("nice.margin", opt(margin))])?;
            commands::check_nice(&cfg)
        }
        Command::Orbit {
            common,
            x0,
            alpha0,
            y0,
            steps,
            mode,
        } => {
            let cfg = resolve(
                &common,
                vec![
                    ("orbit.x0", opt(x0)),
                    ("orbit.alpha0", opt(alpha0)),
                    ("orbit.y0", opt(y0)),
                    ("orbit.steps", opt(steps)),
                    ("orbit.mode", opt(mode)),
                ],
            )?;
            commands::orbit(&cfg)
        }
        Command::PhasePortrait {
            common,
            orbits,
            steps,
            alpha_max,
        } => {
            let cfg = resolve(
                &common,
                vec![
                    ("portrait.orbits", opt(orbits)),
                    ("portrait.steps", opt(steps)),
                    ("portrait.alpha_max", opt(alpha_max)),
                ],
            )?;
            commands::phase_portrait(&cfg)
        }
        Command::Lazutkin { common, alphas, points } => {
            let cfg = resolve(&common, vec![("lazutkin.alphas", opt(alphas)), ("lazutkin.points", opt(points))])?;
            commands::lazutkin(&cfg)
        }
        Command::Deficit {
            common,
            x_start,
            x_end,
            ns,
        } => {
            let cfg = resolve(
                &common,
                vec![
                    ("deficit.x_start", opt(x_start)),
                    ("deficit.x_end", opt(x_end)),
                    ("deficit.ns", opt(ns)),
                ],
            )?;
            commands::deficit(&cfg)
        }
        Command::Periodic { common, p, q } => {
            let cfg = resolve(&common, vec![("periodic.p", opt(p)), ("periodic.q", opt(q))])?;
            commands::periodic(&cfg)
        }
        Command::Glance {
            common,
            x0,
            alpha0,
            steps,
        } => {
            let cfg = resolve(
                &common,
                vec![
                    ("glance.x0", opt(x0)),
                    ("glance.alpha0", opt(alpha0)),
                    ("glance.steps", opt(steps)),
                ],
            )?;
            commands::glance(&cfg)
        }
        Command::Striction {
            common,
            d,
            samples,
            alpha0,
            modes,
        } => {
            let cfg = resolve(
                &common,
                vec![
                    ("striction.d", opt(d)),
                    ("striction.samples", opt(samples)),
                    ("striction.alpha0", opt(alpha0)),
                    ("striction.modes", opt(modes)),
                ],
            )?;
            commands::striction(&cfg)
        }
        Command::Gutkin { common, m } => commands::gutkin(&resolve(&common, vec![("gutkin.m", opt(m))])?),
        Command::Ellipsoid {
            command:
                EllipsoidCommand::Commute {
                    common,
                    axes,
                    lambda,
                    tau,
                    x,
                    v,
                    tolerance,
                },
        } => {
            let cfg = resolve(
                &common,
                vec![
                    ("ellipsoid.axes", opt(axes)),
                    ("ellipsoid.lambda", opt(lambda)),
                    ("ellipsoid.tau", opt(tau)),
                    ("ellipsoid.x", opt(x)),
                    ("ellipsoid.v", opt(v)),
                    ("ellipsoid.tolerance", opt(tolerance)),
                ],
            )?;
            commands::ellipsoid_commute(&cfg)
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("WIREBILL_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .map_err(|_| CliError::Schema(format!("WIREBILL_THREADS: not a thread count: {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Io(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wirebill: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
