//! `dsw`: tables and reports for scalar waves in static de Sitter coordinates.
//!
//! Exit codes: 0 success, 2 configuration or parse error, 3 regime or
//! validity violation, 4 numerical non-convergence.

mod commands;
mod config;
mod emit;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use dsw_core::expansion::ExpansionParams;
use dsw_core::model::HorizonUnitsParams;
use dsw_core::oracle::classify::{DE_SITTER_FIXTURE, SCHWARZSCHILD_LIKE_FIXTURE};
use dsw_core::waves::FlatSweep;
use dsw_core::DswError;

use config::{GridSpec, KindArg, OutFormat, Params, RunConfig, SweepSpec, Units};
use emit::{Emission, Format};

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] DswError),
    #[error("{0}")]
    Barrier(String),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) | Failure::Io(_) => 2,
            Failure::Barrier(_) => 3,
            Failure::Core(e) => match e {
                DswError::Invalid(_)
                | DswError::Domain(_)
                | DswError::UnfactoredInput(_)
                | DswError::Validity(_) => 2,
                DswError::Regime { .. }
                | DswError::EvanescentMode { .. }
                | DswError::UnsupportedMass { .. } => 3,
                DswError::NonConvergence { .. }
                | DswError::StepFailure { .. }
                | DswError::Overflow(_)
                | DswError::Pole { .. } => 4,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dsw",
    version,
    about = "Scalar waves in static de Sitter space"
)]
struct Cli {
    /// JSON run configuration; flags given here take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    units: Option<Units>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutFormat>,
    /// Write to this file instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Relative tolerance of ODE integrations (overrides DSW_TOL)
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Bundled {
    DeSitter,
    SchwarzschildLike,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Effective potential U, tortoise coordinate and force on a radial grid
    Potential {
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        grid: GridSpec,
    },
    /// Standing and running waves on a radial grid
    Wave {
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        grid: GridSpec,
        /// Wave kinds to tabulate (comma separated)
        #[arg(long, value_enum, value_delimiter = ',')]
        kind: Vec<KindArg>,
        /// Add the connection-formula residual of the standing family
        #[arg(long)]
        residual: bool,
    },
    /// Far-field amplitudes and reflection coefficient
    Reflect {
        #[command(flatten)]
        params: Params,
        /// Parameter sweep, e.g. epsilon=20:100:5
        #[arg(long)]
        sweep: Option<SweepSpec>,
    },
    /// Deviation from the Minkowski spherical wave as R/λ grows
    FlatLimit {
        #[command(flatten)]
        params: Params,
        /// Curvature radii (R/λ in horizon units, lengths in physical units)
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
        /// kr values where the deviation is measured
        #[arg(long, value_delimiter = ',')]
        kr: Vec<f64>,
        /// Tie the energy to the radius so that kR = j
        #[arg(long)]
        horizon_momentum: bool,
    },
    /// Small-X decomposition of the hypergeometric factor with its audit
    Expand {
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        grid: GridSpec,
    },
    /// Singular points of an ODE fixture
    Classify {
        /// Fixture file
        #[arg(required_unless_present = "bundled")]
        path: Option<PathBuf>,
        /// Use a fixture shipped with the library
        #[arg(long, value_enum, conflicts_with = "path")]
        bundled: Option<Bundled>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Potential { .. } => "potential",
            Command::Wave { .. } => "wave",
            Command::Reflect { .. } => "reflect",
            Command::FlatLimit { .. } => "flat-limit",
            Command::Expand { .. } => "expand",
            Command::Classify { .. } => "classify",
        }
    }
}

struct Settings {
    file: RunConfig,
    units: Units,
    format: Option<OutFormat>,
    output: Option<PathBuf>,
    tol: Option<f64>,
}

impl Settings {
    fn format(&self, default: OutFormat) -> Format {
        match self.format.or(self.file.output.format).unwrap_or(default) {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }
    }

    fn emit(&self, em: Emission, default: OutFormat) -> Result<(), Failure> {
        let format = self.format(default);
        let path = self.output.clone().or(self.file.output.path.clone());
        let side = &mut io::stderr().lock();
        match path {
            Some(p) => {
                let f = File::create(&p)
                    .map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
                let mut w = BufWriter::new(f);
                em.write(format, &mut w, side)?;
                w.flush()?;
            }
            None => {
                let mut w = io::stdout().lock();
                em.write(format, &mut w, side)?;
                w.flush()?;
            }
        }
        Ok(())
    }
}

fn set_param(p: &mut Params, units: Units, name: &str, v: f64) -> Result<(), Failure> {
    let allowed: &[&str] = match units {
        Units::Horizon => &["epsilon", "m", "mu", "j"],
        Units::Physical => &["radius", "lambda", "mu", "j"],
    };
    if !allowed.contains(&name) {
        return Err(Failure::Config(format!(
            "cannot sweep {name:?} in these units; choose one of {}",
            allowed.join(", ")
        )));
    }
    match name {
        "epsilon" => p.epsilon = Some(v),
        "m" => p.m = Some(v),
        "mu" => p.mu = Some(v),
        "radius" => p.radius = Some(v),
        "lambda" => p.lambda = Some(v),
        _ => {
            if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
                return Err(Failure::Config(format!(
                    "j = {v} is not a non-negative integer"
                )));
            }
            p.j = Some(v as u32);
        }
    }
    Ok(())
}

fn tolerance_echo(t: &dsw_core::oracle::OdeTolerance) -> Value {
    json!({"rtol": t.rtol, "atol": t.atol})
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let s = Settings {
        units: cli.units.or(file.units).unwrap_or(Units::Horizon),
        format: cli.format,
        output: cli.output.clone(),
        tol: cli.tol,
        file,
    };
    let units = s.units;
    let mut inputs = Map::new();
    inputs.insert("command".into(), json!(cli.command.name()));
    match cli.command {
        Command::Potential { params, grid } => {
            let params = s.file.params.clone().overlay(&params);
            let grid = s.file.grid.clone().overlay(&grid);
            let hp = params.horizon(units, false)?;
            let points = grid.points((1000, 1e-3, 0.999), params.length_scale(units, false)?)?;
            let out = commands::potential(&hp, &points)?;
            let mut em = out.emission;
            inputs.insert("params".into(), params.echo(units, Some(&hp)));
            inputs.insert("grid".into(), grid.echo(&points));
            em.inputs = inputs;
            s.emit(em, OutFormat::Csv)?;
            if out.min_force <= 0.0 || out.min_force.is_nan() {
                return Err(Failure::Barrier(format!(
                    "force is not positive everywhere (minimum {}); a barrier is present",
                    out.min_force
                )));
            }
        }
        Command::Wave {
            params,
            grid,
            kind,
            residual,
        } => {
            let params = s.file.params.clone().overlay(&params);
            let grid = s.file.grid.clone().overlay(&grid);
            let kinds = if kind.is_empty() {
                s.file.kind.clone().unwrap_or_else(|| vec![KindArg::F])
            } else {
                kind
            };
            let residual = residual || s.file.residual.unwrap_or(false);
            let hp = params.horizon(units, true)?;
            let points = grid.points((200, 0.05, 0.95), params.length_scale(units, false)?)?;
            let mut em = commands::wave(&hp, &points, &kinds, residual)?;
            inputs.insert("params".into(), params.echo(units, Some(&hp)));
            inputs.insert("grid".into(), grid.echo(&points));
            inputs.insert("kind".into(), json!(kinds));
            inputs.insert("residual".into(), json!(residual));
            em.inputs = inputs;
            s.emit(em, OutFormat::Csv)?;
        }
        Command::Reflect { params, sweep } => {
            let params = s.file.params.clone().overlay(&params);
            let sweep = sweep.or(s.file.sweep.clone());
            let tol = config::tolerance(s.tol, s.file.tolerance)?;
            let mut points: Vec<HorizonUnitsParams> = Vec::new();
            match &sweep {
                Some(sw) => {
                    for v in sw.values()? {
                        let mut p = params.clone();
                        set_param(&mut p, units, &sw.parameter, v)?;
                        points.push(p.horizon(units, true)?);
                    }
                }
                None => points.push(params.horizon(units, true)?),
            }
            let mut em = commands::reflect(&points, &tol)?;
            inputs.insert("params".into(), params.echo(units, None));
            inputs.insert("sweep".into(), json!(sweep));
            inputs.insert("tolerance".into(), tolerance_echo(&tol));
            em.inputs = inputs;
            s.emit(em, OutFormat::Json)?;
        }
        Command::FlatLimit {
            params,
            radii,
            kr,
            horizon_momentum,
        } => {
            let params = s.file.params.clone().overlay(&params);
            let horizon_momentum = horizon_momentum || s.file.horizon_momentum.unwrap_or(false);
            let foreign = [
                ("epsilon", params.epsilon.is_some()),
                ("m", params.m.is_some()),
                ("x", params.x.is_some()),
                ("radius", params.radius.is_some()),
            ];
            if let Some((name, _)) = foreign.iter().find(|f| f.1) {
                return Err(Failure::Config(format!(
                    "flat-limit takes --mu, --j and --radii; {name} is not used"
                )));
            }
            let scale = match (units, params.lambda) {
                (Units::Physical, Some(l)) => l,
                (Units::Physical, None) => {
                    return Err(Failure::Config("physical units need --lambda".into()))
                }
                (Units::Horizon, Some(_)) => {
                    return Err(Failure::Config(
                        "lambda given with --units horizon; use one unit system per run".into(),
                    ))
                }
                (Units::Horizon, None) => 1.0,
            };
            let j = params.j.unwrap_or(0);
            let sweep = match (horizon_momentum, params.mu) {
                (true, Some(_)) => {
                    return Err(Failure::Config(
                        "--horizon-momentum fixes the energy; drop --mu".into(),
                    ))
                }
                (true, None) => FlatSweep::HorizonMomentum,
                (false, Some(mu)) => FlatSweep::FixedEnergy { mu },
                (false, None) => return Err(Failure::Config("missing --mu".into())),
            };
            let given_radii = if radii.is_empty() {
                s.file.radii.clone()
            } else {
                Some(radii)
            };
            let radii: Vec<f64> = given_radii
                .unwrap_or_else(|| vec![1e3 * scale, 1e4 * scale, 1e5 * scale, 1e6 * scale])
                .iter()
                .map(|r| r / scale)
                .collect();
            let kr = if kr.is_empty() {
                s.file.kr.clone().unwrap_or_else(|| match sweep {
                    FlatSweep::FixedEnergy { .. } => vec![1.0, 3.0, 5.0, 8.0],
                    FlatSweep::HorizonMomentum => vec![0.8 * j as f64],
                })
            } else {
                kr
            };
            if radii.is_empty() || kr.is_empty() {
                return Err(Failure::Config("radii and kr must be non-empty".into()));
            }
            let mut em = commands::flat_limit(sweep, j, &radii, &kr)?;
            inputs.insert("units".into(), json!(units));
            inputs.insert("sweep".into(), json!(sweep));
            inputs.insert("j".into(), json!(j));
            inputs.insert("radius_over_lambda".into(), json!(radii));
            inputs.insert("kr".into(), json!(kr));
            em.inputs = inputs;
            s.emit(em, OutFormat::Csv)?;
        }
        Command::Expand { params, grid } => {
            let params = s.file.params.clone().overlay(&params);
            let grid = s.file.grid.clone().overlay(&grid);
            let (x, mu, j) = params.expansion(units)?;
            let ep = ExpansionParams::new(x, mu, j)?;
            let points = grid.points(
                (200, 1.0 / ep.k, 10.0 / ep.k),
                params.length_scale(units, true)?,
            )?;
            let mut em = commands::expand(&ep, &points)?;
            inputs.insert("params".into(), params.echo(units, None));
            inputs.insert("expansion".into(), json!({"x": x, "mu": mu, "j": j}));
            inputs.insert("grid".into(), grid.echo(&points));
            em.inputs = inputs;
            s.emit(em, OutFormat::Csv)?;
        }
        Command::Classify { path, bundled } => {
            let text = match (bundled, &path) {
                (Some(Bundled::DeSitter), _) => DE_SITTER_FIXTURE.to_string(),
                (Some(Bundled::SchwarzschildLike), _) => SCHWARZSCHILD_LIKE_FIXTURE.to_string(),
                (None, Some(p)) => std::fs::read_to_string(p)
                    .map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?,
                (None, None) => return Err(Failure::Config("no fixture given".into())),
            };
            let mut em = commands::classify(&text)?;
            let source = match (bundled, &path) {
                (Some(b), _) => json!({ "bundled": format!("{b:?}") }),
                (None, Some(p)) => json!({ "path": p.display().to_string() }),
                (None, None) => Value::Null,
            };
            inputs.insert("fixture".into(), source);
            em.inputs = inputs;
            s.emit(em, OutFormat::Json)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dsw: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
