//! Run configuration: command-line flags layered over an optional JSON file.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use dsw_core::model::{to_horizon_units, HorizonUnitsParams, ModelParams};
use dsw_core::oracle::OdeTolerance;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    /// ε, m and radii in units of the curvature radius
    Horizon,
    /// R, λ, μ and radii in a common length unit
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutFormat {
    Csv,
    Json,
}

/// Physical or horizon-unit parameters; which ones apply depends on `units`.
#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// ε = μR/λ (horizon units)
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// m = R/λ (horizon units)
    #[arg(long)]
    pub m: Option<f64>,
    /// μ = E/Mc²
    #[arg(long)]
    pub mu: Option<f64>,
    /// X = λ/R, an alternative to --m (horizon units)
    #[arg(long)]
    pub x: Option<f64>,
    /// Curvature radius R (physical units)
    #[arg(long)]
    pub radius: Option<f64>,
    /// Compton length λ (physical units)
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Angular momentum
    #[arg(long)]
    pub j: Option<u32>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Number of radial grid points
    #[arg(long = "grid")]
    pub count: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
}

/// `parameter=start:stop:step`, inclusive of `stop`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, range) = s
            .split_once('=')
            .ok_or_else(|| format!("sweep {s:?} is not of the form name=start:stop:step"))?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("sweep range {range:?} needs start:stop:step"));
        }
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("{t:?} in sweep is not a number"))
        };
        Ok(SweepSpec {
            parameter: name.trim().to_string(),
            start: num(parts[0])?,
            stop: num(parts[1])?,
            step: num(parts[2])?,
        })
    }
}

impl SweepSpec {
    pub fn values(&self) -> Result<Vec<f64>, Failure> {
        let ok = [self.start, self.stop, self.step]
            .iter()
            .all(|v| v.is_finite());
        if !ok || self.step <= 0.0 || self.stop < self.start {
            return Err(Failure::Config(format!(
                "sweep {}: need finite start <= stop and step > 0",
                self.parameter
            )));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        if n > 100_000 {
            return Err(Failure::Config(format!("sweep of {n} points is too long")));
        }
        Ok((0..n).map(|i| self.start + i as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum KindArg {
    /// regular standing wave
    F,
    /// singular standing wave
    G,
    /// outgoing running wave
    Out,
    /// incoming running wave
    In,
}

/// Contents of a `--config` file. Flags given on the command line win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub units: Option<Units>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub grid: GridSpec,
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: OutputSpec,
    pub tolerance: Option<f64>,
    pub kind: Option<Vec<KindArg>>,
    pub residual: Option<bool>,
    pub radii: Option<Vec<f64>>,
    pub kr: Option<Vec<f64>>,
    pub horizon_momentum: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<OutFormat>,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Failure::Config(format!("config {}: {e}", path.display())))
    }
}

impl Params {
    /// Fields of `top` replace those of `self`.
    pub fn overlay(self, top: &Params) -> Params {
        Params {
            epsilon: top.epsilon.or(self.epsilon),
            m: top.m.or(self.m),
            mu: top.mu.or(self.mu),
            x: top.x.or(self.x),
            radius: top.radius.or(self.radius),
            lambda: top.lambda.or(self.lambda),
            j: top.j.or(self.j),
        }
    }

    fn check_unit_system(&self, units: Units) -> Result<(), Failure> {
        let foreign: &[(&str, bool)] = match units {
            Units::Horizon => &[
                ("radius", self.radius.is_some()),
                ("lambda", self.lambda.is_some()),
            ],
            Units::Physical => &[
                ("epsilon", self.epsilon.is_some()),
                ("m", self.m.is_some()),
                ("x", self.x.is_some()),
            ],
        };
        let given: Vec<&str> = foreign.iter().filter(|f| f.1).map(|f| f.0).collect();
        if given.is_empty() {
            Ok(())
        } else {
            Err(Failure::Config(format!(
                "{} given with --units {}; use one unit system per run",
                given.join(", "),
                units.name()
            )))
        }
    }

    fn physical_scale(&self) -> Result<(f64, f64), Failure> {
        let radius = self
            .radius
            .ok_or_else(|| Failure::Config("physical units need --radius".into()))?;
        let lambda = self
            .lambda
            .ok_or_else(|| Failure::Config("physical units need --lambda".into()))?;
        Ok((radius, lambda))
    }

    /// Horizon-unit parameters. Without `need_energy` a missing energy is
    /// set to zero, which suits quantities that do not depend on it.
    pub fn horizon(&self, units: Units, need_energy: bool) -> Result<HorizonUnitsParams, Failure> {
        self.check_unit_system(units)?;
        let j = self.j.unwrap_or(0);
        match units {
            Units::Physical => {
                let (radius, lambda) = self.physical_scale()?;
                let mu = match self.mu {
                    Some(mu) => mu,
                    None if need_energy => {
                        return Err(Failure::Config("physical units need --mu".into()))
                    }
                    None => 0.0,
                };
                let p = ModelParams::new(radius, lambda, mu, j)?;
                Ok(to_horizon_units(&p))
            }
            Units::Horizon => {
                let m = match (self.m, self.x) {
                    (Some(_), Some(_)) => {
                        return Err(Failure::Config("give --m or --x, not both".into()))
                    }
                    (Some(m), None) => m,
                    (None, Some(x)) if x > 0.0 => 1.0 / x,
                    (None, Some(x)) => {
                        return Err(Failure::Config(format!("--x must be positive, got {x}")))
                    }
                    (None, None) => return Err(Failure::Config("missing --m".into())),
                };
                let epsilon = match (self.epsilon, self.mu) {
                    (Some(_), Some(_)) => {
                        return Err(Failure::Config("give --epsilon or --mu, not both".into()))
                    }
                    (Some(e), None) => e,
                    (None, Some(mu)) => mu * m,
                    (None, None) if need_energy => {
                        return Err(Failure::Config("missing --epsilon or --mu".into()))
                    }
                    (None, None) => 0.0,
                };
                Ok(HorizonUnitsParams::new(epsilon, m, j)?)
            }
        }
    }

    /// (X, μ, j) for the small-X expansion.
    pub fn expansion(&self, units: Units) -> Result<(f64, f64, u32), Failure> {
        let hp = self.horizon(units, true)?;
        if hp.m <= 0.0 {
            return Err(Failure::Config("the expansion needs m > 0".into()));
        }
        // keep a user-given X exact instead of round-tripping through 1/X
        let x = match (units, self.x) {
            (Units::Horizon, Some(x)) => x,
            _ => 1.0 / hp.m,
        };
        let mu = match (units, self.mu) {
            (_, Some(mu)) => mu,
            _ => hp.mu(),
        };
        Ok((x, mu, hp.j))
    }

    /// Length that divides radii given in physical units: R for positions in
    /// horizon units, λ for positions in Compton lengths.
    pub fn length_scale(&self, units: Units, compton: bool) -> Result<f64, Failure> {
        match units {
            Units::Horizon => Ok(1.0),
            Units::Physical => {
                let (radius, lambda) = self.physical_scale()?;
                Ok(if compton { lambda } else { radius })
            }
        }
    }

    pub fn echo(&self, units: Units, hp: Option<&HorizonUnitsParams>) -> Value {
        let mut m = Map::new();
        m.insert("given".into(), json!(self));
        if let Some(hp) = hp {
            m.insert(
                "horizon_units".into(),
                json!({"epsilon": hp.epsilon, "m": hp.m, "j": hp.j}),
            );
        }
        m.insert("units".into(), json!(units));
        Value::Object(m)
    }
}

impl Units {
    fn name(self) -> &'static str {
        match self {
            Units::Horizon => "horizon",
            Units::Physical => "physical",
        }
    }
}

impl GridSpec {
    pub fn overlay(self, top: &GridSpec) -> GridSpec {
        GridSpec {
            count: top.count.or(self.count),
            spacing: top.spacing.or(self.spacing),
            r_min: top.r_min.or(self.r_min),
            r_max: top.r_max.or(self.r_max),
        }
    }

    /// Grid points with the given defaults, bounds divided by `scale`.
    pub fn points(&self, defaults: (usize, f64, f64), scale: f64) -> Result<Vec<f64>, Failure> {
        let n = self.count.unwrap_or(defaults.0);
        let lo = self.r_min.map_or(defaults.1, |v| v / scale);
        let hi = self.r_max.map_or(defaults.2, |v| v / scale);
        if n == 0 {
            return Err(Failure::Config("grid must have at least one point".into()));
        }
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Failure::Config(format!(
                "grid bounds need r_min <= r_max, got {lo} and {hi}"
            )));
        }
        if n == 1 {
            return Ok(vec![lo]);
        }
        let t = |i: usize| i as f64 / (n - 1) as f64;
        match self.spacing.unwrap_or(Spacing::Linear) {
            Spacing::Linear => Ok((0..n).map(|i| lo + (hi - lo) * t(i)).collect()),
            Spacing::Log => {
                if lo <= 0.0 {
                    return Err(Failure::Config("log spacing needs r_min > 0".into()));
                }
                let (a, b) = (lo.ln(), hi.ln());
                Ok((0..n).map(|i| (a + (b - a) * t(i)).exp()).collect())
            }
        }
    }

    pub fn echo(&self, points: &[f64]) -> Value {
        json!({
            "count": points.len(),
            "spacing": self.spacing.unwrap_or(Spacing::Linear),
            "r_min": points.first(),
            "r_max": points.last(),
        })
    }
}

/// Flag, then config file, then `DSW_TOL`, then the built-in default.
pub fn tolerance(flag: Option<f64>, file: Option<f64>) -> Result<OdeTolerance, Failure> {
    Ok(match flag.or(file) {
        Some(t) => OdeTolerance::relative(t)?,
        None => OdeTolerance::from_env()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_parses_and_includes_stop() {
        let s: SweepSpec = "epsilon=20:100:5".parse().unwrap();
        let v = s.values().unwrap();
        assert_eq!(v.len(), 17);
        assert_eq!((v[0], v[16]), (20.0, 100.0));
        assert!("epsilon=20:100".parse::<SweepSpec>().is_err());
        let bad: SweepSpec = "m=5:1:1".parse().unwrap();
        assert!(bad.values().is_err());
    }

    #[test]
    fn grids() {
        let g = GridSpec {
            count: Some(3),
            spacing: Some(Spacing::Log),
            r_min: Some(0.01),
            r_max: Some(1.0),
        };
        let p = g.points((10, 0.0, 0.0), 1.0).unwrap();
        assert!((p[1] - 0.1).abs() < 1e-15);
        let empty = GridSpec {
            count: Some(0),
            ..Default::default()
        };
        assert!(empty.points((10, 0.1, 0.9), 1.0).is_err());
    }

    #[test]
    fn one_unit_system() {
        let p = Params {
            epsilon: Some(10.0),
            m: Some(5.0),
            radius: Some(2.0),
            ..Default::default()
        };
        assert!(p.horizon(Units::Horizon, true).is_err());
        let p = Params {
            radius: Some(50.0),
            lambda: Some(10.0),
            mu: Some(2.0),
            j: Some(1),
            ..Default::default()
        };
        let hp = p.horizon(Units::Physical, true).unwrap();
        assert_eq!((hp.epsilon, hp.m, hp.j), (10.0, 5.0, 1));
    }

    #[test]
    fn config_rejects_unknown_fields() {
        let r: Result<RunConfig, _> = serde_json::from_str(r#"{"unit": "horizon"}"#);
        assert!(r.is_err());
        let r: RunConfig =
            serde_json::from_str(r#"{"units": "physical", "params": {"radius": 2, "lambda": 1}}"#)
                .unwrap();
        assert_eq!(r.units, Some(Units::Physical));
    }
}
