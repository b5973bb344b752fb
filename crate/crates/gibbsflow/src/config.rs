//! Flat `key = value` experiment configuration.
//!
//! Values come from, in increasing priority: built-in defaults, a config
//! file, command-line flags. Keys match the long flag names.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gibbsflow_core::gibbs::{GibbsConfig, Profile, SamplingMode};
use gibbsflow_core::stats::{Observable, RateFunctional};
use gibbsflow_core::{Basis, Model};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Sample,
    Invariance,
    CauchyRate,
    Weyl,
    Normalize,
    Replay,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Simulate,
        Command::Sample,
        Command::Invariance,
        Command::CauchyRate,
        Command::Weyl,
        Command::Normalize,
        Command::Replay,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Sample => "sample",
            Command::Invariance => "invariance",
            Command::CauchyRate => "cauchy-rate",
            Command::Weyl => "weyl",
            Command::Normalize => "normalize",
            Command::Replay => "replay",
        }
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.tag() == s)
            .ok_or_else(|| CliError::Config(format!("unknown command '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    EnsembleBinary,
}

impl Format {
    pub fn tag(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::EnsembleBinary => "ensemble-binary",
        }
    }
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "ensemble-binary" | "binary" => Ok(Format::EnsembleBinary),
            _ => Err(CliError::Config(format!("unknown format '{s}'"))),
        }
    }
}

/// Every key a config may set.
pub const KEYS: &[&str] = &[
    "command",
    "model",
    "cutoff",
    "kappa",
    "profile",
    "power",
    "time",
    "dt",
    "sigma",
    "samples",
    "seed",
    "output",
    "format",
    "functional",
    "m-list",
    "permutations",
    "coupling",
    "monitor",
    "nmax",
    "uniform-weights",
    "observables",
    "input",
    "index",
    "mode",
];

/// A fully resolved experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub model: Model,
    pub cutoff: usize,
    pub kappa: f64,
    pub profile: Profile,
    pub power: f64,
    pub time: f64,
    pub dt: f64,
    pub sigma: f64,
    pub samples: usize,
    pub seed: u64,
    /// `None` writes to stdout.
    pub output: Option<PathBuf>,
    pub format: Format,
    pub functional: Option<RateFunctional>,
    pub m_list: Vec<usize>,
    pub permutations: usize,
    pub coupling: f64,
    pub monitor: usize,
    pub nmax: usize,
    pub uniform_weights: bool,
    pub observables: Vec<Observable>,
    pub input: Option<PathBuf>,
    pub index: u64,
    pub mode: SamplingMode,
}

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_flat(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected 'key = value'", i + 1)))?;
        let k = k.trim().replace('_', "-");
        if !KEYS.contains(&k.as_str()) {
            return Err(CliError::Config(format!("line {}: unknown key '{k}'", i + 1)));
        }
        out.insert(k, v.trim().to_string());
    }
    Ok(out)
}

pub fn read_flat(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_flat(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn get<T: FromStr>(map: &BTreeMap<String, String>, key: &str, default: T) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    match map.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|e| CliError::Config(format!("{key} = '{v}': {e}"))),
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Largest `dt <= 1e-3` with `dt * max|omega| <= 1` below the cutoff.
fn default_dt(model: Model, cutoff: usize) -> f64 {
    let Ok(b) = Basis::new(model, cutoff) else { return 1e-3 };
    let wmax = b
        .dispersion()
        .iter()
        .enumerate()
        .filter(|(i, _)| b.rank(*i) <= cutoff)
        .fold(0.0f64, |m, (_, w)| m.max(w.abs()));
    if wmax * 1e-3 <= 1.0 {
        1e-3
    } else {
        1.0 / wmax
    }
}

impl ExperimentConfig {
    pub fn resolve(map: &BTreeMap<String, String>) -> Result<Self> {
        for k in map.keys() {
            if !KEYS.contains(&k.as_str()) {
                return Err(bad(format!("unknown key '{k}'")));
            }
        }
        let command: Command = map.get("command").ok_or_else(|| bad("no command given"))?.parse()?;
        let functional = map
            .get("functional")
            .map(|f| RateFunctional::parse(f))
            .transpose()
            .map_err(|e| bad(e.to_string()))?;
        let default_model = match (command, functional) {
            (_, Some(f)) => f.model(),
            (Command::Weyl, _) => Model::Torus,
            _ => Model::HalfWave,
        };
        let model = match map.get("model") {
            Some(m) => m.parse::<Model>().map_err(|e| bad(e.to_string()))?,
            None => default_model,
        };
        let functional = functional.or(match model {
            Model::BenjaminOno => Some(RateFunctional::BoSquare),
            Model::HalfWave => Some(RateFunctional::HwQuartic),
            Model::Dnls => Some(RateFunctional::DnlsCurrent),
            _ => None,
        });
        let cutoff: usize = get(map, "cutoff", if command == Command::CauchyRate { 256 } else { 16 })?;
        let defaults = GibbsConfig::new(model, cutoff);
        let profile = match map.get("profile") {
            Some(p) => Profile::parse(p).map_err(|e| bad(e.to_string()))?,
            None => defaults.profile,
        };
        let format = match map.get("format") {
            Some(f) => f.parse()?,
            None => match command {
                Command::Simulate | Command::CauchyRate | Command::Weyl => Format::Csv,
                Command::Sample => Format::EnsembleBinary,
                Command::Invariance | Command::Normalize | Command::Replay => Format::Json,
            },
        };
        let m_list = match map.get("m-list") {
            Some(s) => s
                .split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|e| bad(format!("m-list entry '{x}': {e}"))))
                .collect::<Result<Vec<_>>>()?,
            None => vec![8, 16, 32, 64],
        };
        let observables = match map.get("observables").map(String::as_str) {
            None | Some("default") => Observable::defaults(model),
            Some(s) => s
                .split(',')
                .map(|x| Observable::parse(x.trim()).map_err(|e| bad(e.to_string())))
                .collect::<Result<Vec<_>>>()?,
        };
        let mode = match map.get("mode").map(String::as_str) {
            None | Some("importance") => SamplingMode::Importance,
            Some("rejection") => SamplingMode::Rejection,
            Some(o) => return Err(bad(format!("unknown sampling mode '{o}'"))),
        };
        let path = |k: &str| map.get(k).filter(|v| v.as_str() != "-").map(PathBuf::from);
        let cfg = ExperimentConfig {
            command,
            model,
            cutoff,
            kappa: get(map, "kappa", defaults.kappa)?,
            profile,
            power: get(map, "power", defaults.power)?,
            time: get(map, "time", 1.0)?,
            dt: get(map, "dt", default_dt(model, cutoff))?,
            sigma: get(map, "sigma", 0.25)?,
            samples: get(map, "samples", 1000)?,
            seed: get(map, "seed", 0)?,
            output: path("output"),
            format,
            functional,
            m_list,
            permutations: get(map, "permutations", 1000)?,
            coupling: get(map, "coupling", 1.0)?,
            monitor: get(map, "monitor", 100)?,
            nmax: get(map, "nmax", 1000)?,
            uniform_weights: get(map, "uniform-weights", false)?,
            observables,
            input: path("input"),
            index: get(map, "index", 0)?,
            mode,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        self.gibbs().validate().map_err(|e| bad(e.to_string()))?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(bad(format!("dt must be positive, got {}", self.dt)));
        }
        if !self.time.is_finite() {
            return Err(bad("time must be finite"));
        }
        if self.monitor == 0 {
            return Err(bad("monitor must be at least 1"));
        }
        let allowed: &[Format] = match self.command {
            Command::Simulate | Command::CauchyRate | Command::Weyl => &[Format::Csv, Format::Json],
            Command::Sample => &[Format::EnsembleBinary, Format::Csv],
            Command::Invariance | Command::Normalize | Command::Replay => &[Format::Json],
        };
        if !allowed.contains(&self.format) {
            return Err(bad(format!("{} cannot write {}", self.command.tag(), self.format.tag())));
        }
        match self.command {
            Command::CauchyRate => {
                let f = self.functional.ok_or_else(|| bad(format!("no rate functional for model {}", self.model)))?;
                if f.model() != self.model {
                    return Err(bad(format!("functional {f} belongs to model {}", f.model())));
                }
                if self.m_list.is_empty() || self.m_list.iter().any(|&m| m == 0 || m >= self.cutoff) {
                    return Err(bad(format!("every M must satisfy 1 <= M < cutoff = {}", self.cutoff)));
                }
                if f.needs_sigma() && !(self.sigma > 0.0) {
                    return Err(bad("sigma must be positive"));
                }
            }
            Command::Replay => {
                let p = self.input.as_ref().ok_or_else(|| bad("replay needs an input file"))?;
                if !p.exists() {
                    return Err(bad(format!("input file {} does not exist", p.display())));
                }
            }
            Command::Sample | Command::Invariance | Command::Normalize if self.samples == 0 => {
                return Err(bad("samples must be positive"));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn gibbs(&self) -> GibbsConfig {
        GibbsConfig::new(self.model, self.cutoff)
            .with_kappa(self.kappa)
            .with_profile(self.profile)
            .with_power(self.power)
    }

    /// Every setting with defaults filled in, in a fixed order. Paths to the
    /// output are left out so that reruns into different files match.
    pub fn resolved(&self) -> Vec<(&'static str, String)> {
        let list = |v: &[usize]| v.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(";");
        vec![
            ("command", self.command.tag().into()),
            ("model", self.model.tag().into()),
            ("cutoff", self.cutoff.to_string()),
            ("kappa", self.kappa.to_string()),
            ("profile", self.profile.tag().into()),
            ("power", self.power.to_string()),
            ("time", self.time.to_string()),
            ("dt", self.dt.to_string()),
            ("sigma", self.sigma.to_string()),
            ("samples", self.samples.to_string()),
            ("seed", self.seed.to_string()),
            ("format", self.format.tag().into()),
            ("functional", self.functional.map_or("none".into(), |f| f.tag().into())),
            ("m-list", list(&self.m_list)),
            ("permutations", self.permutations.to_string()),
            ("coupling", self.coupling.to_string()),
            ("monitor", self.monitor.to_string()),
            ("nmax", self.nmax.to_string()),
            ("uniform-weights", self.uniform_weights.to_string()),
            (
                "observables",
                self.observables.iter().map(|o| o.name()).collect::<Vec<_>>().join(";"),
            ),
            ("input", self.input.as_ref().map_or("none".into(), |p| p.display().to_string())),
            ("index", self.index.to_string()),
            (
                "mode",
                match self.mode {
                    SamplingMode::Importance => "importance".into(),
                    SamplingMode::Rejection => "rejection".into(),
                },
            ),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn defaults_are_materialized() {
        let c = ExperimentConfig::resolve(&map(&[("command", "invariance")])).unwrap();
        assert_eq!(c.model, Model::HalfWave);
        assert_eq!(c.kappa, 2.0);
        assert_eq!(c.format, Format::Json);
        assert_eq!(c.observables.len(), 4);
        let keys: Vec<&str> = c.resolved().iter().map(|p| p.0).collect();
        assert!(KEYS.iter().all(|k| *k == "output" || keys.contains(k)));
        let d = ExperimentConfig::resolve(&map(&[("command", "cauchy-rate"), ("functional", "dnls-current")])).unwrap();
        assert_eq!(d.model, Model::Dnls);
        assert_eq!(d.kappa, 1.0);
        assert_eq!(d.cutoff, 256);
    }

    #[test]
    fn dt_default_respects_the_guard() {
        let c = ExperimentConfig::resolve(&map(&[("command", "simulate"), ("model", "dnls"), ("cutoff", "64")])).unwrap();
        assert!(c.dt * 4096.0 <= 1.0 + 1e-12);
        let h = ExperimentConfig::resolve(&map(&[("command", "simulate")])).unwrap();
        assert_eq!(h.dt, 1e-3);
    }

    #[test]
    fn flat_files_parse() {
        let m = parse_flat("# comment\nmodel = bo\n\ncutoff=8 # trailing\nm_list = 2,4\n").unwrap();
        assert_eq!(m["model"], "bo");
        assert_eq!(m["cutoff"], "8");
        assert_eq!(m["m-list"], "2,4");
        assert!(parse_flat("nonsense").is_err());
        assert!(parse_flat("colour = red").is_err());
    }

    #[test]
    fn invalid_values_are_rejected() {
        for pairs in [
            vec![("command", "fly")],
            vec![("command", "simulate"), ("cutoff", "x")],
            vec![("command", "cauchy-rate"), ("model", "bo"), ("m-list", "8,16"), ("cutoff", "16")],
            vec![("command", "cauchy-rate"), ("model", "torus")],
            vec![("command", "replay"), ("input", "/no/such/file")],
            vec![("command", "sample"), ("kappa", "-1")],
            vec![("command", "invariance"), ("format", "csv")],
        ] {
            assert!(ExperimentConfig::resolve(&map(&pairs)).is_err(), "{pairs:?}");
        }
    }
}
