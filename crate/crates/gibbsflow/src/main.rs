use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use gibbsflow::config::read_flat;
use gibbsflow::{run, CliError, ExperimentConfig, Pool};

/// Gibbs measures and truncated Hamiltonian flows.
///
/// Settings come from `--config` (flat `key = value` lines) and are
/// overridden by flags. Output goes to stdout unless `--output` is given.
#[derive(Parser, Debug)]
#[command(name = "gibbsflow", version)]
struct Cli {
    /// simulate | sample | invariance | cauchy-rate | weyl | normalize | replay
    command: String,
    #[arg(long)]
    config: Option<PathBuf>,
    /// zonal | bo | dnls | halfwave | torus
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    cutoff: Option<String>,
    #[arg(long)]
    kappa: Option<String>,
    /// indicator | smooth
    #[arg(long)]
    profile: Option<String>,
    /// Zonal power r.
    #[arg(long)]
    power: Option<String>,
    #[arg(long)]
    time: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    output: Option<String>,
    /// csv | json | ensemble-binary
    #[arg(long)]
    format: Option<String>,
    /// bo-square | hw-quartic | hw-wick | dnls-current | dnls-momentum
    #[arg(long)]
    functional: Option<String>,
    #[arg(long = "m-list")]
    m_list: Option<String>,
    #[arg(long)]
    permutations: Option<String>,
    #[arg(long)]
    coupling: Option<String>,
    /// Steps between invariant records.
    #[arg(long)]
    monitor: Option<String>,
    #[arg(long)]
    nmax: Option<String>,
    #[arg(long = "uniform-weights")]
    uniform_weights: Option<String>,
    /// Comma list, or "default".
    #[arg(long)]
    observables: Option<String>,
    /// Ensemble file for replay.
    #[arg(long)]
    input: Option<String>,
    /// Sample index of the initial datum for simulate.
    #[arg(long)]
    index: Option<String>,
    /// importance | rejection
    #[arg(long)]
    mode: Option<String>,
}

impl Cli {
    fn overrides(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("model", &self.model),
            ("cutoff", &self.cutoff),
            ("kappa", &self.kappa),
            ("profile", &self.profile),
            ("power", &self.power),
            ("time", &self.time),
            ("dt", &self.dt),
            ("sigma", &self.sigma),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("output", &self.output),
            ("format", &self.format),
            ("functional", &self.functional),
            ("m-list", &self.m_list),
            ("permutations", &self.permutations),
            ("coupling", &self.coupling),
            ("monitor", &self.monitor),
            ("nmax", &self.nmax),
            ("uniform-weights", &self.uniform_weights),
            ("observables", &self.observables),
            ("input", &self.input),
            ("index", &self.index),
            ("mode", &self.mode),
        ]
    }
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut map: BTreeMap<String, String> = match &cli.config {
        Some(p) => read_flat(p)?,
        None => BTreeMap::new(),
    };
    map.insert("command".into(), cli.command.clone());
    for (k, v) in cli.overrides() {
        if let Some(v) = v {
            map.insert(k.into(), v.clone());
        }
    }
    ExperimentConfig::resolve(&map)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = resolve(&cli).and_then(|cfg| run::run(&cfg, &Pool::from_env()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.one_line());
            ExitCode::from(if matches!(e, CliError::Config(_)) { 2 } else { 1 })
        }
    }
}
