//! Command dispatch.

use serde_json::{json, Value};

use gibbsflow_core::flow::{evolve, FlowConfig};
use gibbsflow_core::gibbs::{estimate_normalization, sample_rho, WeightedEnsemble};
use gibbsflow_core::randfield::sample_mu;
use gibbsflow_core::stats::{cauchy_rate, invariance_report, InvarianceConfig, InvarianceReport, RateReport};
use gibbsflow_core::{weyl, Basis, Executor, ModeIndex, RngStream};

use crate::config::{Command, ExperimentConfig, Format};
use crate::ensemble;
use crate::error::{CliError, Result};
use crate::output::{json_doc, num, write_atomic, Csv};

/// Run a command and return the artifact bytes.
pub fn render<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Vec<u8>> {
    match cfg.command {
        Command::Simulate => simulate(cfg),
        Command::Sample => sample(cfg, exec),
        Command::Invariance => Ok(json_doc(cfg, invariance_json(&invariance(cfg, exec)?))),
        Command::CauchyRate => rate(cfg, exec),
        Command::Weyl => weyl_table(cfg),
        Command::Normalize => normalize(cfg, exec),
        Command::Replay => replay(cfg),
    }
}

/// Run a command and write its artifact (stdout when no output path is set).
pub fn run<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<()> {
    let bytes = render(cfg, exec)?;
    match &cfg.output {
        Some(p) => write_atomic(p, &bytes),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes).and_then(|_| out.flush()).map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

pub fn flow_config(cfg: &ExperimentConfig) -> FlowConfig {
    FlowConfig::new(cfg.model, cfg.cutoff, cfg.dt, cfg.time)
        .with_coupling(cfg.coupling)
        .with_monitor(cfg.monitor)
        .with_power(cfg.power)
}

fn mode_name(m: ModeIndex) -> String {
    match m {
        ModeIndex::Circle(n) => n.to_string(),
        ModeIndex::Zonal(n) => n.to_string(),
        ModeIndex::Lattice(a, b) => format!("{a}:{b}"),
    }
}

fn simulate(cfg: &ExperimentConfig) -> Result<Vec<u8>> {
    let basis = Basis::new(cfg.model, cfg.cutoff)?;
    let u0 = sample_mu(&basis, &RngStream::new(cfg.seed, cfg.index));
    let traj = evolve(&flow_config(cfg), &u0)?;
    let shown: Vec<usize> = (0..basis.len()).filter(|&i| basis.rank(i) <= 2).collect();
    match cfg.format {
        Format::Json => {
            let rows: Vec<Value> = traj
                .records
                .iter()
                .map(|r| {
                    json!({"time": num(r.time), "l2": num(r.l2), "hamiltonian": num(r.hamiltonian),
                           "mean": num(r.mean), "max_coeff": num(r.max_coeff)})
                })
                .collect();
            Ok(json_doc(cfg, json!({ "records": rows })))
        }
        _ => {
            let mut cols: Vec<String> = ["time", "l2", "hamiltonian"].map(String::from).to_vec();
            for &i in &shown {
                let n = mode_name(basis.mode(i));
                cols.push(format!("re_{n}"));
                cols.push(format!("im_{n}"));
            }
            let mut csv = Csv::new(cfg, &cols.iter().map(String::as_str).collect::<Vec<_>>());
            for (r, u) in traj.records.iter().zip(&traj.states) {
                let mut row = vec![r.time.to_string(), r.l2.to_string(), r.hamiltonian.to_string()];
                for &i in &shown {
                    row.push(u.coeffs()[i].re.to_string());
                    row.push(u.coeffs()[i].im.to_string());
                }
                csv.row(&row);
            }
            Ok(csv.into_bytes())
        }
    }
}

fn sample<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Vec<u8>> {
    let e = sample_rho(&cfg.gibbs(), cfg.samples, cfg.seed, cfg.mode, exec)?;
    if e.low_ess {
        eprintln!("warning: effective sample size {:.3} is below 10", e.ess);
    }
    match cfg.format {
        Format::EnsembleBinary => Ok(ensemble::encode(&e)),
        _ => {
            let mut csv = Csv::new(cfg, &["index", "weight", "l2"]);
            csv.note("ess", e.ess);
            csv.note("fingerprint", format!("{:016x}", e.fingerprint));
            for s in &e.samples {
                csv.row(&[s.index.to_string(), s.weight.to_string(), s.field.l2_norm().to_string()]);
            }
            Ok(csv.into_bytes())
        }
    }
}

pub fn invariance<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<InvarianceReport> {
    let mut ic = InvarianceConfig::new(cfg.gibbs(), flow_config(cfg), cfg.samples, cfg.seed);
    ic.observables = cfg.observables.clone();
    ic.permutations = cfg.permutations;
    ic.uniform_weights = cfg.uniform_weights;
    Ok(invariance_report(&ic, exec)?)
}

pub fn invariance_json(r: &InvarianceReport) -> Value {
    json!({
        "model": r.model.tag(),
        "N": r.cutoff,
        "T": num(r.time),
        "seed": r.seed,
        "count": r.count,
        "ess": num(r.ess),
        "observables": r.observables.iter().map(|o| json!({"name": o.name, "ks": num(o.ks), "p": num(o.p)})).collect::<Vec<_>>(),
        "drifts": {"l2": num(r.drift.l2), "hamiltonian": num(r.drift.hamiltonian), "mean": num(r.drift.mean)},
    })
}

fn rate<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Vec<u8>> {
    let f = cfg.functional.expect("validated");
    let r: RateReport = cauchy_rate(cfg.model, f, cfg.cutoff, &cfg.m_list, cfg.sigma, cfg.samples, cfg.seed, exec)?;
    match cfg.format {
        Format::Json => {
            let pts: Vec<Value> = r
                .points
                .iter()
                .map(|p| json!({"M": p.m, "estimate": num(p.estimate), "stderr": num(p.stderr), "exact": p.exact.map(num)}))
                .collect();
            let fit = r.fit.map(|f| json!({"slope": num(f.slope), "stderr": num(f.stderr), "lo": num(f.lo), "hi": num(f.hi)}));
            Ok(json_doc(cfg, json!({"functional": f.tag(), "N": r.cutoff, "points": pts, "fit": fit})))
        }
        _ => {
            let mut csv = Csv::new(cfg, &["M", "estimate", "stderr", "exact"]);
            if let Some(fit) = r.fit {
                csv.note("slope", fit.slope);
                csv.note("slope-stderr", fit.stderr);
                csv.note("slope-ci", format!("{};{}", fit.lo, fit.hi));
            }
            for p in &r.points {
                csv.row(&[
                    p.m.to_string(),
                    p.estimate.to_string(),
                    p.stderr.to_string(),
                    p.exact.map_or(String::new(), |x| x.to_string()),
                ]);
            }
            Ok(csv.into_bytes())
        }
    }
}

fn weyl_table(cfg: &ExperimentConfig) -> Result<Vec<u8>> {
    let rows = weyl::alpha_table(cfg.nmax);
    let fit = weyl::alpha_asymptotics(cfg.nmax).ok();
    match cfg.format {
        Format::Json => {
            let fit = fit.map(|f| json!({"slope": num(f.slope), "intercept": num(f.intercept), "nmin": f.nmin, "nmax": f.nmax}));
            let table: Vec<Value> = rows.iter().map(|(n, l, a)| json!([n, num(*l), num(*a)])).collect();
            Ok(json_doc(cfg, json!({"fit": fit, "table": table})))
        }
        _ => {
            let mut csv = Csv::new(cfg, &["N", "lambda_sq", "alpha"]);
            if let Some(f) = fit {
                csv.note("slope", f.slope);
                csv.note("intercept", f.intercept);
            }
            for (n, l, a) in rows {
                csv.row(&[n.to_string(), l.to_string(), a.to_string()]);
            }
            Ok(csv.into_bytes())
        }
    }
}

fn normalize<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Vec<u8>> {
    let mut g = cfg.gibbs();
    let n = estimate_normalization(&mut g, cfg.samples, cfg.seed, exec)?;
    Ok(json_doc(
        cfg,
        json!({"beta": num(n.beta), "stderr": num(n.stderr), "samples": n.samples,
               "fingerprint": format!("{:016x}", g.fingerprint())}),
    ))
}

pub fn ensemble_summary(e: &WeightedEnsemble) -> Value {
    let w: f64 = e.samples.iter().map(|s| s.weight).sum();
    json!({
        "model": e.model.tag(),
        "N": e.cutoff,
        "seed": e.seed,
        "count": e.samples.len(),
        "fingerprint": format!("{:016x}", e.fingerprint),
        "ess": num(e.ess),
        "low_ess": e.low_ess,
        "weight_sum": num(w),
        "mean_mass": if w > 0.0 { num(e.mean(|u| u.norm_sq())) } else { Value::Null },
    })
}

fn replay(cfg: &ExperimentConfig) -> Result<Vec<u8>> {
    let path = cfg.input.as_ref().expect("validated");
    let e = ensemble::read(path, Some(cfg.gibbs().fingerprint()))?;
    Ok(json_doc(cfg, ensemble_summary(&e)))
}
