//! Statistical check that `rho_N` is preserved by the truncated flow.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ks::weighted_two_sample;
use crate::basis::{project, SpectralField};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::flow::{evolve, invariant_drift, Drift, FlowConfig};
use crate::functionals as fx;
use crate::gibbs::{density, effective_sample_size, GibbsConfig};
use crate::model::Model;
use crate::randfield::{sample_mu, signed_cubic, RngStream};

/// Scalar functionals compared at times 0 and `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    /// `||Pi_m u||^2` (capped at the basis cutoff).
    LowMass(usize),
    /// Real part of the first nonconstant coefficient.
    ReFirst,
    /// Imaginary part of the first nonconstant coefficient.
    ImFirst,
    /// `int u^3` (Benjamin-Ono).
    SignedCubic,
    /// `f_N` (half-wave and torus).
    Quartic,
}

impl Observable {
    pub fn name(self) -> String {
        match self {
            Observable::LowMass(m) => format!("low-mass-{m}"),
            Observable::ReFirst => "re-c1".into(),
            Observable::ImFirst => "im-c1".into(),
            Observable::SignedCubic => "signed-cubic".into(),
            Observable::Quartic => "quartic".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "re-c1" => Ok(Observable::ReFirst),
            "im-c1" => Ok(Observable::ImFirst),
            "signed-cubic" => Ok(Observable::SignedCubic),
            "quartic" => Ok(Observable::Quartic),
            _ => s
                .strip_prefix("low-mass-")
                .and_then(|m| m.parse().ok())
                .map(Observable::LowMass)
                .ok_or_else(|| Error::invalid(format!("unknown observable '{s}'"))),
        }
    }

    /// The default set for a model.
    pub fn defaults(model: Model) -> Vec<Observable> {
        let mut v = alloc::vec![Observable::LowMass(8), Observable::ReFirst, Observable::ImFirst];
        match model {
            Model::BenjaminOno => v.push(Observable::SignedCubic),
            Model::HalfWave | Model::Torus => v.push(Observable::Quartic),
            _ => {}
        }
        v
    }

    pub fn eval(self, u: &SpectralField, n: usize) -> Result<f64> {
        let b = u.basis();
        match self {
            Observable::LowMass(m) => Ok(project(u, m.min(b.cutoff()))?.norm_sq()),
            Observable::ReFirst | Observable::ImFirst => {
                let i = match b.model() {
                    Model::ZonalNls | Model::Torus => 1,
                    _ => b.cutoff() + 1,
                };
                let c = u.coeffs()[i];
                Ok(if self == Observable::ReFirst { c.re } else { c.im })
            }
            Observable::SignedCubic => signed_cubic(u),
            Observable::Quartic => match b.model() {
                Model::HalfWave => fx::quartic_hw(u, n),
                Model::Torus => fx::quartic_torus(u, n),
                m => Err(Error::unsupported(format!("no quartic observable for {m}"))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceConfig {
    pub gibbs: GibbsConfig,
    pub flow: FlowConfig,
    pub observables: Vec<Observable>,
    pub count: usize,
    pub seed: u64,
    pub permutations: usize,
    /// Replace the density weights by 1 (tests the free measure instead).
    pub uniform_weights: bool,
}

impl InvarianceConfig {
    pub fn new(gibbs: GibbsConfig, flow: FlowConfig, count: usize, seed: u64) -> Self {
        let observables = Observable::defaults(gibbs.model);
        InvarianceConfig { gibbs, flow, observables, count, seed, permutations: 1000, uniform_weights: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObservableResult {
    pub name: String,
    pub ks: f64,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    pub model: Model,
    pub cutoff: usize,
    pub time: f64,
    pub seed: u64,
    pub count: usize,
    pub ess: f64,
    pub observables: Vec<ObservableResult>,
    /// Largest drift of each invariant over all trajectories.
    pub drift: Drift,
}

impl InvarianceReport {
    /// Smallest p-value over the observables.
    pub fn min_p(&self) -> f64 {
        self.observables.iter().map(|o| o.p).fold(1.0, f64::min)
    }
}

struct Row {
    weight: f64,
    before: Vec<f64>,
    after: Vec<f64>,
    drift: Drift,
}

/// Draw `count` free-measure samples weighted by the density, evolve each to
/// time `T`, and compare every observable before and after with the same
/// weights.
pub fn invariance_report<E: Executor>(cfg: &InvarianceConfig, exec: &E) -> Result<InvarianceReport> {
    let g = &cfg.gibbs;
    if cfg.flow.model != g.model {
        return Err(Error::invalid(format!("flow model {} differs from measure model {}", cfg.flow.model, g.model)));
    }
    if cfg.flow.cutoff != g.cutoff {
        return Err(Error::invalid(format!(
            "flow cutoff {} differs from measure cutoff {}",
            cfg.flow.cutoff, g.cutoff
        )));
    }
    if cfg.observables.is_empty() {
        return Err(Error::invalid("no observables requested"));
    }
    if cfg.count < 2 {
        return Err(Error::invalid("invariance needs at least two samples"));
    }
    let basis = g.basis()?;
    cfg.flow.validate(&basis)?;
    let n = g.cutoff;
    let rows: Vec<Result<Row>> = exec.map(cfg.count, |i| {
        let v = sample_mu(&basis, &RngStream::new(cfg.seed, i as u64));
        let weight = if cfg.uniform_weights { 1.0 } else { density(g, &v)? };
        let before = cfg.observables.iter().map(|o| o.eval(&v, n)).collect::<Result<Vec<_>>>()?;
        if weight == 0.0 {
            // Zero-weight draws do not enter the test; skip their evolution.
            return Ok(Row { weight, after: before.clone(), before, drift: Drift::default() });
        }
        let traj = evolve(&cfg.flow, &v)?;
        let after = cfg.observables.iter().map(|o| o.eval(traj.last(), n)).collect::<Result<Vec<_>>>()?;
        Ok(Row { weight, before, after, drift: invariant_drift(&traj.records)? })
    });
    let rows: Vec<Row> = rows.into_iter().collect::<Result<_>>()?;
    let weights: Vec<f64> = rows.iter().map(|r| r.weight).collect();
    let drift = rows.iter().fold(Drift::default(), |d, r| Drift {
        l2: d.l2.max(r.drift.l2),
        hamiltonian: d.hamiltonian.max(r.drift.hamiltonian),
        mean: d.mean.max(r.drift.mean),
    });
    let mut observables = Vec::with_capacity(cfg.observables.len());
    for (j, o) in cfg.observables.iter().enumerate() {
        let a: Vec<f64> = rows.iter().map(|r| r.before[j]).collect();
        let b: Vec<f64> = rows.iter().map(|r| r.after[j]).collect();
        // Each observable gets its own permutation stream.
        let t = weighted_two_sample(&a, &b, &weights, cfg.permutations, cfg.seed ^ (j as u64 + 1) << 48)?;
        observables.push(ObservableResult { name: o.name(), ks: t.statistic, p: t.p_value });
    }
    Ok(InvarianceReport {
        model: g.model,
        cutoff: n,
        time: cfg.flow.horizon,
        seed: cfg.seed,
        count: cfg.count,
        ess: effective_sample_size(weights.iter().copied()),
        observables,
        drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    #[test]
    fn zero_time_gives_zero_statistics() {
        for model in [Model::HalfWave, Model::BenjaminOno, Model::Torus] {
            let g = GibbsConfig::new(model, 4);
            let f = FlowConfig::new(model, 4, 0.01, 0.0);
            let mut c = InvarianceConfig::new(g, f, 50, 1);
            c.permutations = 20;
            let r = invariance_report(&c, &Sequential).unwrap();
            for o in &r.observables {
                assert_eq!(o.ks, 0.0, "{model} {}", o.name);
                assert_eq!(o.p, 1.0);
            }
        }
    }

    #[test]
    fn observable_names_round_trip() {
        for model in Model::ALL {
            for o in Observable::defaults(model) {
                assert_eq!(Observable::parse(&o.name()).unwrap(), o);
            }
        }
        assert!(Observable::parse("x").is_err());
    }

    #[test]
    fn small_half_wave_run_is_consistent() {
        let g = GibbsConfig::new(Model::HalfWave, 4);
        let f = FlowConfig::new(Model::HalfWave, 4, 0.01, 0.5);
        let mut c = InvarianceConfig::new(g, f, 400, 2);
        c.permutations = 200;
        let r = invariance_report(&c, &Sequential).unwrap();
        assert!(r.min_p() > 0.001, "{r:?}");
        assert!(r.drift.l2 < 1e-5, "{:?}", r.drift);
        // The half-wave weights are heavy-tailed; the ESS is a small
        // fraction of the draws even at N = 4.
        assert!(r.ess > 2.0, "{}", r.ess);
    }

    #[test]
    fn mismatched_configs_are_rejected() {
        let g = GibbsConfig::new(Model::HalfWave, 4);
        let f = FlowConfig::new(Model::BenjaminOno, 4, 0.01, 0.5);
        assert!(invariance_report(&InvarianceConfig::new(g, f, 10, 0), &Sequential).is_err());
    }
}
