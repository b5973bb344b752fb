//! Gibbs densities against the free measure, normalization and weighted
//! ensembles.
//!
//! Densities are unnormalized and evaluated in the log domain:
//! - zonal NLS: `exp(-(2/(r+1)) int |S_N u|^{r+1})`;
//! - Benjamin-Ono: `chi(g_N(u)) exp(-(2/3) int u_N^3)`;
//! - DNLS: `chi(||u_N||) exp((3/4) f_N(u) - (1/2) int |u_N|^6)`;
//! - half-wave: `chi(g_N(u)) exp(f_N(u) / 2)`;
//! - torus: `exp(-f_N(u))`.
//!
//! Each is `exp(-V)` for the potential part `V` of the energy conserved by
//! the matching flow in [`crate::flow`], which makes it invariant.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::basis::{cutoff_profile, Basis, SpectralField};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::functionals as fx;
use crate::model::Model;
use crate::randfield::{sample_mu, RngStream};

/// Shape of the cutoff `chi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// Indicator of `[-kappa, kappa]` (DNLS: `[0, kappa]` on the norm).
    Indicator,
    /// `cutoff_profile(t / kappa)`.
    Smooth,
}

impl Profile {
    pub fn tag(self) -> &'static str {
        match self {
            Profile::Indicator => "indicator",
            Profile::Smooth => "smooth",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "indicator" => Ok(Profile::Indicator),
            "smooth" => Ok(Profile::Smooth),
            other => Err(Error::invalid(format!("unknown cutoff profile '{other}'"))),
        }
    }

    fn log_chi(self, t: f64, kappa: f64) -> f64 {
        let v = match self {
            Profile::Indicator => {
                if t.abs() <= kappa {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Smooth => cutoff_profile(t / kappa),
        };
        if v > 0.0 {
            libm::log(v)
        } else {
            f64::NEG_INFINITY
        }
    }
}

/// Parameters of one Gibbs density.
#[derive(Clone, Debug, PartialEq)]
pub struct GibbsConfig {
    pub model: Model,
    pub cutoff: usize,
    pub kappa: f64,
    pub profile: Profile,
    /// Zonal power `r`.
    pub power: f64,
    /// Estimated `beta_N`, once known.
    pub normalization: Option<f64>,
}

impl GibbsConfig {
    /// Defaults: indicator cutoff with `kappa = 2` (BO, half-wave) or
    /// `kappa = 1` (DNLS), zonal power 3.
    pub fn new(model: Model, cutoff: usize) -> Self {
        let kappa = if model == Model::Dnls { 1.0 } else { 2.0 };
        GibbsConfig { model, cutoff, kappa, profile: Profile::Indicator, power: 3.0, normalization: None }
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_profile(mut self, profile: Profile) -> Self {
        self.profile = profile;
        self
    }

    pub fn with_power(mut self, r: f64) -> Self {
        self.power = r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::invalid(format!("kappa must be positive, got {}", self.kappa)));
        }
        if self.cutoff == 0 && self.model == Model::ZonalNls {
            return Err(Error::invalid("zonal cutoff must be at least 1"));
        }
        if self.model == Model::ZonalNls && !(1.0..5.0).contains(&self.power) {
            return Err(Error::invalid(format!("power r = {} is outside [1, 5)", self.power)));
        }
        Ok(())
    }

    /// Name of the density family.
    pub fn family(&self) -> &'static str {
        match self.model {
            Model::ZonalNls => "G_N",
            Model::BenjaminOno | Model::Dnls => "Psi_N",
            Model::HalfWave => "Theta_N",
            Model::Torus => "exp(-f_N)",
        }
    }

    /// Basis on which this config samples.
    pub fn basis(&self) -> Result<Basis> {
        self.validate()?;
        Basis::new(self.model, self.cutoff)
    }

    /// FNV-1a hash of everything that determines the density.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::new();
        h.write(&[self.model.code()]);
        h.write(&(self.cutoff as u64).to_le_bytes());
        h.write(&self.kappa.to_bits().to_le_bytes());
        h.write(self.profile.tag().as_bytes());
        h.write(&self.power.to_bits().to_le_bytes());
        h.finish()
    }
}

/// 64-bit FNV-1a.
#[derive(Clone, Copy, Debug)]
pub struct Fnv(u64);

impl Fnv {
    pub fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    pub fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= *b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    pub fn finish(self) -> u64 {
        self.0
    }
}

impl Default for Fnv {
    fn default() -> Self {
        Self::new()
    }
}

/// Log of the unnormalized density; `-inf` outside the cutoff support.
pub fn log_density(config: &GibbsConfig, u: &SpectralField) -> Result<f64> {
    config.validate()?;
    let b = u.basis();
    if b.model() != config.model {
        return Err(Error::invalid(format!(
            "field of model {} passed to a {} density",
            b.model(),
            config.model
        )));
    }
    let n = config.cutoff;
    b.check_cutoff(n)?;
    let c = u.coeffs();
    Ok(match config.model {
        Model::ZonalNls => {
            let p = config.power + 1.0;
            -(2.0 / p) * fx::zonal_power_integral(b, c, n, p)
        }
        Model::BenjaminOno => {
            let chi = config.profile.log_chi(fx::mass_recentered(u, n)?, config.kappa);
            if chi == f64::NEG_INFINITY {
                return Ok(chi);
            }
            chi - (2.0 / 3.0) * bo_cubic(b, c, n)
        }
        Model::Dnls => {
            let norm = libm::sqrt(crate::basis::project(u, n)?.norm_sq());
            let chi = config.profile.log_chi(norm, config.kappa);
            if chi == f64::NEG_INFINITY {
                return Ok(chi);
            }
            chi + 0.75 * fx::dnls_quartic_coeffs(b, c, n) - 0.5 * fx::circle_power_integral(b, c, n, 6)
        }
        Model::HalfWave => {
            let chi = config.profile.log_chi(fx::mass_recentered(u, n)?, config.kappa);
            if chi == f64::NEG_INFINITY {
                return Ok(chi);
            }
            chi + 0.5 * fx::quartic_hw(u, n)?
        }
        Model::Torus => -fx::quartic_torus(u, n)?,
    })
}

/// `int u_N^3` for a real circle field, exact.
pub(crate) fn bo_cubic(b: &Basis, c: &[crate::Complex], n: usize) -> f64 {
    let fft = b.circle_fft(3 * n + 1);
    let vals = crate::basis::circle_synth(fft, &fx::low(c, b.cutoff(), n), n);
    vals.iter().map(|v| v.re * v.re * v.re).sum::<f64>() / fft.len() as f64
}

/// The unnormalized density (clamped to `f64::MAX`).
pub fn density(config: &GibbsConfig, u: &SpectralField) -> Result<f64> {
    Ok(libm::exp(log_density(config, u)?).min(f64::MAX))
}

/// Monte Carlo estimate of `beta_N = 1 / E_mu[density]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Normalization {
    pub beta: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Estimate `beta_N` from `samples` free-measure draws and store it in `config`.
pub fn estimate_normalization<E: Executor>(
    config: &mut GibbsConfig,
    samples: usize,
    seed: u64,
    exec: &E,
) -> Result<Normalization> {
    if samples < 100 {
        return Err(Error::invalid("normalization needs at least 100 samples"));
    }
    let logs = log_weights(config, samples, seed, exec)?;
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Err(degenerate(config, samples));
    }
    // Work with w / e^top to stay finite.
    let scaled: Vec<f64> = logs.iter().map(|l| libm::exp(l - top)).collect();
    let n = samples as f64;
    let mean = scaled.iter().sum::<f64>() / n;
    let var = scaled.iter().map(|w| (w - mean) * (w - mean)).sum::<f64>() / (n - 1.0);
    let se_mean = libm::sqrt(var / n);
    let beta = libm::exp(-top) / mean;
    let stderr = beta * se_mean / mean;
    config.normalization = Some(beta);
    Ok(Normalization { beta, stderr, samples })
}

fn degenerate(config: &GibbsConfig, samples: usize) -> Error {
    Error::DegenerateDensity {
        fingerprint: config.fingerprint(),
        detail: format!(
            "model {} N={} kappa={} profile={}: the cutoff support was never hit in {samples} samples",
            config.model,
            config.cutoff,
            config.kappa,
            config.profile.tag()
        ),
    }
}

fn log_weights<E: Executor>(config: &GibbsConfig, count: usize, seed: u64, exec: &E) -> Result<Vec<f64>> {
    let basis = config.basis()?;
    exec.map(count, |i| log_density(config, &sample_mu(&basis, &RngStream::new(seed, i as u64))))
        .into_iter()
        .collect()
}

/// One draw of an ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSample {
    pub field: SpectralField,
    pub weight: f64,
    /// Sample index within the seed's stream family.
    pub index: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedEnsemble {
    pub model: Model,
    pub cutoff: usize,
    pub seed: u64,
    pub fingerprint: u64,
    pub samples: Vec<WeightedSample>,
    pub ess: f64,
    /// Set when the effective sample size is below 10.
    pub low_ess: bool,
}

impl WeightedEnsemble {
    /// Assemble an ensemble and compute its effective sample size.
    pub fn new(config: &GibbsConfig, seed: u64, samples: Vec<WeightedSample>) -> Self {
        let ess = effective_sample_size(samples.iter().map(|s| s.weight));
        WeightedEnsemble {
            model: config.model,
            cutoff: config.cutoff,
            seed,
            fingerprint: config.fingerprint(),
            samples,
            ess,
            low_ess: ess < 10.0,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Self-normalized weighted mean of an observable.
    pub fn mean<F: Fn(&SpectralField) -> f64>(&self, f: F) -> f64 {
        let w: f64 = self.samples.iter().map(|s| s.weight).sum();
        self.samples.iter().map(|s| s.weight * f(&s.field)).sum::<f64>() / w
    }
}

/// `(sum w)^2 / sum w^2`; 0 when every weight is zero.
pub fn effective_sample_size(weights: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut s2) = (0.0, 0.0);
    let mut top: f64 = 0.0;
    let ws: Vec<f64> = weights.collect();
    for &w in &ws {
        top = top.max(w);
    }
    if top == 0.0 {
        return 0.0;
    }
    for &w in &ws {
        let x = w / top;
        s += x;
        s2 += x * x;
    }
    s * s / s2
}

/// How [`sample_rho`] turns free-measure draws into `rho_N` samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplingMode {
    /// Keep every draw, weighted by its density.
    Importance,
    /// Accept draw `i` when a uniform falls below its density (needs a
    /// density bounded by 1: zonal NLS). Accepted draws have weight 1.
    Rejection,
}

/// Draw `count` free-measure samples and weight (or thin) them by the density.
pub fn sample_rho<E: Executor>(
    config: &GibbsConfig,
    count: usize,
    seed: u64,
    mode: SamplingMode,
    exec: &E,
) -> Result<WeightedEnsemble> {
    let basis = config.basis()?;
    if mode == SamplingMode::Rejection && config.model != Model::ZonalNls {
        return Err(Error::unsupported(format!(
            "rejection sampling needs a density bounded by 1; model {} has none",
            config.model
        )));
    }
    let drawn: Vec<Result<Option<WeightedSample>>> = exec.map(count, |i| {
        let stream = RngStream::new(seed, i as u64);
        let field = sample_mu(&basis, &stream);
        let w = density(config, &field)?;
        Ok(match mode {
            SamplingMode::Importance => Some(WeightedSample { field, weight: w, index: i as u64 }),
            SamplingMode::Rejection => {
                (stream.uniform(0) < w).then_some(WeightedSample { field, weight: 1.0, index: i as u64 })
            }
        })
    });
    let mut samples = Vec::with_capacity(count);
    for d in drawn {
        if let Some(s) = d? {
            samples.push(s);
        }
    }
    if mode == SamplingMode::Importance && count > 0 && samples.iter().all(|s| s.weight == 0.0) {
        return Err(degenerate(config, count));
    }
    Ok(WeightedEnsemble::new(config, seed, samples))
}

/// One point of a survival curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailPoint {
    pub lambda: f64,
    /// Fraction of free-measure draws with density above `lambda`.
    pub estimate: f64,
    /// Binomial standard error.
    pub stderr: f64,
}

/// Monte Carlo survival function `lambda -> mu(density > lambda)`.
pub fn tail_curve<E: Executor>(
    config: &GibbsConfig,
    lambdas: &[f64],
    samples: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<TailPoint>> {
    if lambdas.iter().any(|l| !(*l > 0.0)) || lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("the lambda grid must be positive and increasing"));
    }
    if samples == 0 {
        return Err(Error::invalid("tail curve needs at least one sample"));
    }
    let mut logs = log_weights(config, samples, seed, exec)?;
    logs.sort_by(|a, b| a.total_cmp(b));
    let n = samples as f64;
    Ok(lambdas
        .iter()
        .map(|&lambda| {
            let ll = libm::log(lambda);
            let above = samples - logs.partition_point(|l| *l <= ll);
            let p = above as f64 / n;
            TailPoint { lambda, estimate: p, stderr: libm::sqrt(p * (1.0 - p) / n) }
        })
        .collect())
}

/// `(E_mu[density^p])^{1/p}` with a delta-method standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityNorm {
    pub p: f64,
    pub value: f64,
    pub stderr: f64,
}

/// Empirical `L^p(d mu)` norms of the density for each `p`.
pub fn density_lp_norms<E: Executor>(
    config: &GibbsConfig,
    ps: &[f64],
    samples: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<DensityNorm>> {
    if samples < 2 {
        return Err(Error::invalid("density norms need at least two samples"));
    }
    let logs = log_weights(config, samples, seed, exec)?;
    let n = samples as f64;
    ps.iter()
        .map(|&p| {
            if !(p > 0.0) {
                return Err(Error::invalid("exponent p must be positive"));
            }
            let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if top == f64::NEG_INFINITY {
                return Err(degenerate(config, samples));
            }
            let xs: Vec<f64> = logs.iter().map(|l| libm::exp(p * (l - top))).collect();
            let m = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
            let se_m = libm::sqrt(var / n);
            let value = libm::exp(top) * libm::pow(m, 1.0 / p);
            Ok(DensityNorm { p, value, stderr: value * se_m / (p * m) })
        })
        .collect()
}

/// Least-squares slope of `ln estimate` against `ln lambda` over the points
/// with `lo <= lambda <= hi` and a positive estimate.
pub fn tail_slope(curve: &[TailPoint], lo: f64, hi: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|p| p.lambda >= lo && p.lambda <= hi && p.estimate > 0.0)
        .map(|p| (libm::log(p.lambda), libm::log(p.estimate)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

/// Short description used in error messages and provenance headers.
pub fn describe(config: &GibbsConfig) -> String {
    format!(
        "{} {} N={} kappa={} profile={} r={}",
        config.model,
        config.family(),
        config.cutoff,
        config.kappa,
        config.profile.tag(),
        config.power
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::model::ModeIndex;
    use crate::Complex;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    #[test]
    fn density_examples() {
        let z = GibbsConfig::new(Model::ZonalNls, 8);
        let zb = z.basis().unwrap();
        assert_eq!(density(&z, &SpectralField::zeros(&zb)).unwrap(), 1.0);

        let bo = GibbsConfig::new(Model::BenjaminOno, 3).with_kappa(1.0);
        let bb = bo.basis().unwrap();
        assert_eq!(density(&bo, &SpectralField::zeros(&bb)).unwrap(), 0.0);

        let hw = GibbsConfig::new(Model::HalfWave, 1).with_kappa(1.0);
        let hb = hw.basis().unwrap();
        let u = SpectralField::from_modes(&hb, &[(ModeIndex::Circle(0), c(2f64.sqrt()))]).unwrap();
        // g_N = 0 and f_N = 4, so the density is exp(4 / 2).
        assert!((density(&hw, &u).unwrap() - 2f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn log_density_matches_direct_evaluation() {
        let cfg = GibbsConfig::new(Model::Torus, 12);
        let b = cfg.basis().unwrap();
        let u = sample_mu(&b, &RngStream::new(1, 1));
        let direct = (-crate::functionals::quartic_torus(&u, 12).unwrap()).exp();
        assert!((density(&cfg, &u).unwrap() - direct).abs() < 1e-10 * direct.max(1.0));
        let big = u.scaled(1e3);
        let d = density(&cfg, &big).unwrap();
        assert!(d.is_finite() && d >= 0.0);
    }

    #[test]
    fn normalization_examples() {
        let mut z = GibbsConfig::new(Model::ZonalNls, 8);
        let est = estimate_normalization(&mut z, 200, 3, &Sequential).unwrap();
        assert!(est.beta >= 1.0);
        assert_eq!(z.normalization, Some(est.beta));

        let mut hw = GibbsConfig::new(Model::HalfWave, 8);
        let a = estimate_normalization(&mut hw, 300, 5, &Sequential).unwrap();
        let b = estimate_normalization(&mut hw.clone(), 300, 5, &Sequential).unwrap();
        assert!(a.beta.is_finite());
        assert_eq!(a.beta.to_bits(), b.beta.to_bits());

        let mut tiny = GibbsConfig::new(Model::BenjaminOno, 40).with_kappa(1e-6);
        assert!(matches!(
            estimate_normalization(&mut tiny, 100, 1, &Sequential),
            Err(Error::DegenerateDensity { .. })
        ));
        assert!(estimate_normalization(&mut z, 50, 1, &Sequential).is_err());
    }

    #[test]
    fn ensembles() {
        let bo = GibbsConfig::new(Model::BenjaminOno, 8);
        let e = sample_rho(&bo, 400, 11, SamplingMode::Importance, &Sequential).unwrap();
        let r = e.ess / e.len() as f64;
        assert!(r > 0.0 && r < 1.0);
        let again = sample_rho(&bo, 400, 11, SamplingMode::Importance, &Sequential).unwrap();
        assert_eq!(e.ess.to_bits(), again.ess.to_bits());

        let z = GibbsConfig::new(Model::ZonalNls, 8);
        let rej = sample_rho(&z, 300, 2, SamplingMode::Rejection, &Sequential).unwrap();
        assert!(rej.len() <= 300 && !rej.is_empty());
        assert!(rej.samples.iter().all(|s| s.weight == 1.0));
        assert_eq!(rej.ess, rej.len() as f64);
        assert!(sample_rho(&bo, 10, 2, SamplingMode::Rejection, &Sequential).is_err());
    }

    #[test]
    fn ess_bounds() {
        assert_eq!(effective_sample_size([1.0; 7].into_iter()), 7.0);
        assert_eq!(effective_sample_size([0.0, 3.0, 0.0].into_iter()), 1.0);
    }

    #[test]
    fn tail_examples() {
        let hw = GibbsConfig::new(Model::HalfWave, 8);
        let lam = [1.0, 2.0, 5.0, 1e30];
        let curve = tail_curve(&hw, &lam, 500, 4, &Sequential).unwrap();
        assert!(curve.windows(2).all(|w| w[1].estimate <= w[0].estimate));
        assert_eq!(curve[3].estimate, 0.0);
        assert!(tail_curve(&hw, &[2.0, 1.0], 10, 4, &Sequential).is_err());
    }

    #[test]
    fn fingerprints_separate_configs() {
        let a = GibbsConfig::new(Model::HalfWave, 8);
        assert_eq!(a.fingerprint(), a.clone().fingerprint());
        assert_ne!(a.fingerprint(), a.clone().with_kappa(3.0).fingerprint());
        assert_ne!(a.fingerprint(), GibbsConfig::new(Model::HalfWave, 9).fingerprint());
    }

    proptest! {
        #[test]
        fn larger_kappa_never_lowers_density(seed in any::<u64>(), k in 0.1f64..4.0, smooth in any::<bool>()) {
            for model in [Model::BenjaminOno, Model::HalfWave, Model::Dnls] {
                let prof = if smooth { Profile::Smooth } else { Profile::Indicator };
                let lo = GibbsConfig::new(model, 6).with_kappa(k).with_profile(prof);
                let hi = lo.clone().with_kappa(k * 1.5);
                let u = sample_mu(&lo.basis().unwrap(), &RngStream::new(seed, 0));
                prop_assert!(density(&hi, &u).unwrap() >= density(&lo, &u).unwrap());
            }
        }

        #[test]
        fn zonal_density_is_at_most_one(seed in any::<u64>(), r in 1.0f64..4.9) {
            let z = GibbsConfig::new(Model::ZonalNls, 10).with_power(r);
            let u = sample_mu(&z.basis().unwrap(), &RngStream::new(seed, 0));
            let d = density(&z, &u).unwrap();
            prop_assert!((0.0..=1.0).contains(&d));
        }
    }
}
