//! Cauchy rates `E_mu |F_N - F_M|^2` of renormalized functionals.

use alloc::format;
use alloc::vec::Vec;

use super::isserlis::{
    conjugate, convolve, isserlis_expect, mass, quartic_integral, second_moment, symbolic_circle, truncate,
    Polynomial, SymField, PAIRING_BUDGET,
};
use crate::basis::{Basis, SpectralField};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::functionals as fx;
use crate::model::{ModeIndex, Model};
use crate::randfield::{sample_mu, RngStream};
use crate::Complex;

/// Functionals whose truncations form a Cauchy sequence in `L^2(d mu)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateFunctional {
    /// Benjamin-Ono `Pi^0(u_N^2)` in `H^{-sigma}`.
    BoSquare,
    /// Half-wave quartic `f_N`.
    HwQuartic,
    /// Half-wave Wick cubic `G_N` in `H^{-sigma}`.
    HwWickCubic,
    /// DNLS momentum part `J(u_N)`.
    DnlsCurrent,
    /// DNLS gauge energy `T_{u_N}`.
    DnlsMomentum,
}

impl RateFunctional {
    pub const ALL: [RateFunctional; 5] = [
        RateFunctional::BoSquare,
        RateFunctional::HwQuartic,
        RateFunctional::HwWickCubic,
        RateFunctional::DnlsCurrent,
        RateFunctional::DnlsMomentum,
    ];

    pub fn model(self) -> Model {
        match self {
            RateFunctional::BoSquare => Model::BenjaminOno,
            RateFunctional::HwQuartic | RateFunctional::HwWickCubic => Model::HalfWave,
            RateFunctional::DnlsCurrent | RateFunctional::DnlsMomentum => Model::Dnls,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            RateFunctional::BoSquare => "bo-square",
            RateFunctional::HwQuartic => "hw-quartic",
            RateFunctional::HwWickCubic => "hw-wick",
            RateFunctional::DnlsCurrent => "dnls-current",
            RateFunctional::DnlsMomentum => "dnls-momentum",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.tag() == s)
            .ok_or_else(|| Error::invalid(format!("unknown functional '{s}'")))
    }

    /// Field-valued functionals are measured in `H^{-sigma}`.
    pub fn needs_sigma(self) -> bool {
        matches!(self, RateFunctional::BoSquare | RateFunctional::HwWickCubic)
    }

    /// Cutoff of the basis the samples are drawn in.
    fn sampling_cutoff(self, n: usize) -> usize {
        match self {
            RateFunctional::BoSquare => 2 * n,
            _ => n,
        }
    }

    /// Rough number of monomial pairs the exact oracle enumerates.
    pub fn oracle_cost(self, n: usize) -> u64 {
        let w = 2 * n as u64 + 1;
        match self {
            RateFunctional::HwQuartic | RateFunctional::DnlsMomentum => w.saturating_pow(6),
            RateFunctional::HwWickCubic => w.saturating_pow(5),
            RateFunctional::BoSquare => w.saturating_pow(3),
            RateFunctional::DnlsCurrent => (2 * n as u64).saturating_pow(2),
        }
    }
}

impl core::fmt::Display for RateFunctional {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePoint {
    pub m: usize,
    pub estimate: f64,
    pub stderr: f64,
    /// Exact value from the pairing oracle, when affordable.
    pub exact: Option<f64>,
}

/// Weighted least-squares fit of `ln estimate` against `ln M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// 95% interval (normal approximation).
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    pub functional: RateFunctional,
    pub cutoff: usize,
    pub sigma: f64,
    pub samples: usize,
    pub seed: u64,
    pub points: Vec<RatePoint>,
    /// Absent with a single `M`.
    pub fit: Option<SlopeFit>,
}

impl RateReport {
    /// Each estimate is at most the previous one plus `z` combined standard errors.
    pub fn monotone(&self, z: f64) -> bool {
        self.points.windows(2).all(|w| {
            let tol = z * libm::sqrt(w[0].stderr * w[0].stderr + w[1].stderr * w[1].stderr);
            w[1].estimate <= w[0].estimate + tol
        })
    }
}

/// Fit `ln y = a + s ln m` to `(m, y, se)` triples. Standard errors enter as
/// weights `(y / se)^2`; with any zero error the fit is unweighted. The slope
/// error is inflated by the reduced chi-square when it exceeds 1.
pub fn fit_slope(points: &[(f64, f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 2 {
        return Err(Error::invalid("a slope needs at least two points"));
    }
    if points.iter().any(|p| !(p.0 > 0.0) || !(p.1 > 0.0) || !p.1.is_finite()) {
        return Err(Error::invalid("slope fit needs positive abscissae and estimates"));
    }
    let weighted = points.iter().all(|p| p.2 > 0.0);
    let data: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|&(m, y, se)| {
            let w = if weighted { (y / se) * (y / se) } else { 1.0 };
            (libm::log(m), libm::log(y), w)
        })
        .collect();
    let sw: f64 = data.iter().map(|d| d.2).sum();
    let mx = data.iter().map(|d| d.2 * d.0).sum::<f64>() / sw;
    let my = data.iter().map(|d| d.2 * d.1).sum::<f64>() / sw;
    let sxx: f64 = data.iter().map(|d| d.2 * (d.0 - mx) * (d.0 - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::invalid("slope fit needs two distinct M values"));
    }
    let sxy: f64 = data.iter().map(|d| d.2 * (d.0 - mx) * (d.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let chi2: f64 = data.iter().map(|d| { let r = d.1 - intercept - slope * d.0; d.2 * r * r }).sum();
    let dof = data.len() as f64 - 2.0;
    let var = if weighted {
        let scale = if dof > 0.0 { (chi2 / dof).max(1.0) } else { 1.0 };
        scale / sxx
    } else if dof > 0.0 {
        chi2 / dof / sxx
    } else {
        0.0
    };
    let stderr = libm::sqrt(var);
    Ok(SlopeFit { slope, intercept, stderr, lo: slope - 1.96 * stderr, hi: slope + 1.96 * stderr })
}

/// `sum_k <k>^{-2 sigma} |c_k|^2`.
fn negative_sobolev_sq(c: &[Complex], brackets: &[f64], sigma: f64) -> f64 {
    c.iter().zip(brackets).map(|(x, b)| libm::pow(*b, -2.0 * sigma) * x.norm_sqr()).sum()
}

fn field_value(f: RateFunctional, u: &SpectralField, n: usize) -> Result<SpectralField> {
    match f {
        RateFunctional::BoSquare => fx::bo_square(u, n),
        RateFunctional::HwWickCubic => fx::wick_cubic_hw(u, n),
        _ => unreachable!(),
    }
}

fn scalar_value(f: RateFunctional, u: &SpectralField, n: usize) -> Result<f64> {
    match f {
        RateFunctional::HwQuartic => fx::quartic_hw(u, n),
        RateFunctional::DnlsCurrent => fx::dnls_current(u, n),
        RateFunctional::DnlsMomentum => fx::dnls_momentum(u, n),
        _ => unreachable!(),
    }
}

/// `|F_N(u) - F_M(u)|^2` (field-valued: in `H^{-sigma}`) for each `M`.
pub fn rate_sample(f: RateFunctional, u: &SpectralField, n: usize, ms: &[usize], sigma: f64) -> Result<Vec<f64>> {
    if f.needs_sigma() {
        let top = field_value(f, u, n)?;
        let br = u.basis().brackets();
        ms.iter()
            .map(|&m| {
                let d = &top - &field_value(f, u, m)?;
                Ok(negative_sobolev_sq(d.coeffs(), &br, sigma))
            })
            .collect()
    } else {
        let top = scalar_value(f, u, n)?;
        ms.iter()
            .map(|&m| {
                let d = top - scalar_value(f, u, m)?;
                Ok(d * d)
            })
            .collect()
    }
}

fn check_rate_args(f: RateFunctional, model: Model, n: usize, ms: &[usize], sigma: f64) -> Result<()> {
    if f.model() != model {
        return Err(Error::invalid(format!("functional {f} belongs to model {}, not {model}", f.model())));
    }
    if ms.is_empty() {
        return Err(Error::invalid("the M list is empty"));
    }
    if let Some(m) = ms.iter().find(|&&m| m >= n) {
        return Err(Error::invalid(format!("M = {m} is not below N = {n}")));
    }
    if f.needs_sigma() && !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("functional {f} needs a Sobolev index sigma > 0")));
    }
    Ok(())
}

/// Monte Carlo estimates of `E_mu |F_N - F_M|^2` for each `M`, with exact
/// values when the pairing oracle fits its budget, and a log-log slope.
#[allow(clippy::too_many_arguments)]
pub fn cauchy_rate<E: Executor>(
    model: Model,
    functional: RateFunctional,
    n: usize,
    ms: &[usize],
    sigma: f64,
    samples: usize,
    seed: u64,
    exec: &E,
) -> Result<RateReport> {
    check_rate_args(functional, model, n, ms, sigma)?;
    if samples < 2 {
        return Err(Error::invalid("a rate estimate needs at least two samples"));
    }
    let basis = Basis::new(model, functional.sampling_cutoff(n))?;
    let rows: Vec<Result<Vec<f64>>> = exec.map(samples, |i| {
        let u = sample_mu(&basis, &RngStream::new(seed, i as u64));
        rate_sample(functional, &u, n, ms, sigma)
    });
    let mut sums = alloc::vec![(0.0f64, 0.0f64); ms.len()];
    for r in rows {
        for (s, x) in sums.iter_mut().zip(r?) {
            s.0 += x;
            s.1 += x * x;
        }
    }
    let k = samples as f64;
    let mut points = Vec::with_capacity(ms.len());
    for (&m, &(s, s2)) in ms.iter().zip(&sums) {
        let mean = s / k;
        let var = ((s2 - k * mean * mean) / (k - 1.0)).max(0.0);
        let exact = if functional.oracle_cost(n) <= PAIRING_BUDGET {
            Some(exact_rate(functional, n, m, sigma)?)
        } else {
            None
        };
        points.push(RatePoint { m, estimate: mean, stderr: libm::sqrt(var / k), exact });
    }
    let fit = if points.len() > 1 {
        Some(fit_slope(&points.iter().map(|p| (p.m as f64, p.estimate, p.stderr)).collect::<Vec<_>>())?)
    } else {
        None
    };
    Ok(RateReport { functional, cutoff: n, sigma, samples, seed, points, fit })
}

fn field_of(model: Model, n: usize) -> Result<SymField> {
    symbolic_circle(model, n)
}

fn brackets_weight(k: i64, sigma: f64) -> f64 {
    libm::pow(ModeIndex::Circle(k).bracket(), -2.0 * sigma)
}

/// Symbolic `f_N(phi)` for the half-wave model.
pub fn hw_quartic_polynomial(n: usize) -> Result<Polynomial> {
    let phi = field_of(Model::HalfWave, n)?;
    hw_quartic_of(&phi)
}

fn hw_quartic_of(phi: &SymField) -> Result<Polynomial> {
    let m = mass(phi)?;
    Ok(quartic_integral(phi)?.scale(Complex::new(-1.0, 0.0)).add(&m.mul(&m)?.scale(Complex::new(2.0, 0.0))))
}

fn current_of(phi: &SymField) -> Result<Polynomial> {
    let mut out = Polynomial::zero();
    for (k, p) in phi {
        out.add_assign(&p.mul(&p.conj())?.scale(Complex::new(-(*k as f64), 0.0)));
    }
    Ok(out)
}

fn momentum_of(phi: &SymField) -> Result<Polynomial> {
    Ok(current_of(phi)?.scale(Complex::new(2.0, 0.0)).add(&quartic_integral(phi)?.scale(Complex::new(1.5, 0.0))))
}

/// Modes `0 < |k|` of `u^2`.
fn square_of(phi: &SymField) -> Result<SymField> {
    let mut sq = convolve(phi, phi)?;
    sq.remove(&0);
    Ok(sq)
}

/// `Pi_N(|u|^2 u) - 2 ||u||^2 u` for a band-`N` symbolic field.
fn wick_of(phi: &SymField, n: usize) -> Result<SymField> {
    let cubic = truncate(&convolve(&convolve(phi, &conjugate(phi))?, phi)?, n);
    let m = mass(phi)?.scale(Complex::new(-2.0, 0.0));
    let mut out = cubic;
    for (k, p) in phi {
        out.entry(*k).or_default().add_assign(&m.mul(p)?);
    }
    Ok(out)
}

fn field_difference(a: &SymField, b: &SymField) -> SymField {
    let mut out = a.clone();
    for (k, p) in b {
        out.entry(*k).or_default().add_assign(&p.scale(Complex::new(-1.0, 0.0)));
    }
    out
}

fn weighted_second_moment(x: &SymField, sigma: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (k, p) in x {
        acc += brackets_weight(*k, sigma) * second_moment(p)?;
    }
    Ok(acc)
}

/// Exact `E_mu |F_N - F_M|^2` by Gaussian pairing.
pub fn exact_rate(f: RateFunctional, n: usize, m: usize, sigma: f64) -> Result<f64> {
    check_rate_args(f, f.model(), n, &[m], sigma)?;
    let cost = f.oracle_cost(n);
    if cost > PAIRING_BUDGET {
        return Err(Error::ResourceExhausted(format!(
            "exact {f} at N = {n} needs about {cost} pairings; use the Monte Carlo estimate"
        )));
    }
    let phi = field_of(f.model(), n)?;
    let lo = truncate(&phi, m);
    match f {
        RateFunctional::HwQuartic => second_moment(&hw_quartic_of(&phi)?.add(&hw_quartic_of(&lo)?.scale(-one()))),
        RateFunctional::DnlsCurrent => second_moment(&current_of(&phi)?.add(&current_of(&lo)?.scale(-one()))),
        RateFunctional::DnlsMomentum => second_moment(&momentum_of(&phi)?.add(&momentum_of(&lo)?.scale(-one()))),
        RateFunctional::BoSquare => {
            weighted_second_moment(&field_difference(&square_of(&phi)?, &square_of(&lo)?), sigma)
        }
        RateFunctional::HwWickCubic => {
            weighted_second_moment(&field_difference(&wick_of(&phi, n)?, &wick_of(&lo, m)?), sigma)
        }
    }
}

/// Exact `E_mu f_N` for the half-wave quartic.
pub fn exact_hw_quartic_mean(n: usize) -> Result<f64> {
    if RateFunctional::HwQuartic.oracle_cost(n) > PAIRING_BUDGET {
        return Err(Error::ResourceExhausted(format!("exact quartic mean at N = {n}")));
    }
    Ok(isserlis_expect(&hw_quartic_polynomial(n)?)?.re)
}

fn one() -> Complex {
    Complex::new(1.0, 0.0)
}
