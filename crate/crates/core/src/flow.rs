//! Truncated flows integrated with interaction-picture RK4.
//!
//! Every model is written as `dc/dt = -i omega c + NL_N(c)` where the
//! nonlinear part only touches modes up to the cutoff `N`:
//! - half-wave: `NL = -i G_N(u)`;
//! - torus: `NL = -i F_N(u_N)`;
//! - zonal NLS: `NL = -i S_N(|S_N u|^{r-1} S_N u)`;
//! - Benjamin-Ono: `NL_n = -i n [(u_N)^2]_n`;
//! - DNLS: `NL = Pi_N d_x(|u_N|^2 u_N) - i T_{u_N} u_N - i R_N(u_N)`.
//!
//! The linear factor `e^{-i omega t}` is applied exactly to every mode, so
//! modes above `N` rotate without error.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::basis::{circle_analyze, circle_synth, project, Basis, SpectralField};
use crate::error::{Error, Result};
use crate::functionals as fx;
use crate::gibbs::bo_cubic;
use crate::model::Model;
use crate::Complex;

const ZERO: Complex = Complex { re: 0.0, im: 0.0 };
const NEG_I: Complex = Complex { re: 0.0, im: -1.0 };

/// Integration settings.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig {
    pub model: Model,
    /// Cutoff `N` of the nonlinearity.
    pub cutoff: usize,
    /// Step size (positive; the sign of `horizon` sets the direction).
    pub dt: f64,
    /// Final time `T`; negative values integrate backwards.
    pub horizon: f64,
    /// Record invariants every this many steps.
    pub monitor_every: usize,
    /// Multiplier on the nonlinearity (0 gives the linear flow).
    pub coupling: f64,
    /// Zonal power `r`.
    pub power: f64,
}

impl FlowConfig {
    pub fn new(model: Model, cutoff: usize, dt: f64, horizon: f64) -> Self {
        FlowConfig { model, cutoff, dt, horizon, monitor_every: 100, coupling: 1.0, power: 3.0 }
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn with_monitor(mut self, every: usize) -> Self {
        self.monitor_every = every;
        self
    }

    pub fn with_power(mut self, r: f64) -> Self {
        self.power = r;
        self
    }

    /// Number of steps and the signed step actually used (`T / steps`).
    pub fn steps(&self) -> (usize, f64) {
        if self.horizon == 0.0 {
            return (0, 0.0);
        }
        let n = libm::round(self.horizon.abs() / self.dt).max(1.0) as usize;
        (n, self.horizon / n as f64)
    }

    /// Checks the step against the fastest mode below the cutoff:
    /// `dt * max |omega| <= pi`.
    pub fn validate(&self, basis: &Basis) -> Result<()> {
        if basis.model() != self.model {
            return Err(Error::invalid(format!(
                "a {} flow cannot evolve a {} field",
                self.model,
                basis.model()
            )));
        }
        basis.check_cutoff(self.cutoff)?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(format!("time step must be positive, got {}", self.dt)));
        }
        if !self.horizon.is_finite() {
            return Err(Error::invalid("horizon must be finite"));
        }
        if !self.coupling.is_finite() {
            return Err(Error::invalid("coupling must be finite"));
        }
        if self.model == Model::ZonalNls && !(1.0..5.0).contains(&self.power) {
            return Err(Error::invalid(format!("power r = {} is outside [1, 5)", self.power)));
        }
        let wmax = basis
            .dispersion()
            .iter()
            .enumerate()
            .filter(|(i, _)| basis.rank(*i) <= self.cutoff)
            .fold(0.0f64, |m, (_, w)| m.max(w.abs()));
        let (_, h) = self.steps();
        if h.abs() * wmax > core::f64::consts::PI {
            return Err(Error::invalid(format!(
                "time step {} is unstable: dt * max|omega| = {} exceeds pi",
                h.abs(),
                h.abs() * wmax
            )));
        }
        Ok(())
    }
}

/// Invariants at one monitor time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantRecord {
    pub time: f64,
    /// `||u||_{L^2}`.
    pub l2: f64,
    pub hamiltonian: f64,
    /// Real part of the mean coefficient `c_0` (circle models; 0 otherwise).
    pub mean: f64,
    pub max_coeff: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub states: Vec<SpectralField>,
    pub records: Vec<InvariantRecord>,
}

impl Trajectory {
    pub fn last(&self) -> &SpectralField {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// Largest relative change of each invariant over a trajectory.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Drift {
    pub l2: f64,
    pub hamiltonian: f64,
    pub mean: f64,
}

/// `max_t |Q(t) - Q(0)| / max(1, |Q(0)|)` for each tracked invariant.
pub fn invariant_drift(records: &[InvariantRecord]) -> Result<Drift> {
    let first = records.first().ok_or_else(|| Error::invalid("empty trajectory"))?;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    Ok(records.iter().fold(Drift::default(), |d, r| Drift {
        l2: d.l2.max(rel(r.l2, first.l2)),
        hamiltonian: d.hamiltonian.max(rel(r.hamiltonian, first.hamiltonian)),
        mean: d.mean.max(rel(r.mean, first.mean)),
    }))
}

/// Nonlinear part of the vector field, in basis layout.
fn nonlinear(cfg: &FlowConfig, b: &Basis, c: &[Complex]) -> Vec<Complex> {
    let n = cfg.cutoff;
    let k = cfg.coupling;
    if k == 0.0 {
        return vec![ZERO; c.len()];
    }
    let mut out = match cfg.model {
        Model::HalfWave => fx::wick_hw_coeffs(b, c, n).into_iter().map(|x| x * NEG_I).collect(),
        Model::Torus => {
            let a = fx::alpha_in(b, n);
            let mut f = fx::torus_cubic(b, c, n);
            for (o, x) in f.iter_mut().zip(c).take(n + 1) {
                *o = (*o - x * (2.0 * a)) * NEG_I;
            }
            f
        }
        Model::ZonalNls => fx::zonal_power_coeffs(b, c, n, cfg.power).into_iter().map(|x| x * NEG_I).collect(),
        Model::BenjaminOno => {
            // The square has band 2n; mode m sits at index m + 2n.
            let sq = fx::bo_square_band(b, c, n);
            let v: Vec<Complex> =
                (0..=2 * n).map(|i| sq[i + n] * Complex::new(0.0, -((i as i64 - n as i64) as f64))).collect();
            fx::place(b, &v, n)
        }
        Model::Dnls => dnls_nonlinear(b, c, n),
    };
    if k != 1.0 {
        out.iter_mut().for_each(|x| *x *= k);
    }
    out
}

fn dnls_nonlinear(b: &Basis, c: &[Complex], n: usize) -> Vec<Complex> {
    let fft = b.circle_fft(4 * n + 1);
    let lowc = fx::low(c, b.cutoff(), n);
    let mut vals = circle_synth(fft, &lowc, n);
    for v in vals.iter_mut() {
        *v *= v.norm_sqr();
    }
    let cube = circle_analyze(fft, vals, n);
    let t = fx::momentum(b, c, n);
    let r = fx::remainder_band(b, c, n);
    let v: Vec<Complex> = (0..=2 * n)
        .map(|i| {
            let m = (i as i64 - n as i64) as f64;
            cube[i] * Complex::new(0.0, m) + NEG_I * (lowc[i] * t + r[i])
        })
        .collect();
    fx::place(b, &v, n)
}

/// Full vector field `du/dt` of the truncated system (coupling 1, zonal `r = 3`).
pub fn rhs(model: Model, u: &SpectralField, n: usize) -> Result<SpectralField> {
    let cfg = FlowConfig::new(model, n, 1.0, 0.0);
    rhs_with(&cfg, u)
}

/// `du/dt` for an explicit configuration.
pub fn rhs_with(cfg: &FlowConfig, u: &SpectralField) -> Result<SpectralField> {
    let b = u.basis();
    if b.model() != cfg.model {
        return Err(Error::invalid("field and flow models differ"));
    }
    b.check_cutoff(cfg.cutoff)?;
    let w = b.dispersion();
    let mut out = nonlinear(cfg, b, u.coeffs());
    for ((o, x), om) in out.iter_mut().zip(u.coeffs()).zip(&w) {
        *o += NEG_I * *om * x;
    }
    Ok(SpectralField::from_raw(b, out))
}

/// Conserved energy of the truncated system (coupling 1, zonal `r = 3`).
pub fn hamiltonian(model: Model, u: &SpectralField, n: usize) -> Result<f64> {
    let cfg = FlowConfig::new(model, n, 1.0, 0.0);
    hamiltonian_with(&cfg, u)
}

/// Energy conserved by [`evolve`] under `cfg`: the quadratic part over all
/// modes plus `coupling` times the truncated potential.
///
/// - half-wave: `<Lambda u, u> + (1/2) int |u_N|^4 - ||u_N||^4`;
/// - Benjamin-Ono: `-(1/2) sum |n| |c_n|^2 - (1/3) int u_N^3`;
/// - DNLS: `sum n^2 |c_n|^2 - (3/4) f_N(u) + (1/2) int |u_N|^6`;
/// - zonal: `sum n^2 |c_n|^2 + (2/(r+1)) int |S_N u|^{r+1}`;
/// - torus: `sum (1 + lambda^2) |c|^2 + f_N(u)`.
pub fn hamiltonian_with(cfg: &FlowConfig, u: &SpectralField) -> Result<f64> {
    let b = u.basis();
    if b.model() != cfg.model {
        return Err(Error::invalid("field and flow models differ"));
    }
    let n = cfg.cutoff;
    b.check_cutoff(n)?;
    let c = u.coeffs();
    let quad: f64 = b.dispersion().iter().zip(c).map(|(w, x)| w * x.norm_sqr()).sum();
    let k = cfg.coupling;
    Ok(match cfg.model {
        Model::HalfWave => {
            let m = project(u, n)?.norm_sq();
            quad + k * (0.5 * fx::circle_power_integral(b, c, n, 4) - m * m)
        }
        Model::BenjaminOno => {
            let kin: f64 = b.modes().zip(c).map(|(m, x)| match m {
                crate::ModeIndex::Circle(j) => j.unsigned_abs() as f64 * x.norm_sqr(),
                _ => 0.0,
            }).sum();
            -0.5 * kin - k / 3.0 * bo_cubic(b, c, n)
        }
        Model::Dnls => {
            quad + k * (-0.75 * fx::dnls_quartic_coeffs(b, c, n) + 0.5 * fx::circle_power_integral(b, c, n, 6))
        }
        Model::ZonalNls => {
            let p = cfg.power + 1.0;
            quad + k * (2.0 / p) * fx::zonal_power_integral(b, c, n, p)
        }
        Model::Torus => quad + k * fx::quartic_torus(u, n)?,
    })
}

fn record(cfg: &FlowConfig, u: &SpectralField, time: f64) -> Result<InvariantRecord> {
    let b = u.basis();
    let mean = if b.model().is_circle() { u.coeffs()[b.cutoff()].re } else { 0.0 };
    Ok(InvariantRecord {
        time,
        l2: u.l2_norm(),
        hamiltonian: hamiltonian_with(cfg, u)?,
        mean,
        max_coeff: u.max_abs(),
    })
}

struct Stepper<'a> {
    cfg: &'a FlowConfig,
    basis: &'a Basis,
    half: Vec<Complex>,
    h: f64,
}

impl Stepper<'_> {
    fn new<'a>(cfg: &'a FlowConfig, basis: &'a Basis, h: f64) -> Stepper<'a> {
        let half = basis
            .dispersion()
            .iter()
            .map(|w| {
                let a = -w * h / 2.0;
                Complex::new(libm::cos(a), libm::sin(a))
            })
            .collect();
        Stepper { cfg, basis, half, h }
    }

    fn nl(&self, c: &[Complex]) -> Vec<Complex> {
        nonlinear(self.cfg, self.basis, c)
    }

    fn step(&self, c: &mut [Complex]) {
        let h = self.h;
        let e = &self.half;
        let ci: Vec<Complex> = c.iter().zip(e).map(|(x, e)| x * e).collect();
        let k1: Vec<Complex> = self.nl(c).iter().zip(e).map(|(x, e)| x * e).collect();
        let axpy = |a: &[Complex], s: f64, k: &[Complex]| -> Vec<Complex> {
            a.iter().zip(k).map(|(x, y)| x + y * s).collect()
        };
        let k2 = self.nl(&axpy(&ci, h / 2.0, &k1));
        let k3 = self.nl(&axpy(&ci, h / 2.0, &k2));
        let end: Vec<Complex> = axpy(&ci, h, &k3).iter().zip(e).map(|(x, e)| x * e).collect();
        let k4 = self.nl(&end);
        for i in 0..c.len() {
            let acc = ci[i] + (k1[i] + (k2[i] + k3[i]) * 2.0) * (h / 6.0);
            c[i] = acc * e[i] + k4[i] * (h / 6.0);
        }
    }
}

fn finite(c: &[Complex]) -> bool {
    c.iter().all(|x| x.re.is_finite() && x.im.is_finite())
}

/// Integrate from `u0` to `cfg.horizon`, keeping the states and invariants at
/// every monitor time (and at the end).
pub fn evolve(cfg: &FlowConfig, u0: &SpectralField) -> Result<Trajectory> {
    run(cfg, u0, true)
}

/// Like [`evolve`] but keeps only the initial and final states and records.
pub fn evolve_final(cfg: &FlowConfig, u0: &SpectralField) -> Result<SpectralField> {
    Ok(run(cfg, u0, false)?.states.pop().expect("final state"))
}

fn run(cfg: &FlowConfig, u0: &SpectralField, monitor: bool) -> Result<Trajectory> {
    let b = u0.basis();
    cfg.validate(b)?;
    let (steps, h) = cfg.steps();
    let stepper = Stepper::new(cfg, b, h);
    let every = cfg.monitor_every.max(1);
    let mut c = u0.coeffs().to_vec();
    let mut traj = Trajectory { states: vec![u0.clone()], records: Vec::new() };
    if monitor {
        traj.records.push(record(cfg, u0, 0.0)?);
    }
    let real = b.model() == Model::BenjaminOno;
    for s in 1..=steps {
        stepper.step(&mut c);
        if !finite(&c) {
            return Err(Error::BlowUp { last_good_time: (s - 1) as f64 * h });
        }
        if monitor && (s % every == 0 || s == steps) {
            let mut u = SpectralField::from_raw(b, c.clone());
            if real {
                u.make_real();
            }
            traj.records.push(record(cfg, &u, s as f64 * h)?);
            traj.states.push(u);
        }
    }
    if !monitor {
        let mut u = SpectralField::from_raw(b, c);
        if real {
            u.make_real();
        }
        traj.states.push(u);
    }
    Ok(traj)
}
