//! Renormalized nonlinearities and energies.
//!
//! Every projected product is computed on a grid large enough that it equals
//! the exact coefficient convolution of the band-limited inputs.

use alloc::vec;
use alloc::vec::Vec;

use crate::basis::{circle_analyze, circle_synth, cutoff_profile, project, Basis, SpectralField};
use crate::error::{Error, Result};
use crate::model::{ModeIndex, Model};
use crate::weyl;
use crate::Complex;

const ZERO: Complex = Complex { re: 0.0, im: 0.0 };
const I: Complex = Complex { re: 0.0, im: 1.0 };

/// `alpha_N = E||Pi_N phi||^2 = sum_{rank <= N} sigma^2`.
pub fn alpha(model: Model, n: usize) -> f64 {
    match model {
        Model::Torus => weyl::alpha_sequence(n)[n],
        Model::ZonalNls => (1..=n).map(|k| 1.0 / (k * k) as f64).sum(),
        _ => (-(n as i64)..=n as i64)
            .map(|k| {
                let s = model.sigma(ModeIndex::Circle(k));
                s * s
            })
            .sum(),
    }
}

/// `alpha_N` read off the variances of `basis`.
pub(crate) fn alpha_in(basis: &Basis, n: usize) -> f64 {
    basis
        .sigmas()
        .iter()
        .enumerate()
        .filter(|(i, _)| basis.rank(*i) <= n)
        .map(|(_, s)| s * s)
        .sum()
}

/// `g_N(u) = ||Pi_N u||^2 - alpha_N`.
pub fn mass_recentered(u: &SpectralField, n: usize) -> Result<f64> {
    Ok(project(u, n)?.norm_sq() - alpha_in(u.basis(), n))
}

/// Circle coefficients with `|k| <= n`, as a band-`n` vector.
pub(crate) fn low(c: &[Complex], cutoff: usize, n: usize) -> Vec<Complex> {
    c[cutoff - n..=cutoff + n].to_vec()
}

/// Place a band-`band` vector into a basis layout (modes beyond the basis are dropped).
pub(crate) fn place(basis: &Basis, v: &[Complex], band: usize) -> Vec<Complex> {
    let l = basis.cutoff();
    let mut out = vec![ZERO; basis.len()];
    let b = band.min(l);
    out[l - b..=l + b].copy_from_slice(&v[band - b..=band + b]);
    out
}

/// `int |u_N|^p` on the circle for even `p`, exact.
pub(crate) fn circle_power_integral(basis: &Basis, c: &[Complex], n: usize, p: u32) -> f64 {
    let fft = basis.circle_fft(p as usize * n + 1);
    let vals = circle_synth(fft, &low(c, basis.cutoff(), n), n);
    vals.iter().map(|v| libm::pow(v.norm_sqr(), p as f64 / 2.0)).sum::<f64>() / fft.len() as f64
}

/// `Pi_N(|u_N|^2 u_N)` on the circle as a band-`n` vector.
pub(crate) fn circle_cubic(basis: &Basis, c: &[Complex], n: usize) -> Vec<Complex> {
    let fft = basis.circle_fft(4 * n + 1);
    let mut vals = circle_synth(fft, &low(c, basis.cutoff(), n), n);
    for v in vals.iter_mut() {
        *v *= v.norm_sqr();
    }
    circle_analyze(fft, vals, n)
}

/// `Pi^0((Pi_N u)^2)` for Benjamin-Ono, supported on `|k| <= 2N`.
/// The result lives in `u`'s basis, so the basis cutoff must be at least `2N`.
pub fn bo_square(u: &SpectralField, n: usize) -> Result<SpectralField> {
    let b = u.basis();
    b.require(Model::BenjaminOno, "the Benjamin-Ono square")?;
    if 2 * n > b.cutoff() {
        return Err(Error::invalid(alloc::format!(
            "the square of Pi_{n} u needs a basis cutoff of at least {}, have {}",
            2 * n,
            b.cutoff()
        )));
    }
    let mut sq = bo_square_band(b, u.coeffs(), n);
    sq[2 * n] = ZERO;
    let mut f = SpectralField::from_raw(b, place(b, &sq, 2 * n));
    f.make_real();
    Ok(f)
}

/// `(u_N)^2` as a band-`2n` vector (mean included).
pub(crate) fn bo_square_band(basis: &Basis, c: &[Complex], n: usize) -> Vec<Complex> {
    let fft = basis.circle_fft(4 * n + 1);
    let mut vals = circle_synth(fft, &low(c, basis.cutoff(), n), n);
    for v in vals.iter_mut() {
        *v = Complex::new(v.re * v.re, 0.0);
    }
    circle_analyze(fft, vals, 2 * n)
}

/// Half-wave Wick cubic `G_N(u) = Pi_N(|u_N|^2 u_N) - 2 ||u_N||^2 u_N`.
pub fn wick_cubic_hw(u: &SpectralField, n: usize) -> Result<SpectralField> {
    let b = u.basis();
    b.require(Model::HalfWave, "the half-wave Wick cubic")?;
    b.check_cutoff(n)?;
    Ok(SpectralField::from_raw(b, wick_hw_coeffs(b, u.coeffs(), n)))
}

pub(crate) fn wick_hw_coeffs(b: &Basis, c: &[Complex], n: usize) -> Vec<Complex> {
    let l = b.cutoff();
    let mass: f64 = c[l - n..=l + n].iter().map(|x| x.norm_sqr()).sum();
    let mut g = circle_cubic(b, c, n);
    for (gi, ci) in g.iter_mut().zip(&c[l - n..=l + n]) {
        *gi -= ci * (2.0 * mass);
    }
    place(b, &g, n)
}

/// `Pi_N(|u_N|^2 u_N)` on the torus, in basis layout.
pub(crate) fn torus_cubic(b: &Basis, c: &[Complex], n: usize) -> Vec<Complex> {
    let mut low = c.to_vec();
    low[n + 1..].iter_mut().for_each(|x| *x = ZERO);
    let plan = b.product_plan();
    let mut vals = plan.synth(b, &low);
    for v in vals.iter_mut() {
        *v *= v.norm_sqr();
    }
    let mut out = plan.analyze(b, vals);
    out[n + 1..].iter_mut().for_each(|x| *x = ZERO);
    out
}

/// `int |u_N|^4` on the torus, exact.
pub(crate) fn torus_quartic_integral(b: &Basis, c: &[Complex], n: usize) -> f64 {
    let mut low = c.to_vec();
    low[n + 1..].iter_mut().for_each(|x| *x = ZERO);
    let plan = b.product_plan();
    let vals: Vec<f64> = plan.synth(b, &low).iter().map(|v| v.norm_sqr() * v.norm_sqr()).collect();
    plan.integrate(&vals)
}

/// Torus Wick cubic `F_N(u_N) = Pi_N(|u_N|^2 u_N) - 2 alpha_N u_N`.
pub fn wick_cubic_torus(u: &SpectralField, n: usize) -> Result<SpectralField> {
    let b = u.basis();
    b.require(Model::Torus, "the torus Wick cubic")?;
    b.check_cutoff(n)?;
    let a = alpha_in(b, n);
    let mut out = torus_cubic(b, u.coeffs(), n);
    for (o, c) in out.iter_mut().zip(u.coeffs()).take(n + 1) {
        *o -= c * (2.0 * a);
    }
    Ok(SpectralField::from_raw(b, out))
}

/// Half-wave quartic `f_N(u) = -||u_N||_4^4 + 2 ||u_N||_2^4`.
pub fn quartic_hw(u: &SpectralField, n: usize) -> Result<f64> {
    let b = u.basis();
    b.require(Model::HalfWave, "the half-wave quartic")?;
    b.check_cutoff(n)?;
    let mass = project(u, n)?.norm_sq();
    Ok(-circle_power_integral(b, u.coeffs(), n, 4) + 2.0 * mass * mass)
}

/// Torus quartic `f_N(u) = (1/2) int |u_N|^4 - 2 alpha_N int |u_N|^2 + alpha_N^2`.
pub fn quartic_torus(u: &SpectralField, n: usize) -> Result<f64> {
    let b = u.basis();
    b.require(Model::Torus, "the torus quartic")?;
    b.check_cutoff(n)?;
    let a = alpha_in(b, n);
    let mass = project(u, n)?.norm_sq();
    Ok(0.5 * torus_quartic_integral(b, u.coeffs(), n) - 2.0 * a * mass + a * a)
}

fn require_dnls(u: &SpectralField, n: usize, what: &str) -> Result<()> {
    u.basis().require(Model::Dnls, what)?;
    u.basis().check_cutoff(n)
}

/// Momentum part `J(u_N) = Im int u_N d_x conj(u_N) = -sum k |c_k|^2`.
pub fn dnls_current(u: &SpectralField, n: usize) -> Result<f64> {
    require_dnls(u, n, "the DNLS momentum")?;
    Ok(current(u.basis(), u.coeffs(), n))
}

pub(crate) fn current(b: &Basis, c: &[Complex], n: usize) -> f64 {
    let l = b.cutoff();
    (-(n as i64)..=n as i64)
        .map(|k| -(k as f64) * c[(k + l as i64) as usize].norm_sqr())
        .sum()
}

/// Gauge energy `T_{u_N} = 2 J(u_N) + (3/2) int |u_N|^4`.
pub fn dnls_momentum(u: &SpectralField, n: usize) -> Result<f64> {
    require_dnls(u, n, "the DNLS momentum")?;
    Ok(momentum(u.basis(), u.coeffs(), n))
}

pub(crate) fn momentum(b: &Basis, c: &[Complex], n: usize) -> f64 {
    2.0 * current(b, c, n) + 1.5 * circle_power_integral(b, c, n, 4)
}

/// DNLS quartic `f_N(u) = Im int conj(u_N)^2 d_x(u_N^2) = sum m |(u_N^2)_m|^2`.
pub fn dnls_quartic(u: &SpectralField, n: usize) -> Result<f64> {
    require_dnls(u, n, "the DNLS quartic")?;
    Ok(dnls_quartic_coeffs(u.basis(), u.coeffs(), n))
}

pub(crate) fn dnls_quartic_coeffs(b: &Basis, c: &[Complex], n: usize) -> f64 {
    let fft = b.circle_fft(4 * n + 1);
    let mut vals = circle_synth(fft, &low(c, b.cutoff(), n), n);
    for v in vals.iter_mut() {
        *v = *v * *v;
    }
    let w = circle_analyze(fft, vals, 2 * n);
    w.iter().enumerate().map(|(i, x)| (i as f64 - 2.0 * n as f64) * x.norm_sqr()).sum()
}

/// `int |u_N|^6` on the circle, exact.
pub fn dnls_sextic(u: &SpectralField, n: usize) -> Result<f64> {
    require_dnls(u, n, "the DNLS sextic")?;
    Ok(circle_power_integral(u.basis(), u.coeffs(), n, 6))
}

/// DNLS remainder `R_N(u_N) = R^1_N + R^2_N`.
pub fn dnls_remainder(u: &SpectralField, n: usize) -> Result<SpectralField> {
    require_dnls(u, n, "the DNLS remainder")?;
    let b = u.basis();
    let r = remainder_band(b, u.coeffs(), n);
    Ok(SpectralField::from_raw(b, place(b, &r, n)))
}

/// Band-`n` remainder, computed with band-`7n` intermediates on a grid of
/// at least `14 n + 2` points.
pub(crate) fn remainder_band(b: &Basis, c: &[Complex], n: usize) -> Vec<Complex> {
    if n == 0 {
        return vec![ZERO];
    }
    let w = 7 * n;
    let fft = b.circle_fft(2 * w + 2);
    let to_v = |coef: &[Complex]| circle_synth(fft, coef, w);
    let to_c = |vals: Vec<Complex>| circle_analyze(fft, vals, w);
    let mut lowc = vec![ZERO; 2 * w + 1];
    lowc[w - n..=w + n].copy_from_slice(&c[b.cutoff() - n..=b.cutoff() + n]);
    let u = to_v(&lowc);
    let ub: Vec<Complex> = u.iter().map(|x| x.conj()).collect();

    let apply = |vals: Vec<Complex>, sym: &dyn Fn(i64) -> Complex| -> Vec<Complex> {
        let mut cf = to_c(vals);
        for (i, x) in cf.iter_mut().enumerate() {
            *x *= sym(i as i64 - w as i64);
        }
        to_v(&cf)
    };
    let deriv = |k: i64| Complex::new(0.0, k as f64);
    let high = |k: i64| if k.unsigned_abs() as usize > n { Complex::new(1.0, 0.0) } else { ZERO };
    let inv_deriv = |k: i64| if k == 0 { ZERO } else { Complex::new(0.0, -1.0 / k as f64) };
    let mul = |a: &[Complex], b: &[Complex]| -> Vec<Complex> { a.iter().zip(b).map(|(x, y)| x * y).collect() };

    let dub2 = apply(mul(&ub, &ub), &deriv);
    let du2 = apply(mul(&u, &u), &deriv);
    let a = apply(mul(&u, &dub2), &high);
    let bb = apply(mul(&ub, &du2), &high);
    let mod4: Vec<Complex> = u.iter().map(|x| Complex::new(x.norm_sqr() * x.norm_sqr(), 0.0)).collect();
    let cc = apply(mul(&mod4, &ub), &high);
    let ee = apply(mul(&mod4, &u), &high);

    let inner1: Vec<Complex> = (0..u.len()).map(|j| u[j] * a[j] + ub[j] * bb[j]).collect();
    let inner2: Vec<Complex> = (0..u.len()).map(|j| u[j] * cc[j] - ub[j] * ee[j]).collect();
    let d1 = apply(inner1, &inv_deriv);
    let d2 = apply(inner2, &inv_deriv);
    let tot: Vec<Complex> = (0..u.len()).map(|j| u[j] * (d1[j] * 1.5 + d2[j] * (I * 1.5))).collect();
    let full = to_c(tot);
    full[w - n..=w + n].to_vec()
}

/// Zonal power nonlinearity `S_N(|S_N u|^{r-1} S_N u)`.
pub fn zonal_power(u: &SpectralField, n: usize, r: f64) -> Result<SpectralField> {
    let b = u.basis();
    b.require(Model::ZonalNls, "the zonal power nonlinearity")?;
    if n == 0 {
        return Err(Error::invalid("the zonal nonlinearity needs N >= 1"));
    }
    if !(1.0..5.0).contains(&r) {
        return Err(Error::invalid(alloc::format!("power r = {r} is outside [1, 5)")));
    }
    Ok(SpectralField::from_raw(b, zonal_power_coeffs(b, u.coeffs(), n, r)))
}

pub(crate) fn zonal_multipliers(b: &Basis, n: usize) -> Vec<f64> {
    (1..=b.len()).map(|k| cutoff_profile(k as f64 / n as f64)).collect()
}

pub(crate) fn zonal_power_coeffs(b: &Basis, c: &[Complex], n: usize, r: f64) -> Vec<Complex> {
    let chi = zonal_multipliers(b, n);
    let s: Vec<Complex> = c.iter().zip(&chi).map(|(x, m)| x * *m).collect();
    let plan = b.product_plan();
    let mut vals = plan.synth(b, &s);
    for v in vals.iter_mut() {
        *v *= libm::pow(v.norm(), r - 1.0);
    }
    let mut out = plan.analyze(b, vals);
    for (o, m) in out.iter_mut().zip(&chi) {
        *o *= *m;
    }
    out
}

/// `int |S_N u|^{p}` on the sphere (quadrature on the basis grid).
pub(crate) fn zonal_power_integral(b: &Basis, c: &[Complex], n: usize, p: f64) -> f64 {
    let chi = zonal_multipliers(b, n);
    let s: Vec<Complex> = c.iter().zip(&chi).map(|(x, m)| x * *m).collect();
    let plan = b.product_plan();
    let vals: Vec<f64> = plan.synth(b, &s).iter().map(|v| libm::pow(v.norm(), p)).collect();
    plan.integrate(&vals)
}
