//! Samples of the Gaussian free measures and norms of fields.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::basis::{to_grid, Basis, SpectralField};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::Complex;

/// Offset separating auxiliary uniforms from Gaussian slots.
const AUX_SLOT: u64 = 1 << 40;

const EPS: f64 = 1.0 / (1u64 << 53) as f64;

/// Counter-based randomness for one sample: ChaCha8 keyed by the master
/// seed, with the sample index as stream id and the mode slot as position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub index: u64,
}

impl RngStream {
    pub fn new(seed: u64, index: u64) -> Self {
        RngStream { seed, index }
    }

    pub fn at(self, index: u64) -> Self {
        RngStream { index, ..self }
    }

    fn rng_at(&self, slot: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.index);
        rng.set_word_pos(4 * slot as u128);
        rng
    }

    /// The standard complex Gaussian (`E|g|^2 = 1`) stored at `slot`.
    pub fn gaussian(&self, slot: u64) -> Complex {
        box_muller(&mut self.rng_at(slot))
    }

    /// Gaussians at slots `0..count`, generated in one pass.
    pub fn gaussians(&self, count: usize) -> Vec<Complex> {
        let mut rng = self.rng_at(0);
        (0..count).map(|_| box_muller(&mut rng)).collect()
    }

    /// Auxiliary uniform on `[0, 1)` (disjoint from every Gaussian slot).
    pub fn uniform(&self, slot: u64) -> f64 {
        unit_open_low(self.rng_at(AUX_SLOT + slot).next_u64()) - EPS
    }
}

/// Uniform on `(0, 1]`.
fn unit_open_low(x: u64) -> f64 {
    ((x >> 11) + 1) as f64 * EPS
}

fn box_muller(rng: &mut ChaCha8Rng) -> Complex {
    let u1 = unit_open_low(rng.next_u64());
    let u2 = unit_open_low(rng.next_u64());
    let r = libm::sqrt(-libm::log(u1));
    let a = 2.0 * PI * u2;
    Complex::new(r * libm::cos(a), r * libm::sin(a))
}

/// Gaussian slot of coefficient `i` of `basis`. Circle slots zigzag
/// (`0, 1, -1, 2, -2, ...`) so nested cutoffs share their low modes.
pub fn slot_of(basis: &Basis, i: usize) -> u64 {
    match basis.model() {
        Model::ZonalNls | Model::Torus => i as u64,
        _ => {
            let n = i as i64 - basis.cutoff() as i64;
            match n {
                0 => 0,
                n if n > 0 => 2 * n as u64 - 1,
                n => 2 * n.unsigned_abs(),
            }
        }
    }
}

/// Draw `phi_N = sum sigma_n g_n e_n` from the free measure of `basis`.
///
/// Benjamin-Ono draws `g_n` for `n >= 1` at slot `n - 1` and sets
/// `c_{-n} = conj(c_n)`, `c_0 = 0`.
pub fn sample_mu(basis: &Basis, stream: &RngStream) -> SpectralField {
    let sig = basis.sigmas();
    let n = basis.len();
    let mut coeffs = alloc::vec![Complex::new(0.0, 0.0); n];
    if basis.model() == Model::BenjaminOno {
        let n0 = basis.cutoff();
        let g = stream.gaussians(n0);
        for k in 1..=n0 {
            let c = g[k - 1] * sig[n0 + k];
            coeffs[n0 + k] = c;
            coeffs[n0 - k] = c.conj();
        }
    } else {
        let g = stream.gaussians(n);
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c = g[slot_of(basis, i) as usize] * sig[i];
        }
    }
    SpectralField::from_raw(basis, coeffs)
}

/// `||u||_{H^s} = (sum <mode>^{2s} |c|^2)^{1/2}`.
pub fn sobolev_norm(u: &SpectralField, s: f64) -> f64 {
    let br = u.basis().brackets();
    libm::sqrt(
        u.coeffs()
            .iter()
            .zip(&br)
            .map(|(c, b)| libm::pow(*b, 2.0 * s) * c.norm_sqr())
            .sum(),
    )
}

/// `(int |u|^q)^{1/q}` by quadrature on the basis grid (normalized measure).
pub fn lq_norm(u: &SpectralField, q: f64) -> Result<f64> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::invalid("lq norm needs a finite exponent q >= 1"));
    }
    let vals: Vec<f64> = to_grid(u).iter().map(|v| libm::pow(v.norm(), q)).collect();
    Ok(libm::pow(u.basis().integrate(&vals), 1.0 / q))
}

/// Signed `int u^3` of a real Benjamin-Ono field.
pub fn signed_cubic(u: &SpectralField) -> Result<f64> {
    u.basis().require(Model::BenjaminOno, "the signed cubic integral")?;
    let vals: Vec<f64> = to_grid(u).iter().map(|v| v.re * v.re * v.re).collect();
    Ok(u.basis().integrate(&vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModeIndex;

    #[test]
    fn streams_are_reproducible_and_keyed_by_slot() {
        let s = RngStream::new(42, 7);
        let g = s.gaussians(10);
        assert_eq!(g, s.gaussians(10));
        for (k, v) in g.iter().enumerate() {
            assert_eq!(*v, s.gaussian(k as u64));
        }
        assert_ne!(g[0], s.at(8).gaussian(0));
        assert_ne!(g[0], RngStream::new(43, 7).gaussian(0));
        let u = s.uniform(3);
        assert!((0.0..1.0).contains(&u));
    }

    #[test]
    fn nested_cutoffs_share_low_modes() {
        let s = RngStream::new(1, 2);
        for model in Model::ALL {
            let lo = sample_mu(&Basis::new(model, 4).unwrap(), &s);
            let hi = sample_mu(&Basis::new(model, 9).unwrap(), &s);
            for m in lo.basis().modes() {
                assert_eq!(lo.coeff(m), hi.coeff(m), "{model} {m:?}");
            }
        }
    }

    fn mean_mass(model: Model, n: usize, draws: u64) -> (f64, f64) {
        let b = Basis::new(model, n).unwrap();
        let xs: Vec<f64> = (0..draws).map(|i| sample_mu(&b, &RngStream::new(9, i)).norm_sq()).collect();
        let m = xs.iter().sum::<f64>() / draws as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (draws - 1) as f64;
        (m, (v / draws as f64).sqrt())
    }

    #[test]
    fn bo_mass_mean() {
        let (m, se) = mean_mass(Model::BenjaminOno, 3, 100_000);
        assert!((m - 11.0 / 6.0).abs() < 3.0 * se, "{m} ± {se}");
    }

    #[test]
    fn half_wave_mass_mean() {
        let (m, se) = mean_mass(Model::HalfWave, 2, 100_000);
        assert!((m - 8.0 / 3.0).abs() < 3.0 * se, "{m} ± {se}");
    }

    #[test]
    fn bo_samples_are_real_and_mean_free() {
        let b = Basis::new(Model::BenjaminOno, 12).unwrap();
        let u = sample_mu(&b, &RngStream::new(5, 5));
        assert_eq!(u.coeff(ModeIndex::Circle(0)), Complex::new(0.0, 0.0));
        for v in to_grid(&u) {
            assert!(v.im.abs() < 1e-14);
        }
    }

    #[test]
    fn norm_examples() {
        let one = Complex::new(1.0, 0.0);
        let b = Basis::new(Model::HalfWave, 3).unwrap();
        let e1 = SpectralField::from_modes(&b, &[(ModeIndex::Circle(1), one)]).unwrap();
        assert!((sobolev_norm(&e1, 2.0) - 2.0).abs() < 1e-14);
        assert!((lq_norm(&e1, 4.0).unwrap() - 1.0).abs() < 1e-14);
        let u = SpectralField::from_modes(&b, &[(ModeIndex::Circle(0), one), (ModeIndex::Circle(1), one)])
            .unwrap();
        assert!((lq_norm(&u, 4.0).unwrap().powi(4) - 6.0).abs() < 1e-12);
        assert!((sobolev_norm(&u, 0.0) - lq_norm(&u, 2.0).unwrap()).abs() < 1e-13);
        let z = Basis::new(Model::ZonalNls, 4).unwrap();
        let p3 = SpectralField::from_modes(&z, &[(ModeIndex::Zonal(3), one)]).unwrap();
        assert!((sobolev_norm(&p3, 1.0) - 3.0).abs() < 1e-14);
        let bo = Basis::new(Model::BenjaminOno, 3).unwrap();
        let half = Complex::new(0.5, 0.0);
        let cos = SpectralField::from_modes(&bo, &[(ModeIndex::Circle(1), half), (ModeIndex::Circle(-1), half)])
            .unwrap();
        assert!(signed_cubic(&cos).unwrap().abs() < 1e-15);
        assert!(signed_cubic(&e1).is_err());
    }

    #[test]
    fn khinchin_moment_growth() {
        // For fixed x, phi_N(x) is complex Gaussian; its L^p moment is
        // Gamma(p/2 + 1)^{1/p} * s, below 3 sqrt(p) s.
        let b = Basis::new(Model::HalfWave, 8).unwrap();
        let s2: f64 = b.sigmas().iter().map(|s| s * s).sum();
        let draws = 20_000u64;
        let vals: Vec<f64> = (0..draws)
            .map(|i| to_grid(&sample_mu(&b, &RngStream::new(3, i)))[5].norm())
            .collect();
        for p in [2.0f64, 4.0, 6.0, 8.0] {
            let m = (vals.iter().map(|v| v.powf(p)).sum::<f64>() / draws as f64).powf(1.0 / p);
            assert!(m <= 3.0 * p.sqrt() * s2.sqrt(), "p={p} m={m}");
        }
    }

    #[test]
    fn critical_sobolev_index() {
        // Var ||phi_N||_{H^{1/2}} grows with N; H^{0.45} stabilizes.
        let second_moment = |n: usize, s: f64| {
            let b = Basis::new(Model::ZonalNls, n).unwrap();
            let xs: Vec<f64> = (0..400u64).map(|i| sobolev_norm(&sample_mu(&b, &RngStream::new(11, i)), s)).collect();
            let m = xs.iter().sum::<f64>() / xs.len() as f64;
            let mean_sq = xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
            (m, mean_sq)
        };
        let crit: Vec<f64> = [16, 64, 256].iter().map(|&n| second_moment(n, 0.5).1).collect();
        assert!(crit[0] < crit[1] && crit[1] < crit[2]);
        let sub: Vec<f64> = [16, 64, 256].iter().map(|&n| second_moment(n, 0.45).1).collect();
        let growth_crit = crit[2] - crit[1];
        let growth_sub = sub[2] - sub[1];
        assert!(growth_sub < growth_crit);
    }
}
