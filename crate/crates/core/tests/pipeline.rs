//! Cross-module checks: densities against energies, flow against densities,
//! executors against each other.

use gibbsflow_core::flow::{evolve_final, hamiltonian, FlowConfig};
use gibbsflow_core::gibbs::{log_density, sample_rho, GibbsConfig, SamplingMode};
use gibbsflow_core::randfield::sample_mu;
use gibbsflow_core::stats::{cauchy_rate, exact_rate, RateFunctional};
use gibbsflow_core::{Basis, Executor, Model, ModeIndex, RngStream, Sequential, SpectralField};
use proptest::prelude::*;

/// Runs indices back to front, then restores index order.
struct Reversed;

impl Executor for Reversed {
    fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        let mut out: Vec<T> = (0..count).rev().map(f).collect();
        out.reverse();
        out
    }
}

/// Quadratic part of the energy, the one the free measure already carries.
fn kinetic(u: &SpectralField) -> f64 {
    let b = u.basis();
    if b.model() == Model::BenjaminOno {
        let s: f64 = b
            .modes()
            .zip(u.coeffs())
            .map(|(m, x)| match m {
                ModeIndex::Circle(j) => j.unsigned_abs() as f64 * x.norm_sqr(),
                _ => 0.0,
            })
            .sum();
        return -0.5 * s;
    }
    b.dispersion().iter().zip(u.coeffs()).map(|(w, x)| w * x.norm_sqr()).sum()
}

/// Finite log-density should equal minus the potential energy, up to the
/// model's temperature (BO weights are `e^{2H}`).
fn potential_matches(model: Model, n: usize, seed: u64, scale: f64) -> Option<f64> {
    let g = GibbsConfig::new(model, n).with_kappa(50.0);
    let b = g.basis().unwrap();
    let u = sample_mu(&b, &RngStream::new(seed, 0)).scaled(scale);
    let ld = log_density(&g, &u).unwrap();
    if !ld.is_finite() {
        return None;
    }
    let v = hamiltonian(model, &u, n).unwrap() - kinetic(&u);
    let want = if model == Model::BenjaminOno { 2.0 * v } else { -v };
    Some((ld - want).abs() / (1.0 + want.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gibbs_weight_is_the_potential_energy(seed in 0u64..10_000, scale in 0.2f64..1.5, n in 2usize..7) {
        for model in [Model::HalfWave, Model::BenjaminOno, Model::Torus, Model::ZonalNls] {
            if let Some(err) = potential_matches(model, n, seed, scale) {
                prop_assert!(err < 1e-10, "{model} N={n}: {err}");
            }
        }
    }

    #[test]
    fn flow_keeps_the_unnormalized_gibbs_weight(seed in 0u64..10_000, scale in 0.2f64..1.0) {
        // The density against Lebesgue measure, log-density minus kinetic
        // energy, is a function of conserved quantities.
        let n = 6;
        let g = GibbsConfig::new(Model::HalfWave, n).with_kappa(50.0);
        let b = g.basis().unwrap();
        let u = sample_mu(&b, &RngStream::new(seed, 1)).scaled(scale);
        let v = evolve_final(&FlowConfig::new(Model::HalfWave, n, 1e-3, 0.5), &u).unwrap();
        let before = log_density(&g, &u).unwrap() - kinetic(&u);
        let after = log_density(&g, &v).unwrap() - kinetic(&v);
        prop_assert!((before - after).abs() < 1e-9 * (1.0 + before.abs()), "{before} {after}");
    }
}

#[test]
fn executors_agree_bit_for_bit() {
    for model in [Model::HalfWave, Model::BenjaminOno, Model::Dnls, Model::Torus, Model::ZonalNls] {
        let g = GibbsConfig::new(model, 5);
        let a = sample_rho(&g, 40, 11, SamplingMode::Importance, &Sequential).unwrap();
        let b = sample_rho(&g, 40, 11, SamplingMode::Importance, &Reversed).unwrap();
        assert_eq!(a, b, "{model}");
    }
    let f = RateFunctional::HwQuartic;
    let a = cauchy_rate(f.model(), f, 8, &[2, 4], 0.0, 200, 5, &Sequential).unwrap();
    let b = cauchy_rate(f.model(), f, 8, &[2, 4], 0.0, 200, 5, &Reversed).unwrap();
    assert_eq!(a, b);
}

#[test]
fn rate_reports_carry_the_exact_oracle() {
    for f in RateFunctional::ALL {
        let sigma = if f.needs_sigma() { 0.25 } else { 0.0 };
        let r = cauchy_rate(f.model(), f, 4, &[1, 2], sigma, 50, 3, &Sequential).unwrap();
        for p in &r.points {
            let exact = exact_rate(f, 4, p.m, sigma).unwrap();
            assert_eq!(p.exact, Some(exact), "{f} M={}", p.m);
            assert!(exact > 0.0);
        }
    }
}

#[test]
fn single_mode_torus_data_stays_single_mode() {
    let b = Basis::new(Model::Torus, 6).unwrap();
    let u = SpectralField::from_modes(&b, &[(ModeIndex::Lattice(1, 0), gibbsflow_core::Complex::new(0.8, 0.1))]).unwrap();
    let v = evolve_final(&FlowConfig::new(Model::Torus, 6, 1e-3, 1.0), &u).unwrap();
    let other: f64 = b
        .modes()
        .zip(v.coeffs())
        .filter(|(m, _)| *m != ModeIndex::Lattice(1, 0))
        .map(|(_, x)| x.norm_sqr())
        .sum();
    assert!(other < 1e-24, "{other}");
    assert!((v.l2_norm() - u.l2_norm()).abs() < 1e-12);
}
