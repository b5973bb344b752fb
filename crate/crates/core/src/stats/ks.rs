//! Weighted two-sample Kolmogorov-Smirnov test with a paired permutation null.

use alloc::vec::Vec;
use core::cmp::Ordering;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoSample {
    /// `sup_x |F_0(x) - F_T(x)|` of the weighted empirical distributions.
    pub statistic: f64,
    /// `(1 + #{D_perm >= D}) / (1 + permutations)`.
    pub p_value: f64,
    pub permutations: usize,
}

struct Pooled {
    /// (pair index, from the T sample) in sorted order.
    order: Vec<(usize, bool)>,
    /// `ends[j]` is true when position `j` closes a run of equal values.
    ends: Vec<bool>,
}

fn pool(obs0: &[f64], obs_t: &[f64]) -> Pooled {
    let mut idx: Vec<(f64, usize, bool)> = obs0
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, i, false))
        .chain(obs_t.iter().enumerate().map(|(i, v)| (*v, i, true)))
        .collect();
    idx.sort_by(|a, b| match a.0.total_cmp(&b.0) {
        Ordering::Equal => (a.1, a.2).cmp(&(b.1, b.2)),
        o => o,
    });
    let ends = (0..idx.len()).map(|j| j + 1 == idx.len() || idx[j + 1].0 != idx[j].0).collect();
    Pooled { order: idx.into_iter().map(|(_, i, t)| (i, t)).collect(), ends }
}

fn distance(p: &Pooled, w: &[f64], total: f64, flip: &[bool]) -> f64 {
    let (mut c0, mut ct) = (0.0f64, 0.0f64);
    let mut best: f64 = 0.0;
    for (j, &(i, t)) in p.order.iter().enumerate() {
        if t ^ flip[i] {
            ct += w[i];
        } else {
            c0 += w[i];
        }
        if p.ends[j] {
            best = best.max((c0 - ct).abs());
        }
    }
    best / total
}

/// Compare `obs0` and `obs_t` (paired, sharing `weights`). The null swaps
/// each pair independently with probability 1/2.
pub fn weighted_two_sample(
    obs0: &[f64],
    obs_t: &[f64],
    weights: &[f64],
    permutations: usize,
    seed: u64,
) -> Result<TwoSample> {
    if obs0.len() != obs_t.len() || obs0.len() != weights.len() {
        return Err(Error::invalid("observations and weights must have equal lengths"));
    }
    if obs0.iter().chain(obs_t).any(|v| v.is_nan()) {
        return Err(Error::invalid("observations contain NaN"));
    }
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::invalid("weights must be finite and nonnegative"));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::invalid("all weights are zero"));
    }
    let pooled = pool(obs0, obs_t);
    let n = obs0.len();
    let mut flip = alloc::vec![false; n];
    let d = distance(&pooled, weights, total, &flip);
    let mut exceed = 0usize;
    for k in 0..permutations {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let mut bits = 0u64;
        for (i, f) in flip.iter_mut().enumerate() {
            if i % 64 == 0 {
                bits = rng.next_u64();
            }
            *f = (bits >> (i % 64)) & 1 == 1;
        }
        if distance(&pooled, weights, total, &flip) >= d - 1e-12 {
            exceed += 1;
        }
    }
    Ok(TwoSample {
        statistic: d,
        p_value: (1 + exceed) as f64 / (1 + permutations) as f64,
        permutations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randfield::RngStream;
    use proptest::prelude::*;

    fn normals(seed: u64, n: usize, shift: f64) -> Vec<f64> {
        (0..n).map(|i| RngStream::new(seed, i as u64).gaussian(0).re * 2f64.sqrt() + shift).collect()
    }

    #[test]
    fn identical_samples() {
        let x = normals(1, 200, 0.0);
        let w: Vec<f64> = (0..200).map(|i| 1.0 + (i % 7) as f64).collect();
        let r = weighted_two_sample(&x, &x, &w, 200, 3).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn disjoint_supports() {
        let a: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..50).map(|i| 100.0 + i as f64).collect();
        let r = weighted_two_sample(&a, &b, &[1.0; 50], 100, 1).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert!(r.p_value < 0.02);
    }

    #[test]
    fn detects_a_mean_shift() {
        let n = 10_000;
        let a = normals(5, n, 0.0);
        let b = normals(6, n, 0.5);
        let r = weighted_two_sample(&a, &b, &alloc::vec![1.0; n], 2000, 9).unwrap();
        assert!(r.p_value < 1e-3, "{r:?}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(weighted_two_sample(&[1.0], &[1.0, 2.0], &[1.0], 10, 0).is_err());
        assert!(weighted_two_sample(&[1.0], &[2.0], &[0.0], 10, 0).is_err());
        assert!(weighted_two_sample(&[1.0], &[2.0], &[-1.0], 10, 0).is_err());
    }

    #[test]
    fn null_p_values_are_uniform() {
        // Pairs drawn from the same law: p-values over many replicates
        // should spread evenly over ten bins.
        let reps = 400;
        let mut bins = [0usize; 10];
        for r in 0..reps {
            let a = normals(100 + r, 400, 0.0);
            let b = normals(10_000 + r, 400, 0.0);
            let p = weighted_two_sample(&a, &b, &[1.0; 400], 199, r).unwrap().p_value;
            bins[((p * 10.0) as usize).min(9)] += 1;
        }
        let e = reps as f64 / 10.0;
        let chi2: f64 = bins.iter().map(|&o| (o as f64 - e).powi(2) / e).sum();
        // 1% critical value of chi^2 with 9 degrees of freedom.
        assert!(chi2 < 21.67, "{bins:?} chi2={chi2}");
    }

    proptest! {
        #[test]
        fn invariant_under_monotone_maps(seed in 0u64..1000) {
            let a = normals(seed, 80, 0.0);
            let b = normals(seed + 1, 80, 0.2);
            let w: Vec<f64> = (0..80).map(|i| 0.5 + (i % 3) as f64).collect();
            let r1 = weighted_two_sample(&a, &b, &w, 50, 4).unwrap();
            let f = |v: &f64| v.exp() * 3.0 - 1.0;
            let a2: Vec<f64> = a.iter().map(f).collect();
            let b2: Vec<f64> = b.iter().map(f).collect();
            let r2 = weighted_two_sample(&a2, &b2, &w, 50, 4).unwrap();
            prop_assert_eq!(r1, r2);
        }
    }
}
