//! Eigenvalues of the flat unit torus and the growth of `alpha_N`.
//!
//! Eigenfunctions are `e^{2 pi i k.x}` with `lambda_k^2 = 4 pi^2 |k|^2`. The
//! ordering used everywhere in the crate is by `|k|^2`, ties broken
//! lexicographically on `(k_x, k_y)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

const FOUR_PI_SQ: f64 = 4.0 * PI * PI;

/// One eigenvalue with its lattice point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigen {
    pub k: (i32, i32),
    pub lambda_sq: f64,
}

/// Sorted eigenvalues up to a spectral bound.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenvalueTable {
    pub entries: Vec<Eigen>,
}

impl EigenvalueTable {
    /// Number of entries with `lambda^2 <= lambda_bound^2`.
    pub fn count_below(&self, lambda_bound: f64) -> usize {
        let r2 = radius_sq_floor(lambda_bound);
        self.entries.partition_point(|e| norm_sq(e.k) <= r2)
    }
}

fn norm_sq((a, b): (i32, i32)) -> i64 {
    a as i64 * a as i64 + b as i64 * b as i64
}

fn eigen(k: (i32, i32)) -> Eigen {
    Eigen { k, lambda_sq: FOUR_PI_SQ * norm_sq(k) as f64 }
}

/// Largest integer `m` with `4 pi^2 m <= lambda^2`; -1 for negative input.
fn radius_sq_floor(lambda: f64) -> i64 {
    if lambda < 0.0 {
        return -1;
    }
    let mut m = libm::floor(lambda * lambda / FOUR_PI_SQ) as i64;
    while m >= 0 && FOUR_PI_SQ * m as f64 > lambda * lambda {
        m -= 1;
    }
    while FOUR_PI_SQ * (m + 1) as f64 <= lambda * lambda {
        m += 1;
    }
    m
}

fn isqrt(n: i64) -> i64 {
    if n < 0 {
        return -1;
    }
    let mut r = libm::sqrt(n as f64) as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn lattice_disc(r2: i64) -> Vec<(i32, i32)> {
    let mut pts = Vec::new();
    let r = isqrt(r2);
    for a in -r..=r {
        let h = isqrt(r2 - a * a);
        for b in -h..=h {
            pts.push((a as i32, b as i32));
        }
    }
    pts.sort_by_key(|&k| (norm_sq(k), k));
    pts
}

/// Number of lattice points with `|k|^2 <= r2`.
fn disc_count(r2: i64) -> usize {
    if r2 < 0 {
        return 0;
    }
    let r = isqrt(r2);
    (-r..=r).map(|a| (2 * isqrt(r2 - a * a) + 1) as usize).sum()
}

/// All eigenvalues with `lambda <= lambda_max`, in the crate ordering.
pub fn enumerate(lambda_max: f64) -> EigenvalueTable {
    let r2 = radius_sq_floor(lambda_max);
    EigenvalueTable { entries: lattice_disc(r2).into_iter().map(eigen).collect() }
}

/// Weyl counting function `#{k : 4 pi^2 |k|^2 <= lambda^2}`.
pub fn count(lambda: f64) -> usize {
    disc_count(radius_sq_floor(lambda))
}

/// The first `count` lattice points of the crate ordering.
pub fn leading_lattice(count: usize) -> Vec<(i32, i32)> {
    if count == 0 {
        return Vec::new();
    }
    let mut r2 = libm::ceil(count as f64 / PI) as i64;
    while disc_count(r2) < count {
        r2 += 1 + r2 / 8;
    }
    while r2 > 0 && disc_count(r2 - 1) >= count {
        r2 -= 1;
    }
    let mut pts = lattice_disc(r2);
    pts.truncate(count);
    pts
}

/// `alpha_N = sum_{i <= N} 1 / (1 + lambda_i^2)` for `N = 0..=nmax`.
pub fn alpha_sequence(nmax: usize) -> Vec<f64> {
    let mut acc = 0.0;
    leading_lattice(nmax + 1)
        .into_iter()
        .map(|k| {
            acc += 1.0 / (1.0 + eigen(k).lambda_sq);
            acc
        })
        .collect()
}

/// Rows `(N, lambda_N^2, alpha_N)` for `N = 0..=nmax`.
pub fn alpha_table(nmax: usize) -> Vec<(usize, f64, f64)> {
    let alphas = alpha_sequence(nmax);
    leading_lattice(nmax + 1)
        .into_iter()
        .zip(alphas)
        .enumerate()
        .map(|(n, (k, a))| (n, eigen(k).lambda_sq, a))
        .collect()
}

/// Least-squares fit of `alpha_N` against `ln N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaFit {
    pub slope: f64,
    pub intercept: f64,
    pub nmin: usize,
    pub nmax: usize,
}

/// Fit `alpha_N = slope ln N + c` over every `N` in `[nmax/10, nmax]`.
pub fn alpha_asymptotics(nmax: usize) -> Result<AlphaFit> {
    if nmax < 1000 {
        return Err(Error::invalid("alpha asymptotics needs nmax >= 1000"));
    }
    let alphas = alpha_sequence(nmax);
    let nmin = nmax / 10;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    let cnt = (nmax - nmin + 1) as f64;
    for (n, a) in alphas.iter().enumerate().skip(nmin) {
        let x = libm::log(n as f64);
        sx += x;
        sy += a;
        sxx += x * x;
        sxy += x * a;
    }
    let slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    Ok(AlphaFit { slope, intercept: (sy - slope * sx) / cnt, nmin, nmax })
}

/// Largest `|sum_{window} (1 + lambda^2)^{-1} (|phi_k(x)|^2 - 1)|` over a
/// `grid x grid` set of nodes, for the eigenvalue window `[mu, mu + delta mu^{1/2})`.
/// Plane waves have unit modulus, so this is zero up to rounding.
pub fn window_defect(mu: f64, delta: f64, grid: usize) -> f64 {
    let hi = mu + delta * libm::sqrt(mu.max(0.0));
    let window: Vec<Eigen> = enumerate(libm::sqrt(hi.max(0.0)))
        .entries
        .into_iter()
        .filter(|e| e.lambda_sq >= mu && e.lambda_sq < hi)
        .collect();
    let mut worst: f64 = 0.0;
    for j1 in 0..grid {
        for j2 in 0..grid {
            let (x, y) = (j1 as f64 / grid as f64, j2 as f64 / grid as f64);
            let s: f64 = window
                .iter()
                .map(|e| {
                    let ph = 2.0 * PI * (e.k.0 as f64 * x + e.k.1 as f64 * y);
                    let (c, s) = (libm::cos(ph), libm::sin(ph));
                    (c * c + s * s - 1.0) / (1.0 + e.lambda_sq)
                })
                .sum();
            worst = worst.max(s.abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tables() {
        let t = enumerate(0.0);
        assert_eq!(t.entries.len(), 1);
        assert_eq!(t.entries[0].k, (0, 0));
        let t = enumerate(2.0 * PI + 1e-9);
        assert_eq!(t.entries.len(), 5);
        let ks: Vec<_> = t.entries.iter().map(|e| e.k).collect();
        assert_eq!(ks, [(0, 0), (-1, 0), (0, -1), (0, 1), (1, 0)]);
        assert_eq!(t.count_below(2.0 * PI - 1e-9), 1);
    }

    #[test]
    fn leading_lattice_matches_enumeration() {
        let full = enumerate(2.0 * PI * 6.0);
        for n in [1usize, 5, 9, 13, 21, 50, 100] {
            let pts = leading_lattice(n);
            assert_eq!(pts.len(), n);
            for (p, e) in pts.iter().zip(&full.entries) {
                assert_eq!(*p, e.k);
            }
        }
    }

    #[test]
    fn count_matches_brute_force() {
        for lam in [0.0, 1.0, 6.3, 20.0, 57.3, 100.0] {
            let r = lam / (2.0 * PI);
            let mut brute = 0;
            for a in -20i64..=20 {
                for b in -20i64..=20 {
                    if FOUR_PI_SQ * ((a * a + b * b) as f64) <= lam * lam {
                        brute += 1;
                    }
                }
            }
            assert!(r < 20.0);
            assert_eq!(count(lam), brute, "lambda = {lam}");
        }
    }

    #[test]
    fn alpha_is_monotone() {
        let a = alpha_sequence(200);
        assert_eq!(a[0], 1.0);
        assert!(a.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn plane_waves_have_no_window_defect() {
        for mu in [0.0, 40.0, 400.0, 4000.0] {
            assert!(window_defect(mu, 1.0, 16) < 1e-12);
        }
    }

    #[test]
    fn gauss_circle_density() {
        let lam = 200.0 * PI;
        let ratio = count(lam) as f64 / (lam * lam);
        assert!((ratio * 4.0 * PI - 1.0).abs() < 0.02);
    }
}
