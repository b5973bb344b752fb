//! Iterative radix-2 FFT over power-of-two lengths.
//!
//! All grids in this crate are powers of two, so a single in-place
//! Cooley-Tukey kernel with precomputed twiddles covers every transform.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::Complex;

/// Precomputed plan for transforms of one power-of-two length.
#[derive(Clone, Debug)]
pub struct Fft {
    len: usize,
    twiddles: Vec<Complex>,
}

impl Fft {
    /// Panics if `len` is not a power of two.
    pub fn new(len: usize) -> Self {
        assert!(len.is_power_of_two(), "fft length {len} is not a power of two");
        let twiddles = (0..len / 2)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / len as f64;
                Complex::new(libm::cos(angle), libm::sin(angle))
            })
            .collect();
        Self { len, twiddles }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `X_k = sum_j x_j exp(-2 pi i j k / n)`, unnormalized.
    pub fn forward(&self, data: &mut [Complex]) {
        self.transform(data, false);
    }

    /// `x_j = sum_k X_k exp(+2 pi i j k / n)`, unnormalized.
    pub fn inverse(&self, data: &mut [Complex]) {
        self.transform(data, true);
    }

    fn transform(&self, data: &mut [Complex], inverse: bool) {
        let n = self.len;
        assert_eq!(data.len(), n);
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                data.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let stride = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            size *= 2;
        }
    }
}

/// Smallest power of two that is at least `n` (and at least 1).
pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[Complex]) -> Vec<Complex> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex::new(0.0, 0.0), |acc, (j, v)| {
                    let a = -2.0 * PI * (j * k) as f64 / n as f64;
                    acc + v * Complex::new(libm::cos(a), libm::sin(a))
                })
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for &n in &[1usize, 2, 4, 8, 32, 64] {
            let x: Vec<Complex> = (0..n)
                .map(|j| Complex::new((j as f64 * 0.37).sin(), (j as f64 * 1.3).cos()))
                .collect();
            let mut y = x.clone();
            Fft::new(n).forward(&mut y);
            let expect = naive_dft(&x);
            for (a, b) in y.iter().zip(&expect) {
                assert!((a - b).norm() < 1e-12 * n as f64);
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let n = 128;
        let plan = Fft::new(n);
        let x: Vec<Complex> = (0..n).map(|j| Complex::new(j as f64, -(j as f64) / 3.0)).collect();
        let mut y = x.clone();
        plan.forward(&mut y);
        plan.inverse(&mut y);
        for (a, b) in y.iter().zip(&x) {
            assert!((a / n as f64 - b).norm() < 1e-10);
        }
    }
}
