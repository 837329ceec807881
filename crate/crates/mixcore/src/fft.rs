//! Iterative radix-2 complex FFT for power-of-two lengths.
//!
//! Forward transform is unscaled, inverse is scaled by 1/n; this convention
//! is part of the binary dump contract and must not change. 2-D transforms
//! run the 1-D plan over rows, transpose, rows again, transpose back.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::complex::Complex;

pub struct FftPlan {
    n: usize,
    /// exp(-2πik/n) for k in 0..n/2
    twiddles: Vec<Complex>,
    /// bit-reversal permutation
    rev: Vec<u32>,
}

impl FftPlan {
    /// `n` must be a power of two (≥ 2).
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two() && n >= 2, "fft length must be a power of two >= 2");
        let mut twiddles = Vec::with_capacity(n / 2);
        for k in 0..n / 2 {
            twiddles.push(Complex::cis(-2.0 * PI * k as f64 / n as f64));
        }
        let bits = n.trailing_zeros();
        let mut rev = vec![0u32; n];
        for i in 0..n {
            rev[i] = (i as u32).reverse_bits() >> (32 - bits);
        }
        FftPlan { n, twiddles, rev }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    /// In-place forward DFT: X[k] = Σ_j x[j] e^{-2πi jk/n} (unscaled).
    pub fn forward(&self, data: &mut [Complex]) {
        debug_assert_eq!(data.len(), self.n);
        let n = self.n;
        for i in 0..n {
            let j = self.rev[i] as usize;
            if i < j {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let step = n / len;
            let mut base = 0;
            while base < n {
                let (lo, hi) = data[base..base + len].split_at_mut(half);
                for j in 0..half {
                    let w = self.twiddles[j * step];
                    let t = w * hi[j];
                    let u = lo[j];
                    lo[j] = u + t;
                    hi[j] = u - t;
                }
                base += len;
            }
            len <<= 1;
        }
    }

    /// In-place inverse DFT, scaled by 1/n.
    pub fn inverse(&self, data: &mut [Complex]) {
        for z in data.iter_mut() {
            *z = z.conj();
        }
        self.forward(data);
        let scale = 1.0 / self.n as f64;
        for z in data.iter_mut() {
            *z = z.conj().scale(scale);
        }
    }
}

/// Square transpose, blocked for cache friendliness.
pub fn transpose(data: &mut [Complex], n: usize) {
    debug_assert_eq!(data.len(), n * n);
    const B: usize = 32;
    let mut bi = 0;
    while bi < n {
        // diagonal block
        for i in bi..(bi + B).min(n) {
            for j in (i + 1)..(bi + B).min(n) {
                data.swap(i * n + j, j * n + i);
            }
        }
        let mut bj = bi + B;
        while bj < n {
            for i in bi..(bi + B).min(n) {
                for j in bj..(bj + B).min(n) {
                    data.swap(i * n + j, j * n + i);
                }
            }
            bj += B;
        }
        bi += B;
    }
}

/// Forward transform of a flattened field: 1-D for `dim == 1`,
/// row-column for `dim == 2` (row-major layout, axis 0 contiguous).
pub fn forward_nd(data: &mut [Complex], n: usize, dim: usize, plan: &FftPlan) {
    match dim {
        1 => plan.forward(data),
        2 => {
            for row in data.chunks_exact_mut(n) {
                plan.forward(row);
            }
            transpose(data, n);
            for row in data.chunks_exact_mut(n) {
                plan.forward(row);
            }
            transpose(data, n);
        }
        _ => unreachable!("grid dimension is 1 or 2"),
    }
}

/// Inverse transform of a flattened field, scaled by 1/n^dim.
pub fn inverse_nd(data: &mut [Complex], n: usize, dim: usize, plan: &FftPlan) {
    match dim {
        1 => plan.inverse(data),
        2 => {
            for row in data.chunks_exact_mut(n) {
                plan.inverse(row);
            }
            transpose(data, n);
            for row in data.chunks_exact_mut(n) {
                plan.inverse(row);
            }
            transpose(data, n);
        }
        _ => unreachable!("grid dimension is 1 or 2"),
    }
}
