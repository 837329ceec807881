//! Seeded random fields for tests and experiments. The generator is a
//! SplitMix64 so corpora are bit-stable across platforms and releases.

use alloc::vec;
use alloc::vec::Vec;

use crate::complex::Complex;
use crate::field::ScalarField;
use crate::grid::TorusGrid;

pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller.
    pub fn next_normal(&mut self) -> f64 {
        let u = (self.next_f64()).max(1e-300);
        let v = self.next_f64();
        libm::sqrt(-2.0 * libm::log(u)) * libm::cos(2.0 * core::f64::consts::PI * v)
    }
}

/// Mean-zero random field with spectral support |k|_∞ ≤ max_mode, Gaussian
/// amplitude taper, normalized to ‖·‖₂ = 1.
pub fn random_band_limited(grid: &TorusGrid, max_mode: i64, seed: u64) -> ScalarField {
    let mut rng = SplitMix64::new(seed);
    let mut spectrum = vec![Complex::ZERO; grid.len()];
    let scale = grid.len() as f64;
    grid.for_each_mode(|i, k, _| {
        if k[0] == 0 && k[1] == 0 {
            return;
        }
        if k[0].abs() > max_mode || k[1].abs() > max_mode {
            return;
        }
        // fill the lexicographic half-space; mirror the conjugate
        let positive = k[0] > 0 || (k[0] == 0 && k[1] > 0);
        if !positive {
            return;
        }
        let m2 = (k[0] * k[0] + k[1] * k[1]) as f64 / (max_mode * max_mode) as f64;
        let w = libm::exp(-2.0 * m2) * scale;
        let z = Complex::new(rng.next_normal(), rng.next_normal()).scale(0.5 * w);
        spectrum[i] = z;
        spectrum[grid.conj_flat(i)] = z.conj();
    });
    let f = ScalarField::from_spectrum(*grid, spectrum).expect("hermitian by construction");
    let norm = f.lp_norm(2.0).expect("finite");
    if norm > 0.0 { f.scaled(1.0 / norm) } else { f }
}

/// Smooth box window in the centered x₂ coordinate: 1 on |x̃₂| ≲ half_width,
/// 0 beyond, with erf transitions of width `sigma`.
pub fn strip_window(grid: &TorusGrid, half_width: f64, sigma: f64) -> Vec<f64> {
    let mut w = vec![0.0; grid.len()];
    let root2 = libm::sqrt(2.0);
    grid.for_each_point(|i, x| {
        let y = x[1] - grid.period() / 2.0;
        w[i] = 0.5
            * (libm::erf((y + half_width) / (root2 * sigma))
                - libm::erf((y - half_width) / (root2 * sigma)));
    });
    w
}

/// Random band-limited field confined to the centered x₂ strip where the
/// periodized shear is exactly linear; the workhorse of the shear-oracle
/// corpus. Normalized to ‖·‖₂ = 1.
pub fn strip_windowed_field(
    grid: &TorusGrid,
    max_mode: i64,
    half_width: f64,
    sigma: f64,
    seed: u64,
) -> ScalarField {
    let raw = random_band_limited(grid, max_mode, seed);
    let window = strip_window(grid, half_width, sigma);
    let values: Vec<f64> =
        raw.values().iter().zip(window.iter()).map(|(v, w)| v * w).collect();
    let f = ScalarField::from_values(*grid, values).expect("finite");
    let norm = f.lp_norm(2.0).expect("finite");
    if norm > 0.0 { f.scaled(1.0 / norm) } else { f }
}
