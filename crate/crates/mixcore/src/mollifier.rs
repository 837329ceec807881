//! Mollifiers described by radial Fourier profiles φ̂(|ξ|) with φ̂(0) = 1.
//!
//! Two profiles cover everything the crate needs: the canonical smooth
//! frequency cutoff (≡1 below |ξ| = 1, ≡0 above |ξ| = 2) and the Gaussian,
//! whose physical kernel is positive exactly.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::TorusGrid;

/// Radial Fourier profile, with an analytic derivative per kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialProfile {
    /// 1 on [0, 1], 0 on [2, ∞), transition g(2−s)/(g(2−s)+g(s−1)) with
    /// g(t) = exp(−1/t).
    SmoothCutoff,
    /// exp(−s²/2)
    Gaussian,
}

fn bump(t: f64) -> f64 {
    if t > 0.0 { libm::exp(-1.0 / t) } else { 0.0 }
}

fn bump_slope(t: f64) -> f64 {
    if t > 0.0 { libm::exp(-1.0 / t) / (t * t) } else { 0.0 }
}

impl RadialProfile {
    pub fn value(&self, s: f64) -> f64 {
        match self {
            RadialProfile::SmoothCutoff => {
                if s <= 1.0 {
                    1.0
                } else if s >= 2.0 {
                    0.0
                } else {
                    let a = bump(2.0 - s);
                    let b = bump(s - 1.0);
                    a / (a + b)
                }
            }
            RadialProfile::Gaussian => libm::exp(-0.5 * s * s),
        }
    }

    /// d/ds of the profile.
    pub fn slope(&self, s: f64) -> f64 {
        match self {
            RadialProfile::SmoothCutoff => {
                if s <= 1.0 || s >= 2.0 {
                    0.0
                } else {
                    let a = bump(2.0 - s);
                    let b = bump(s - 1.0);
                    let da = -bump_slope(2.0 - s);
                    let db = bump_slope(s - 1.0);
                    (da * b - a * db) / ((a + b) * (a + b))
                }
            }
            RadialProfile::Gaussian => -s * libm::exp(-0.5 * s * s),
        }
    }
}

/// Unit-mass mollifier given by its radial Fourier profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mollifier {
    profile: RadialProfile,
    is_frequency_cutoff: bool,
    is_positive: bool,
}

/// The canonical frequency cutoff: φ̂ ≡ 1 for |ξ| ≤ 1 and ≡ 0 for |ξ| ≥ 2.
pub fn make_frequency_cutoff() -> Mollifier {
    Mollifier {
        profile: RadialProfile::SmoothCutoff,
        is_frequency_cutoff: true,
        is_positive: false,
    }
}

/// Gaussian mollifier; positive in physical space exactly.
pub fn make_gaussian() -> Mollifier {
    Mollifier { profile: RadialProfile::Gaussian, is_frequency_cutoff: false, is_positive: true }
}

impl Mollifier {
    pub fn profile(&self) -> RadialProfile {
        self.profile
    }

    pub fn is_frequency_cutoff(&self) -> bool {
        self.is_frequency_cutoff
    }

    pub fn is_positive(&self) -> bool {
        self.is_positive
    }

    /// φ̂ at radius s.
    pub fn profile_value(&self, s: f64) -> f64 {
        self.profile.value(s)
    }

    /// dφ̂/ds at radius s.
    pub fn profile_slope(&self, s: f64) -> f64 {
        self.profile.slope(s)
    }

    /// φ̂(|ξ|) as a grid symbol.
    pub fn symbol(&self, xi: [f64; 2]) -> f64 {
        self.profile.value(libm::hypot(xi[0], xi[1]))
    }

    /// Physical-space kernel sampled on the grid: the periodization
    /// (1/Λ^d) Σ_k φ̂(ξ_k) e^{iξ_k·x}.
    pub fn physical_kernel(&self, grid: &TorusGrid) -> Result<ScalarField> {
        kernel_field_from_symbol(grid, |xi| self.symbol(xi))
    }

    /// min/max ratio of the sampled physical kernel; ≥ −1e−10 is the
    /// positivity invariant for `is_positive` mollifiers.
    pub fn positivity_defect(&self, grid: &TorusGrid) -> Result<f64> {
        let k = self.physical_kernel(grid)?;
        let max = k.values().iter().fold(0.0f64, |m, v| m.max(*v));
        let min = k.values().iter().fold(0.0f64, |m, v| m.min(*v));
        if max <= 0.0 {
            return Err(Error::ZeroField);
        }
        Ok(min / max)
    }
}

/// Builds the physical-space field of a continuum convolution kernel given by
/// a real symbol: values are (1/Λ^d) Σ_k symbol(ξ_k) e^{iξ_k·x}. The symbol
/// is sampled with conjugate-pair averaging so Nyquist-plane parity is
/// well-defined.
pub(crate) fn kernel_field_from_symbol(
    grid: &TorusGrid,
    symbol: impl Fn([f64; 2]) -> f64,
) -> Result<ScalarField> {
    let amplitude = grid.len() as f64 / libm::pow(grid.period(), grid.dim() as f64);
    let mut spectrum = crate::field::sample_real_symbol(grid, symbol);
    for z in spectrum.iter_mut() {
        *z = z.scale(amplitude);
    }
    ScalarField::from_spectrum(*grid, spectrum)
}
