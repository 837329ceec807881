//! Real periodic scalar fields with cached spectra, and the Fourier-multiplier
//! machinery built on them.

use alloc::vec;
use alloc::vec::Vec;

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::fft::{FftPlan, forward_nd, inverse_nd};
use crate::grid::TorusGrid;

/// Real-valued field on a [`TorusGrid`]. Immutable after construction; both
/// the point values and the (unscaled forward DFT) spectral coefficients are
/// stored. Round-trip consistency and conjugate symmetry are construction
/// invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: TorusGrid,
    values: Vec<f64>,
    spectrum: Vec<Complex>,
}

fn first_non_finite(values: &[f64]) -> Option<usize> {
    values.iter().position(|v| !v.is_finite())
}

impl ScalarField {
    /// Builds a field from point values; rejects non-finite entries naming
    /// the first offending flat index.
    pub fn from_values(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if let Some(index) = first_non_finite(&values) {
            return Err(Error::NonFinite { index });
        }
        let mut spectrum: Vec<Complex> = values.iter().map(|&v| Complex::real(v)).collect();
        let plan = FftPlan::new(grid.points_per_axis());
        forward_nd(&mut spectrum, grid.points_per_axis(), grid.dim(), &plan);
        Ok(ScalarField { grid, values, spectrum })
    }

    /// Builds a field from spectral coefficients; rejects spectra that break
    /// the conjugate symmetry of a real field.
    pub fn from_spectrum(grid: TorusGrid, spectrum: Vec<Complex>) -> Result<Self> {
        if spectrum.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        let scale = grid.len() as f64;
        for (i, z) in spectrum.iter().enumerate() {
            if !z.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            let c = spectrum[grid.conj_flat(i)];
            let defect = (*z - c.conj()).abs();
            if defect > 1e-9 * (1.0 + z.abs().max(scale * 1e-6)) {
                return Err(Error::HermitianViolation { index: i });
            }
        }
        Ok(Self::from_spectrum_unchecked(grid, spectrum))
    }

    /// Internal constructor for spectra known to be conjugate-symmetric
    /// (outputs of multiplier application, solver states).
    pub(crate) fn from_spectrum_unchecked(grid: TorusGrid, spectrum: Vec<Complex>) -> Self {
        let mut work = spectrum.clone();
        let plan = FftPlan::new(grid.points_per_axis());
        inverse_nd(&mut work, grid.points_per_axis(), grid.dim(), &plan);
        let values = work.iter().map(|z| z.re).collect();
        ScalarField { grid, values, spectrum }
    }

    pub fn from_fn(grid: TorusGrid, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let mut values = vec![0.0; grid.len()];
        grid.for_each_point(|i, x| values[i] = f(x));
        Self::from_values(grid, values)
    }

    pub fn constant(grid: TorusGrid, c: f64) -> Result<Self> {
        Self::from_values(grid, vec![c; grid.len()])
    }

    pub fn zero(grid: TorusGrid) -> Self {
        let len = grid.len();
        ScalarField { grid, values: vec![0.0; len], spectrum: vec![Complex::ZERO; len] }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spectrum(&self) -> &[Complex] {
        &self.spectrum
    }

    pub fn mean(&self) -> f64 {
        self.spectrum[0].re / self.grid.len() as f64
    }

    /// Max |round-trip − values| relative to the field scale; a construction
    /// invariant probe used by tests.
    pub fn round_trip_defect(&self) -> f64 {
        let mut work = self.spectrum.clone();
        let plan = FftPlan::new(self.grid.points_per_axis());
        inverse_nd(&mut work, self.grid.points_per_axis(), self.grid.dim(), &plan);
        let scale = self.values.iter().fold(1e-300f64, |m, v| m.max(libm::fabs(*v)));
        self.values
            .iter()
            .zip(work.iter())
            .map(|(v, z)| libm::fabs(v - z.re).max(libm::fabs(z.im)))
            .fold(0.0, f64::max)
            / scale
    }

    /// L^p norm by equal-weight quadrature over the torus (physical measure),
    /// max modulus for p = ∞. Rejects p < 1 and non-finite data.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if let Some(index) = first_non_finite(&self.values) {
            return Err(Error::NonFinite { index });
        }
        lp_of_slice(&self.values, p, self.grid.cell_volume())
    }

    /// Applies a Fourier multiplier given as a symbol of the physical
    /// wavenumber vector. The symbol must satisfy σ(−ξ) = conj σ(ξ) on the
    /// grid so the output is real; violations are rejected.
    pub fn apply_multiplier(&self, symbol: impl Fn([f64; 2]) -> Complex) -> Result<ScalarField> {
        let mut table = vec![Complex::ZERO; self.grid.len()];
        self.grid.for_each_mode(|i, _, xi| table[i] = symbol(xi));
        self.apply_table(&table)
    }

    /// Same as [`Self::apply_multiplier`] for real even symbols.
    pub fn apply_real_multiplier(&self, symbol: impl Fn([f64; 2]) -> f64) -> Result<ScalarField> {
        let mut table = vec![Complex::ZERO; self.grid.len()];
        self.grid.for_each_mode(|i, _, xi| table[i] = Complex::real(symbol(xi)));
        self.apply_table(&table)
    }

    /// Applies a pre-sampled symbol table (one entry per mode).
    pub fn apply_table(&self, table: &[Complex]) -> Result<ScalarField> {
        if table.len() != self.grid.len() {
            return Err(Error::GridMismatch);
        }
        for (i, z) in table.iter().enumerate() {
            if !z.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            let c = table[self.grid.conj_flat(i)];
            if (*z - c.conj()).abs() > 1e-12 * (1.0 + z.abs()) {
                return Err(Error::HermitianViolation { index: i });
            }
        }
        let spectrum: Vec<Complex> =
            self.spectrum.iter().zip(table.iter()).map(|(a, b)| *a * *b).collect();
        Ok(Self::from_spectrum_unchecked(self.grid, spectrum))
    }

    /// Spectral partial derivative along `axis` (Nyquist plane zeroed so the
    /// odd multiplier stays conjugate-symmetric).
    pub fn derivative(&self, axis: usize) -> ScalarField {
        let nyq = self.grid.nyquist_mode();
        let mut spectrum = self.spectrum.clone();
        self.grid.for_each_mode(|i, k, xi| {
            spectrum[i] = if k[axis] == nyq {
                Complex::ZERO
            } else {
                Complex::new(0.0, xi[axis]) * spectrum[i]
            };
        });
        Self::from_spectrum_unchecked(self.grid, spectrum)
    }

    /// Pointwise product with 2/3-rule dealiasing at the given fraction.
    pub fn dealiased_product(&self, other: &ScalarField, fraction: f64) -> Result<ScalarField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values: Vec<f64> =
            self.values.iter().zip(other.values.iter()).map(|(a, b)| a * b).collect();
        let mut spectrum: Vec<Complex> = values.iter().map(|&v| Complex::real(v)).collect();
        let plan = FftPlan::new(self.grid.points_per_axis());
        forward_nd(&mut spectrum, self.grid.points_per_axis(), self.grid.dim(), &plan);
        truncate_spectrum(&self.grid, &mut spectrum, fraction);
        Ok(Self::from_spectrum_unchecked(self.grid, spectrum))
    }

    /// Zeroes all modes with any |k_axis| above the dealias limit.
    pub fn truncated(&self, fraction: f64) -> ScalarField {
        let mut spectrum = self.spectrum.clone();
        truncate_spectrum(&self.grid, &mut spectrum, fraction);
        Self::from_spectrum_unchecked(self.grid, spectrum)
    }

    /// True if no spectral mass sits above the dealias limit (relative to the
    /// field's total spectral mass).
    pub fn is_band_limited(&self, fraction: f64) -> bool {
        let limit = self.grid.dealias_mode(fraction);
        let mut inside = 0.0f64;
        let mut outside = 0.0f64;
        self.grid.for_each_mode(|i, k, _| {
            let m = self.spectrum[i].norm_sqr();
            if k[0].abs() > limit || (self.grid.dim() == 2 && k[1].abs() > limit) {
                outside += m;
            } else {
                inside += m;
            }
        });
        outside <= 1e-20 * inside.max(1e-300)
    }

    pub fn scaled(&self, s: f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
            spectrum: self.spectrum.iter().map(|z| z.scale(s)).collect(),
        }
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.linear_combination(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.linear_combination(1.0, other, -1.0)
    }

    pub fn linear_combination(&self, a: f64, other: &ScalarField, b: f64) -> Result<ScalarField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(ScalarField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(x, y)| a * x + b * y)
                .collect(),
            spectrum: self
                .spectrum
                .iter()
                .zip(other.spectrum.iter())
                .map(|(x, y)| x.scale(a) + y.scale(b))
                .collect(),
        })
    }

    /// Weighted sum of squared spectral moduli; equals ∫|f|² for the stored
    /// transform convention (Parseval).
    pub fn spectral_energy(&self) -> f64 {
        let w = libm::pow(self.grid.period(), self.grid.dim() as f64)
            / (self.grid.len() as f64 * self.grid.len() as f64);
        self.spectrum.iter().map(|z| z.norm_sqr()).sum::<f64>() * w
    }
}

/// Gradient as one field per axis.
pub fn gradient(f: &ScalarField) -> Vec<ScalarField> {
    (0..f.grid().dim()).map(|a| f.derivative(a)).collect()
}

/// Samples a real symbol over the grid's modes, averaging each mode with its
/// conjugate partner. Away from the Nyquist planes this is a bitwise no-op
/// for even symbols; on the self-conjugate Nyquist planes it keeps only the
/// even part, which generalizes the usual zero-Nyquist rule for odd
/// multipliers and keeps the table conjugate-symmetric.
pub fn sample_real_symbol(grid: &TorusGrid, symbol: impl Fn([f64; 2]) -> f64) -> Vec<Complex> {
    let mut raw = vec![0.0f64; grid.len()];
    grid.for_each_mode(|i, _, xi| raw[i] = symbol(xi));
    (0..grid.len())
        .map(|i| Complex::real(0.5 * (raw[i] + raw[grid.conj_flat(i)])))
        .collect()
}

/// L^p norm of raw values with a quadrature cell volume.
pub(crate) fn lp_of_slice(values: &[f64], p: f64, cell: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent("lp_norm requires p in [1, inf]"));
    }
    if p.is_infinite() {
        return Ok(values.iter().fold(0.0, |m, v| m.max(libm::fabs(*v))));
    }
    if p == 2.0 {
        // common case, avoid pow
        let s: f64 = values.iter().map(|v| v * v).sum();
        return Ok(libm::sqrt(s * cell));
    }
    if p == 1.0 {
        let s: f64 = values.iter().map(|v| libm::fabs(*v)).sum();
        return Ok(s * cell);
    }
    let s: f64 = values.iter().map(|v| libm::pow(libm::fabs(*v), p)).sum();
    Ok(libm::pow(s * cell, 1.0 / p))
}

pub(crate) fn truncate_spectrum(grid: &TorusGrid, spectrum: &mut [Complex], fraction: f64) {
    let limit = grid.dealias_mode(fraction);
    grid.for_each_mode(|i, k, _| {
        if k[0].abs() > limit || (grid.dim() == 2 && k[1].abs() > limit) {
            spectrum[i] = Complex::ZERO;
        }
    });
}
