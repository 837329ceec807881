//! Periodic torus discretization.
//!
//! Conventions (fixed, part of the dump format):
//! - physical coordinates x_a = period · j / n for j = 0..n−1 on every axis;
//! - flat layout is row-major with axis 0 contiguous: `flat = j1 * n + j0`
//!   in 2-D, where j0 indexes x₁ and j1 indexes x₂;
//! - spectral layout mirrors the physical one; the signed mode of index j is
//!   j for j ≤ n/2 and j − n otherwise, and the physical wavenumber is
//!   2π·k/period;
//! - forward transform unscaled, inverse scaled by 1/n^dim.

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid {
    dim: usize,
    n: usize,
    period: f64,
}

impl TorusGrid {
    pub fn new(dim: usize, points_per_axis: usize, period: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid("dim must be 1 or 2"));
        }
        if !points_per_axis.is_power_of_two() || points_per_axis < MIN_POINTS {
            return Err(Error::InvalidGrid("points_per_axis must be a power of two >= 8"));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid("period must be a positive real"));
        }
        Ok(TorusGrid { dim, n: points_per_axis, period })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Total number of grid points, n^dim.
    pub fn len(&self) -> usize {
        match self.dim {
            1 => self.n,
            _ => self.n * self.n,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Physical coordinate of index j on an axis, in [0, period).
    pub fn coord(&self, j: usize) -> f64 {
        self.period * j as f64 / self.n as f64
    }

    /// Coordinate shifted to the centered fundamental domain [−Λ/2, Λ/2).
    pub fn centered_coord(&self, j: usize) -> f64 {
        self.coord(j) - self.period / 2.0
    }

    /// Signed integer mode of spectral index j (Nyquist maps to +n/2).
    pub fn signed_mode(&self, j: usize) -> i64 {
        if j <= self.n / 2 { j as i64 } else { j as i64 - self.n as i64 }
    }

    /// Physical wavenumber 2π·k/period of spectral index j.
    pub fn wavenumber(&self, j: usize) -> f64 {
        2.0 * core::f64::consts::PI * self.signed_mode(j) as f64 / self.period
    }

    /// Largest representable |signed mode|.
    pub fn nyquist_mode(&self) -> i64 {
        (self.n / 2) as i64
    }

    /// Physical Nyquist wavenumber.
    pub fn nyquist_wavenumber(&self) -> f64 {
        2.0 * core::f64::consts::PI * self.nyquist_mode() as f64 / self.period
    }

    /// Largest |signed mode| kept by dealiasing at the given fraction.
    pub fn dealias_mode(&self, fraction: f64) -> i64 {
        libm::floor(fraction * self.nyquist_mode() as f64) as i64
    }

    /// Flat index of per-axis indices (axis 0 contiguous).
    pub fn flat(&self, idx: &[usize]) -> usize {
        match self.dim {
            1 => idx[0],
            _ => idx[1] * self.n + idx[0],
        }
    }

    /// Flat index of the conjugate mode (−k mod n per axis).
    pub fn conj_flat(&self, flat: usize) -> usize {
        let n = self.n;
        match self.dim {
            1 => (n - flat % n) % n,
            _ => {
                let j0 = flat % n;
                let j1 = flat / n;
                ((n - j1) % n) * n + (n - j0) % n
            }
        }
    }

    /// Visits every mode as (flat index, signed modes, physical wavenumbers).
    /// For dim 1 the second components are zero.
    pub fn for_each_mode(&self, mut f: impl FnMut(usize, [i64; 2], [f64; 2])) {
        let n = self.n;
        let scale = 2.0 * core::f64::consts::PI / self.period;
        match self.dim {
            1 => {
                for j in 0..n {
                    let k = self.signed_mode(j);
                    f(j, [k, 0], [k as f64 * scale, 0.0]);
                }
            }
            _ => {
                for j1 in 0..n {
                    let k1 = self.signed_mode(j1);
                    let xi1 = k1 as f64 * scale;
                    for j0 in 0..n {
                        let k0 = self.signed_mode(j0);
                        f(j1 * n + j0, [k0, k1], [k0 as f64 * scale, xi1]);
                    }
                }
            }
        }
    }

    /// Visits every grid point as (flat index, physical coordinates).
    pub fn for_each_point(&self, mut f: impl FnMut(usize, [f64; 2])) {
        let n = self.n;
        match self.dim {
            1 => {
                for j in 0..n {
                    f(j, [self.coord(j), 0.0]);
                }
            }
            _ => {
                for j1 in 0..n {
                    let x1 = self.coord(j1);
                    for j0 in 0..n {
                        f(j1 * n + j0, [self.coord(j0), x1]);
                    }
                }
            }
        }
    }

    /// Torus distance of a grid point from the origin.
    pub fn torus_distance(&self, flat: usize) -> f64 {
        let n = self.n;
        let half = self.period / 2.0;
        let fold = |x: f64| if x > half { self.period - x } else { x };
        match self.dim {
            1 => fold(self.coord(flat)),
            _ => {
                let dx = fold(self.coord(flat % n));
                let dy = fold(self.coord(flat / n));
                libm::hypot(dx, dy)
            }
        }
    }

    /// Quadrature weight of one grid cell, (Λ/n)^dim.
    pub fn cell_volume(&self) -> f64 {
        let h = self.spacing();
        match self.dim {
            1 => h,
            _ => h * h,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(TorusGrid::new(3, 64, 1.0).is_err());
        assert!(TorusGrid::new(2, 48, 1.0).is_err());
        assert!(TorusGrid::new(2, 4, 1.0).is_err());
        assert!(TorusGrid::new(2, 64, 0.0).is_err());
        assert!(TorusGrid::new(2, 64, f64::NAN).is_err());
    }

    #[test]
    fn coordinates_and_wavenumbers() {
        let g = TorusGrid::new(1, 8, 2.0).unwrap();
        assert_eq!(g.coord(0), 0.0);
        assert_eq!(g.coord(4), 1.0);
        assert_eq!(g.signed_mode(5), -3);
        assert_eq!(g.signed_mode(4), 4);
        let w = g.wavenumber(1);
        assert!((w - core::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn conjugate_index_pairs_modes() {
        let g = TorusGrid::new(2, 8, 1.0).unwrap();
        g.for_each_mode(|flat, k, _| {
            let c = g.conj_flat(flat);
            g.for_each_mode(|f2, k2, _| {
                if f2 == c {
                    let n = 8i64;
                    assert_eq!((k[0] + k2[0]).rem_euclid(n), 0);
                    assert_eq!((k[1] + k2[1]).rem_euclid(n), 0);
                }
            });
        });
    }

    #[test]
    fn torus_distance_folds() {
        let g = TorusGrid::new(1, 8, 8.0).unwrap();
        assert_eq!(g.torus_distance(1), 1.0);
        assert_eq!(g.torus_distance(7), 1.0);
        assert_eq!(g.torus_distance(4), 4.0);
    }
}
