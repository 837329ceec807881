//! Littlewood-Paley decomposition built from the canonical cutoff profile:
//! χ(s) = T(s) − T(2s) is supported in {1/2 ≤ s ≤ 2} and the dilates
//! χ(2^{−n}·) telescope to a partition of unity away from ξ = 0.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::TorusGrid;
use crate::mollifier::RadialProfile;

/// Annular bump χ at radius s.
pub fn chi(s: f64) -> f64 {
    RadialProfile::SmoothCutoff.value(s) - RadialProfile::SmoothCutoff.value(2.0 * s)
}

/// dχ/ds.
pub fn chi_slope(s: f64) -> f64 {
    RadialProfile::SmoothCutoff.slope(s) - 2.0 * RadialProfile::SmoothCutoff.slope(2.0 * s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LittlewoodPaleyFamily {
    n_min: i32,
    n_max: i32,
}

/// Family of blocks ψ_n for n in [n_min, n_max].
pub fn make_lp_family(n_min: i32, n_max: i32) -> Result<LittlewoodPaleyFamily> {
    if n_min > n_max {
        return Err(Error::EmptyRange("block range must be nonempty"));
    }
    Ok(LittlewoodPaleyFamily { n_min, n_max })
}

impl LittlewoodPaleyFamily {
    pub fn range(&self) -> (i32, i32) {
        (self.n_min, self.n_max)
    }

    /// The family whose blocks cover every nonzero wavenumber of the grid.
    pub fn covering(grid: &TorusGrid) -> LittlewoodPaleyFamily {
        let lo = 2.0 * core::f64::consts::PI / grid.period();
        let hi = libm::sqrt(grid.dim() as f64) * grid.nyquist_wavenumber();
        // χ(2^{−n}ξ) ≠ 0 for n in (log2 ξ − 1, log2 ξ + 1)
        let n_min = libm::floor(libm::log2(lo)) as i32 - 1;
        let n_max = libm::ceil(libm::log2(hi)) as i32 + 1;
        LittlewoodPaleyFamily { n_min, n_max }
    }

    /// Block symbol ψ̂_n(ξ) = χ(2^{−n}|ξ|).
    pub fn block_symbol(&self, n: i32, xi: [f64; 2]) -> f64 {
        chi(libm::scalbn(libm::hypot(xi[0], xi[1]), -n))
    }

    /// ψ_n * f.
    pub fn project(&self, f: &ScalarField, n: i32) -> ScalarField {
        f.apply_real_multiplier(|xi| self.block_symbol(n, xi))
            .expect("block symbol is real and even")
    }

    /// Worst deviation of Σ_n χ(2^{−n}ξ) from 1 over nonzero grid modes whose
    /// blocks lie inside the range.
    pub fn partition_defect(&self, grid: &TorusGrid) -> f64 {
        let mut worst = 0.0f64;
        grid.for_each_mode(|_, k, xi| {
            if k[0] == 0 && k[1] == 0 {
                return;
            }
            let s = libm::hypot(xi[0], xi[1]);
            let l = libm::log2(s);
            if (l - 1.0) < self.n_min as f64 || (l + 1.0) > self.n_max as f64 {
                return; // not covered by blocks in range
            }
            let mut sum = 0.0;
            for n in self.n_min..=self.n_max {
                sum += chi(libm::scalbn(s, -n));
            }
            worst = worst.max(libm::fabs(sum - 1.0));
        });
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn chi_at_unit_radius_is_one() {
        // χ(1) = T(1) − T(2) = 1 − 0
        assert_eq!(chi(1.0), 1.0);
    }

    #[test]
    fn chi_vanishes_off_the_annulus() {
        // supp χ ⊆ {1/2 ≤ s ≤ 2}
        assert_eq!(chi(0.5), 0.0);
        assert_eq!(chi(0.3), 0.0);
        assert_eq!(chi(2.0), 0.0);
        assert_eq!(chi(2.7), 0.0);
        assert!(chi(0.75) > 0.0);
        assert!(chi(1.5) > 0.0);
    }

    #[test]
    fn dilates_telescope_to_one() {
        // Σ_n χ(2^{−n}s) = 1 for covered s ≠ 0
        for &s in &[0.3, 1.0, 1.7, 8.3, 100.0] {
            let sum: f64 = (-12..=12).map(|n| chi(libm::scalbn(s, -n))).sum();
            assert!((sum - 1.0).abs() < 1e-10, "s={s}: {sum}");
        }
    }

    #[test]
    fn partition_defect_on_a_grid() {
        let grid = TorusGrid::new(2, 64, 1.0).unwrap();
        let fam = LittlewoodPaleyFamily::covering(&grid);
        assert!(fam.partition_defect(&grid) <= 1e-10);
    }

    #[test]
    fn empty_range_rejected() {
        assert!(make_lp_family(3, 2).is_err());
    }

    #[test]
    fn blocks_reconstruct_mean_zero_fields() {
        let grid = TorusGrid::new(2, 32, 1.0).unwrap();
        let f = ScalarField::from_fn(grid, |x| {
            libm::sin(2.0 * core::f64::consts::PI * x[0])
                + 0.4 * libm::cos(8.0 * core::f64::consts::PI * (x[0] + x[1]))
        })
        .unwrap();
        let fam = LittlewoodPaleyFamily::covering(&grid);
        let (lo, hi) = fam.range();
        let blocks: Vec<ScalarField> = (lo..=hi).map(|n| fam.project(&f, n)).collect();
        let mut sum = ScalarField::zero(grid);
        for b in &blocks {
            sum = sum.add(b).unwrap();
        }
        let err = sum.sub(&f).unwrap().lp_norm(2.0).unwrap() / f.lp_norm(2.0).unwrap();
        assert!(err <= 1e-8, "reconstruction error {err}");
    }
}
