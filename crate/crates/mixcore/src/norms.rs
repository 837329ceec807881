//! Mixing diagnostics: the scaled negative Sobolev norm W^{−1,r} (exact
//! multiplier form at r = 2, mollify-and-scale surrogate otherwise),
//! homogeneous Besov norms over Littlewood-Paley blocks, the log-derivative
//! functional ‖log(1−Δ)f‖_r, and the conserved mixing ratio.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exponents::ExponentTriple;
use crate::field::ScalarField;
use crate::kernel::rescale;
use crate::lp::LittlewoodPaleyFamily;
use crate::mollifier::{Mollifier, make_frequency_cutoff};
use crate::quad::log_spaced;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DualMode {
    /// Exact dual norm via the weight (1/L² + |ξ|²)^{−1/2}; r = 2 only.
    ExactR2,
    /// min over δ ∈ (0, L] of L‖f*φ_δ‖_r + δ‖f‖_r with the canonical
    /// frequency cutoff: an upper bound for the dual norm, and the official
    /// diagnostic for r ≠ 2.
    Surrogate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevDualSpec {
    pub r: f64,
    /// Length scale L of the dual pairing; may be infinite for ExactR2.
    pub length_scale: f64,
    pub mode: DualMode,
}

impl SobolevDualSpec {
    /// Exact H^{−1}-type norm at the grid's natural scale L = period.
    pub fn exact_h1(period: f64) -> Self {
        SobolevDualSpec { r: 2.0, length_scale: period, mode: DualMode::ExactR2 }
    }
}

pub fn sobolev_dual_norm(f: &ScalarField, spec: &SobolevDualSpec) -> Result<f64> {
    let grid = f.grid();
    match spec.mode {
        DualMode::ExactR2 => {
            if spec.r != 2.0 {
                return Err(Error::InvalidExponent("exact dual norm is defined only at r = 2"));
            }
            if !(spec.length_scale > 0.0) {
                return Err(Error::InvalidScale("length scale must be positive"));
            }
            let inv_l2 = if spec.length_scale.is_infinite() {
                let rms = f.lp_norm(2.0)?;
                if libm::fabs(f.mean()) > 1e-10 * rms.max(1e-300) {
                    return Err(Error::Precondition(
                        "L = inf requires a mean-zero field (constants pair infinitely)",
                    ));
                }
                0.0
            } else {
                1.0 / (spec.length_scale * spec.length_scale)
            };
            let cell = libm::pow(grid.period(), grid.dim() as f64)
                / (grid.len() as f64 * grid.len() as f64);
            let mut acc = 0.0;
            f.grid().for_each_mode(|i, k, xi| {
                let s2 = xi[0] * xi[0] + xi[1] * xi[1];
                if inv_l2 == 0.0 && k[0] == 0 && k[1] == 0 {
                    return; // mean mode annihilated at L = inf
                }
                acc += f.spectrum()[i].norm_sqr() / (inv_l2 + s2);
            });
            Ok(libm::sqrt(acc * cell))
        }
        DualMode::Surrogate => {
            if !(spec.r >= 1.0 && spec.r.is_finite()) {
                return Err(Error::InvalidExponent("surrogate needs r in [1, inf)"));
            }
            if !(spec.length_scale > 0.0 && spec.length_scale.is_finite()) {
                return Err(Error::InvalidScale("surrogate needs a finite length scale"));
            }
            let l = spec.length_scale;
            let phi = make_frequency_cutoff();
            let fr = f.lp_norm(spec.r)?;
            let mut best = f64::INFINITY;
            for &delta in log_spaced(1e-4 * l, l, 16).iter() {
                let mollified = rescale(&phi, delta)?.apply(f)?;
                let value = l * mollified.lp_norm(spec.r)? + delta * fr;
                best = best.min(value);
            }
            Ok(best)
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BesovSpec {
    pub s: f64,
    pub p: f64,
    /// Summation exponent; ∞ takes the max over blocks.
    pub q: f64,
    pub family: LittlewoodPaleyFamily,
}

#[derive(Debug, Clone, Copy)]
pub struct BesovValue {
    pub value: f64,
    /// False when the field carries spectral mass outside the blocks' reach.
    pub spectrum_covered: bool,
}

/// Homogeneous Besov norm (Σ_n 2^{ns q} ‖ψ_n * f‖_p^q)^{1/q}.
pub fn besov_norm(f: &ScalarField, spec: &BesovSpec) -> Result<BesovValue> {
    if !(spec.p >= 1.0) {
        return Err(Error::InvalidExponent("besov needs p in [1, inf]"));
    }
    if !(spec.q >= 1.0) {
        return Err(Error::InvalidExponent("besov needs q in [1, inf]"));
    }
    let (n_min, n_max) = spec.family.range();

    // occupied spectrum: largest/smallest nonzero-|ξ| modes above round-off
    let peak = f.spectrum().iter().map(|z| z.abs()).fold(0.0f64, f64::max);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    f.grid().for_each_mode(|i, k, xi| {
        if (k[0] != 0 || k[1] != 0) && f.spectrum()[i].abs() > 1e-13 * peak {
            let s = libm::hypot(xi[0], xi[1]);
            lo = lo.min(s);
            hi = hi.max(s);
        }
    });
    let spectrum_covered = if hi == 0.0 {
        true
    } else {
        (libm::log2(lo) - 1.0) >= n_min as f64 - 1.0 && (libm::log2(hi) + 1.0) <= n_max as f64 + 1.0
    };

    let mut terms: Vec<f64> = Vec::new();
    for n in n_min..=n_max {
        let block = spec.family.project(f, n);
        let norm = block.lp_norm(spec.p)?;
        terms.push(libm::pow(2.0, n as f64 * spec.s) * norm);
    }
    let value = if spec.q.is_infinite() {
        terms.iter().fold(0.0f64, |m, v| m.max(*v))
    } else {
        libm::pow(terms.iter().map(|v| libm::pow(*v, spec.q)).sum::<f64>(), 1.0 / spec.q)
    };
    Ok(BesovValue { value, spectrum_covered })
}

/// ‖log(1−Δ) f‖_{L^r} via the multiplier log(1+|ξ|²).
pub fn log_derivative_norm(f: &ScalarField, r: f64) -> Result<f64> {
    let g = f.apply_real_multiplier(|xi| libm::log1p(xi[0] * xi[0] + xi[1] * xi[1]))?;
    g.lp_norm(r)
}

/// The flow-conserved dimensionless ratio ‖f‖_q / ‖f‖_r.
pub fn mixing_ratio(f: &ScalarField, triple: &ExponentTriple) -> Result<f64> {
    let denom = f.lp_norm(triple.r())?;
    if denom == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(f.lp_norm(triple.q())? / denom)
}

/// Largest scanned δ at which ‖f*φ_δ‖_r ≥ ½‖f‖_r, i.e. the scale below which
/// the field is "not already mixed". Scans log-spaced δ from the grid
/// spacing up to the period.
pub fn not_mixed_scale(f: &ScalarField, phi: &Mollifier, r: f64) -> Result<f64> {
    let grid = f.grid();
    let target = 0.5 * f.lp_norm(r)?;
    if target == 0.0 {
        return Err(Error::ZeroField);
    }
    let mut best: Option<f64> = None;
    for &delta in log_spaced(0.25 * grid.spacing(), grid.period(), 8).iter() {
        let m = rescale(phi, delta)?.apply(f)?.lp_norm(r)?;
        if m >= target {
            best = Some(delta);
        }
    }
    best.ok_or(Error::Precondition("field is mixed below the grid scale"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;
    use crate::mollifier::make_gaussian;
    use core::f64::consts::PI;

    fn grid() -> TorusGrid {
        TorusGrid::new(2, 64, 1.0).unwrap()
    }

    #[test]
    fn single_mode_exact_dual_norm() {
        // f = cos(2πk·x): H^{-1} norm (L = ∞) is (1/√2)/(2π|k|)
        let g = grid();
        let k = [3.0, 4.0];
        let f = ScalarField::from_fn(g, |x| {
            libm::cos(2.0 * PI * (k[0] * x[0] + k[1] * x[1]))
        })
        .unwrap();
        let spec =
            SobolevDualSpec { r: 2.0, length_scale: f64::INFINITY, mode: DualMode::ExactR2 };
        let got = sobolev_dual_norm(&f, &spec).unwrap();
        let want = core::f64::consts::FRAC_1_SQRT_2 / (2.0 * PI * 5.0);
        assert!((got - want).abs() <= 1e-12 * want, "{got} vs {want}");
    }

    #[test]
    fn zero_field_dual_norm_is_zero() {
        let f = ScalarField::zero(grid());
        let spec = SobolevDualSpec::exact_h1(1.0);
        assert_eq!(sobolev_dual_norm(&f, &spec).unwrap(), 0.0);
    }

    #[test]
    fn exact_mode_rejects_r_not_two_and_nonzero_mean_at_infinite_l() {
        let f = ScalarField::constant(grid(), 1.0).unwrap();
        let bad =
            SobolevDualSpec { r: 3.0, length_scale: 1.0, mode: DualMode::ExactR2 };
        assert!(sobolev_dual_norm(&f, &bad).is_err());
        let inf =
            SobolevDualSpec { r: 2.0, length_scale: f64::INFINITY, mode: DualMode::ExactR2 };
        assert!(sobolev_dual_norm(&f, &inf).is_err());
    }

    #[test]
    fn exact_dual_norm_is_a_norm() {
        let g = grid();
        let spec = SobolevDualSpec::exact_h1(1.0);
        let f1 = ScalarField::from_fn(g, |x| libm::sin(2.0 * PI * x[0])).unwrap();
        let f2 = ScalarField::from_fn(g, |x| {
            libm::cos(4.0 * PI * x[1]) - libm::sin(6.0 * PI * x[0])
        })
        .unwrap();
        // homogeneity
        let a = sobolev_dual_norm(&f1.scaled(-2.5), &spec).unwrap();
        let b = sobolev_dual_norm(&f1, &spec).unwrap();
        assert!((a - 2.5 * b).abs() <= 1e-10 * a);
        // triangle inequality
        let sum = sobolev_dual_norm(&f1.add(&f2).unwrap(), &spec).unwrap();
        let parts =
            sobolev_dual_norm(&f1, &spec).unwrap() + sobolev_dual_norm(&f2, &spec).unwrap();
        assert!(sum <= parts + 1e-10);
    }

    #[test]
    fn surrogate_brackets_exact_at_r2() {
        let g = grid();
        let mut rng = crate::corpus::SplitMix64::new(11);
        for _ in 0..4 {
            let f = crate::corpus::random_band_limited(&g, 10, rng.next_u64());
            let exact = sobolev_dual_norm(&f, &SobolevDualSpec::exact_h1(1.0)).unwrap();
            let sur = sobolev_dual_norm(
                &f,
                &SobolevDualSpec { r: 2.0, length_scale: 1.0, mode: DualMode::Surrogate },
            )
            .unwrap();
            let ratio = sur / exact;
            assert!((1.0..=20.0).contains(&ratio), "surrogate/exact = {ratio}");
        }
    }

    #[test]
    fn log_derivative_norm_on_modes() {
        let g = grid();
        // constants are annihilated
        let c = ScalarField::constant(g, 5.0).unwrap();
        assert!(log_derivative_norm(&c, 2.0).unwrap() <= 1e-12);
        // single mode: eigenvalue log(1+|ξ₀|²)
        let f = ScalarField::from_fn(g, |x| libm::cos(2.0 * PI * 2.0 * x[0])).unwrap();
        let xi0 = 2.0 * PI * 2.0;
        let want = libm::log1p(xi0 * xi0) * f.lp_norm(2.0).unwrap();
        let got = log_derivative_norm(&f, 2.0).unwrap();
        assert!((got - want).abs() <= 1e-10 * want, "{got} vs {want}");
        // frequency doubling multiplies by log(1+4|ξ₀|²)/log(1+|ξ₀|²)
        let f2 = ScalarField::from_fn(g, |x| libm::cos(2.0 * PI * 4.0 * x[0])).unwrap();
        let got2 = log_derivative_norm(&f2, 2.0).unwrap();
        let want2 = libm::log1p(4.0 * xi0 * xi0) / libm::log1p(xi0 * xi0) * got;
        assert!((got2 - want2).abs() <= 1e-10 * want2);
    }

    #[test]
    fn mixing_ratio_properties() {
        let g = grid();
        let triple = ExponentTriple::new(4.0, 4.0).unwrap(); // q = 4, r = 2
        let f = ScalarField::from_fn(g, |x| {
            libm::sin(2.0 * PI * x[0]) * libm::sin(2.0 * PI * x[1])
        })
        .unwrap();
        // scaling invariance
        let a = mixing_ratio(&f, &triple).unwrap();
        let b = mixing_ratio(&f.scaled(17.0), &triple).unwrap();
        assert!((a - b).abs() <= 1e-12 * a);
        // q = r gives 1
        let same = ExponentTriple::with_r(f64::INFINITY, 2.0, 2.0).unwrap();
        let c = mixing_ratio(&f, &ExponentTriple::new(same.p(), same.q()).unwrap()).unwrap();
        let l2 = f.lp_norm(2.0).unwrap();
        assert!((c - 1.0).abs() <= 1e-12, "q=r ratio {c} (l2 {l2})");
        // zero field rejected
        assert!(mixing_ratio(&ScalarField::zero(g), &triple).is_err());
    }

    #[test]
    fn not_mixed_scale_single_mode() {
        let g = grid();
        let f = ScalarField::from_fn(g, |x| libm::sin(2.0 * PI * x[0])).unwrap();
        let phi = make_gaussian();
        let delta = not_mixed_scale(&f, &phi, 2.0).unwrap();
        // Gaussian damping e^{−δ²|ξ|²/2} = 1/2 at δ|ξ| ≈ 1.177
        let expect = 1.177 / (2.0 * PI);
        assert!(delta > 0.5 * expect && delta < 2.0 * expect, "scale {delta} vs {expect}");
    }
}
