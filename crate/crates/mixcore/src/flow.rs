//! Divergence-free velocity fields: the periodized linear shear, the
//! alternating sine shear, and the cellular flow, plus gradient norms and
//! their time accumulator.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::TorusGrid;

pub const DEFAULT_DEALIAS_FRACTION: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlowSpec {
    /// u(x) = (s(x₂), 0) with s equal to the centered coordinate x₂ on
    /// |x₂| ≤ 3Λ/8 and smoothly closed to periodicity outside. Built as the
    /// Gaussian-smoothed sawtooth series (σ = Λ/64), truncated at the 2/3
    /// dealias boundary, so it is band-limited and exactly linear on the core
    /// region to round-off for n ≥ 256.
    PeriodizedShear,
    /// u = (A sin(2πx₂/Λ), 0) and (0, A sin(2πx₁/Λ)), swapped every
    /// `switch_period`.
    AlternatingSineShear { amplitude: f64, switch_period: f64 },
    /// Stream function ψ = A sin(2πx₁/Λ) sin(2πx₂/Λ), u = (−∂₂ψ, ∂₁ψ).
    Cellular { amplitude: f64 },
}

/// Time-parametrized divergence-free field: a cyclic sequence of steady
/// frames, each holding `dim` component fields.
#[derive(Debug, Clone)]
pub struct VelocityField {
    grid: TorusGrid,
    frames: Vec<Vec<ScalarField>>,
    switch_period: f64,
}

const DIV_TOL: f64 = 1e-10;

impl VelocityField {
    /// Steady field from component fields. The spectral-divergence invariant
    /// is checked at construction.
    pub fn steady(components: Vec<ScalarField>) -> Result<Self> {
        Self::cyclic(vec![components], f64::INFINITY)
    }

    /// Piecewise-steady field cycling through `frames`, one per
    /// `switch_period` of time.
    pub fn cyclic(frames: Vec<Vec<ScalarField>>, switch_period: f64) -> Result<Self> {
        let first = frames.first().ok_or(Error::EmptyRange("at least one frame"))?;
        let grid = *first.first().ok_or(Error::EmptyRange("at least one component"))?.grid();
        if !(switch_period > 0.0) {
            return Err(Error::InvalidScale("switch period must be positive"));
        }
        for frame in &frames {
            if frame.len() != grid.dim() {
                return Err(Error::GridMismatch);
            }
            for c in frame {
                if *c.grid() != grid {
                    return Err(Error::GridMismatch);
                }
            }
        }
        let v = VelocityField { grid, frames, switch_period };
        for t in 0..v.frames.len() {
            let (div, grad) = v.frame_divergence_and_gradient(t);
            if div > DIV_TOL * grad {
                return Err(Error::Precondition("velocity field is not divergence-free"));
            }
        }
        Ok(v)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn switch_period(&self) -> f64 {
        self.switch_period
    }

    pub fn frame(&self, index: usize) -> &[ScalarField] {
        &self.frames[index % self.frames.len()]
    }

    /// Frame active at time t (right-continuous at switch instants).
    pub fn frame_index(&self, t: f64) -> usize {
        if self.switch_period.is_infinite() || self.frames.len() == 1 {
            0
        } else {
            (libm::floor(t / self.switch_period).max(0.0) as usize) % self.frames.len()
        }
    }

    pub fn components_at(&self, t: f64) -> &[ScalarField] {
        &self.frames[self.frame_index(t)]
    }

    /// Largest pointwise speed over all frames.
    pub fn max_speed(&self) -> f64 {
        let mut worst = 0.0f64;
        for frame in &self.frames {
            for i in 0..self.grid.len() {
                let s2: f64 = frame.iter().map(|c| c.values()[i] * c.values()[i]).sum();
                worst = worst.max(s2);
            }
        }
        libm::sqrt(worst)
    }

    fn frame_divergence_and_gradient(&self, index: usize) -> (f64, f64) {
        let frame = &self.frames[index];
        let mut div = ScalarField::zero(self.grid);
        let mut grad_max = 0.0f64;
        let mut grads: Vec<ScalarField> = Vec::new();
        for (axis, c) in frame.iter().enumerate() {
            div = div.add(&c.derivative(axis)).expect("same grid");
            for b in 0..self.grid.dim() {
                grads.push(c.derivative(b));
            }
        }
        for i in 0..self.grid.len() {
            let g2: f64 = grads.iter().map(|g| g.values()[i] * g.values()[i]).sum();
            grad_max = grad_max.max(g2);
        }
        let div_max = div.values().iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v)));
        (div_max, libm::sqrt(grad_max))
    }

    /// max |∇·u| relative to max |∇u| over all frames (0 for a zero field).
    pub fn divergence_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for t in 0..self.frames.len() {
            let (div, grad) = self.frame_divergence_and_gradient(t);
            if grad > 0.0 {
                worst = worst.max(div / grad);
            } else {
                worst = worst.max(div);
            }
        }
        worst
    }

    /// Spectral divergence Σ_a ∂_a u_a at time t.
    pub fn divergence(&self, t: f64) -> ScalarField {
        let frame = self.components_at(t);
        let mut div = ScalarField::zero(self.grid);
        for (axis, c) in frame.iter().enumerate() {
            div = div.add(&c.derivative(axis)).expect("same grid");
        }
        div
    }

    /// ‖∇u(t)‖_p: entrywise ℓ² over the gradient tensor, then spatial L^p.
    pub fn grad_norm(&self, p: f64, t: f64) -> Result<f64> {
        self.frame_grad_norm(self.frame_index(t), p)
    }

    pub(crate) fn frame_grad_norm(&self, index: usize, p: f64) -> Result<f64> {
        let frame = &self.frames[index];
        let mut entries: Vec<ScalarField> = Vec::new();
        for c in frame {
            for b in 0..self.grid.dim() {
                entries.push(c.derivative(b));
            }
        }
        let mut mag = vec![0.0f64; self.grid.len()];
        for e in &entries {
            for (m, v) in mag.iter_mut().zip(e.values().iter()) {
                *m += v * v;
            }
        }
        for m in mag.iter_mut() {
            *m = libm::sqrt(*m);
        }
        crate::field::lp_of_slice(&mag, p, self.grid.cell_volume())
    }

    /// ∫₀ᵗ ‖∇u(s)‖_p ds. Exact for the piecewise-steady time dependence
    /// (per-segment products, no quadrature error).
    pub fn grad_norm_accumulator(&self, p: f64, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Precondition("accumulator needs t >= 0"));
        }
        let norms: Vec<f64> = (0..self.frames.len())
            .map(|i| self.frame_grad_norm(i, p))
            .collect::<Result<_>>()?;
        Ok(self.segment_integral(0.0, t, &norms))
    }

    /// ∫_{t0}^{t1} ‖∇u‖_p ds given precomputed per-frame norms.
    pub(crate) fn segment_integral(&self, t0: f64, t1: f64, frame_norms: &[f64]) -> f64 {
        if self.switch_period.is_infinite() || self.frames.len() == 1 {
            return (t1 - t0) * frame_norms[0];
        }
        let tau = self.switch_period;
        let m = self.frames.len();
        let mut acc = 0.0;
        let mut t = t0;
        while t < t1 - 1e-15 * t1.max(1.0) {
            let seg = libm::floor(t / tau + 1e-12);
            let seg_end = ((seg + 1.0) * tau).min(t1);
            acc += (seg_end - t) * frame_norms[(seg.max(0.0) as usize) % m];
            t = seg_end;
        }
        acc
    }
}

/// Builds a library flow on the grid.
pub fn make_flow(spec: &FlowSpec, grid: &TorusGrid) -> Result<VelocityField> {
    match spec {
        FlowSpec::PeriodizedShear => {
            if grid.dim() != 2 {
                return Err(Error::InvalidGrid("periodized shear needs dim 2"));
            }
            let profile = shear_profile(grid);
            let n = grid.points_per_axis();
            let mut values = vec![0.0; grid.len()];
            for j1 in 0..n {
                let row = profile[j1];
                values[j1 * n..(j1 + 1) * n].fill(row);
            }
            let u1 = ScalarField::from_values(*grid, values)?;
            let u2 = ScalarField::zero(*grid);
            VelocityField::steady(vec![u1, u2])
        }
        FlowSpec::AlternatingSineShear { amplitude, switch_period } => {
            if grid.dim() != 2 {
                return Err(Error::InvalidGrid("alternating sine shear needs dim 2"));
            }
            if !(amplitude.is_finite() && *amplitude >= 0.0) {
                return Err(Error::Precondition("amplitude must be finite and >= 0"));
            }
            let a = *amplitude;
            let omega = 2.0 * PI / grid.period();
            let ua = ScalarField::from_fn(*grid, |x| a * libm::sin(omega * x[1]))?;
            let ub = ScalarField::from_fn(*grid, |x| a * libm::sin(omega * x[0]))?;
            let zero = ScalarField::zero(*grid);
            VelocityField::cyclic(
                vec![vec![ua, zero.clone()], vec![zero, ub]],
                *switch_period,
            )
        }
        FlowSpec::Cellular { amplitude } => {
            if grid.dim() != 2 {
                return Err(Error::InvalidGrid("cellular flow needs dim 2"));
            }
            if !(amplitude.is_finite() && *amplitude >= 0.0) {
                return Err(Error::Precondition("amplitude must be finite and >= 0"));
            }
            let a = *amplitude;
            let omega = 2.0 * PI / grid.period();
            let u1 = ScalarField::from_fn(*grid, |x| {
                -a * omega * libm::sin(omega * x[0]) * libm::cos(omega * x[1])
            })?;
            let u2 = ScalarField::from_fn(*grid, |x| {
                a * omega * libm::cos(omega * x[0]) * libm::sin(omega * x[1])
            })?;
            VelocityField::steady(vec![u1, u2])
        }
    }
}

/// 1-D shear profile s(x̃₂) over the axis indices: the sawtooth Fourier series
/// multiplied by a Gaussian factor exp(−σ²ξ²/2), σ = Λ/64, truncated at the
/// 2/3 dealias boundary.
fn shear_profile(grid: &TorusGrid) -> Vec<f64> {
    let n = grid.points_per_axis();
    let period = grid.period();
    let sigma = period / 64.0;
    let k_max = grid.dealias_mode(DEFAULT_DEALIAS_FRACTION) as usize;
    let mut out = vec![0.0; n];
    for (j, slot) in out.iter_mut().enumerate() {
        let y = grid.centered_coord(j);
        let mut s = 0.0;
        for k in 1..=k_max {
            let xi = 2.0 * PI * k as f64 / period;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            s += sign * (period / (PI * k as f64))
                * libm::exp(-0.5 * sigma * sigma * xi * xi)
                * libm::sin(xi * y);
        }
        *slot = s;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TorusGrid {
        TorusGrid::new(2, 256, 64.0).unwrap()
    }

    #[test]
    fn periodized_shear_is_divergence_free_and_linear_on_core() {
        let g = grid();
        let u = make_flow(&FlowSpec::PeriodizedShear, &g).unwrap();
        // u₁ depends only on x₂, so the spectral divergence vanishes identically
        let div = u.divergence(0.0);
        assert!(div.lp_norm(f64::INFINITY).unwrap() <= 1e-12);
        // s(x₂) = x₂ on |x₂| ≤ 3Λ/8, to round-off
        let n = g.points_per_axis();
        let u1 = &u.frame(0)[0];
        let mut worst = 0.0f64;
        for j1 in 0..n {
            let y = g.centered_coord(j1);
            if libm::fabs(y) <= 3.0 * g.period() / 8.0 {
                let dev = libm::fabs(u1.values()[j1 * n] - y);
                worst = worst.max(dev);
            }
        }
        assert!(worst <= 1e-10 * g.period(), "linearity defect {worst}");
        // and it is band-limited under the 2/3 rule
        assert!(u1.is_band_limited(DEFAULT_DEALIAS_FRACTION));
    }

    #[test]
    fn alternating_shear_zero_amplitude_is_zero() {
        let g = TorusGrid::new(2, 32, 1.0).unwrap();
        let u = make_flow(
            &FlowSpec::AlternatingSineShear { amplitude: 0.0, switch_period: 1.0 },
            &g,
        )
        .unwrap();
        assert_eq!(u.max_speed(), 0.0);
    }

    #[test]
    fn cellular_divergence_roundoff() {
        let g = TorusGrid::new(2, 64, 1.0).unwrap();
        let u = make_flow(&FlowSpec::Cellular { amplitude: 1.0 }, &g).unwrap();
        assert!(u.divergence_defect() <= 1e-12);
    }

    #[test]
    fn frames_switch_on_schedule() {
        let g = TorusGrid::new(2, 32, 1.0).unwrap();
        let u = make_flow(
            &FlowSpec::AlternatingSineShear { amplitude: 1.0, switch_period: 0.5 },
            &g,
        )
        .unwrap();
        assert_eq!(u.frame_index(0.0), 0);
        assert_eq!(u.frame_index(0.49), 0);
        assert_eq!(u.frame_index(0.5), 1);
        assert_eq!(u.frame_index(0.999), 1);
        assert_eq!(u.frame_index(1.0), 0);
    }

    #[test]
    fn accumulator_zero_steady_and_homogeneous() {
        let g = TorusGrid::new(2, 32, 1.0).unwrap();
        // zero field → 0
        let zero = VelocityField::steady(vec![ScalarField::zero(g), ScalarField::zero(g)]).unwrap();
        assert_eq!(zero.grad_norm_accumulator(2.0, 3.0).unwrap(), 0.0);
        // steady flow: exactly linear in t
        let u = make_flow(&FlowSpec::Cellular { amplitude: 1.0 }, &g).unwrap();
        let n = u.grad_norm(2.0, 0.0).unwrap();
        let acc = u.grad_norm_accumulator(2.0, 2.5).unwrap();
        assert!((acc - 2.5 * n).abs() <= 1e-10 * acc, "acc {acc} vs {}", 2.5 * n);
        // amplitude homogeneity across A ∈ {1, 2, 4}
        let base = make_flow(
            &FlowSpec::AlternatingSineShear { amplitude: 1.0, switch_period: 0.25 },
            &g,
        )
        .unwrap()
        .grad_norm_accumulator(3.0, 1.0)
        .unwrap();
        for a in [2.0, 4.0] {
            let acc = make_flow(
                &FlowSpec::AlternatingSineShear { amplitude: a, switch_period: 0.25 },
                &g,
            )
            .unwrap()
            .grad_norm_accumulator(3.0, 1.0)
            .unwrap();
            assert!((acc / base - a).abs() <= 1e-10, "A={a}: ratio {}", acc / base);
        }
    }

    #[test]
    fn accumulator_splits_partial_segments() {
        let g = TorusGrid::new(2, 32, 1.0).unwrap();
        let u = make_flow(
            &FlowSpec::AlternatingSineShear { amplitude: 2.0, switch_period: 0.4 },
            &g,
        )
        .unwrap();
        // both frames have the same ‖∇u‖_p, so the accumulator is linear
        let n = u.grad_norm(2.0, 0.0).unwrap();
        let acc = u.grad_norm_accumulator(2.0, 1.0).unwrap();
        assert!((acc - n).abs() <= 1e-9 * acc);
    }
}
