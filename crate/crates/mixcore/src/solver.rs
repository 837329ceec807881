//! Conservative pseudo-spectral solver for the forced transport(-diffusion)
//! equation ∂ρ/∂t + ∇·(uρ) = νΔρ + f.
//!
//! RK4 in time on the spectral advection form with 2/3-rule dealiasing of the
//! products; the mean mode is advanced exactly (advection and diffusion leave
//! it untouched, mean-zero forcing keeps it constant).

use alloc::vec;
use alloc::vec::Vec;

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::fft::{FftPlan, forward_nd, inverse_nd};
use crate::field::ScalarField;
use crate::flow::{DEFAULT_DEALIAS_FRACTION, VelocityField};
use crate::grid::TorusGrid;

#[derive(Debug, Clone)]
pub enum Forcing {
    None,
    Steady(ScalarField),
    /// f(x, t) = field(x) · cos(ω t)
    Modulated { field: ScalarField, angular_frequency: f64 },
}

impl Forcing {
    fn field(&self) -> Option<&ScalarField> {
        match self {
            Forcing::None => None,
            Forcing::Steady(f) => Some(f),
            Forcing::Modulated { field, .. } => Some(field),
        }
    }

    fn amplitude(&self, t: f64) -> f64 {
        match self {
            Forcing::None => 0.0,
            Forcing::Steady(_) => 1.0,
            Forcing::Modulated { angular_frequency, .. } => libm::cos(angular_frequency * t),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub dt: f64,
    /// Kept fraction of the Nyquist mode in each axis; default 2/3.
    pub dealias_fraction: f64,
    /// Diffusion coefficient ν ≥ 0.
    pub nu: f64,
    pub forcing: Forcing,
    /// Exponents whose L^p norms are recorded every step.
    pub tracked_exponents: Vec<f64>,
    /// Exponent of the gradient accumulator ∫‖∇u‖_p dt.
    pub accumulator_exponent: f64,
    /// A state snapshot is kept every `snapshot_stride` steps (0 = only the
    /// initial and final states).
    pub snapshot_stride: usize,
}

impl SolverConfig {
    pub fn new(dt: f64) -> Self {
        SolverConfig {
            dt,
            dealias_fraction: DEFAULT_DEALIAS_FRACTION,
            nu: 0.0,
            forcing: Forcing::None,
            tracked_exponents: vec![2.0],
            accumulator_exponent: 2.0,
            snapshot_stride: 0,
        }
    }
}

/// Time history of one solve: sparse state snapshots plus per-step scalar
/// diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Snapshot times; times[0] = 0 and the last entry is the horizon.
    pub times: Vec<f64>,
    /// States at `times`; states[0] is the initial datum.
    pub states: Vec<ScalarField>,
    /// Per-step diagnostic times (t_0 = 0 .. t_N = horizon).
    pub step_times: Vec<f64>,
    /// Tracked exponents, in the order of `tracked_norms`.
    pub tracked_exponents: Vec<f64>,
    /// tracked_norms[i][k] = ‖ρ(t_k)‖_{p_i}.
    pub tracked_norms: Vec<Vec<f64>>,
    /// accumulator[k] = ∫₀^{t_k} ‖∇u‖_p ds (exact piecewise products).
    pub accumulator: Vec<f64>,
    /// Fraction of spectral mass in the top 15% of the kept band, per step;
    /// a saturation warning signal for regularity diagnostics.
    pub top_band_fraction: Vec<f64>,
    /// False when the forcing carries mean mass (mass is then not conserved).
    pub forcing_mean_zero: bool,
}

impl Trajectory {
    pub fn final_state(&self) -> &ScalarField {
        self.states.last().expect("trajectory has at least the initial state")
    }

    /// First diagnostic time at which the top-band spectral fraction exceeds
    /// the threshold, if any.
    pub fn saturation_time(&self, threshold: f64) -> Option<f64> {
        self.top_band_fraction
            .iter()
            .position(|&f| f > threshold)
            .map(|i| self.step_times[i])
    }
}

struct Workspace {
    grid: TorusGrid,
    plan: FftPlan,
    /// i ξ_a with the dealias mask and Nyquist zeroing folded in.
    ik: Vec<Vec<Complex>>,
    /// −|ξ|²
    neg_xi2: Vec<f64>,
    values: Vec<Complex>,
    prod: Vec<Complex>,
}

impl Workspace {
    fn new(grid: TorusGrid, fraction: f64) -> Self {
        let limit = grid.dealias_mode(fraction);
        let nyq = grid.nyquist_mode();
        let mut ik = vec![vec![Complex::ZERO; grid.len()]; grid.dim()];
        let mut neg_xi2 = vec![0.0; grid.len()];
        grid.for_each_mode(|i, k, xi| {
            let masked =
                k[0].abs() > limit || (grid.dim() == 2 && k[1].abs() > limit);
            for (axis, tab) in ik.iter_mut().enumerate() {
                tab[i] = if masked || k[axis] == nyq {
                    Complex::ZERO
                } else {
                    Complex::new(0.0, xi[axis])
                };
            }
            neg_xi2[i] = -(xi[0] * xi[0] + xi[1] * xi[1]);
        });
        let plan = FftPlan::new(grid.points_per_axis());
        let len = grid.len();
        Workspace {
            grid,
            plan,
            ik,
            neg_xi2,
            values: vec![Complex::ZERO; len],
            prod: vec![Complex::ZERO; len],
        }
    }

    fn to_values(&mut self, state: &[Complex]) {
        self.values.copy_from_slice(state);
        inverse_nd(&mut self.values, self.grid.points_per_axis(), self.grid.dim(), &self.plan);
    }

    /// rhs = −∇·(uρ) + νΔρ + f(t), written into `out`. The velocity frame is
    /// fixed per step (chosen at the step midpoint) so RK4 stages never
    /// straddle a switch instant.
    fn rhs(
        &mut self,
        state: &[Complex],
        frame: &[ScalarField],
        nu: f64,
        forcing: &Forcing,
        forcing_spectrum: Option<&[Complex]>,
        t: f64,
        out: &mut [Complex],
    ) {
        self.to_values(state);
        for z in out.iter_mut() {
            *z = Complex::ZERO;
        }
        for (axis, comp) in frame.iter().enumerate() {
            for ((p, v), &c) in
                self.prod.iter_mut().zip(self.values.iter()).zip(comp.values().iter())
            {
                *p = Complex::real(v.re * c);
            }
            forward_nd(&mut self.prod, self.grid.points_per_axis(), self.grid.dim(), &self.plan);
            let ik = &self.ik[axis];
            for ((o, p), w) in out.iter_mut().zip(self.prod.iter()).zip(ik.iter()) {
                *o = *o - *w * *p;
            }
        }
        if nu > 0.0 {
            for ((o, s), &l) in out.iter_mut().zip(state.iter()).zip(self.neg_xi2.iter()) {
                *o += s.scale(nu * l);
            }
        }
        if let Some(fs) = forcing_spectrum {
            let amp = forcing.amplitude(t);
            if amp != 0.0 {
                for (o, z) in out.iter_mut().zip(fs.iter()) {
                    *o += z.scale(amp);
                }
            }
        }
    }
}

/// Largest stable time step for the given flow, diffusion, and grid:
/// the advective CFL bound 0.5·Δx/max|u| and the explicit diffusion bound
/// 1/(ν ξ_max²).
pub fn admissible_dt(u: &VelocityField, nu: f64, fraction: f64) -> f64 {
    let grid = u.grid();
    let speed = u.max_speed();
    let advective =
        if speed > 0.0 { 0.5 * grid.spacing() / speed } else { f64::INFINITY };
    let xi_max = 2.0 * core::f64::consts::PI * grid.dealias_mode(fraction) as f64
        / grid.period()
        * libm::sqrt(grid.dim() as f64);
    let diffusive = if nu > 0.0 { 1.0 / (nu * xi_max * xi_max) } else { f64::INFINITY };
    advective.min(diffusive)
}

/// Evolves ρ₀ along u up to `t_final`.
pub fn solve(
    rho0: &ScalarField,
    u: &VelocityField,
    t_final: f64,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    let grid = *rho0.grid();
    if grid != *u.grid() {
        return Err(Error::GridMismatch);
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidScale("horizon must be positive and finite"));
    }
    if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
        return Err(Error::InvalidScale("dt must be positive and finite"));
    }
    if !(cfg.dealias_fraction > 0.0 && cfg.dealias_fraction <= 1.0) {
        return Err(Error::InvalidScale("dealias fraction must lie in (0, 1]"));
    }
    if !(cfg.nu >= 0.0 && cfg.nu.is_finite()) {
        return Err(Error::InvalidScale("nu must be finite and >= 0"));
    }
    let dt_max = admissible_dt(u, cfg.nu, cfg.dealias_fraction);
    if cfg.dt > dt_max * (1.0 + 1e-9) {
        return Err(Error::CflViolation { admissible_dt: dt_max });
    }
    if !rho0.is_band_limited(cfg.dealias_fraction) {
        return Err(Error::Precondition("initial datum not band-limited under the dealias fraction"));
    }

    let forcing_spectrum: Option<Vec<Complex>> = match cfg.forcing.field() {
        None => None,
        Some(f) => {
            if *f.grid() != grid {
                return Err(Error::GridMismatch);
            }
            let mut spec = f.spectrum().to_vec();
            crate::field::truncate_spectrum(&grid, &mut spec, cfg.dealias_fraction);
            Some(spec)
        }
    };
    let forcing_mean_zero = match &forcing_spectrum {
        None => true,
        Some(s) => s[0].abs() / grid.len() as f64 <= 1e-12,
    };

    let steps = libm::ceil(t_final / cfg.dt - 1e-9) as usize;
    let frame_norms: Vec<f64> = (0..u.frame_count())
        .map(|i| u.frame_grad_norm(i, cfg.accumulator_exponent))
        .collect::<Result<_>>()?;

    let mut ws = Workspace::new(grid, cfg.dealias_fraction);
    let len = grid.len();
    let mut state = rho0.spectrum().to_vec();
    crate::field::truncate_spectrum(&grid, &mut state, cfg.dealias_fraction);
    let mut k1 = vec![Complex::ZERO; len];
    let mut k2 = vec![Complex::ZERO; len];
    let mut k3 = vec![Complex::ZERO; len];
    let mut k4 = vec![Complex::ZERO; len];
    let mut stage = vec![Complex::ZERO; len];

    let top_cut = (0.85 * grid.dealias_mode(cfg.dealias_fraction) as f64) as i64;
    let mut top_mask = vec![false; len];
    let limit = grid.dealias_mode(cfg.dealias_fraction);
    grid.for_each_mode(|i, k, _| {
        let inside = k[0].abs() <= limit && (grid.dim() == 1 || k[1].abs() <= limit);
        top_mask[i] = inside && (k[0].abs() > top_cut || (grid.dim() == 2 && k[1].abs() > top_cut));
    });

    let stride = cfg.snapshot_stride;
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        step_times: Vec::with_capacity(steps + 1),
        tracked_exponents: cfg.tracked_exponents.clone(),
        tracked_norms: vec![Vec::with_capacity(steps + 1); cfg.tracked_exponents.len()],
        accumulator: Vec::with_capacity(steps + 1),
        top_band_fraction: Vec::with_capacity(steps + 1),
        forcing_mean_zero,
    };

    let mut t = 0.0f64;
    let mut acc = 0.0f64;
    for step in 0..=steps {
        // diagnostics at the current state
        ws.to_values(&state);
        let real: Vec<f64> = ws.values.iter().map(|z| z.re).collect();
        if let Some(index) = real.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        traj.step_times.push(t);
        for (slot, &p) in traj.tracked_norms.iter_mut().zip(cfg.tracked_exponents.iter()) {
            slot.push(crate::field::lp_of_slice(&real, p, grid.cell_volume())?);
        }
        traj.accumulator.push(acc);
        let total: f64 = state.iter().map(|z| z.norm_sqr()).sum();
        let top: f64 = state
            .iter()
            .zip(top_mask.iter())
            .filter(|&(_, &m)| m)
            .map(|(z, _)| z.norm_sqr())
            .sum();
        traj.top_band_fraction.push(if total > 0.0 { top / total } else { 0.0 });

        let snapshot = step == 0
            || step == steps
            || (stride > 0 && step % stride == 0);
        if snapshot {
            traj.times.push(t);
            traj.states.push(ScalarField::from_spectrum_unchecked(grid, state.clone()));
        }
        if step == steps {
            break;
        }

        let dt = if (step + 1) == steps { t_final - t } else { cfg.dt };
        let fs = forcing_spectrum.as_deref();
        let frame = u.components_at(t + 0.5 * dt);
        ws.rhs(&state, frame, cfg.nu, &cfg.forcing, fs, t, &mut k1);
        for i in 0..len {
            stage[i] = state[i] + k1[i].scale(0.5 * dt);
        }
        ws.rhs(&stage, frame, cfg.nu, &cfg.forcing, fs, t + 0.5 * dt, &mut k2);
        for i in 0..len {
            stage[i] = state[i] + k2[i].scale(0.5 * dt);
        }
        ws.rhs(&stage, frame, cfg.nu, &cfg.forcing, fs, t + 0.5 * dt, &mut k3);
        for i in 0..len {
            stage[i] = state[i] + k3[i].scale(dt);
        }
        ws.rhs(&stage, frame, cfg.nu, &cfg.forcing, fs, t + dt, &mut k4);
        for i in 0..len {
            state[i] += (k1[i] + (k2[i] + k3[i]).scale(2.0) + k4[i]).scale(dt / 6.0);
        }
        acc += u.segment_integral(t, t + dt, &frame_norms);
        t += dt;
    }

    Ok(traj)
}
