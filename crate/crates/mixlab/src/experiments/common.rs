//! Shared plumbing for the experiment runners.

use mixcore::error::Error as CoreError;
use mixcore::flow::{FlowSpec, VelocityField, make_flow};
use mixcore::solver::{SolverConfig, Trajectory, solve};
use mixcore::{ScalarField, TorusGrid};

use crate::config::{Config, ConfigError};

pub type ExpError = Box<dyn std::error::Error>;

pub fn core_err(e: CoreError) -> ExpError {
    Box::new(e)
}

pub fn cfg_err(msg: String) -> ExpError {
    Box::new(ConfigError(msg))
}

/// Grid from config keys grid_n / period.
pub fn grid_from(cfg: &Config, default_n: usize, default_period: f64) -> Result<TorusGrid, ExpError> {
    let n = cfg.get_usize("grid_n", default_n)?;
    let period = cfg.get_f64("period", default_period)?;
    TorusGrid::new(2, n, period).map_err(core_err)
}

/// The alternating sine shear from config keys amplitude / switch_period.
pub fn alternating_flow(
    cfg: &Config,
    grid: &TorusGrid,
    default_amplitude: f64,
    default_switch: f64,
) -> Result<VelocityField, ExpError> {
    let amplitude = cfg.get_f64("amplitude", default_amplitude)?;
    let switch_period = cfg.get_f64("switch_period", default_switch)?;
    make_flow(&FlowSpec::AlternatingSineShear { amplitude, switch_period }, grid).map_err(core_err)
}

/// Time step at the given advective CFL fraction (capped by the diffusive
/// stability bound), made commensurate with the switch period so RK4 steps
/// never straddle a frame switch.
pub fn commensurate_dt(u: &VelocityField, cfl: f64, nu: f64) -> f64 {
    let grid = u.grid();
    let speed = u.max_speed();
    let advective =
        if speed > 0.0 { cfl * grid.spacing() / speed } else { f64::INFINITY };
    let xi_max = 2.0 * std::f64::consts::PI
        * grid.dealias_mode(mixcore::flow::DEFAULT_DEALIAS_FRACTION) as f64
        / grid.period()
        * (grid.dim() as f64).sqrt();
    let diffusive = if nu > 0.0 { 0.8 / (nu * xi_max * xi_max) } else { f64::INFINITY };
    let dt = advective.min(diffusive).min(0.05);
    let tau = u.switch_period();
    if tau.is_finite() { tau / (tau / dt).ceil() } else { dt }
}

/// Runs the transport solver with standard diagnostics.
#[allow(clippy::too_many_arguments)]
pub fn run_transport(
    rho0: &ScalarField,
    u: &VelocityField,
    t_final: f64,
    dt: f64,
    nu: f64,
    accumulator_exponent: f64,
    tracked: Vec<f64>,
    snapshot_stride: usize,
) -> Result<Trajectory, ExpError> {
    let mut cfg = SolverConfig::new(dt);
    cfg.nu = nu;
    cfg.accumulator_exponent = accumulator_exponent;
    cfg.tracked_exponents = tracked;
    cfg.snapshot_stride = snapshot_stride;
    solve(rho0, u, t_final, &cfg).map_err(core_err)
}

/// Accumulator value at each snapshot time.
pub fn snapshot_accumulators(traj: &Trajectory) -> Vec<f64> {
    traj.times
        .iter()
        .map(|t| {
            let k = traj
                .step_times
                .iter()
                .position(|s| (s - t).abs() <= 1e-12)
                .expect("snapshot times are step times");
            traj.accumulator[k]
        })
        .collect()
}

/// 90° rotation of a field: same norms (hence same mixing ratio), different
/// orientation relative to the flow.
pub fn rotate_quarter(f: &ScalarField) -> ScalarField {
    let grid = *f.grid();
    let n = grid.points_per_axis();
    let mut values = vec![0.0; grid.len()];
    for j1 in 0..n {
        for j0 in 0..n {
            // (x₁, x₂) ← old (x₂, Λ − x₁)
            let src = ((n - j0) % n) * n + j1;
            values[j1 * n + j0] = f.values()[src];
        }
    }
    ScalarField::from_values(grid, values).expect("finite")
}
