//! Commutator-decay experiments: range independence of the integrated
//! commutator, the Besov-type integral decay, the compactness window, and the
//! two sharpness counterexamples on the periodized linear shear.

use mixcore::commutator::{
    CounterexampleSpec, counterexample_band, counterexample_cutoff, dl_commutator,
    integrated_commutator, integrated_commutator_quadrature, min_window_norm, scan_dl_commutator,
    shear_oracle, shear_symbol_at,
};
use mixcore::corpus::random_band_limited;
use mixcore::exponents::ExponentTriple;
use mixcore::flow::{FlowSpec, make_flow};
use mixcore::mollifier::{make_frequency_cutoff, make_gaussian};
use mixcore::{ScalarField, TorusGrid};

use crate::config::Config;
use crate::experiments::common::*;
use crate::report::{ExperimentReport, FitRecord};

pub const INTEGRAL_KEYS: &[&str] =
    &["grid_n", "period", "p", "q", "data_modes", "corpus", "range_lo", "range_hi"];

/// Range independence of ‖∫ R_δ dδ/δ‖_r (and the quadrature/kernel identity),
/// plus the compactness-window minima.
pub fn run_integral(cfg: &Config, seed: u64) -> Result<ExperimentReport, ExpError> {
    cfg.check_keys(INTEGRAL_KEYS).map_err(|e| cfg_err(e.0))?;
    let mut report = ExperimentReport::new("commutator_integral", &cfg.digest(seed));

    let grid = grid_from(cfg, 256, 2.0 * std::f64::consts::PI)?;
    let p = cfg.get_f64("p", 4.0)?;
    let q = cfg.get_f64("q", 4.0)?;
    let triple = ExponentTriple::new(p, q).map_err(core_err)?;
    let corpus = cfg.get_usize("corpus", 4)?;
    let data_modes = cfg.get_usize("data_modes", 12)? as i64;
    let lo = cfg.get_f64("range_lo", 1e-2)?;
    let hi = cfg.get_f64("range_hi", 1.0)?;

    let u = make_flow(&FlowSpec::Cellular { amplitude: 1.0 }, &grid)?;
    let phi = make_gaussian();

    // zero velocity: everything vanishes
    let zero_u = [ScalarField::zero(grid), ScalarField::zero(grid)];
    let rho = random_band_limited(&grid, data_modes, seed.wrapping_add(10));
    let z = integrated_commutator(&zero_u, &rho, &phi, lo, hi)
        .map_err(core_err)?
        .lp_norm(triple.r())
        .map_err(core_err)?;
    report.check("zero_velocity_zero_integral", z <= 1e-13, format!("norm {z:e}"));

    let mut worst_route = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for i in 0..corpus {
        let rho = random_band_limited(&grid, data_modes, seed.wrapping_add(10 + i as u64));
        let narrow = integrated_commutator(u.frame(0), &rho, &phi, lo, hi).map_err(core_err)?;
        let narrow_norm = narrow.lp_norm(triple.r()).map_err(core_err)?;

        // algebraic identity: δ-quadrature of R_δ vs the log-averaged kernel
        let quad = integrated_commutator_quadrature(u.frame(0), &rho, &phi, lo, hi, 32)
            .map_err(core_err)?;
        let rel = quad.sub(&narrow).map_err(core_err)?.lp_norm(triple.r()).map_err(core_err)?
            / narrow_norm;
        worst_route = worst_route.max(rel);

        // widening the range from 2 to 4 decades
        let wide = integrated_commutator(u.frame(0), &rho, &phi, lo / 10.0, hi * 10.0)
            .map_err(core_err)?;
        let ratio = wide.lp_norm(triple.r()).map_err(core_err)? / narrow_norm;
        worst_ratio = worst_ratio.max(ratio);
        report.row("integral_norm_2dec", i as f64, narrow_norm);
        report.row("range_ratio_4dec_over_2dec", i as f64, ratio);
    }
    report.check(
        "quadrature_matches_kernel_route",
        worst_route <= 1e-6,
        format!("worst relative deviation {worst_route:.3e}"),
    );
    report.check(
        "integral_range_independent",
        worst_ratio <= 1.5,
        format!("worst 4-decade/2-decade ratio {worst_ratio:.4}"),
    );

    // compactness window: scanned minima shrink as the window grows
    let rho = random_band_limited(&grid, data_modes, seed.wrapping_add(30));
    let scan = scan_dl_commutator(u.frame(0), &rho, &phi, 1e-3, 1e-1, 16, 1.0)
        .map_err(core_err)?;
    let full = min_window_norm(&scan, (1e-3, 1e-1)).map_err(core_err)?;
    let small_end = scan.norms[0];
    report.check(
        "window_minimum_at_small_delta",
        full <= small_end + 1e-15,
        format!("min {full:.4e} vs norm at smallest delta {small_end:.4e}"),
    );
    let mut prev = f64::INFINITY;
    let mut shrinking = true;
    for hi_w in [3e-3, 1e-2, 3e-2, 1e-1] {
        let m = min_window_norm(&scan, (1e-3, hi_w)).map_err(core_err)?;
        if m > prev + 1e-15 {
            shrinking = false;
        }
        report.row("window_min", hi_w, m);
        prev = m;
    }
    report.check("window_minima_nonincreasing", shrinking, "inf over growing windows".into());

    Ok(report)
}

pub const BESOV_KEYS: &[&str] =
    &["grid_n", "period", "p", "q", "data_modes", "corpus", "range_lo", "range_hi", "per_decade"];

/// Besov-integral decay: (∫‖R_δ‖_r^q dδ/δ)^{1/q} at q = max(p, 2) is stable
/// under doubling the δ-range in both directions.
pub fn run_besov(cfg: &Config, seed: u64) -> Result<ExperimentReport, ExpError> {
    cfg.check_keys(BESOV_KEYS).map_err(|e| cfg_err(e.0))?;
    let mut report = ExperimentReport::new("besov_decay", &cfg.digest(seed));

    let grid = grid_from(cfg, 128, 2.0 * std::f64::consts::PI)?;
    let p = cfg.get_f64("p", 4.0)?;
    let qq = cfg.get_f64("q", 4.0)?;
    let triple = ExponentTriple::new(p, qq).map_err(core_err)?;
    let q_int = p.max(2.0);
    let corpus = cfg.get_usize("corpus", 3)?;
    let data_modes = cfg.get_usize("data_modes", 8)? as i64;
    let lo = cfg.get_f64("range_lo", 3e-3)?;
    let hi = cfg.get_f64("range_hi", 3.0)?;
    let per_decade = cfg.get_usize("per_decade", 16)?;

    let u = make_flow(&FlowSpec::Cellular { amplitude: 1.0 }, &grid)?;
    let phi = make_gaussian();

    let zero_u = [ScalarField::zero(grid), ScalarField::zero(grid)];
    let rho = random_band_limited(&grid, data_modes, seed.wrapping_add(40));
    let z = mixcore::commutator::besov_commutator_integral(
        &zero_u,
        &rho,
        &phi,
        q_int,
        lo,
        hi,
        per_decade,
        triple.r(),
    )
    .map_err(core_err)?;
    report.check("zero_velocity_zero_integral", z <= 1e-13, format!("value {z:e}"));

    let mut worst = 0.0f64;
    for i in 0..corpus {
        let rho = random_band_limited(&grid, data_modes, seed.wrapping_add(41 + i as u64));
        let mid = mixcore::commutator::besov_commutator_integral(
            u.frame(0),
            &rho,
            &phi,
            q_int,
            lo,
            hi,
            per_decade,
            triple.r(),
        )
        .map_err(core_err)?;
        let wide = mixcore::commutator::besov_commutator_integral(
            u.frame(0),
            &rho,
            &phi,
            q_int,
            lo / 10.0,
            hi * 10.0,
            per_decade,
            triple.r(),
        )
        .map_err(core_err)?;
        let dev = (wide / mid - 1.0).abs();
        worst = worst.max(dev);
        report.row("besov_integral", i as f64, mid);
        report.row("besov_integral_widened", i as f64, wide);
    }
    report.check(
        "stable_under_range_doubling",
        worst <= 0.1,
        format!("worst relative change {worst:.4}"),
    );

    Ok(report)
}

pub const PART1_KEYS: &[&str] = &["grid_n", "period", "s0", "decades", "points", "c_lo"];

/// No uniform decay: the single-mode densities keep ‖R_δ‖₁ above the floor
/// 0.5·|K̂(ξ̄)|·‖χ‖₁ across two decades of δ.
pub fn run_counterexample_part1(cfg: &Config, seed: u64) -> Result<ExperimentReport, ExpError> {
    cfg.check_keys(PART1_KEYS).map_err(|e| cfg_err(e.0))?;
    let mut report = ExperimentReport::new("counterexample_part1", &cfg.digest(seed));

    let n = cfg.get_usize("grid_n", 2048)?;
    let grid = TorusGrid::new(2, n, 2.0 * std::f64::consts::PI).map_err(core_err)?;
    let s0 = cfg.get_f64("s0", 1.5)?;
    let points = cfg.get_usize("points", 10)?;

    let phi = make_gaussian();
    let diag = std::f64::consts::FRAC_1_SQRT_2;
    let xi_bar = [s0 * diag, s0 * diag];
    let k_hat = shear_symbol_at(&phi, xi_bar).abs();
    report.row("k_hat_at_xi_bar", s0, k_hat);
    if k_hat <= 0.0 {
        return Err(cfg_err("chose xi_bar with K(xi_bar) = 0; pick another direction".into()));
    }

    let chi = counterexample_cutoff(&grid).map_err(core_err)?;
    let chi_l1 = chi.lp_norm(1.0).map_err(core_err)?;
    let floor = 0.5 * k_hat * chi_l1;

    let u = make_flow(&FlowSpec::PeriodizedShear, &grid)?;
    let half = grid.period() / 2.0;

    // integer diagonal mode indices covering two decades of delta
    let c_lo = cfg.get_f64("c_lo", 6.0)?;
    let c_hi = c_lo * 10f64.powf(cfg.get_f64("decades", 2.0)?);
    let cs: Vec<i64> = (0..points)
        .map(|i| {
            (c_lo * (c_hi / c_lo).powf(i as f64 / (points - 1) as f64)).round() as i64
        })
        .collect();

    let mut min_ratio = f64::INFINITY;
    for (i, &c) in cs.iter().enumerate() {
        let kappa = c as f64 * std::f64::consts::SQRT_2;
        let delta = s0 / kappa;
        let rho = ScalarField::from_values(
            grid,
            chi.values()
                .iter()
                .enumerate()
                .map(|(idx, &w)| {
                    let j0 = idx % n;
                    let j1 = idx / n;
                    let cx = grid.coord(j0) - half;
                    let cy = grid.coord(j1) - half;
                    w * (c as f64 * (cx + cy)).cos()
                })
                .collect(),
        )
        .map_err(core_err)?;
        let r = shear_oracle(&rho, &phi, delta).map_err(core_err)?;
        let l1 = r.lp_norm(1.0).map_err(core_err)?;
        let ratio = l1 / floor;
        min_ratio = min_ratio.min(ratio);
        report.row("commutator_l1_over_floor", delta, ratio);

        // spot-check the oracle against the honest dealiased commutator, at
        // small enough delta that the mollifier reach stays inside the
        // support margin and the mode sits clear of the dealias boundary
        if i == points / 2 || i == (3 * points) / 4 {
            let dl = dl_commutator(u.frame(0), &rho, &phi, delta).map_err(core_err)?;
            let dev = dl.sub(&r).map_err(core_err)?.lp_norm(1.0).map_err(core_err)? / l1;
            report.check(
                &format!("oracle_matches_dl_at_c{c}"),
                dev <= 1e-6,
                format!("relative deviation {dev:.3e}"),
            );
        }
    }
    report.check(
        "positive_floor_across_two_decades",
        min_ratio >= 1.0,
        format!("min |R_delta|_1 / floor = {min_ratio:.4} (floor = 0.5 |K(xi_bar)| |chi|_1)"),
    );

    Ok(report)
}

pub const PART2_KEYS: &[&str] =
    &["q", "n_max", "c1", "c2", "band_points", "quad_points", "bands_from"];

/// Divergence of the Besov integral on the lacunary density: per-band lower
/// bounds and a running sum growing by at least 20% per band.
pub fn run_counterexample_part2(cfg: &Config, seed: u64) -> Result<ExperimentReport, ExpError> {
    cfg.check_keys(PART2_KEYS).map_err(|e| cfg_err(e.0))?;
    let mut report = ExperimentReport::new("counterexample_part2", &cfg.digest(seed));

    let q = cfg.get_f64("q", 1.0)?;
    let n_max = cfg.get_usize("n_max", 4)?;
    let c1 = cfg.get_f64("c1", 1.3)?;
    let c2 = cfg.get_f64("c2", 1.7)?;
    let band_points = cfg.get_usize("band_points", 1024)?;
    let quad_points = cfg.get_usize("quad_points", 16)?;
    let bands_from = cfg.get_usize("bands_from", 2)?;

    let spec = CounterexampleSpec::new([1.0, 1.0], q, n_max, c1, c2).map_err(core_err)?;
    let phi = make_frequency_cutoff();

    // divergence hypothesis bookkeeping: partial sums of a_n^q are harmonic
    let h: f64 = (1..=n_max).map(|m| spec.amplitude(m).powf(q)).sum();
    report.row("sum_a_q", n_max as f64, h);

    let mut running = 0.0;
    let mut prev_running: Option<f64> = None;
    let mut all_bounds = true;
    let mut all_growth = true;
    for nb in bands_from..=n_max {
        let band = counterexample_band(&spec, &phi, nb, band_points, quad_points)
            .map_err(core_err)?;
        running += band.value;
        let bound_ok = band.value >= band.lower_bound && band.lower_bound > 0.0;
        all_bounds &= bound_ok;
        report.check(
            &format!("band_{nb}_above_lower_bound"),
            bound_ok,
            format!(
                "value {:.4e} >= bound {:.4e} (eps {:.3}, tail {:.2e})",
                band.value, band.lower_bound, band.epsilon, band.tail
            ),
        );
        if let Some(prev) = prev_running {
            let growth = running / prev;
            let ok = growth >= 1.2;
            all_growth &= ok;
            report.check(
                &format!("running_sum_grows_band_{nb}"),
                ok,
                format!("growth factor {growth:.3}"),
            );
        }
        report.row("band_value", nb as f64, band.value);
        report.row("running_sum", nb as f64, running);
        prev_running = Some(running);
    }
    report.check("all_band_bounds_hold", all_bounds, format!("bands {bands_from}..={n_max}"));
    report.check("divergent_growth", all_growth, ">= 20% per added band".into());
    report.fit(FitRecord {
        name: "running_sum_final".into(),
        constant: running,
        residual: 0.0,
        r2: 1.0,
    });

    Ok(report)
}
