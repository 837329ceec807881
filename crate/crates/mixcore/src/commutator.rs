//! Transport commutators: the generalized kernel commutator
//! R = u·(ρ*∇K) − ∇·((uρ)*K), its DiPerna-Lions specialization R_δ with
//! K = φ_δ, log-averaged integrals in δ, δ-scans with decay envelopes, the
//! linear-shear multiplier oracle, and the no-uniform-decay counterexample
//! machinery (per-band rescaled evaluation).

use alloc::vec;
use alloc::vec::Vec;

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::fft::{FftPlan, forward_nd};
use crate::field::ScalarField;
use crate::flow::DEFAULT_DEALIAS_FRACTION;
use crate::grid::TorusGrid;
use crate::kernel::{KernelSpec, log_averaged_kernel, rescale};
use crate::mollifier::{Mollifier, RadialProfile};
use crate::quad::{LogQuadrature, log_spaced, log_trapezoid};

/// R = u·(ρ*∇K) − ∇·((uρ)*K), computed spectrally with 2/3-rule dealiasing
/// of both products. `u_frame` is one steady velocity frame (dim components).
pub fn kernel_commutator(
    u_frame: &[ScalarField],
    rho: &ScalarField,
    kernel: &KernelSpec,
) -> Result<ScalarField> {
    let grid = *rho.grid();
    if u_frame.len() != grid.dim() || u_frame.iter().any(|c| *c.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    let n = grid.points_per_axis();
    let plan = FftPlan::new(n);
    let limit = grid.dealias_mode(DEFAULT_DEALIAS_FRACTION);
    let nyq = grid.nyquist_mode();

    let mut ksym = vec![0.0f64; grid.len()];
    grid.for_each_mode(|i, _, xi| ksym[i] = kernel.symbol(xi));

    // i ξ_a with Nyquist zeroed, and the dealias mask
    let mut ik = vec![vec![Complex::ZERO; grid.len()]; grid.dim()];
    let mut keep = vec![true; grid.len()];
    grid.for_each_mode(|i, k, xi| {
        keep[i] = k[0].abs() <= limit && (grid.dim() == 1 || k[1].abs() <= limit);
        for (axis, tab) in ik.iter_mut().enumerate() {
            tab[i] =
                if k[axis] == nyq { Complex::ZERO } else { Complex::new(0.0, xi[axis]) };
        }
    });

    let len = grid.len();
    let mut out = vec![Complex::ZERO; len];
    let mut work = vec![Complex::ZERO; len];
    for axis in 0..grid.dim() {
        // ρ * ∂_a K in physical space
        for i in 0..len {
            work[i] = rho.spectrum()[i] * ik[axis][i].scale(ksym[i]);
        }
        crate::fft::inverse_nd(&mut work, n, grid.dim(), &plan);
        // u_a ⊙ (ρ*∂_a K), dealiased
        let ua = u_frame[axis].values();
        for i in 0..len {
            work[i] = Complex::real(work[i].re * ua[i]);
        }
        forward_nd(&mut work, n, grid.dim(), &plan);
        for i in 0..len {
            if keep[i] {
                out[i] += work[i];
            }
        }
        // ∂_a ((u_a ρ) * K), dealiased
        for i in 0..len {
            work[i] = Complex::real(rho.values()[i] * ua[i]);
        }
        forward_nd(&mut work, n, grid.dim(), &plan);
        for i in 0..len {
            if keep[i] {
                out[i] = out[i] - ik[axis][i].scale(ksym[i]) * work[i];
            }
        }
    }
    Ok(ScalarField::from_spectrum_unchecked(grid, out))
}

/// DiPerna-Lions commutator R_δ(u, ρ) = u·∇(ρ*φ_δ) − ∇·((uρ)*φ_δ).
pub fn dl_commutator(
    u_frame: &[ScalarField],
    rho: &ScalarField,
    phi: &Mollifier,
    delta: f64,
) -> Result<ScalarField> {
    kernel_commutator(u_frame, rho, &rescale(phi, delta)?)
}

/// ∫_{lo}^{hi} R_δ dδ/δ computed through the log-averaged kernel (the
/// algebraic rewriting of the integral as one kernel commutator).
pub fn integrated_commutator(
    u_frame: &[ScalarField],
    rho: &ScalarField,
    phi: &Mollifier,
    delta_lo: f64,
    delta_hi: f64,
) -> Result<ScalarField> {
    kernel_commutator(u_frame, rho, &log_averaged_kernel(phi, delta_lo, delta_hi)?)
}

/// The same integral evaluated the direct way: Gauss–Legendre quadrature in
/// log δ of the commutator fields themselves. Kept as the independent route
/// for cross-checking [`integrated_commutator`]; the two discretize the δ
/// integral differently and agree only because both converge.
pub fn integrated_commutator_quadrature(
    u_frame: &[ScalarField],
    rho: &ScalarField,
    phi: &Mollifier,
    delta_lo: f64,
    delta_hi: f64,
    nodes: usize,
) -> Result<ScalarField> {
    if !(delta_lo > 0.0 && delta_lo < delta_hi) {
        return Err(Error::InvalidScale("quadrature needs 0 < delta_lo < delta_hi"));
    }
    let rule = LogQuadrature::new(delta_lo, delta_hi, nodes);
    let mut acc = ScalarField::zero(*rho.grid());
    for (&d, &w) in rule.deltas.iter().zip(rule.weights.iter()) {
        let r = dl_commutator(u_frame, rho, phi, d)?;
        acc = acc.linear_combination(1.0, &r, w)?;
    }
    Ok(acc)
}

/// Half-width of the region where the periodized shear is exactly linear.
pub fn shear_linear_half_width(grid: &TorusGrid) -> f64 {
    3.0 * grid.period() / 8.0
}

/// For the linear shear u = (x₂, 0) the commutator is the convolution
/// ρ * K_δ with K̂(ξ) = −ξ₁ ∂φ̂/∂ξ₂(ξ); this evaluates that multiplier
/// directly. Valid only for ρ supported (in x₂) inside the exactly-linear
/// region of the periodized shear; violations are rejected.
pub fn shear_oracle(
    rho: &ScalarField,
    phi: &Mollifier,
    delta: f64,
) -> Result<ScalarField> {
    let grid = *rho.grid();
    if grid.dim() != 2 {
        return Err(Error::InvalidGrid("shear oracle needs dim 2"));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidScale("shear oracle needs delta > 0"));
    }
    let half = shear_linear_half_width(&grid);
    let sup = rho.lp_norm(f64::INFINITY)?;
    let n = grid.points_per_axis();
    let mut outside = 0.0f64;
    for j1 in 0..n {
        if libm::fabs(grid.centered_coord(j1)) > half {
            for j0 in 0..n {
                outside = outside.max(libm::fabs(rho.values()[j1 * n + j0]));
            }
        }
    }
    if sup > 0.0 && outside > 1e-8 * sup {
        return Err(Error::Precondition(
            "density not supported in the exactly-linear shear region",
        ));
    }
    let spec = rescale(phi, delta)?;
    let table = crate::field::sample_real_symbol(&grid, |xi| shear_kernel_symbol(&spec, xi));
    rho.apply_table(&table)
}

/// K̂_δ(ξ) for the shear kernel K = ∂(x₂ φ)/∂x₁: −ξ₁ ξ₂ F'(|ξ|)/|ξ| with
/// F the radial symbol of φ_δ. This is the (i, j) = (0, 1) derived kernel.
fn shear_kernel_symbol(spec: &KernelSpec, xi: [f64; 2]) -> f64 {
    let s = libm::hypot(xi[0], xi[1]);
    if s == 0.0 {
        return 0.0;
    }
    -xi[0] * xi[1] * spec.radial_slope(s).expect("radial kind") / s
}

/// Value of K̂ at a point for a plain (unscaled) mollifier; used by the
/// counterexample bounds.
pub fn shear_symbol_at(phi: &Mollifier, xi: [f64; 2]) -> f64 {
    let s = libm::hypot(xi[0], xi[1]);
    if s == 0.0 { 0.0 } else { -xi[0] * xi[1] * phi.profile_slope(s) / s }
}

/// δ-indexed record of ‖R_δ‖_{L^r} with fitted decay envelopes.
#[derive(Debug, Clone)]
pub struct CommutatorScan {
    pub deltas: Vec<f64>,
    pub norms: Vec<f64>,
    pub r: f64,
    /// C_s · δ with C_s = max norm/δ over the scan.
    pub envelope_small: Vec<f64>,
    /// C_l / δ with C_l = max norm·δ over the scan.
    pub envelope_large: Vec<f64>,
}

/// Scans ‖R_δ(u, ρ)‖_{L^r} over log-spaced δ.
pub fn scan_dl_commutator(
    u_frame: &[ScalarField],
    rho: &ScalarField,
    phi: &Mollifier,
    delta_lo: f64,
    delta_hi: f64,
    per_decade: usize,
    r: f64,
) -> Result<CommutatorScan> {
    if !(delta_lo > 0.0 && delta_lo < delta_hi) {
        return Err(Error::InvalidScale("scan needs 0 < delta_lo < delta_hi"));
    }
    let deltas = log_spaced(delta_lo, delta_hi, per_decade);
    let mut norms = Vec::with_capacity(deltas.len());
    for &d in &deltas {
        norms.push(dl_commutator(u_frame, rho, phi, d)?.lp_norm(r)?);
    }
    let c_small =
        deltas.iter().zip(norms.iter()).map(|(&d, &n)| n / d).fold(0.0f64, f64::max);
    let c_large =
        deltas.iter().zip(norms.iter()).map(|(&d, &n)| n * d).fold(0.0f64, f64::max);
    let envelope_small = deltas.iter().map(|&d| c_small * d).collect();
    let envelope_large = deltas.iter().map(|&d| c_large / d).collect();
    Ok(CommutatorScan { deltas, norms, r, envelope_small, envelope_large })
}

/// inf over a δ-window of the scanned norms.
pub fn min_window_norm(scan: &CommutatorScan, window: (f64, f64)) -> Result<f64> {
    let (lo, hi) = window;
    let mut min = f64::INFINITY;
    for (&d, &n) in scan.deltas.iter().zip(scan.norms.iter()) {
        if d >= lo && d <= hi {
            min = min.min(n);
        }
    }
    if min.is_infinite() { Err(Error::WindowOutsideScan) } else { Ok(min) }
}

/// (∫ ‖R_δ‖_{L^r}^q dδ/δ)^{1/q} by log-trapezoid quadrature over the range.
/// Requires at least 16 scan points per decade.
pub fn besov_commutator_integral(
    u_frame: &[ScalarField],
    rho: &ScalarField,
    phi: &Mollifier,
    q: f64,
    delta_lo: f64,
    delta_hi: f64,
    per_decade: usize,
    r: f64,
) -> Result<f64> {
    if !(delta_lo > 0.0 && delta_lo < delta_hi) {
        return Err(Error::EmptyRange("integral needs 0 < delta_lo < delta_hi"));
    }
    if per_decade < 16 {
        return Err(Error::Precondition("scan resolution must be >= 16 points per decade"));
    }
    if !(q >= 1.0) {
        return Err(Error::InvalidExponent("q must be >= 1"));
    }
    let scan = scan_dl_commutator(u_frame, rho, phi, delta_lo, delta_hi, per_decade, r)?;
    let powered: Vec<f64> = scan.norms.iter().map(|&v| libm::pow(v, q)).collect();
    Ok(libm::pow(log_trapezoid(&scan.deltas, &powered), 1.0 / q))
}

/// Parameters of the no-uniform-decay counterexample density
/// ρ(x) = Re Σ a_n e^{i δ_n^{-1} ξ̄·x} · χ with δ_n = 2^{−n²}, a_n = n^{−1/q}.
#[derive(Debug, Clone, Copy)]
pub struct CounterexampleSpec {
    xi_bar: [f64; 2],
    q: f64,
    n_max: usize,
    c1: f64,
    c2: f64,
}

impl CounterexampleSpec {
    pub fn new(xi_bar: [f64; 2], q: f64, n_max: usize, c1: f64, c2: f64) -> Result<Self> {
        let len = libm::hypot(xi_bar[0], xi_bar[1]);
        if !(len > 0.0 && len.is_finite()) {
            return Err(Error::Precondition("xi_bar must be a nonzero direction"));
        }
        if !(1.0..2.0).contains(&q) {
            return Err(Error::InvalidExponent("counterexample requires q in [1, 2)"));
        }
        if n_max < 1 {
            return Err(Error::EmptyRange("n_max must be >= 1"));
        }
        if !(0.0 < c1 && c1 < c2 && c2 < 2.0 * c1) {
            return Err(Error::InvalidScale("band constants must satisfy 0 < c1 < c2 < 2 c1"));
        }
        Ok(CounterexampleSpec {
            xi_bar: [xi_bar[0] / len, xi_bar[1] / len],
            q,
            n_max,
            c1,
            c2,
        })
    }

    pub fn xi_bar(&self) -> [f64; 2] {
        self.xi_bar
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn band(&self) -> (f64, f64) {
        (self.c1, self.c2)
    }

    /// δ_n = 2^{−n²}
    pub fn delta(&self, n: usize) -> f64 {
        libm::scalbn(1.0, -((n * n) as i32))
    }

    /// a_n = n^{−1/q}
    pub fn amplitude(&self, n: usize) -> f64 {
        libm::pow(n as f64, -1.0 / self.q)
    }
}

/// The smooth radial cutoff of the counterexample: 1 on |x̃| ≤ 3Λ/16,
/// 0 outside |x̃| ≤ Λ/4.
pub fn counterexample_cutoff(grid: &TorusGrid) -> Result<ScalarField> {
    let period = grid.period();
    let inner = 3.0 * period / 16.0;
    let step = period / 16.0;
    let half = period / 2.0;
    ScalarField::from_fn(*grid, |x| {
        let cx = x[0] - half;
        let cy = x[1] - half;
        let r = libm::hypot(cx, cy);
        RadialProfile::SmoothCutoff.value(1.0 + (r - inner) / step)
    })
}

#[derive(Debug, Clone, Copy)]
pub struct SnappedMode {
    pub n: usize,
    /// Requested wavenumber vector δ_n^{−1} ξ̄.
    pub target: [f64; 2],
    /// Nearest grid mode indices; the mode actually used.
    pub index: [i64; 2],
    pub actual: [f64; 2],
    pub amplitude: f64,
    /// True when the nearest grid mode degenerates to zero and the term is
    /// dropped.
    pub omitted: bool,
}

#[derive(Debug, Clone)]
pub struct CounterexampleDensity {
    pub field: ScalarField,
    pub modes: Vec<SnappedMode>,
}

/// Builds the counterexample density on a grid: each mode is snapped to the
/// nearest grid wavenumber (recorded); the Nyquist precondition is enforced
/// with the largest admissible n_max reported on violation.
pub fn counterexample_density(
    spec: &CounterexampleSpec,
    grid: &TorusGrid,
) -> Result<CounterexampleDensity> {
    let wave = counterexample_wave(spec, grid)?;
    let chi = counterexample_cutoff(grid)?;
    let values = wave
        .field
        .values()
        .iter()
        .zip(chi.values().iter())
        .map(|(a, b)| a * b)
        .collect();
    Ok(CounterexampleDensity {
        field: ScalarField::from_values(*grid, values)?,
        modes: wave.modes,
    })
}

/// The truncated mode sum without the cutoff.
pub fn counterexample_wave(
    spec: &CounterexampleSpec,
    grid: &TorusGrid,
) -> Result<CounterexampleDensity> {
    if grid.dim() != 2 {
        return Err(Error::InvalidGrid("counterexample density needs dim 2"));
    }
    let nyq = grid.nyquist_wavenumber();
    let mut admissible = 0usize;
    for n in 1..=spec.n_max {
        if 1.0 / spec.delta(n) < nyq {
            admissible = n;
        }
    }
    if admissible < spec.n_max {
        return Err(Error::NyquistViolation { max_admissible: admissible });
    }
    let base = 2.0 * core::f64::consts::PI / grid.period();
    let nyq_mode = grid.nyquist_mode();
    let mut modes = Vec::with_capacity(spec.n_max);
    for n in 1..=spec.n_max {
        let target = [spec.xi_bar[0] / spec.delta(n), spec.xi_bar[1] / spec.delta(n)];
        let k0 = libm::round(target[0] / base) as i64;
        let k1 = libm::round(target[1] / base) as i64;
        let omitted = (k0 == 0 && k1 == 0) || k0.abs() >= nyq_mode || k1.abs() >= nyq_mode;
        modes.push(SnappedMode {
            n,
            target,
            index: [k0, k1],
            actual: [k0 as f64 * base, k1 as f64 * base],
            amplitude: spec.amplitude(n),
            omitted,
        });
    }
    let half = grid.period() / 2.0;
    let kept: Vec<&SnappedMode> = modes.iter().filter(|m| !m.omitted).collect();
    let field = ScalarField::from_fn(*grid, |x| {
        let cx = x[0] - half;
        let cy = x[1] - half;
        kept.iter()
            .map(|m| m.amplitude * libm::cos(m.actual[0] * cx + m.actual[1] * cy))
            .sum()
    })?;
    Ok(CounterexampleDensity { field, modes })
}

/// One band of the divergence computation: the contribution of
/// δ ∈ δ_n [c₁, c₂] to ∫ (‖(ρχ)*K_δ‖₁ / ‖χ‖₁)^q dδ/δ, evaluated on a grid
/// rescaled so that mode n sits at a fixed reference wavenumber (the
/// commutator depends on δ and the modes only through their products, so the
/// rescaling is exact). Companion modes are placed where representable and
/// otherwise accounted analytically in `tail`.
#[derive(Debug, Clone)]
pub struct BandReport {
    pub n: usize,
    /// Computed band contribution (scale-invariant normalization by ‖χ‖₁).
    pub value: f64,
    /// The per-band lower bound (½ a_n ε − tail)·β, to the q-th power, times
    /// log(c₂/c₁); zero-clamped.
    pub lower_bound: f64,
    /// inf over the band of |K̂(s ξ̄)|.
    pub epsilon: f64,
    /// Worst-case interference of all other modes (placed or omitted).
    pub tail: f64,
    pub included: Vec<usize>,
    pub omitted: Vec<usize>,
}

/// Evaluates band n on its own rescaled grid. `points` is the grid size
/// (1024 resolves the reference mode with the χ spread), `quad_points` the
/// Gauss–Legendre count for the δ integral.
pub fn counterexample_band(
    spec: &CounterexampleSpec,
    phi: &Mollifier,
    n: usize,
    points: usize,
    quad_points: usize,
) -> Result<BandReport> {
    if n < 1 || n > spec.n_max {
        return Err(Error::EmptyRange("band index outside 1..=n_max"));
    }
    let grid = TorusGrid::new(2, points, 2.0 * core::f64::consts::PI)?;
    // reference diagonal index: mode n sits at (c̄, c̄)
    let reference = (points / 8) as i64;
    let nyq_margin = (points as i64) / 2 - points as i64 / 16;

    let mut included = Vec::new();
    let mut omitted = Vec::new();
    let mut placed: Vec<(usize, i64)> = Vec::new();
    for m in 1..=spec.n_max {
        // 2^{m²−n²} relative to the reference
        let shift = (m * m) as i32 - (n * n) as i32;
        let scaled = libm::scalbn(reference as f64, shift);
        if scaled >= 1.0 && scaled <= nyq_margin as f64 && scaled == libm::floor(scaled) {
            included.push(m);
            placed.push((m, scaled as i64));
        } else if m != n {
            omitted.push(m);
        } else {
            return Err(Error::NyquistViolation { max_admissible: n - 1 });
        }
    }

    let chi = counterexample_cutoff(&grid)?;
    let chi_l1 = chi.lp_norm(1.0)?;
    let half = grid.period() / 2.0;
    let placed_ref = &placed;
    let density = ScalarField::from_fn(grid, |x| {
        let cx = x[0] - half;
        let cy = x[1] - half;
        placed_ref
            .iter()
            .map(|&(m, c)| spec.amplitude(m) * libm::cos(c as f64 * (cx + cy)))
            .sum()
    })?;
    let density = ScalarField::from_values(
        grid,
        density
            .values()
            .iter()
            .zip(chi.values().iter())
            .map(|(a, b)| a * b)
            .collect(),
    )?;

    // the reference mode has |κ| = c̄·√2; band δ' = s/|κ_n|
    let kappa_n = reference as f64 * libm::sqrt(2.0);
    let (c1, c2) = spec.band();
    let rule = LogQuadrature::new(c1, c2, quad_points);
    let mut value = 0.0;
    for (&s, &w) in rule.deltas.iter().zip(rule.weights.iter()) {
        let delta = s / kappa_n;
        let kspec = rescale(phi, delta)?;
        let table =
            crate::field::sample_real_symbol(&grid, |xi| shear_kernel_symbol(&kspec, xi));
        let conv = density.apply_table(&table)?;
        let l1 = conv.lp_norm(1.0)? / chi_l1;
        value += w * libm::pow(l1, spec.q);
    }

    // ε = inf over the band of |K̂(s ξ̄)| along the diagonal direction
    let diag = [core::f64::consts::FRAC_1_SQRT_2, core::f64::consts::FRAC_1_SQRT_2];
    let mut epsilon = f64::INFINITY;
    for &s in log_spaced(c1, c2, 2048).iter() {
        epsilon = epsilon.min(libm::fabs(shear_symbol_at(phi, [s * diag[0], s * diag[1]])));
    }

    // worst-case response of every other mode over the band
    let mut tail = 0.0;
    for m in 1..=spec.n_max {
        if m == n {
            continue;
        }
        let shift = (m * m) as i32 - (n * n) as i32;
        let mut worst = 0.0f64;
        for &s in log_spaced(c1, c2, 256).iter() {
            let arg = libm::scalbn(s, shift);
            worst = worst
                .max(libm::fabs(shear_symbol_at(phi, [arg * diag[0], arg * diag[1]])));
        }
        tail += spec.amplitude(m) * worst;
    }

    // β: fraction of ‖χ‖₁ carried by the χ ≡ 1 core, shrunk by the kernel
    // reach at the widest band scale
    let reach = 20.0 * c2 / kappa_n;
    let core_radius = 3.0 * grid.period() / 16.0 - reach;
    let mut core_area = 0.0;
    grid.for_each_point(|_, x| {
        let cx = x[0] - half;
        let cy = x[1] - half;
        if libm::hypot(cx, cy) <= core_radius {
            core_area += 1.0;
        }
    });
    core_area *= grid.cell_volume();
    let beta = core_area / chi_l1;

    let an = spec.amplitude(n);
    let inner = (0.5 * an * epsilon - tail).max(0.0) * beta;
    let lower_bound = libm::pow(inner, spec.q) * libm::log(c2 / c1);

    Ok(BandReport { n, value, lower_bound, epsilon, tail, included, omitted })
}
