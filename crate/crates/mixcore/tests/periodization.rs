//! Period-doubling convergence: for data supported well inside the torus,
//! norms and commutator scans are insensitive to doubling the period at fixed
//! resolution per unit length, which quantifies the periodization error of
//! the torus substitution.

use mixcore::commutator::{dl_commutator, shear_oracle};
use mixcore::flow::{FlowSpec, make_flow};
use mixcore::mollifier::make_gaussian;
use mixcore::{ScalarField, TorusGrid};

/// Compactly supported wave packet, identical physical content on any torus
/// large enough to hold it: Gaussian envelope (dead by |x̃| ≈ 12) times a
/// fixed-physical-wavenumber carrier.
fn packet_on(grid: &TorusGrid) -> ScalarField {
    let half = grid.period() / 2.0;
    ScalarField::from_fn(*grid, |x| {
        let cx = x[0] - half;
        let cy = x[1] - half;
        (-(cx * cx + cy * cy) / 8.0).exp() * (1.5 * cx + 0.7 * cy).cos()
    })
    .unwrap()
}

#[test]
fn lp_norms_stable_under_period_doubling() {
    let g1 = TorusGrid::new(2, 128, 32.0).unwrap();
    let g2 = TorusGrid::new(2, 256, 64.0).unwrap();
    let f1 = packet_on(&g1);
    let f2 = packet_on(&g2);
    for p in [1.0, 2.0, 4.0, f64::INFINITY] {
        let a = f1.lp_norm(p).unwrap();
        let b = f2.lp_norm(p).unwrap();
        assert!(
            (a - b).abs() <= 1e-8 * a,
            "p={p}: {a} vs {b} under period doubling"
        );
    }
}

#[test]
fn commutator_norms_stable_under_period_doubling() {
    let phi = make_gaussian();
    let mut norms = Vec::new();
    for (n, period) in [(256usize, 32.0f64), (512, 64.0)] {
        let grid = TorusGrid::new(2, n, period).unwrap();
        let u = make_flow(&FlowSpec::PeriodizedShear, &grid).unwrap();
        let rho = packet_on(&grid);
        let r = dl_commutator(u.frame(0), &rho, &phi, 0.4).unwrap();
        norms.push(r.lp_norm(2.0).unwrap());
    }
    let rel = (norms[0] - norms[1]).abs() / norms[0];
    assert!(rel <= 1e-8, "commutator norm moved under period doubling: {rel}");
}

#[test]
fn oracle_agreement_survives_period_doubling() {
    // the periodized shear's linear-region contract needs n >= 256
    let phi = make_gaussian();
    for (n, period) in [(256usize, 32.0f64), (512, 64.0)] {
        let grid = TorusGrid::new(2, n, period).unwrap();
        let u = make_flow(&FlowSpec::PeriodizedShear, &grid).unwrap();
        let rho = packet_on(&grid);
        let d = 0.5;
        let oracle = shear_oracle(&rho, &phi, d).unwrap();
        let dl = dl_commutator(u.frame(0), &rho, &phi, d).unwrap();
        let rel = dl.sub(&oracle).unwrap().lp_norm(2.0).unwrap()
            / oracle.lp_norm(2.0).unwrap();
        assert!(rel <= 1e-8, "period {period}: oracle deviation {rel}");
    }
}
