//! Cross-module invariants: scaling identities, grid-refinement stability,
//! and the unitarity bookkeeping between the two angular-average routes.

use rrlab_core::dynamics::{solve_trajectory, GridSpec, Motion};
use rrlab_core::potential::{Potential, PotentialSpec};
use rrlab_core::radiation::{
    emission_probability_with_angular_factor, polarization_solid_angle_average,
};
use rrlab_core::spectral::{fourier_acceleration, FreqGridSpec};
use rrlab_core::PhysicalConstants;

fn natural() -> PhysicalConstants {
    PhysicalConstants::natural_units()
}

/// Worst-case pulse mismatch between a_p(t) and a_{kp}(t/k), relative to the
/// pulse maximum.
fn scaling_residual(v_inf: f64, k: f64) -> f64 {
    let consts = natural();
    let pot = PotentialSpec::smoothstep(v_inf, 1.0);
    let base = solve_trajectory(&consts, &pot, 0.1, 5.0, GridSpec::default()).unwrap();
    let scaled = Motion::new(&consts, &pot, 0.1 * k, 5.0).unwrap();
    let a_max = base.a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut worst = 0.0f64;
    for j in 0..base.len() {
        if base.a[j].abs() < 1e-6 * a_max {
            continue;
        }
        let z_scaled = scaled.z_of_t(base.t[j] / k);
        let a_scaled = -pot.eval(z_scaled).vp / consts.m;
        worst = worst.max((a_scaled - base.a[j]).abs());
    }
    worst / a_max
}

#[test]
fn acceleration_scaling_identity_first_order_in_v() {
    // the identity a(kp, t/k) = a(p, t) is exact for free flight and holds
    // to first order in V: its residual must scale linearly with V₋∞
    let strong = scaling_residual(5e-4, 1.01);
    let half = scaling_residual(2.5e-4, 1.01);
    let ratio = strong / half;
    assert!(
        (1.8..2.2).contains(&ratio),
        "residual should halve with V: ratio {ratio}"
    );
    // and is within 1e-4 once the ramp is weak enough
    assert!(scaling_residual(2e-5, 1.01) < 1e-4);
}

#[test]
fn spectrum_stable_under_grid_refinement() {
    let consts = natural();
    let pot = PotentialSpec::smoothstep(5e-4, 1.0);
    let grid = FreqGridSpec {
        omega_max: Some(40.0),
        n_per_side: Some(8192),
    };
    let spectrum = |n: usize| {
        let traj = solve_trajectory(
            &consts,
            &pot,
            0.1,
            5.0,
            GridSpec {
                n,
                pad_factor: 10.0,
            },
        )
        .unwrap();
        fourier_acceleration(&traj, grid).unwrap()
    };
    let coarse = spectrum(1 << 14);
    let fine = spectrum(1 << 15);
    let peak = coarse.a_hat.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for (a, b) in coarse.a_hat.iter().zip(&fine.a_hat) {
        worst = worst.max((a - b).norm());
    }
    assert!(worst <= 1e-6 * peak, "grid halving moved â by {worst:e}");
}

#[test]
fn a_hat_zero_equals_potential_drop_over_momentum() {
    let consts = natural();
    let pot = PotentialSpec::smoothstep(5e-4, 1.0);
    let traj = solve_trajectory(&consts, &pot, 0.1, 5.0, GridSpec::default()).unwrap();
    let spec = fourier_acceleration(&traj, FreqGridSpec::default()).unwrap();
    // â(0) = ∫a dt = v_f - v_i to quadrature accuracy
    let dv = traj.v_f - traj.v_i;
    assert!(
        (spec.a_hat_zero().re - dv).abs() <= 1e-10 * dv,
        "â(0) = {} vs Δv = {dv}",
        spec.a_hat_zero().re
    );
    assert!(spec.a_hat_zero().im.abs() < 1e-18);

    let first_order = 5e-4 / 0.1;
    let x = 2.0 * consts.m * 5e-4 / (0.1 * 0.1);
    let dev = (spec.a_hat_zero().re - first_order).abs() / first_order;
    // v_f - v_i deviates from V₋∞/p̄ at second order in V
    assert!(dev < 0.3 * x, "deviation {dev} vs first-order scale {x}");
    assert!(dev > 0.01 * x);
}

#[test]
fn emission_probability_angular_routes_agree() {
    // 2 Im F = emission probability: the polarization route and the
    // indefinite-metric route insert different angular averages, both 2/3
    let consts = natural();
    let pot = PotentialSpec::smoothstep(5e-4, 1.0);
    let traj = solve_trajectory(&consts, &pot, 0.1, 5.0, GridSpec::default()).unwrap();
    let spec = fourier_acceleration(&traj, FreqGridSpec::default()).unwrap();
    let (avg_eps, avg_kz) = polarization_solid_angle_average(64);
    let p_eps = emission_probability_with_angular_factor(&consts, &spec, 1e-6, avg_eps).unwrap();
    let p_kz = emission_probability_with_angular_factor(&consts, &spec, 1e-6, avg_kz).unwrap();
    assert!(
        (p_eps - p_kz).abs() <= 1e-6 * p_eps,
        "routes differ by {:e}",
        (p_eps - p_kz).abs() / p_eps
    );
}
