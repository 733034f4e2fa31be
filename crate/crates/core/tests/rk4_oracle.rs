//! Independent RK4 integration of m z̈ = -V'(z), checked against the
//! energy-integral trajectory solver.

use rrlab_core::dynamics::{solve_trajectory, GridSpec};
use rrlab_core::potential::{CompositePotential, Potential, PotentialSpec};
use rrlab_core::PhysicalConstants;

/// Classic fourth-order Runge-Kutta for the system (z' = v, v' = -V'(z)/m),
/// stepped backwards from the t = 0 anchor.
fn rk4_backward<P: Potential>(
    consts: &PhysicalConstants,
    pot: &P,
    z0: f64,
    v0: f64,
    t_grid: &[f64],
    substeps: usize,
) -> Vec<(f64, f64)> {
    let m = consts.m;
    let accel = |z: f64| -pot.eval(z).vp / m;
    let mut states = vec![(z0, v0)];
    let mut z = z0;
    let mut v = v0;
    for w in t_grid.windows(2).rev() {
        let dt = (w[0] - w[1]) / substeps as f64; // negative
        for _ in 0..substeps {
            let k1z = v;
            let k1v = accel(z);
            let k2z = v + 0.5 * dt * k1v;
            let k2v = accel(z + 0.5 * dt * k1z);
            let k3z = v + 0.5 * dt * k2v;
            let k3v = accel(z + 0.5 * dt * k2z);
            let k4z = v + dt * k3v;
            let k4v = accel(z + dt * k3z);
            z += dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
            v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
        states.push((z, v));
    }
    states.reverse();
    states
}

fn check_against_rk4<P: Potential>(consts: &PhysicalConstants, pot: &P, p: f64, z0: f64) {
    let traj = solve_trajectory(consts, pot, p, z0, GridSpec::default()).unwrap();
    let states = rk4_backward(consts, pot, traj.z0, traj.v_f, &traj.t, 4);
    assert_eq!(states.len(), traj.len());
    let mut worst_z = 0.0f64;
    let mut worst_v = 0.0f64;
    for (k, &(z, v)) in states.iter().enumerate() {
        worst_z = worst_z.max((z - traj.z[k]).abs());
        worst_v = worst_v.max((v - traj.v[k]).abs());
    }
    assert!(worst_z < 1e-8, "max |Δz| = {worst_z:e}");
    assert!(worst_v < 1e-9, "max |Δv| = {worst_v:e}");
}

#[test]
fn standard_run_matches_rk4() {
    let consts = PhysicalConstants::natural_units();
    let pot = PotentialSpec::smoothstep(5e-4, 1.0);
    check_against_rk4(&consts, &pot, 0.1, 5.0);
}

#[test]
fn strong_ramp_matches_rk4() {
    let consts = PhysicalConstants::natural_units();
    let pot = PotentialSpec::smoothstep(2e-3, 1.0);
    check_against_rk4(&consts, &pot, 0.1, 5.0);
}

#[test]
fn symmetric_well_matches_rk4() {
    let consts = PhysicalConstants::natural_units();
    let well = CompositePotential::symmetric_bump(-5e-4, 1.0, 6.0);
    check_against_rk4(&consts, &well, 0.1, 10.0);
}

#[test]
fn off_center_ramp_matches_rk4() {
    let consts = PhysicalConstants::natural_units();
    let pot = PotentialSpec::new(1e-3, 0.5, rrlab_core::RampShape::SmoothstepC2, -2.0);
    check_against_rk4(&consts, &pot, 0.08, 3.0);
}
