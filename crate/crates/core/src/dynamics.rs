//! Unperturbed 1-D classical motion: v_p(z), the t ↔ z maps, uniform-grid
//! trajectories, and ∂v_p/∂p.
//!
//! The trajectory is built from the energy integral t(z) = ∫ dz'/v_p(z'),
//! tabulated over the ramp and inverted by monotone Hermite interpolation.
//! An independent RK4 stepper lives in the test suite as the oracle.

use crate::constants::PhysicalConstants;
use crate::csvio;
use crate::numerics::{cumulative_uniform, gauss_legendre};
use crate::potential::Potential;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("turning point: p^2 = {p2:e} does not exceed 2 m sup V = {barrier:e}")]
    TurningPoint { p2: f64, barrier: f64 },
    #[error("initial position z0 = {z0} must lie past the ramp (z > {support_hi})")]
    StartInsideRamp { z0: f64, support_hi: f64 },
    #[error("momentum must be strictly positive, got {0}")]
    NonPositiveMomentum(f64),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("time {t} is outside the trajectory grid [{lo}, {hi}]")]
    OutOfGrid { t: f64, lo: f64, hi: f64 },
}

/// Number of panels in the ramp-region t(z) table.
const RAMP_PANELS: usize = 2048;

/// Grid controls for `solve_trajectory`.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    /// Number of uniform time samples.
    pub n: usize,
    /// Plateau padding before the ramp, in units of L/v_i.
    pub pad_factor: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n: 1 << 14,
            pad_factor: 10.0,
        }
    }
}

/// Speed of the classical particle with asymptotic momentum `p` at position `z`.
pub fn v_of_z<P: Potential>(
    consts: &PhysicalConstants,
    pot: &P,
    p: f64,
    z: f64,
) -> Result<f64, DynamicsError> {
    if !(p > 0.0) {
        return Err(DynamicsError::NonPositiveMomentum(p));
    }
    let barrier = 2.0 * consts.m * pot.sup_v();
    if p * p <= barrier {
        return Err(DynamicsError::TurningPoint { p2: p * p, barrier });
    }
    let kappa2 = p * p - 2.0 * consts.m * pot.eval(z).v;
    Ok(kappa2.sqrt() / consts.m)
}

/// Right-hand side of the 1-D rapidity form of the Lorentz-Dirac equation,
/// dβ/dτ = F̃_ext/(mc) + (e²/6πmc³) β''. The second term is the
/// radiation-reaction force; it is positive when the acceleration increases.
pub fn ld_rapidity_rhs(consts: &PhysicalConstants, f_ext: f64, beta_ddot: f64) -> f64 {
    f_ext / (consts.m * consts.c)
        + consts.e2 / (6.0 * std::f64::consts::PI * consts.m * consts.c.powi(3)) * beta_ddot
}

/// The exact t ↔ z maps for one (potential, p, z0) triple, anchored so that
/// z(0) = z0 on the right plateau.
pub struct Motion {
    v_i: f64,
    v_f: f64,
    s_lo: f64,
    s_hi: f64,
    t_lo: f64,
    t_hi: f64,
    /// cumulative travel time from s_lo to the table nodes
    tau: Vec<f64>,
    /// 1/v at the table nodes
    inv_v: Vec<f64>,
    dz: f64,
}

impl Motion {
    pub fn new<P: Potential>(
        consts: &PhysicalConstants,
        pot: &P,
        p: f64,
        z0: f64,
    ) -> Result<Self, DynamicsError> {
        if !(p > 0.0) {
            return Err(DynamicsError::NonPositiveMomentum(p));
        }
        let m = consts.m;
        let barrier = 2.0 * m * pot.sup_v();
        if p * p <= barrier {
            return Err(DynamicsError::TurningPoint { p2: p * p, barrier });
        }
        let (s_lo, s_hi) = pot.derivative_support().unwrap_or((z0, z0));
        if z0 < s_hi {
            return Err(DynamicsError::StartInsideRamp {
                z0,
                support_hi: s_hi,
            });
        }
        let v_f = p / m;
        let v_i = (p * p - 2.0 * m * pot.v_minus_inf()).sqrt() / m;
        let speed = |z: f64| (p * p - 2.0 * m * pot.eval(z).v).sqrt() / m;

        let n = RAMP_PANELS;
        let dz = (s_hi - s_lo) / n as f64;
        let mut tau = Vec::with_capacity(n + 1);
        let mut inv_v = Vec::with_capacity(n + 1);
        tau.push(0.0);
        inv_v.push(1.0 / speed(s_lo));
        if dz > 0.0 {
            let (gx, gw) = gauss_legendre(4);
            let mut acc = 0.0;
            for j in 0..n {
                let a = s_lo + dz * j as f64;
                let mid = a + 0.5 * dz;
                let half = 0.5 * dz;
                let mut panel = 0.0;
                for (x, w) in gx.iter().zip(&gw) {
                    panel += w * half / speed(mid + half * x);
                }
                acc += panel;
                tau.push(acc);
                inv_v.push(1.0 / speed(s_lo + dz * (j + 1) as f64));
            }
        }
        let t_hi = (s_hi - z0) / v_f;
        let t_lo = t_hi - tau.last().unwrap();
        Ok(Self {
            v_i,
            v_f,
            s_lo,
            s_hi,
            t_lo,
            t_hi,
            tau,
            inv_v,
            dz,
        })
    }

    pub fn v_i(&self) -> f64 {
        self.v_i
    }

    pub fn v_f(&self) -> f64 {
        self.v_f
    }

    /// Times at which the particle enters/leaves the ramp region.
    pub fn ramp_times(&self) -> (f64, f64) {
        (self.t_lo, self.t_hi)
    }

    /// Cubic Hermite value and slope of the tabulated τ(z) within panel `j`.
    fn tau_hermite(&self, j: usize, s: f64) -> (f64, f64) {
        let (t0, t1) = (self.tau[j], self.tau[j + 1]);
        let (d0, d1) = (self.inv_v[j] * self.dz, self.inv_v[j + 1] * self.dz);
        let s2 = s * s;
        let s3 = s2 * s;
        let value = (2.0 * s3 - 3.0 * s2 + 1.0) * t0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * t1
            + (s3 - s2) * d1;
        let slope = (6.0 * s2 - 6.0 * s) * t0
            + (3.0 * s2 - 4.0 * s + 1.0) * d0
            + (-6.0 * s2 + 6.0 * s) * t1
            + (3.0 * s2 - 2.0 * s) * d1;
        (value, slope)
    }

    pub fn t_of_z(&self, z: f64) -> f64 {
        if z >= self.s_hi {
            self.t_hi + (z - self.s_hi) / self.v_f
        } else if z <= self.s_lo {
            self.t_lo + (z - self.s_lo) / self.v_i
        } else {
            let x = (z - self.s_lo) / self.dz;
            let j = (x as usize).min(self.tau.len() - 2);
            let (value, _) = self.tau_hermite(j, x - j as f64);
            self.t_lo + value
        }
    }

    pub fn z_of_t(&self, t: f64) -> f64 {
        if t >= self.t_hi {
            self.s_hi + (t - self.t_hi) * self.v_f
        } else if t <= self.t_lo {
            self.s_lo + (t - self.t_lo) * self.v_i
        } else {
            let target = t - self.t_lo;
            // τ is strictly increasing; bracket by binary search, polish by Newton
            let mut lo = 0usize;
            let mut hi = self.tau.len() - 1;
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if self.tau[mid] <= target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let j = lo;
            let mut s = (target - self.tau[j]) / (self.tau[j + 1] - self.tau[j]);
            for _ in 0..6 {
                let (value, slope) = self.tau_hermite(j, s);
                let ds = (value - target) / slope;
                s -= ds;
                s = s.clamp(0.0, 1.0);
                if ds.abs() < 1e-16 {
                    break;
                }
            }
            self.s_lo + (j as f64 + s) * self.dz
        }
    }
}

/// Sampled unperturbed trajectory on a uniform time grid ending at t = 0.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub z: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
    /// Asymptotic (final) momentum.
    pub p: f64,
    /// Position at t = 0.
    pub z0: f64,
    /// Crossing time of the ramp midpoint (the T0 convention).
    pub t0: f64,
    pub v_i: f64,
    pub v_f: f64,
    /// Acceleration window: a(t) = 0 outside [t_in, t_out].
    pub t_in: f64,
    pub t_out: f64,
    /// Grid spacing.
    pub h: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// CSV export with header `t,z,v,a`.
    pub fn to_csv(&self) -> String {
        csvio::csv_table(
            "t,z,v,a",
            (0..self.len()).map(|k| vec![self.t[k], self.z[k], self.v[k], self.a[k]]),
        )
    }
}

/// Solve the motion m z̈ = -V'(z) with z(0) = z0 on a uniform grid
/// [t_in - pad, 0], where pad = pad_factor · L / v_i.
pub fn solve_trajectory<P: Potential>(
    consts: &PhysicalConstants,
    pot: &P,
    p: f64,
    z0: f64,
    grid: GridSpec,
) -> Result<Trajectory, DynamicsError> {
    if grid.n < 16 {
        return Err(DynamicsError::GridTooCoarse(format!(
            "need at least 16 samples, got {}",
            grid.n
        )));
    }
    let map = Motion::new(consts, pot, p, z0)?;
    let (t_in, t_out) = map.ramp_times();
    let half_support = 0.5 * (map.s_hi - map.s_lo);
    let pad_scale = if half_support > 0.0 {
        half_support
    } else {
        1.0
    };
    let pad = grid.pad_factor * pad_scale / map.v_i();
    let t_start = t_in - pad;
    if t_out >= 0.0 {
        return Err(DynamicsError::StartInsideRamp {
            z0,
            support_hi: map.s_hi,
        });
    }
    let n = grid.n;
    let h = -t_start / (n - 1) as f64;

    let m = consts.m;
    let mut t = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let mut a = Vec::with_capacity(n);
    for k in 0..n {
        let tk = t_start + h * k as f64;
        let zk = map.z_of_t(tk);
        let sample = pot.eval(zk);
        let kappa2 = p * p - 2.0 * m * sample.v;
        t.push(tk);
        z.push(zk);
        v.push(kappa2.sqrt() / m);
        a.push(-sample.vp / m);
    }

    // energy conservation guard on the sampled grid
    let energy = p * p / (2.0 * m);
    for k in 0..n {
        let e = 0.5 * m * v[k] * v[k] + pot.eval(z[k]).v;
        if ((e - energy) / energy).abs() > 1e-9 {
            return Err(DynamicsError::GridTooCoarse(format!(
                "energy drift {:e} at t = {}",
                (e - energy) / energy,
                t[k]
            )));
        }
    }
    // the acceleration pulse must be resolved for the downstream transforms
    let a_max = a.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if a_max > 0.0 && (t_out - t_in) / h < 64.0 {
        return Err(DynamicsError::GridTooCoarse(format!(
            "only {:.1} samples across the acceleration window",
            (t_out - t_in) / h
        )));
    }

    let midpoint = 0.5 * (map.s_lo + map.s_hi);
    let t0 = map.t_of_z(midpoint);
    Ok(Trajectory {
        t,
        z,
        v,
        a,
        p,
        z0,
        t0,
        v_i: map.v_i(),
        v_f: map.v_f(),
        t_in,
        t_out,
        h,
    })
}

/// ∂v_p(t)/∂p at fixed z(0) = z0, over the whole grid:
/// (v_f/m) [ 1/v_p(t) + a_p(t) ∫_0^t dτ / v_p(τ)² ].
pub fn dv_dp_profile(consts: &PhysicalConstants, traj: &Trajectory) -> Vec<f64> {
    let inv_v2: Vec<f64> = traj.v.iter().map(|&v| 1.0 / (v * v)).collect();
    let cum = cumulative_uniform(&inv_v2, traj.h);
    let at_zero = *cum.last().unwrap();
    let scale = traj.v_f / consts.m;
    (0..traj.len())
        .map(|k| scale * (1.0 / traj.v[k] + traj.a[k] * (cum[k] - at_zero)))
        .collect()
}

/// ∂v_p/∂p at one time (linear interpolation of the grid profile).
pub fn dv_dp(consts: &PhysicalConstants, traj: &Trajectory, t: f64) -> Result<f64, DynamicsError> {
    let lo = traj.t[0];
    let hi = *traj.t.last().unwrap();
    if t < lo - 1e-12 || t > hi + 1e-12 {
        return Err(DynamicsError::OutOfGrid { t, lo, hi });
    }
    let profile = dv_dp_profile(consts, traj);
    let x = ((t - lo) / traj.h).clamp(0.0, (traj.len() - 1) as f64);
    let j = (x as usize).min(traj.len() - 2);
    let s = x - j as f64;
    Ok(profile[j] * (1.0 - s) + profile[j + 1] * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{CompositePotential, PotentialSpec};
    use approx::assert_relative_eq;

    fn natural() -> PhysicalConstants {
        PhysicalConstants::natural_units()
    }

    fn standard() -> PotentialSpec {
        PotentialSpec::smoothstep(5e-4, 1.0)
    }

    #[test]
    fn v_of_z_free_particle() {
        let pot = PotentialSpec::smoothstep(0.0, 1.0);
        let v = v_of_z(&natural(), &pot, 0.1, 5.0).unwrap();
        assert_relative_eq!(v, 0.1, max_relative = 1e-15);
    }

    #[test]
    fn v_of_z_left_plateau() {
        let v = v_of_z(&natural(), &standard(), 0.1, -3.0).unwrap();
        assert_relative_eq!(v, 0.09486832980505138, max_relative = 1e-14);
    }

    #[test]
    fn v_of_z_turning_point() {
        let pot = PotentialSpec::smoothstep(6e-3, 1.0);
        let err = v_of_z(&natural(), &pot, 0.1, -3.0).unwrap_err();
        assert!(matches!(err, DynamicsError::TurningPoint { .. }));
    }

    #[test]
    fn free_motion_is_linear() {
        let pot = PotentialSpec::smoothstep(0.0, 1.0);
        let traj = solve_trajectory(&natural(), &pot, 0.1, 5.0, GridSpec::default()).unwrap();
        assert_relative_eq!(traj.t0, -50.0, max_relative = 1e-12);
        for k in (0..traj.len()).step_by(997) {
            assert_relative_eq!(traj.z[k], 5.0 + 0.1 * traj.t[k], epsilon = 1e-10);
            assert_eq!(traj.a[k], 0.0);
        }
    }

    #[test]
    fn standard_run_endpoints_and_window() {
        let traj =
            solve_trajectory(&natural(), &standard(), 0.1, 5.0, GridSpec::default()).unwrap();
        assert_relative_eq!(traj.v_i, 0.09486832980505138, max_relative = 1e-14);
        assert_relative_eq!(traj.v_f, 0.1, max_relative = 1e-15);
        assert_relative_eq!(traj.t_out, -40.0, max_relative = 1e-12);
        assert!(traj.t_in < traj.t_out);
        // acceleration positive only inside the window, zero outside
        for k in 0..traj.len() {
            if traj.t[k] < traj.t_in - traj.h || traj.t[k] > traj.t_out + traj.h {
                assert_eq!(traj.a[k], 0.0, "a must vanish at t={}", traj.t[k]);
            } else {
                assert!(traj.a[k] >= 0.0);
            }
        }
        assert_eq!(*traj.t.last().unwrap(), 0.0);
    }

    #[test]
    fn csv_export_layout() {
        let pot = PotentialSpec::smoothstep(0.0, 1.0);
        let traj = solve_trajectory(
            &natural(),
            &pot,
            0.1,
            5.0,
            GridSpec {
                n: 16,
                pad_factor: 1.0,
            },
        )
        .unwrap();
        let csv = traj.to_csv();
        assert!(csv.starts_with("t,z,v,a\n"));
        assert_eq!(csv.lines().count(), 17);
    }

    #[test]
    fn impulse_equals_velocity_change() {
        let traj =
            solve_trajectory(&natural(), &standard(), 0.1, 5.0, GridSpec::default()).unwrap();
        let impulse = crate::numerics::integrate_uniform(&traj.a, traj.h);
        assert_relative_eq!(impulse, traj.v_f - traj.v_i, max_relative = 1e-10);
        assert_relative_eq!(impulse, 0.0051316701949486, max_relative = 1e-10);
    }

    #[test]
    fn motion_maps_are_inverse() {
        let map = Motion::new(&natural(), &standard(), 0.1, 5.0).unwrap();
        for z in [-4.0, -1.0, -0.5, 0.0, 0.3, 0.99, 1.0, 3.0, 5.0] {
            let t = map.t_of_z(z);
            assert_relative_eq!(map.z_of_t(t), z, epsilon = 1e-12);
        }
        assert_relative_eq!(map.t_of_z(5.0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn start_inside_ramp_rejected() {
        let err = solve_trajectory(&natural(), &standard(), 0.1, 0.5, GridSpec::default());
        assert!(matches!(err, Err(DynamicsError::StartInsideRamp { .. })));
    }

    #[test]
    fn dv_dp_free_particle() {
        let pot = PotentialSpec::smoothstep(0.0, 1.0);
        let traj = solve_trajectory(&natural(), &pot, 0.1, 5.0, GridSpec::default()).unwrap();
        for t in [-100.0, -50.0, -1.0] {
            assert_relative_eq!(dv_dp(&natural(), &traj, t).unwrap(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn dv_dp_left_plateau_closed_form() {
        let traj =
            solve_trajectory(&natural(), &standard(), 0.1, 5.0, GridSpec::default()).unwrap();
        // a = 0 on the plateau, so ∂v/∂p = (v_f/m)/v_i
        let got = dv_dp(&natural(), &traj, traj.t_in - 30.0).unwrap();
        assert_relative_eq!(got, 1.0540925533894598, max_relative = 1e-9);
    }

    #[test]
    fn dv_dp_matches_finite_difference() {
        let consts = natural();
        let pot = standard();
        let traj = solve_trajectory(&consts, &pot, 0.1, 5.0, GridSpec::default()).unwrap();
        let delta = 1e-6;
        let lo = Motion::new(&consts, &pot, 0.1 - delta, 5.0).unwrap();
        let hi = Motion::new(&consts, &pot, 0.1 + delta, 5.0).unwrap();
        let speed = |map: &Motion, p: f64, t: f64| {
            let z = map.z_of_t(t);
            (p * p - 2.0 * pot.eval(z).v).sqrt()
        };
        for t in [-150.0, -55.0, -50.0, -45.0, -20.0, 0.0] {
            let fd = (speed(&hi, 0.1 + delta, t) - speed(&lo, 0.1 - delta, t)) / (2.0 * delta);
            let got = dv_dp(&consts, &traj, t).unwrap();
            assert_relative_eq!(got, fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn dv_dp_out_of_grid() {
        let traj =
            solve_trajectory(&natural(), &standard(), 0.1, 5.0, GridSpec::default()).unwrap();
        assert!(matches!(
            dv_dp(&natural(), &traj, 1.0),
            Err(DynamicsError::OutOfGrid { .. })
        ));
    }

    #[test]
    fn rapidity_rhs_coefficient() {
        let c = natural();
        assert_eq!(ld_rapidity_rhs(&c, 0.0, 0.0), 0.0);
        assert_relative_eq!(
            ld_rapidity_rhs(&c, 0.0, 1.0),
            1.0 / (6.0 * std::f64::consts::PI),
            max_relative = 1e-15
        );
        // increasing acceleration pushes the charge forward even while radiating
        assert!(ld_rapidity_rhs(&c, 0.0, 2.5) > 0.0);
    }

    #[test]
    fn composite_well_traversal() {
        let consts = natural();
        let well = CompositePotential::symmetric_bump(-5e-4, 1.0, 6.0);
        let traj = solve_trajectory(&consts, &well, 0.1, 10.0, GridSpec::default()).unwrap();
        assert_relative_eq!(traj.v_i, traj.v_f, max_relative = 1e-14);
        // entry/exit impulses (each ~2.4e-3) cancel to quadrature accuracy
        let impulse = crate::numerics::integrate_uniform(&traj.a, traj.h);
        assert!(impulse.abs() < 5e-11, "impulse {impulse:e}");
    }

    #[test]
    fn integral_of_a_squared_stable_under_refinement() {
        let consts = natural();
        let pot = standard();
        let value = |n: usize| {
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
            let a2: Vec<f64> = traj.a.iter().map(|a| a * a).collect();
            crate::numerics::integrate_uniform(&a2, traj.h)
        };
        let coarse = value(1 << 13);
        let mid = value(1 << 14);
        let fine = value(1 << 15);
        assert!((mid - fine).abs() <= 1e-9 * fine.abs());
        assert!((coarse - mid).abs() <= 1e-8 * fine.abs());
    }
}
