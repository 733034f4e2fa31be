//! Larmor power, total radiated energy, the soft-photon emission probability
//! with its infrared structure, and the solid-angle polarization averages.

use crate::constants::PhysicalConstants;
use crate::csvio;
use crate::dynamics::Trajectory;
use crate::numerics::integrate_uniform;
use crate::numerics::quadrature::gauss_legendre;
use crate::spectral::Spectrum;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RadiationError {
    #[error("infrared cutoff must be strictly positive, got {0}")]
    NonpositiveCutoff(f64),
}

/// P_r(t) = (e²/6πc³) a(t)², pointwise on the trajectory grid.
pub fn larmor_power(consts: &PhysicalConstants, traj: &Trajectory) -> Vec<f64> {
    let k = consts.larmor_coeff();
    traj.a.iter().map(|&a| k * a * a).collect()
}

/// E_r = ∫ P_r dt (time route).
pub fn radiated_energy(consts: &PhysicalConstants, traj: &Trajectory) -> f64 {
    integrate_uniform(&larmor_power(consts, traj), traj.h)
}

/// E_r from the spectrum: (e²/6πc³) ∫ |â|² dω/2π over the two-sided grid.
pub fn radiated_energy_spectral(consts: &PhysicalConstants, spec: &Spectrum) -> f64 {
    let mag2: Vec<f64> = spec.a_hat.iter().map(|c| c.norm_sqr()).collect();
    consts.larmor_coeff() * integrate_uniform(&mag2, spec.domega) / (2.0 * std::f64::consts::PI)
}

/// Cubic Lagrange interpolation of â on the uniform two-sided grid.
fn a_hat_interp(spec: &Spectrum, omega: f64) -> Complex64 {
    let n = spec.omega.len();
    let x = (omega - spec.omega[0]) / spec.domega;
    let j = (x.floor() as isize).clamp(1, n as isize - 3) as usize;
    let s = x - j as f64;
    // nodes at offsets -1, 0, 1, 2 around j
    let w_m1 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    let w_0 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    let w_1 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    let w_2 = (s + 1.0) * s * (s - 1.0) / 6.0;
    spec.a_hat[j - 1] * w_m1
        + spec.a_hat[j] * w_0
        + spec.a_hat[j + 1] * w_1
        + spec.a_hat[j + 2] * w_2
}

/// Emission probability 𝒫_r = (e²/3πℏc³) ∫_{ω_min}^{ω_max} (dω/2πω) |â(ω)|².
///
/// The decade(s) between the cutoff and the uniform grid are integrated on a
/// log-spaced mesh (the integrand is ~|â(0)|²/ω there); the remainder uses
/// the trapezoid rule on the grid samples.
pub fn emission_probability(
    consts: &PhysicalConstants,
    spec: &Spectrum,
    omega_min: f64,
) -> Result<f64, RadiationError> {
    emission_probability_with_angular_factor(consts, spec, omega_min, 2.0 / 3.0)
}

/// Same, with the solid-angle polarization average supplied by the caller
/// (the production value 2/3 is itself verified by spherical quadrature).
pub fn emission_probability_with_angular_factor(
    consts: &PhysicalConstants,
    spec: &Spectrum,
    omega_min: f64,
    angular_average: f64,
) -> Result<f64, RadiationError> {
    if !(omega_min > 0.0) {
        return Err(RadiationError::NonpositiveCutoff(omega_min));
    }
    let omega_max = spec.omega_max();
    if omega_min >= omega_max {
        return Ok(0.0);
    }
    let dw = spec.domega;
    let n_side = spec.omega.len() / 2;
    let zero = spec.zero_index();

    // split point: at least 32 grid cells up, and above the cutoff
    let split_index = ((omega_min / dw).ceil() as usize).max(32).min(n_side);
    let split = split_index as f64 * dw;

    let mut integral = 0.0;
    if omega_min < split * (1.0 - 1e-15) {
        // ∫ dω/ω |â|² = ∫ du |â(e^u)|², trapezoid in u = ln ω
        let decades = (split / omega_min).log10();
        let n_log = ((128.0 * decades).ceil() as usize).max(8);
        let du = (split / omega_min).ln() / n_log as f64;
        let g = |u: f64| a_hat_interp(spec, omega_min * u.exp()).norm_sqr();
        let mut acc = 0.5 * (g(0.0) + g(n_log as f64 * du));
        for k in 1..n_log {
            acc += g(k as f64 * du);
        }
        integral += acc * du;
    }
    if split_index < n_side {
        // trapezoid over the remaining uniform samples of |â|²/ω
        let vals: Vec<f64> = (split_index..=n_side)
            .map(|j| spec.a_hat[zero + j].norm_sqr() / spec.omega[zero + j])
            .collect();
        integral += crate::numerics::trapezoid_uniform(&vals, dw);
    }

    let coeff = consts.e2
        / (3.0 * std::f64::consts::PI * consts.hbar * consts.c.powi(3))
        / (2.0 * std::f64::consts::PI);
    Ok((angular_average / (2.0 / 3.0)) * coeff * integral)
}

/// -d𝒫/d(ln ω_min), estimated over one decade above `omega_ref`.
/// For V₋∞ ≠ 0 this tends to (e²/6π²ℏc³) |â(0)|².
pub fn ir_log_slope(
    consts: &PhysicalConstants,
    spec: &Spectrum,
    omega_ref: f64,
) -> Result<f64, RadiationError> {
    let p_lo = emission_probability(consts, spec, omega_ref)?;
    let p_hi = emission_probability(consts, spec, 10.0 * omega_ref)?;
    Ok((p_lo - p_hi) / std::f64::consts::LN_10)
}

/// Orthonormal polarization pair for direction `k_hat`, chosen so that
/// ε⁽²⁾ has no z-component; ε⁽¹⁾ carries all of it.
pub fn polarization_basis(k_hat: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let [kx, ky, kz] = k_hat;
    // k̂ × ẑ = (ky, -kx, 0)
    let s = (kx * kx + ky * ky).sqrt();
    let eps2 = if s < 1e-14 {
        [0.0, 1.0, 0.0]
    } else {
        [ky / s, -kx / s, 0.0]
    };
    // ε¹ = ε² × k̂
    let eps1 = [
        eps2[1] * kz - eps2[2] * ky,
        eps2[2] * kx - eps2[0] * kz,
        eps2[0] * ky - eps2[1] * kx,
    ];
    (eps1, eps2)
}

/// Solid-angle averages of |ε⁽¹⁾z|² and of 1 - k_z²c²/ω², on a product grid
/// with `direction_samples` Gauss-Legendre nodes in cos θ and twice as many
/// uniform azimuths. Both averages equal 2/3.
pub fn polarization_solid_angle_average(direction_samples: usize) -> (f64, f64) {
    let n = direction_samples.max(2);
    let (xs, ws) = gauss_legendre(n);
    let n_phi = 2 * n;
    let dphi_weight = 1.0 / n_phi as f64;
    let mut avg_eps = 0.0;
    let mut avg_kz = 0.0;
    for (x, w) in xs.iter().zip(&ws) {
        let sin_theta = (1.0 - x * x).sqrt();
        let mut row_eps = 0.0;
        for j in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n_phi as f64;
            let k_hat = [sin_theta * phi.cos(), sin_theta * phi.sin(), *x];
            let (eps1, _) = polarization_basis(k_hat);
            row_eps += eps1[2] * eps1[2] * dphi_weight;
        }
        // GL weights sum to 2 over cos θ; solid-angle average divides by that
        avg_eps += 0.5 * w * row_eps;
        avg_kz += 0.5 * w * (1.0 - x * x);
    }
    (avg_eps, avg_kz)
}

/// Summary of the radiation observables for one run.
#[derive(Debug, Clone)]
pub struct RadiationReport {
    pub p_of_t: Vec<f64>,
    pub e_r: f64,
    pub emission_probability: f64,
    pub ir_cutoff: f64,
    pub ir_log_slope: f64,
}

pub fn radiation_report(
    consts: &PhysicalConstants,
    traj: &Trajectory,
    spec: &Spectrum,
    ir_cutoff: f64,
) -> Result<RadiationReport, RadiationError> {
    let p_of_t = larmor_power(consts, traj);
    let e_r = integrate_uniform(&p_of_t, traj.h);
    let emission = emission_probability(consts, spec, ir_cutoff)?;
    let slope = ir_log_slope(consts, spec, ir_cutoff)?;
    Ok(RadiationReport {
        p_of_t,
        e_r,
        emission_probability: emission,
        ir_cutoff,
        ir_log_slope: slope,
    })
}

/// CSV export with header `t,P`.
pub fn radiation_csv(traj: &Trajectory, power: &[f64]) -> String {
    csvio::csv_table("t,P", traj.t.iter().zip(power).map(|(&t, &p)| vec![t, p]))
}
