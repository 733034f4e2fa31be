//! The position shift δz at t = 0 by four routes:
//!
//! * `shift_ld_closed` — the closed Lorentz-Dirac form
//!   δz = (e²/6πmc³) v_f ln(v_f/v_i) - (e²/6πpc³) I, which replaces m·ṽ by
//!   the final momentum p inside I and is therefore exact only to second
//!   order in V;
//! * `shift_ld_ode` — cumulative quadrature of the un-truncated
//!   energy-balance equation m d/dt(δz/ṽ) = (e²/6πṽc³) ṽ̇ - (e²/6πṽ²c³)∫ᵗa²;
//! * `shift_quantum` — (1/p̄) ∫ t P_r dt, the semiclassical result, with the
//!   frequency form asserted against it;
//! * `shift_erratum` — the windowed amplitude route built on ∂v_p/∂p, which
//!   must reproduce `shift_ld_ode` for any admissible window.

use crate::constants::PhysicalConstants;
use crate::dynamics::{dv_dp_profile, Trajectory};
use crate::numerics::{cumulative_uniform, integrate_uniform};
use crate::spectral::{i_functional, SpectralError, Spectrum};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ShiftError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(
        "window taper (width {taper:.3}) overlaps the acceleration support [{t_in:.3}, {t_out:.3}]"
    )]
    WindowTooNarrow { taper: f64, t_in: f64, t_out: f64 },
    #[error("time and frequency routes disagree: {time:e} vs {freq:e}")]
    RouteMismatch { time: f64, freq: f64 },
}

/// C² window: 0 → 1 over the leading taper, 1 on the bulk, 1 → 0 over the
/// trailing taper ending exactly at the last grid time.
#[derive(Debug, Clone, Copy)]
pub struct WindowSpec {
    /// Taper width as a fraction of the grid span, each side.
    pub taper_fraction: f64,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self {
            taper_fraction: 0.1,
        }
    }
}

fn smoothstep01(u: f64) -> (f64, f64) {
    if u <= 0.0 {
        (0.0, 0.0)
    } else if u >= 1.0 {
        (1.0, 0.0)
    } else {
        (
            u * u * u * (10.0 - 15.0 * u + 6.0 * u * u),
            30.0 * u * u * (1.0 - u) * (1.0 - u),
        )
    }
}

/// χ(t) and χ'(t) for the given trajectory grid.
fn window_profile(traj: &Trajectory, window: &WindowSpec) -> (Vec<f64>, Vec<f64>) {
    let t_start = traj.t[0];
    let t_end = *traj.t.last().unwrap();
    let w = window.taper_fraction * (t_end - t_start);
    let mut chi = Vec::with_capacity(traj.len());
    let mut chi_p = Vec::with_capacity(traj.len());
    for &t in &traj.t {
        let (rise, rise_p) = smoothstep01((t - t_start) / w);
        let (fall, fall_p) = smoothstep01((t_end - t) / w);
        chi.push(rise * fall);
        chi_p.push((rise_p * fall - rise * fall_p) / w);
    }
    (chi, chi_p)
}

/// Closed Lorentz-Dirac form. Returns (δz, log term, second term).
pub fn shift_ld_closed(
    consts: &PhysicalConstants,
    traj: &Trajectory,
    spec: &Spectrum,
) -> Result<(f64, f64, f64), ShiftError> {
    let k = consts.larmor_coeff();
    let log_term = k / consts.m * traj.v_f * (traj.v_f / traj.v_i).ln();
    let i = i_functional(spec, traj)?;
    let second = -k / traj.p * i.freq_side;
    Ok((log_term + second, log_term, second))
}

/// Cumulative quadrature of the energy-balance equation, without the
/// p ↔ m·ṽ replacement. δz(0) = (v_f/m) ∫ RHS dt.
pub fn shift_ld_ode(consts: &PhysicalConstants, traj: &Trajectory) -> f64 {
    let k = consts.larmor_coeff();
    let a2: Vec<f64> = traj.a.iter().map(|a| a * a).collect();
    let acc = cumulative_uniform(&a2, traj.h);
    let rhs: Vec<f64> = (0..traj.len())
        .map(|j| k * (traj.a[j] / traj.v[j] - acc[j] / (traj.v[j] * traj.v[j])))
        .collect();
    traj.v_f / consts.m * integrate_uniform(&rhs, traj.h)
}

/// Semiclassical route: (1/p̄) ∫ t P_r(t) dt, with the frequency form
/// -(ie²/6πpc³) ∫ (dω/2π) â* ∂_ω â checked against it.
pub fn shift_quantum(
    consts: &PhysicalConstants,
    traj: &Trajectory,
    spec: &Spectrum,
) -> Result<f64, ShiftError> {
    let k = consts.larmor_coeff();
    let i = i_functional(spec, traj)?;
    let time_form = -k / traj.p * i.time_side;
    let freq_form = -k / traj.p * i.freq_side;
    let scale = time_form.abs().max(1e-300);
    if (time_form - freq_form).abs() > 1e-6 * scale && i.time_side.abs() > 1e-300 {
        return Err(ShiftError::RouteMismatch {
            time: time_form,
            freq: freq_form,
        });
    }
    Ok(time_form)
}

/// Windowed-amplitude route:
/// (e²/6πc³) ∫ dt { a_p ∂v_p/∂p + ½ v_p ∂v_p/∂p d(χ²)/dt }.
pub fn shift_erratum(
    consts: &PhysicalConstants,
    traj: &Trajectory,
    window: &WindowSpec,
) -> Result<f64, ShiftError> {
    let t_start = traj.t[0];
    let t_end = *traj.t.last().unwrap();
    let w = window.taper_fraction * (t_end - t_start);
    let a_max = traj.a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if a_max > 0.0 && (t_start + w > traj.t_in || t_end - w < traj.t_out) {
        return Err(ShiftError::WindowTooNarrow {
            taper: w,
            t_in: traj.t_in,
            t_out: traj.t_out,
        });
    }
    let (chi, chi_p) = window_profile(traj, window);
    let dvdp = dv_dp_profile(consts, traj);
    let integrand: Vec<f64> = (0..traj.len())
        .map(|j| traj.a[j] * dvdp[j] + traj.v[j] * dvdp[j] * chi[j] * chi_p[j])
        .collect();
    Ok(consts.larmor_coeff() * integrate_uniform(&integrand, traj.h))
}

/// The comparison that is the point of the exercise.
#[derive(Debug, Clone, Copy)]
pub struct ShiftReport {
    pub dz_ld_closed: f64,
    pub dz_ld_ode: f64,
    pub dz_quantum: f64,
    pub dz_erratum: f64,
    /// (e²/6πmc³) v_f ln(v_f/v_i), the term absent from the quantum result.
    pub log_term: f64,
    /// -(e²/6πpc³) I.
    pub i_term: f64,
    /// ℏ/mc.
    pub compton: f64,
    /// |log_term| / compton.
    pub discrepancy_ratio: f64,
}

pub fn shift_report(
    consts: &PhysicalConstants,
    traj: &Trajectory,
    spec: &Spectrum,
    window: &WindowSpec,
) -> Result<ShiftReport, ShiftError> {
    let (dz_closed, log_term, i_term) = shift_ld_closed(consts, traj, spec)?;
    let dz_ode = shift_ld_ode(consts, traj);
    let dz_quantum = shift_quantum(consts, traj, spec)?;
    let dz_erratum = shift_erratum(consts, traj, window)?;
    let compton = consts.compton_wavelength();
    Ok(ShiftReport {
        dz_ld_closed: dz_closed,
        dz_ld_ode: dz_ode,
        dz_quantum,
        dz_erratum,
        log_term,
        i_term,
        compton,
        discrepancy_ratio: log_term.abs() / compton,
    })
}
