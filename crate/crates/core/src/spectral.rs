//! Fourier transform â_p(ω) of the acceleration and the frequency-domain
//! identities shared by the position-shift routes.
//!
//! Transforms are direct trapezoid sums on explicit two-sided ω grids; the
//! ∂_ω derivative is a fourth-order central difference taken on the
//! demodulated spectrum (the e^{iω t_c} carrier of a pulse centred at t_c is
//! removed first, otherwise the stencil error is dominated by the carrier).

use crate::csvio;
use crate::dynamics::Trajectory;
use crate::numerics::dft::{transform_at, transform_many};
use crate::numerics::{integrate_uniform, integrate_uniform_complex};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("acceleration does not vanish at the grid ends: |a| = {a_end:e} vs max {a_max:e}")]
    SupportNotCompact { a_end: f64, a_max: f64 },
    #[error("acceleration still active at the measurement time t = 0")]
    AccelerationAfterMeasurement,
    #[error("frequency {omega} is outside the spectrum grid (max {omega_max})")]
    OmegaOutOfRange { omega: f64, omega_max: f64 },
}

/// Frequency grid controls. `None` fields are chosen adaptively: ω_max is
/// twice the first frequency where |â| stays below 1e-6 of its peak, and the
/// spacing keeps the demodulated-derivative stencil error near 1e-8.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreqGridSpec {
    pub omega_max: Option<f64>,
    pub n_per_side: Option<usize>,
}

/// Hard cap on samples per side.
const MAX_N_PER_SIDE: usize = 1 << 15;
/// Δω · (pulse half-width) target for the derivative stencil.
const DOMEGA_SCALE: f64 = 0.04;
/// Decay threshold defining ω_max.
const DECAY_THRESHOLD: f64 = 1e-6;

/// Two-sided spectrum of the acceleration.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Symmetric grid j·Δω, j = -n..n (always contains 0).
    pub omega: Vec<f64>,
    pub a_hat: Vec<Complex64>,
    pub da_hat_domega: Vec<Complex64>,
    /// Momentum of the source trajectory.
    pub source_p: f64,
    /// Pulse centre used for demodulation.
    pub t_center: f64,
    pub domega: f64,
}

impl Spectrum {
    pub fn omega_max(&self) -> f64 {
        *self.omega.last().unwrap_or(&0.0)
    }

    /// Index of ω = 0.
    pub fn zero_index(&self) -> usize {
        self.omega.len() / 2
    }

    pub fn a_hat_zero(&self) -> Complex64 {
        self.a_hat[self.zero_index()]
    }

    /// CSV export with header `omega,re_a_hat,im_a_hat,abs_a_hat`.
    pub fn to_csv(&self) -> String {
        csvio::csv_table(
            "omega,re_a_hat,im_a_hat,abs_a_hat",
            (0..self.omega.len()).map(|k| {
                vec![
                    self.omega[k],
                    self.a_hat[k].re,
                    self.a_hat[k].im,
                    self.a_hat[k].norm(),
                ]
            }),
        )
    }
}

/// â_p(ω) = ∫ a(t) e^{iωt} dt at a single frequency.
pub fn a_hat_at(traj: &Trajectory, omega: f64) -> Complex64 {
    transform_at(traj.t[0], traj.h, &traj.a, omega)
}

/// Indices of the first/last sample where |a| exceeds `frac` of its maximum.
fn support_indices(a: &[f64], frac: f64) -> Option<(usize, usize)> {
    let a_max = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if a_max == 0.0 {
        return None;
    }
    let thr = frac * a_max;
    let first = a.iter().position(|x| x.abs() > thr)?;
    let last = a.iter().rposition(|x| x.abs() > thr)?;
    Some((first, last))
}

/// Transform of the acceleration on a two-sided uniform ω grid.
pub fn fourier_acceleration(
    traj: &Trajectory,
    grid: FreqGridSpec,
) -> Result<Spectrum, SpectralError> {
    let a = &traj.a;
    let a_max = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let a_end = a[0].abs().max(a[a.len() - 1].abs());
    if a_max > 0.0 && a_end > 1e-12 * a_max {
        return Err(SpectralError::SupportNotCompact { a_end, a_max });
    }

    if a_max == 0.0 {
        // flat potential: the zero spectrum on a token grid
        let n = 8usize;
        let domega = 0.125;
        let omega: Vec<f64> = (-(n as i64)..=n as i64)
            .map(|j| j as f64 * domega)
            .collect();
        let len = omega.len();
        return Ok(Spectrum {
            omega,
            a_hat: vec![Complex64::new(0.0, 0.0); len],
            da_hat_domega: vec![Complex64::new(0.0, 0.0); len],
            source_p: traj.p,
            t_center: 0.0,
            domega,
        });
    }

    let (i_first, i_last) = support_indices(a, 1e-12).expect("nonzero acceleration");
    let t_center = 0.5 * (traj.t[i_first] + traj.t[i_last]);
    let half_width = (0.5 * (traj.t[i_last] - traj.t[i_first])).max(traj.h);

    let omega_max = match grid.omega_max {
        Some(w) => w,
        None => adaptive_omega_max(traj, half_width),
    };
    let n_per_side = match grid.n_per_side {
        Some(n) => n.min(MAX_N_PER_SIDE),
        None => {
            ((omega_max / (DOMEGA_SCALE / half_width)).ceil() as usize).clamp(64, MAX_N_PER_SIDE)
        }
    };
    let domega = omega_max / n_per_side as f64;

    let omega: Vec<f64> = (-(n_per_side as i64)..=n_per_side as i64)
        .map(|j| j as f64 * domega)
        .collect();
    let a_hat = transform_many(traj.t[0], traj.h, a, &omega);
    let da_hat_domega = derivative_demodulated(&omega, &a_hat, t_center, domega);

    Ok(Spectrum {
        omega,
        a_hat,
        da_hat_domega,
        source_p: traj.p,
        t_center,
        domega,
    })
}

/// March outward until |â| stays below the decay threshold, then double.
fn adaptive_omega_max(traj: &Trajectory, half_width: f64) -> f64 {
    let probe_step = std::f64::consts::PI / (8.0 * half_width);
    let needed_below = 8;
    let mut peak = 0.0f64;
    let mut below = 0usize;
    let mut omega = 0.0;
    let cap = 4000;
    for k in 0..=cap {
        omega = probe_step * k as f64;
        let mag = a_hat_at(traj, omega).norm();
        peak = peak.max(mag);
        if k > 64 && peak > 0.0 {
            if mag < DECAY_THRESHOLD * peak {
                below += 1;
                if below >= needed_below {
                    break;
                }
            } else {
                below = 0;
            }
        }
    }
    2.0 * omega
}

/// Fourth-order ∂_ω on the carrier-removed samples B = â e^{-iω t_c}.
fn derivative_demodulated(
    omega: &[f64],
    a_hat: &[Complex64],
    t_center: f64,
    domega: f64,
) -> Vec<Complex64> {
    let n = omega.len();
    let b: Vec<Complex64> = omega
        .iter()
        .zip(a_hat)
        .map(|(&w, &ah)| ah * Complex64::from_polar(1.0, -w * t_center))
        .collect();
    assert!(n >= 5, "derivative stencil needs at least 5 samples");
    let mut db = vec![Complex64::new(0.0, 0.0); n];
    let den = 12.0 * domega;
    for j in 0..n {
        db[j] = if j == 0 {
            (-25.0 * b[0] + 48.0 * b[1] - 36.0 * b[2] + 16.0 * b[3] - 3.0 * b[4]) / den
        } else if j == 1 {
            (-3.0 * b[0] - 10.0 * b[1] + 18.0 * b[2] - 6.0 * b[3] + b[4]) / den
        } else if j == n - 2 {
            (3.0 * b[n - 1] + 10.0 * b[n - 2] - 18.0 * b[n - 3] + 6.0 * b[n - 4] - b[n - 5]) / den
        } else if j == n - 1 {
            (25.0 * b[n - 1] - 48.0 * b[n - 2] + 36.0 * b[n - 3] - 16.0 * b[n - 4] + 3.0 * b[n - 5])
                / den
        } else {
            (-b[j + 2] + 8.0 * b[j + 1] - 8.0 * b[j - 1] + b[j - 2]) / den
        };
    }
    // remodulate: â' = e^{iω t_c} (B' + i t_c B)
    (0..n)
        .map(|j| {
            Complex64::from_polar(1.0, omega[j] * t_center)
                * (db[j] + Complex64::new(0.0, t_center) * b[j])
        })
        .collect()
}

/// Both sides of Parseval: (∫ a² dt, ∫ |â|² dω / 2π) over the two-sided grid.
pub fn parseval_energy(spec: &Spectrum, traj: &Trajectory) -> (f64, f64) {
    let a2: Vec<f64> = traj.a.iter().map(|a| a * a).collect();
    let time_side = integrate_uniform(&a2, traj.h);
    let mag2: Vec<f64> = spec.a_hat.iter().map(|c| c.norm_sqr()).collect();
    let freq_side = integrate_uniform(&mag2, spec.domega) / (2.0 * std::f64::consts::PI);
    (time_side, freq_side)
}

/// The two routes to I and the imaginary residue of the frequency route.
#[derive(Debug, Clone, Copy)]
pub struct IFunctional {
    /// -∫ t a(t)² dt
    pub time_side: f64,
    /// Re of i ∫ (dω/2π) â* ∂_ω â
    pub freq_side: f64,
    /// |Im| of the frequency route (realness residue).
    pub freq_im_residue: f64,
}

/// I computed both ways; requires the acceleration to be complete before t = 0.
pub fn i_functional(spec: &Spectrum, traj: &Trajectory) -> Result<IFunctional, SpectralError> {
    let a_max = traj.a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if a_max > 0.0 {
        let last = *traj.a.last().unwrap();
        if traj.t_out > 1e-12 || last.abs() > 1e-9 * a_max {
            return Err(SpectralError::AccelerationAfterMeasurement);
        }
    }
    let ta2: Vec<f64> = traj
        .t
        .iter()
        .zip(&traj.a)
        .map(|(&t, &a)| t * a * a)
        .collect();
    let time_side = -integrate_uniform(&ta2, traj.h);

    let integrand: Vec<Complex64> = spec
        .a_hat
        .iter()
        .zip(&spec.da_hat_domega)
        .map(|(a, da)| a.conj() * da)
        .collect();
    let freq = Complex64::new(0.0, 1.0) * integrate_uniform_complex(&integrand, spec.domega)
        / (2.0 * std::f64::consts::PI);
    Ok(IFunctional {
        time_side,
        freq_side: freq.re,
        freq_im_residue: freq.im.abs(),
    })
}
