//! The photon-emission matrix element G(k_z, P, p) of a WKB-scattered scalar
//! charge, evaluated by direct oscillatory quadrature, and its small-ℏ
//! collapse onto the classical acceleration spectrum.
//!
//! The direct evaluation uses the integration-by-parts representation
//!   G = -2i√(Pp) ∫ dz K'(z)/K(z)² · exp(i∫₀ᶻ K dz'),
//! whose integrand inherits the compact support of V', so no iε regulator is
//! needed. K(z) = [κ_p(z) - κ_P(z)]/ℏ - k_z is evaluated through the exact
//! identity (κ_p - κ_P)/ℏ = 2mω/(κ_p + κ_P), which is regular as ℏ → 0.
//! A raw-integral variant with explicit exponential damping is provided for
//! comparison only.

use crate::constants::PhysicalConstants;
use crate::csvio;
use crate::dynamics::Trajectory;
use crate::numerics::quadrature::{
    integrate_adaptive, integrate_adaptive_complex, QuadratureError,
};
use crate::numerics::{gauss_legendre_on, integrate_uniform_complex};
use crate::potential::{Potential, PotentialSpec};
use crate::spectral::{a_hat_at, Spectrum};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WkbError {
    #[error("photon frequency must be strictly positive, got {0}")]
    NonPositiveOmega(f64),
    #[error("|k_z| = {k_z} exceeds ω/c = {light_cone}")]
    KzOutsideLightCone { k_z: f64, light_cone: f64 },
    #[error("turning point: momentum² {p2:e} does not clear the barrier {barrier:e}")]
    TurningPoint { p2: f64, barrier: f64 },
    #[error("K(z) vanishes (minimum {k_min:e}); the phase would be stationary")]
    PhaseStationary { k_min: f64 },
    #[error("frequency {omega} not covered by the spectrum (max {omega_max})")]
    OmegaOutOfRange { omega: f64, omega_max: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// One emission problem: ℏ is read from `consts.hbar`; `hbar_ladder` lists
/// the rungs swept by `ladder`.
#[derive(Debug, Clone)]
pub struct WkbProblem {
    pub consts: PhysicalConstants,
    pub potential: PotentialSpec,
    pub p: f64,
    pub omega: f64,
    pub k_z: f64,
    pub hbar_ladder: Vec<f64>,
}

impl WkbProblem {
    /// Final momentum from energy conservation, P = √(p² - 2mℏω).
    pub fn final_momentum(&self) -> f64 {
        (self.p * self.p - 2.0 * self.consts.m * self.consts.hbar * self.omega).sqrt()
    }

    pub fn with_hbar(&self, hbar: f64) -> Self {
        Self {
            consts: self.consts.with_hbar(hbar),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), WkbError> {
        if !(self.omega > 0.0) {
            return Err(WkbError::NonPositiveOmega(self.omega));
        }
        let light_cone = self.omega / self.consts.c;
        if self.k_z.abs() > light_cone {
            return Err(WkbError::KzOutsideLightCone {
                k_z: self.k_z,
                light_cone,
            });
        }
        let m = self.consts.m;
        let barrier = 2.0 * m * self.potential.sup_v();
        let p2 = self.p * self.p;
        if p2 <= barrier {
            return Err(WkbError::TurningPoint { p2, barrier });
        }
        let recoil = 2.0 * m * self.consts.hbar * self.omega;
        let cap_p2 = p2 - recoil;
        if cap_p2 <= barrier {
            return Err(WkbError::TurningPoint {
                p2: cap_p2,
                barrier,
            });
        }
        // K is smallest where the κ's are largest, i.e. where V is deepest
        let v_floor = self.potential.v_minus_inf().min(0.0);
        let kp_max = (p2 - 2.0 * m * v_floor).sqrt();
        let kcap_max = (cap_p2 - 2.0 * m * v_floor).sqrt();
        let k_min = 2.0 * m * self.omega / (kp_max + kcap_max) - self.k_z;
        if k_min <= 0.0 {
            return Err(WkbError::PhaseStationary { k_min });
        }
        Ok(())
    }

    fn kappa_pair(&self, z: f64) -> (f64, f64) {
        let m = self.consts.m;
        let v = self.potential.eval(z).v;
        let p2 = self.p * self.p;
        let cap2 = p2 - 2.0 * m * self.consts.hbar * self.omega;
        ((p2 - 2.0 * m * v).sqrt(), (cap2 - 2.0 * m * v).sqrt())
    }

    /// K(z) through the recoil identity (κ_p - κ_P)/ℏ = 2mω/(κ_p + κ_P).
    fn local_wavenumber(&self, z: f64) -> f64 {
        let (kp, kcap) = self.kappa_pair(z);
        2.0 * self.consts.m * self.omega / (kp + kcap) - self.k_z
    }

    /// K'(z) = 2m²ω V'(z) (1/κ_p + 1/κ_P) / (κ_p + κ_P)².
    fn local_wavenumber_slope(&self, z: f64) -> f64 {
        let m = self.consts.m;
        let vp = self.potential.eval(z).vp;
        let (kp, kcap) = self.kappa_pair(z);
        let s = kp + kcap;
        2.0 * m * m * self.omega * vp * (1.0 / kp + 1.0 / kcap) / (s * s)
    }
}

/// Cumulative phase Φ(z) = ∫₀ᶻ K dz': tabulated across the ramp, analytic on
/// the plateaus where K is constant.
struct PhaseTable {
    s_lo: f64,
    s_hi: f64,
    k_left: f64,
    k_right: f64,
    grid: Vec<f64>,
    phase: Vec<f64>,
    slope: Vec<f64>,
    anchor: f64,
    dz: f64,
}

impl PhaseTable {
    fn build(prob: &WkbProblem) -> Self {
        let (s_lo, s_hi) = prob
            .potential
            .derivative_support()
            .expect("ramp potentials always declare a support");
        let n = 1024usize;
        let dz = (s_hi - s_lo) / n as f64;
        let mut grid = Vec::with_capacity(n + 1);
        let mut phase = Vec::with_capacity(n + 1);
        let mut slope = Vec::with_capacity(n + 1);
        let (gx, gw) = gauss_legendre_on(4, 0.0, 1.0);
        let mut acc = 0.0;
        grid.push(s_lo);
        phase.push(0.0);
        slope.push(prob.local_wavenumber(s_lo));
        for j in 0..n {
            let a = s_lo + dz * j as f64;
            let mut panel = 0.0;
            for (x, w) in gx.iter().zip(&gw) {
                panel += w * dz * prob.local_wavenumber(a + dz * x);
            }
            acc += panel;
            let z_next = s_lo + dz * (j + 1) as f64;
            grid.push(z_next);
            phase.push(acc);
            slope.push(prob.local_wavenumber(z_next));
        }
        let mut table = Self {
            s_lo,
            s_hi,
            k_left: prob.local_wavenumber(s_lo - 1.0),
            k_right: prob.local_wavenumber(s_hi + 1.0),
            grid,
            phase,
            slope,
            anchor: 0.0,
            dz,
        };
        table.anchor = table.raw(0.0);
        table
    }

    fn raw(&self, z: f64) -> f64 {
        if z <= self.s_lo {
            self.k_left * (z - self.s_lo)
        } else if z >= self.s_hi {
            self.phase[self.phase.len() - 1] + self.k_right * (z - self.s_hi)
        } else {
            let x = (z - self.s_lo) / self.dz;
            let j = (x as usize).min(self.grid.len() - 2);
            let s = x - j as f64;
            let (t0, t1) = (self.phase[j], self.phase[j + 1]);
            let (d0, d1) = (self.slope[j] * self.dz, self.slope[j + 1] * self.dz);
            let s2 = s * s;
            let s3 = s2 * s;
            (2.0 * s3 - 3.0 * s2 + 1.0) * t0
                + (s3 - 2.0 * s2 + s) * d0
                + (-2.0 * s3 + 3.0 * s2) * t1
                + (s3 - s2) * d1
        }
    }

    /// Φ(z) with Φ(0) = 0.
    fn at(&self, z: f64) -> f64 {
        self.raw(z) - self.anchor
    }
}

/// Uniform panel boundaries over the ramp, at least `min_panels` and at most
/// a quarter phase period per panel.
fn phase_resolved_seeds(table: &PhaseTable, min_panels: usize) -> Vec<f64> {
    let total_phase = (table.at(table.s_hi) - table.at(table.s_lo)).abs();
    let n = min_panels.max((total_phase / std::f64::consts::FRAC_PI_2).ceil() as usize + 1);
    (0..=n)
        .map(|j| table.s_lo + (table.s_hi - table.s_lo) * j as f64 / n as f64)
        .collect()
}

const DIRECT_REL_TOL: f64 = 1e-9;
const DIRECT_MAX_PANELS: usize = 1 << 16;

/// Rough L1 norm of an integrand magnitude over the seed panels. Oscillatory
/// integrals that cancel almost completely (G₀ at k_z → 0) need an absolute
/// error floor proportional to this, or the adaptive loop chases roundoff.
fn l1_floor(seeds: &[f64], magnitude: impl Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for w in seeds.windows(2) {
        let width = w[1] - w[0];
        for k in 0..4 {
            let z = w[0] + width * (k as f64 + 0.5) / 4.0;
            acc += 0.25 * width * magnitude(z).abs();
        }
    }
    acc
}

/// G by direct oscillatory quadrature of the integration-by-parts form.
pub fn amplitude_direct(prob: &WkbProblem) -> Result<Complex64, WkbError> {
    prob.validate()?;
    let table = PhaseTable::build(prob);
    let seeds = phase_resolved_seeds(&table, 16);
    let magnitude = |z: f64| {
        let k = prob.local_wavenumber(z);
        prob.local_wavenumber_slope(z) / (k * k)
    };
    let abs_tol = 1e-12 * l1_floor(&seeds, magnitude);
    let integral = integrate_adaptive_complex(
        |z| Complex64::from_polar(magnitude(z), table.at(z)),
        &seeds,
        DIRECT_REL_TOL,
        abs_tol,
        DIRECT_MAX_PANELS,
    )?;
    let root = (prob.final_momentum() * prob.p).sqrt();
    Ok(Complex64::new(0.0, -2.0 * root) * integral)
}

/// The stationary-phase limit (2ip/ω) â_p(ω) e^{-iωT₀}, with â evaluated
/// directly on the trajectory grid and T₀ the trajectory's ramp-midpoint
/// crossing time. For a free-flight trajectory T₀ = -mz₀/p, which turns the
/// phase factor into e^{imωz₀/P}; keeping the exact T₀ removes an O(V²)
/// phase residue that would otherwise floor the ℏ-convergence of the
/// direct/asymptotic comparison.
pub fn amplitude_asymptotic(
    prob: &WkbProblem,
    traj: &Trajectory,
    spectrum: &Spectrum,
    z0: f64,
) -> Result<Complex64, WkbError> {
    prob.validate()?;
    if prob.omega > spectrum.omega_max() {
        return Err(WkbError::OmegaOutOfRange {
            omega: prob.omega,
            omega_max: spectrum.omega_max(),
        });
    }
    debug_assert!(
        (z0 - traj.z0).abs() < 1e-9,
        "z0 must match the trajectory anchor"
    );
    let a_hat = a_hat_at(traj, prob.omega);
    let phase = Complex64::from_polar(1.0, -prob.omega * traj.t0);
    Ok(Complex64::new(0.0, 2.0 * prob.p / prob.omega) * a_hat * phase)
}

/// Time component G₀ of the amplitude in the indefinite-metric calculation:
/// -i√(Pp) (p₀+P₀)/c ∫ dz d/dz[(κ_pκ_P)^{-1/2} K^{-1}] e^{iΦ}.
pub fn amplitude_time_component(prob: &WkbProblem) -> Result<Complex64, WkbError> {
    prob.validate()?;
    let table = PhaseTable::build(prob);
    let seeds = phase_resolved_seeds(&table, 16);
    let m = prob.consts.m;
    let magnitude = |z: f64| {
        let (kp, kcap) = prob.kappa_pair(z);
        let vp = prob.potential.eval(z).vp;
        let k = prob.local_wavenumber(z);
        let kslope = prob.local_wavenumber_slope(z);
        let g = (kp * kcap).sqrt();
        // (κ_pκ_P)' = -mV'(κ_P/κ_p + κ_p/κ_P)
        let g_slope = -m * vp * (kcap / kp + kp / kcap) / (2.0 * g);
        let w = g * k;
        let w_slope = g_slope * k + g * kslope;
        -w_slope / (w * w)
    };
    let abs_tol = 1e-12 * l1_floor(&seeds, magnitude);
    let integral = integrate_adaptive_complex(
        |z| Complex64::from_polar(magnitude(z), table.at(z)),
        &seeds,
        DIRECT_REL_TOL,
        abs_tol,
        DIRECT_MAX_PANELS,
    )?;
    let c = prob.consts.c;
    let p0 = c * (m * m * c * c + prob.p * prob.p).sqrt();
    let cap = prob.final_momentum();
    let cap0 = c * (m * m * c * c + cap * cap).sqrt();
    let root = (cap * prob.p).sqrt();
    Ok(Complex64::new(0.0, -root * (p0 + cap0) / c) * integral)
}

/// G without the first-order-in-V prefactor simplification: the integrand is
/// built literally from the WKB modes, φ_P*(κ_p+κ_P)φ_p e^{-ik_z z}
/// = 2√(Pp) f(z) e^{iΦ}, and integrated by parts once.
pub fn amplitude_direct_full(prob: &WkbProblem) -> Result<Complex64, WkbError> {
    prob.validate()?;
    let consts_out = prob.consts;
    let cap = prob.final_momentum();
    // f(z) from mode moduli: |φ_P| |φ_p| (κ_p+κ_P) / (2√(Pp))
    let f_over_k = |z: f64| -> f64 {
        let mode_p = wkb_mode_modulus(&consts_out, &prob.potential, prob.p, z);
        let mode_cap = wkb_mode_modulus(&consts_out, &prob.potential, cap, z);
        let (kp, kcap) = prob.kappa_pair(z);
        let f = mode_p * mode_cap * (kp + kcap) / (2.0 * (cap * prob.p).sqrt());
        f / prob.local_wavenumber(z)
    };
    let table = PhaseTable::build(prob);
    let seeds = phase_resolved_seeds(&table, 16);
    let fd_step = 1e-6 * prob.potential.half_width;
    let magnitude = |z: f64| (f_over_k(z + fd_step) - f_over_k(z - fd_step)) / (2.0 * fd_step);
    // finite-difference noise in the integrand caps the reachable accuracy
    let abs_tol = 1e-9 * l1_floor(&seeds, magnitude);
    let integral = integrate_adaptive_complex(
        |z| Complex64::from_polar(magnitude(z), table.at(z)),
        &seeds,
        3e-9,
        abs_tol,
        DIRECT_MAX_PANELS,
    )?;
    let root = (cap * prob.p).sqrt();
    Ok(Complex64::new(0.0, 2.0 * root) * integral)
}

/// The raw oscillatory integral 2√(Pp)∫ e^{iΦ(z)-ε|z|} dz over [-span, span].
/// Comparison variant only; converges to the integration-by-parts value as
/// ε → 0, span·ε → ∞.
pub fn amplitude_raw_damped(
    prob: &WkbProblem,
    epsilon: f64,
    span: f64,
) -> Result<Complex64, WkbError> {
    prob.validate()?;
    let table = PhaseTable::build(prob);
    let k_scale = table.k_left.abs().max(table.k_right.abs());
    let n = ((2.0 * span * k_scale) / std::f64::consts::FRAC_PI_2).ceil() as usize + 8;
    let mut seeds: Vec<f64> = (0..=n)
        .map(|j| -span + 2.0 * span * j as f64 / n as f64)
        .collect();
    for brk in [table.s_lo, 0.0, table.s_hi] {
        if brk.abs() < span {
            seeds.push(brk);
        }
    }
    seeds.sort_by(f64::total_cmp);
    seeds.dedup();
    let integral = integrate_adaptive_complex(
        |z| Complex64::from_polar((-epsilon * z.abs()).exp(), table.at(z)),
        &seeds,
        1e-9,
        1e-300,
        DIRECT_MAX_PANELS,
    )?;
    let root = (prob.final_momentum() * prob.p).sqrt();
    Ok(2.0 * root * integral)
}

/// Radiation amplitude of the matching classical point current, evaluated in
/// the integration-by-parts form i e ω ∫ v'(t) e^{i(ωt - k_z z)} /(ω - k_z v)² dt.
pub fn classical_current_amplitude(
    consts: &PhysicalConstants,
    traj: &Trajectory,
    omega: f64,
    k_z: f64,
) -> Complex64 {
    let e = consts.e2.sqrt();
    let integrand: Vec<Complex64> = (0..traj.len())
        .map(|j| {
            let denom = omega - k_z * traj.v[j];
            Complex64::from_polar(
                traj.a[j] / (denom * denom),
                omega * traj.t[j] - k_z * traj.z[j],
            )
        })
        .collect();
    Complex64::new(0.0, e * omega) * integrate_uniform_complex(&integrand, traj.h)
}

/// WKB mode at one point: modulus √(p/κ_p) and unwrapped phase (1/ℏ)∫₀ᶻκ_p.
#[derive(Debug, Clone, Copy)]
pub struct WkbMode {
    pub modulus: f64,
    pub phase: f64,
}

impl WkbMode {
    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.phase)
    }
}

fn wkb_mode_modulus<P: Potential>(consts: &PhysicalConstants, pot: &P, p: f64, z: f64) -> f64 {
    let kappa = (p * p - 2.0 * consts.m * pot.eval(z).v).sqrt();
    (p / kappa).sqrt()
}

/// φ_p(z) in the WKB approximation, with the order-ℏ amplitude correction
/// set to zero.
pub fn wkb_mode<P: Potential>(
    consts: &PhysicalConstants,
    pot: &P,
    p: f64,
    z: f64,
) -> Result<WkbMode, WkbError> {
    let m = consts.m;
    let barrier = 2.0 * m * pot.sup_v();
    if p * p <= barrier {
        return Err(WkbError::TurningPoint { p2: p * p, barrier });
    }
    let kappa = |x: f64| (p * p - 2.0 * m * pot.eval(x).v).sqrt();
    let (s_lo, s_hi) = pot.derivative_support().unwrap_or((0.0, 0.0));
    // ∫₀ᶻ κ split into plateau pieces (κ constant) and the ramp overlap
    let (a, b, sign) = if z >= 0.0 {
        (0.0, z, 1.0)
    } else {
        (z, 0.0, -1.0)
    };
    let mut action = 0.0;
    let left_len = (s_lo.min(b) - a).max(0.0);
    if left_len > 0.0 {
        action += kappa(s_lo - 1.0) * left_len;
    }
    let right_len = (b - s_hi.max(a)).max(0.0);
    if right_len > 0.0 {
        action += kappa(s_hi + 1.0) * right_len;
    }
    let ramp_a = a.clamp(s_lo, s_hi);
    let ramp_b = b.clamp(s_lo, s_hi);
    if ramp_b > ramp_a {
        action += integrate_adaptive(kappa, ramp_a, ramp_b, 1e-13, 1e-300)?;
    }
    Ok(WkbMode {
        modulus: wkb_mode_modulus(consts, pot, p, z),
        phase: sign * action / consts.hbar,
    })
}

/// Worst-case departure of the dispersive part of K from its classical limit
/// ω/v_p over the ramp: max_z |2mω/(κ_p+κ_P) - mω/κ_p|. Decays linearly in ℏ.
pub fn k_approximation_error(prob: &WkbProblem) -> f64 {
    let (s_lo, s_hi) = prob.potential.derivative_support().unwrap();
    let m = prob.consts.m;
    let mut worst = 0.0f64;
    let n = 512;
    for j in 0..=n {
        let z = s_lo + (s_hi - s_lo) * j as f64 / n as f64;
        let (kp, kcap) = prob.kappa_pair(z);
        let exact = 2.0 * m * prob.omega / (kp + kcap);
        let classical = m * prob.omega / kp;
        worst = worst.max((exact - classical).abs());
    }
    worst
}

/// Direct vs asymptotic amplitudes at one ℏ.
#[derive(Debug, Clone, Copy)]
pub struct AmplitudeResult {
    pub g_direct: Complex64,
    pub g_asymptotic: Complex64,
    pub g0_direct: Complex64,
    pub rel_error: f64,
}

pub fn evaluate(
    prob: &WkbProblem,
    traj: &Trajectory,
    spectrum: &Spectrum,
    z0: f64,
) -> Result<AmplitudeResult, WkbError> {
    let g_direct = amplitude_direct(prob)?;
    let g_asymptotic = amplitude_asymptotic(prob, traj, spectrum, z0)?;
    let g0_direct = amplitude_time_component(prob)?;
    Ok(AmplitudeResult {
        g_direct,
        g_asymptotic,
        g0_direct,
        rel_error: (g_direct - g_asymptotic).norm() / g_asymptotic.norm(),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct LadderRow {
    pub hbar: f64,
    pub result: AmplitudeResult,
}

/// Sweep `prob.hbar_ladder` at fixed (ω, k_z, p).
pub fn ladder(
    prob: &WkbProblem,
    traj: &Trajectory,
    spectrum: &Spectrum,
    z0: f64,
) -> Result<Vec<LadderRow>, WkbError> {
    prob.hbar_ladder
        .iter()
        .map(|&hbar| {
            let rung = prob.with_hbar(hbar);
            Ok(LadderRow {
                hbar,
                result: evaluate(&rung, traj, spectrum, z0)?,
            })
        })
        .collect()
}

/// CSV export with header `hbar,omega,k_z,re_G,im_G,re_G_asym,im_G_asym,rel_error`.
pub fn ladder_csv(prob: &WkbProblem, rows: &[LadderRow]) -> String {
    csvio::csv_table(
        "hbar,omega,k_z,re_G,im_G,re_G_asym,im_G_asym,rel_error",
        rows.iter().map(|r| {
            vec![
                r.hbar,
                prob.omega,
                prob.k_z,
                r.result.g_direct.re,
                r.result.g_direct.im,
                r.result.g_asymptotic.re,
                r.result.g_asymptotic.im,
                r.result.rel_error,
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{solve_trajectory, GridSpec};
    use crate::spectral::{fourier_acceleration, FreqGridSpec};
    use approx::assert_relative_eq;
    use std::sync::OnceLock;

    fn natural() -> PhysicalConstants {
        PhysicalConstants::natural_units()
    }

    fn standard_problem() -> WkbProblem {
        WkbProblem {
            consts: natural().with_hbar(1e-3),
            potential: PotentialSpec::smoothstep(5e-4, 1.0),
            p: 0.1,
            omega: 0.02,
            k_z: 0.0,
            hbar_ladder: vec![4e-3, 2e-3, 1e-3, 5e-4],
        }
    }

    fn standard_run() -> &'static (Trajectory, Spectrum) {
        static CELL: OnceLock<(Trajectory, Spectrum)> = OnceLock::new();
        CELL.get_or_init(|| {
            let pot = PotentialSpec::smoothstep(5e-4, 1.0);
            let traj = solve_trajectory(&natural(), &pot, 0.1, 5.0, GridSpec::default()).unwrap();
            let spec = fourier_acceleration(&traj, FreqGridSpec::default()).unwrap();
            (traj, spec)
        })
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        let base = standard_problem();
        assert!(matches!(
            WkbProblem {
                omega: 0.0,
                ..base.clone()
            }
            .validate(),
            Err(WkbError::NonPositiveOmega(_))
        ));
        assert!(matches!(
            WkbProblem {
                k_z: 0.03,
                ..base.clone()
            }
            .validate(),
            Err(WkbError::KzOutsideLightCone { .. })
        ));
        assert!(matches!(
            WkbProblem {
                potential: PotentialSpec::smoothstep(6e-3, 1.0),
                ..base.clone()
            }
            .validate(),
            Err(WkbError::TurningPoint { .. })
        ));
        // a would-be superluminal particle makes K cross zero
        assert!(matches!(
            WkbProblem {
                p: 3.0,
                k_z: 0.02,
                ..base.clone()
            }
            .validate(),
            Err(WkbError::PhaseStationary { .. })
        ));
        assert!(base.validate().is_ok());
    }

    #[test]
    fn flat_potential_emits_nothing() {
        let prob = WkbProblem {
            potential: PotentialSpec::smoothstep(0.0, 1.0),
            ..standard_problem()
        };
        let g = amplitude_direct(&prob).unwrap();
        assert_eq!(g.norm(), 0.0);
    }

    #[test]
    fn ladder_collapses_first_order_in_hbar() {
        let (traj, spec) = standard_run();
        let prob = standard_problem();
        let rows = ladder(&prob, traj, spec, traj.z0).unwrap();
        assert_eq!(rows.len(), 4);
        for w in rows.windows(2) {
            let ratio = w[1].result.rel_error / w[0].result.rel_error;
            assert!(
                ratio < 0.75,
                "halving ℏ should reduce rel_error: ratio {ratio}"
            );
        }
        assert!(rows.last().unwrap().result.rel_error <= 5e-2);
        // measured collapse is ~2e-4 at ℏ=4e-3 already
        assert!(rows[0].result.rel_error < 1e-3);
    }

    #[test]
    fn asymptotic_modulus_and_phase_shift() {
        let consts = natural();
        let pot = PotentialSpec::smoothstep(5e-4, 1.0);
        let (traj, spec) = standard_run();
        let prob = standard_problem();
        let g_a = amplitude_asymptotic(&prob, traj, spec, traj.z0).unwrap();
        // definitional composition: |G_asym| = (2p/ω)|â(ω)|
        let a_hat = a_hat_at(traj, prob.omega);
        assert_relative_eq!(
            g_a.norm(),
            2.0 * prob.p / prob.omega * a_hat.norm(),
            max_relative = 1e-12
        );

        let traj2 = solve_trajectory(&consts, &pot, 0.1, 6.0, GridSpec::default()).unwrap();
        let spec2 = fourier_acceleration(&traj2, FreqGridSpec::default()).unwrap();
        let g_b = amplitude_asymptotic(&prob, &traj2, &spec2, traj2.z0).unwrap();
        assert_relative_eq!(g_b.norm(), g_a.norm(), max_relative = 1e-8);
        // the anchor shift rotates â by -mωΔ/p and the T₀ factor by +mωΔ/p;
        // the amplitude itself is anchor-free like the direct evaluation
        let rot = (g_b / g_a).arg();
        assert!(rot.abs() < 1e-6, "rotation {rot}");
    }

    #[test]
    fn asymptotic_rejects_uncovered_frequency() {
        let (traj, _) = standard_run();
        // a narrow spectrum that stops below the (kinematically fine) ω
        let narrow = fourier_acceleration(
            traj,
            FreqGridSpec {
                omega_max: Some(0.5),
                n_per_side: Some(256),
            },
        )
        .unwrap();
        let prob = WkbProblem {
            omega: 1.0,
            ..standard_problem()
        };
        assert!(matches!(
            amplitude_asymptotic(&prob, traj, &narrow, traj.z0),
            Err(WkbError::OmegaOutOfRange { .. })
        ));
    }

    #[test]
    fn time_component_vanishes_on_axis() {
        let prob = standard_problem().with_hbar(5e-4);
        let g = amplitude_direct(&prob).unwrap();
        let g0 = amplitude_time_component(&prob).unwrap();
        assert!(
            g0.norm() <= 1e-3 * g.norm(),
            "|G0|/|G| = {:e}",
            g0.norm() / g.norm()
        );
    }

    #[test]
    fn time_component_ratio_matches_lightcone_projection() {
        let mut prob = standard_problem().with_hbar(5e-4);
        prob.k_z = 0.5 * prob.omega / prob.consts.c;
        let target = prob.consts.c * prob.k_z / prob.omega;
        let ratio = amplitude_time_component(&prob).unwrap() / amplitude_direct(&prob).unwrap();
        assert!(
            (ratio + Complex64::new(target, 0.0)).norm() <= 0.05 * target,
            "G0/G = {ratio:?}"
        );
        // odd under k_z -> -k_z
        let mut flipped = prob.clone();
        flipped.k_z = -prob.k_z;
        let ratio_f =
            amplitude_time_component(&flipped).unwrap() / amplitude_direct(&flipped).unwrap();
        assert!((ratio_f + ratio).norm() < 1e-3 * ratio.norm());
    }

    #[test]
    fn full_matrix_element_deviation_scales_as_hbar_squared() {
        let prob = standard_problem();
        let dev = |hbar: f64| {
            let rung = prob.with_hbar(hbar);
            let full = amplitude_direct_full(&rung).unwrap();
            let simplified = amplitude_direct(&rung).unwrap();
            (full - simplified).norm() / simplified.norm()
        };
        let d4 = dev(4e-3);
        let d2 = dev(2e-3);
        let ratio = d4 / d2;
        assert!(
            (3.2..4.8).contains(&ratio),
            "expected ~4x shrink per ℏ halving, got {ratio}"
        );
        // magnitude is set by (mℏω/p²)²/8 up to an O(1) factor
        let alpha = (prob.consts.m * 4e-3 * prob.omega / (prob.p * prob.p)).powi(2) / 8.0;
        assert!(
            d4 < 10.0 * alpha && d4 > 0.1 * alpha,
            "d4 = {d4:e}, alpha = {alpha:e}"
        );
    }

    #[test]
    fn raw_damped_variant_extrapolates_to_direct() {
        let prob = standard_problem();
        let direct = amplitude_direct(&prob).unwrap();
        let g1 = amplitude_raw_damped(&prob, 2e-3, 10.0 / 2e-3).unwrap();
        let g2 = amplitude_raw_damped(&prob, 1e-3, 10.0 / 1e-3).unwrap();
        let extrapolated = 2.0 * g2 - g1;
        assert!(
            (extrapolated - direct).norm() <= 1e-2 * direct.norm(),
            "raw-damped mismatch {:e}",
            (extrapolated - direct).norm() / direct.norm()
        );
    }

    #[test]
    fn k_error_decays_linearly_in_hbar() {
        let prob = standard_problem();
        let e1 = k_approximation_error(&prob.with_hbar(4e-3));
        let e2 = k_approximation_error(&prob.with_hbar(2e-3));
        let e3 = k_approximation_error(&prob.with_hbar(1e-3));
        assert_relative_eq!(e1 / e2, 2.0, max_relative = 0.02);
        assert_relative_eq!(e2 / e3, 2.0, max_relative = 0.02);
    }

    #[test]
    fn classical_current_amplitude_reduces_to_spectrum() {
        let consts = natural();
        let (traj, _) = standard_run();
        let omega = 0.02;
        let exact = classical_current_amplitude(&consts, traj, omega, 0.0);
        let a_hat = a_hat_at(traj, omega);
        // at k_z = 0: A · (ω/ie) = â
        let reduced = exact * Complex64::new(0.0, -omega) / consts.e2.sqrt();
        assert!((reduced - a_hat).norm() <= 1e-8 * a_hat.norm());

        let k_z = 0.1 * omega / consts.c;
        let at_kz = classical_current_amplitude(&consts, traj, omega, k_z);
        let limit = Complex64::new(0.0, consts.e2.sqrt() / omega) * a_hat;
        let dev = (at_kz - limit).norm() / limit.norm();
        assert!(dev <= 2.0 * traj.v_f / consts.c, "dev {dev}");
    }

    #[test]
    fn classical_current_amplitude_flat() {
        let consts = natural();
        let pot = PotentialSpec::smoothstep(0.0, 1.0);
        let traj = solve_trajectory(&consts, &pot, 0.1, 5.0, GridSpec::default()).unwrap();
        assert_eq!(
            classical_current_amplitude(&consts, &traj, 0.02, 0.0).norm(),
            0.0
        );
    }

    #[test]
    fn wkb_mode_plane_wave_and_plateaus() {
        let consts = natural().with_hbar(1e-3);
        let flat = PotentialSpec::smoothstep(0.0, 1.0);
        let p = 0.1;
        for z in [-3.0, 0.7, 4.0] {
            let m = wkb_mode(&consts, &flat, p, z).unwrap();
            assert_relative_eq!(m.modulus, 1.0, max_relative = 1e-14);
            assert_relative_eq!(m.phase, p * z / consts.hbar, max_relative = 1e-12);
        }
        let ramp = PotentialSpec::smoothstep(5e-4, 1.0);
        // |φ|² = p/κ everywhere
        for z in [-2.0, -0.3, 0.2, 3.0] {
            let m = wkb_mode(&consts, &ramp, p, z).unwrap();
            let kappa = (p * p - 2.0 * consts.m * ramp.eval(z).v).sqrt();
            assert_relative_eq!(m.modulus * m.modulus, p / kappa, max_relative = 1e-13);
        }
        // constant-κ phase accumulation on the right plateau
        let m1 = wkb_mode(&consts, &ramp, p, 2.0).unwrap();
        let m2 = wkb_mode(&consts, &ramp, p, 5.0).unwrap();
        assert_relative_eq!(
            m2.phase - m1.phase,
            p * 3.0 / consts.hbar,
            max_relative = 1e-12
        );
        // turning point rejected
        assert!(matches!(
            wkb_mode(&consts, &PotentialSpec::smoothstep(6e-3, 1.0), p, 0.0),
            Err(WkbError::TurningPoint { .. })
        ));
    }

    #[test]
    fn ladder_csv_schema() {
        let (traj, spec) = standard_run();
        let prob = WkbProblem {
            hbar_ladder: vec![4e-3, 1e-3],
            ..standard_problem()
        };
        let rows = ladder(&prob, traj, spec, traj.z0).unwrap();
        let csv = ladder_csv(&prob, &rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "hbar,omega,k_z,re_G,im_G,re_G_asym,im_G_asym,rel_error"
        );
        assert_eq!(csv.lines().count(), 3);
    }
}
