//! Run orchestration: compute the requested pipeline, write CSVs and the
//! key-value summary, enforce the runtime tolerance contracts.

use crate::config::{RunConfig, SweepAxis};
use rrlab_core::csvio::format_g17;
use rrlab_core::dynamics::{solve_trajectory, DynamicsError, Trajectory};
use rrlab_core::potential::PotentialSpec;
use rrlab_core::radiation::{
    emission_probability, ir_log_slope, larmor_power, radiated_energy, radiation_csv,
    RadiationError,
};
use rrlab_core::renorm::{forward_shift_from_delta_v, mass_shift_msbar, renorm_csv};
use rrlab_core::shift::{shift_report, ShiftError};
use rrlab_core::spectral::{fourier_acceleration, parseval_energy, SpectralError, Spectrum};
use rrlab_core::wavepacket::{charge_density_expectation, normalize, position_expectation};
use rrlab_core::wkb::{ladder, LadderRow, WkbProblem};
use rrlab_core::PhysicalConstants;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Config(#[from] crate::config::ConfigError),
    #[error("validation: {0}")]
    Validation(String),
    #[error("numerical tolerance: {0}")]
    Tolerance(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Tolerance(_) => 3,
            _ => 2,
        }
    }
}

fn dynamics_error(e: DynamicsError) -> PipelineError {
    match e {
        DynamicsError::GridTooCoarse(_) => PipelineError::Tolerance(e.to_string()),
        _ => PipelineError::Validation(e.to_string()),
    }
}

fn spectral_error(e: SpectralError) -> PipelineError {
    PipelineError::Tolerance(e.to_string())
}

fn shift_error(e: ShiftError) -> PipelineError {
    match e {
        ShiftError::WindowTooNarrow { .. } => PipelineError::Validation(e.to_string()),
        _ => PipelineError::Tolerance(e.to_string()),
    }
}

fn radiation_error(e: RadiationError) -> PipelineError {
    PipelineError::Validation(e.to_string())
}

/// Fixed summary vocabulary, in output order.
pub const SUMMARY_KEYS: [&str; 14] = [
    "v_i",
    "v_f",
    "T0",
    "E_r",
    "emission_prob",
    "ir_log_slope",
    "dz_ld_closed",
    "dz_ld_ode",
    "dz_quantum",
    "dz_erratum",
    "log_term",
    "gap_over_compton",
    "parseval_rel_err",
    "erratum_agreement_rel_err",
];

#[derive(Debug, Default)]
struct Summary {
    entries: Vec<(&'static str, f64)>,
}

impl Summary {
    fn push(&mut self, key: &'static str, value: f64) {
        assert!(SUMMARY_KEYS.contains(&key), "unknown summary key {key}");
        self.entries.push((key, value));
    }

    fn render(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.entries {
            let _ = writeln!(out, "{key} = {}", format_g17(*value));
        }
        out
    }
}

pub struct Outputs {
    dir: PathBuf,
    emit_gnuplot: bool,
}

impl Outputs {
    /// Created-or-empty semantics: an existing non-empty directory is
    /// refused unless `force` is set.
    pub fn prepare(dir: &Path, force: bool, emit_gnuplot: bool) -> Result<Self, PipelineError> {
        if dir.exists() {
            let occupied = fs::read_dir(dir)?.next().is_some();
            if occupied && !force {
                return Err(PipelineError::Validation(format!(
                    "output directory `{}` is not empty (use --force to overwrite)",
                    dir.display()
                )));
            }
        } else {
            fs::create_dir_all(dir)?;
        }
        Ok(Self {
            dir: dir.to_path_buf(),
            emit_gnuplot,
        })
    }

    fn write(&self, name: &str, content: &str) -> Result<(), PipelineError> {
        fs::write(self.dir.join(name), content)?;
        Ok(())
    }

    fn write_csv(
        &self,
        name: &str,
        content: &str,
        plot_columns: &str,
    ) -> Result<(), PipelineError> {
        self.write(name, content)?;
        if self.emit_gnuplot {
            let stem = name.trim_end_matches(".csv");
            let script = format!(
                "set datafile separator ','\nset key autotitle columnhead\nplot '{name}' using {plot_columns} with lines\n"
            );
            self.write(&format!("{stem}.gp"), &script)?;
        }
        Ok(())
    }
}

fn validate_common(cfg: &RunConfig) -> Result<(), PipelineError> {
    PhysicalConstants::new(
        cfg.constants.m,
        cfg.constants.c,
        cfg.constants.e2,
        cfg.constants.hbar,
    )
    .map_err(|e| PipelineError::Validation(e.to_string()))?;
    cfg.potential
        .validate()
        .map_err(|e| PipelineError::Validation(e.to_string()))?;
    if !(cfg.p > 0.0) {
        return Err(PipelineError::Validation(format!(
            "run.p must be strictly positive, got {}",
            cfg.p
        )));
    }
    Ok(())
}

struct Chain {
    traj: Trajectory,
    spec: Spectrum,
    parseval_rel_err: f64,
}

fn compute_chain(cfg: &RunConfig) -> Result<Chain, PipelineError> {
    let traj = solve_trajectory(&cfg.constants, &cfg.potential, cfg.p, cfg.z0, cfg.grid)
        .map_err(dynamics_error)?;
    let spec = fourier_acceleration(&traj, cfg.freq).map_err(spectral_error)?;
    let (time_side, freq_side) = parseval_energy(&spec, &traj);
    let parseval_rel_err = if time_side > 0.0 {
        ((time_side - freq_side) / time_side).abs()
    } else {
        0.0
    };
    if parseval_rel_err > 1e-8 {
        return Err(PipelineError::Tolerance(format!(
            "Larmor consistency violated: time vs spectrum energies differ by {parseval_rel_err:e} (> 1e-8)"
        )));
    }
    Ok(Chain {
        traj,
        spec,
        parseval_rel_err,
    })
}

fn base_summary(traj: &Trajectory) -> Summary {
    let mut s = Summary::default();
    s.push("v_i", traj.v_i);
    s.push("v_f", traj.v_f);
    s.push("T0", traj.t0);
    s
}

pub fn run_trajectory(cfg: &RunConfig, out: &Outputs) -> Result<(), PipelineError> {
    validate_common(cfg)?;
    let traj = solve_trajectory(&cfg.constants, &cfg.potential, cfg.p, cfg.z0, cfg.grid)
        .map_err(dynamics_error)?;
    out.write_csv("trajectory.csv", &traj.to_csv(), "1:2")?;
    out.write("summary.txt", &base_summary(&traj).render())?;
    Ok(())
}

pub fn run_spectrum(cfg: &RunConfig, out: &Outputs) -> Result<(), PipelineError> {
    validate_common(cfg)?;
    let chain = compute_chain(cfg)?;
    out.write_csv("trajectory.csv", &chain.traj.to_csv(), "1:2")?;
    out.write_csv("spectrum.csv", &chain.spec.to_csv(), "1:4")?;
    let mut summary = base_summary(&chain.traj);
    summary.push("parseval_rel_err", chain.parseval_rel_err);
    out.write("summary.txt", &summary.render())?;
    Ok(())
}

pub fn run_radiation(cfg: &RunConfig, out: &Outputs) -> Result<(), PipelineError> {
    validate_common(cfg)?;
    // the 2/3 polarization averages are recomputed, not assumed
    let (avg_eps, avg_kz) = rrlab_core::radiation::polarization_solid_angle_average(cfg.sphere_n);
    for (name, avg) in [("|eps1_z|^2", avg_eps), ("1-k_z^2c^2/w^2", avg_kz)] {
        if (avg - 2.0 / 3.0).abs() > 1e-6 {
            return Err(PipelineError::Tolerance(format!(
                "angular average of {name} is {avg}, expected 2/3 within 1e-6 \
                 (grid.sphere_n = {})",
                cfg.sphere_n
            )));
        }
    }
    let chain = compute_chain(cfg)?;
    let power = larmor_power(&cfg.constants, &chain.traj);
    out.write_csv("radiation.csv", &radiation_csv(&chain.traj, &power), "1:2")?;
    let mut summary = base_summary(&chain.traj);
    summary.push("E_r", radiated_energy(&cfg.constants, &chain.traj));
    summary.push(
        "emission_prob",
        emission_probability(&cfg.constants, &chain.spec, cfg.ir_cutoff)
            .map_err(radiation_error)?,
    );
    summary.push(
        "ir_log_slope",
        ir_log_slope(&cfg.constants, &chain.spec, cfg.ir_cutoff).map_err(radiation_error)?,
    );
    summary.push("parseval_rel_err", chain.parseval_rel_err);
    out.write("summary.txt", &summary.render())?;
    Ok(())
}

/// The full pipeline behind the `shift` subcommand; also the sweep kernel.
fn shift_summary(cfg: &RunConfig) -> Result<Summary, PipelineError> {
    validate_common(cfg)?;
    let chain = compute_chain(cfg)?;
    let report =
        shift_report(&cfg.constants, &chain.traj, &chain.spec, &cfg.window).map_err(shift_error)?;
    let erratum_agreement = ((report.dz_erratum - report.dz_ld_ode) / report.dz_ld_ode).abs();
    if report.dz_ld_ode != 0.0 && erratum_agreement > 1e-6 {
        return Err(PipelineError::Tolerance(format!(
            "erratum agreement violated: dz_erratum vs dz_ld_ode differ by {erratum_agreement:e} (> 1e-6)"
        )));
    }
    let mut summary = base_summary(&chain.traj);
    summary.push("E_r", radiated_energy(&cfg.constants, &chain.traj));
    summary.push(
        "emission_prob",
        emission_probability(&cfg.constants, &chain.spec, cfg.ir_cutoff)
            .map_err(radiation_error)?,
    );
    summary.push(
        "ir_log_slope",
        ir_log_slope(&cfg.constants, &chain.spec, cfg.ir_cutoff).map_err(radiation_error)?,
    );
    summary.push("dz_ld_closed", report.dz_ld_closed);
    summary.push("dz_ld_ode", report.dz_ld_ode);
    summary.push("dz_quantum", report.dz_quantum);
    summary.push("dz_erratum", report.dz_erratum);
    summary.push("log_term", report.log_term);
    summary.push("gap_over_compton", report.log_term / report.compton);
    summary.push("parseval_rel_err", chain.parseval_rel_err);
    summary.push(
        "erratum_agreement_rel_err",
        if report.dz_ld_ode != 0.0 {
            erratum_agreement
        } else {
            0.0
        },
    );
    Ok(summary)
}

pub fn run_shift(cfg: &RunConfig, out: &Outputs) -> Result<(), PipelineError> {
    let chain = {
        validate_common(cfg)?;
        compute_chain(cfg)?
    };
    out.write_csv("trajectory.csv", &chain.traj.to_csv(), "1:2")?;
    out.write_csv("spectrum.csv", &chain.spec.to_csv(), "1:4")?;
    let power = larmor_power(&cfg.constants, &chain.traj);
    out.write_csv("radiation.csv", &radiation_csv(&chain.traj, &power), "1:2")?;
    let summary = shift_summary(cfg)?;
    out.write("summary.txt", &summary.render())?;
    println!("{}", summary.render());
    Ok(())
}

pub fn run_wkb_check(cfg: &RunConfig, out: &Outputs) -> Result<(), PipelineError> {
    validate_common(cfg)?;
    let chain = compute_chain(cfg)?;
    let mut csv = String::from("hbar,omega,k_z,re_G,im_G,re_G_asym,im_G_asym,rel_error\n");
    for &omega in &cfg.wkb_omegas {
        let prob = WkbProblem {
            consts: cfg.constants,
            potential: cfg.potential,
            p: cfg.p,
            omega,
            k_z: cfg.wkb_k_z,
            hbar_ladder: cfg.hbar_ladder.clone(),
        };
        // kinematics are checked per rung: ℏ comes from the ladder, not
        // from [constants]
        for &hbar in &prob.hbar_ladder {
            prob.with_hbar(hbar)
                .validate()
                .map_err(|e| PipelineError::Validation(e.to_string()))?;
        }
        let rows: Vec<LadderRow> =
            ladder(&prob, &chain.traj, &chain.spec, cfg.z0).map_err(|e| match e {
                rrlab_core::wkb::WkbError::Quadrature(_) => PipelineError::Tolerance(e.to_string()),
                _ => PipelineError::Validation(e.to_string()),
            })?;
        for r in &rows {
            let fields = [
                r.hbar,
                omega,
                cfg.wkb_k_z,
                r.result.g_direct.re,
                r.result.g_direct.im,
                r.result.g_asymptotic.re,
                r.result.g_asymptotic.im,
                r.result.rel_error,
            ];
            let line: Vec<String> = fields.iter().map(|&x| format_g17(x)).collect();
            csv.push_str(&line.join(","));
            csv.push('\n');
        }
    }
    out.write_csv("wkb_ladder.csv", &csv, "1:8")?;
    Ok(())
}

pub fn run_packet(cfg: &RunConfig, out: &Outputs) -> Result<(), PipelineError> {
    validate_common(cfg)?;
    let packet = normalize(&cfg.constants, &cfg.packet)
        .map_err(|e| PipelineError::Validation(e.to_string()))?;
    let momentum_route = position_expectation(&cfg.constants, &packet);
    let (density_route, profile) = charge_density_expectation(&cfg.constants, &packet, &cfg.zgrid)
        .map_err(|e| PipelineError::Tolerance(e.to_string()))?;
    out.write_csv("density.csv", &profile.to_csv(), "1:2")?;
    println!("z_expect_momentum = {}", format_g17(momentum_route));
    println!("z_expect_density = {}", format_g17(density_route));
    let (mass, _, _) = profile.moments();
    println!("rho_mass = {}", format_g17(mass));
    Ok(())
}

pub fn run_renorm(cfg: &RunConfig, out: &Outputs) -> Result<(), PipelineError> {
    validate_common(cfg)?;
    let l = cfg.potential.half_width;
    let csv = renorm_csv(
        &cfg.constants,
        &cfg.potential,
        cfg.potential.center - 3.0 * l,
        cfg.potential.center + 3.0 * l,
        1024,
    );
    out.write_csv("renorm.csv", &csv, "1:2")?;
    let mass_shift = mass_shift_msbar(&cfg.constants, cfg.constants.m, cfg.renorm.mu);
    let forward = forward_shift_from_delta_v(&cfg.constants, cfg.p, &cfg.renorm.delta_v)
        .map_err(|e| PipelineError::Validation(e.to_string()))?;
    println!(
        "mass_shift_pole_coefficient = {}",
        format_g17(mass_shift.pole_coefficient)
    );
    println!(
        "mass_shift_finite_msbar = {}",
        format_g17(mass_shift.finite_msbar)
    );
    println!("epsilon_dimreg = {}", format_g17(cfg.renorm.epsilon_dimreg));
    println!(
        "forward_shift_closed_form = {}",
        format_g17(forward.closed_form)
    );
    println!(
        "forward_shift_classical_oracle = {}",
        format_g17(forward.classical_oracle)
    );
    Ok(())
}

fn apply_axis(cfg: &RunConfig, axis: SweepAxis, value: f64) -> RunConfig {
    let mut point = cfg.clone();
    match axis {
        SweepAxis::Hbar => point.constants.hbar = value,
        SweepAxis::VMinusInf => {
            point.potential = PotentialSpec {
                v_minus_inf: value,
                ..cfg.potential
            }
        }
        SweepAxis::PBar => {
            point.p = value;
            point.packet.p_bar = value;
        }
    }
    point
}

fn thread_cap() -> usize {
    std::env::var("RRLAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

pub fn run_sweep(cfg: &RunConfig, out: &Outputs) -> Result<(), PipelineError> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| {
        PipelineError::Validation("sweep requires a [sweep] section with axis and values".into())
    })?;
    if sweep.values.is_empty() {
        return Err(PipelineError::Validation("sweep.values is empty".into()));
    }
    let axis_name = match sweep.axis {
        SweepAxis::Hbar => "hbar",
        SweepAxis::VMinusInf => "v_minus_inf",
        SweepAxis::PBar => "p_bar",
    };

    // results are collected by index so parallelism never reorders rows
    let n_workers = thread_cap().min(sweep.values.len());
    let mut results: Vec<Option<Result<Summary, PipelineError>>> =
        (0..sweep.values.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let chunks = results.chunks_mut(sweep.values.len().div_ceil(n_workers));
        for (chunk_idx, chunk) in chunks.enumerate() {
            let stride = sweep.values.len().div_ceil(n_workers);
            let values = &sweep.values;
            let axis = sweep.axis;
            scope.spawn(move || {
                for (j, slot) in chunk.iter_mut().enumerate() {
                    let point = apply_axis(cfg, axis, values[chunk_idx * stride + j]);
                    *slot = Some(shift_summary(&point));
                }
            });
        }
    });

    let mut csv = format!("{axis_name},{}\n", SUMMARY_KEYS.join(","));
    for (value, slot) in sweep.values.iter().zip(results) {
        let summary = slot.expect("worker filled every slot")?;
        let mut row = vec![format_g17(*value)];
        for key in SUMMARY_KEYS {
            let (_, v) = summary
                .entries
                .iter()
                .find(|(k, _)| *k == key)
                .expect("shift summary carries every key");
            row.push(format_g17(*v));
        }
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    out.write_csv("sweep.csv", &csv, "1:8")?;
    Ok(())
}
