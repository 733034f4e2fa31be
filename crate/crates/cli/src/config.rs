//! Flat INI-style configuration: `[section]` headers named after modules,
//! `key = value` lines, `#`/`;` comments. Parse errors carry line and key
//! context.

use rrlab_core::dynamics::GridSpec;
use rrlab_core::potential::{PotentialSpec, RampShape};
use rrlab_core::renorm::{DeltaV, RenormInputs};
use rrlab_core::shift::WindowSpec;
use rrlab_core::spectral::FreqGridSpec;
use rrlab_core::wavepacket::{WavePacketSpec, ZGridSpec};
use rrlab_core::PhysicalConstants;
use std::collections::BTreeMap;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown section `[{section}]`")]
    UnknownSection { line: usize, section: String },
    #[error("line {line}: unknown key `{section}.{key}`")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("line {line}: `{section}.{key}` = `{value}` is not {expected}")]
    BadValue {
        line: usize,
        section: String,
        key: String,
        value: String,
        expected: &'static str,
    },
    #[error("key `{0}` appears before any [section] header")]
    KeyOutsideSection(usize),
}

const SECTIONS: &[&str] = &[
    "constants",
    "potential",
    "run",
    "packet",
    "grid",
    "radiation",
    "window",
    "wkb",
    "renorm",
    "sweep",
    "output",
];

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

#[derive(Debug, Default)]
struct Ini {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

fn parse_ini(text: &str) -> Result<Ini, ConfigError> {
    let mut ini = Ini::default();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = match raw.find(['#', ';']) {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if stripped.is_empty() {
            continue;
        }
        if let Some(name) = stripped.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::Malformed {
                    line,
                    text: stripped.to_string(),
                })?
                .trim()
                .to_string();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(ConfigError::UnknownSection {
                    line,
                    section: name,
                });
            }
            ini.sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let (key, value) = stripped
            .split_once('=')
            .ok_or_else(|| ConfigError::Malformed {
                line,
                text: stripped.to_string(),
            })?;
        let section = current
            .clone()
            .ok_or(ConfigError::KeyOutsideSection(line))?;
        ini.sections.entry(section).or_default().insert(
            key.trim().to_string(),
            Entry {
                value: value.trim().to_string(),
                line,
            },
        );
    }
    Ok(ini)
}

/// Typed view over one section; tracks which keys were consumed so that
/// leftovers become errors.
struct Section<'a> {
    name: &'a str,
    entries: BTreeMap<String, Entry>,
}

impl<'a> Section<'a> {
    fn f64(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.entries.remove(key) {
            None => Ok(default),
            Some(e) => e.value.parse().map_err(|_| ConfigError::BadValue {
                line: e.line,
                section: self.name.to_string(),
                key: key.to_string(),
                value: e.value,
                expected: "a decimal number",
            }),
        }
    }

    fn usize(&mut self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.entries.remove(key) {
            None => Ok(default),
            Some(e) => e.value.parse().map_err(|_| ConfigError::BadValue {
                line: e.line,
                section: self.name.to_string(),
                key: key.to_string(),
                value: e.value,
                expected: "an unsigned integer",
            }),
        }
    }

    fn string(&mut self, key: &str, default: &str) -> String {
        self.entries
            .remove(key)
            .map_or_else(|| default.to_string(), |e| e.value)
    }

    fn f64_list(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
        match self.entries.remove(key) {
            None => Ok(default.to_vec()),
            Some(e) => e
                .value
                .split(',')
                .map(|tok| tok.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|_| ConfigError::BadValue {
                    line: e.line,
                    section: self.name.to_string(),
                    key: key.to_string(),
                    value: e.value,
                    expected: "a comma-separated list of numbers",
                }),
        }
    }

    fn finish(self) -> Result<(), ConfigError> {
        if let Some((key, e)) = self.entries.into_iter().next() {
            return Err(ConfigError::UnknownKey {
                line: e.line,
                section: self.name.to_string(),
                key,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Hbar,
    VMinusInf,
    PBar,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// Everything a pipeline run needs, with validated sections.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub constants: PhysicalConstants,
    pub potential: PotentialSpec,
    pub p: f64,
    pub z0: f64,
    pub packet: WavePacketSpec,
    pub grid: GridSpec,
    pub freq: FreqGridSpec,
    pub sphere_n: usize,
    pub zgrid: ZGridSpec,
    pub ir_cutoff: f64,
    pub window: WindowSpec,
    pub wkb_omegas: Vec<f64>,
    pub wkb_k_z: f64,
    pub hbar_ladder: Vec<f64>,
    pub renorm: RenormInputs,
    pub sweep: Option<SweepSpec>,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut ini = parse_ini(text)?;
        let mut take = |name: &'static str| Section {
            name,
            entries: ini.sections.remove(name).unwrap_or_default(),
        };

        let mut s = take("constants");
        let constants = PhysicalConstants {
            m: s.f64("m", 1.0)?,
            c: s.f64("c", 1.0)?,
            e2: s.f64("e2", 1.0)?,
            hbar: s.f64("hbar", 1.0)?,
        };
        s.finish()?;

        let mut s = take("potential");
        let shape_text = s.string("shape", "smoothstep_c2");
        let shape = match shape_text.as_str() {
            "smoothstep_c2" => RampShape::SmoothstepC2,
            "tanh_approx" => RampShape::TanhApprox,
            _ => {
                return Err(ConfigError::BadValue {
                    line: 0,
                    section: "potential".into(),
                    key: "shape".into(),
                    value: shape_text,
                    expected: "`smoothstep_c2` or `tanh_approx`",
                })
            }
        };
        let potential = PotentialSpec {
            v_minus_inf: s.f64("v_minus_inf", 5e-4)?,
            half_width: s.f64("half_width", 1.0)?,
            shape,
            center: s.f64("center", 0.0)?,
        };
        s.finish()?;

        let mut s = take("run");
        let p = s.f64("p", 0.1)?;
        let z0 = s.f64("z0", 5.0)?;
        s.finish()?;

        let mut s = take("packet");
        let packet = WavePacketSpec::new(
            s.f64("p_bar", 0.1)?,
            s.f64("delta_p", 0.01)?,
            s.f64("z0", 5.0)?,
        );
        s.finish()?;

        let mut s = take("grid");
        let grid = GridSpec {
            n: s.usize("time_n", 1 << 14)?,
            pad_factor: s.f64("pad_factor", 10.0)?,
        };
        let omega_max = s.f64("omega_max", -1.0)?;
        let freq_n = s.usize("freq_n_per_side", 0)?;
        let freq = FreqGridSpec {
            omega_max: (omega_max > 0.0).then_some(omega_max),
            n_per_side: (freq_n > 0).then_some(freq_n),
        };
        let sphere_n = s.usize("sphere_n", 64)?;
        let zgrid = ZGridSpec {
            n: s.usize("z_n", 4096)?,
            span_sigmas: s.f64("z_span_sigmas", 8.0)?,
            time: 0.0,
        };
        s.finish()?;

        let mut s = take("radiation");
        let ir_cutoff = s.f64("ir_cutoff", 1e-6)?;
        s.finish()?;

        let mut s = take("window");
        let window = WindowSpec {
            taper_fraction: s.f64("taper_fraction", 0.1)?,
        };
        s.finish()?;

        let mut s = take("wkb");
        let wkb_omegas = s.f64_list("omega", &[0.02])?;
        let wkb_k_z = s.f64("k_z", 0.0)?;
        let hbar_ladder = s.f64_list("hbar_ladder", &[4e-3, 2e-3, 1e-3, 5e-4])?;
        s.finish()?;

        let mut s = take("renorm");
        let renorm = RenormInputs {
            mu: s.f64("mu", 1.0)?,
            epsilon_dimreg: s.f64("epsilon_dimreg", 1e-3)?,
            delta_v: DeltaV::single_box(
                s.f64("delta_v_center", 0.0)?,
                s.f64("delta_v_width", 1.0)?,
                s.f64("delta_v_height", 1e-8)?,
            ),
        };
        s.finish()?;

        let mut s = take("sweep");
        let axis_text = s.string("axis", "");
        let values = s.f64_list("values", &[])?;
        let sweep = if axis_text.is_empty() {
            None
        } else {
            let axis = match axis_text.as_str() {
                "hbar" => SweepAxis::Hbar,
                "v_minus_inf" => SweepAxis::VMinusInf,
                "p_bar" => SweepAxis::PBar,
                _ => {
                    return Err(ConfigError::BadValue {
                        line: 0,
                        section: "sweep".into(),
                        key: "axis".into(),
                        value: axis_text,
                        expected: "`hbar`, `v_minus_inf` or `p_bar`",
                    })
                }
            };
            Some(SweepSpec { axis, values })
        };
        s.finish()?;

        let mut s = take("output");
        let out_dir = PathBuf::from(s.string("dir", "out"));
        s.finish()?;

        Ok(RunConfig {
            constants,
            potential,
            p,
            z0,
            packet,
            grid,
            freq,
            sphere_n,
            zgrid,
            ir_cutoff,
            window,
            wkb_omegas,
            wkb_k_z,
            hbar_ladder,
            renorm,
            sweep,
            out_dir,
        })
    }
}
