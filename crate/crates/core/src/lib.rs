//! A desk-scale numerics laboratory for the radiation reaction of a
//! nonrelativistic charge crossing a static potential ramp.
//!
//! The crate computes the classical (Lorentz-Dirac) and semiclassical
//! position shifts of the outgoing particle by several independent routes,
//! the radiated Larmor spectrum and soft-photon emission probability, the
//! WKB photon-emission amplitude and its stationary-phase limit, Gaussian
//! wave-packet expectations, and the one-loop corrections to the potential.
//! Every route is paired with an independent cross-check: time vs frequency
//! domain, closed form vs quadrature, exact matrix element vs asymptotics.

// `!(x > 0.0)` guards reject NaN along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod csvio;
pub mod dynamics;
pub mod numerics;
pub mod potential;
pub mod radiation;
pub mod renorm;
pub mod shift;
pub mod spectral;
pub mod wavepacket;
pub mod wkb;

pub use constants::PhysicalConstants;
pub use dynamics::{GridSpec, Trajectory};
pub use potential::{CompositePotential, Potential, PotentialSpec, RampShape};
pub use radiation::RadiationReport;
pub use shift::{ShiftReport, WindowSpec};
pub use spectral::{FreqGridSpec, Spectrum};
pub use wavepacket::WavePacketSpec;
pub use wkb::WkbProblem;
