//! Shared quadrature and transform machinery.

pub mod dft;
pub mod quadrature;
pub mod uniform;

pub use quadrature::{
    gauss_legendre, gauss_legendre_on, integrate_adaptive, integrate_adaptive_complex,
    QuadratureError,
};
pub use uniform::{
    cumulative_uniform, integrate_uniform, integrate_uniform_complex, trapezoid_uniform,
    trapezoid_uniform_complex,
};
