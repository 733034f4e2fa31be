//! Composite rules on uniformly spaced samples.
//!
//! The fourth-order rules integrate the piecewise cubic through each set of
//! four neighbouring samples over the middle interval, so that the cumulative
//! and definite forms agree exactly at every grid point.

use num_complex::Complex64;

/// Cumulative integral F(t_k) = ∫_{t_0}^{t_k} f dt, fourth order, F[0] = 0.
pub fn cumulative_uniform(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        for i in 1..n {
            out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
        }
        return out;
    }
    let c = h / 24.0;
    // first interval: cubic through samples 0..=3
    out[1] = c * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    for i in 1..n - 2 {
        out[i + 1] = out[i] + c * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
    }
    out[n - 1] = out[n - 2] + c * (9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4]);
    out
}

/// Definite integral over the whole grid, fourth order.
pub fn integrate_uniform(f: &[f64], h: f64) -> f64 {
    *cumulative_uniform(f, h).last().unwrap_or(&0.0)
}

/// Complex-valued fourth-order definite integral.
pub fn integrate_uniform_complex(f: &[Complex64], h: f64) -> Complex64 {
    let re: Vec<f64> = f.iter().map(|c| c.re).collect();
    let im: Vec<f64> = f.iter().map(|c| c.im).collect();
    Complex64::new(integrate_uniform(&re, h), integrate_uniform(&im, h))
}

/// Plain trapezoid rule on uniform samples.
pub fn trapezoid_uniform(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    if n < 2 {
        return 0.0;
    }
    let interior: f64 = f[1..n - 1].iter().sum();
    h * (0.5 * (f[0] + f[n - 1]) + interior)
}

/// Trapezoid rule for complex samples.
pub fn trapezoid_uniform_complex(f: &[Complex64], h: f64) -> Complex64 {
    let n = f.len();
    if n < 2 {
        return Complex64::new(0.0, 0.0);
    }
    let interior: Complex64 = f[1..n - 1].iter().sum();
    h * (0.5 * (f[0] + f[n - 1]) + interior)
}
