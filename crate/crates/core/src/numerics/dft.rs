//! Trapezoid-rule Fourier transform of uniformly sampled real data on
//! explicit frequency lists.

use num_complex::Complex64;

/// How many recurrence steps to take before regenerating the phasor exactly.
/// Keeps the accumulated rotation error at the few-ulp level.
const PHASOR_CHUNK: usize = 128;

/// ∫ f(t) e^{iωt} dt by the trapezoid rule on a uniform grid starting at `t0`.
pub fn transform_at(t0: f64, h: f64, samples: &[f64], omega: f64) -> Complex64 {
    let n = samples.len();
    if n < 2 {
        return Complex64::new(0.0, 0.0);
    }
    let step = Complex64::from_polar(1.0, omega * h);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut k = 0;
    while k < n {
        let mut phase = Complex64::from_polar(1.0, omega * (t0 + h * k as f64));
        let end = (k + PHASOR_CHUNK).min(n);
        for (j, &s) in samples[k..end].iter().enumerate() {
            let idx = k + j;
            let w = if idx == 0 || idx == n - 1 { 0.5 } else { 1.0 };
            acc += (w * s) * phase;
            phase *= step;
        }
        k = end;
    }
    acc * h
}

/// Transform evaluated on a list of frequencies.
pub fn transform_many(t0: f64, h: f64, samples: &[f64], omegas: &[f64]) -> Vec<Complex64> {
    omegas
        .iter()
        .map(|&w| transform_at(t0, h, samples, w))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_transform_closed_form() {
        let n = 8192;
        let t0 = -12.0;
        let h = 24.0 / (n - 1) as f64;
        let samples: Vec<f64> = (0..n)
            .map(|k| {
                let t = t0 + h * k as f64;
                (-t * t).exp()
            })
            .collect();
        for omega in [0.0, 0.7, -2.3, 4.0] {
            let got = transform_at(t0, h, &samples, omega);
            let expect = std::f64::consts::PI.sqrt() * (-omega * omega / 4.0).exp();
            assert_relative_eq!(got.re, expect, epsilon = 1e-12);
            assert!(got.im.abs() < 1e-12);
        }
    }

    #[test]
    fn phasor_recurrence_matches_direct_sum() {
        let n = 5000;
        let t0 = -3.0;
        let h = 1.3e-3;
        let samples: Vec<f64> = (0..n).map(|k| ((k as f64) * 0.01).sin()).collect();
        let omega = 37.5;
        let got = transform_at(t0, h, &samples, omega);
        let mut direct = Complex64::new(0.0, 0.0);
        for (k, &s) in samples.iter().enumerate() {
            let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
            let t = t0 + h * k as f64;
            direct += w * s * Complex64::from_polar(1.0, omega * t);
        }
        direct *= h;
        assert!((got - direct).norm() < 1e-13 * direct.norm().max(1.0));
    }
}
