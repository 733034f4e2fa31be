//! The external potential family V(z): a single monotone ramp with
//! V(-∞) = V₋∞, V(+∞) = 0, and a derivative supported on a finite interval.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PotentialError {
    #[error("half_width must be strictly positive, got {0}")]
    NonPositiveHalfWidth(f64),
    #[error("parameter `{name}` is not finite")]
    NotFinite { name: &'static str },
}

/// Value of V and its first two derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSample {
    pub v: f64,
    pub vp: f64,
    pub vpp: f64,
}

/// Anything that can act as the external potential.
pub trait Potential {
    fn eval(&self, z: f64) -> PotentialSample;

    /// Asymptotic value V(-∞).
    fn v_minus_inf(&self) -> f64;

    /// sup over z of V(z), used for turning-point checks.
    fn sup_v(&self) -> f64;

    /// Interval outside which V'(z) = 0 (to working precision).
    /// `None` means the potential is flat everywhere.
    fn derivative_support(&self) -> Option<(f64, f64)>;
}

impl<P: Potential + ?Sized> Potential for &P {
    fn eval(&self, z: f64) -> PotentialSample {
        (**self).eval(z)
    }
    fn v_minus_inf(&self) -> f64 {
        (**self).v_minus_inf()
    }
    fn sup_v(&self) -> f64 {
        (**self).sup_v()
    }
    fn derivative_support(&self) -> Option<(f64, f64)> {
        (**self).derivative_support()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RampShape {
    /// C² quintic smoothstep ramp; V' vanishes exactly outside the ramp.
    SmoothstepC2,
    /// tanh profile with the same peak slope. Smooth everywhere but its
    /// derivative has unbounded support, so surface-term arguments hold
    /// only approximately; provided for smoothness-sensitivity studies.
    TanhApprox,
}

/// A single accelerating ramp: V = V₋∞ on the left plateau, 0 on the right,
/// ramping monotonically over `[center - half_width, center + half_width]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    pub v_minus_inf: f64,
    pub half_width: f64,
    pub shape: RampShape,
    pub center: f64,
}

/// Quintic smoothstep and derivatives: s(0)=0, s(1)=1, s'=s''=0 at both ends.
fn smoothstep(u: f64) -> (f64, f64, f64) {
    let s = u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
    let sp = 30.0 * u * u * (1.0 - u) * (1.0 - u);
    let spp = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
    (s, sp, spp)
}

/// Width at which sech²((z-center)/w) drops below 1e-12 of its peak,
/// matching the compact-support threshold of the spectral layer.
const TANH_SUPPORT_WIDTHS: f64 = 15.0;

impl PotentialSpec {
    pub fn new(v_minus_inf: f64, half_width: f64, shape: RampShape, center: f64) -> Self {
        Self {
            v_minus_inf,
            half_width,
            shape,
            center,
        }
    }

    pub fn smoothstep(v_minus_inf: f64, half_width: f64) -> Self {
        Self::new(v_minus_inf, half_width, RampShape::SmoothstepC2, 0.0)
    }

    pub fn validate(&self) -> Result<(), PotentialError> {
        if !(self.half_width > 0.0) {
            return Err(PotentialError::NonPositiveHalfWidth(self.half_width));
        }
        for (name, v) in [("v_minus_inf", self.v_minus_inf), ("center", self.center)] {
            if !v.is_finite() {
                return Err(PotentialError::NotFinite { name });
            }
        }
        Ok(())
    }

    /// tanh width chosen so the peak slope matches the smoothstep ramp:
    /// V'(center) = -15 V₋∞ / (16 L) in both shapes.
    fn tanh_width(&self) -> f64 {
        8.0 * self.half_width / 15.0
    }
}

impl Potential for PotentialSpec {
    fn eval(&self, z: f64) -> PotentialSample {
        let l = self.half_width;
        match self.shape {
            RampShape::SmoothstepC2 => {
                let u = (z - self.center + l) / (2.0 * l);
                if u <= 0.0 {
                    PotentialSample {
                        v: self.v_minus_inf,
                        vp: 0.0,
                        vpp: 0.0,
                    }
                } else if u >= 1.0 {
                    PotentialSample {
                        v: 0.0,
                        vp: 0.0,
                        vpp: 0.0,
                    }
                } else {
                    let (s, sp, spp) = smoothstep(u);
                    PotentialSample {
                        v: self.v_minus_inf * (1.0 - s),
                        vp: -self.v_minus_inf * sp / (2.0 * l),
                        vpp: -self.v_minus_inf * spp / (4.0 * l * l),
                    }
                }
            }
            RampShape::TanhApprox => {
                let w = self.tanh_width();
                let x = (z - self.center) / w;
                let t = x.tanh();
                let sech2 = 1.0 - t * t;
                PotentialSample {
                    v: 0.5 * self.v_minus_inf * (1.0 - t),
                    vp: -0.5 * self.v_minus_inf * sech2 / w,
                    vpp: self.v_minus_inf * sech2 * t / (w * w),
                }
            }
        }
    }

    fn v_minus_inf(&self) -> f64 {
        self.v_minus_inf
    }

    fn sup_v(&self) -> f64 {
        self.v_minus_inf.max(0.0)
    }

    fn derivative_support(&self) -> Option<(f64, f64)> {
        let half = match self.shape {
            RampShape::SmoothstepC2 => self.half_width,
            RampShape::TanhApprox => TANH_SUPPORT_WIDTHS * self.tanh_width(),
        };
        Some((self.center - half, self.center + half))
    }
}

/// Sum of ramps. Two opposite ramps make a well or bump with V(±∞) = 0,
/// which is how the infrared-convergence studies build their potential.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositePotential {
    parts: Vec<PotentialSpec>,
    sup: f64,
}

impl CompositePotential {
    pub fn new(parts: Vec<PotentialSpec>) -> Self {
        let mut sup = f64::NEG_INFINITY;
        // plateau values are attained outside every ramp; interior extrema are
        // bracketed by sampling the union of supports
        let lo = parts
            .iter()
            .filter_map(|p| p.derivative_support())
            .map(|(a, _)| a)
            .fold(f64::INFINITY, f64::min);
        let hi = parts
            .iter()
            .filter_map(|p| p.derivative_support())
            .map(|(_, b)| b)
            .fold(f64::NEG_INFINITY, f64::max);
        let total = |z: f64| -> f64 { parts.iter().map(|p| p.eval(z).v).sum() };
        if lo.is_finite() && hi.is_finite() {
            let n = 4096;
            for k in 0..=n {
                let z = lo + (hi - lo) * k as f64 / n as f64;
                sup = sup.max(total(z));
            }
        }
        sup = sup.max(total(lo - 1.0)).max(total(hi + 1.0));
        Self { parts, sup }
    }

    /// Symmetric well/bump of the given depth (negative = well), flat at ±∞.
    pub fn symmetric_bump(height: f64, half_width: f64, separation: f64) -> Self {
        Self::new(vec![
            PotentialSpec::new(
                -height,
                half_width,
                RampShape::SmoothstepC2,
                -0.5 * separation,
            ),
            PotentialSpec::new(
                height,
                half_width,
                RampShape::SmoothstepC2,
                0.5 * separation,
            ),
        ])
    }
}

impl Potential for CompositePotential {
    fn eval(&self, z: f64) -> PotentialSample {
        let mut acc = PotentialSample {
            v: 0.0,
            vp: 0.0,
            vpp: 0.0,
        };
        for p in &self.parts {
            let s = p.eval(z);
            acc.v += s.v;
            acc.vp += s.vp;
            acc.vpp += s.vpp;
        }
        acc
    }

    fn v_minus_inf(&self) -> f64 {
        self.parts.iter().map(|p| p.v_minus_inf).sum()
    }

    fn sup_v(&self) -> f64 {
        self.sup
    }

    fn derivative_support(&self) -> Option<(f64, f64)> {
        let mut hull: Option<(f64, f64)> = None;
        for p in &self.parts {
            if let Some((a, b)) = p.derivative_support() {
                hull = Some(match hull {
                    None => (a, b),
                    Some((lo, hi)) => (lo.min(a), hi.max(b)),
                });
            }
        }
        hull
    }
}
