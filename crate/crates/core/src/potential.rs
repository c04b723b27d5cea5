//! Double-well potentials `F` with wells at ±1.

use serde::{Deserialize, Serialize};

/// Even double-well potential with `F(±1) = 0` and `F > 0` elsewhere.
///
/// Only the quartic family `F(u) = s·½(1 − u²)²` is provided; `s = 1` is the
/// standard choice and `s = 0` gives the degenerate zero potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    scale: f64,
}

impl Default for Potential {
    fn default() -> Self {
        Self::quartic()
    }
}

impl Potential {
    pub fn quartic() -> Self {
        Self { scale: 1.0 }
    }

    /// Quartic potential multiplied by `scale ≥ 0`.
    pub fn scaled_quartic(scale: f64) -> Self {
        assert!(scale >= 0.0 && scale.is_finite(), "potential scale must be nonnegative");
        Self { scale }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    #[inline]
    pub fn value(&self, u: f64) -> f64 {
        let w = 1.0 - u * u;
        0.5 * self.scale * w * w
    }

    /// `f = F′`.
    #[inline]
    pub fn deriv(&self, u: f64) -> f64 {
        2.0 * self.scale * u * (u * u - 1.0)
    }

    /// `f′ = F″`.
    #[inline]
    pub fn second_deriv(&self, u: f64) -> f64 {
        self.scale * (6.0 * u * u - 2.0)
    }

    /// Point beyond which `F″ > 0`.
    pub fn convexity_threshold(&self) -> f64 {
        1.0 / 3f64.sqrt()
    }

    /// `max |f′|` over `[−k0, k0]`.
    pub fn max_abs_second_deriv(&self, k0: f64) -> f64 {
        let k0 = k0.abs();
        self.scale * (6.0 * k0 * k0 - 2.0).abs().max(2.0)
    }

    /// `√F(u)`.
    #[inline]
    pub fn sqrt_value(&self, u: f64) -> f64 {
        (0.5 * self.scale).sqrt() * (1.0 - u * u).abs()
    }

    /// `𝓕(u) = ∫₀ᵘ √F(τ) dτ`, odd in `u`.
    pub fn sqrt_primitive(&self, u: f64) -> f64 {
        let c = (0.5 * self.scale).sqrt();
        let a = u.abs();
        let v = if a <= 1.0 {
            a - a * a * a / 3.0
        } else {
            a * a * a / 3.0 - a + 4.0 / 3.0
        };
        c * v * u.signum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::adaptive_simpson;

    #[test]
    fn wells_and_roots() {
        let p = Potential::quartic();
        assert_eq!(p.value(1.0), 0.0);
        assert_eq!(p.value(-1.0), 0.0);
        assert_eq!(p.deriv(0.0), 0.0);
        assert_eq!(p.deriv(1.0), 0.0);
        assert!(p.deriv(0.5) < 0.0);
        for k in 1..100 {
            let u = -1.0 + 0.02 * k as f64;
            if (u.abs() - 1.0).abs() > 1e-12 {
                assert!(p.value(u) > 0.0);
            }
            assert_eq!(p.value(u), p.value(-u));
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = Potential::scaled_quartic(1.7);
        let h = 1e-6;
        for &u in &[-1.3, -0.4, 0.0, 0.2, 0.9, 1.2] {
            let fd = (p.value(u + h) - p.value(u - h)) / (2.0 * h);
            assert!((fd - p.deriv(u)).abs() < 1e-7);
            let fd2 = (p.deriv(u + h) - p.deriv(u - h)) / (2.0 * h);
            assert!((fd2 - p.second_deriv(u)).abs() < 1e-7);
        }
    }

    #[test]
    fn sqrt_primitive_matches_quadrature() {
        let p = Potential::quartic();
        for &u in &[-1.4, -1.0, -0.3, 0.0, 0.5, 1.0, 1.25] {
            let q = if u >= 0.0 {
                adaptive_simpson(&|x| p.value(x).sqrt(), 0.0, u, 1e-13)
            } else {
                -adaptive_simpson(&|x| p.value(x).sqrt(), u, 0.0, 1e-13)
            };
            assert!((q - p.sqrt_primitive(u)).abs() < 1e-10, "u = {u}");
        }
        let jump = p.sqrt_primitive(1.0) - p.sqrt_primitive(-1.0);
        assert!((jump - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-14);
    }
}
