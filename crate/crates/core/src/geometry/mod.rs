//! Two-dimensional space forms, their grid charts and discrete operators.
//!
//! Three models are supported, each with one chart:
//!
//! | form | κ | chart coordinates `(x¹, x²)` | metric |
//! |------|---|-------------------------------|--------|
//! | flat torus | 0 | periodic square `(x, y)` | `dx² + dy²` |
//! | round sphere | +1 | latitude-longitude `(θ, φ)`, θ colatitude | `dθ² + sin²θ dφ²` |
//! | hyperbolic disk | −1 | geodesic polar `(ρ, ϑ)` | `dρ² + sinh²ρ dϑ²` |
//!
//! The curved charts share the warped form `(dx¹)² + sn_κ(x¹)² (dx²)²`.

mod grid;
pub(crate) mod ops;

pub use grid::{BoundaryPolicy, GridChart, ScalarField};
pub use ops::HessianField;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub x1: f64,
    pub x2: f64,
}

impl ChartPoint {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Chart {
    PeriodicSquare { side: f64 },
    GeodesicPolar { rho_max: f64 },
    LatLong,
}

/// A constant-curvature model surface together with its chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceForm {
    kappa: i8,
    chart: Chart,
}

impl SpaceForm {
    pub fn flat_torus(side: f64) -> Self {
        assert!(side > 0.0 && side.is_finite());
        Self {
            kappa: 0,
            chart: Chart::PeriodicSquare { side },
        }
    }

    pub fn sphere() -> Self {
        Self {
            kappa: 1,
            chart: Chart::LatLong,
        }
    }

    /// Geodesic disk of radius `rho_max` in the hyperbolic plane.
    pub fn hyperbolic(rho_max: f64) -> Self {
        assert!(rho_max > 0.0 && rho_max.is_finite());
        Self {
            kappa: -1,
            chart: Chart::GeodesicPolar { rho_max },
        }
    }

    pub fn kappa(&self) -> i8 {
        self.kappa
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub const fn dimension(&self) -> usize {
        2
    }

    /// Ricci lower bound `λ = (N − 1)κ`, attained on space forms.
    pub fn lambda(&self) -> f64 {
        (self.dimension() as f64 - 1.0) * self.kappa as f64
    }

    /// Injectivity radius; the hyperbolic value is capped at the chart radius.
    pub fn inj_radius(&self) -> f64 {
        match self.chart {
            Chart::PeriodicSquare { side } => 0.5 * side,
            Chart::LatLong => PI,
            Chart::GeodesicPolar { rho_max } => rho_max,
        }
    }

    pub fn id(&self) -> &'static str {
        match self.kappa {
            0 => "flat-torus",
            1 => "sphere",
            _ => "hyperbolic",
        }
    }

    /// Warping function `sn_κ`.
    #[inline]
    pub fn sn(&self, r: f64) -> f64 {
        match self.kappa {
            0 => r,
            1 => r.sin(),
            _ => r.sinh(),
        }
    }

    #[inline]
    pub fn sn_prime(&self, r: f64) -> f64 {
        match self.kappa {
            0 => 1.0,
            1 => r.cos(),
            _ => r.cosh(),
        }
    }

    /// Geodesic curvature of a geodesic circle of radius `r`, `sn′/sn`.
    #[inline]
    pub fn ct(&self, r: f64) -> f64 {
        match self.kappa {
            0 => 1.0 / r,
            1 => 1.0 / r.tan(),
            _ => 1.0 / r.tanh(),
        }
    }

    /// `r·sn′(r)/sn(r)`, continuous at `r = 0` with value 1.
    #[inline]
    fn r_ct(&self, r: f64) -> f64 {
        if self.kappa == 0 {
            1.0
        } else if r.abs() < 1e-4 {
            let r2 = r * r;
            // series of r cot r and r coth r
            1.0 - self.kappa as f64 * r2 / 3.0 - r2 * r2 / 45.0
        } else {
            r * self.ct(r)
        }
    }

    pub fn contains(&self, p: ChartPoint) -> bool {
        if !(p.x1.is_finite() && p.x2.is_finite()) {
            return false;
        }
        match self.chart {
            Chart::PeriodicSquare { side } => (0.0..=side).contains(&p.x1) && (0.0..=side).contains(&p.x2),
            Chart::LatLong => (0.0..=PI).contains(&p.x1),
            Chart::GeodesicPolar { rho_max } => (0.0..=rho_max).contains(&p.x1),
        }
    }

    fn check(&self, p: ChartPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "point ({}, {}) outside the {} chart",
                p.x1,
                p.x2,
                self.id()
            )))
        }
    }

    /// Closed-form geodesic distance between two chart points.
    pub fn distance(&self, p: ChartPoint, q: ChartPoint) -> Result<f64> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.distance_unchecked(p, q))
    }

    /// Distance without the chart-bounds check; used on grid nodes.
    #[inline]
    pub fn distance_unchecked(&self, p: ChartPoint, q: ChartPoint) -> f64 {
        match self.chart {
            Chart::PeriodicSquare { side } => {
                let dx = min_image(p.x1 - q.x1, side);
                let dy = min_image(p.x2 - q.x2, side);
                dx.hypot(dy)
            }
            Chart::LatLong => {
                // haversine form of the central angle
                let a = (0.5 * (p.x1 - q.x1)).sin();
                let b = (0.5 * (p.x2 - q.x2)).sin();
                let h = a * a + p.x1.sin() * q.x1.sin() * b * b;
                2.0 * h.clamp(0.0, 1.0).sqrt().asin()
            }
            Chart::GeodesicPolar { .. } => {
                // cosh d = cosh ρ₁ cosh ρ₂ − sinh ρ₁ sinh ρ₂ cos Δϑ, in half-angle form
                let a = (0.5 * (p.x1 - q.x1)).sinh();
                let b = (0.5 * (p.x2 - q.x2)).sin();
                let h = a * a + p.x1.sinh() * q.x1.sinh() * b * b;
                2.0 * h.max(0.0).sqrt().asinh()
            }
        }
    }

    /// Direction angle at `center` of the geodesic towards `x`, in a fixed
    /// tangent frame at `center`.
    pub fn bearing(&self, center: ChartPoint, x: ChartPoint) -> f64 {
        match self.chart {
            Chart::PeriodicSquare { side } => {
                let dx = min_image(x.x1 - center.x1, side);
                let dy = min_image(x.x2 - center.x2, side);
                dy.atan2(dx)
            }
            Chart::LatLong => {
                let emb = |p: ChartPoint| [p.x1.sin() * p.x2.cos(), p.x1.sin() * p.x2.sin(), p.x1.cos()];
                let (t, f) = (center.x1, center.x2);
                let c = emb(center);
                let e1 = [t.cos() * f.cos(), t.cos() * f.sin(), -t.sin()];
                let e2 = [-f.sin(), f.cos(), 0.0];
                let y = emb(x);
                let yc: f64 = (0..3).map(|k| y[k] * c[k]).sum();
                let v: Vec<f64> = (0..3).map(|k| y[k] - yc * c[k]).collect();
                let a: f64 = (0..3).map(|k| v[k] * e1[k]).sum();
                let b: f64 = (0..3).map(|k| v[k] * e2[k]).sum();
                b.atan2(a)
            }
            Chart::GeodesicPolar { .. } => {
                let mink = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] - a[2] * b[2];
                let emb = |p: ChartPoint| [p.x1.sinh() * p.x2.cos(), p.x1.sinh() * p.x2.sin(), p.x1.cosh()];
                let (r, f) = (center.x1, center.x2);
                let c = emb(center);
                let e1 = [r.cosh() * f.cos(), r.cosh() * f.sin(), r.sinh()];
                let e2 = [-f.sin(), f.cos(), 0.0];
                let y = emb(x);
                let yc = mink(&y, &c);
                let v = [y[0] + yc * c[0], y[1] + yc * c[1], y[2] + yc * c[2]];
                mink(&v, &e2).atan2(mink(&v, &e1))
            }
        }
    }

    /// Closed form of `Δ(d²)` at distance `d` from a pole:
    /// `2 + 2(N − 1)·d·sn′(d)/sn(d)`.
    pub fn laplacian_of_distance_squared(&self, d: f64) -> Result<f64> {
        if !(d >= 0.0) || d >= self.inj_radius() {
            return Err(Error::domain(format!(
                "distance {d} outside [0, {}) for {}",
                self.inj_radius(),
                self.id()
            )));
        }
        Ok(self.laplacian_of_distance_squared_unchecked(d))
    }

    #[inline]
    pub(crate) fn laplacian_of_distance_squared_unchecked(&self, d: f64) -> f64 {
        let n = self.dimension() as f64;
        2.0 + 2.0 * (n - 1.0) * self.r_ct(d)
    }

    /// Ghost-free chart bounds for the first coordinate.
    pub(crate) fn x1_extent(&self) -> f64 {
        match self.chart {
            Chart::PeriodicSquare { side } => side,
            Chart::LatLong => PI,
            Chart::GeodesicPolar { rho_max } => rho_max,
        }
    }

    pub(crate) fn x2_extent(&self) -> f64 {
        match self.chart {
            Chart::PeriodicSquare { side } => side,
            _ => 2.0 * PI,
        }
    }
}

#[inline]
fn min_image(d: f64, side: f64) -> f64 {
    d - side * (d / side).round()
}
