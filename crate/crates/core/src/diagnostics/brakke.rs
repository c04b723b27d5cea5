//! Residuals of the two Brakke-type identities for `∫φ εE dV`.

use serde::{Deserialize, Serialize};

use super::energy_density;
use crate::error::{Error, Result};
use crate::geometry::ops::FarGhost;
use crate::geometry::{Chart, ChartPoint, ScalarField};
use crate::potential::Potential;

/// `φ(x, t) = A(1 − d²/a²)⁴·(1 + rate·t)` inside `B_a(center)`, zero outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpTest {
    pub center: ChartPoint,
    pub radius: f64,
    pub rate: f64,
    pub amplitude: f64,
}

impl BumpTest {
    pub fn new(center: ChartPoint, radius: f64, rate: f64) -> Self {
        Self {
            center,
            radius,
            rate,
            amplitude: 1.0,
        }
    }
}

impl BumpTest {
    pub fn value(&self, d: f64, t: f64) -> f64 {
        let s = 1.0 - (d / self.radius).powi(2);
        if s <= 0.0 {
            0.0
        } else {
            self.amplitude * s.powi(4) * (1.0 + self.rate * t)
        }
    }

    pub fn dt(&self, d: f64) -> f64 {
        let s = 1.0 - (d / self.radius).powi(2);
        if s <= 0.0 {
            0.0
        } else {
            self.amplitude * s.powi(4) * self.rate
        }
    }

    fn field(&self, like: &ScalarField, t: f64) -> Vec<f64> {
        let chart = like.chart();
        let form = chart.form();
        (0..chart.len())
            .map(|k| self.value(form.distance_unchecked(self.center, chart.point_at(k)), t))
            .collect()
    }

    fn check_support(&self, like: &ScalarField) -> Result<()> {
        let form = like.chart().form();
        let ok = self.radius > 0.0
            && match form.chart() {
                Chart::PeriodicSquare { side } => self.radius < 0.5 * side,
                Chart::LatLong => self.radius < std::f64::consts::PI,
                Chart::GeodesicPolar { rho_max } => self.center.x1 + self.radius < rho_max - like.chart().spacing().0,
            };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "test function support of radius {} touches the chart boundary",
                self.radius
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BrakkeResidual {
    /// Centred difference of `∫φ εE dV`.
    pub lhs: f64,
    /// Right-hand side of the Laplacian-subtracted identity.
    pub rhs_first: f64,
    /// Right-hand side of the Laplacian-added identity.
    pub rhs_second: f64,
    pub residual_first: f64,
    pub residual_second: f64,
}

fn weighted(u: &ScalarField, epsilon: f64, potential: &Potential, phi: &[f64]) -> f64 {
    let e = energy_density(u, epsilon, potential);
    let p: Vec<f64> = e.values().iter().zip(phi).map(|(e, p)| e * p * epsilon).collect();
    u.chart().integrate_slice(&p)
}

/// Residuals of both identities at the time of `mid`, with the time
/// derivative of the weighted energy taken from `before` and `after`, and
/// `∂ₜu = Δu − f(u)/ε²` evaluated on `mid`.
pub fn brakke_identity_residual(
    before: &ScalarField,
    mid: &ScalarField,
    after: &ScalarField,
    epsilon: f64,
    potential: &Potential,
    test: &BumpTest,
) -> Result<BrakkeResidual> {
    mid.same_chart(before)?;
    mid.same_chart(after)?;
    test.check_support(mid)?;
    let (t0, t, t1) = (before.time, mid.time, after.time);
    if !(t0 < t && t < t1) {
        return Err(Error::Input(format!("snapshot times {t0}, {t}, {t1} not increasing")));
    }
    let chart = mid.chart();
    let form = chart.form();
    let n = mid.len();
    let n2 = chart.shape().1;
    let g22 = chart.g22();

    let lhs = (weighted(after, epsilon, potential, &test.field(after, t1))
        - weighted(before, epsilon, potential, &test.field(before, t0)))
        / (t1 - t0);

    let phi = test.field(mid, t);
    let phi_t: Vec<f64> = (0..n)
        .map(|k| test.dt(form.distance_unchecked(test.center, chart.point_at(k))))
        .collect();
    let mut lap_phi = vec![0.0; n];
    chart.laplacian_into(&phi, FarGhost::Value(0.0), &mut lap_phi);
    let hess = chart.hessian_slices(&phi, FarGhost::Value(0.0));
    let (p1, p2) = chart.gradient_slices(&phi, FarGhost::Value(0.0));

    let u = mid.values();
    let mut lap_u = vec![0.0; n];
    chart.laplacian_into(u, FarGhost::Chart, &mut lap_u);
    let ut: Vec<f64> = (0..n)
        .map(|k| lap_u[k] - potential.deriv(u[k]) / (epsilon * epsilon))
        .collect();
    let (u1, u2) = chart.gradient_slices(u, FarGhost::Chart);
    let v2: Vec<f64> = (0..n).map(|k| g22[k / n2] * u2[k]).collect();
    let hq = hess.quadratic_form(&u1, &v2);
    let e = energy_density(mid, epsilon, potential);

    let mut first = vec![0.0; n];
    let mut second = vec![0.0; n];
    for k in 0..n {
        let ee = epsilon * e.values()[k];
        first[k] = (phi_t[k] - lap_phi[k]) * ee + epsilon * hq[k] - epsilon * phi[k] * ut[k] * ut[k];
        let cross = p1[k] * u1[k] + g22[k / n2] * p2[k] * u2[k];
        let tail = if phi[k] > 0.0 {
            let q = ut[k] + cross / phi[k];
            epsilon * (cross * cross / phi[k] - phi[k] * q * q)
        } else {
            0.0
        };
        second[k] = (phi_t[k] + lap_phi[k]) * ee - epsilon * hq[k] + tail;
    }
    let rhs_first = chart.integrate_slice(&first);
    let rhs_second = chart.integrate_slice(&second);
    Ok(BrakkeResidual {
        lhs,
        rhs_first,
        rhs_second,
        residual_first: (lhs - rhs_first).abs(),
        residual_second: (lhs - rhs_second).abs(),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::geometry::{GridChart, SpaceForm};

    #[test]
    fn trivial_cases() {
        let chart = Arc::new(GridChart::new(SpaceForm::flat_torus(1.0), 32, 32).unwrap());
        let snaps = |f: &dyn Fn(ChartPoint) -> f64| {
            [0.0, 0.1, 0.2].map(|t| {
                let mut u = ScalarField::from_fn(chart.clone(), f);
                u.time = t;
                u
            })
        };
        let bump = BumpTest::new(ChartPoint::new(0.5, 0.5), 0.3, 1.0);
        let q = Potential::quartic();
        let f = snaps(&|_| 1.0);
        let r = brakke_identity_residual(&f[0], &f[1], &f[2], 0.1, &q, &bump).unwrap();
        assert!(r.residual_first <= 1e-12 && r.residual_second <= 1e-12);
        let g = snaps(&|p| ((p.x1 - 0.5) / 0.1).tanh());
        let zero = BumpTest { amplitude: 0.0, ..bump };
        let r = brakke_identity_residual(&g[0], &g[1], &g[2], 0.1, &q, &zero).unwrap();
        assert_eq!((r.residual_first, r.residual_second), (0.0, 0.0));
        let wide = BumpTest { radius: 0.6, ..bump };
        assert!(brakke_identity_residual(&g[0], &g[1], &g[2], 0.1, &q, &wide).is_err());
        assert!(brakke_identity_residual(&g[2], &g[1], &g[0], 0.1, &q, &bump).is_err());
    }
}
