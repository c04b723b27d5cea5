//! BV and time-regularity quantities of `𝓕(u) = ∫₀ᵘ √F`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::ops::FarGhost;
use crate::geometry::ScalarField;
use crate::potential::Potential;

use super::brakke::BumpTest;

pub fn transform_field(u: &ScalarField, potential: &Potential) -> ScalarField {
    u.map(|v| potential.sqrt_primitive(v))
}

/// `∫|∇𝓕(u)| dV`.
pub fn total_variation(u: &ScalarField, potential: &Potential) -> f64 {
    let f = transform_field(u, potential);
    let g = f.chart().grad_norm_sq_centered(f.values(), FarGhost::Chart);
    let mags: Vec<f64> = g.iter().map(|v| v.sqrt()).collect();
    f.chart().integrate_slice(&mags)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BvReport {
    pub times: Vec<f64>,
    /// Spatial total variation per sample.
    pub total_variation: Vec<f64>,
    /// `∫∫ εφ²(∂ₜu)² dV dt` by the trapezoid rule over the samples.
    pub time_derivative_budget: f64,
    /// `max ‖𝓕(u(t)) − 𝓕(u(t′))‖_{L¹}/|t − t′|^{1/2}` over sample pairs.
    pub holder_quotient: f64,
}

/// `trajectory` holds snapshots in increasing time order.
pub fn bv_compactness_report(
    trajectory: &[ScalarField],
    epsilon: f64,
    potential: &Potential,
    bump: &BumpTest,
) -> Result<BvReport> {
    if trajectory.is_empty() {
        return Err(Error::Input("empty trajectory".into()));
    }
    for w in trajectory.windows(2) {
        w[0].same_chart(&w[1])?;
        if !(w[1].time > w[0].time) {
            return Err(Error::Input("snapshot times must increase".into()));
        }
    }
    let chart = trajectory[0].chart();
    let form = chart.form();
    let n = chart.len();
    let phi2: Vec<f64> = (0..n)
        .map(|k| {
            bump.value(form.distance_unchecked(bump.center, chart.point_at(k)), 0.0)
                .powi(2)
        })
        .collect();
    let mut lap = vec![0.0; n];
    let mut density = Vec::with_capacity(trajectory.len());
    let mut tv = Vec::with_capacity(trajectory.len());
    let transformed: Vec<ScalarField> = trajectory.iter().map(|u| transform_field(u, potential)).collect();
    for (u, f) in trajectory.iter().zip(&transformed) {
        let g = chart.grad_norm_sq_centered(f.values(), FarGhost::Chart);
        let mags: Vec<f64> = g.iter().map(|v| v.sqrt()).collect();
        tv.push(chart.integrate_slice(&mags));
        chart.laplacian_into(u.values(), FarGhost::Chart, &mut lap);
        let w: Vec<f64> = (0..n)
            .map(|k| {
                let ut = lap[k] - potential.deriv(u.values()[k]) / (epsilon * epsilon);
                epsilon * phi2[k] * ut * ut
            })
            .collect();
        density.push(chart.integrate_slice(&w));
    }
    let times: Vec<f64> = trajectory.iter().map(|u| u.time).collect();
    let budget = times
        .windows(2)
        .zip(density.windows(2))
        .map(|(t, d)| 0.5 * (t[1] - t[0]) * (d[0] + d[1]))
        .sum();
    let mut holder: f64 = 0.0;
    for i in 0..transformed.len() {
        for j in i + 1..transformed.len() {
            let diff: Vec<f64> = transformed[i]
                .values()
                .iter()
                .zip(transformed[j].values())
                .map(|(a, b)| (a - b).abs())
                .collect();
            holder = holder.max(chart.integrate_slice(&diff) / (times[j] - times[i]).sqrt());
        }
    }
    Ok(BvReport {
        times,
        total_variation: tv,
        time_derivative_budget: budget,
        holder_quotient: holder,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::geometry::{ChartPoint, GridChart, SpaceForm};

    #[test]
    fn constant_trajectory_has_zero_quantities() {
        let chart = Arc::new(GridChart::new(SpaceForm::flat_torus(1.0), 32, 32).unwrap());
        let traj: Vec<ScalarField> = (0..4)
            .map(|k| {
                let mut u = ScalarField::constant(chart.clone(), 1.0);
                u.time = k as f64 * 0.01;
                u
            })
            .collect();
        let bump = BumpTest::new(ChartPoint::new(0.5, 0.5), 0.3, 0.0);
        let r = bv_compactness_report(&traj, 0.1, &Potential::quartic(), &bump).unwrap();
        assert!(r.total_variation.iter().all(|&v| v == 0.0));
        assert_eq!(r.time_derivative_budget, 0.0);
        assert_eq!(r.holder_quotient, 0.0);
    }

    #[test]
    fn transform_jump_across_straight_layers() {
        let chart = Arc::new(GridChart::new(SpaceForm::flat_torus(1.0), 512, 64).unwrap());
        let eps = 0.02;
        let u = ScalarField::from_fn(chart, |p| ((p.x1 - 0.25) / eps).tanh() * ((0.75 - p.x1) / eps).tanh());
        let q = Potential::quartic();
        let jump = q.sqrt_primitive(1.0) - q.sqrt_primitive(-1.0);
        assert!((jump - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-14);
        let tv = total_variation(&u, &q);
        assert!((tv - 2.0 * jump).abs() < 0.01 * 2.0 * jump, "{tv}");
    }
}
