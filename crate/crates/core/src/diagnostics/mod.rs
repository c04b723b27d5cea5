//! Functionals of field snapshots: energy and discrepancy densities, the
//! `z`-field bound, the cutoff backward-heat kernel and its weighted energy,
//! almost-monotonicity fits, density ratios, Brakke-type identities,
//! interface geometry and BV quantities.

mod brakke;
mod bv;
mod interface;
mod kernel;
mod monotonicity;

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use brakke::{brakke_identity_residual, BrakkeResidual, BumpTest};
pub use bv::{bv_compactness_report, total_variation, transform_field, BvReport};
pub use interface::{extinction_time, interface_geometry, mcf_oracle, mcf_radius_ode, InterfaceGeometry};
pub use kernel::{kernel_fd_error, kernel_fd_study, KernelFdStudy, KernelSpec, KernelValue, Zeta};
pub use monotonicity::{
    fit_monotonicity, holds as monotonicity_holds, MonotonicityFit, MIN_SAMPLES as MIN_MONOTONICITY_SAMPLES,
};

use crate::error::{Error, Result};
use crate::geometry::ops::FarGhost;
use crate::geometry::{ChartPoint, ScalarField};
use crate::potential::Potential;
use crate::profile::ProfileSolution;

/// `E = ½|∇u|² + F(u)/ε²`, with the edge-averaged gradient norm.
pub fn energy_density(u: &ScalarField, epsilon: f64, potential: &Potential) -> ScalarField {
    let g = u.gradient_norm_sq();
    let inv = 1.0 / (epsilon * epsilon);
    let vals = g
        .values()
        .iter()
        .zip(u.values())
        .map(|(g, &v)| 0.5 * g + potential.value(v) * inv)
        .collect();
    u.with_values(vals)
}

/// `ε∫E dV`.
pub fn total_energy(u: &ScalarField, epsilon: f64, potential: &Potential) -> f64 {
    epsilon * energy_density(u, epsilon, potential).integrate()
}

/// `εξ = ε²/2·|∇u|² − F(u)`.
pub fn discrepancy_field(u: &ScalarField, epsilon: f64, potential: &Potential) -> ScalarField {
    let g = u.gradient_norm_sq();
    let e2 = epsilon * epsilon;
    let vals = g
        .values()
        .iter()
        .zip(u.values())
        .map(|(g, &v)| 0.5 * e2 * g - potential.value(v))
        .collect();
    u.with_values(vals)
}

/// Largest positive part of `field` over the geodesic ball `B_r(center)`.
pub fn positive_sup_in_ball(field: &ScalarField, center: ChartPoint, r: f64) -> f64 {
    let chart = field.chart();
    let form = chart.form();
    field
        .values()
        .iter()
        .enumerate()
        .filter(|(k, _)| form.distance_unchecked(center, chart.point_at(*k)) < r)
        .map(|(_, &v)| v.max(0.0))
        .fold(0.0, f64::max)
}

/// `μ(B_R(x)) = ∫_{B_R(x)} εE dV`.
pub fn ball_mass(u: &ScalarField, epsilon: f64, potential: &Potential, x: ChartPoint, r: f64) -> f64 {
    let e = energy_density(u, epsilon, potential);
    ball_mass_of(&e, epsilon, x, r)
}

fn ball_mass_of(e: &ScalarField, epsilon: f64, x: ChartPoint, r: f64) -> f64 {
    let chart = e.chart();
    let form = chart.form();
    let (_, n2) = chart.shape();
    e.values()
        .iter()
        .enumerate()
        .filter(|(k, _)| form.distance_unchecked(x, chart.point_at(*k)) < r)
        .map(|(k, &v)| v * chart.cell_volume(k / n2))
        .sum::<f64>()
        * epsilon
}

/// `μ(B_R(x))/(2R)`, for `4h ≤ R < R₀`.
pub fn density_ratio(u: &ScalarField, epsilon: f64, potential: &Potential, x: ChartPoint, r: f64) -> Result<f64> {
    let chart = u.chart();
    let r0 = 0.5 * chart.form().inj_radius();
    let lo = 4.0 * chart.h_max();
    if !(r >= lo * (1.0 - 1e-12) && r < r0) {
        return Err(Error::domain(format!("ball radius {r} outside [{lo}, {r0})")));
    }
    Ok(ball_mass(u, epsilon, potential, x, r) / (2.0 * r))
}

/// Max density ratio over balls centred at `centers`, radii doubling from
/// `4h` while below `r_max`.
pub fn max_density_ratio(
    u: &ScalarField,
    epsilon: f64,
    potential: &Potential,
    centers: &[ChartPoint],
    r_max: f64,
) -> f64 {
    let e = energy_density(u, epsilon, potential);
    let mut best: f64 = 0.0;
    for &x in centers {
        let mut r = 4.0 * u.chart().h_max();
        while r < r_max {
            best = best.max(ball_mass_of(&e, epsilon, x, r) / (2.0 * r));
            r *= 2.0;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZGradientReport {
    /// `sup|∇z|` over nodes with `|u| ≤ cutoff` whose stencil is invertible.
    pub sup_grad: f64,
    pub evaluated: usize,
    /// Nodes with `|u| ≤ cutoff` dropped because a neighbour saturates.
    pub dropped: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// `z = h_ε⁻¹(u)` on `{|u| ≤ cutoff}` and its gradient bound.
pub fn z_gradient_check(u: &ScalarField, profile: &ProfileSolution, cutoff: f64, tolerance: f64) -> ZGradientReport {
    let chart = u.chart();
    let (n1, n2) = chart.shape();
    let mut z = vec![0.0; u.len()];
    let mut ok = vec![0.0; u.len()];
    for (k, &v) in u.values().iter().enumerate() {
        if let Ok(t) = profile.invert(v) {
            if v.abs() < 1.0 - 1e-9 {
                z[k] = t;
                ok[k] = 1.0;
            }
        }
    }
    let (d1, d2) = chart.gradient_slices(&z, FarGhost::Extrapolate);
    let far_ok = chart.far_field().is_none();
    let mut sup: f64 = 0.0;
    let (mut evaluated, mut dropped) = (0, 0);
    for i in 0..n1 {
        let g22 = chart.g22()[i];
        for j in 0..n2 {
            let k = chart.index(i, j);
            if u.values()[k].abs() > cutoff {
                continue;
            }
            let (ii, jj) = (i as isize, j as isize);
            let nb = [(ii - 1, jj), (ii + 1, jj), (ii, jj - 1), (ii, jj + 1)];
            let good = nb.iter().all(|&(a, b)| {
                if a >= n1 as isize && !far_ok {
                    return false;
                }
                chart.neighbor(&ok, a, b) == 1.0
            });
            if !good {
                dropped += 1;
                continue;
            }
            evaluated += 1;
            sup = sup.max((d1[k] * d1[k] + g22 * d2[k] * d2[k]).sqrt());
        }
    }
    ZGradientReport {
        sup_grad: sup,
        evaluated,
        dropped,
        tolerance,
        pass: sup <= tolerance,
    }
}

/// One time sample of the monitored functionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub total_energy: f64,
    pub disc_sup_pos: f64,
    #[serde(rename = "G_value")]
    pub g_value: f64,
    pub density_ratio_max: f64,
    pub interface_radius: f64,
    pub oracle_radius: f64,
    pub z_grad_max: f64,
    pub brakke_residual: f64,
    #[serde(rename = "tv_F")]
    pub tv_f: f64,
}

pub const RECORD_COLUMNS: [&str; 10] = [
    "time",
    "total_energy",
    "disc_sup_pos",
    "G_value",
    "density_ratio_max",
    "interface_radius",
    "oracle_radius",
    "z_grad_max",
    "brakke_residual",
    "tv_F",
];

/// Writes records as CSV with the [`RECORD_COLUMNS`] header. Missing
/// quantities are written as `NaN`.
pub fn write_records(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_records_to(file, records)
}

pub fn write_records_to<W: Write>(out: W, records: &[DiagnosticsRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(RECORD_COLUMNS)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}
