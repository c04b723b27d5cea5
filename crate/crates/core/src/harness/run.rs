//! Orchestration of one experiment: profile, initial data, evolution and
//! diagnostics for every ε of the sweep.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{DataMode, ExperimentConfig};
use crate::diagnostics::extinction_time as oracle_extinction_time;
use crate::diagnostics::{
    brakke_identity_residual, bv_compactness_report, discrepancy_field, fit_monotonicity, interface_geometry,
    max_density_ratio, mcf_oracle, positive_sup_in_ball, total_variation, write_records, z_gradient_check, BumpTest,
    BvReport, DiagnosticsRecord, KernelSpec, MonotonicityFit,
};
use crate::error::{Error, Result};
use crate::evolution::{check_maximum_principle, run, stability_bound, write_snapshot, EvolutionState, StepperConfig};
use crate::geometry::{ChartPoint, GridChart, ScalarField};
use crate::initial_data::{general_field, point_on_circle, well_prepared_field, InterfaceSpec, TruncationSpec};
use crate::potential::Potential;
use crate::profile::{solve_profile, surface_tension, ProfileSolution};

/// Cutoff of the `z` evaluation set.
pub const Z_CUTOFF: f64 = 0.95;
/// Largest `ε·κ` at which radii are compared against the curve-shortening
/// oracle; beyond it the sharp-interface picture no longer applies.
pub const SHARP_INTERFACE_LIMIT: f64 = 0.1;
/// Number of interface points used as density ball centres.
const DENSITY_CENTERS: usize = 8;

/// Everything measured on one sweep member.
#[derive(Debug, Clone, Serialize)]
pub struct MemberReport {
    pub epsilon: f64,
    pub shape: (usize, usize),
    pub dir: PathBuf,
    #[serde(skip)]
    pub records: Vec<DiagnosticsRecord>,
    pub steps: u64,
    pub dt: f64,
    pub final_time: f64,
    pub extinction_time: Option<f64>,
    pub oracle_extinction: f64,
    pub worst_energy_increase: f64,
    pub k0: f64,
    pub max_excess: f64,
    /// Max of `sup|∇z|` over samples; `None` for general data.
    pub z_grad_max: Option<f64>,
    pub z_dropped_max: usize,
    #[serde(skip)]
    pub g_samples: Vec<(f64, f64)>,
    pub monotonicity: Option<MonotonicityFit>,
    /// Max over the discrepancy window of the positive-part sup.
    pub disc_sup: f64,
    pub density_max: f64,
    /// Mid-run `ε∫E dV / (σ₀·length)`.
    pub surface_tension_ratio: Option<f64>,
    pub surface_tension_time: f64,
    /// Max `|radius − oracle|` over samples with `ε·κ ≤ SHARP_INTERFACE_LIMIT`;
    /// NaN when no sample qualifies.
    pub radius_error: f64,
    pub bv: Option<BvReport>,
    pub tv_max: f64,
    /// Max of `ε·sup|∇u|` over the discrepancy window.
    pub eps_grad_max: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub dir: PathBuf,
    pub members: Vec<MemberReport>,
}

/// Runs every sweep member and writes the artifacts under the output
/// directory. Verdicts are attached by [`super::experiment_verdicts`].
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("config.toml"), cfg.to_toml()?)?;
    let members = cfg
        .epsilon
        .values
        .par_iter()
        .enumerate()
        .map(|(i, &eps)| run_member(cfg, i, eps, &dir.join(member_dir_name(i, eps))))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport {
        config: cfg.clone(),
        dir,
        members,
    })
}

pub fn member_dir_name(index: usize, epsilon: f64) -> String {
    format!("eps{index}_{epsilon}")
}

/// Initial field of member `index`.
pub fn initial_field(
    cfg: &ExperimentConfig,
    index: usize,
    epsilon: f64,
) -> Result<(ScalarField, Option<ProfileSolution>)> {
    let form = cfg.form();
    let (n1, n2) = cfg.shape_for(index);
    let chart = Arc::new(GridChart::new(form, n1, n2)?);
    let potential = Potential::scaled_quartic(cfg.potential.scale);
    let iface = cfg.interface();
    match cfg.data.mode {
        DataMode::WellPrepared => {
            let profile = solve_profile(epsilon, &potential, &cfg.weight())?;
            let u = well_prepared_field(chart, &iface, &profile, &TruncationSpec::new(cfg.delta()))?;
            Ok((u, Some(profile)))
        }
        DataMode::General => Ok((general_field(chart, epsilon, &iface, &cfg.data.general_spec())?, None)),
    }
}

/// Step size and samples cadence: the largest `dt ≤ dt_safety·bound` that
/// divides the sample interval.
fn schedule(cfg: &ExperimentConfig, u0: &ScalarField, epsilon: f64, potential: &Potential) -> (f64, usize) {
    let k0 = u0.sup_norm().max(1.0);
    let bound = stability_bound(u0.chart(), cfg.stepper.scheme, epsilon, potential, k0);
    let interval = cfg.stepper.sample_interval;
    let cadence = (interval / (cfg.stepper.dt_safety * bound)).ceil().max(1.0) as usize;
    (interval / cadence as f64 / bound, cadence)
}

struct Sample {
    u: ScalarField,
    record: usize,
}

fn run_member(cfg: &ExperimentConfig, index: usize, epsilon: f64, dir: &Path) -> Result<MemberReport> {
    std::fs::create_dir_all(dir)?;
    let potential = Potential::scaled_quartic(cfg.potential.scale);
    let form = cfg.form();
    let iface = cfg.interface();
    let (u0, profile) = initial_field(cfg, index, epsilon)?;
    if let Some(p) = &profile {
        p.write_csv(&dir.join("profile.csv"))?;
    }
    let chart = u0.chart_arc().clone();
    let h = super::config::resolution_near(&chart, cfg.interface.center, iface.radius);
    let (safety, cadence) = schedule(cfg, &u0, epsilon, &potential);
    let stepper = StepperConfig {
        scheme: cfg.stepper.scheme,
        dt_safety: safety,
        t_end: cfg.stepper.t_end,
        snapshot_cadence: cadence,
    };
    let pole = match cfg.kernel.pole {
        Some([x1, x2]) => ChartPoint::new(x1, x2),
        None => point_on_circle(&form, &iface, cfg.kernel.pole_angle)
            .ok_or_else(|| Error::Input("kernel pole falls outside the chart".into()))?,
    };
    let kernel = KernelSpec::new(form, pole, cfg.kernel.s)?;
    let bump = BumpTest::new(pole, cfg.windows.bump_radius, 0.0);
    let sigma = surface_tension(&potential);
    let disc_window = cfg.windows.disc_time;
    let bv_window = cfg.windows.bv_time;

    let mut records: Vec<DiagnosticsRecord> = Vec::new();
    let mut recent: Vec<Sample> = Vec::new();
    let mut trajectory: Vec<ScalarField> = Vec::new();
    let mut z_max: Option<f64> = None;
    let mut z_dropped = 0usize;
    let mut g_samples = Vec::new();
    let mut disc_sup: f64 = 0.0;
    let mut density_max: f64 = 0.0;
    let mut eps_grad_max: f64 = 0.0;
    let mut max_excess: f64 = 0.0;
    let mut lengths: Vec<(f64, f64)> = Vec::new();
    let axisymmetric = !matches!(form.chart(), crate::geometry::Chart::PeriodicSquare { .. })
        && form.distance_unchecked(ChartPoint::new(0.0, 0.0), iface.center) < 1e-12;
    let c_len = |r: f64| InterfaceSpec::new(iface.center, r).length(&form);
    let every = cfg.output.snapshot_every;

    let mut monitor = |s: &EvolutionState| -> Result<()> {
        let u = &s.u;
        let t = s.time;
        let total_energy = s.total_energy();
        max_excess = max_excess.max(check_maximum_principle(u, s.k0).excess);
        let mut disc = f64::NAN;
        if t >= disc_window[0] - 1e-12 && t <= disc_window[1] + 1e-12 {
            let xi = discrepancy_field(u, epsilon, &potential);
            disc = positive_sup_in_ball(&xi, pole, cfg.windows.disc_radius);
            disc_sup = disc_sup.max(disc);
            eps_grad_max = eps_grad_max.max(epsilon * u.gradient_norm_sq_centered().max().sqrt());
        }
        let g_value = if t < kernel.s {
            kernel.weighted_energy(u, epsilon, &potential, t)?
        } else {
            f64::NAN
        };
        if t >= cfg.kernel.t0 - 1e-12 && t < kernel.s {
            g_samples.push((t, g_value));
        }
        let geo = interface_geometry(u, &iface);
        let (radius, density) = match &geo {
            Some(g) if g.radius > 4.0 * h => {
                // pole-centred circles on polar charts are resolved radially
                // only, so their contour polygon underestimates the length
                let len = if axisymmetric { c_len(g.radius) } else { g.length };
                lengths.push((t, len));
                let c = InterfaceSpec::new(iface.center, g.radius);
                let centers: Vec<ChartPoint> = (0..DENSITY_CENTERS)
                    .filter_map(|k| {
                        point_on_circle(
                            &form,
                            &c,
                            2.0 * std::f64::consts::PI * k as f64 / DENSITY_CENTERS as f64,
                        )
                    })
                    .collect();
                let d = max_density_ratio(u, epsilon, &potential, &centers, cfg.windows.density_r_max);
                density_max = density_max.max(d);
                (g.radius, d)
            }
            Some(g) => (g.radius, f64::NAN),
            None => (f64::NAN, f64::NAN),
        };
        let z = match &profile {
            Some(p) => {
                let r = z_gradient_check(u, p, Z_CUTOFF, 1.05);
                z_max = Some(z_max.unwrap_or(0.0).max(r.sup_grad));
                z_dropped = z_dropped.max(r.dropped);
                r.sup_grad
            }
            None => f64::NAN,
        };
        let tv_f = total_variation(u, &potential);
        records.push(DiagnosticsRecord {
            time: t,
            total_energy,
            disc_sup_pos: disc,
            g_value,
            density_ratio_max: density,
            interface_radius: radius,
            oracle_radius: mcf_oracle(&form, iface.radius, t).unwrap_or(f64::NAN),
            z_grad_max: z,
            brakke_residual: f64::NAN,
            tv_f,
        });
        recent.push(Sample {
            u: u.clone(),
            record: records.len() - 1,
        });
        if recent.len() > 3 {
            recent.remove(0);
        }
        if recent.len() == 3 {
            let r = brakke_identity_residual(&recent[0].u, &recent[1].u, &recent[2].u, epsilon, &potential, &bump)?;
            records[recent[1].record].brakke_residual = r.residual_first;
        }
        if t >= bv_window[0] - 1e-12 && t <= bv_window[1] + 1e-12 {
            trajectory.push(u.clone());
        }
        let n = records.len() - 1;
        if n == 0 || (every > 0 && n.is_multiple_of(every)) {
            write_snapshot(&dir.join(format!("snapshot_{n:05}.bin")), u, epsilon)?;
        }
        Ok(())
    };
    log::info!(
        "{}: eps = {epsilon}, grid {:?}, {cadence} steps per sample",
        cfg.name,
        chart.shape()
    );
    let outcome = run(u0, epsilon, potential, &stepper, &mut monitor)?;
    log::info!(
        "{}: eps = {epsilon} finished at t = {:.4} after {} steps",
        cfg.name,
        outcome.state.time,
        outcome.steps
    );
    let n = records.len() - 1;
    if every == 0 || !n.is_multiple_of(every) {
        write_snapshot(&dir.join(format!("snapshot_{n:05}.bin")), &outcome.state.u, epsilon)?;
    }
    write_records(&dir.join("diagnostics.csv"), &records)?;

    let oracle_extinction = oracle_extinction_time(&form, iface.radius);
    let final_time = outcome.state.time;
    let end = outcome.extinction_time.unwrap_or(final_time).min(oracle_extinction);
    let mid = 0.5 * end;
    let (surface_tension_ratio, surface_tension_time) = records
        .iter()
        .filter(|r| r.interface_radius.is_finite())
        .min_by(|a, b| (a.time - mid).abs().total_cmp(&(b.time - mid).abs()))
        .and_then(|r| {
            lengths
                .iter()
                .find(|(t, _)| *t == r.time)
                .map(|(_, len)| (Some(r.total_energy / (sigma * len)), r.time))
        })
        .unwrap_or((None, f64::NAN));
    let radius_error = records
        .iter()
        .filter(|r| r.oracle_radius.is_finite() && r.interface_radius.is_finite())
        .filter(|r| epsilon * form.ct(r.oracle_radius) <= SHARP_INTERFACE_LIMIT)
        .map(|r| (r.interface_radius - r.oracle_radius).abs())
        .fold(f64::NAN, f64::max);
    let monotonicity = fit_monotonicity(&g_samples, kernel.s).ok();
    let bv = if trajectory.len() >= 2 {
        Some(bv_compactness_report(&trajectory, epsilon, &potential, &bump)?)
    } else {
        None
    };
    let tv_max = bv
        .as_ref()
        .map(|b| b.total_variation.iter().cloned().fold(0.0, f64::max))
        .unwrap_or(f64::NAN);
    let report = MemberReport {
        epsilon,
        shape: chart.shape(),
        dir: dir.to_path_buf(),
        records,
        steps: outcome.steps,
        dt: safety * stability_bound(&chart, cfg.stepper.scheme, epsilon, &potential, outcome.state.k0),
        final_time,
        extinction_time: outcome.extinction_time,
        oracle_extinction,
        worst_energy_increase: outcome.worst_energy_increase,
        k0: outcome.state.k0,
        max_excess,
        z_grad_max: z_max,
        z_dropped_max: z_dropped,
        g_samples,
        monotonicity,
        disc_sup,
        density_max,
        surface_tension_ratio,
        surface_tension_time,
        radius_error,
        bv,
        tv_max,
        eps_grad_max,
    };
    std::fs::write(
        dir.join("summary.toml"),
        toml::to_string(&report).map_err(|e| Error::Parse(e.to_string()))?,
    )?;
    Ok(report)
}
