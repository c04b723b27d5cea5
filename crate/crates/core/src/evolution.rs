//! Time integration of `∂ₜu = Δu − f(u)/ε²`.
//!
//! Two schemes are provided. The explicit two-stage midpoint rule is limited
//! by both diffusion and reaction stiffness. The IMEX scheme treats the
//! Laplacian implicitly and the reaction explicitly,
//! `(I − dt·Δ)uⁿ⁺¹ = uⁿ − dt·f(uⁿ)/ε²`, which for `dt ≤ ε²/max|f′|` keeps
//! `|u| ≤ k₀` and never increases the discrete energy.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::diagnostics::total_energy;
use crate::error::{Error, Result};
use crate::geometry::ops::FarGhost;
use crate::geometry::{GridChart, ScalarField};
use crate::numerics::{pcg, power_law_fit, spread_ratio};
use crate::potential::Potential;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    ExplicitRk2,
    Imex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub scheme: Scheme,
    /// Fraction of the stability bound used as the step, in `(0, 1]`.
    pub dt_safety: f64,
    pub t_end: f64,
    /// Steps between samples passed to the monitor.
    pub snapshot_cadence: usize,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Imex,
            dt_safety: 0.5,
            t_end: 0.0,
            snapshot_cadence: 10,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            errs.push(format!("dt_safety {} outside (0, 1]", self.dt_safety));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            errs.push(format!("t_end {} must be finite and nonnegative", self.t_end));
        }
        if self.snapshot_cadence == 0 {
            errs.push("snapshot_cadence must be positive".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}

/// Largest stable step of `scheme` on `chart` for data bounded by `k0`.
///
/// Explicit: `2/(2·D + max|f′|/ε²)`, where `D` is the largest diagonal entry
/// of the negative discrete Laplacian (on a flat grid `D = 4/h²`); the
/// spectrum of the linearised operator then lies in `[−2/dt, 0]`.
/// IMEX: `ε²/max|f′|`.
pub fn stability_bound(chart: &GridChart, scheme: Scheme, epsilon: f64, potential: &Potential, k0: f64) -> f64 {
    let fp = potential.max_abs_second_deriv(k0.max(1.0)) / (epsilon * epsilon);
    match scheme {
        Scheme::Imex => 1.0 / fp,
        Scheme::ExplicitRk2 => {
            let d = chart.neg_laplacian_diagonal().into_iter().fold(0.0, f64::max);
            2.0 / (2.0 * d + fp)
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionState {
    pub u: ScalarField,
    pub epsilon: f64,
    pub time: f64,
    pub step_count: u64,
    pub dt: f64,
    pub potential: Potential,
    /// Sup bound of the data, `max(sup|u₀|, 1)`.
    pub k0: f64,
}

impl EvolutionState {
    pub fn new(u0: ScalarField, epsilon: f64, potential: Potential) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::domain(format!("epsilon {epsilon} must be positive")));
        }
        let k0 = u0.sup_norm().max(1.0);
        let time = u0.time;
        Ok(Self {
            u: u0,
            epsilon,
            time,
            step_count: 0,
            dt: 0.0,
            potential,
            k0,
        })
    }

    /// `Δu − f(u)/ε²` at the current state.
    pub fn time_derivative(&self) -> ScalarField {
        let mut out = vec![0.0; self.u.len()];
        rhs_into(&self.u, self.epsilon, &self.potential, self.u.values(), &mut out);
        self.u.with_values(out)
    }

    pub fn total_energy(&self) -> f64 {
        total_energy(&self.u, self.epsilon, &self.potential)
    }
}

fn rhs_into(like: &ScalarField, epsilon: f64, potential: &Potential, u: &[f64], out: &mut [f64]) {
    like.chart().laplacian_into(u, FarGhost::Chart, out);
    let inv = 1.0 / (epsilon * epsilon);
    for (o, &v) in out.iter_mut().zip(u) {
        *o -= potential.deriv(v) * inv;
    }
}

/// Reusable per-chart data for stepping.
pub struct Stepper {
    chart: Arc<GridChart>,
    scheme: Scheme,
    weights: Vec<f64>,
    diag: Vec<f64>,
    source: Vec<f64>,
    pub last_cg_iterations: usize,
}

impl Stepper {
    pub fn new(chart: Arc<GridChart>, scheme: Scheme) -> Self {
        let (n1, n2) = chart.shape();
        let mut weights = Vec::with_capacity(chart.len());
        for i in 0..n1 {
            weights.extend(std::iter::repeat_n(chart.cell_volume(i), n2));
        }
        let (diag, source) = match scheme {
            Scheme::Imex => (chart.neg_laplacian_diagonal(), chart.far_field_source()),
            Scheme::ExplicitRk2 => (Vec::new(), Vec::new()),
        };
        Self {
            chart,
            scheme,
            weights,
            diag,
            source,
            last_cg_iterations: 0,
        }
    }

    /// Advances `state` by `state.dt`, checking the stability bound.
    pub fn step(&mut self, state: &mut EvolutionState) -> Result<()> {
        let other = state.u.chart();
        if !Arc::ptr_eq(&self.chart, state.u.chart_arc())
            && (other.form() != self.chart.form() || other.shape() != self.chart.shape())
        {
            return Err(Error::Input("stepper built for a different chart".into()));
        }
        let bound = stability_bound(&self.chart, self.scheme, state.epsilon, &state.potential, state.k0);
        let dt = state.dt;
        if !(dt > 0.0) || dt > bound * (1.0 + 1e-12) {
            return Err(Error::Stability { dt, bound });
        }
        let eps = state.epsilon;
        let pot = state.potential;
        let n = state.u.len();
        let u = state.u.values().to_vec();
        let next = match self.scheme {
            Scheme::ExplicitRk2 => {
                let mut k = vec![0.0; n];
                rhs_into(&state.u, eps, &pot, &u, &mut k);
                let half: Vec<f64> = u.iter().zip(&k).map(|(a, b)| a + 0.5 * dt * b).collect();
                rhs_into(&state.u, eps, &pot, &half, &mut k);
                u.iter().zip(&k).map(|(a, b)| a + dt * b).collect::<Vec<f64>>()
            }
            Scheme::Imex => {
                let inv = dt / (eps * eps);
                let w = &self.weights;
                let rhs: Vec<f64> = (0..n)
                    .map(|k| w[k] * (u[k] - inv * pot.deriv(u[k]) + dt * self.source[k]))
                    .collect();
                let diag: Vec<f64> = (0..n).map(|k| w[k] * (1.0 + dt * self.diag[k])).collect();
                let chart = &self.chart;
                let apply = |x: &[f64], y: &mut [f64]| {
                    chart.laplacian_into(x, FarGhost::Value(0.0), y);
                    for k in 0..x.len() {
                        y[k] = w[k] * (x[k] - dt * y[k]);
                    }
                };
                let mut x = u.clone();
                let rep = pcg(apply, &diag, &rhs, &mut x, 1e-10, 10_000)?;
                self.last_cg_iterations = rep.iterations;
                x
            }
        };
        if let Some(node) = next.iter().position(|v| !v.is_finite()) {
            return Err(Error::BlowUp {
                step: state.step_count + 1,
                time: state.time + dt,
                node,
            });
        }
        state.time += dt;
        state.step_count += 1;
        state.u = state.u.with_values(next);
        state.u.time = state.time;
        Ok(())
    }
}

/// One step of `cfg.scheme` with `state.dt`, or the scheme's bound times
/// `dt_safety` when `state.dt` is zero.
pub fn step(state: &EvolutionState, cfg: &StepperConfig) -> Result<EvolutionState> {
    let mut next = state.clone();
    if next.dt == 0.0 {
        next.dt =
            cfg.dt_safety * stability_bound(state.u.chart(), cfg.scheme, state.epsilon, &state.potential, state.k0);
    }
    Stepper::new(state.u.chart_arc().clone(), cfg.scheme).step(&mut next)?;
    Ok(next)
}

/// Summary of a completed run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: EvolutionState,
    /// `(time, ε∫E dV)` at every sample, including `t = 0` and the end.
    pub energies: Vec<(f64, f64)>,
    /// First sample time at which the extinction rule fired.
    pub extinction_time: Option<f64>,
    pub steps: u64,
    /// Largest relative per-step energy increase between samples.
    pub worst_energy_increase: f64,
}

impl RunOutcome {
    /// Energy nonincreasing between consecutive samples within `rel_tol`
    /// per step.
    pub fn energy_nonincreasing(&self, rel_tol: f64) -> bool {
        self.worst_energy_increase <= rel_tol
    }
}

/// Integrates until `cfg.t_end`, calling `monitor` at `t = 0`, every
/// `snapshot_cadence` steps, and at the final time.
///
/// Extinction: when the sup of `u` over the initial `{u₀ > 0}` region stays
/// below −0.9 for two consecutive samples, the run stops early.
pub fn run(
    u0: ScalarField,
    epsilon: f64,
    potential: Potential,
    cfg: &StepperConfig,
    monitor: &mut dyn FnMut(&EvolutionState) -> Result<()>,
) -> Result<RunOutcome> {
    cfg.validate()?;
    let mut state = EvolutionState::new(u0, epsilon, potential)?;
    let bound = stability_bound(state.u.chart(), cfg.scheme, epsilon, &potential, state.k0);
    let dt = cfg.dt_safety * bound;
    let inside: Vec<usize> = state
        .u
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(k, _)| k)
        .collect();
    let mut stepper = Stepper::new(state.u.chart_arc().clone(), cfg.scheme);
    let mut energies = vec![(state.time, state.total_energy())];
    let mut last_sample_step = 0u64;
    let mut worst: f64 = 0.0;
    let mut below = 0;
    let mut extinction_time = None;
    monitor(&state)?;
    let t_end = state.time + cfg.t_end;
    while state.time < t_end * (1.0 - 1e-14) - 1e-300 {
        state.dt = dt.min(t_end - state.time);
        stepper.step(&mut state)?;
        let last = state.time >= t_end * (1.0 - 1e-14);
        if state.step_count % cfg.snapshot_cadence as u64 == 0 || last {
            let e = state.total_energy();
            let (_, prev) = *energies.last().expect("initial sample");
            let steps = (state.step_count - last_sample_step).max(1) as f64;
            worst = worst.max((e - prev) / (prev.abs().max(f64::MIN_POSITIVE) * steps));
            last_sample_step = state.step_count;
            energies.push((state.time, e));
            monitor(&state)?;
            if !inside.is_empty() {
                let sup = inside
                    .iter()
                    .map(|&k| state.u.values()[k])
                    .fold(f64::NEG_INFINITY, f64::max);
                if sup < -0.9 {
                    below += 1;
                    if below == 1 {
                        extinction_time = Some(state.time);
                    }
                    if below == 2 {
                        break;
                    }
                } else {
                    below = 0;
                    extinction_time = None;
                }
            }
        }
    }
    if below < 2 {
        extinction_time = None;
    }
    let steps = state.step_count;
    Ok(RunOutcome {
        state,
        energies,
        extinction_time,
        steps,
        worst_energy_increase: worst,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximumPrincipleReport {
    pub sup_abs: f64,
    /// `sup(|u| − 1)₊`.
    pub excess: f64,
    pub k0: f64,
    pub within_k0: bool,
}

pub fn check_maximum_principle(u: &ScalarField, k0: f64) -> MaximumPrincipleReport {
    let sup_abs = u.sup_norm();
    MaximumPrincipleReport {
        sup_abs,
        excess: (sup_abs - 1.0).max(0.0),
        k0,
        within_k0: sup_abs <= k0 * (1.0 + 1e-12),
    }
}

/// Fitted `σ₀` in `sup(|u| − 1)₊ ≈ C·ε^σ₀` over a sweep; `None` when any
/// excess vanishes.
pub fn fit_excess_power(sweep: &[(f64, f64)]) -> Option<f64> {
    if sweep.iter().any(|&(_, e)| !(e > 0.0)) {
        return None;
    }
    let (x, y): (Vec<f64>, Vec<f64>) = sweep.iter().cloned().unzip();
    power_law_fit(&x, &y).map(|(p, _)| p)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientScalingReport {
    /// `(ε, max over samples of ε·sup|∇u|)`.
    pub scaled: Vec<(f64, f64)>,
    pub spread: f64,
    pub pass: bool,
}

/// `ε·sup|∇u|` over the samples with time in `window`, per sweep member.
pub fn check_gradient_scaling(
    sweep: &[(f64, Vec<ScalarField>)],
    window: (f64, f64),
    max_spread: f64,
) -> GradientScalingReport {
    let scaled: Vec<(f64, f64)> = sweep
        .iter()
        .map(|(eps, traj)| {
            let m = traj
                .iter()
                .filter(|u| u.time >= window.0 && u.time <= window.1)
                .map(|u| eps * u.gradient_norm_sq_centered().max().sqrt())
                .fold(0.0, f64::max);
            (*eps, m)
        })
        .collect();
    let vals: Vec<f64> = scaled.iter().map(|s| s.1).collect();
    let spread = spread_ratio(&vals);
    GradientScalingReport {
        pass: spread <= max_spread,
        spread,
        scaled,
    }
}

/// Writes a snapshot: a text header of `key value` lines closed by `end`,
/// then the values as row-major little-endian `f64`.
pub fn write_snapshot(path: &Path, u: &ScalarField, epsilon: f64) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    let chart = u.chart();
    let (n1, n2) = chart.shape();
    let (h1, h2) = chart.spacing();
    writeln!(f, "geometry {}", chart.form().id())?;
    writeln!(f, "shape {n1} {n2}")?;
    writeln!(f, "spacing {h1:.17e} {h2:.17e}")?;
    writeln!(f, "epsilon {epsilon:.17e}")?;
    writeln!(f, "time {:.17e}", u.time)?;
    writeln!(f, "end")?;
    for v in u.values() {
        f.write_all(&v.to_le_bytes())?;
    }
    f.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub geometry: String,
    pub shape: (usize, usize),
    pub spacing: (f64, f64),
    pub epsilon: f64,
    pub time: f64,
    pub values: Vec<f64>,
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut r = BufReader::new(std::fs::File::open(path)?);
    let mut header = std::collections::HashMap::new();
    loop {
        let mut line = String::new();
        if r.read_line(&mut line)? == 0 {
            return Err(Error::Parse("snapshot header not terminated".into()));
        }
        let line = line.trim_end();
        if line == "end" {
            break;
        }
        let (k, v) = line
            .split_once(' ')
            .ok_or_else(|| Error::Parse(format!("bad header line {line:?}")))?;
        header.insert(k.to_string(), v.to_string());
    }
    let get = |k: &str| header.get(k).ok_or_else(|| Error::Parse(format!("missing {k}")));
    let pair = |k: &str| -> Result<(String, String)> {
        let v = get(k)?;
        let (a, b) = v.split_once(' ').ok_or_else(|| Error::Parse(format!("bad {k}")))?;
        Ok((a.to_string(), b.to_string()))
    };
    let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(e.to_string()));
    let int = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse(e.to_string()));
    let (a, b) = pair("shape")?;
    let shape = (int(&a)?, int(&b)?);
    let (a, b) = pair("spacing")?;
    let spacing = (num(&a)?, num(&b)?);
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != shape.0 * shape.1 * 8 {
        return Err(Error::Parse(format!(
            "expected {} payload bytes, found {}",
            shape.0 * shape.1 * 8,
            bytes.len()
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok(Snapshot {
        geometry: get("geometry")?.clone(),
        shape,
        spacing,
        epsilon: num(get("epsilon")?)?,
        time: num(get("time")?)?,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ChartPoint, SpaceForm};
    use proptest::prelude::*;

    fn flat(n: usize, side: f64) -> Arc<GridChart> {
        Arc::new(GridChart::new(SpaceForm::flat_torus(side), n, n).unwrap())
    }

    fn cfg(scheme: Scheme, t_end: f64) -> StepperConfig {
        StepperConfig {
            scheme,
            dt_safety: 0.9,
            t_end,
            snapshot_cadence: 5,
        }
    }

    #[test]
    fn equilibria_are_fixed_points() {
        for scheme in [Scheme::ExplicitRk2, Scheme::Imex] {
            for c in [-1.0, 0.0, 1.0] {
                let s =
                    EvolutionState::new(ScalarField::constant(flat(16, 1.0), c), 0.1, Potential::quartic()).unwrap();
                let next = step(&s, &cfg(scheme, 1.0)).unwrap();
                assert!(next.u.values().iter().all(|&v| v == c), "{scheme:?} {c}");
                assert!(next.time > 0.0);
            }
        }
    }

    #[test]
    fn reaction_pushes_towards_wells() {
        for scheme in [Scheme::ExplicitRk2, Scheme::Imex] {
            let s = EvolutionState::new(ScalarField::constant(flat(16, 1.0), 0.5), 0.1, Potential::quartic()).unwrap();
            let next = step(&s, &cfg(scheme, 1.0)).unwrap();
            assert!(next.u.values().iter().all(|&v| v > 0.5 && v < 1.0));
        }
    }

    #[test]
    fn too_large_step_is_rejected() {
        let mut s = EvolutionState::new(ScalarField::constant(flat(16, 1.0), 0.5), 0.1, Potential::quartic()).unwrap();
        let b = stability_bound(s.u.chart(), Scheme::Imex, 0.1, &s.potential, 1.0);
        s.dt = 1.5 * b;
        assert!(matches!(
            step(&s, &cfg(Scheme::Imex, 1.0)),
            Err(Error::Stability { .. })
        ));
    }

    #[test]
    fn standing_wave_is_stationary() {
        // two straight layers on a large torus
        let eps = 0.05;
        let side = 4.0;
        let chart = Arc::new(GridChart::new(SpaceForm::flat_torus(side), 1024, 4).unwrap());
        let u0 = ScalarField::from_fn(chart, |p| ((p.x1 - 1.0) / eps).tanh() * ((3.0 - p.x1) / eps).tanh());
        for scheme in [Scheme::ExplicitRk2, Scheme::Imex] {
            let out = run(
                u0.clone(),
                eps,
                Potential::quartic(),
                &cfg(scheme, 10.0 * eps * eps),
                &mut |_| Ok(()),
            )
            .unwrap();
            let diff = out
                .state
                .u
                .values()
                .iter()
                .zip(u0.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(diff <= 1e-3, "{scheme:?}: {diff}");
        }
    }

    #[test]
    fn zero_length_run_is_identity() {
        let u0 = ScalarField::from_fn(flat(16, 1.0), |p| (p.x1 * 6.0).sin());
        let mut calls = 0;
        let out = run(
            u0.clone(),
            0.1,
            Potential::quartic(),
            &cfg(Scheme::Imex, 0.0),
            &mut |_| {
                calls += 1;
                Ok(())
            },
        )
        .unwrap();
        assert_eq!(out.state.u.values(), u0.values());
        assert_eq!((out.steps, calls), (0, 1));
    }

    #[test]
    fn energy_dissipates_and_bound_holds() {
        let u0 = ScalarField::from_fn(flat(64, 1.0), |p| {
            1.2 * (2.0 * std::f64::consts::PI * p.x1).sin() * (4.0 * p.x2).cos()
        });
        for scheme in [Scheme::ExplicitRk2, Scheme::Imex] {
            let mut sups = Vec::new();
            let out = run(u0.clone(), 0.1, Potential::quartic(), &cfg(scheme, 0.01), &mut |s| {
                sups.push(check_maximum_principle(&s.u, 1.2));
                Ok(())
            })
            .unwrap();
            assert!(
                out.energy_nonincreasing(1e-8),
                "{scheme:?}: {}",
                out.worst_energy_increase
            );
            assert!(sups.iter().all(|r| r.within_k0));
            assert!(sups.last().unwrap().excess < sups[0].excess);
        }
    }

    #[test]
    fn imex_keeps_far_field_disk_bounded() {
        let chart = Arc::new(GridChart::new(SpaceForm::hyperbolic(2.5), 64, 16).unwrap());
        let u0 = ScalarField::from_fn(chart, |p| ((1.0 - p.x1) / 0.1).tanh());
        let out = run(u0, 0.1, Potential::quartic(), &cfg(Scheme::Imex, 0.02), &mut |_| Ok(())).unwrap();
        assert!(out.state.u.sup_norm() <= 1.0 + 1e-12);
        assert!(out.energy_nonincreasing(1e-8));
    }

    #[test]
    fn dt_refinement_orders() {
        let u0 = ScalarField::from_fn(flat(32, 1.0), |p| 0.8 * (2.0 * std::f64::consts::PI * p.x1).sin());
        let eps = 0.2;
        let pot = Potential::quartic();
        let bound = stability_bound(u0.chart(), Scheme::ExplicitRk2, eps, &pot, 1.0);
        let t_end = 0.005;
        for (scheme, lo, hi) in [(Scheme::ExplicitRk2, 3.0, 5.0), (Scheme::Imex, 1.6, 2.4)] {
            let final_at = |dt: f64| {
                let mut s = EvolutionState::new(u0.clone(), eps, pot).unwrap();
                let mut st = Stepper::new(u0.chart_arc().clone(), scheme);
                let n = (t_end / dt).round() as usize;
                s.dt = t_end / n as f64;
                for _ in 0..n {
                    st.step(&mut s).unwrap();
                }
                s.u.into_values()
            };
            let base = 0.5 * bound;
            let a = final_at(base);
            let b = final_at(base / 2.0);
            let c = final_at(base / 4.0);
            let d = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            let ratio = d(&a, &b) / d(&b, &c);
            assert!((lo..=hi).contains(&ratio), "{scheme:?}: {ratio}");
        }
    }

    #[test]
    fn snapshot_round_trip() {
        let mut u = ScalarField::from_fn(flat(8, 1.0), |p| p.x1 - p.x2);
        u.time = 0.125;
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.bin");
        write_snapshot(&p, &u, 0.05).unwrap();
        let s = read_snapshot(&p).unwrap();
        assert_eq!(s.geometry, "flat-torus");
        assert_eq!(s.shape, (8, 8));
        assert_eq!((s.epsilon, s.time), (0.05, 0.125));
        assert_eq!(s.values, u.values());
    }

    #[test]
    fn excess_power_fit() {
        let sweep: Vec<(f64, f64)> = [0.08, 0.04, 0.02]
            .iter()
            .map(|&e| (e, 3.0 * f64::powf(e, 1.5)))
            .collect();
        assert!((fit_excess_power(&sweep).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(fit_excess_power(&[(0.1, 0.0), (0.05, 1e-3)]), None);
    }

    #[test]
    fn constant_data_has_zero_gradient_scaling() {
        let u = ScalarField::constant(flat(8, 1.0), 1.0);
        let r = check_gradient_scaling(&[(0.1, vec![u.clone()]), (0.05, vec![u])], (0.0, 1.0), 1.5);
        assert!(r.scaled.iter().all(|s| s.1 == 0.0) && r.pass);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn comparison_principle_rk2(a in -0.9f64..0.9, b in 0.0f64..0.5, k in 1u32..4, ph in 0.0f64..6.0) {
            let chart = flat(24, 1.0);
            let u0 = ScalarField::from_fn(chart.clone(), |p: ChartPoint| a * (k as f64 * std::f64::consts::TAU * p.x1 + ph).sin());
            let v0 = u0.map(|x| (x + b).min(1.0));
            let c = cfg(Scheme::ExplicitRk2, 0.004);
            let mut us = Vec::new();
            run(u0, 0.1, Potential::quartic(), &c, &mut |s| { us.push(s.u.clone()); Ok(()) }).unwrap();
            let mut vs = Vec::new();
            run(v0, 0.1, Potential::quartic(), &c, &mut |s| { vs.push(s.u.clone()); Ok(()) }).unwrap();
            for (u, v) in us.iter().zip(&vs) {
                for (x, y) in u.values().iter().zip(v.values()) {
                    prop_assert!(*x <= y + 1e-8);
                }
            }
        }
    }
}
