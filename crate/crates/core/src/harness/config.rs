//! Experiment configuration: TOML with dotted section names.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::Scheme;
use crate::geometry::{Chart, ChartPoint, SpaceForm};
use crate::initial_data::{GeneralMode, GeneralSpec, InterfaceSpec};
use crate::profile::{validate_weight, WeightSpec};

/// Environment variable overriding the configured output root.
pub const OUTPUT_ROOT_ENV: &str = "ACMF_OUTPUT_ROOT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryKind {
    FlatTorus,
    Sphere,
    Hyperbolic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub kind: GeometryKind,
    /// Torus side length.
    #[serde(default = "one")]
    pub side: f64,
    /// Radius of the hyperbolic disk.
    #[serde(default = "rho_max_default")]
    pub rho_max: f64,
}

fn one() -> f64 {
    1.0
}

fn rho_max_default() -> f64 {
    2.5
}

impl GeometrySection {
    pub fn form(&self) -> SpaceForm {
        match self.kind {
            GeometryKind::FlatTorus => SpaceForm::flat_torus(self.side),
            GeometryKind::Sphere => SpaceForm::sphere(),
            GeometryKind::Hyperbolic => SpaceForm::hyperbolic(self.rho_max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// `[n1, n2]` used for every ε unless `sizes` is given.
    pub shape: [usize; 2],
    /// Per-ε shapes, aligned with `epsilon.values`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sizes: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonSection {
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    #[serde(default = "one")]
    pub scale: f64,
}

impl Default for PotentialSection {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct WeightSection {
    /// Weight exponent; the minimal admissible value for the geometry when
    /// absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Run even if the weight fails validation (control experiments).
    #[serde(default)]
    pub allow_invalid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceSection {
    pub center: [f64; 2],
    pub radius: f64,
    /// Truncation width; the default tube width when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataMode {
    WellPrepared,
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub mode: DataMode,
    #[serde(default = "general_mode_default")]
    pub general: GeneralMode,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default = "perturbation_default")]
    pub perturbation: f64,
    #[serde(default = "wavenumber_default")]
    pub wavenumber: u32,
    #[serde(default)]
    pub seed: u64,
}

fn general_mode_default() -> GeneralMode {
    GeneralMode::MollifiedStep
}

fn perturbation_default() -> f64 {
    0.1
}

fn wavenumber_default() -> u32 {
    3
}

impl DataSection {
    pub fn general_spec(&self) -> GeneralSpec {
        GeneralSpec {
            mode: self.general,
            amplitude: self.amplitude,
            perturbation: self.perturbation,
            wavenumber: self.wavenumber,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperSection {
    pub scheme: Scheme,
    pub dt_safety: f64,
    pub t_end: f64,
    /// Time between diagnostic samples.
    pub sample_interval: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    /// Bearing of the pole on the initial interface.
    #[serde(default)]
    pub pole_angle: f64,
    /// Explicit pole in chart coordinates; overrides `pole_angle`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pole: Option<[f64; 2]>,
    /// Start of the fitting window.
    pub t0: f64,
    /// Reference time.
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowsSection {
    /// Radius of the discrepancy ball centred on the initial interface.
    pub disc_radius: f64,
    /// Time window `[t_a, t_b]` of the discrepancy sup.
    pub disc_time: [f64; 2],
    /// Largest density ball radius.
    pub density_r_max: f64,
    /// Time window of the BV quantities.
    pub bv_time: [f64; 2],
    /// Radius of the bump test function of the Brakke residual and the
    /// time-derivative budget.
    pub bump_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Write a snapshot every this many samples; 0 writes only the first
    /// and last.
    #[serde(default)]
    pub snapshot_every: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub geometry: GeometrySection,
    pub grid: GridSection,
    pub epsilon: EpsilonSection,
    #[serde(default)]
    pub potential: PotentialSection,
    #[serde(default)]
    pub weight: WeightSection,
    pub interface: InterfaceSection,
    pub data: DataSection,
    pub stepper: StepperSection,
    pub kernel: KernelSection,
    pub windows: WindowsSection,
    pub output: OutputSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn form(&self) -> SpaceForm {
        self.geometry.form()
    }

    pub fn weight(&self) -> WeightSpec {
        match self.weight.c {
            Some(c) => WeightSpec::new(c),
            None => WeightSpec::for_lambda(self.form().lambda()),
        }
    }

    pub fn interface(&self) -> InterfaceSpec {
        InterfaceSpec::new(
            ChartPoint::new(self.interface.center[0], self.interface.center[1]),
            self.interface.radius,
        )
    }

    pub fn delta(&self) -> f64 {
        self.interface
            .delta
            .unwrap_or_else(|| self.interface().default_delta(&self.form()))
    }

    pub fn shape_for(&self, index: usize) -> (usize, usize) {
        let s = self.grid.sizes.get(index).unwrap_or(&self.grid.shape);
        (s[0], s[1])
    }

    /// Output root, honouring [`OUTPUT_ROOT_ENV`].
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_ROOT_ENV) {
            Some(root) => PathBuf::from(root).join(&self.name),
            None => self.output.dir.clone(),
        }
    }

    /// Every violation, not just the first.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let form = self.form();
        let eps = &self.epsilon.values;
        if self.name.trim().is_empty() || self.name.contains(['/', '\\']) {
            errs.push(format!("name {:?} must be a nonempty path component", self.name));
        }
        match self.geometry.kind {
            GeometryKind::FlatTorus if !(self.geometry.side > 0.0) => {
                errs.push(format!("geometry.side {} must be positive", self.geometry.side))
            }
            GeometryKind::Hyperbolic if !(self.geometry.rho_max > 0.0) => {
                errs.push(format!("geometry.rho_max {} must be positive", self.geometry.rho_max))
            }
            _ => {}
        }
        if eps.is_empty() {
            errs.push("epsilon.values is empty".into());
        }
        if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            errs.push("epsilon.values must be positive and finite".into());
        }
        if eps.windows(2).any(|w| !(w[1] < w[0])) {
            errs.push("epsilon.values must be strictly decreasing".into());
        }
        if !self.grid.sizes.is_empty() && self.grid.sizes.len() != eps.len() {
            errs.push(format!(
                "grid.sizes has {} entries for {} epsilon values",
                self.grid.sizes.len(),
                eps.len()
            ));
        }
        let shapes: Vec<(usize, usize)> = (0..eps.len().max(1)).map(|i| self.shape_for(i)).collect();
        for &(n1, n2) in &shapes {
            let min = if matches!(form.chart(), Chart::LatLong) { 4 } else { 3 };
            if n1 < min || n2 < min {
                errs.push(format!("grid {n1}x{n2} too small"));
            }
            if matches!(form.chart(), Chart::LatLong) && n2 % 2 != 0 {
                errs.push(format!("sphere grid needs an even longitude count, got {n2}"));
            }
        }
        for (i, e) in eps.iter().enumerate() {
            let (n1, n2) = self.shape_for(i);
            if n1 < 3 || n2 < 3 {
                continue;
            }
            if let Ok(chart) = crate::geometry::GridChart::new(form, n1, n2) {
                // metric-weighted spacing on the interface circle
                let h = resolution_near(&chart, self.interface.center, self.interface.radius);
                if *e < 4.0 * h {
                    errs.push(format!("epsilon {e} under-resolved: 4h = {:.4}", 4.0 * h));
                }
            }
        }
        if !(self.potential.scale > 0.0) {
            errs.push(format!("potential.scale {} must be positive", self.potential.scale));
        }
        let report = validate_weight(&self.weight(), form.lambda());
        if !report.pass() && !self.weight.allow_invalid {
            for c in report.checks.iter().filter(|c| !c.pass) {
                errs.push(format!("weight check {:?} failed: {}", c.name, c.detail));
            }
        }
        let iface = self.interface();
        match iface.validate(&form) {
            Ok(()) => {
                let bound = iface.radius.min(form.inj_radius() - iface.radius);
                if let Some(d) = self.interface.delta {
                    if !(d > 0.0 && d < bound) {
                        errs.push(format!("interface.delta {d} outside (0, {bound})"));
                    }
                }
                if let Chart::GeodesicPolar { rho_max } = form.chart() {
                    let far = form.distance_unchecked(ChartPoint::new(0.0, 0.0), iface.center) + iface.radius;
                    if far + 3.0 * self.delta() >= rho_max {
                        errs.push(format!("interface tube reaches the disk edge rho_max = {rho_max}"));
                    }
                }
            }
            Err(e) => errs.push(format!("interface: {e}")),
        }
        if !(self.data.amplitude > 0.0) {
            errs.push(format!("data.amplitude {} must be positive", self.data.amplitude));
        }
        let st = &self.stepper;
        if !(st.dt_safety > 0.0 && st.dt_safety <= 1.0) {
            errs.push(format!("stepper.dt_safety {} outside (0, 1]", st.dt_safety));
        }
        if !(st.t_end > 0.0 && st.t_end.is_finite()) {
            errs.push(format!("stepper.t_end {} must be positive", st.t_end));
        }
        if !(st.sample_interval > 0.0 && st.sample_interval <= st.t_end) {
            errs.push(format!(
                "stepper.sample_interval {} outside (0, t_end]",
                st.sample_interval
            ));
        }
        let k = &self.kernel;
        if !(k.t0 >= 0.0 && k.t0 < k.s) {
            errs.push(format!(
                "kernel window needs 0 <= t0 < s, got t0 = {}, s = {}",
                k.t0, k.s
            ));
        }
        let w = &self.windows;
        if !(w.disc_radius > 0.0) {
            errs.push("windows.disc_radius must be positive".into());
        }
        for (name, [a, b]) in [("disc_time", w.disc_time), ("bv_time", w.bv_time)] {
            if !(a > 0.0 && a < b) {
                errs.push(format!("windows.{name} needs 0 < start < end, got [{a}, {b}]"));
            }
        }
        let r0 = 0.5 * form.inj_radius();
        if !(w.density_r_max > 0.0 && w.density_r_max < r0) {
            errs.push(format!("windows.density_r_max {} outside (0, {r0})", w.density_r_max));
        }
        if !(w.bump_radius > 0.0 && w.bump_radius < form.inj_radius()) {
            errs.push(format!("windows.bump_radius {} outside (0, inj)", w.bump_radius));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}

/// Grid spacing across the interface circle: the larger metric spacing
/// for circles off the chart pole, the radial spacing for circles centred
/// on it (the azimuthal direction is then tangential).
pub fn resolution_near(chart: &crate::geometry::GridChart, center: [f64; 2], radius: f64) -> f64 {
    let form = chart.form();
    let (h1, h2) = chart.spacing();
    match form.chart() {
        Chart::PeriodicSquare { .. } => h1.max(h2),
        _ => {
            let c = ChartPoint::new(center[0], center[1]);
            let off = form.distance_unchecked(ChartPoint::new(0.0, 0.0), c);
            if off < 1e-12 {
                h1
            } else {
                let ring = form.sn(off + radius).max(form.sn((off - radius).abs()));
                h1.max(h2 * ring)
            }
        }
    }
}

/// The shipped smoke configuration.
pub const SMOKE_CONFIG: &str = include_str!("../../../../configs/smoke.toml");
