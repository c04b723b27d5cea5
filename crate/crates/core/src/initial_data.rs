//! Initial fields for circular interfaces.
//!
//! Well-prepared data compose the profile with a truncated signed distance,
//! `u₀ = h_ε(Ψ(d̃))`; general data are clipped ramps of slope `1/ε` that are
//! not of that form.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{density_ratio, energy_density};
use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, GridChart, ScalarField, SpaceForm};
use crate::numerics::spread_ratio;
use crate::potential::Potential;
use crate::profile::{surface_tension, ProfileSolution};

/// A geodesic circle `Σ₀ = ∂B_ρ₀(center)`; the disk is the `+1` phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceSpec {
    pub center: ChartPoint,
    pub radius: f64,
}

impl InterfaceSpec {
    pub fn new(center: ChartPoint, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn validate(&self, form: &SpaceForm) -> Result<()> {
        if !form.contains(self.center) {
            return Err(Error::domain(format!(
                "interface center {:?} outside the chart",
                self.center
            )));
        }
        let inj = form.inj_radius();
        if !(self.radius > 0.0 && self.radius < inj) {
            return Err(Error::domain(format!(
                "interface radius {} outside (0, {inj})",
                self.radius
            )));
        }
        Ok(())
    }

    /// Length of the geodesic circle, `2π·sn(ρ₀)`.
    pub fn length(&self, form: &SpaceForm) -> f64 {
        2.0 * PI * form.sn(self.radius)
    }

    /// Default tube half-width `min(ρ₀, inj − ρ₀)/8`.
    pub fn default_delta(&self, form: &SpaceForm) -> f64 {
        self.radius.min(form.inj_radius() - self.radius) / 8.0
    }
}

/// Signed distance to the circle, positive inside.
pub fn signed_distance(x: ChartPoint, iface: &InterfaceSpec, form: &SpaceForm) -> f64 {
    iface.radius - form.distance_unchecked(iface.center, x)
}

/// The odd truncation `Ψ`: identity on `[0, δ]`, a quartic on `[δ, 3δ]`
/// whose slope falls from 1 to 0 with zero end curvature, and the plateau
/// `2δ` beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationSpec {
    pub delta: f64,
}

impl TruncationSpec {
    pub fn new(delta: f64) -> Self {
        Self { delta }
    }

    /// `(Ψ(s), Ψ′(s))`.
    pub fn psi(&self, s: f64) -> (f64, f64) {
        let d = self.delta;
        let a = s.abs();
        let (v, slope) = if a <= d {
            (a, 1.0)
        } else if a < 3.0 * d {
            let t = (a - d) / (2.0 * d);
            (
                d + 2.0 * d * (t - t * t * t + 0.5 * t.powi(4)),
                1.0 - 3.0 * t * t + 2.0 * t * t * t,
            )
        } else {
            (2.0 * d, 0.0)
        };
        (v.copysign(s), slope)
    }

    pub fn psi_second(&self, s: f64) -> f64 {
        let d = self.delta;
        let a = s.abs();
        if a <= d || a >= 3.0 * d {
            return 0.0;
        }
        let t = (a - d) / (2.0 * d);
        (6.0 * t * t - 6.0 * t) / (2.0 * d) * s.signum()
    }
}

fn check_tube(iface: &InterfaceSpec, form: &SpaceForm, spec: &TruncationSpec) -> Result<()> {
    iface.validate(form)?;
    let room = iface.radius.min(form.inj_radius() - iface.radius);
    if !(spec.delta > 0.0 && spec.delta < room) {
        return Err(Error::Config(vec![format!(
            "tube half-width {} must lie in (0, {room}) for radius {}",
            spec.delta, iface.radius
        )]));
    }
    Ok(())
}

/// `z₀ = Ψ(d̃)` on the grid.
pub fn truncated_distance_field(chart: Arc<GridChart>, iface: &InterfaceSpec, spec: &TruncationSpec) -> ScalarField {
    let form = *chart.form();
    ScalarField::from_fn(chart, |x| spec.psi(signed_distance(x, iface, &form)).0)
}

/// `u₀ = h_ε(Ψ(d̃))`.
pub fn well_prepared_field(
    chart: Arc<GridChart>,
    iface: &InterfaceSpec,
    profile: &ProfileSolution,
    spec: &TruncationSpec,
) -> Result<ScalarField> {
    let form = *chart.form();
    check_tube(iface, &form, spec)?;
    Ok(ScalarField::from_fn(chart, |x| {
        profile.value(spec.psi(signed_distance(x, iface, &form)).0)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneralMode {
    /// Clipped linear ramp of slope `k₀/ε`, rounded at the corners.
    MollifiedStep,
    /// The same ramp across a radially perturbed circle
    /// `ρ₀(1 + a·cos(mϑ + phase))`.
    Perturbed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralSpec {
    pub mode: GeneralMode,
    /// Sup bound of the field.
    pub amplitude: f64,
    /// Relative radial perturbation `a`.
    pub perturbation: f64,
    pub wavenumber: u32,
    pub seed: u64,
}

impl Default for GeneralSpec {
    fn default() -> Self {
        Self {
            mode: GeneralMode::MollifiedStep,
            amplitude: 1.0,
            perturbation: 0.1,
            wavenumber: 3,
            seed: 0,
        }
    }
}

/// `C¹` clip of `s` to `[−1, 1]` with quadratic corners of half-width 0.25.
pub fn soft_clip(s: f64) -> f64 {
    const A: f64 = 0.25;
    let t = s.abs();
    let v = if t <= 1.0 - A {
        t
    } else if t < 1.0 + A {
        let e = t - (1.0 - A);
        t - e * e / (4.0 * A)
    } else {
        1.0
    };
    v.copysign(s)
}

pub fn general_field(
    chart: Arc<GridChart>,
    epsilon: f64,
    iface: &InterfaceSpec,
    spec: &GeneralSpec,
) -> Result<ScalarField> {
    let form = *chart.form();
    iface.validate(&form)?;
    if !(spec.amplitude > 0.0) {
        return Err(Error::domain("general data amplitude must be positive"));
    }
    let phase = ChaCha8Rng::seed_from_u64(spec.seed).gen_range(0.0..2.0 * PI);
    let m = spec.wavenumber as f64;
    Ok(ScalarField::from_fn(chart, |x| {
        let d = form.distance_unchecked(iface.center, x);
        let r = match spec.mode {
            GeneralMode::MollifiedStep => iface.radius,
            GeneralMode::Perturbed => {
                let theta = form.bearing(iface.center, x);
                iface.radius * (1.0 + spec.perturbation * (m * theta + phase).cos())
            }
        };
        spec.amplitude * soft_clip((r - d) / epsilon)
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct H1Member {
    pub epsilon: f64,
    pub sup_abs: f64,
    pub eps_grad_sup: f64,
    pub energy_mass: f64,
    pub l1_to_step: f64,
    pub density_ratio_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct H1Clause {
    pub clause: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct H1Report {
    pub members: Vec<H1Member>,
    /// `σ₀·Length(Σ₀)`.
    pub target_mass: f64,
    pub clauses: Vec<H1Clause>,
}

impl H1Report {
    pub fn pass(&self) -> bool {
        self.clauses.iter().all(|c| c.pass)
    }
}

/// Measures an ε-family of initial data against the general-data hypotheses.
/// `family` holds `(ε, u₀^ε)` pairs; `k0` is the claimed sup bound.
pub fn validate_h1(
    family: &[(f64, ScalarField)],
    iface: &InterfaceSpec,
    potential: &Potential,
    k0: f64,
) -> Result<H1Report> {
    if family.len() < 3 {
        return Err(Error::Input(format!(
            "need at least 3 sweep members, got {}",
            family.len()
        )));
    }
    let form = *family[0].1.chart().form();
    let target_mass = surface_tension(potential) * iface.length(&form);
    let mut members = Vec::new();
    for (eps, u) in family {
        let chart = u.chart();
        let eps = *eps;
        let e = energy_density(u, eps, potential);
        let energy_mass = eps * e.integrate();
        let grad = u.gradient_norm_sq_centered();
        let eps_grad_sup = eps * grad.max().sqrt();
        let step = ScalarField::from_fn(u.chart_arc().clone(), |x| {
            if signed_distance(x, iface, &form) > 0.0 {
                1.0
            } else {
                -1.0
            }
        });
        let l1_to_step = u
            .with_values(
                u.values()
                    .iter()
                    .zip(step.values())
                    .map(|(a, b)| (a - b).abs())
                    .collect(),
            )
            .integrate();
        let r_min = 4.0 * chart.h_max();
        let r_max = 0.5 * form.inj_radius() / 2.0;
        let mut dmax: f64 = 0.0;
        for k in 0..8 {
            let ang = 2.0 * PI * k as f64 / 8.0;
            let Some(x) = point_on_circle(&form, iface, ang) else {
                continue;
            };
            let mut r = r_min;
            while r < r_max {
                dmax = dmax.max(density_ratio(u, eps, potential, x, r)?);
                r *= 2.0;
            }
        }
        members.push(H1Member {
            epsilon: eps,
            sup_abs: u.sup_norm(),
            eps_grad_sup,
            energy_mass,
            l1_to_step,
            density_ratio_max: dmax,
        });
    }
    let col = |f: fn(&H1Member) -> f64| members.iter().map(f).collect::<Vec<_>>();
    let dens = col(|m| m.density_ratio_max);
    let sups = col(|m| m.sup_abs);
    let grads = col(|m| m.eps_grad_sup);
    let l1 = col(|m| m.l1_to_step);
    let last = members.last().expect("non-empty");
    let mass_err = (last.energy_mass - target_mass).abs() / target_mass;
    let clauses = vec![
        H1Clause {
            clause: "(i) energy mass",
            pass: mass_err <= 0.05,
            detail: format!(
                "finest mass {:.5} vs {target_mass:.5} (rel {mass_err:.4})",
                last.energy_mass
            ),
        },
        H1Clause {
            clause: "(ii) L1 to step",
            pass: l1.windows(2).all(|w| w[1] < w[0]),
            detail: format!("{l1:?}"),
        },
        H1Clause {
            clause: "(iii) density bound",
            pass: dens.iter().all(|d| d.is_finite()) && spread_ratio(&dens) <= 2.0,
            detail: format!("{dens:?}"),
        },
        H1Clause {
            clause: "(iv) sup bound",
            pass: sups.iter().all(|&s| s <= k0 + 1e-12),
            detail: format!("{sups:?} vs k0 = {k0}"),
        },
        H1Clause {
            clause: "(v) eps-scaled gradient",
            pass: spread_ratio(&grads) <= 1.5,
            detail: format!("{grads:?}"),
        },
    ];
    Ok(H1Report {
        members,
        target_mass,
        clauses,
    })
}

/// The point of `Σ₀` reached from the center along bearing `angle`, when
/// the chart can express it in closed form.
pub fn point_on_circle(form: &SpaceForm, iface: &InterfaceSpec, angle: f64) -> Option<ChartPoint> {
    use crate::geometry::Chart;
    let c = iface.center;
    let r = iface.radius;
    match form.chart() {
        Chart::PeriodicSquare { side } => Some(ChartPoint::new(
            (c.x1 + r * angle.cos()).rem_euclid(side),
            (c.x2 + r * angle.sin()).rem_euclid(side),
        )),
        _ => {
            // polar charts: closed form only about the chart pole
            if c.x1 == 0.0 {
                Some(ChartPoint::new(r, angle.rem_euclid(2.0 * PI)))
            } else {
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{solve_profile, WeightSpec};

    fn flat_chart(n: usize) -> Arc<GridChart> {
        Arc::new(GridChart::new(SpaceForm::flat_torus(1.0), n, n).unwrap())
    }

    #[test]
    fn signed_distance_examples() {
        let flat = SpaceForm::flat_torus(1.0);
        let iface = InterfaceSpec::new(ChartPoint::new(0.5, 0.5), 0.3);
        assert!((signed_distance(iface.center, &iface, &flat) - 0.3).abs() < 1e-15);
        assert!(signed_distance(ChartPoint::new(0.8, 0.5), &iface, &flat).abs() < 1e-15);
        let sphere = SpaceForm::sphere();
        let cap = InterfaceSpec::new(ChartPoint::new(0.0, 0.0), 1.0);
        let d = signed_distance(ChartPoint::new(1.5, 2.0), &cap, &sphere);
        assert!((d + 0.5).abs() < 1e-12, "{d}");
    }

    #[test]
    fn psi_shape() {
        let t = TruncationSpec::new(0.1);
        assert_eq!(t.psi(0.0), (0.0, 1.0));
        let (v, s) = t.psi(0.5);
        assert_eq!((v, s), (0.2, 0.0));
        let mut prev = (0.0, 1.0);
        for k in 1..=2000 {
            let s = k as f64 * 0.0003;
            let (v, d) = t.psi(s);
            assert_eq!(t.psi(-s).0, -v);
            assert!(v >= prev.0 && d <= prev.1 + 1e-15 && (0.0..=1.0).contains(&d));
            assert!(t.psi_second(s) <= 0.0);
            if s >= 0.4 {
                assert_eq!(v, 0.2);
            }
            // slope and curvature consistent with the value
            let hh = 1e-6;
            let fd = (t.psi(s + hh).0 - t.psi(s - hh).0) / (2.0 * hh);
            assert!((fd - d).abs() < 1e-6);
            prev = (v, d);
        }
        // C² at the joins
        for &x in &[0.1, 0.3] {
            assert!((t.psi_second(x - 1e-9) - t.psi_second(x + 1e-9)).abs() < 1e-6);
        }
    }

    #[test]
    fn well_prepared_matches_tanh_near_interface() {
        let chart = flat_chart(256);
        let iface = InterfaceSpec::new(ChartPoint::new(0.5, 0.5), 0.3);
        let prof = solve_profile(0.05, &Potential::quartic(), &WeightSpec::new(0.0)).unwrap();
        let spec = TruncationSpec::new(0.1);
        let u = well_prepared_field(chart.clone(), &iface, &prof, &spec).unwrap();
        let form = *chart.form();
        let mut worst: f64 = 0.0;
        for (k, &v) in u.values().iter().enumerate() {
            let d = signed_distance(chart.point_at(k), &iface, &form);
            if d.abs() < 0.05 {
                worst = worst.max((v - (d / 0.05).tanh()).abs());
            }
            assert!(v.abs() <= 1.0);
        }
        assert!(worst < 1e-3, "{worst}");
        // plateau at the center
        let c = u.values()[chart.index(128, 128)];
        assert!((c - prof.value(0.2)).abs() < 1e-14);
        // orientation flip negates the field
        let neg = ScalarField::from_fn(chart.clone(), |x| {
            -prof.value(spec.psi(-signed_distance(x, &iface, &form)).0)
        });
        assert!(u.values().iter().zip(neg.values()).all(|(a, b)| a == b));
    }

    #[test]
    fn truncated_distance_is_one_lipschitz() {
        for (form, n1, n2, iface) in [
            (
                SpaceForm::flat_torus(1.0),
                128,
                128,
                InterfaceSpec::new(ChartPoint::new(0.5, 0.5), 0.3),
            ),
            (
                SpaceForm::sphere(),
                128,
                64,
                InterfaceSpec::new(ChartPoint::new(1.2, 0.5), 1.0),
            ),
            (
                SpaceForm::hyperbolic(2.5),
                128,
                64,
                InterfaceSpec::new(ChartPoint::new(0.0, 0.0), 1.0),
            ),
        ] {
            let chart = Arc::new(GridChart::new(form, n1, n2).unwrap());
            let spec = TruncationSpec::new(iface.default_delta(&form));
            let z = truncated_distance_field(chart.clone(), &iface, &spec);
            let g = z.gradient_norm_sq_derived().max().sqrt();
            assert!(g <= 1.0 + 2.0 * chart.h_max(), "{}: {g}", form.id());
        }
    }

    #[test]
    fn tube_violations_are_config_errors() {
        let chart = flat_chart(32);
        let prof = solve_profile(0.1, &Potential::quartic(), &WeightSpec::new(0.0)).unwrap();
        let iface = InterfaceSpec::new(ChartPoint::new(0.5, 0.5), 0.3);
        let r = well_prepared_field(chart.clone(), &iface, &prof, &TruncationSpec::new(0.25));
        assert!(matches!(r, Err(Error::Config(_))));
        let big = InterfaceSpec::new(ChartPoint::new(0.5, 0.5), 0.6);
        assert!(well_prepared_field(chart, &big, &prof, &TruncationSpec::new(0.01)).is_err());
    }

    #[test]
    fn general_data_bounds() {
        let iface = InterfaceSpec::new(ChartPoint::new(0.5, 0.5), 0.3);
        let form = SpaceForm::flat_torus(1.0);
        let mut scaled = Vec::new();
        for (eps, n) in [(0.1, 64), (0.05, 128), (0.025, 256)] {
            let chart = flat_chart(n);
            let u = general_field(chart.clone(), eps, &iface, &GeneralSpec::default()).unwrap();
            assert!(u.sup_norm() <= 1.0);
            let on = ChartPoint::new(0.8, 0.5);
            let v = soft_clip(signed_distance(on, &iface, &form) / eps);
            assert!(v.abs() < 1e-12);
            scaled.push(eps * u.gradient_norm_sq_centered().max().sqrt());
        }
        assert!(spread_ratio(&scaled) < 1.5, "{scaled:?}");
        let spec = GeneralSpec {
            mode: GeneralMode::Perturbed,
            amplitude: 1.2,
            seed: 7,
            ..Default::default()
        };
        let a = general_field(flat_chart(64), 0.05, &iface, &spec).unwrap();
        let b = general_field(flat_chart(64), 0.05, &iface, &spec).unwrap();
        assert_eq!(a.values(), b.values());
        assert!((a.sup_norm() - 1.2).abs() < 1e-12);
    }

    #[test]
    fn soft_clip_is_c1() {
        for k in 0..4000 {
            let s = -2.0 + k as f64 * 1e-3;
            let h = 1e-7;
            let d1 = (soft_clip(s + h) - soft_clip(s)) / h;
            let d0 = (soft_clip(s) - soft_clip(s - h)) / h;
            assert!((d1 - d0).abs() < 1e-5);
            assert!(soft_clip(s).abs() <= 1.0);
        }
    }
}
