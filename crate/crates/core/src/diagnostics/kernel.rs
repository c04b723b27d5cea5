//! The cutoff backward-heat kernel `φ(x, t) = ζ̂(d²)·η̂(d², t)` with
//! `η̂(ρ, t) = (s − t)^{−(N−1)/2}·exp(−ρ/(4(s − t)))`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ops::FarGhost;
use crate::geometry::{ChartPoint, GridChart, ScalarField, SpaceForm};
use crate::potential::Potential;

/// Nonic smoothstep cutoff in `ρ = d²`: one on `[0, R₀²/4]`, zero on
/// `[R₀², ∞)`. It is `C⁴`, so second differences of `φ` converge at a
/// clean second order across the joins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Zeta {
    pub r0: f64,
}

impl Zeta {
    /// `(ζ, ζ′, ζ″)` at `ρ`.
    pub fn eval(&self, rho: f64) -> (f64, f64, f64) {
        let a = 0.25 * self.r0 * self.r0;
        let b = self.r0 * self.r0;
        if rho <= a {
            return (1.0, 0.0, 0.0);
        }
        if rho >= b {
            return (0.0, 0.0, 0.0);
        }
        let w = b - a;
        let t = (rho - a) / w;
        let u = 1.0 - t;
        let t5 = t.powi(5);
        let s = t5 * (126.0 - 420.0 * t + 540.0 * t * t - 315.0 * t.powi(3) + 70.0 * t.powi(4));
        let s1 = 630.0 * (t * u).powi(4);
        let s2 = 2520.0 * (t * u).powi(3) * (1.0 - 2.0 * t);
        ((1.0 - s).clamp(0.0, 1.0), -s1 / w, -s2 / (w * w))
    }

    /// `(sup|ζ′|, sup|ζ″|)`, which scale like `1/R₀²` and `1/R₀⁴`.
    pub fn derivative_bounds(&self) -> (f64, f64) {
        let w = 0.75 * self.r0 * self.r0;
        // max of 630t⁴(1−t)⁴ is 630/256; |2520t³(1−t)³(1−2t)| peaks at t = ½ − √7/14
        let t = 0.5 - 7f64.sqrt() / 14.0;
        let m2 = 2520.0 * (t * (1.0 - t)).powi(3) * (1.0 - 2.0 * t);
        (630.0 / 256.0 / w, m2 / (w * w))
    }
}

/// `φ` with its time derivative and Laplace–Beltrami.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub dt: f64,
    pub laplacian: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub form: SpaceForm,
    pub y: ChartPoint,
    pub s: f64,
    pub zeta: Zeta,
}

impl KernelSpec {
    /// Kernel at pole `y` and reference time `s`, with `R₀ = inj/2`.
    pub fn new(form: SpaceForm, y: ChartPoint, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::domain(format!("reference time {s} must be positive")));
        }
        if !form.contains(y) {
            return Err(Error::domain(format!("kernel pole {y:?} outside the chart")));
        }
        Ok(Self {
            form,
            y,
            s,
            zeta: Zeta {
                r0: 0.5 * form.inj_radius(),
            },
        })
    }

    pub fn r0(&self) -> f64 {
        self.zeta.r0
    }

    fn half_power(&self) -> f64 {
        0.5 * (self.form.dimension() as f64 - 1.0)
    }

    /// `(η̂, ∂ₜη̂, ∂_ρη̂, ∂_ρρη̂)` at `ρ = d²`.
    pub fn eta(&self, rho: f64, t: f64) -> (f64, f64, f64, f64) {
        let tau = self.s - t;
        let e = tau.powf(-self.half_power()) * (-rho / (4.0 * tau)).exp();
        let et = e / tau * (self.half_power() - rho / (4.0 * tau));
        let er = -e / (4.0 * tau);
        let err = e / (16.0 * tau * tau);
        (e, et, er, err)
    }

    /// Evaluates `φ`, `∂ₜφ` and `Δφ` at `x`, time `t < s`.
    pub fn evaluate(&self, x: ChartPoint, t: f64) -> Result<KernelValue> {
        if !(t < self.s) {
            return Err(Error::domain(format!("kernel time {t} must precede s = {}", self.s)));
        }
        Ok(self.evaluate_unchecked(x, t))
    }

    pub(crate) fn evaluate_unchecked(&self, x: ChartPoint, t: f64) -> KernelValue {
        let d = self.form.distance_unchecked(self.y, x);
        let rho = d * d;
        let (z, z1, z2) = self.zeta.eval(rho);
        if z == 0.0 && z1 == 0.0 {
            return KernelValue {
                value: 0.0,
                dt: 0.0,
                laplacian: 0.0,
            };
        }
        let (e, et, er, err) = self.eta(rho, t);
        let p_r = z1 * e + z * er;
        let p_rr = z2 * e + 2.0 * z1 * er + z * err;
        // Δφ = ∂_ρρφ·|∇d²|² + ∂_ρφ·Δd², with |∇d²|² = 4d²
        let lap_d2 = self.form.laplacian_of_distance_squared_unchecked(d);
        KernelValue {
            value: z * e,
            dt: z * et,
            laplacian: p_rr * 4.0 * rho + p_r * lap_d2,
        }
    }

    pub fn field(&self, chart: Arc<GridChart>, t: f64) -> ScalarField {
        let mut f = ScalarField::from_fn(chart, |x| self.evaluate_unchecked(x, t).value);
        f.time = t;
        f
    }

    /// `𝒢(t) = ∫φ·εE dV`.
    pub fn weighted_energy(&self, u: &ScalarField, epsilon: f64, potential: &Potential, t: f64) -> Result<f64> {
        if !(t < self.s) {
            return Err(Error::domain(format!("kernel time {t} must precede s = {}", self.s)));
        }
        let e = super::energy_density(u, epsilon, potential);
        let phi = self.field(u.chart_arc().clone(), t);
        let prod: Vec<f64> = phi
            .values()
            .iter()
            .zip(e.values())
            .map(|(a, b)| a * b * epsilon)
            .collect();
        Ok(u.chart().integrate_slice(&prod))
    }
}

/// Max of `|(∂ₜ + Δ)φ_analytic − (∂ₜ + Δ)φ_discrete|` over nodes accepted by
/// `keep`, where the discrete operator is the grid Laplacian and a centred
/// time difference with step `dt`.
pub fn kernel_fd_error(
    k: &KernelSpec,
    chart: Arc<GridChart>,
    t: f64,
    dt: f64,
    keep: &dyn Fn(ChartPoint) -> bool,
) -> Result<f64> {
    if !(t + dt < k.s) {
        return Err(Error::domain("time stencil reaches the reference time"));
    }
    let phi = k.field(chart.clone(), t);
    let mut lap = vec![0.0; chart.len()];
    chart.laplacian_into(phi.values(), FarGhost::Value(0.0), &mut lap);
    let mut worst: f64 = 0.0;
    for (idx, l) in lap.iter().enumerate() {
        let x = chart.point_at(idx);
        if !keep(x) {
            continue;
        }
        let a = k.evaluate_unchecked(x, t);
        let fd_t = (k.evaluate_unchecked(x, t + dt).value - k.evaluate_unchecked(x, t - dt).value) / (2.0 * dt);
        worst = worst.max(((a.dt + a.laplacian) - (fd_t + l)).abs());
    }
    Ok(worst)
}

/// Errors of [`kernel_fd_error`] on successively doubled grids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelFdStudy {
    pub geometry: String,
    pub resolutions: Vec<(usize, usize)>,
    pub errors: Vec<f64>,
    pub ratios: Vec<f64>,
}

impl KernelFdStudy {
    pub fn pass(&self, lo: f64, hi: f64) -> bool {
        !self.ratios.is_empty() && self.ratios.iter().all(|r| (lo..=hi).contains(r))
    }
}

pub fn kernel_fd_study(
    k: &KernelSpec,
    base: (usize, usize),
    levels: usize,
    t: f64,
    keep: &dyn Fn(ChartPoint) -> bool,
) -> Result<KernelFdStudy> {
    let mut resolutions = Vec::new();
    let mut errors = Vec::new();
    for l in 0..levels {
        let (n1, n2) = (base.0 << l, base.1 << l);
        let chart = Arc::new(GridChart::new(k.form, n1, n2)?);
        // time step tied to the spatial step keeps both errors O(h²)
        let dt = 0.5 * chart.h_max() * (k.s - t).min(1.0) * 0.1;
        errors.push(kernel_fd_error(k, chart, t, dt, keep)?);
        resolutions.push((n1, n2));
    }
    let ratios = errors.windows(2).map(|w| w[0] / w[1]).collect();
    Ok(KernelFdStudy {
        geometry: k.form.id().to_string(),
        resolutions,
        errors,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn value_at_pole() {
        let k = KernelSpec::new(SpaceForm::flat_torus(1.0), ChartPoint::new(0.5, 0.5), 0.1).unwrap();
        let v = k.evaluate(ChartPoint::new(0.5, 0.5), 0.06).unwrap();
        assert!((v.value - 0.04f64.powf(-0.5)).abs() < 1e-12);
        assert!(k.evaluate(ChartPoint::new(0.5, 0.5), 0.1).is_err());
        let far = k.evaluate(ChartPoint::new(0.0, 0.0), 0.0).unwrap();
        assert_eq!((far.value, far.dt, far.laplacian), (0.0, 0.0, 0.0));
    }

    #[test]
    fn radial_identity() {
        let k = KernelSpec::new(SpaceForm::sphere(), ChartPoint::new(1.0, 1.0), 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let rho = rng.gen_range(0.0..2.0);
            let t = rng.gen_range(0.0..0.49);
            let (e, _, er, err) = k.eta(rho, t);
            let scale = e * e / ((k.s - t) * (k.s - t));
            assert!((er * er - e * err).abs() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn zeta_is_smooth_and_bounded() {
        let z = Zeta { r0: 0.25 };
        let (b1, b2) = z.derivative_bounds();
        let mut prev = 1.0;
        for k in 0..=4000 {
            let rho = k as f64 * 0.1 / 4000.0;
            let (v, d1, d2) = z.eval(rho);
            assert!(v <= prev + 1e-15 && (0.0..=1.0).contains(&v));
            assert!(d1.abs() <= b1 * (1.0 + 1e-12) && d2.abs() <= b2 * (1.0 + 1e-12));
            let h = 1e-8;
            let fd = (z.eval(rho + h).0 - z.eval(rho - h).0) / (2.0 * h);
            assert!((fd - d1).abs() < 1e-4 * b1);
            prev = v;
        }
        assert_eq!(z.eval(0.0625).0, 0.0);
        assert_eq!(z.eval(0.25 * 0.0625).0, 1.0);
    }

    #[test]
    fn analytic_heat_operator_matches_grid() {
        let k = KernelSpec::new(SpaceForm::flat_torus(1.0), ChartPoint::new(0.5, 0.5), 0.05).unwrap();
        let study = kernel_fd_study(&k, (64, 64), 3, 0.0, &|_| true).unwrap();
        assert!(study.pass(3.0, 5.0), "{study:?}");
    }

    #[test]
    fn weighted_energy_is_linear() {
        let chart = Arc::new(GridChart::new(SpaceForm::flat_torus(1.0), 64, 64).unwrap());
        let k = KernelSpec::new(*chart.form(), ChartPoint::new(0.5, 0.5), 0.1).unwrap();
        let q = Potential::quartic();
        let one = ScalarField::constant(chart.clone(), 1.0);
        assert_eq!(k.weighted_energy(&one, 0.1, &q, 0.0).unwrap(), 0.0);
        let u = ScalarField::from_fn(chart.clone(), |p| ((p.x1 - 0.5) / 0.1).tanh());
        let g1 = k.weighted_energy(&u, 0.1, &q, 0.0).unwrap();
        let g2 = k
            .weighted_energy(&u, 0.1, &Potential::scaled_quartic(2.0), 0.0)
            .unwrap();
        assert!(g1 > 0.0 && g2 > g1);
        assert!(k.weighted_energy(&u, 0.1, &q, 0.2).is_err());
    }
}
