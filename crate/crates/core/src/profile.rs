//! The weighted one-dimensional transition profile.
//!
//! `h_ε` solves `(1/φ)(φ h′)′ = f(h)/ε²` on `(0, 1)` with `h(0) = 0`,
//! `h(1) = 1`, for the weight `φ(τ) = exp(cτ²/2)`. With `c = 0` it is the
//! standing wave (`tanh(τ/ε)` for the quartic potential, up to an
//! exponentially small boundary correction at `τ = 1`).
//!
//! The boundary value problem is discretised with fourth-order central
//! differences on a uniform grid and solved by Newton's method; derivative
//! values come from the same stencils, which keeps the discrete
//! equipartition defect of the `c = 0` profile below `1e-6`.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{adaptive_simpson, hermite, BandedMatrix};
use crate::potential::Potential;

/// Weight `φ(τ) = exp(cτ²/2)` on `[0, 1]`, evenly reflected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub c: f64,
}

impl WeightSpec {
    pub fn new(c: f64) -> Self {
        Self { c }
    }

    /// The minimal admissible weight for Ricci lower bound `lambda`.
    pub fn for_lambda(lambda: f64) -> Self {
        Self { c: (-lambda).max(0.0) }
    }

    #[inline]
    pub fn phi(&self, tau: f64) -> f64 {
        (0.5 * self.c * tau * tau).exp()
    }

    #[inline]
    pub fn phi_prime(&self, tau: f64) -> f64 {
        self.c * tau * self.phi(tau)
    }

    /// `φ′/φ`.
    #[inline]
    pub fn log_slope(&self, tau: f64) -> f64 {
        self.c * tau
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightCheck {
    pub name: &'static str,
    pub pass: bool,
    /// First `τ` where the check failed.
    pub violation_at: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightReport {
    pub checks: Vec<WeightCheck>,
}

impl WeightReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&WeightCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks the weight hypotheses on a dense grid of `[0, 1]`: `φ(0) ≥ 1`,
/// `φ′(0) = 0`, monotone and convex, `φ′(τ) ≤ Cτ`, and
/// `(φ′/φ)′ ≥ max{−λ, 0}`. Derivatives of `φ′/φ` are taken numerically.
pub fn validate_weight(weight: &WeightSpec, lambda: f64) -> WeightReport {
    const SAMPLES: usize = 2000;
    const TOL: f64 = 1e-9;
    let dt = 1.0 / SAMPLES as f64;
    let taus: Vec<f64> = (0..=SAMPLES).map(|k| k as f64 * dt).collect();
    let phi: Vec<f64> = taus.iter().map(|&t| weight.phi(t)).collect();
    let mut checks = Vec::new();

    let p0 = weight.phi(0.0);
    checks.push(WeightCheck {
        name: "phi(0) >= 1",
        pass: p0 >= 1.0,
        violation_at: (p0 < 1.0).then_some(0.0),
        detail: format!("phi(0) = {p0}"),
    });
    let d0 = weight.phi_prime(0.0);
    checks.push(WeightCheck {
        name: "phi'(0) = 0",
        pass: d0.abs() <= TOL,
        violation_at: (d0.abs() > TOL).then_some(0.0),
        detail: format!("phi'(0) = {d0}"),
    });
    let first = |pred: &dyn Fn(usize) -> bool, range: std::ops::Range<usize>| {
        range.into_iter().find(|&k| !pred(k)).map(|k| taus[k])
    };
    let mono = first(&|k| phi[k + 1] - phi[k] >= -TOL, 0..SAMPLES);
    checks.push(WeightCheck {
        name: "monotone",
        pass: mono.is_none(),
        violation_at: mono,
        detail: String::new(),
    });
    let convex = first(&|k| phi[k + 1] - 2.0 * phi[k] + phi[k - 1] >= -TOL, 1..SAMPLES);
    checks.push(WeightCheck {
        name: "convex",
        pass: convex.is_none(),
        violation_at: convex,
        detail: String::new(),
    });
    let lip = taus[1..].iter().map(|&t| weight.phi_prime(t) / t).fold(0.0, f64::max);
    checks.push(WeightCheck {
        name: "phi'(tau) <= C tau",
        pass: lip.is_finite(),
        violation_at: None,
        detail: format!("C = {lip}"),
    });
    // r = φ′/φ from central differences of log φ, then r′ the same way
    let r: Vec<f64> = (1..SAMPLES)
        .map(|k| (phi[k + 1].ln() - phi[k - 1].ln()) / (2.0 * dt))
        .collect();
    let need = (-lambda).max(0.0);
    let mut worst = f64::INFINITY;
    let mut at = None;
    for k in 1..r.len() - 1 {
        let rp = (r[k + 1] - r[k - 1]) / (2.0 * dt);
        worst = worst.min(rp);
        if rp < need - 1e-6 && at.is_none() {
            at = Some(taus[k + 1]);
        }
    }
    checks.push(WeightCheck {
        name: "(phi'/phi)' >= max(-lambda, 0)",
        pass: at.is_none(),
        violation_at: at,
        detail: format!("min (phi'/phi)' = {worst:.6}, required {need}"),
    });
    WeightReport { checks }
}

/// Equipartition energy per unit interface length, `σ₀ = ∫₋₁¹ √(2F(u)) du`.
pub fn surface_tension(potential: &Potential) -> f64 {
    adaptive_simpson(&|u| (2.0 * potential.value(u)).sqrt(), -1.0, 1.0, 1e-13)
}

/// Discrete solution of the profile problem on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct ProfileSolution {
    pub epsilon: f64,
    pub weight: WeightSpec,
    pub potential: Potential,
    pub tau: Vec<f64>,
    pub h: Vec<f64>,
    pub h_prime: Vec<f64>,
    /// `ℰ(h) = ∫₀¹ (½h′² + F(h)/ε²) φ dτ`.
    pub energy: f64,
    /// Newton residual history (max-norm, scaled by ε²).
    pub residuals: Vec<f64>,
}

/// Solver controls for [`solve_profile`].
#[derive(Debug, Clone, Copy)]
pub struct ProfileOptions {
    /// Grid intervals per unit of `1/ε`.
    pub nodes_per_inverse_epsilon: f64,
    pub min_intervals: usize,
    pub tol: f64,
    pub max_newton: usize,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            nodes_per_inverse_epsilon: 80.0,
            min_intervals: 256,
            tol: 1e-9,
            max_newton: 50,
        }
    }
}

pub fn solve_profile(epsilon: f64, potential: &Potential, weight: &WeightSpec) -> Result<ProfileSolution> {
    solve_profile_with(epsilon, potential, weight, ProfileOptions::default())
}

pub fn solve_profile_with(
    epsilon: f64,
    potential: &Potential,
    weight: &WeightSpec,
    opts: ProfileOptions,
) -> Result<ProfileSolution> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::domain(format!("epsilon {epsilon} outside (0, 1]")));
    }
    if !(weight.c >= 0.0 && weight.c.is_finite()) {
        return Err(Error::domain(format!("weight strength {} must be >= 0", weight.c)));
    }
    let mut n = ((opts.nodes_per_inverse_epsilon / epsilon).ceil() as usize).max(opts.min_intervals);
    n += n % 2;
    let d = 1.0 / n as f64;
    let tau: Vec<f64> = (0..=n).map(|i| i as f64 * d).collect();
    let inv_eps2 = 1.0 / (epsilon * epsilon);
    let norm = (1.0 / epsilon).tanh();
    let mut h: Vec<f64> = tau.iter().map(|&t| (t / epsilon).tanh() / norm).collect();
    h[0] = 0.0;
    h[n] = 1.0;

    // Stencils acting on h with odd reflection h(−τ) = −h(τ) at the left end.
    let d2c = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
    let d1c = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
    // one-sided at i = n − 1: offsets −4..=1
    let d2r = [1.0 / 12.0, -0.5, 7.0 / 6.0, -1.0 / 3.0, -5.0 / 4.0, 5.0 / 6.0];
    let d1r = [-1.0 / 12.0, 0.5, -1.5, 5.0 / 6.0, 0.25];

    // Each equation row i ∈ 1..n is a list of (node, d2 coefficient, d1 coefficient).
    let stencil = |i: usize| -> Vec<(isize, f64, f64)> {
        if i + 1 < n {
            (0..5).map(|k| (i as isize + k as isize - 2, d2c[k], d1c[k])).collect()
        } else {
            (0..6)
                .map(|k| {
                    let d1 = if k == 0 { 0.0 } else { d1r[k - 1] };
                    (i as isize + k as isize - 4, d2r[k], d1)
                })
                .collect()
        }
    };
    // resolve a (possibly reflected) node to (index, sign)
    let node = |j: isize| -> (usize, f64) {
        if j < 0 {
            ((-j) as usize, -1.0)
        } else {
            (j as usize, 1.0)
        }
    };

    let mut residuals = Vec::new();
    let mut last_step = f64::INFINITY;
    let unknowns = n - 1;
    for iter in 0..=opts.max_newton {
        let mut res = vec![0.0; unknowns];
        let mut jac = BandedMatrix::zeros(unknowns, 4, 3);
        for i in 1..n {
            let slope = weight.log_slope(tau[i]);
            let mut r = -potential.deriv(h[i]) * inv_eps2;
            jac.add(i - 1, i - 1, -potential.second_deriv(h[i]) * inv_eps2);
            for (j, c2, c1) in stencil(i) {
                let (jj, sign) = node(j);
                let coef = (c2 / (d * d) + slope * c1 / d) * sign;
                r += coef * h[jj];
                if (1..n).contains(&jj) {
                    jac.add(i - 1, jj - 1, coef);
                }
            }
            res[i - 1] = r;
        }
        let rnorm = res.iter().fold(0.0f64, |m, v| m.max(v.abs())) * epsilon * epsilon;
        residuals.push(rnorm);
        if !rnorm.is_finite() {
            break;
        }
        // the residual floors near roundoff, so also require a tiny update
        if rnorm < opts.tol && last_step < 1e-13 {
            let h_prime = derivative(&h, d, &d1c);
            let energy = profile_energy(&tau, &h, &h_prime, epsilon, potential, weight);
            log::debug!("profile eps={epsilon} c={} converged in {iter} Newton steps", weight.c);
            return Ok(ProfileSolution {
                epsilon,
                weight: *weight,
                potential: *potential,
                tau,
                h,
                h_prime,
                energy,
                residuals,
            });
        }
        if iter == opts.max_newton {
            break;
        }
        let neg: Vec<f64> = res.iter().map(|v| -v).collect();
        let step = jac.solve(neg)?;
        // keep iterates inside the wells
        let mut damp = 1.0;
        while damp > 1e-4
            && (1..n).any(|i| {
                let v = h[i] + damp * step[i - 1];
                !(v > -1e-12 && v < 1.0 + 1e-12)
            })
        {
            damp *= 0.5;
        }
        last_step = 0.0;
        for i in 1..n {
            h[i] += damp * step[i - 1];
            last_step = last_step.max((damp * step[i - 1]).abs());
        }
    }
    Err(Error::Solver {
        message: format!("profile Newton iteration failed for eps = {epsilon}, c = {}", weight.c),
        history: residuals,
    })
}

fn derivative(h: &[f64], d: f64, d1c: &[f64; 5]) -> Vec<f64> {
    let n = h.len() - 1;
    let at = |j: isize| -> f64 {
        if j < 0 {
            -h[(-j) as usize]
        } else {
            h[j as usize]
        }
    };
    let mut out = vec![0.0; n + 1];
    for i in 0..=n {
        out[i] = if i + 2 <= n {
            (0..5).map(|k| d1c[k] * at(i as isize + k as isize - 2)).sum::<f64>() / d
        } else if i + 1 == n {
            let c = [-1.0 / 12.0, 0.5, -1.5, 5.0 / 6.0, 0.25];
            (0..5).map(|k| c[k] * h[i + k - 3]).sum::<f64>() / d
        } else {
            let c = [0.25, -4.0 / 3.0, 3.0, -4.0, 25.0 / 12.0];
            (0..5).map(|k| c[k] * h[i + k - 4]).sum::<f64>() / d
        };
    }
    out
}

fn profile_energy(tau: &[f64], h: &[f64], hp: &[f64], epsilon: f64, potential: &Potential, weight: &WeightSpec) -> f64 {
    let n = tau.len() - 1;
    let d = 1.0 / n as f64;
    let g = |i: usize| (0.5 * hp[i] * hp[i] + potential.value(h[i]) / (epsilon * epsilon)) * weight.phi(tau[i]);
    // composite Simpson, n even
    let mut s = g(0) + g(n);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 * g(i) } else { 2.0 * g(i) };
    }
    s * d / 3.0
}

impl ProfileSolution {
    pub fn intervals(&self) -> usize {
        self.tau.len() - 1
    }

    /// `(h(τ), h′(τ))` by cubic Hermite interpolation; odd in `τ`, constant
    /// `±1` for `|τ| ≥ 1`.
    pub fn eval(&self, tau: f64) -> (f64, f64) {
        if tau < 0.0 {
            let (v, s) = self.eval(-tau);
            return (-v, s);
        }
        if tau >= 1.0 {
            return (1.0, 0.0);
        }
        let n = self.intervals();
        let k = ((tau * n as f64) as usize).min(n - 1);
        hermite(
            self.tau[k],
            self.tau[k + 1],
            self.h[k],
            self.h[k + 1],
            self.h_prime[k],
            self.h_prime[k + 1],
            tau,
        )
    }

    pub fn value(&self, tau: f64) -> f64 {
        self.eval(tau).0
    }

    /// Inverse profile: the `τ` with `h(τ) = u`, for `|u| < 1`.
    pub fn invert(&self, u: f64) -> Result<f64> {
        if !(u.abs() < 1.0) {
            return Err(Error::domain(format!("cannot invert the profile at |u| = {}", u.abs())));
        }
        if u < 0.0 {
            return Ok(-self.invert(-u)?);
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        // first node with h ≥ u
        let k = self.h.partition_point(|&v| v < u);
        if k == 0 {
            return Ok(0.0);
        }
        let (mut lo, mut hi) = (self.tau[k - 1], self.tau[k]);
        let mut t = 0.5 * (lo + hi);
        for _ in 0..200 {
            let (v, s) = self.eval(t);
            let r = v - u;
            if r == 0.0 {
                return Ok(t);
            }
            if r > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let newton = t - r / s;
            t = if s > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-15 {
                break;
            }
        }
        Ok(t)
    }

    /// Discrete defect `ε(½h′² − F(h)/ε²)` at node `i`.
    pub fn discrepancy_at_node(&self, i: usize) -> f64 {
        let e = self.epsilon;
        e * (0.5 * self.h_prime[i].powi(2) - self.potential.value(self.h[i]) / (e * e))
    }

    /// `sup` over `τ ∈ (0, 1)` of `ε(½h′² − F(h)/ε²)`.
    pub fn discrepancy_sup(&self) -> f64 {
        (1..self.intervals())
            .map(|i| self.discrepancy_at_node(i))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max h′ · ε`, the constant `C₁` in `0 < h′ ≤ C₁/ε`.
    pub fn slope_constant(&self) -> f64 {
        self.h_prime.iter().cloned().fold(0.0, f64::max) * self.epsilon
    }

    /// Largest discrete second derivative over interior nodes.
    pub fn max_second_difference(&self) -> f64 {
        let d = 1.0 / self.intervals() as f64;
        (1..self.intervals())
            .map(|i| (self.h[i + 1] - 2.0 * self.h[i] + self.h[i - 1]) / (d * d))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest forward difference over the region where `1 − h` is
    /// resolvable in double precision.
    pub fn min_resolved_increment(&self) -> f64 {
        (0..self.intervals())
            .filter(|&i| 1.0 - self.h[i + 1] > 1e-12)
            .map(|i| self.h[i + 1] - self.h[i])
            .fold(f64::INFINITY, f64::min)
    }

    /// Writes `tau,h,h_prime` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["tau", "h", "h_prime"])?;
        for i in 0..self.tau.len() {
            w.write_record(&[
                format!("{:.17e}", self.tau[i]),
                format!("{:.17e}", self.h[i]),
                format!("{:.17e}", self.h_prime[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_to(&self, out: &mut dyn Write) -> Result<()> {
        writeln!(out, "tau,h,h_prime")?;
        for i in 0..self.tau.len() {
            writeln!(out, "{:.17e},{:.17e},{:.17e}", self.tau[i], self.h[i], self.h_prime[i])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quartic(eps: f64, c: f64) -> ProfileSolution {
        solve_profile(eps, &Potential::quartic(), &WeightSpec::new(c)).unwrap()
    }

    #[test]
    fn standing_wave_oracle() {
        let sol = quartic(0.05, 0.0);
        assert_eq!(sol.h[0], 0.0);
        assert_eq!(*sol.h.last().unwrap(), 1.0);
        let err = sol
            .tau
            .iter()
            .zip(&sol.h)
            .filter(|(t, _)| **t <= 0.8)
            .map(|(t, h)| (h - (t / 0.05).tanh()).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-3, "sup error {err}");
        // equipartition: ε h′(0) = √(2F(0)) = 1
        assert!((0.05 * sol.h_prime[0] - 1.0).abs() <= 1e-3);
        assert!(sol.discrepancy_sup() <= 1e-6, "{}", sol.discrepancy_sup());
        assert!(sol.discrepancy_at_node(0).abs() <= 1e-6);
    }

    #[test]
    fn weighted_profile_is_monotone_and_concave() {
        for &eps in &[0.1, 0.05, 0.025] {
            for &c in &[0.0, 1.0, 3.0] {
                let sol = quartic(eps, c);
                assert!(sol.min_resolved_increment() > 0.0);
                assert!(
                    sol.max_second_difference() <= 1e-8,
                    "eps {eps} c {c}: {}",
                    sol.max_second_difference()
                );
                let low = sol.h_prime.iter().cloned().fold(f64::INFINITY, f64::min);
                assert!(low >= -1e-8, "eps {eps} c {c}: min slope {low}");
                assert!(sol.slope_constant() < 1.5);
            }
        }
    }

    #[test]
    fn discrepancy_decreases_along_the_profile() {
        // d/dτ(½h′² − F_ε(h)) = −(φ′/φ) h′²
        let sol = quartic(0.05, 1.0);
        let n = sol.intervals();
        let d = 1.0 / n as f64;
        let mut worst = 0.0f64;
        for i in 1..n - 1 {
            let q = |k: usize| sol.discrepancy_at_node(k) / sol.epsilon;
            let lhs = (q(i + 1) - q(i - 1)) / (2.0 * d);
            let rhs = -sol.weight.log_slope(sol.tau[i]) * sol.h_prime[i].powi(2);
            worst = worst.max((lhs - rhs).abs() / (1.0 / (sol.epsilon * sol.epsilon)));
        }
        assert!(worst < 1e-3, "{worst}");
    }

    #[test]
    fn weighted_discrepancy_shrinks_with_epsilon() {
        let sups: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&e| quartic(e, 1.0).discrepancy_sup().max(0.0))
            .collect();
        assert!(sups[0] > sups[1] && sups[1] > sups[2], "{sups:?}");
    }

    #[test]
    fn energy_scales_like_inverse_epsilon() {
        let c1: Vec<f64> = [0.1, 0.05, 0.025].iter().map(|&e| e * quartic(e, 1.0).energy).collect();
        // ε·ℰ → σ₀/2 = 2/3 for the half profile
        for v in &c1 {
            assert!((v - 2.0 / 3.0).abs() < 0.1, "{c1:?}");
        }
    }

    #[test]
    fn inverse_round_trips() {
        let sol = quartic(0.05, 0.0);
        assert_eq!(sol.invert(0.0).unwrap(), 0.0);
        let u = sol.value(0.3);
        assert!((sol.invert(u).unwrap() - 0.3).abs() < 1e-10);
        let t = sol.invert((0.5f64 / 0.05).tanh()).unwrap();
        assert!((t - 0.5).abs() < 2e-3, "{t}");
        let t = sol.invert(-0.7).unwrap();
        assert!((sol.value(t) + 0.7).abs() < 1e-12);
        assert!(matches!(sol.invert(1.0), Err(Error::Domain(_))));
        assert!(sol.invert(-1.2).is_err());
    }

    #[test]
    fn weight_validation() {
        assert!(validate_weight(&WeightSpec::new(0.0), 0.0).pass());
        let r = validate_weight(&WeightSpec::new(0.0), -1.0);
        assert!(!r.pass());
        let failed: Vec<_> = r.checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
        assert_eq!(failed, vec!["(phi'/phi)' >= max(-lambda, 0)"]);
        assert!(validate_weight(&WeightSpec::new(1.0), -1.0).pass());
        assert!(validate_weight(&WeightSpec::for_lambda(-1.0), -1.0).pass());
        assert!(validate_weight(&WeightSpec::for_lambda(1.0), 1.0).pass());
    }

    #[test]
    fn surface_tension_values() {
        assert!((surface_tension(&Potential::quartic()) - 4.0 / 3.0).abs() < 1e-10);
        assert!((surface_tension(&Potential::scaled_quartic(4.0)) - 8.0 / 3.0).abs() < 1e-10);
        assert_eq!(surface_tension(&Potential::scaled_quartic(0.0)), 0.0);
    }

    #[test]
    fn rejects_bad_epsilon() {
        assert!(solve_profile(0.0, &Potential::quartic(), &WeightSpec::new(0.0)).is_err());
        assert!(solve_profile(1.5, &Potential::quartic(), &WeightSpec::new(0.0)).is_err());
    }

    #[test]
    fn csv_export_starts_at_origin() {
        let sol = quartic(0.1, 0.0);
        let mut buf = Vec::new();
        sol.write_csv_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("tau,h,h_prime"));
        let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(first[0], 0.0);
        assert_eq!(first[1], 0.0);
    }
}
