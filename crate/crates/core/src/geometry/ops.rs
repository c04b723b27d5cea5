//! Finite-volume / finite-difference operators on grid charts.
//!
//! All operators are second order in the chart spacing. The Laplace-Beltrami
//! operator is written in flux form with metric coefficients on cell faces,
//! so it annihilates constants exactly and is symmetric with respect to the
//! node quadrature; the edge-averaged gradient norm is the matching discrete
//! Dirichlet density.

use rayon::prelude::*;

use super::grid::{GridChart, ScalarField};
use crate::error::Result;

/// How values beyond the last row of a far-field chart are produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum FarGhost {
    /// The Dirichlet value of the chart.
    Chart,
    /// A fixed value (zero for the homogeneous part of the operator).
    Value(f64),
    /// Linear extrapolation from the last two rows, for derived fields.
    Extrapolate,
}

/// Components `H₁₁, H₁₂, H₂₂` of the covariant Hessian in chart coordinates.
#[derive(Debug, Clone)]
pub struct HessianField {
    pub h11: Vec<f64>,
    pub h12: Vec<f64>,
    pub h22: Vec<f64>,
}

impl GridChart {
    fn ghosts(&self, u: &[f64], far: FarGhost) -> (Vec<f64>, Vec<f64>) {
        let (n1, n2) = self.shape();
        match (self.far_field(), far) {
            (Some(_), FarGhost::Value(v)) => self.ghost_rows(u, Some(v)),
            (Some(_), FarGhost::Extrapolate) => {
                let (low, _) = self.ghost_rows(u, None);
                let high = (0..n2)
                    .map(|j| 2.0 * u[self.index(n1 - 1, j)] - u[self.index(n1 - 2, j)])
                    .collect();
                (low, high)
            }
            _ => self.ghost_rows(u, None),
        }
    }

    #[inline]
    fn row_slices<'a>(
        &self,
        u: &'a [f64],
        low: &'a [f64],
        high: &'a [f64],
        i: usize,
    ) -> (&'a [f64], &'a [f64], &'a [f64]) {
        let (n1, n2) = self.shape();
        let row = &u[i * n2..(i + 1) * n2];
        let below = if i == 0 { low } else { &u[(i - 1) * n2..i * n2] };
        let above = if i + 1 == n1 {
            high
        } else {
            &u[(i + 1) * n2..(i + 2) * n2]
        };
        (below, row, above)
    }

    pub(crate) fn laplacian_into(&self, u: &[f64], far: FarGhost, out: &mut [f64]) {
        let (_, n2) = self.shape();
        let (h1, h2) = self.spacing();
        let (ih1, ih2) = (1.0 / (h1 * h1), 1.0 / (h2 * h2));
        let (low, high) = self.ghosts(u, far);
        let face1 = self.face1();
        let sg = self.sqrt_g();
        let g22 = self.g22();
        out.par_chunks_mut(n2).enumerate().for_each(|(i, o)| {
            let (b, r, a) = self.row_slices(u, &low, &high, i);
            let fa = face1[i + 1] * ih1 / sg[i];
            let fb = face1[i] * ih1 / sg[i];
            let c2 = g22[i] * ih2;
            for j in 0..n2 {
                let jm = if j == 0 { n2 - 1 } else { j - 1 };
                let jp = if j + 1 == n2 { 0 } else { j + 1 };
                o[j] = fa * (a[j] - r[j]) - fb * (r[j] - b[j]) + c2 * (r[jp] - 2.0 * r[j] + r[jm]);
            }
        });
    }

    /// Diagonal of the homogeneous negative Laplacian, `−∂(Δu)ᵢ/∂uᵢ`.
    pub(crate) fn neg_laplacian_diagonal(&self) -> Vec<f64> {
        let (n1, n2) = self.shape();
        let (h1, h2) = self.spacing();
        let face1 = self.face1();
        let sg = self.sqrt_g();
        let g22 = self.g22();
        let mut d = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            // periodic self-coupling when a dimension wraps onto itself is excluded by n ≥ 4
            let v = (face1[i + 1] + face1[i]) / (h1 * h1 * sg[i]) + 2.0 * g22[i] / (h2 * h2);
            d.extend(std::iter::repeat_n(v, n2));
        }
        d
    }

    /// Contribution of the Dirichlet far-field value to `Δu` (zero elsewhere).
    pub(crate) fn far_field_source(&self) -> Vec<f64> {
        let zero = vec![0.0; self.len()];
        let mut out = vec![0.0; self.len()];
        self.laplacian_into(&zero, FarGhost::Chart, &mut out);
        out
    }

    pub(crate) fn gradient_slices(&self, u: &[f64], far: FarGhost) -> (Vec<f64>, Vec<f64>) {
        let (n1, n2) = self.shape();
        let (h1, h2) = self.spacing();
        let (low, high) = self.ghosts(u, far);
        let mut d1 = vec![0.0; n1 * n2];
        let mut d2 = vec![0.0; n1 * n2];
        for i in 0..n1 {
            let (b, r, a) = self.row_slices(u, &low, &high, i);
            for j in 0..n2 {
                let jm = if j == 0 { n2 - 1 } else { j - 1 };
                let jp = if j + 1 == n2 { 0 } else { j + 1 };
                d1[i * n2 + j] = (a[j] - b[j]) / (2.0 * h1);
                d2[i * n2 + j] = (r[jp] - r[jm]) / (2.0 * h2);
            }
        }
        (d1, d2)
    }

    pub(crate) fn grad_norm_sq_edge(&self, u: &[f64], far: FarGhost) -> Vec<f64> {
        let (n1, n2) = self.shape();
        let (h1, h2) = self.spacing();
        let (low, high) = self.ghosts(u, far);
        let face1 = self.face1();
        let sg = self.sqrt_g();
        let g22 = self.g22();
        let mut out = vec![0.0; n1 * n2];
        for i in 0..n1 {
            let (b, r, a) = self.row_slices(u, &low, &high, i);
            let fa = 0.5 * face1[i + 1] / (h1 * h1 * sg[i]);
            let fb = 0.5 * face1[i] / (h1 * h1 * sg[i]);
            let c2 = 0.5 * g22[i] / (h2 * h2);
            for j in 0..n2 {
                let jm = if j == 0 { n2 - 1 } else { j - 1 };
                let jp = if j + 1 == n2 { 0 } else { j + 1 };
                let (da, db) = (a[j] - r[j], r[j] - b[j]);
                let (dp, dm) = (r[jp] - r[j], r[j] - r[jm]);
                out[i * n2 + j] = fa * da * da + fb * db * db + c2 * (dp * dp + dm * dm);
            }
        }
        out
    }

    pub(crate) fn grad_norm_sq_centered(&self, u: &[f64], far: FarGhost) -> Vec<f64> {
        let (d1, d2) = self.gradient_slices(u, far);
        let n2 = self.shape().1;
        let g22 = self.g22();
        d1.iter()
            .zip(&d2)
            .enumerate()
            .map(|(k, (a, b))| a * a + g22[k / n2] * b * b)
            .collect()
    }

    pub(crate) fn inner_gradient_slices(&self, f: &[f64], g: &[f64], far: FarGhost) -> Vec<f64> {
        let (f1, f2) = self.gradient_slices(f, far);
        let (g1, g2) = self.gradient_slices(g, far);
        let n2 = self.shape().1;
        let g22 = self.g22();
        (0..f.len())
            .map(|k| f1[k] * g1[k] + g22[k / n2] * f2[k] * g2[k])
            .collect()
    }

    pub(crate) fn hessian_slices(&self, u: &[f64], far: FarGhost) -> HessianField {
        let (n1, n2) = self.shape();
        let (h1, h2) = self.spacing();
        let (low, high) = self.ghosts(u, far);
        let gam1 = self.gamma1_22();
        let gam2 = self.gamma2_12();
        let n = n1 * n2;
        let (mut h11, mut h12, mut h22) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for i in 0..n1 {
            let (b, r, a) = self.row_slices(u, &low, &high, i);
            for j in 0..n2 {
                let jm = if j == 0 { n2 - 1 } else { j - 1 };
                let jp = if j + 1 == n2 { 0 } else { j + 1 };
                let k = i * n2 + j;
                let d1 = (a[j] - b[j]) / (2.0 * h1);
                let d2 = (r[jp] - r[jm]) / (2.0 * h2);
                h11[k] = (a[j] - 2.0 * r[j] + b[j]) / (h1 * h1);
                h22[k] = (r[jp] - 2.0 * r[j] + r[jm]) / (h2 * h2) + gam1[i] * d1;
                h12[k] = (a[jp] - a[jm] - b[jp] + b[jm]) / (4.0 * h1 * h2) - gam2[i] * d2;
            }
        }
        HessianField { h11, h12, h22 }
    }

    pub(crate) fn integrate_slice(&self, f: &[f64]) -> f64 {
        let n2 = self.shape().1;
        f.chunks(n2)
            .enumerate()
            .map(|(i, row)| self.cell_volume(i) * row.iter().sum::<f64>())
            .sum()
    }
}

impl HessianField {
    /// `Hess(v, v)` per node for coordinate components `(v¹, v²)`.
    pub fn quadratic_form(&self, v1: &[f64], v2: &[f64]) -> Vec<f64> {
        (0..self.h11.len())
            .map(|k| self.h11[k] * v1[k] * v1[k] + 2.0 * self.h12[k] * v1[k] * v2[k] + self.h22[k] * v2[k] * v2[k])
            .collect()
    }

    /// `|Hess|² = gⁱᵏ gʲˡ Hᵢⱼ Hₖₗ` per node.
    pub fn norm_sq(&self, chart: &GridChart) -> Vec<f64> {
        let n2 = chart.shape().1;
        let g22 = chart.g22();
        (0..self.h11.len())
            .map(|k| {
                let g = g22[k / n2];
                self.h11[k].powi(2) + 2.0 * g * self.h12[k].powi(2) + (g * self.h22[k]).powi(2)
            })
            .collect()
    }
}

impl ScalarField {
    /// Discrete Laplace-Beltrami operator `Δ = div ∘ ∇`.
    pub fn laplace_beltrami(&self) -> ScalarField {
        let mut out = vec![0.0; self.values().len()];
        self.chart().laplacian_into(self.values(), FarGhost::Chart, &mut out);
        self.with_values(out)
    }

    /// `|∇f|² = gⁱʲ ∂ᵢf ∂ⱼf`, averaged over the two edges in each direction.
    pub fn gradient_norm_sq(&self) -> ScalarField {
        self.with_values(self.chart().grad_norm_sq_edge(self.values(), FarGhost::Chart))
    }

    /// `|∇f|²` from centred differences.
    pub fn gradient_norm_sq_centered(&self) -> ScalarField {
        self.with_values(self.chart().grad_norm_sq_centered(self.values(), FarGhost::Chart))
    }

    /// Centred `|∇f|²` for fields that do not take the chart's far-field
    /// value; ghosts beyond a far-field boundary are extrapolated.
    pub fn gradient_norm_sq_derived(&self) -> ScalarField {
        self.with_values(self.chart().grad_norm_sq_centered(self.values(), FarGhost::Extrapolate))
    }

    /// Coordinate partial derivatives `(∂₁f, ∂₂f)`.
    pub fn partials(&self) -> (ScalarField, ScalarField) {
        let (d1, d2) = self.chart().gradient_slices(self.values(), FarGhost::Chart);
        (self.with_values(d1), self.with_values(d2))
    }

    /// `⟨∇f, ∇g⟩` from centred differences.
    pub fn inner_gradient(&self, other: &ScalarField) -> Result<ScalarField> {
        self.same_chart(other)?;
        Ok(self.with_values(
            self.chart()
                .inner_gradient_slices(self.values(), other.values(), FarGhost::Chart),
        ))
    }

    pub fn hessian(&self) -> HessianField {
        self.chart().hessian_slices(self.values(), FarGhost::Chart)
    }

    /// `Hess f(v, v)` for a vector field given by its coordinate components.
    pub fn hessian_quadratic_form(&self, v1: &ScalarField, v2: &ScalarField) -> Result<ScalarField> {
        self.same_chart(v1)?;
        self.same_chart(v2)?;
        Ok(self.with_values(self.hessian().quadratic_form(v1.values(), v2.values())))
    }

    /// `½Δ|∇f|² − |Hess f|² − ⟨∇f, ∇Δf⟩ − Ric(∇f, ∇f)` with `Ric = λg`.
    pub fn bochner_residual(&self) -> ScalarField {
        let chart = self.chart();
        let u = self.values();
        let n = u.len();
        let grad_sq = chart.grad_norm_sq_centered(u, FarGhost::Chart);
        let mut lap_grad_sq = vec![0.0; n];
        chart.laplacian_into(&grad_sq, FarGhost::Extrapolate, &mut lap_grad_sq);
        let hess_sq = chart.hessian_slices(u, FarGhost::Chart).norm_sq(chart);
        let mut lap = vec![0.0; n];
        chart.laplacian_into(u, FarGhost::Chart, &mut lap);
        let (f1, f2) = chart.gradient_slices(u, FarGhost::Chart);
        let (l1, l2) = chart.gradient_slices(&lap, FarGhost::Extrapolate);
        let n2 = chart.shape().1;
        let g22 = chart.g22();
        let lambda = chart.form().lambda();
        let out = (0..n)
            .map(|k| {
                let cross = f1[k] * l1[k] + g22[k / n2] * f2[k] * l2[k];
                0.5 * lap_grad_sq[k] - hess_sq[k] - cross - lambda * grad_sq[k]
            })
            .collect();
        self.with_values(out)
    }

    /// `∫ f dV` by the node quadrature `Σ f·√g·h₁h₂`.
    pub fn integrate(&self) -> f64 {
        self.chart().integrate_slice(self.values())
    }
}
