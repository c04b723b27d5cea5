use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Chart, ChartPoint, SpaceForm};
use crate::error::{Error, Result};

/// How the first chart coordinate is closed off. The second coordinate is
/// always periodic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryPolicy {
    /// Flat torus: both coordinates periodic.
    Periodic,
    /// Latitude-longitude sphere: coordinate poles at both ends of `θ`.
    PoleRegularized,
    /// Geodesic polar disk: coordinate pole at `ρ = 0`, Dirichlet value at `ρmax`.
    PoleAndFarField { value: f64 },
}

/// A uniform grid over a chart of a [`SpaceForm`].
///
/// Curved charts are cell centred in the first coordinate,
/// `x¹ᵢ = (i + ½)h₁`, so no node sits on a coordinate pole; the pole face
/// carries zero flux because `sn(0) = 0`. Neighbours across a pole are the
/// nodes of the first (or last) ring shifted by half a turn, which requires
/// an even number of nodes around. The flat torus is node centred with
/// `xᵢ = i·h`.
#[derive(Debug, Clone)]
pub struct GridChart {
    form: SpaceForm,
    n1: usize,
    n2: usize,
    h1: f64,
    h2: f64,
    policy: BoundaryPolicy,
    x1: Vec<f64>,
    sqrt_g: Vec<f64>,
    /// `√g·g¹¹` on the face between rows `i − 1` and `i`, `i ∈ 0..=n1`.
    face1: Vec<f64>,
    /// `g²²` per row.
    g22: Vec<f64>,
    /// `sn·sn′` per row (minus the Christoffel symbol Γ¹₂₂).
    gamma1_22: Vec<f64>,
    /// `sn′/sn` per row (Christoffel symbol Γ²₁₂).
    gamma2_12: Vec<f64>,
}

impl GridChart {
    /// Builds the grid for `form` with `n1 × n2` nodes. Hyperbolic charts use
    /// the far-field value −1.
    pub fn new(form: SpaceForm, n1: usize, n2: usize) -> Result<Self> {
        let policy = match form.chart() {
            Chart::PeriodicSquare { .. } => BoundaryPolicy::Periodic,
            Chart::LatLong => BoundaryPolicy::PoleRegularized,
            Chart::GeodesicPolar { .. } => BoundaryPolicy::PoleAndFarField { value: -1.0 },
        };
        Self::with_policy(form, n1, n2, policy)
    }

    pub fn with_policy(form: SpaceForm, n1: usize, n2: usize, policy: BoundaryPolicy) -> Result<Self> {
        let mut problems = Vec::new();
        if n1 < 4 || n2 < 4 {
            problems.push(format!("grid {n1}x{n2} too small (need at least 4x4)"));
        }
        match (form.chart(), policy) {
            (Chart::PeriodicSquare { .. }, BoundaryPolicy::Periodic) => {}
            (Chart::LatLong, BoundaryPolicy::PoleRegularized) => {}
            (Chart::GeodesicPolar { .. }, BoundaryPolicy::PoleAndFarField { value }) => {
                if !value.is_finite() {
                    problems.push("far-field value must be finite".into());
                }
            }
            (c, p) => problems.push(format!("boundary policy {p:?} incompatible with chart {c:?}")),
        }
        if !matches!(form.chart(), Chart::PeriodicSquare { .. }) && !n2.is_multiple_of(2) {
            problems.push(format!("pole charts need an even azimuthal count, got {n2}"));
        }
        if !problems.is_empty() {
            return Err(Error::Config(problems));
        }

        let h1 = form.x1_extent() / n1 as f64;
        let h2 = form.x2_extent() / n2 as f64;
        let periodic = matches!(policy, BoundaryPolicy::Periodic);
        let x1: Vec<f64> = (0..n1)
            .map(|i| if periodic { i as f64 * h1 } else { (i as f64 + 0.5) * h1 })
            .collect();
        let (sqrt_g, g22, gamma1_22, gamma2_12, face1) = if periodic {
            (
                vec![1.0; n1],
                vec![1.0; n1],
                vec![0.0; n1],
                vec![0.0; n1],
                vec![1.0; n1 + 1],
            )
        } else {
            let sqrt_g: Vec<f64> = x1.iter().map(|&r| form.sn(r)).collect();
            let g22 = sqrt_g.iter().map(|s| 1.0 / (s * s)).collect();
            let gamma1_22 = x1.iter().map(|&r| form.sn(r) * form.sn_prime(r)).collect();
            let gamma2_12 = x1.iter().map(|&r| form.ct(r)).collect();
            let face1 = (0..=n1)
                .map(|i| {
                    if i == 0 || (i == n1 && matches!(form.chart(), Chart::LatLong)) {
                        0.0
                    } else {
                        form.sn(i as f64 * h1)
                    }
                })
                .collect();
            (sqrt_g, g22, gamma1_22, gamma2_12, face1)
        };
        Ok(Self {
            form,
            n1,
            n2,
            h1,
            h2,
            policy,
            x1,
            sqrt_g,
            face1,
            g22,
            gamma1_22,
            gamma2_12,
        })
    }

    pub fn form(&self) -> &SpaceForm {
        &self.form
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> (f64, f64) {
        (self.h1, self.h2)
    }

    pub fn policy(&self) -> BoundaryPolicy {
        self.policy
    }

    /// Largest geodesic spacing between neighbouring nodes.
    pub fn h_max(&self) -> f64 {
        let s_max = self.sqrt_g.iter().cloned().fold(0.0, f64::max);
        let h2 = if self.is_periodic() { self.h2 } else { s_max * self.h2 };
        self.h1.max(h2)
    }

    /// Smallest geodesic spacing between neighbouring nodes.
    pub fn h_min(&self) -> f64 {
        let s_min = self.sqrt_g.iter().cloned().fold(f64::INFINITY, f64::min);
        let h2 = if self.is_periodic() { self.h2 } else { s_min * self.h2 };
        self.h1.min(h2)
    }

    pub(crate) fn is_periodic(&self) -> bool {
        matches!(self.policy, BoundaryPolicy::Periodic)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n2 + j
    }

    pub fn point(&self, i: usize, j: usize) -> ChartPoint {
        ChartPoint::new(self.x1[i], j as f64 * self.h2)
    }

    pub fn point_at(&self, idx: usize) -> ChartPoint {
        self.point(idx / self.n2, idx % self.n2)
    }

    pub fn x1(&self) -> &[f64] {
        &self.x1
    }

    pub fn sqrt_g(&self) -> &[f64] {
        &self.sqrt_g
    }

    pub(crate) fn face1(&self) -> &[f64] {
        &self.face1
    }

    pub(crate) fn g22(&self) -> &[f64] {
        &self.g22
    }

    pub(crate) fn gamma1_22(&self) -> &[f64] {
        &self.gamma1_22
    }

    pub(crate) fn gamma2_12(&self) -> &[f64] {
        &self.gamma2_12
    }

    /// Quadrature weight `√g·h₁h₂` of every node of row `i`.
    #[inline]
    pub fn cell_volume(&self, i: usize) -> f64 {
        self.sqrt_g[i] * self.h1 * self.h2
    }

    /// Total area of the chart domain under the node quadrature.
    pub fn volume(&self) -> f64 {
        (0..self.n1).map(|i| self.cell_volume(i)).sum::<f64>() * self.n2 as f64
    }

    /// Exact area of the chart domain.
    pub fn exact_volume(&self) -> f64 {
        match self.form.chart() {
            Chart::PeriodicSquare { side } => side * side,
            Chart::LatLong => 4.0 * PI,
            Chart::GeodesicPolar { rho_max } => 2.0 * PI * (rho_max.cosh() - 1.0),
        }
    }

    /// Value at row `i` (possibly a ghost row `−1` or `n1`) and column `j`
    /// (wrapped), following the boundary policy.
    #[inline]
    pub(crate) fn neighbor(&self, u: &[f64], i: isize, j: isize) -> f64 {
        let n1 = self.n1 as isize;
        let n2 = self.n2 as isize;
        let jw = j.rem_euclid(n2);
        if (0..n1).contains(&i) {
            return u[(i * n2 + jw) as usize];
        }
        match self.policy {
            BoundaryPolicy::Periodic => u[(i.rem_euclid(n1) * n2 + jw) as usize],
            BoundaryPolicy::PoleRegularized => {
                let row = if i < 0 { -1 - i } else { 2 * n1 - 1 - i };
                let jj = (jw + n2 / 2).rem_euclid(n2);
                u[(row * n2 + jj) as usize]
            }
            BoundaryPolicy::PoleAndFarField { value } => {
                if i < 0 {
                    let jj = (jw + n2 / 2).rem_euclid(n2);
                    u[((-1 - i) * n2 + jj) as usize]
                } else {
                    value
                }
            }
        }
    }

    /// Ghost rows below row 0 and above row `n1 − 1`.
    pub(crate) fn ghost_rows(&self, u: &[f64], far_value: Option<f64>) -> (Vec<f64>, Vec<f64>) {
        let n2 = self.n2 as isize;
        let low = (0..n2).map(|j| self.neighbor(u, -1, j)).collect();
        let high = match (self.policy, far_value) {
            (BoundaryPolicy::PoleAndFarField { .. }, Some(v)) => vec![v; self.n2],
            _ => (0..n2).map(|j| self.neighbor(u, self.n1 as isize, j)).collect(),
        };
        (low, high)
    }

    /// The Dirichlet value imposed beyond the last row, if any.
    pub fn far_field(&self) -> Option<f64> {
        match self.policy {
            BoundaryPolicy::PoleAndFarField { value } => Some(value),
            _ => None,
        }
    }
}

/// A real function sampled on the nodes of a [`GridChart`].
#[derive(Debug, Clone)]
pub struct ScalarField {
    chart: Arc<GridChart>,
    values: Vec<f64>,
    pub time: f64,
}

impl ScalarField {
    pub fn new(chart: Arc<GridChart>, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != chart.len() {
            return Err(Error::Shape {
                expected: chart.shape(),
                found: (values.len(), 1),
            });
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite value at node {node}")));
        }
        Ok(Self { chart, values, time })
    }

    pub fn constant(chart: Arc<GridChart>, value: f64) -> Self {
        let n = chart.len();
        Self {
            chart,
            values: vec![value; n],
            time: 0.0,
        }
    }

    pub fn from_fn(chart: Arc<GridChart>, f: impl Fn(ChartPoint) -> f64) -> Self {
        let values = (0..chart.len()).map(|k| f(chart.point_at(k))).collect();
        Self {
            chart,
            values,
            time: 0.0,
        }
    }

    pub fn chart(&self) -> &GridChart {
        &self.chart
    }

    pub fn chart_arc(&self) -> &Arc<GridChart> {
        &self.chart
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// A new field on the same chart with the given values.
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.values.len());
        Self {
            chart: Arc::clone(&self.chart),
            values,
            time: self.time,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn same_chart(&self, other: &ScalarField) -> Result<()> {
        if Arc::ptr_eq(&self.chart, &other.chart) || self.chart.shape() == other.chart.shape() {
            Ok(())
        } else {
            Err(Error::Shape {
                expected: self.chart.shape(),
                found: other.chart.shape(),
            })
        }
    }
}
