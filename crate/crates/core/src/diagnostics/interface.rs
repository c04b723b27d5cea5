//! The `{u = 0}` level set and the closed-form shrinking of geodesic
//! circles under curve shortening, `dρ/dt = −ct_κ(ρ)`.

use serde::Serialize;

use crate::geometry::{ChartPoint, ScalarField, SpaceForm};
use crate::initial_data::InterfaceSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterfaceGeometry {
    /// Mean geodesic distance from the interface center to the zero
    /// crossings along grid lines.
    pub radius: f64,
    /// Length of the marching-squares zero contour.
    pub length: f64,
    pub crossings: Vec<ChartPoint>,
}

fn lerp_zero(a: f64, b: f64) -> f64 {
    a / (a - b)
}

/// Extracts the zero level set; `None` when `u` does not change sign.
pub fn interface_geometry(u: &ScalarField, iface: &InterfaceSpec) -> Option<InterfaceGeometry> {
    let chart = u.chart();
    let form = chart.form();
    let (n1, n2) = chart.shape();
    let (h1, h2) = chart.spacing();
    let v = u.values();
    let periodic1 = form.kappa() == 0;
    let x1_at = |i: usize| {
        if i < n1 {
            chart.x1()[i]
        } else {
            chart.x1()[i - n1] + n1 as f64 * h1
        }
    };
    let val = |i: usize, j: usize| v[chart.index(i % n1, j % n2)];
    let pos = |x: f64| x >= 0.0;

    let rows = if periodic1 { n1 } else { n1 - 1 };
    let mut crossings = Vec::new();
    for i in 0..n1 {
        for j in 0..n2 {
            let a = val(i, j);
            if i < rows {
                let b = val(i + 1, j);
                if pos(a) != pos(b) {
                    let s = lerp_zero(a, b);
                    crossings.push(ChartPoint::new(x1_at(i) + s * h1, j as f64 * h2));
                }
            }
            let b = val(i, j + 1);
            if pos(a) != pos(b) {
                let s = lerp_zero(a, b);
                crossings.push(ChartPoint::new(x1_at(i), (j as f64 + s) * h2));
            }
        }
    }
    if crossings.is_empty() {
        return None;
    }
    let radius = crossings
        .iter()
        .map(|&p| form.distance_unchecked(iface.center, p))
        .sum::<f64>()
        / crossings.len() as f64;

    let mut length = 0.0;
    for i in 0..rows {
        for j in 0..n2 {
            // corners counter-clockwise: (i,j), (i+1,j), (i+1,j+1), (i,j+1)
            let c = [val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1)];
            let xs = [x1_at(i), x1_at(i + 1)];
            let ys = [j as f64 * h2, (j + 1) as f64 * h2];
            let corner = [(xs[0], ys[0]), (xs[1], ys[0]), (xs[1], ys[1]), (xs[0], ys[1])];
            let mut pts = Vec::with_capacity(4);
            for e in 0..4 {
                let (a, b) = (c[e], c[(e + 1) % 4]);
                if pos(a) != pos(b) {
                    let s = lerp_zero(a, b);
                    let (p, q) = (corner[e], corner[(e + 1) % 4]);
                    pts.push(ChartPoint::new(p.0 + s * (q.0 - p.0), p.1 + s * (q.1 - p.1)));
                }
            }
            let d = |a: ChartPoint, b: ChartPoint| form.distance_unchecked(a, b);
            match pts.len() {
                2 => length += d(pts[0], pts[1]),
                4 => {
                    // saddle: pair by the sign of the cell average
                    let centre = c.iter().sum::<f64>() / 4.0;
                    if pos(centre) == pos(c[0]) {
                        length += d(pts[0], pts[3]) + d(pts[1], pts[2]);
                    } else {
                        length += d(pts[0], pts[1]) + d(pts[2], pts[3]);
                    }
                }
                _ => {}
            }
        }
    }
    Some(InterfaceGeometry {
        radius,
        length,
        crossings,
    })
}

/// Time at which a geodesic circle of radius `rho0` shrinks to a point.
pub fn extinction_time(form: &SpaceForm, rho0: f64) -> f64 {
    match form.kappa() {
        0 => 0.5 * rho0 * rho0,
        1 => -rho0.cos().ln(),
        _ => rho0.cosh().ln(),
    }
}

/// Radius at time `t`; `None` at or after extinction.
pub fn mcf_oracle(form: &SpaceForm, rho0: f64, t: f64) -> Option<f64> {
    if t >= extinction_time(form, rho0) {
        return None;
    }
    Some(match form.kappa() {
        0 => (rho0 * rho0 - 2.0 * t).sqrt(),
        1 => (rho0.cos() * t.exp()).acos(),
        _ => (rho0.cosh() * (-t).exp()).acosh(),
    })
}

/// Classical RK4 integration of `dρ/dt = −ct_κ(ρ)`, for cross-checking.
pub fn mcf_radius_ode(form: &SpaceForm, rho0: f64, t: f64, steps: usize) -> f64 {
    let h = t / steps as f64;
    let f = |r: f64| -form.ct(r);
    let mut r = rho0;
    for _ in 0..steps {
        let k1 = f(r);
        let k2 = f(r + 0.5 * h * k1);
        let k3 = f(r + 0.5 * h * k2);
        let k4 = f(r + h * k3);
        r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    r
}
