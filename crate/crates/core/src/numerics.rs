//! Small numerical kernels shared by the solver modules.

use crate::error::{Error, Result};

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// General banded matrix solved by Gaussian elimination with partial pivoting.
///
/// Storage keeps `kl` extra super-diagonals for pivoting fill-in.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl);
        i * self.width + (j + self.kl - i)
    }

    /// Adds `v` to entry `(i, j)`; the entry must lie inside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "entry ({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku + self.kl {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// Solves `A x = rhs`, consuming the matrix.
    pub fn solve(mut self, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
        let n = self.n;
        assert_eq!(rhs.len(), n);
        let upper = self.ku + self.kl;
        for k in 0..n {
            let last_row = (k + self.kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..=last_row {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Solver {
                    message: format!("singular banded matrix at column {k}"),
                    history: vec![],
                });
            }
            let last_col = (k + upper).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let a = self.idx(k, j);
                    let b = self.idx(p, j);
                    self.data.swap(a, b);
                }
                rhs.swap(k, p);
            }
            let pivot = self.data[self.idx(k, k)];
            for i in k + 1..=last_row {
                let ik = self.idx(i, k);
                let factor = self.data[ik] / pivot;
                if factor == 0.0 {
                    continue;
                }
                self.data[ik] = 0.0;
                for j in k + 1..=last_col {
                    let kj = self.data[self.idx(k, j)];
                    let ij = self.idx(i, j);
                    self.data[ij] -= factor * kj;
                }
                rhs[i] -= factor * rhs[k];
            }
        }
        for k in (0..n).rev() {
            let last_col = (k + upper).min(n - 1);
            let mut acc = rhs[k];
            for j in k + 1..=last_col {
                acc -= self.data[self.idx(k, j)] * rhs[j];
            }
            rhs[k] = acc / self.data[self.idx(k, k)];
        }
        Ok(rhs)
    }
}

/// Outcome of a preconditioned conjugate-gradient solve.
#[derive(Debug, Clone)]
pub struct CgReport {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for a symmetric positive definite
/// operator. `x` holds the initial guess on entry and the solution on exit.
pub fn pcg<A>(apply: A, diag: &[f64], rhs: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> Result<CgReport>
where
    A: Fn(&[f64], &mut [f64]),
{
    let n = rhs.len();
    let mut r = vec![0.0; n];
    apply(x, &mut r);
    for i in 0..n {
        r[i] = rhs[i] - r[i];
    }
    let rhs_norm = dot(rhs, rhs).sqrt().max(f64::MIN_POSITIVE);
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut history = Vec::new();
    let mut res = dot(&r, &r).sqrt() / rhs_norm;
    if res <= rel_tol {
        return Ok(CgReport {
            iterations: 0,
            relative_residual: res,
        });
    }
    for it in 1..=max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::Solver {
                message: "operator not positive definite".into(),
                history,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = dot(&r, &r).sqrt() / rhs_norm;
        history.push(res);
        if res <= rel_tol {
            return Ok(CgReport {
                iterations: it,
                relative_residual: res,
            });
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Solver {
        message: format!("pcg did not reach {rel_tol:e} in {max_iter} iterations"),
        history,
    })
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Least-squares fit of `y ≈ C·x^p` on positive data; returns `(p, C)`.
pub fn power_law_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 || x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let p = sxy / sxx;
    Some((p, (my - p * mx).exp()))
}

/// Max over min of a set of nonnegative magnitudes. All-zero sets give 1;
/// a zero minimum with a positive maximum gives infinity.
pub fn spread_ratio(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if max <= 0.0 {
        1.0
    } else if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Cubic Hermite interpolation on one cell `[x0, x1]`.
#[inline]
pub fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = (6.0 * t2 - 6.0 * t) / h;
    let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
    let dh01 = (-6.0 * t2 + 6.0 * t) / h;
    let dh11 = 3.0 * t2 - 2.0 * t;
    let slope = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
    (value, slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_polynomials_and_transcendentals() {
        let v = adaptive_simpson(&|x| x * x * x, 0.0, 2.0, 1e-12);
        assert!((v - 4.0).abs() < 1e-12);
        let v = adaptive_simpson(&|x: f64| x.sinh(), 0.0, 1.0, 1e-12);
        assert!((v - (1f64.cosh() - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn banded_solver_matches_dense_solution() {
        // Nonsymmetric pentadiagonal system with a small diagonal so that
        // pivoting is required.
        let n = 9;
        let mut a = BandedMatrix::zeros(n, 2, 2);
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i.saturating_sub(2)..(i + 3).min(n) {
                let v = if i == j {
                    0.1 + i as f64 * 0.01
                } else {
                    1.0 / (1.0 + (i as f64 - 2.0 * j as f64).abs())
                };
                a.add(i, j, v);
                dense[i][j] = v;
            }
        }
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        let rhs: Vec<f64> = (0..n).map(|i| (0..n).map(|j| dense[i][j] * x_true[j]).sum()).collect();
        let x = a.solve(rhs).unwrap();
        for i in 0..n {
            assert!((x[i] - x_true[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn pcg_solves_spd_tridiagonal() {
        let n = 50;
        let apply = |x: &[f64], out: &mut [f64]| {
            for i in 0..n {
                let l = if i > 0 { x[i - 1] } else { 0.0 };
                let r = if i + 1 < n { x[i + 1] } else { 0.0 };
                out[i] = 3.0 * x[i] - l - r;
            }
        };
        let rhs: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let mut x = vec![0.0; n];
        let rep = pcg(apply, &vec![3.0; n], &rhs, &mut x, 1e-12, 200).unwrap();
        assert!(rep.relative_residual <= 1e-12);
        let mut check = vec![0.0; n];
        apply(&x, &mut check);
        for i in 0..n {
            assert!((check[i] - rhs[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn power_law_recovers_exponent() {
        let x = [0.08, 0.04, 0.02];
        let y: Vec<f64> = x.iter().map(|e: &f64| 3.0 * e.powf(1.3)).collect();
        let (p, c) = power_law_fit(&x, &y).unwrap();
        assert!((p - 1.3).abs() < 1e-12);
        assert!((c - 3.0).abs() < 1e-10);
        assert!(power_law_fit(&x, &[1.0, 0.0, 1.0]).is_none());
    }

    #[test]
    fn spread_ratio_edge_cases() {
        assert_eq!(spread_ratio(&[0.0, 0.0]), 1.0);
        assert!(spread_ratio(&[0.0, 1.0]).is_infinite());
        assert_eq!(spread_ratio(&[2.0, 1.0, 1.5]), 2.0);
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let f = |x: f64| x * x * x - 2.0 * x + 1.0;
        let df = |x: f64| 3.0 * x * x - 2.0;
        let (v, s) = hermite(0.5, 1.5, f(0.5), f(1.5), df(0.5), df(1.5), 1.1);
        assert!((v - f(1.1)).abs() < 1e-13);
        assert!((s - df(1.1)).abs() < 1e-12);
    }
}
