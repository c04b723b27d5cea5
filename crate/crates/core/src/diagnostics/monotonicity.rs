//! Fitting the constants of the integrated almost-monotonicity inequality
//!
//! `𝒢(t) ≤ e^{(C₃/2)(√(s−t₀) − √(s−t))}·[𝒢(t₀) + C₄(t − t₀) + C₅(√(s−t₀) − √(s−t))]`
//!
//! over all sample pairs `t₀ < t` of a series.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityFit {
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    /// The inequality holds with each constant alone (the others zero).
    pub feasible: bool,
    pub window: (f64, f64),
}

impl MonotonicityFit {
    pub fn constants(&self) -> [f64; 3] {
        [self.c3, self.c4, self.c5]
    }
}

pub const MIN_SAMPLES: usize = 10;

/// Each constant is the smallest value for which the inequality holds on
/// every sample pair when the other two are zero. These have closed forms:
/// `C₃ = max 2 ln(𝒢ⱼ/𝒢ᵢ)/(aᵢ − aⱼ)`, `C₄ = max (𝒢ⱼ − 𝒢ᵢ)/(tⱼ − tᵢ)`,
/// `C₅ = max (𝒢ⱼ − 𝒢ᵢ)/(aᵢ − aⱼ)` with `a = √(s − t)`, floored at zero.
pub fn fit_monotonicity(samples: &[(f64, f64)], s: f64) -> Result<MonotonicityFit> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::Input(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    for w in samples.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::Input("sample times must increase".into()));
        }
    }
    let t_last = samples[samples.len() - 1].0;
    if !(t_last < s) {
        return Err(Error::Input(format!("samples must end before s = {s}")));
    }
    if samples.iter().any(|&(_, g)| !(g >= 0.0 && g.is_finite())) {
        return Err(Error::Input("weighted energies must be finite and nonnegative".into()));
    }
    let (mut c3, mut c4, mut c5) = (0.0f64, 0.0f64, 0.0f64);
    for (i, &(ti, gi)) in samples.iter().enumerate() {
        let ai = (s - ti).sqrt();
        for &(tj, gj) in &samples[i + 1..] {
            if gj <= gi {
                continue;
            }
            let aj = (s - tj).sqrt();
            let da = ai - aj;
            c3 = c3.max(if gi > 0.0 {
                2.0 * (gj / gi).ln() / da
            } else {
                f64::INFINITY
            });
            c4 = c4.max((gj - gi) / (tj - ti));
            c5 = c5.max((gj - gi) / da);
        }
    }
    Ok(MonotonicityFit {
        c3,
        c4,
        c5,
        feasible: c3.is_finite() && c4.is_finite() && c5.is_finite(),
        window: (samples[0].0, t_last),
    })
}

/// Whether the inequality holds on every pair with the given constants,
/// up to a relative slack.
pub fn holds(samples: &[(f64, f64)], s: f64, c: [f64; 3], slack: f64) -> bool {
    samples.iter().enumerate().all(|(i, &(ti, gi))| {
        let ai = (s - ti).sqrt();
        samples[i + 1..].iter().all(|&(tj, gj)| {
            let aj = (s - tj).sqrt();
            let rhs = (0.5 * c[0] * (ai - aj)).exp() * (gi + c[1] * (tj - ti) + c[2] * (ai - aj));
            gj <= rhs * (1.0 + slack) + slack
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (0..20).map(|k| (k as f64 * 0.001, f(k as f64 * 0.001))).collect()
    }

    #[test]
    fn constant_and_decreasing_series_fit_zero() {
        let fit = fit_monotonicity(&series(|_| 2.0), 0.05).unwrap();
        assert_eq!(fit.constants(), [0.0; 3]);
        assert!(fit.feasible);
        let fit = fit_monotonicity(&series(|t| 1.0 - t), 0.05).unwrap();
        assert_eq!(fit.constants(), [0.0; 3]);
        assert_eq!(fit.window, (0.0, 0.019));
    }

    #[test]
    fn growth_is_captured() {
        let s = 0.05;
        let data = series(|t| 1.0 + 3.0 * t);
        let fit = fit_monotonicity(&data, s).unwrap();
        assert!((fit.c4 - 3.0).abs() < 1e-9);
        assert!(fit.c3 > 0.0 && fit.c5 > 0.0);
        for c in [[fit.c3, 0.0, 0.0], [0.0, fit.c4, 0.0], [0.0, 0.0, fit.c5]] {
            assert!(holds(&data, s, c, 1e-12));
        }
        // strictly smaller constants fail
        assert!(!holds(&data, s, [0.0, 0.99 * fit.c4, 0.0], 0.0));
        assert!(!holds(&data, s, [0.99 * fit.c3, 0.0, 0.0], 0.0));
    }

    #[test]
    fn input_errors() {
        assert!(fit_monotonicity(&series(|_| 1.0)[..5], 0.05).is_err());
        assert!(fit_monotonicity(&series(|_| 1.0), 0.01).is_err());
        let mut bad = series(|_| 1.0);
        bad[3].0 = bad[2].0;
        assert!(fit_monotonicity(&bad, 0.05).is_err());
    }

    proptest! {
        #[test]
        fn nonincreasing_series_fit_zero(steps in prop::collection::vec(0.0f64..1.0, 10..40)) {
            let mut g = 10.0;
            let data: Vec<(f64, f64)> = steps.iter().enumerate().map(|(k, d)| {
                g -= d * 0.1;
                (k as f64 * 1e-3, g.max(0.0))
            }).collect();
            let fit = fit_monotonicity(&data, 1.0).unwrap();
            prop_assert_eq!(fit.constants(), [0.0; 3]);
        }

        #[test]
        fn fitted_constants_are_feasible(vals in prop::collection::vec(0.1f64..2.0, 10..30)) {
            let data: Vec<(f64, f64)> = vals.iter().enumerate().map(|(k, &v)| (k as f64 * 1e-3, v)).collect();
            let fit = fit_monotonicity(&data, 0.1).unwrap();
            prop_assert!(fit.feasible);
            prop_assert!(holds(&data, 0.1, [fit.c3, 0.0, 0.0], 1e-9));
            prop_assert!(holds(&data, 0.1, [0.0, fit.c4, 0.0], 1e-9));
            prop_assert!(holds(&data, 0.1, [0.0, 0.0, fit.c5], 1e-9));
        }
    }
}
