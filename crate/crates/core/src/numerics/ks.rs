use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// P(K > λ) for the Kolmogorov distribution, each series cut at 100 terms.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Small λ: the theta-function form converges in a handful of terms.
        let c = -PI * PI / (8.0 * lambda * lambda);
        let s: f64 = (1..=100)
            .map(|k| {
                let m = (2 * k - 1) as f64;
                (c * m * m).exp()
            })
            .sum();
        (1.0 - (2.0 * PI).sqrt() / lambda * s).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let kf = k as f64;
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * kf * kf * lambda * lambda).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// One-sample Kolmogorov-Smirnov test of a sorted sample against `cdf`.
pub fn ks_test<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> Result<KsResult> {
    if sorted.is_empty() {
        return Err(Error::EmptySample);
    }
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
    let n = sorted.len() as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max);
    Ok(KsResult {
        statistic,
        p_value: kolmogorov_survival(n.sqrt() * statistic),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{normal_cdf, SeededRng};

    #[test]
    fn single_point() {
        let r = ks_test(&[0.5], |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((r.statistic - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_sample() {
        assert_eq!(ks_test(&[], |x| x), Err(Error::EmptySample));
    }

    #[test]
    fn survival_branches_agree_at_switch() {
        let a = kolmogorov_survival(1.18 - 1e-9);
        let b = kolmogorov_survival(1.18 + 1e-9);
        assert!((a - b).abs() < 1e-8);
        // Tabulated: P(K > 1.36) ≈ 0.0494.
        assert!((kolmogorov_survival(1.36) - 0.0494).abs() < 5e-4);
        assert!((kolmogorov_survival(0.5) - 0.9639).abs() < 5e-4);
    }

    #[test]
    fn null_samples_rarely_rejected() {
        let mut accepted = 0;
        for seed in 0..100 {
            let mut rng = SeededRng::new(seed);
            let mut xs = rng.uniforms(1000);
            xs.sort_by(f64::total_cmp);
            if ks_test(&xs, |x| x.clamp(0.0, 1.0)).unwrap().p_value > 0.01 {
                accepted += 1;
            }
        }
        assert!(accepted >= 95, "accepted {accepted}/100");
    }

    #[test]
    fn normal_sample_against_uniform_rejected() {
        let mut rng = SeededRng::new(2024);
        let mut xs: Vec<f64> = (0..1000).map(|_| rng.standard_normal()).collect();
        xs.sort_by(f64::total_cmp);
        let r = ks_test(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(r.p_value < 1e-6);
        let r = ks_test(&xs, normal_cdf).unwrap();
        assert!(r.p_value > 1e-3);
    }
}
