use std::f64::consts::LN_2;

use crate::densities::{joint_points, Density};
use crate::error::{Error, Result};
use crate::numerics::Quadrature;

pub const JS_UPPER_BOUND: f64 = LN_2;
pub const DIVERGENCE_REL_TOL: f64 = 1e-10;
/// JS values this small are below the rounding noise of `p − q`.
pub const JS_ABS_TOL: f64 = 1e-20;

/// `∫ p ln(p/q)`; `+∞` when `p` has mass where `q` vanishes.
pub fn kl_divergence(p: &Density, q: &Density) -> Result<f64> {
    let pts = joint_points(&[p]);
    let v = Quadrature::with_rel_tol(DIVERGENCE_REL_TOL).integrate_pieces(
        |x| {
            let px = p.pdf(x);
            if px == 0.0 {
                return 0.0;
            }
            let lq = q.log_pdf(x);
            if lq == f64::NEG_INFINITY {
                return f64::INFINITY;
            }
            px * (p.log_pdf(x) - lq)
        },
        &pts,
    );
    match v {
        Ok(v) if v >= -1e-9 => Ok(v.max(0.0)),
        Ok(v) => Err(Error::InvalidInput(format!("negative KL estimate {v}"))),
        Err(Error::Divergent { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Integrand `a ln(2a/(a+b)) + b ln(2b/(a+b))` with `0 ln 0 = 0`; twice the
/// Jensen-Shannon integrand. Written through `d = (a − b)/(a + b)` as
/// `(s/2)[(1+d) ln(1+d) + (1−d) ln(1−d)]` so it keeps relative precision
/// when `a ≈ b`.
fn js_pointwise(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s == 0.0 {
        return 0.0;
    }
    let d = (a - b) / s;
    let bracket = if d.abs() < 0.1 {
        // Σ_{k≥1} d^{2k} / (k(2k−1)); ten terms reach 1e-20 relative.
        let d2 = d * d;
        let mut term = d2;
        let mut sum = 0.0;
        for k in 1..=10 {
            let k = k as f64;
            sum += term / (k * (2.0 * k - 1.0));
            term *= d2;
        }
        sum
    } else {
        let up = if d > -1.0 { (1.0 + d) * d.ln_1p() } else { 0.0 };
        let down = if d < 1.0 { (1.0 - d) * (-d).ln_1p() } else { 0.0 };
        up + down
    };
    0.5 * s * bracket
}

/// Jensen-Shannon divergence by one fused quadrature, clamped to `[0, ln 2]`.
pub fn js_divergence(p: &Density, q: &Density) -> Result<f64> {
    js_divergence_tol(p, q, DIVERGENCE_REL_TOL)
}

pub fn js_divergence_tol(p: &Density, q: &Density, rel_tol: f64) -> Result<f64> {
    let pts = joint_points(&[p, q]);
    let v = Quadrature::with_rel_tol(rel_tol)
        .with_abs_tol(JS_ABS_TOL)
        .integrate_pieces(|x| js_pointwise(p.pdf(x), q.pdf(x)), &pts)?;
    Ok((0.5 * v).clamp(0.0, JS_UPPER_BOUND))
}

/// `λ JS(p*‖p₁) + (1-λ) JS(p*‖p₂) − JS(p*‖λp₁+(1-λ)p₂) − (β/2) λ(1-λ) ∫(p₁-p₂)²`.
///
/// Nonnegative whenever `p ↦ JS(p*‖p)` is β-strongly convex along the
/// segment.
pub fn mixture_convexity_slack(
    pstar: &Density,
    p1: &Density,
    p2: &Density,
    lambda: f64,
    beta: f64,
) -> Result<f64> {
    let mix = Density::mixture(vec![lambda, 1.0 - lambda], vec![p1.clone(), p2.clone()])?;
    let j1 = js_divergence(pstar, p1)?;
    let j2 = js_divergence(pstar, p2)?;
    let jm = js_divergence(pstar, &mix)?;
    let pts = joint_points(&[pstar, p1, p2]);
    let l2 = Quadrature::with_rel_tol(DIVERGENCE_REL_TOL).integrate_pieces(
        |x| {
            let d = p1.pdf(x) - p2.pdf(x);
            d * d
        },
        &pts,
    )?;
    Ok(lambda * j1 + (1.0 - lambda) * j2 - jm - 0.5 * beta * lambda * (1.0 - lambda) * l2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SeededRng;

    #[test]
    fn pointwise_integrand_forms_agree() {
        let naive = |a: f64, b: f64| {
            let s = a + b;
            let f = |u: f64| if u > 0.0 { u * (2.0 * u / s).ln() } else { 0.0 };
            f(a) + f(b)
        };
        for (a, b) in [(0.3, 1.7), (2.0, 0.01), (1.0, 0.0), (0.0, 0.4), (5.0, 4.0), (1.1, 0.9), (1.09, 0.91)] {
            assert!((js_pointwise(a, b) - naive(a, b)).abs() <= 1e-14 * (a + b));
        }
        // Near a = b the integrand is (a − b)²/(2(a + b)) to leading order.
        let (a, b) = (1.0 + 1e-7, 1.0 - 1e-7);
        let lead = (a - b) * (a - b) / (2.0 * (a + b));
        assert!((js_pointwise(a, b) / lead - 1.0).abs() < 1e-9);
        assert_eq!(js_pointwise(0.0, 0.0), 0.0);
    }

    #[test]
    fn kl_examples() {
        let n1 = Density::gaussian(0.0, 1.0).unwrap();
        let n2 = Density::gaussian(0.0, 2.0).unwrap();
        assert!(kl_divergence(&n1, &n1).unwrap() <= 1e-9);
        let expected = 2f64.ln() + 1.0 / 8.0 - 0.5;
        assert!((kl_divergence(&n1, &n2).unwrap() - expected).abs() < 1e-6);
        let u1 = Density::uniform(0.0, 1.0).unwrap();
        let u2 = Density::uniform(1.0, 2.0).unwrap();
        assert_eq!(kl_divergence(&u1, &u2).unwrap(), f64::INFINITY);
    }

    #[test]
    fn js_examples() {
        let c = Density::claw();
        assert!(js_divergence(&c, &c).unwrap() <= 1e-9);
        let u1 = Density::uniform(0.0, 1.0).unwrap();
        let u2 = Density::uniform(1.0, 2.0).unwrap();
        assert!((js_divergence(&u1, &u2).unwrap() - LN_2).abs() < 1e-8);
    }

    #[test]
    fn js_against_monte_carlo() {
        // JS = E_p[½ ln(2p/(p+q))] + E_q[½ ln(2q/(p+q))], each by plain sampling.
        let p = Density::exponential(1.0).unwrap();
        let q = Density::uniform(0.0, 2.0).unwrap();
        let v = js_divergence(&p, &q).unwrap();
        assert!(v > 0.0 && v < LN_2);
        let mut rng = SeededRng::new(1234);
        let n = 1_000_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let x = p.sample_one(&mut rng);
            acc += 0.5 * (2.0 * p.pdf(x) / (p.pdf(x) + q.pdf(x))).ln();
            let y = q.sample_one(&mut rng);
            acc += 0.5 * (2.0 * q.pdf(y) / (p.pdf(y) + q.pdf(y))).ln();
        }
        let mc = acc / n as f64;
        assert!((mc - v).abs() < 1e-3, "{mc} vs {v}");
    }

    #[test]
    fn js_symmetric() {
        let a = Density::laplace(1.5).unwrap();
        let b = Density::gaussian(0.2, 0.9).unwrap();
        let d = js_divergence(&a, &b).unwrap() - js_divergence(&b, &a).unwrap();
        assert!(d.abs() < 1e-9);
    }

    #[test]
    fn convexity_slack_positive_for_close_pair() {
        let lo = -1.0;
        let hi = 2.0;
        let ps = Density::gaussian(0.5, 1.0).unwrap().truncated(lo, hi).unwrap();
        let p1 = Density::laplace(1.0).unwrap().truncated(lo, hi).unwrap();
        let p2 = Density::logistic(0.8).unwrap().truncated(lo, hi).unwrap();
        let s = mixture_convexity_slack(&ps, &p1, &p2, 0.5, 0.01).unwrap();
        assert!(s > 0.0);
    }
}
