//! Asymptotic variance of `θ̂` around `θ̄`: the envelope Hessian `HV(θ̄)`,
//! the implicit derivative `J(α)θ̄`, the Monte Carlo covariance of the
//! influence vector, and normality diagnostics for replicated estimates.

use rayon::prelude::*;
use serde::Serialize;

use crate::criterion::{AdversarialProblem, LatentCriterion};
use crate::error::{Error, Result};
use crate::numerics::{derive_seed, hessian_fd, jacobian_fd, ks_test, normal_cdf, KsResult, Matrix, SeededRng};
use crate::numerics::sigmoid;
use crate::solvers::{inner_max_alpha_with, InnerMaxOptions, StartSet};

/// Stationarity tolerance on `‖∇₂L(θ̄, ᾱ)‖∞` at input.
pub const STATIONARITY_TOL: f64 = 1e-6;
/// Eigenvalues of `H₂L` below this fraction of the largest are treated as
/// zero and dropped by the pseudo-inverse.
pub const RANK_CUTOFF: f64 = 1e-6;
const SHARD_SIZE: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub theta_bar: Vec<f64>,
    pub alpha_bar: Vec<f64>,
    pub h1l: Matrix,
    pub h2l: Matrix,
    /// `J(∇₁L(θ̄,·))ᾱ`, p×q.
    pub cross12: Matrix,
    /// `J(∇₂L(·,ᾱ))θ̄`, q×p.
    pub cross21: Matrix,
    /// `(H₂L)⁻¹`, or its pseudo-inverse when `H₂L` is rank deficient.
    pub h2l_inverse: Matrix,
    pub j_alpha: Matrix,
    pub hv: Matrix,
    pub h2l_eigenvalues: Vec<f64>,
    pub h2l_rank: usize,
    pub hv_eigenvalues: Vec<f64>,
    pub grad_alpha_norm: f64,
    pub v: Option<Matrix>,
    pub mc_samples_used: usize,
}

/// `HV(θ̄) = H₁L + J(∇₁L(θ̄,·))ᾱ · J(α)θ̄` with `J(α)θ̄ = −H₂L⁻¹ J(∇₂L(·,ᾱ))θ̄`.
///
/// Second derivatives come from central differences of the analytic
/// population gradients, and `H₂L` from its closed form when the family
/// has one.
pub fn build_asymptotics(p: &AdversarialProblem, theta_bar: &[f64], alpha_bar: &[f64]) -> Result<AsymptoticReport> {
    let lc = LatentCriterion::new(p);
    let g2 = lc.grad_alpha(theta_bar, alpha_bar)?;
    let grad_alpha_norm = g2.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if grad_alpha_norm > STATIONARITY_TOL {
        return Err(Error::StationarityViolated {
            grad_norm: grad_alpha_norm,
        });
    }

    let h1l = jacobian_fd(|t| lc.grad_theta(t, alpha_bar), theta_bar, None)?.symmetrized();
    let h2l = match lc.hess_alpha(theta_bar, alpha_bar)? {
        Some(h) => h,
        None => jacobian_fd(|a| lc.grad_alpha(theta_bar, a), alpha_bar, None)?,
    }
    .symmetrized();
    let cross12 = jacobian_fd(|a| lc.grad_theta(theta_bar, a), alpha_bar, None)?;
    let cross21 = jacobian_fd(|t| lc.grad_alpha(t, alpha_bar), theta_bar, None)?;

    let h2l_eigenvalues = h2l.symmetric_eigenvalues()?;
    let (h2l_inverse, h2l_rank) = h2l.symmetric_pseudo_inverse(RANK_CUTOFF)?;
    if h2l_rank == 0 {
        return Err(Error::Singular { pivot: 0.0 });
    }
    let j_alpha = h2l_inverse.matmul(&cross21)?.scale(-1.0);
    let hv = h1l.add(&cross12.matmul(&j_alpha)?)?.symmetrized();
    let hv_eigenvalues = hv.symmetric_eigenvalues()?;
    Ok(AsymptoticReport {
        theta_bar: theta_bar.to_vec(),
        alpha_bar: alpha_bar.to_vec(),
        h1l,
        h2l,
        cross12,
        cross21,
        h2l_inverse,
        j_alpha,
        hv,
        h2l_eigenvalues,
        h2l_rank,
        hv_eigenvalues,
        grad_alpha_norm,
        v: None,
        mc_samples_used: 0,
    })
}

/// Hessian of `V(θ) = max_α L(θ, α)` at `θ̄` by central differences of the
/// re-solved inner problem, with step `rel_step·max(1, ‖θ̄‖∞)`.
pub fn envelope_hessian_fd(p: &AdversarialProblem, theta_bar: &[f64], alpha_bar: &[f64], rel_step: f64) -> Result<Matrix> {
    let scale = theta_bar.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let warm = InnerMaxOptions {
        starts: StartSet::WarmOnly,
        ..InnerMaxOptions::default()
    };
    let v = |t: &[f64]| -> Result<f64> {
        let r = inner_max_alpha_with(p, t, Some(alpha_bar), &warm)
            .or_else(|_| inner_max_alpha_with(p, t, Some(alpha_bar), &InnerMaxOptions::default()))?;
        Ok(r.excess)
    };
    hessian_fd(v, theta_bar, Some(rel_step * scale))
}

/// Running mean and scatter matrix, mergeable across shards.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub mean: Vec<f64>,
    /// `Σ (x − x̄)(x − x̄)ᵀ`; only the diagonal when `full` is off.
    pub scatter: Matrix,
    full: bool,
}

impl Moments {
    pub fn new(dim: usize, full: bool) -> Self {
        Moments {
            count: 0,
            mean: vec![0.0; dim],
            scatter: Matrix::zeros(dim, dim),
            full,
        }
    }

    pub fn push(&mut self, x: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        let d = self.mean.len();
        let delta: Vec<f64> = x.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        for (m, dl) in self.mean.iter_mut().zip(&delta) {
            *m += dl / n;
        }
        for i in 0..d {
            let after = x[i] - self.mean[i];
            if self.full {
                for j in 0..d {
                    self.scatter[(i, j)] += after * delta[j];
                }
            } else {
                self.scatter[(i, i)] += after * delta[i];
            }
        }
    }

    /// Pairwise (Chan et al.) combination.
    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let d = self.mean.len();
        let delta: Vec<f64> = other.mean.iter().zip(&self.mean).map(|(b, a)| b - a).collect();
        for i in 0..d {
            for j in 0..d {
                if self.full || i == j {
                    self.scatter[(i, j)] += other.scatter[(i, j)] + delta[i] * delta[j] * na * nb / n;
                }
            }
        }
        for (m, dl) in self.mean.iter_mut().zip(&delta) {
            *m += dl * nb / n;
        }
        self.count += other.count;
    }

    pub fn covariance(&self) -> Matrix {
        self.scatter.scale(1.0 / (self.count.saturating_sub(1)).max(1) as f64)
    }

    /// Standard error of each mean component.
    pub fn standard_errors(&self) -> Vec<f64> {
        let c = self.covariance();
        (0..self.mean.len())
            .map(|i| (c[(i, i)].max(0.0) / self.count.max(1) as f64).sqrt())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltVariance {
    pub v: Matrix,
    pub mc_samples: usize,
    pub mean_grad_theta: Vec<f64>,
    pub se_grad_theta: Vec<f64>,
    pub mean_grad_alpha: Vec<f64>,
    pub se_grad_alpha: Vec<f64>,
    /// Standard error of each entry of `v` (row-major), from the fourth
    /// moments of the influence vector.
    pub v_standard_errors: Vec<f64>,
}

/// `(∇₁ℓ, ∇₂ℓ)` for `ℓ(θ, α) = ln D_α(x) + ln(1 − D_α(G_θ(z)))`.
fn per_sample_gradients(p: &AdversarialProblem, theta: &[f64], alpha: &[f64], x: f64, z: f64) -> (Vec<f64>, Vec<f64>) {
    let d = &p.discriminator;
    let y = p.generator.apply(theta, z);
    let tx = d.logit(alpha, x);
    let ty = d.logit(alpha, y);
    let sy = sigmoid(ty);
    let slope = -sy * d.dlogit_dx(alpha, y);
    let g1: Vec<f64> = p.generator.grad_theta(theta, z).iter().map(|g| slope * g).collect();
    let gx = d.grad_logit(alpha, x);
    let gy = d.grad_logit(alpha, y);
    let sx = sigmoid(-tx);
    let g2: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| sx * a - sy * b).collect();
    (g1, g2)
}

struct Accumulators {
    psi: Moments,
    grads: Moments,
    /// Moments of the products `ψᵢψⱼ`, for the standard errors of `V`.
    products: Moments,
}

fn accumulate(
    p: &AdversarialProblem,
    report: &AsymptoticReport,
    left: &Matrix,
    right: &Matrix,
    rng: &mut SeededRng,
    count: usize,
) -> Accumulators {
    let pd = report.theta_bar.len();
    let qd = report.alpha_bar.len();
    let mut acc = Accumulators {
        psi: Moments::new(pd, true),
        grads: Moments::new(pd + qd, false),
        products: Moments::new(pd * pd, false),
    };
    let mut joint = vec![0.0; pd + qd];
    let mut prod = vec![0.0; pd * pd];
    for _ in 0..count {
        let x = p.target.sample_one(rng);
        let z = rng.uniform();
        let (g1, g2) = per_sample_gradients(p, &report.theta_bar, &report.alpha_bar, x, z);
        // ψ = HV⁻¹(−∇₁ℓ + cross12·H₂L⁻¹·∇₂ℓ)
        let inner: Vec<f64> = (0..pd)
            .map(|i| -g1[i] + (0..qd).map(|k| right[(i, k)] * g2[k]).sum::<f64>())
            .collect();
        let psi: Vec<f64> = (0..pd)
            .map(|i| (0..pd).map(|k| left[(i, k)] * inner[k]).sum())
            .collect();
        joint[..pd].copy_from_slice(&g1);
        joint[pd..].copy_from_slice(&g2);
        for i in 0..pd {
            for j in 0..pd {
                prod[i * pd + j] = psi[i] * psi[j];
            }
        }
        acc.psi.push(&psi);
        acc.grads.push(&joint);
        acc.products.push(&prod);
    }
    acc
}

fn merge_all(parts: Vec<Accumulators>) -> Option<Accumulators> {
    let mut it = parts.into_iter();
    let mut acc = it.next()?;
    for a in it {
        acc.psi.merge(&a.psi);
        acc.grads.merge(&a.grads);
        acc.products.merge(&a.products);
    }
    Some(acc)
}

/// Monte Carlo covariance of the influence vector
/// `−HV⁻¹∇₁ℓ + HV⁻¹ J(∇₁L(θ̄,·))ᾱ H₂L⁻¹ ∇₂ℓ` at `(θ̄, ᾱ)`.
///
/// Samples are drawn in fixed-size shards, each from its own substream of
/// a seed taken from `rng`, so the result does not depend on the thread
/// count. Fails with `MeanNotZero` when a component of `∇₁ℓ` or `∇₂ℓ` has a
/// sample mean more than four standard errors from zero.
pub fn clt_variance(p: &AdversarialProblem, report: &AsymptoticReport, mc_n: usize, rng: &mut SeededRng) -> Result<CltVariance> {
    if mc_n < 2 {
        return Err(Error::InvalidParams {
            field: "mc_n".into(),
            reason: "need at least two Monte Carlo samples".into(),
        });
    }
    let left = report.hv.invert()?;
    let right = report.cross12.matmul(&report.h2l_inverse)?;
    let base = rng.next_u64();
    let shards = mc_n.div_ceil(SHARD_SIZE);
    let parts: Vec<Accumulators> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let count = SHARD_SIZE.min(mc_n - s * SHARD_SIZE);
            let mut r = SeededRng::new(derive_seed(base, s as u64));
            accumulate(p, report, &left, &right, &mut r, count)
        })
        .collect();
    let acc = merge_all(parts).expect("at least one shard");

    let pd = report.theta_bar.len();
    let se = acc.grads.standard_errors();
    for (k, (m, s)) in acc.grads.mean.iter().zip(&se).enumerate() {
        let limit = 4.0 * s + 1e-12;
        if m.abs() > limit {
            return Err(Error::MeanNotZero {
                which: if k < pd { "grad_theta l" } else { "grad_alpha l" },
                mean: *m,
                se: *s,
            });
        }
    }
    Ok(CltVariance {
        v: acc.psi.covariance().symmetrized(),
        mc_samples: mc_n,
        mean_grad_theta: acc.grads.mean[..pd].to_vec(),
        se_grad_theta: se[..pd].to_vec(),
        mean_grad_alpha: acc.grads.mean[pd..].to_vec(),
        se_grad_alpha: se[pd..].to_vec(),
        v_standard_errors: acc.products.standard_errors(),
    })
}

impl AsymptoticReport {
    pub fn with_variance(mut self, clt: &CltVariance) -> Self {
        self.v = Some(clt.v.clone());
        self.mc_samples_used = clt.mc_samples;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalityReport {
    pub reps: usize,
    /// `√n(θ̂ᵢ − θ̄)/√V`, in input order.
    pub standardized: Vec<f64>,
    /// All standardized values coincide; the shape statistics are absent.
    pub degenerate: bool,
    pub ks: Option<KsResult>,
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
    /// 30 equal bins over `[−4, 4]`; values outside are not counted.
    pub histogram: Vec<HistogramBin>,
}

pub const HISTOGRAM_BINS: usize = 30;
pub const HISTOGRAM_RANGE: f64 = 4.0;

/// Standardizes scalar estimates and tests them against `N(0, 1)`.
pub fn normality_check(theta_hats: &[f64], theta_bar: f64, n: usize, v: f64) -> Result<NormalityReport> {
    if theta_hats.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidParams {
            field: "v".into(),
            reason: "asymptotic variance must be positive".into(),
        });
    }
    let scale = (n as f64).sqrt() / v.sqrt();
    let s: Vec<f64> = theta_hats.iter().map(|t| scale * (t - theta_bar)).collect();
    let width = 2.0 * HISTOGRAM_RANGE / HISTOGRAM_BINS as f64;
    let mut histogram: Vec<HistogramBin> = (0..HISTOGRAM_BINS)
        .map(|k| HistogramBin {
            lo: -HISTOGRAM_RANGE + k as f64 * width,
            hi: -HISTOGRAM_RANGE + (k + 1) as f64 * width,
            count: 0,
        })
        .collect();
    for &x in &s {
        if (-HISTOGRAM_RANGE..=HISTOGRAM_RANGE).contains(&x) {
            let k = (((x + HISTOGRAM_RANGE) / width) as usize).min(HISTOGRAM_BINS - 1);
            histogram[k].count += 1;
        }
    }

    let m = s.len() as f64;
    let mean = s.iter().sum::<f64>() / m;
    let central = |k: i32| s.iter().map(|x| (x - mean).powi(k)).sum::<f64>() / m;
    let m2 = central(2);
    let degenerate = s.iter().all(|x| *x == s[0]) || m2 == 0.0;
    let (ks, skewness, excess_kurtosis) = if degenerate {
        (None, None, None)
    } else {
        let mut sorted = s.clone();
        sorted.sort_by(f64::total_cmp);
        (
            Some(ks_test(&sorted, normal_cdf)?),
            Some(central(3) / m2.powf(1.5)),
            Some(central(4) / (m2 * m2) - 3.0),
        )
    };
    Ok(NormalityReport {
        reps: s.len(),
        standardized: s,
        degenerate,
        ks,
        skewness,
        excess_kurtosis,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::model;

    #[test]
    fn moments_merge_matches_single_stream() {
        let mut rng = SeededRng::new(3);
        let xs: Vec<[f64; 2]> = (0..1000).map(|_| [rng.standard_normal(), rng.uniform()]).collect();
        let mut all = Moments::new(2, true);
        xs.iter().for_each(|x| all.push(x));
        let mut parts: Vec<Moments> = xs
            .chunks(137)
            .map(|c| {
                let mut m = Moments::new(2, true);
                c.iter().for_each(|x| m.push(x));
                m
            })
            .collect();
        let mut merged = parts.remove(0);
        parts.iter().for_each(|m| merged.merge(m));
        assert_eq!(merged.count, 1000);
        for (a, b) in merged.covariance().as_slice().iter().zip(all.covariance().as_slice()) {
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-300), "{a} {b}");
        }
        // Two-pass oracle.
        let mean0 = xs.iter().map(|x| x[0]).sum::<f64>() / 1000.0;
        let mean1 = xs.iter().map(|x| x[1]).sum::<f64>() / 1000.0;
        let c01 = xs.iter().map(|x| (x[0] - mean0) * (x[1] - mean1)).sum::<f64>() / 999.0;
        assert!((all.covariance()[(0, 1)] - c01).abs() < 1e-13);
    }

    #[test]
    fn per_sample_gradients_match_finite_differences() {
        let p = model("laplace-gaussian").unwrap();
        let (theta, alpha) = (vec![1.7], vec![1.3, 2.2]);
        let ell = |t: &[f64], a: &[f64], x: f64, z: f64| {
            let d = &p.discriminator;
            crate::numerics::ln_sigmoid(d.logit(a, x)) + crate::numerics::ln_sigmoid(-d.logit(a, p.generator.apply(t, z)))
        };
        for (x, z) in [(0.3, 0.2), (-2.5, 0.9), (4.0, 0.5)] {
            let (g1, g2) = per_sample_gradients(&p, &theta, &alpha, x, z);
            let f1 = crate::numerics::grad_fd(|t| Ok(ell(t, &alpha, x, z)), &theta, None).unwrap();
            let f2 = crate::numerics::grad_fd(|a| Ok(ell(&theta, a, x, z)), &alpha, None).unwrap();
            for (a, b) in g1.iter().chain(&g2).zip(f1.iter().chain(&f2)) {
                assert!((a - b).abs() <= 1e-6 * a.abs().max(1e-3), "{a} {b}");
            }
        }
    }

    #[test]
    fn degenerate_normality() {
        let r = normality_check(&[2.0; 10], 2.0, 100, 1.0).unwrap();
        assert!(r.degenerate && r.ks.is_none());
        assert_eq!(r.histogram.iter().map(|b| b.count).sum::<usize>(), 10);
        assert!(normality_check(&[], 0.0, 1, 1.0).is_err());
    }

    #[test]
    fn stationarity_is_checked() {
        let p = model("laplace-gaussian").unwrap();
        let r = build_asymptotics(&p, &[1.0], &[0.5, 3.0]);
        assert!(matches!(r, Err(Error::StationarityViolated { .. })));
    }
}
