//! Adversarial criteria `L̂(θ,D)` and `L(θ,D)`, the optimal discriminator,
//! and the KL / Jensen-Shannon divergences they are tied to.

mod divergence;

use std::f64::consts::LN_2;

pub use divergence::{
    js_divergence, js_divergence_tol, kl_divergence, mixture_convexity_slack, DIVERGENCE_REL_TOL,
    JS_UPPER_BOUND,
};

use serde::Serialize;

use crate::densities::{joint_points, Density};
use crate::error::{Error, Result};
use crate::families::{DiscriminatorFamily, GeneratorFamily, LOGIT_CLAMP};
use crate::numerics::{ln_sigmoid, sigmoid, Interval, Matrix, Quadrature};

pub const LN_4: f64 = 2.0 * LN_2;
pub const POPULATION_REL_TOL: f64 = 1e-9;
/// Criteria below this are reported as `-∞` (the discriminator is not
/// admissible for this θ).
pub const NEG_INF_THRESHOLD: f64 = -1e15;

#[derive(Debug, Clone, PartialEq)]
pub struct AdversarialProblem {
    pub name: String,
    pub target: Density,
    pub generator: GeneratorFamily,
    pub discriminator: DiscriminatorFamily,
    pub theta_box: Vec<Interval>,
    pub alpha_box: Vec<Interval>,
    pub noise: Density,
}

impl AdversarialProblem {
    pub fn new(
        name: &str,
        target: Density,
        generator: GeneratorFamily,
        discriminator: DiscriminatorFamily,
        theta_box: Vec<Interval>,
        alpha_box: Vec<Interval>,
    ) -> Self {
        AdversarialProblem {
            name: name.to_string(),
            target,
            generator,
            discriminator,
            theta_box,
            alpha_box,
            noise: Density::Uniform { lo: 0.0, hi: 1.0 },
        }
    }

    pub fn theta_dim(&self) -> usize {
        self.theta_box.len()
    }

    pub fn alpha_dim(&self) -> usize {
        self.alpha_box.len()
    }

    pub fn pushforward(&self, theta: &[f64]) -> Result<Density> {
        self.generator.pushforward(theta)
    }

    pub fn check_theta(&self, theta: &[f64]) -> Result<()> {
        dims(self.theta_dim(), theta.len(), "theta")
    }

    pub fn check_alpha(&self, alpha: &[f64]) -> Result<()> {
        dims(self.alpha_dim(), alpha.len(), "alpha")
    }
}

fn dims(expected: usize, got: usize, what: &str) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("{what}: expected {expected}, got {got}")))
    }
}

/// A discriminator seen through `ln D` and `ln(1 − D)`, so that values
/// close to 0 or 1 keep full precision.
pub trait Discriminator {
    fn ln_d(&self, x: f64) -> f64;
    fn ln_one_minus_d(&self, x: f64) -> f64;
    /// Extra panel boundaries for quadrature.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<F: Fn(f64) -> f64> Discriminator for F {
    fn ln_d(&self, x: f64) -> f64 {
        self(x).ln()
    }
    fn ln_one_minus_d(&self, x: f64) -> f64 {
        (-self(x)).ln_1p()
    }
}

/// `D*_θ = p*/(p* + p_θ)`, with the value 1/2 where both densities vanish.
#[derive(Debug, Clone)]
pub struct OptimalDiscriminator {
    pub pstar: Density,
    pub ptheta: Density,
}

pub fn optimal_discriminator(pstar: &Density, ptheta: &Density) -> OptimalDiscriminator {
    OptimalDiscriminator {
        pstar: pstar.clone(),
        ptheta: ptheta.clone(),
    }
}

impl OptimalDiscriminator {
    pub fn value(&self, x: f64) -> f64 {
        let a = self.pstar.pdf(x);
        let b = self.ptheta.pdf(x);
        if a + b == 0.0 {
            0.5
        } else {
            a / (a + b)
        }
    }

    fn ln_ratio(num: f64, other: f64) -> f64 {
        if num + other == 0.0 {
            -LN_2
        } else if num == 0.0 {
            f64::NEG_INFINITY
        } else {
            -(other / num).ln_1p()
        }
    }
}

impl Discriminator for OptimalDiscriminator {
    fn ln_d(&self, x: f64) -> f64 {
        Self::ln_ratio(self.pstar.pdf(x), self.ptheta.pdf(x))
    }
    fn ln_one_minus_d(&self, x: f64) -> f64 {
        Self::ln_ratio(self.ptheta.pdf(x), self.pstar.pdf(x))
    }
    fn breakpoints(&self) -> Vec<f64> {
        joint_points(&[&self.pstar, &self.ptheta])
    }
}

/// A member `D_α` of a discriminator family, evaluated through its exact
/// logit. Population criteria use this unclamped form so that they stay
/// smooth in α; the `[1e-12, 1 − 1e-12]` clamp guards sample-based sums only.
#[derive(Debug, Clone, Copy)]
pub struct ParametricDiscriminator<'a> {
    pub family: &'a DiscriminatorFamily,
    pub alpha: &'a [f64],
}

impl Discriminator for ParametricDiscriminator<'_> {
    fn ln_d(&self, x: f64) -> f64 {
        ln_sigmoid(self.family.logit(self.alpha, x))
    }
    fn ln_one_minus_d(&self, x: f64) -> f64 {
        ln_sigmoid(-self.family.logit(self.alpha, x))
    }
}

fn clamped_logit(family: &DiscriminatorFamily, alpha: &[f64], x: f64) -> f64 {
    family.logit(alpha, x).clamp(-LOGIT_CLAMP, LOGIT_CLAMP)
}

/// `Σᵢ ln D_α(xᵢ) + Σⱼ ln(1 − D_α(G_θ(zⱼ)))` with clamped discriminator values.
pub fn empirical_criterion(
    p: &AdversarialProblem,
    theta: &[f64],
    alpha: &[f64],
    xs: &[f64],
    zs: &[f64],
) -> Result<f64> {
    if xs.is_empty() || zs.is_empty() {
        return Err(Error::EmptySample);
    }
    p.check_theta(theta)?;
    p.check_alpha(alpha)?;
    let d = &p.discriminator;
    let real: f64 = xs.iter().map(|&x| ln_sigmoid(clamped_logit(d, alpha, x))).sum();
    let fake: f64 = zs
        .iter()
        .map(|&z| ln_sigmoid(-clamped_logit(d, alpha, p.generator.apply(theta, z))))
        .sum();
    Ok(real + fake)
}

fn expectation<F: Fn(f64) -> f64>(density: &Density, g: F, extra: &[f64], rel_tol: f64) -> Result<f64> {
    let s = density.support();
    let mut pts = joint_points(&[density]);
    pts.extend(extra.iter().copied().filter(|x| s.contains(*x)));
    Quadrature::with_rel_tol(rel_tol).integrate_pieces(
        |x| {
            let px = density.pdf(x);
            if px == 0.0 {
                0.0
            } else {
                px * g(x)
            }
        },
        &pts,
    )
}

fn admissible(v: Result<f64>) -> Result<f64> {
    match v {
        Ok(v) if v < NEG_INF_THRESHOLD => Ok(f64::NEG_INFINITY),
        Ok(v) => Ok(v),
        Err(Error::Divergent { .. }) => Ok(f64::NEG_INFINITY),
        Err(e) => Err(e),
    }
}

/// `∫ ln D p* + ∫ ln(1 − D) p_θ` between two given densities.
pub fn population_criterion_between<D: Discriminator + ?Sized>(
    pstar: &Density,
    ptheta: &Density,
    d: &D,
    rel_tol: f64,
) -> Result<f64> {
    let extra = d.breakpoints();
    let real = admissible(expectation(pstar, |x| d.ln_d(x), &extra, rel_tol))?;
    if real == f64::NEG_INFINITY {
        return Ok(real);
    }
    let fake = admissible(expectation(ptheta, |x| d.ln_one_minus_d(x), &extra, rel_tol))?;
    Ok(real + fake)
}

/// `L(θ, D)` by quadrature against the pushforward density `p_θ`.
pub fn population_criterion<D: Discriminator + ?Sized>(
    p: &AdversarialProblem,
    theta: &[f64],
    d: &D,
) -> Result<f64> {
    p.check_theta(theta)?;
    let ptheta = p.pushforward(theta)?;
    population_criterion_between(&p.target, &ptheta, d, POPULATION_REL_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// Compares `L(θ, D*_θ)` with `2 JS(p*‖p_θ) − ln 4`.
pub fn js_identity_check(p: &AdversarialProblem, theta: &[f64]) -> Result<IdentityCheck> {
    p.check_theta(theta)?;
    let ptheta = p.pushforward(theta)?;
    let dstar = optimal_discriminator(&p.target, &ptheta);
    let lhs = population_criterion_between(&p.target, &ptheta, &dstar, 1e-11)?;
    let rhs = 2.0 * js_divergence_tol(&p.target, &ptheta, 1e-11)? - LN_4;
    Ok(IdentityCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}

/// `ln(2σ(t))`, accurate near `t = 0`.
fn ln_two_sigmoid(t: f64) -> f64 {
    if t < -1.0 {
        LN_2 + ln_sigmoid(t)
    } else {
        -(0.5 * (-t).exp_m1()).ln_1p()
    }
}

/// Parametric criterion `L(θ, α)` evaluated in latent space, with the
/// exact (unclamped) discriminator.
///
/// The fake half is integrated over the generator's latent variable rather
/// than over `p_θ`, so the value is smooth in θ even when the support of
/// `p_θ` moves with θ. Every value is returned as the excess over `−ln 4`,
/// which keeps full relative precision near the equilibrium `D ≡ 1/2`.
#[derive(Debug, Clone, Copy)]
pub struct LatentCriterion<'a> {
    pub problem: &'a AdversarialProblem,
    pub rel_tol: f64,
}

impl<'a> LatentCriterion<'a> {
    pub fn new(problem: &'a AdversarialProblem) -> Self {
        LatentCriterion {
            problem,
            rel_tol: 1e-12,
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    fn target_points(&self) -> Vec<f64> {
        joint_points(&[&self.problem.target])
    }

    fn latent_density(&self) -> Density {
        self.problem.generator.latent_density()
    }

    fn real_term<F: Fn(f64) -> f64>(&self, g: F) -> Result<f64> {
        let pts = self.target_points();
        let t = &self.problem.target;
        Quadrature::with_rel_tol(self.rel_tol).integrate_pieces(
            |x| {
                let px = t.pdf(x);
                if px == 0.0 {
                    0.0
                } else {
                    px * g(x)
                }
            },
            &pts,
        )
    }

    fn fake_term<F: Fn(f64) -> f64>(&self, g: F) -> Result<f64> {
        let q = self.latent_density();
        let pts = joint_points(&[&q]);
        Quadrature::with_rel_tol(self.rel_tol).integrate_pieces(
            |w| {
                let qw = q.pdf(w);
                if qw == 0.0 {
                    0.0
                } else {
                    qw * g(w)
                }
            },
            &pts,
        )
    }

    /// `L(θ, α) + ln 4`.
    pub fn excess(&self, theta: &[f64], alpha: &[f64]) -> Result<f64> {
        let p = self.problem;
        p.check_theta(theta)?;
        p.check_alpha(alpha)?;
        let d = &p.discriminator;
        let real = self.real_term(|x| ln_two_sigmoid(d.logit(alpha, x)))?;
        let fake = self.fake_term(|w| {
            ln_two_sigmoid(-d.logit(alpha, p.generator.apply_latent(theta, w)))
        })?;
        Ok(real + fake)
    }

    pub fn value(&self, theta: &[f64], alpha: &[f64]) -> Result<f64> {
        Ok(self.excess(theta, alpha)? - LN_4)
    }

    /// `∇₂L(θ, α)`.
    pub fn grad_alpha(&self, theta: &[f64], alpha: &[f64]) -> Result<Vec<f64>> {
        let p = self.problem;
        p.check_theta(theta)?;
        p.check_alpha(alpha)?;
        let d = &p.discriminator;
        (0..alpha.len())
            .map(|k| {
                let real = self.real_term(|x| {
                    sigmoid(-d.logit(alpha, x)) * d.grad_logit(alpha, x)[k]
                })?;
                let fake = self.fake_term(|w| {
                    let y = p.generator.apply_latent(theta, w);
                    -sigmoid(d.logit(alpha, y)) * d.grad_logit(alpha, y)[k]
                })?;
                Ok(real + fake)
            })
            .collect()
    }

    /// `∇₂²L(θ, α)` for discriminators with a closed-form logit Hessian;
    /// `None` otherwise.
    pub fn hess_alpha(&self, theta: &[f64], alpha: &[f64]) -> Result<Option<Matrix>> {
        let p = self.problem;
        p.check_theta(theta)?;
        p.check_alpha(alpha)?;
        let d = &p.discriminator;
        if d.hess_logit(alpha, 0.0).is_none() {
            return Ok(None);
        }
        let q = alpha.len();
        let mut h = Matrix::zeros(q, q);
        // ∂² ln σ(t) = −σ(1−σ)∇t∇tᵀ + (1−σ)∇²t and ∂² ln σ(−t) = −σ(1−σ)∇t∇tᵀ − σ∇²t.
        let entry = |x: f64, i: usize, j: usize, real: bool| -> f64 {
            let s = sigmoid(d.logit(alpha, x));
            let g = d.grad_logit(alpha, x);
            let hl = d.hess_logit(alpha, x).expect("closed form checked above");
            let outer = -s * (1.0 - s) * g[i] * g[j];
            if real {
                outer + (1.0 - s) * hl[i][j]
            } else {
                outer - s * hl[i][j]
            }
        };
        for i in 0..q {
            for j in 0..=i {
                let real = self.real_term(|x| entry(x, i, j, true))?;
                let fake = self.fake_term(|w| entry(p.generator.apply_latent(theta, w), i, j, false))?;
                h[(i, j)] = real + fake;
                h[(j, i)] = real + fake;
            }
        }
        Ok(Some(h))
    }

    /// `∇₁L(θ, α)`.
    pub fn grad_theta(&self, theta: &[f64], alpha: &[f64]) -> Result<Vec<f64>> {
        let p = self.problem;
        p.check_theta(theta)?;
        p.check_alpha(alpha)?;
        let d = &p.discriminator;
        (0..theta.len())
            .map(|k| {
                self.fake_term(|w| {
                    let y = p.generator.apply_latent(theta, w);
                    let t = d.logit(alpha, y);
                    let dg = match &p.generator {
                        GeneratorFamily::GaussianScale | GeneratorFamily::UniformScale => w,
                        // Network latents are the raw noise draws.
                        GeneratorFamily::Mlp(_) => p.generator.grad_theta(theta, w)[k],
                    };
                    -sigmoid(t) * d.dlogit_dx(alpha, y) * dg
                })
            })
            .collect()
    }
}
