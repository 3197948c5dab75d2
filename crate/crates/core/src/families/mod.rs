//! Generator and discriminator families: the closed-form scale families and
//! Gaussian-ratio discriminators of the Table 1 style models, and small MLPs.

mod mlp;

pub use mlp::{
    mlp_backward, mlp_forward, neural_pushforward_density, Mlp, MlpScratch, OutputActivation,
    DEFAULT_HIDDEN_WIDTH, D_MIN, LOGIT_CLAMP,
};

use crate::criterion::AdversarialProblem;
use crate::densities::Density;
use crate::error::{Error, Result};
use crate::numerics::{normal_quantile, sigmoid, Interval};

/// Generators `G_θ(z)` driven by `Z ~ U[0,1]`.
///
/// The scale families factor as `G_θ(z) = θ·w(z)` with a fixed latent map
/// `w`; criteria integrate over `w` directly, which keeps them smooth in θ.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorFamily {
    /// `θ·Φ⁻¹(z)`, pushforward `N(0, θ²)`.
    GaussianScale,
    /// `θ·z`, pushforward `U[0, θ]`.
    UniformScale,
    Mlp(Mlp),
}

impl GeneratorFamily {
    pub fn dim(&self) -> usize {
        match self {
            GeneratorFamily::GaussianScale | GeneratorFamily::UniformScale => 1,
            GeneratorFamily::Mlp(net) => net.param_count(),
        }
    }

    /// Latent variable `w(z)` the generator acts on.
    pub fn latent(&self, z: f64) -> f64 {
        match self {
            GeneratorFamily::GaussianScale => {
                normal_quantile(z).expect("noise draws lie in the open unit interval")
            }
            _ => z,
        }
    }

    /// Density of the latent variable `w(Z)`.
    pub fn latent_density(&self) -> Density {
        match self {
            GeneratorFamily::GaussianScale => Density::Gaussian { mean: 0.0, sd: 1.0 },
            _ => Density::Uniform { lo: 0.0, hi: 1.0 },
        }
    }

    pub fn apply_latent(&self, theta: &[f64], w: f64) -> f64 {
        match self {
            GeneratorFamily::GaussianScale | GeneratorFamily::UniformScale => theta[0] * w,
            GeneratorFamily::Mlp(net) => {
                let mut s = MlpScratch::default();
                net.forward_logit(theta, w, &mut s)
            }
        }
    }

    pub fn apply(&self, theta: &[f64], z: f64) -> f64 {
        self.apply_latent(theta, self.latent(z))
    }

    /// ∂G_θ(z)/∂θ.
    pub fn grad_theta(&self, theta: &[f64], z: f64) -> Vec<f64> {
        let w = self.latent(z);
        match self {
            GeneratorFamily::GaussianScale | GeneratorFamily::UniformScale => vec![w],
            GeneratorFamily::Mlp(net) => {
                let mut s = MlpScratch::default();
                let mut g = vec![0.0; theta.len()];
                net.forward_logit(theta, w, &mut s);
                net.backward_logit(theta, 1.0, &mut s, &mut g);
                g
            }
        }
    }

    /// Closed-form density of `G_θ(Z)`; `SampleOnly` for networks.
    pub fn pushforward(&self, theta: &[f64]) -> Result<Density> {
        match self {
            GeneratorFamily::GaussianScale => Density::gaussian(0.0, theta[0]),
            GeneratorFamily::UniformScale => Density::uniform(0.0, theta[0]),
            GeneratorFamily::Mlp(_) => Err(Error::SampleOnly),
        }
    }
}

/// Discriminators `D_α(x) = σ(t_α(x))`, outputs clamped to `[1e-12, 1-1e-12]`.
#[derive(Debug, Clone, PartialEq)]
pub enum DiscriminatorFamily {
    /// `1 / (1 + (α₁/α₀) exp(x²/2 (α₁⁻² − α₀⁻²)))`, the optimal discriminator
    /// for real `N(0, α₁²)` against fake `N(0, α₀²)`.
    GaussianRatio,
    Mlp(Mlp),
}

impl DiscriminatorFamily {
    pub fn dim(&self) -> usize {
        match self {
            DiscriminatorFamily::GaussianRatio => 2,
            DiscriminatorFamily::Mlp(net) => net.param_count(),
        }
    }

    /// Unclamped logit `t_α(x)`.
    pub fn logit(&self, alpha: &[f64], x: f64) -> f64 {
        match self {
            DiscriminatorFamily::GaussianRatio => {
                let (a0, a1) = (alpha[0], alpha[1]);
                (a0 / a1).ln() - 0.5 * x * x * (1.0 / (a1 * a1) - 1.0 / (a0 * a0))
            }
            DiscriminatorFamily::Mlp(net) => {
                let mut s = MlpScratch::default();
                net.forward_logit(alpha, x, &mut s)
            }
        }
    }

    pub fn apply(&self, alpha: &[f64], x: f64) -> f64 {
        sigmoid(self.logit(alpha, x)).clamp(D_MIN, 1.0 - D_MIN)
    }

    /// ∂t_α(x)/∂α.
    pub fn grad_logit(&self, alpha: &[f64], x: f64) -> Vec<f64> {
        match self {
            DiscriminatorFamily::GaussianRatio => {
                let (a0, a1) = (alpha[0], alpha[1]);
                let x2 = x * x;
                vec![1.0 / a0 - x2 / (a0 * a0 * a0), -1.0 / a1 + x2 / (a1 * a1 * a1)]
            }
            DiscriminatorFamily::Mlp(net) => {
                let mut s = MlpScratch::default();
                let mut g = vec![0.0; alpha.len()];
                net.forward_logit(alpha, x, &mut s);
                net.backward_logit(alpha, 1.0, &mut s, &mut g);
                g
            }
        }
    }

    /// ∂²t_α(x)/∂α², when known in closed form.
    pub fn hess_logit(&self, alpha: &[f64], x: f64) -> Option<[[f64; 2]; 2]> {
        match self {
            DiscriminatorFamily::GaussianRatio => {
                let (a0, a1) = (alpha[0], alpha[1]);
                let x2 = x * x;
                let (s0, s1) = (a0 * a0, a1 * a1);
                Some([
                    [-1.0 / s0 + 3.0 * x2 / (s0 * s0), 0.0],
                    [0.0, 1.0 / s1 - 3.0 * x2 / (s1 * s1)],
                ])
            }
            DiscriminatorFamily::Mlp(_) => None,
        }
    }

    /// ∂t_α(x)/∂x.
    pub fn dlogit_dx(&self, alpha: &[f64], x: f64) -> f64 {
        match self {
            DiscriminatorFamily::GaussianRatio => {
                let (a0, a1) = (alpha[0], alpha[1]);
                -x * (1.0 / (a1 * a1) - 1.0 / (a0 * a0))
            }
            DiscriminatorFamily::Mlp(net) => {
                let mut s = MlpScratch::default();
                let mut g = vec![0.0; alpha.len()];
                net.forward_logit(alpha, x, &mut s);
                net.backward_logit(alpha, 1.0, &mut s, &mut g)
            }
        }
    }

    /// ∂D_α(x)/∂α (zero where the output is clamped).
    pub fn grad_alpha(&self, alpha: &[f64], x: f64) -> Vec<f64> {
        let t = self.logit(alpha, x);
        if t.abs() >= LOGIT_CLAMP {
            return vec![0.0; alpha.len()];
        }
        let s = sigmoid(t);
        let slope = s * (1.0 - s);
        self.grad_logit(alpha, x).into_iter().map(|g| slope * g).collect()
    }
}

pub const TABLE1_MODELS: [&str; 3] = ["laplace-gaussian", "claw-gaussian", "exponential-uniform"];
pub const WELL_SPECIFIED: &str = "gaussian-gaussian";

fn boxes(lo: f64, hi: f64, gen_dim: usize, disc_dim: usize) -> (Vec<Interval>, Vec<Interval>) {
    let b = Interval { lo, hi };
    (vec![b; gen_dim], vec![b; disc_dim])
}

/// The three benchmark triplets: Laplace(1.5) or claw targets with a
/// Gaussian scale generator, and an Exp(1) target with a uniform scale
/// generator, each paired with the Gaussian-ratio discriminators.
pub fn table1_triplet(name: &str) -> Result<AdversarialProblem> {
    let (target, generator, lo) = match name {
        "laplace-gaussian" => (Density::laplace(1.5)?, GeneratorFamily::GaussianScale, 0.1),
        "claw-gaussian" => (Density::claw(), GeneratorFamily::GaussianScale, 0.1),
        "exponential-uniform" => (Density::exponential(1.0)?, GeneratorFamily::UniformScale, 0.001),
        other => return Err(Error::UnknownModel(other.to_string())),
    };
    let (theta_box, alpha_box) = boxes(lo, 1000.0, 1, 2);
    Ok(AdversarialProblem::new(
        name,
        target,
        generator,
        DiscriminatorFamily::GaussianRatio,
        theta_box,
        alpha_box,
    ))
}

/// Table 1 triplets plus the well-specified `N(0,1)` target with the Gaussian
/// scale generator.
pub fn model(name: &str) -> Result<AdversarialProblem> {
    if name == WELL_SPECIFIED {
        let (theta_box, alpha_box) = boxes(0.1, 1000.0, 1, 2);
        return Ok(AdversarialProblem::new(
            name,
            Density::gaussian(0.0, 1.0)?,
            GeneratorFamily::GaussianScale,
            DiscriminatorFamily::GaussianRatio,
            theta_box,
            alpha_box,
        ));
    }
    table1_triplet(name)
}

/// Centered logistic target of scale 0.33 with MLP generator and
/// discriminator; every weight is boxed to `[-100, 100]`.
pub fn neural_problem(gen_depth: usize, disc_depth: usize) -> Result<AdversarialProblem> {
    let g = Mlp::generator(gen_depth)?;
    let d = Mlp::discriminator(disc_depth)?;
    let (theta_box, alpha_box) = boxes(-100.0, 100.0, g.param_count(), d.param_count());
    Ok(AdversarialProblem::new(
        &format!("neural-g{gen_depth}-d{disc_depth}"),
        Density::logistic(0.33)?,
        GeneratorFamily::Mlp(g),
        DiscriminatorFamily::Mlp(d),
        theta_box,
        alpha_box,
    ))
}
