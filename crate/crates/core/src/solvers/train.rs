use serde::Serialize;

use super::{box_step, discriminator_kind, generator_kind, initial_params, TrainConfig};
use crate::criterion::AdversarialProblem;
use crate::error::{Error, Result};
use crate::families::{DiscriminatorFamily, GeneratorFamily, Mlp, MlpScratch, LOGIT_CLAMP};
use crate::numerics::{ln_sigmoid, sigmoid, SeededRng};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub round: usize,
    /// `L̂(θ, α)` at the end of the round, over the round's batch.
    pub criterion: f64,
    pub theta: Vec<f64>,
    pub alpha: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub theta_hat: Vec<f64>,
    pub alpha_hat: Vec<f64>,
    pub theta_init: Vec<f64>,
    pub alpha_init: Vec<f64>,
    pub trace: Vec<TraceRecord>,
    pub config: TrainConfig,
    pub seed: u64,
    /// θ moved by less than 1e-3 (relative) over the last 10 rounds.
    pub converged: bool,
}

/// Discriminator evaluation with family-specific fast paths.
enum DiscKernel<'a> {
    /// `t = c − k x²` and `∂t/∂α = (1/α₀ − x²/α₀³, −1/α₁ + x²/α₁³)`.
    Ratio { c: f64, k: f64, a0: f64, a1: f64 },
    Net { net: &'a Mlp, scratch: MlpScratch },
}

impl<'a> DiscKernel<'a> {
    fn new(family: &'a DiscriminatorFamily, alpha: &[f64]) -> Self {
        match family {
            DiscriminatorFamily::GaussianRatio => {
                let (a0, a1) = (alpha[0], alpha[1]);
                DiscKernel::Ratio {
                    c: (a0 / a1).ln(),
                    k: 0.5 * (1.0 / (a1 * a1) - 1.0 / (a0 * a0)),
                    a0,
                    a1,
                }
            }
            DiscriminatorFamily::Mlp(net) => DiscKernel::Net {
                net,
                scratch: MlpScratch::default(),
            },
        }
    }

    fn refresh(&mut self, alpha: &[f64]) {
        if let DiscKernel::Ratio { c, k, a0, a1 } = self {
            *a0 = alpha[0];
            *a1 = alpha[1];
            *c = (*a0 / *a1).ln();
            *k = 0.5 * (1.0 / (*a1 * *a1) - 1.0 / (*a0 * *a0));
        }
    }

    fn logit(&mut self, alpha: &[f64], x: f64) -> f64 {
        match self {
            DiscKernel::Ratio { c, k, .. } => *c - *k * x * x,
            DiscKernel::Net { net, scratch } => net.forward_logit(alpha, x, scratch),
        }
    }

    /// Adds `up·∂t/∂α` at the point of the last `logit` call.
    fn add_grad(&mut self, alpha: &[f64], x: f64, up: f64, grad: &mut [f64]) {
        match self {
            DiscKernel::Ratio { a0, a1, .. } => {
                let x2 = x * x;
                grad[0] += up * (1.0 / *a0 - x2 / (*a0 * *a0 * *a0));
                grad[1] += up * (-1.0 / *a1 + x2 / (*a1 * *a1 * *a1));
            }
            DiscKernel::Net { net, scratch } => {
                net.backward_logit(alpha, up, scratch, grad);
            }
        }
    }

    /// `up·∂t/∂x` at the point of the last `logit` call.
    fn input_grad(&mut self, alpha: &[f64], x: f64, up: f64) -> f64 {
        match self {
            DiscKernel::Ratio { k, .. } => -2.0 * *k * x * up,
            DiscKernel::Net { net, scratch } => net.input_gradient(alpha, up, scratch),
        }
    }
}

enum GenKernel<'a> {
    Scale,
    Net { net: &'a Mlp, scratch: MlpScratch },
}

impl<'a> GenKernel<'a> {
    fn new(family: &'a GeneratorFamily) -> Self {
        match family {
            GeneratorFamily::Mlp(net) => GenKernel::Net {
                net,
                scratch: MlpScratch::default(),
            },
            _ => GenKernel::Scale,
        }
    }

    fn apply(&mut self, theta: &[f64], w: f64) -> f64 {
        match self {
            GenKernel::Scale => theta[0] * w,
            GenKernel::Net { net, scratch } => net.forward_logit(theta, w, scratch),
        }
    }

    /// Adds `up·∂G/∂θ` at the latent of the last `apply` call.
    fn add_grad(&mut self, theta: &[f64], w: f64, up: f64, grad: &mut [f64]) {
        match self {
            GenKernel::Scale => grad[0] += up * w,
            GenKernel::Net { net, scratch } => {
                net.backward_logit(theta, up, scratch, grad);
            }
        }
    }
}

fn clamp_logit(t: f64) -> (f64, bool) {
    if t.abs() >= LOGIT_CLAMP {
        (t.clamp(-LOGIT_CLAMP, LOGIT_CLAMP), true)
    } else {
        (t, false)
    }
}

struct Batch {
    xs: Vec<f64>,
    ws: Vec<f64>,
}

/// Gradient of `L̂/n` in α (plain coordinates), with `n = xs.len()`.
fn discriminator_gradient(
    dk: &mut DiscKernel<'_>,
    alpha: &[f64],
    xs: &[f64],
    ys: &[f64],
    grad: &mut [f64],
) {
    grad.iter_mut().for_each(|g| *g = 0.0);
    let scale = 1.0 / xs.len() as f64;
    for &x in xs {
        let (t, clamped) = clamp_logit(dk.logit(alpha, x));
        if !clamped {
            dk.add_grad(alpha, x, scale * sigmoid(-t), grad);
        }
    }
    for &y in ys {
        let (t, clamped) = clamp_logit(dk.logit(alpha, y));
        if !clamped {
            dk.add_grad(alpha, y, -scale * sigmoid(t), grad);
        }
    }
}

/// Gradient in θ of the generator loss, `−Σ ln D(G(w))/n` with the log
/// trick or `Σ ln(1 − D(G(w)))/n` without.
fn generator_gradient(
    gk: &mut GenKernel<'_>,
    dk: &mut DiscKernel<'_>,
    theta: &[f64],
    alpha: &[f64],
    ws: &[f64],
    n: usize,
    log_trick: bool,
    grad: &mut [f64],
) {
    grad.iter_mut().for_each(|g| *g = 0.0);
    let scale = 1.0 / n as f64;
    for &w in ws {
        let y = gk.apply(theta, w);
        let (t, clamped) = clamp_logit(dk.logit(alpha, y));
        if clamped {
            continue;
        }
        let coef = if log_trick { -scale * sigmoid(-t) } else { -scale * sigmoid(t) };
        let dy = dk.input_grad(alpha, y, coef);
        gk.add_grad(theta, w, dy, grad);
    }
}

fn criterion_sum(dk: &mut DiscKernel<'_>, alpha: &[f64], xs: &[f64], ys: &[f64]) -> f64 {
    let real: f64 = xs.iter().map(|&x| ln_sigmoid(clamp_logit(dk.logit(alpha, x)).0)).sum();
    let fake: f64 = ys.iter().map(|&y| ln_sigmoid(-clamp_logit(dk.logit(alpha, y)).0)).sum();
    real + fake
}

/// Alternated gradient ascent on α and descent on θ over a fixed sample.
///
/// Each round takes `discriminator_steps_per_round` ascent steps on `α ↦ L̂(θ,α)/n`
/// followed by `generator_steps_per_round` descent steps on the generator loss, and
/// projects onto the parameter boxes after every step.
pub fn train_gan(p: &AdversarialProblem, xs: &[f64], zs: &[f64], cfg: &TrainConfig) -> Result<FitResult> {
    cfg.validate()?;
    if xs.is_empty() || zs.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut rng = SeededRng::new(cfg.seed);
    let mut theta = initial_params(
        &cfg.init_theta,
        &p.theta_box,
        generator_kind(&p.generator),
        &mut rng,
        "init_theta",
    )?;
    let mut alpha = initial_params(
        &cfg.init_alpha,
        &p.alpha_box,
        discriminator_kind(&p.discriminator),
        &mut rng,
        "init_alpha",
    )?;
    p.check_theta(&theta)?;
    p.check_alpha(&alpha)?;
    let theta_init = theta.clone();
    let alpha_init = alpha.clone();

    let ws_all: Vec<f64> = zs.iter().map(|&z| p.generator.latent(z)).collect();
    let mut dk = DiscKernel::new(&p.discriminator, &alpha);
    let mut gk = GenKernel::new(&p.generator);
    let mut ga = vec![0.0; alpha.len()];
    let mut gt = vec![0.0; theta.len()];
    let mut ys = Vec::with_capacity(zs.len());
    let mut trace = Vec::with_capacity(cfg.rounds);
    let mut batch = Batch {
        xs: Vec::new(),
        ws: Vec::new(),
    };

    for round in 0..cfg.rounds {
        let (bx, bw): (&[f64], &[f64]) = match cfg.batch_size {
            None => (xs, &ws_all),
            Some(m) => {
                batch.xs.clear();
                batch.ws.clear();
                for _ in 0..m {
                    batch.xs.push(xs[rng.below(xs.len())]);
                    batch.ws.push(ws_all[rng.below(ws_all.len())]);
                }
                (&batch.xs, &batch.ws)
            }
        };

        ys.clear();
        ys.extend(bw.iter().map(|&w| gk.apply(&theta, w)));
        for _ in 0..cfg.discriminator_steps_per_round {
            discriminator_gradient(&mut dk, &alpha, bx, &ys, &mut ga);
            box_step(&mut alpha, &ga, cfg.lr_discriminator, &p.alpha_box);
            dk.refresh(&alpha);
        }
        for _ in 0..cfg.generator_steps_per_round {
            generator_gradient(&mut gk, &mut dk, &theta, &alpha, bw, bx.len(), cfg.use_log_trick, &mut gt);
            box_step(&mut theta, &gt, -cfg.lr_generator, &p.theta_box);
        }
        ys.clear();
        ys.extend(bw.iter().map(|&w| gk.apply(&theta, w)));
        let value = criterion_sum(&mut dk, &alpha, bx, &ys);

        if theta.iter().chain(&alpha).any(|v| v.is_nan()) {
            return Err(Error::DivergenceDetected {
                round,
                reason: "parameter became NaN".into(),
            });
        }
        if !(value.abs() <= 1e12) {
            return Err(Error::DivergenceDetected {
                round,
                reason: format!("criterion magnitude {value:e}"),
            });
        }
        trace.push(TraceRecord {
            round,
            criterion: value,
            theta: theta.clone(),
            alpha: alpha.clone(),
        });
    }

    let converged = trace.len() >= 11 && {
        let last = &trace[trace.len() - 1].theta;
        let prev = &trace[trace.len() - 11].theta;
        last.iter()
            .zip(prev)
            .all(|(a, b)| (a - b).abs() <= 1e-3 * a.abs().max(1.0))
    };
    Ok(FitResult {
        theta_hat: theta,
        alpha_hat: alpha,
        theta_init,
        alpha_init,
        trace,
        config: cfg.clone(),
        seed: cfg.seed,
        converged,
    })
}
