//! Alternated-gradient training of the empirical minimax problem, and the
//! population solvers for θ*, θ̄ and ᾱ.

mod population;
mod train;

pub use population::{
    envelope_value, inner_max_alpha, inner_max_alpha_with, solve_theta_bar, solve_theta_star,
    Equilibrium, InnerMax, InnerMaxOptions, StartSet, ThetaStar,
};
pub use train::{train_gan, FitResult, TraceRecord};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{DiscriminatorFamily, GeneratorFamily};
use crate::numerics::{Interval, SeededRng};

/// Initial parameter vector, or a seeded draw inside the box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Init {
    Fixed(Vec<f64>),
    Tag(InitTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitTag {
    #[serde(rename = "random-in-box")]
    RandomInBox,
}

impl Init {
    pub fn random() -> Self {
        Init::Tag(InitTag::RandomInBox)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub discriminator_steps_per_round: usize,
    pub generator_steps_per_round: usize,
    pub rounds: usize,
    /// Step size for α; multiplicative (log-space) on positive boxes.
    pub lr_discriminator: f64,
    pub lr_generator: f64,
    pub init_theta: Init,
    pub init_alpha: Init,
    pub seed: u64,
    pub use_log_trick: bool,
    /// Fresh minibatch of this size each round; `None` reuses the full sample.
    pub batch_size: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig::scale_model()
    }
}

impl TrainConfig {
    /// Defaults for the closed-form scale models.
    pub fn scale_model() -> Self {
        TrainConfig {
            discriminator_steps_per_round: 10,
            generator_steps_per_round: 1,
            rounds: 300,
            lr_discriminator: 0.05,
            lr_generator: 0.1,
            init_theta: Init::Fixed(vec![1.0]),
            init_alpha: Init::Fixed(vec![1.0, 1.0]),
            seed: 0,
            use_log_trick: true,
            batch_size: None,
        }
    }

    /// Defaults for MLP generator and discriminator.
    pub fn neural() -> Self {
        TrainConfig {
            lr_discriminator: 0.01,
            lr_generator: 0.005,
            init_theta: Init::random(),
            init_alpha: Init::random(),
            ..TrainConfig::scale_model()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, reason: &str| {
            Err(Error::InvalidParams {
                field: field.into(),
                reason: reason.into(),
            })
        };
        if self.discriminator_steps_per_round == 0 {
            return bad("discriminator_steps_per_round", "must be at least 1");
        }
        if self.generator_steps_per_round == 0 {
            return bad("generator_steps_per_round", "must be at least 1");
        }
        if !(self.lr_discriminator > 0.0 && self.lr_discriminator.is_finite()) {
            return bad("lr_discriminator", "must be positive");
        }
        if !(self.lr_generator > 0.0 && self.lr_generator.is_finite()) {
            return bad("lr_generator", "must be positive");
        }
        if self.batch_size == Some(0) {
            return bad("batch_size", "must be positive");
        }
        Ok(())
    }
}

/// Positive boxes are searched in log-space.
pub(crate) fn is_log_coord(b: &Interval) -> bool {
    b.lo > 0.0
}

/// Gradient step of size `lr` along `grad` (ascent for positive `lr`),
/// multiplicative on positive boxes, then projection onto the box.
pub(crate) fn box_step(x: &mut [f64], grad: &[f64], lr: f64, boxes: &[Interval]) {
    for ((xi, g), b) in x.iter_mut().zip(grad).zip(boxes) {
        let next = if is_log_coord(b) {
            *xi * (lr * *xi * g).exp()
        } else {
            *xi + lr * g
        };
        *xi = if next.is_nan() { next } else { next.clamp(b.lo, b.hi) };
    }
}

pub(crate) enum FamilyKind<'a> {
    Scale,
    Net(&'a crate::families::Mlp),
}

fn random_in_box(boxes: &[Interval], net: Option<&crate::families::Mlp>, rng: &mut SeededRng) -> Vec<f64> {
    if let Some(net) = net {
        return net
            .init_params(rng)
            .into_iter()
            .zip(boxes)
            .map(|(v, b)| b.clamp(v))
            .collect();
    }
    boxes
        .iter()
        .map(|b| {
            if is_log_coord(b) {
                // Log-uniform over [1/2, 2] intersected with the box.
                let lo = b.lo.max(0.5).min(b.hi);
                let hi = b.hi.min(2.0).max(lo);
                (lo.ln() + rng.uniform() * (hi.ln() - lo.ln())).exp()
            } else {
                b.clamp(rng.uniform_in(-1.0, 1.0))
            }
        })
        .collect()
}

pub(crate) fn initial_params(
    init: &Init,
    boxes: &[Interval],
    kind: FamilyKind<'_>,
    rng: &mut SeededRng,
    what: &str,
) -> Result<Vec<f64>> {
    match init {
        Init::Fixed(v) => {
            if v.len() != boxes.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{what}: expected {} initial values, got {}",
                    boxes.len(),
                    v.len()
                )));
            }
            Ok(v.iter().zip(boxes).map(|(x, b)| b.clamp(*x)).collect())
        }
        Init::Tag(InitTag::RandomInBox) => Ok(random_in_box(
            boxes,
            match kind {
                FamilyKind::Net(n) => Some(n),
                FamilyKind::Scale => None,
            },
            rng,
        )),
    }
}

pub(crate) fn generator_kind(g: &GeneratorFamily) -> FamilyKind<'_> {
    match g {
        GeneratorFamily::Mlp(n) => FamilyKind::Net(n),
        _ => FamilyKind::Scale,
    }
}

pub(crate) fn discriminator_kind(d: &DiscriminatorFamily) -> FamilyKind<'_> {
    match d {
        DiscriminatorFamily::Mlp(n) => FamilyKind::Net(n),
        _ => FamilyKind::Scale,
    }
}
