use serde::{Deserialize, Serialize};

use crate::densities::{kde, Bandwidth, Density};
use crate::error::{Error, Result};
use crate::numerics::{sigmoid, SeededRng};

/// Logit magnitude at which a sigmoid output hits the [1e-12, 1 - 1e-12] clamp.
pub const LOGIT_CLAMP: f64 = 27.631_021_115_871_07;
pub const D_MIN: f64 = 1e-12;

pub const DEFAULT_HIDDEN_WIDTH: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputActivation {
    Identity,
    Sigmoid,
}

/// Fully connected scalar-to-scalar network with tanh hidden layers.
///
/// Parameters are one flat vector; layer `k` stores its `out x in` weight
/// matrix row-major followed by its `out` biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    widths: Vec<usize>,
    output: OutputActivation,
}

/// Reusable forward/backward buffers, so training loops do not allocate.
#[derive(Debug, Clone, Default)]
pub struct MlpScratch {
    acts: Vec<f64>,
    delta: Vec<f64>,
    next: Vec<f64>,
}

impl Mlp {
    /// `depth` affine layers; hidden layers all have width `hidden`.
    pub fn new(depth: usize, hidden: usize, output: OutputActivation) -> Result<Self> {
        if depth == 0 || (depth > 1 && hidden == 0) {
            return Err(Error::InvalidParams {
                field: "depth".into(),
                reason: "need at least one layer and nonzero hidden width".into(),
            });
        }
        let mut widths = vec![1];
        widths.extend(std::iter::repeat(hidden).take(depth - 1));
        widths.push(1);
        Ok(Mlp { widths, output })
    }

    pub fn generator(depth: usize) -> Result<Self> {
        Mlp::new(depth, DEFAULT_HIDDEN_WIDTH, OutputActivation::Identity)
    }

    pub fn discriminator(depth: usize) -> Result<Self> {
        Mlp::new(depth, DEFAULT_HIDDEN_WIDTH, OutputActivation::Sigmoid)
    }

    pub fn depth(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn output(&self) -> OutputActivation {
        self.output
    }

    pub fn param_count(&self) -> usize {
        self.widths.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    fn check(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::ShapeMismatch {
                expected: self.param_count(),
                got: params.len(),
            });
        }
        Ok(())
    }

    /// Glorot-uniform weights and zero biases.
    pub fn init_params(&self, rng: &mut SeededRng) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.param_count());
        for w in self.widths.windows(2) {
            let limit = (6.0 / (w[0] + w[1]) as f64).sqrt();
            for _ in 0..w[0] * w[1] {
                p.push(rng.uniform_in(-limit, limit));
            }
            p.extend(std::iter::repeat(0.0).take(w[1]));
        }
        p
    }

    /// Pre-activation of the output unit (the logit for discriminators),
    /// leaving every layer's output in `scratch` for a later backward pass.
    pub fn forward_logit(&self, params: &[f64], x: f64, scratch: &mut MlpScratch) -> f64 {
        let total: usize = self.widths.iter().sum();
        scratch.acts.clear();
        scratch.acts.reserve(total);
        scratch.acts.push(x);
        let mut off = 0;
        let mut in_start = 0;
        let layers = self.depth();
        let mut out = 0.0;
        for (k, w) in self.widths.windows(2).enumerate() {
            let (nin, nout) = (w[0], w[1]);
            let weights = &params[off..off + nin * nout];
            let biases = &params[off + nin * nout..off + nin * nout + nout];
            for j in 0..nout {
                let row = &weights[j * nin..(j + 1) * nin];
                let mut s = biases[j];
                for i in 0..nin {
                    s += row[i] * scratch.acts[in_start + i];
                }
                if k + 1 == layers {
                    out = s;
                } else {
                    scratch.acts.push(s.tanh());
                }
            }
            off += nin * nout + nout;
            in_start += nin;
        }
        out
    }

    /// Adds `upstream * d(logit)/d(params)` into `grad` and returns
    /// `upstream * d(logit)/dx`. Must follow `forward_logit` on the same
    /// scratch.
    pub fn backward_logit(
        &self,
        params: &[f64],
        upstream: f64,
        scratch: &mut MlpScratch,
        grad: &mut [f64],
    ) -> f64 {
        self.backward(params, upstream, scratch, Some(grad))
    }

    /// `upstream * d(logit)/dx` alone.
    pub fn input_gradient(&self, params: &[f64], upstream: f64, scratch: &mut MlpScratch) -> f64 {
        self.backward(params, upstream, scratch, None)
    }

    fn backward(
        &self,
        params: &[f64],
        upstream: f64,
        scratch: &mut MlpScratch,
        mut grad: Option<&mut [f64]>,
    ) -> f64 {
        let layers = self.depth();
        let mut off = self.param_count();
        let mut a0: usize = self.widths[..layers].iter().sum();
        scratch.delta.clear();
        scratch.delta.push(upstream);
        for k in (0..layers).rev() {
            let (nin, nout) = (self.widths[k], self.widths[k + 1]);
            off -= nin * nout + nout;
            a0 -= nin;
            scratch.next.clear();
            scratch.next.resize(nin, 0.0);
            for j in 0..nout {
                let d = scratch.delta[j];
                if d == 0.0 {
                    continue;
                }
                let row = &params[off + j * nin..off + (j + 1) * nin];
                for i in 0..nin {
                    scratch.next[i] += d * row[i];
                }
                if let Some(g) = grad.as_deref_mut() {
                    for i in 0..nin {
                        g[off + j * nin + i] += d * scratch.acts[a0 + i];
                    }
                    g[off + nin * nout + j] += d;
                }
            }
            if k > 0 {
                // Back through the tanh that produced this layer's input.
                for i in 0..nin {
                    let h = scratch.acts[a0 + i];
                    scratch.next[i] *= 1.0 - h * h;
                }
            }
            std::mem::swap(&mut scratch.delta, &mut scratch.next);
        }
        scratch.delta[0]
    }

    /// Output value: the identity or the clamped sigmoid of the logit.
    pub fn activate(&self, logit: f64) -> f64 {
        match self.output {
            OutputActivation::Identity => logit,
            OutputActivation::Sigmoid => sigmoid(logit).clamp(D_MIN, 1.0 - D_MIN),
        }
    }

    /// Derivative of `activate` at `logit`; zero inside the clamp region.
    pub fn activate_slope(&self, logit: f64) -> f64 {
        match self.output {
            OutputActivation::Identity => 1.0,
            OutputActivation::Sigmoid => {
                if logit.abs() >= LOGIT_CLAMP {
                    0.0
                } else {
                    let s = sigmoid(logit);
                    s * (1.0 - s)
                }
            }
        }
    }
}

pub fn mlp_forward(net: &Mlp, params: &[f64], input: f64) -> Result<f64> {
    net.check(params)?;
    let mut scratch = MlpScratch::default();
    Ok(net.activate(net.forward_logit(params, input, &mut scratch)))
}

/// Gradient of `upstream * output` with respect to the parameters.
pub fn mlp_backward(net: &Mlp, params: &[f64], input: f64, upstream: f64) -> Result<Vec<f64>> {
    net.check(params)?;
    let mut scratch = MlpScratch::default();
    let logit = net.forward_logit(params, input, &mut scratch);
    let mut grad = vec![0.0; params.len()];
    let up = upstream * net.activate_slope(logit);
    if up != 0.0 {
        net.backward_logit(params, up, &mut scratch, &mut grad);
    }
    Ok(grad)
}

/// KDE of `m` draws of `G(Z)`, `Z ~ U[0,1]`.
pub fn neural_pushforward_density(
    generator: &Mlp,
    params: &[f64],
    rng: &mut SeededRng,
    m: usize,
) -> Result<Density> {
    if m < 10_000 {
        return Err(Error::InvalidInput(format!(
            "pushforward KDE needs at least 10000 draws, got {m}"
        )));
    }
    generator.check(params)?;
    let mut scratch = MlpScratch::default();
    let draws: Vec<f64> = (0..m)
        .map(|_| {
            let z = rng.uniform();
            generator.activate(generator.forward_logit(params, z, &mut scratch))
        })
        .collect();
    Ok(Density::Kde(kde(&draws, Bandwidth::Silverman)?))
}
