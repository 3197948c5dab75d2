use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::criterion::AdversarialProblem;
use crate::error::{Error, Result};
use crate::families::{model, neural_problem, GeneratorFamily};
use crate::solvers::{Init, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    DepthSweep,
    Consistency,
    Clt,
    Fit,
    ThetaStar,
    Variance,
}

impl ExperimentKind {
    pub fn tag(self) -> &'static str {
        match self {
            ExperimentKind::DepthSweep => "depth-sweep",
            ExperimentKind::Consistency => "consistency",
            ExperimentKind::Clt => "clt",
            ExperimentKind::Fit => "fit",
            ExperimentKind::ThetaStar => "theta-star",
            ExperimentKind::Variance => "variance",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// Default sizes and repetition counts: `desk` runs in minutes, `paper`
/// matches the published experiment sizes and runs for hours.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Desk,
    Paper,
}

impl std::str::FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            other => Err(Error::Config(format!("unknown scale `{other}` (expected desk or paper)"))),
        }
    }
}

/// Partial [`TrainConfig`]; unset fields keep the family defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discriminator_steps_per_round: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator_steps_per_round: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lr_discriminator: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lr_generator: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_theta: Option<Init>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_alpha: Option<Init>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub use_log_trick: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
}

impl TrainOverrides {
    pub fn apply(&self, mut c: TrainConfig) -> TrainConfig {
        if let Some(v) = self.discriminator_steps_per_round {
            c.discriminator_steps_per_round = v;
        }
        if let Some(v) = self.generator_steps_per_round {
            c.generator_steps_per_round = v;
        }
        if let Some(v) = self.rounds {
            c.rounds = v;
        }
        if let Some(v) = self.lr_discriminator {
            c.lr_discriminator = v;
        }
        if let Some(v) = self.lr_generator {
            c.lr_generator = v;
        }
        if let Some(v) = &self.init_theta {
            c.init_theta = v.clone();
        }
        if let Some(v) = &self.init_alpha {
            c.init_alpha = v.clone();
        }
        if let Some(v) = self.use_log_trick {
            c.use_log_trick = v;
        }
        if self.batch_size.is_some() {
            c.batch_size = self.batch_size;
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Table 1 model name, `gaussian-gaussian`, or `neural-g<G>-d<D>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen_depths: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disc_depths: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repetitions: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub scale: Scale,
    #[serde(default)]
    pub train: TrainOverrides,
    /// Monte Carlo draws for the asymptotic variance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<usize>,
    /// Generator draws behind each pushforward KDE.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub js_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

pub(crate) fn config_error(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            model: None,
            gen_depths: None,
            disc_depths: None,
            sample_sizes: None,
            repetitions: None,
            seed: 0,
            scale: Scale::Desk,
            train: TrainOverrides::default(),
            mc_samples: None,
            js_samples: None,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| config_error(format!("invalid experiment config: {e}")))
    }

    /// Fills every unset field from the scale profile and validates.
    pub fn resolved(&self) -> Result<ExperimentConfig> {
        let mut c = self.clone();
        let paper = c.scale == Scale::Paper;
        let kind = c.experiment;
        match kind {
            ExperimentKind::DepthSweep => {
                c.gen_depths.get_or_insert_with(|| if paper { vec![2, 3] } else { vec![3] });
                c.disc_depths.get_or_insert_with(|| if paper { vec![2, 3, 4, 5] } else { vec![2, 5] });
                c.sample_sizes.get_or_insert_with(|| vec![if paper { 100_000 } else { 10_000 }]);
                c.repetitions.get_or_insert(if paper { 30 } else { 10 });
                c.js_samples.get_or_insert(if paper { 100_000 } else { 10_000 });
            }
            ExperimentKind::Consistency => {
                c.sample_sizes.get_or_insert_with(|| {
                    let mut v = vec![10, 100, 1000, 10_000];
                    if paper {
                        v.push(100_000);
                    }
                    v
                });
                c.repetitions.get_or_insert(200);
            }
            ExperimentKind::Clt => {
                c.sample_sizes.get_or_insert_with(|| vec![if paper { 100_000 } else { 10_000 }]);
                c.repetitions.get_or_insert(200);
                c.mc_samples.get_or_insert(100_000);
            }
            ExperimentKind::Fit => {
                c.sample_sizes.get_or_insert_with(|| vec![10_000]);
                c.repetitions.get_or_insert(1);
                c.js_samples.get_or_insert(10_000);
            }
            ExperimentKind::ThetaStar => {
                c.repetitions.get_or_insert(1);
            }
            ExperimentKind::Variance => {
                c.repetitions.get_or_insert(1);
                c.mc_samples.get_or_insert(100_000);
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == Some(0) {
            return Err(config_error("repetitions must be at least 1"));
        }
        if let Some(ns) = &self.sample_sizes {
            if ns.is_empty() || ns.iter().any(|&n| n == 0) {
                return Err(config_error("sample_sizes must be a non-empty list of positive integers"));
            }
            if ns.windows(2).any(|w| w[0] >= w[1]) {
                return Err(config_error("sample_sizes must be strictly ascending"));
            }
        }
        for (name, ds) in [("gen_depths", &self.gen_depths), ("disc_depths", &self.disc_depths)] {
            if let Some(ds) = ds {
                if ds.is_empty() || ds.iter().any(|&d| d == 0) {
                    return Err(config_error(format!("{name} must be a non-empty list of positive depths")));
                }
            }
        }
        if self.mc_samples.is_some_and(|m| m < 2) {
            return Err(config_error("mc_samples must be at least 2"));
        }
        if self.js_samples.is_some_and(|m| m < 10_000) {
            return Err(config_error("js_samples must be at least 10000"));
        }
        let needs_model = !matches!(self.experiment, ExperimentKind::DepthSweep);
        match (&self.model, needs_model) {
            (None, true) => {
                return Err(config_error(format!("experiment `{}` needs a model", self.experiment.tag())));
            }
            (Some(m), _) => {
                problem_by_name(m)?;
            }
            _ => {}
        }
        self.train.apply(TrainConfig::scale_model()).validate()?;
        Ok(())
    }

    /// SHA-256 of the canonical JSON of the resolved config, output path
    /// excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        let json = serde_json::to_string(&c).expect("config serializes");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn model_name(&self) -> Result<&str> {
        self.model
            .as_deref()
            .ok_or_else(|| config_error(format!("experiment `{}` needs a model", self.experiment.tag())))
    }

    pub fn sizes(&self) -> &[usize] {
        self.sample_sizes.as_deref().unwrap_or(&[])
    }

    pub fn reps(&self) -> usize {
        self.repetitions.unwrap_or(1)
    }

    /// Training configuration for `p` before the per-run seed is set.
    pub fn train_config(&self, p: &AdversarialProblem) -> TrainConfig {
        let base = match p.generator {
            GeneratorFamily::Mlp(_) => TrainConfig::neural(),
            _ => TrainConfig::scale_model(),
        };
        self.train.apply(base)
    }
}

/// Resolves a model name: Table 1 names, the well-specified Gaussian model,
/// or `neural-g<G>-d<D>` for MLP generator and discriminator depths.
pub fn problem_by_name(name: &str) -> Result<AdversarialProblem> {
    if let Some(rest) = name.strip_prefix("neural-g") {
        let parsed = rest
            .split_once("-d")
            .and_then(|(g, d)| Some((g.parse::<usize>().ok()?, d.parse::<usize>().ok()?)));
        return match parsed {
            Some((g, d)) => neural_problem(g, d),
            None => Err(Error::UnknownModel(name.to_string())),
        };
    }
    model(name)
}
