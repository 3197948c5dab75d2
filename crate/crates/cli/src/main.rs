use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ganlab::experiments::{execute, ExperimentConfig, ExperimentKind, Scale};
use ganlab::Error;

#[derive(clap::Args)]
struct Opts {
    /// JSON experiment config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    scale: Option<ScaleArg>,
    /// Output directory (default `results`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy)]
enum ScaleArg {
    Desk,
    Paper,
}

#[derive(Parser)]
#[command(name = "ganlab", version, about = "One-dimensional GAN estimation experiments")]
struct Invocation {
    #[arg(value_enum)]
    experiment: KindArg,
    #[command(flatten)]
    opts: Opts,
}

#[derive(ValueEnum, Clone, Copy)]
enum KindArg {
    DepthSweep,
    Consistency,
    Clt,
    Fit,
    ThetaStar,
    Variance,
}

impl From<KindArg> for ExperimentKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::DepthSweep => ExperimentKind::DepthSweep,
            KindArg::Consistency => ExperimentKind::Consistency,
            KindArg::Clt => ExperimentKind::Clt,
            KindArg::Fit => ExperimentKind::Fit,
            KindArg::ThetaStar => ExperimentKind::ThetaStar,
            KindArg::Variance => ExperimentKind::Variance,
        }
    }
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::InvalidParams { .. }
        | Error::UnknownModel(_)
        | Error::InvalidInput(_)
        | Error::DimensionMismatch(_)
        | Error::ShapeMismatch { .. }
        | Error::Io(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

fn build_config(inv: &Invocation) -> Result<ExperimentConfig, Error> {
    let kind = ExperimentKind::from(inv.experiment);
    let mut cfg = match &inv.opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            let cfg = ExperimentConfig::from_json(&text)?;
            if cfg.experiment != kind {
                return Err(Error::Config(format!(
                    "config is for `{}`, command is `{}`",
                    cfg.experiment.tag(),
                    kind.tag()
                )));
            }
            cfg
        }
        None => ExperimentConfig::new(kind),
    };
    let o = &inv.opts;
    if let Some(m) = &o.model {
        cfg.model = Some(m.clone());
    }
    if let Some(n) = &o.n {
        cfg.sample_sizes = Some(n.clone());
    }
    if let Some(r) = o.reps {
        cfg.repetitions = Some(r);
    }
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    if let Some(s) = o.scale {
        cfg.scale = match s {
            ScaleArg::Desk => Scale::Desk,
            ScaleArg::Paper => Scale::Paper,
        };
    }
    if let Some(out) = &o.out {
        cfg.output = Some(out.clone());
    }
    cfg.resolved()
}

fn main() -> ExitCode {
    let inv = Invocation::parse();
    let result = build_config(&inv).and_then(|cfg| {
        let out = cfg.output.clone().unwrap_or_else(|| PathBuf::from("results"));
        execute(&cfg, &out)
    });
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("ganlab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
