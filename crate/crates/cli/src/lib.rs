//! Experiment harness for the frequency-amplification toolkit: config
//! handling, subcommands and artifact writers behind the `c3` binary.

pub mod config;
pub mod context;
pub mod error;
pub mod experiments;
pub mod manifest;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{ExperimentConfig, Preset};
pub use context::{RunContext, RunOptions};
pub use error::{CliError, CliResult};
pub use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "c3", version, about = "Low-frequency feature amplification experiments on a toy denoiser")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON config file; defaults apply to missing keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a config field, e.g. `--set sampler.steps=1`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    /// Worker threads for seed-level parallelism.
    #[arg(long, default_value_t = 1, global = true)]
    pub jobs: usize,
    /// Also write SVG line plots.
    #[arg(long, global = true)]
    pub svg: bool,
    #[arg(long, value_enum, global = true)]
    pub preset: Option<Preset>,
    /// Also write final latents as tensor files.
    #[arg(long, global = true)]
    pub dump_latents: bool,
    /// Combined profile JSON to use for the amplified variant.
    #[arg(long, global = true)]
    pub profile: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Baseline and amplified images per concept and seed.
    Gen,
    /// Single-block amplification over each block's factor grid.
    AblateBlocks,
    /// All-band versus low-band amplification.
    AblateFrequency,
    /// Per-block factor search under the usability constraint.
    Select,
    /// Merge selected factors into one profile and sample with it.
    Combine,
    /// Novelty and diversity metrics, plain versus amplified.
    Quant,
    /// One-parameter sweep (see `experiments.sweep`).
    Sweep,
    /// Amplification with and without the prompt modifier.
    AblateModifier,
    /// FreeU parameter grid against the combined profile.
    FreeuCompare,
    /// Combined profile under each template modifier.
    TemplateSweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Gen => "gen",
            Command::AblateBlocks => "ablate-blocks",
            Command::AblateFrequency => "ablate-frequency",
            Command::Select => "select",
            Command::Combine => "combine",
            Command::Quant => "quant",
            Command::Sweep => "sweep",
            Command::AblateModifier => "ablate-modifier",
            Command::FreeuCompare => "freeu-compare",
            Command::TemplateSweep => "template-sweep",
        }
    }
}

impl Cli {
    /// Effective config: file (or defaults), then preset, then `--set`
    /// overrides, then the endpoint environment variable.
    pub fn resolve_config(&self) -> CliResult<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(p) = self.preset {
            cfg.apply_preset(p);
        }
        let mut cfg = cfg.apply_overrides(&self.overrides)?;
        cfg.apply_env();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn options(&self) -> RunOptions {
        RunOptions {
            jobs: self.jobs,
            svg: self.svg,
            dump_latents: self.dump_latents,
            profile: self.profile.clone(),
        }
    }

    pub fn run(&self) -> CliResult<RunManifest> {
        let ctx = RunContext::new(self.resolve_config()?, self.options())?;
        run_command(&ctx, self.command)
    }
}

pub fn run_command(ctx: &RunContext, command: Command) -> CliResult<RunManifest> {
    use experiments::*;
    match command {
        Command::Gen => gen::run(ctx),
        Command::AblateBlocks => ablate_blocks::run(ctx),
        Command::AblateFrequency => ablate_frequency::run(ctx),
        Command::Select => select::run(ctx),
        Command::Combine => combine::run(ctx),
        Command::Quant => quant::run(ctx),
        Command::Sweep => sweep::run(ctx),
        Command::AblateModifier => ablate_modifier::run(ctx),
        Command::FreeuCompare => freeu_compare::run(ctx),
        Command::TemplateSweep => template_sweep::run(ctx),
    }
}
