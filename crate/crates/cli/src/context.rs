use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use c3_core::denoiser::{
    AmplificationProfile, BlockId, ConditioningSpec, DenoiserModel, HookMode, HookSet, SampleOutput,
};
use c3_core::freq::{high_band_energy, AmplificationSpec, CutoffRatio};
use c3_core::image::Image;
use c3_core::metrics::{Embedder, FeatureVector};
use c3_core::selection::{
    combine, select_lambda_with_generator, BlockSelection, LocalProxy, RemoteClient, RemoteScorer, Scorer,
    Scores, SearchConfig, UsabilityContext,
};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ScorerKind};
use crate::error::{CliError, CliResult};
use crate::output::OutputDir;

/// Flags that change how a run executes but not what it computes.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; 0 is treated as 1.
    pub jobs: usize,
    pub svg: bool,
    pub dump_latents: bool,
    /// Combined profile file, overriding `config.profile`.
    pub profile: Option<PathBuf>,
}

/// Model, scorer and embedder shared by every subcommand.
pub struct RunContext {
    pub config: ExperimentConfig,
    pub options: RunOptions,
    pub model: DenoiserModel,
    pub scorer: Arc<dyn Scorer>,
    pub embedder: Embedder,
    pool: rayon::ThreadPool,
}

/// Cutoff used for the blocks of a profile built here.
pub fn profile_cutoff() -> CutoffRatio {
    CutoffRatio::default()
}

impl RunContext {
    pub fn new(config: ExperimentConfig, options: RunOptions) -> CliResult<Self> {
        config.validate()?;
        let model = DenoiserModel::build(config.model.clone()).map_err(|e| CliError::Config(e.to_string()))?;
        let scorer: Arc<dyn Scorer> = match config.scorer.kind {
            ScorerKind::Local => Arc::new(LocalProxy::default()),
            ScorerKind::Remote => {
                let endpoint = config.scorer.endpoint.clone().expect("validated");
                Arc::new(RemoteScorer {
                    client: RemoteClient::new(
                        endpoint,
                        Duration::from_secs_f64(config.scorer.timeout_secs),
                        config.scorer.retries,
                    ),
                    fallback: config.scorer.fallback.then(LocalProxy::default),
                })
            }
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.jobs.max(1))
            .build()
            .map_err(|e| CliError::Internal(e.to_string()))?;
        Ok(Self {
            embedder: Embedder::new(config.metrics.embed_seed),
            config,
            options,
            model,
            scorer,
            pool,
        })
    }

    /// Output directory for `subcommand` under `out_dir`.
    pub fn output(&self, subcommand: &str) -> CliResult<OutputDir> {
        OutputDir::create(self.config.out_dir.join(subcommand))
    }

    /// Maps `f` over `items` on the worker pool, keeping input order.
    pub fn par_map<I, T, F>(&self, items: &[I], f: F) -> CliResult<Vec<T>>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> CliResult<T> + Sync + Send,
    {
        self.pool.install(|| items.par_iter().map(&f).collect())
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.config.seeds as u64).collect()
    }

    /// Conditioning for `concept` with the configured modifier and negative.
    pub fn conditioning(&self, concept: &str) -> ConditioningSpec {
        self.conditioning_with(concept, self.config.modifier.as_deref())
    }

    pub fn conditioning_with(&self, concept: &str, modifier: Option<&str>) -> ConditioningSpec {
        ConditioningSpec::new(concept)
            .with_modifier(modifier)
            .with_negative(self.config.negative_concept.as_deref())
    }

    pub fn generate(&self, cond: &ConditioningSpec, seed: u64, hooks: &HookSet) -> CliResult<SampleOutput> {
        Ok(self.model.sample(&self.config.sampler, cond, seed, hooks)?)
    }

    /// Hook set for a single-block amplification, inheriting the configured
    /// step range and skip behaviour.
    pub fn single_block_hooks(&self, block: BlockId, lambda: f64, cutoff: CutoffRatio) -> CliResult<HookSet> {
        let spec = AmplificationSpec::new(lambda, cutoff).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(self.profile_hooks(AmplificationProfile::single(block, spec)))
    }

    pub fn profile_hooks(&self, profile: AmplificationProfile) -> HookSet {
        HookSet {
            mode: HookMode::C3,
            profile,
            ..self.config.hooks.clone()
        }
    }

    pub fn score(&self, image: &Image, cond: &ConditioningSpec, baseline: &Image) -> CliResult<Scores> {
        let ctx = UsabilityContext {
            conditioning: cond.clone(),
            baseline_image: baseline.clone(),
        };
        Ok(self.scorer.score(image, &ctx)?)
    }

    /// `1 − cos` between the embeddings of two images.
    pub fn distance(&self, a: &Image, b: &Image) -> f64 {
        let (ea, eb): (FeatureVector<f64>, FeatureVector<f64>) = (self.embedder.embed(a), self.embedder.embed(b));
        (1.0 - ea.dot(&eb)).max(0.0)
    }

    /// High-band energy fraction of an output image.
    pub fn hbe(&self, image: &Image) -> CliResult<f64> {
        Ok(high_band_energy(image.pixels(), self.config.metrics.hbe_cutoff)?)
    }

    /// Runs the constrained factor search for every target block over all
    /// configured concepts. Blocks run in parallel.
    pub fn run_selection(&self) -> CliResult<Vec<BlockSelection>> {
        self.run_selection_with(&self.config.search)
    }

    pub fn run_selection_with(&self, search: &SearchConfig) -> CliResult<Vec<BlockSelection>> {
        let conds: Vec<ConditioningSpec> = self.config.concepts.iter().map(|c| self.conditioning(c)).collect();
        self.par_map(&BlockId::TARGETS, |&block| {
            let generator = |cond: &ConditioningSpec, lambda: f64, seed: u64| -> c3_core::Result<Image> {
                let spec = AmplificationSpec::new(lambda, profile_cutoff())?;
                let hooks = self.profile_hooks(AmplificationProfile::single(block, spec));
                Ok(self.model.sample(&self.config.sampler, cond, seed, &hooks)?.image)
            };
            Ok(select_lambda_with_generator(
                block,
                search,
                &conds,
                &generator,
                self.scorer.as_ref(),
            )?)
        })
    }

    /// Merges per-block selections with the configured budget and weights.
    pub fn combine(&self, selections: &[BlockSelection]) -> CliResult<AmplificationProfile> {
        self.combine_with_sum(selections, self.config.combination.resolved_sum(self.config.sampler.steps))
    }

    pub fn combine_with_sum(&self, selections: &[BlockSelection], sum: f64) -> CliResult<AmplificationProfile> {
        combine(
            selections,
            sum,
            self.config.combination.weights.as_ref(),
            |_| profile_cutoff(),
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }

    /// The combined profile: `--profile`, then `config.profile`, then the
    /// output of a previous `combine` run, else selected and combined here.
    pub fn combined_profile(&self) -> CliResult<AmplificationProfile> {
        let explicit = self.options.profile.as_ref().or(self.config.profile.as_ref());
        if let Some(path) = explicit {
            return load_profile(path);
        }
        let previous = self.config.out_dir.join("combine").join("profile.json");
        if previous.is_file() {
            return load_profile(&previous);
        }
        self.combine(&self.run_selection()?)
    }

    /// Hooks of the amplified variant: the configured set, or the combined
    /// profile when the configured C3 profile is empty.
    pub fn amplified_hooks(&self) -> CliResult<HookSet> {
        if self.config.uses_combined_profile() {
            Ok(self.profile_hooks(self.combined_profile()?))
        } else {
            Ok(self.config.hooks.clone())
        }
    }
}

pub fn load_profile(path: &Path) -> CliResult<AmplificationProfile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read profile {}: {e}", path.display())))?;
    let profile: AmplificationProfile =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("bad profile {}: {e}", path.display())))?;
    profile.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(profile)
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation; 0 for fewer than two values.
pub fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}
