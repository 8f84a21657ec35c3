//! Experiment configuration: JSON file, presets and `--set` overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use c3_core::denoiser::{
    AmplificationProfile, BlockId, HookMode, HookSet, ModelConfig, SamplerConfig, StepRange,
};
use c3_core::freq::CutoffRatio;
use c3_core::metrics::DEFAULT_EMBED_SEED;
use c3_core::selection::{CombinationConfig, SearchConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Environment variable that overrides `scorer.endpoint`.
pub const SCORER_ENDPOINT_ENV: &str = "C3_SCORER_ENDPOINT";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScorerKind {
    #[default]
    Local,
    Remote,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScorerConfig {
    pub kind: ScorerKind,
    pub endpoint: Option<String>,
    /// Fall back to the local proxies when the remote scorer is unreachable.
    pub fallback: bool,
    pub timeout_secs: f64,
    pub retries: u32,
}

impl Default for ScorerConfig {
    fn default() -> Self {
        Self {
            kind: ScorerKind::Local,
            endpoint: None,
            fallback: true,
            timeout_secs: 10.0,
            retries: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    /// Neighbour count for precision/recall.
    pub k: usize,
    pub embed_seed: u64,
    /// Cutoff used when reporting the high-band energy of output images.
    pub hbe_cutoff: CutoffRatio,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            k: 3,
            embed_seed: DEFAULT_EMBED_SEED,
            hbe_cutoff: CutoffRatio::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrequencyParams {
    pub block: BlockId,
    pub lambda: f64,
    pub rho_low: CutoffRatio,
}

impl Default for FrequencyParams {
    fn default() -> Self {
        Self {
            block: BlockId::Down0,
            lambda: 2.0,
            rho_low: CutoffRatio::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    #[default]
    Cutoff,
    Epsilon,
    ScaleSum,
    StepRange,
    Cfg,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Cutoff => "cutoff",
            SweepParam::Epsilon => "epsilon",
            SweepParam::ScaleSum => "scale_sum",
            SweepParam::StepRange => "step_range",
            SweepParam::Cfg => "cfg",
        }
    }

    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepParam::Cutoff => vec![0.0, 0.125, 0.25, 0.5, 1.0],
            SweepParam::Epsilon => vec![0.5, 0.7, 0.85, 0.9],
            SweepParam::ScaleSum => vec![0.2, 0.4, 0.6, 0.8, 1.0],
            SweepParam::StepRange => Vec::new(),
            SweepParam::Cfg => vec![0.0, 1.0, 2.0, 4.0, 7.5],
        }
    }
}

impl FromStr for SweepParam {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        serde_json::from_value(Value::String(s.to_owned()))
            .map_err(|_| CliError::Config(format!("unknown sweep parameter '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepParams {
    pub param: SweepParam,
    /// Swept values; empty picks the parameter's defaults.
    pub values: Vec<f64>,
    /// Block and factor for the single-block cutoff sweep.
    pub block: BlockId,
    pub lambda: f64,
    /// Ranges for the step-range sweep; empty picks all/first half/second half.
    pub step_ranges: Vec<StepRange>,
}

impl Default for SweepParams {
    fn default() -> Self {
        Self {
            param: SweepParam::Cutoff,
            values: Vec::new(),
            block: BlockId::Down0,
            lambda: 2.0,
            step_ranges: Vec::new(),
        }
    }
}

impl SweepParams {
    pub fn resolved_values(&self) -> Vec<f64> {
        if self.values.is_empty() {
            self.param.default_values()
        } else {
            self.values.clone()
        }
    }

    pub fn resolved_step_ranges(&self, steps: usize) -> Vec<StepRange> {
        if !self.step_ranges.is_empty() {
            return self.step_ranges.clone();
        }
        let all = StepRange { start: 0, end: steps - 1 };
        if steps < 2 {
            return vec![all];
        }
        let half = steps / 2;
        vec![
            all,
            StepRange { start: 0, end: half - 1 },
            StepRange { start: half, end: steps - 1 },
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FreeuParams {
    pub b: Vec<f64>,
    pub s: Vec<f64>,
    pub skip_cutoff: CutoffRatio,
}

impl Default for FreeuParams {
    fn default() -> Self {
        Self {
            b: vec![0.8, 1.0, 1.2, 1.5],
            s: vec![0.5, 1.0, 1.5],
            skip_cutoff: CutoffRatio::default(),
        }
    }
}

pub const TEMPLATE_MODIFIERS: [&str; 4] = ["creative", "rare", "innovative", "ingenious"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentParams {
    pub frequency: FrequencyParams,
    pub sweep: SweepParams,
    pub freeu: FreeuParams,
    pub templates: Vec<String>,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        Self {
            frequency: FrequencyParams::default(),
            sweep: SweepParams::default(),
            freeu: FreeuParams::default(),
            templates: TEMPLATE_MODIFIERS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Everything a subcommand needs. Unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub sampler: SamplerConfig,
    pub concepts: Vec<String>,
    /// Template word placed before the concept, "a {modifier} {concept}".
    pub modifier: Option<String>,
    pub negative_concept: Option<String>,
    /// Reference concept per concept for the reference-distance band.
    pub ref_concepts: BTreeMap<String, String>,
    pub seeds: usize,
    /// Hooks for the amplified variant. A C3 hook set with an empty profile
    /// stands for the combined profile.
    pub hooks: HookSet,
    pub search: SearchConfig,
    pub combination: CombinationConfig,
    pub scorer: ScorerConfig,
    pub metrics: MetricsConfig,
    pub experiments: ExperimentParams,
    /// Combined profile to use instead of `<out_dir>/combine/profile.json`.
    pub profile: Option<PathBuf>,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            sampler: SamplerConfig::default(),
            concepts: vec!["chair".into(), "car".into()],
            modifier: Some("creative".into()),
            negative_concept: None,
            ref_concepts: BTreeMap::new(),
            seeds: 8,
            hooks: HookSet::c3(AmplificationProfile::default()),
            search: SearchConfig::default(),
            combination: CombinationConfig::default(),
            scorer: ScorerConfig::default(),
            metrics: MetricsConfig::default(),
            experiments: ExperimentParams::default(),
            profile: None,
            out_dir: PathBuf::from("runs"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// 1-step sampler, scale budget 1.0.
    Turbo,
    /// 4-step sampler, scale budget 0.6.
    Lightning4,
    /// 25-step sampler, scale budget 0.6.
    Sdxl,
}

impl Preset {
    pub fn steps(self) -> usize {
        match self {
            Preset::Turbo => 1,
            Preset::Lightning4 => 4,
            Preset::Sdxl => 25,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn apply_preset(&mut self, preset: Preset) {
        self.sampler.steps = preset.steps();
        self.combination.target_sum = Some(c3_core::selection::default_scale_sum(preset.steps()));
    }

    /// Applies `key.path=value` overrides. Values parse as JSON when they
    /// can and are taken as strings otherwise; the parent of every key must
    /// already exist.
    pub fn apply_overrides(&self, overrides: &[String]) -> CliResult<Self> {
        if overrides.is_empty() {
            return Ok(self.clone());
        }
        let mut root = serde_json::to_value(self)?;
        for item in overrides {
            let (path, raw) = item
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("override '{item}' is not key=value")))?;
            let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_owned()));
            set_path(&mut root, path, value)?;
        }
        serde_json::from_value(root).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn apply_env(&mut self) {
        if let Ok(endpoint) = std::env::var(SCORER_ENDPOINT_ENV) {
            if !endpoint.is_empty() {
                self.scorer.endpoint = Some(endpoint);
            }
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let cfg = |e: c3_core::Error| CliError::Config(e.to_string());
        self.model.validate().map_err(cfg)?;
        self.sampler.validate().map_err(cfg)?;
        self.search.validate().map_err(cfg)?;
        self.hooks.validate(self.sampler.steps).map_err(cfg)?;
        if self.seeds == 0 {
            return Err(CliError::Config("seeds must be >= 1".into()));
        }
        if self.concepts.is_empty() || self.concepts.iter().any(|c| c.trim().is_empty()) {
            return Err(CliError::Config("concepts must be a non-empty list of names".into()));
        }
        if self.metrics.k == 0 {
            return Err(CliError::Config("metrics.k must be >= 1".into()));
        }
        if let Some(s) = self.combination.target_sum {
            if !(s.is_finite() && s > 0.0) {
                return Err(CliError::Config(format!("combination.target_sum {s} must be > 0")));
            }
        }
        if self.scorer.kind == ScorerKind::Remote && self.scorer.endpoint.is_none() {
            return Err(CliError::Config(format!(
                "remote scorer needs scorer.endpoint or {SCORER_ENDPOINT_ENV}"
            )));
        }
        if !self.scorer.timeout_secs.is_finite() || self.scorer.timeout_secs <= 0.0 {
            return Err(CliError::Config("scorer.timeout_secs must be > 0".into()));
        }
        Ok(())
    }

    /// Canonical JSON: compact with object keys sorted.
    pub fn canonical_json(&self) -> CliResult<String> {
        // serde_json's default map is ordered, so a round trip through
        // Value sorts every object's keys.
        Ok(serde_json::to_string(&serde_json::to_value(self)?)?)
    }

    /// SHA-256 of the canonical JSON, lowercase hex.
    pub fn hash(&self) -> CliResult<String> {
        Ok(hex(&Sha256::digest(self.canonical_json()?.as_bytes())))
    }

    /// Whether the amplified variant uses the combined profile.
    pub fn uses_combined_profile(&self) -> bool {
        self.hooks.mode == HookMode::C3 && self.hooks.profile.blocks.is_empty()
    }
}

/// Hashes a JSON document after canonicalizing key order.
pub fn canonical_hash(json: &str) -> CliResult<String> {
    let v: Value = serde_json::from_str(json).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(hex(&Sha256::digest(serde_json::to_string(&v)?.as_bytes())))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn set_path(root: &mut Value, path: &str, value: Value) -> CliResult<()> {
    let keys: Vec<&str> = path.split('.').collect();
    let (leaf, parents) = keys.split_last().expect("split yields at least one item");
    let mut node = root;
    for (depth, key) in parents.iter().enumerate() {
        let next = match node {
            Value::Object(map) => map.get_mut(*key),
            Value::Array(items) => key.parse::<usize>().ok().and_then(|i| items.get_mut(i)),
            _ => None,
        };
        node = next.ok_or_else(|| {
            CliError::Config(format!("unknown config key '{}'", keys[..=depth].join(".")))
        })?;
        if node.is_null() {
            *node = Value::Object(Default::default());
        }
    }
    match node {
        Value::Object(map) => {
            map.insert(leaf.to_string(), value);
        }
        Value::Array(items) => {
            let slot = leaf
                .parse::<usize>()
                .ok()
                .and_then(|i| items.get_mut(i))
                .ok_or_else(|| CliError::Config(format!("bad index in '{path}'")))?;
            *slot = value;
        }
        _ => return Err(CliError::Config(format!("'{path}' does not name a config field"))),
    }
    Ok(())
}
