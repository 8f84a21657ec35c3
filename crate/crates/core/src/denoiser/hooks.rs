use serde::{Deserialize, Serialize};

use super::BlockId;
use crate::freq::{AmplificationSpec, CutoffRatio, FreeUSpec};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HookMode {
    #[default]
    None,
    C3,
    FreeU,
}

/// Inclusive range of sampled step indices a hook is active on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRange {
    pub start: usize,
    pub end: usize,
}

impl StepRange {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start > end {
            return Err(Error::Domain(format!("step range [{start}, {end}] is empty")));
        }
        Ok(Self { start, end })
    }

    pub fn contains(&self, step: usize) -> bool {
        (self.start..=self.end).contains(&step)
    }
}

/// One block's entry in an amplification profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockAmplification {
    pub block: BlockId,
    pub lambda: f64,
    #[serde(default)]
    pub cutoff: CutoffRatio,
    /// Share of the combination budget, when the profile came from [`combine`](crate::selection::combine).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    /// Selected factor before combination scaling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_star: Option<f64>,
}

impl BlockAmplification {
    pub fn spec(&self) -> AmplificationSpec {
        AmplificationSpec {
            lambda: self.lambda,
            cutoff: self.cutoff,
        }
    }
}

/// Per-block amplification applied during sampling.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AmplificationProfile {
    pub blocks: Vec<BlockAmplification>,
    /// Combination budget `S` the scales were drawn from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_sum: Option<f64>,
}

impl AmplificationProfile {
    pub fn single(block: BlockId, spec: AmplificationSpec) -> Self {
        Self {
            blocks: vec![BlockAmplification {
                block,
                lambda: spec.lambda,
                cutoff: spec.cutoff,
                scale: None,
                lambda_star: None,
            }],
            target_sum: None,
        }
    }

    pub fn from_specs(entries: impl IntoIterator<Item = (BlockId, AmplificationSpec)>) -> Self {
        Self {
            blocks: entries
                .into_iter()
                .map(|(block, spec)| BlockAmplification {
                    block,
                    lambda: spec.lambda,
                    cutoff: spec.cutoff,
                    scale: None,
                    lambda_star: None,
                })
                .collect(),
            target_sum: None,
        }
    }

    pub fn get(&self, block: BlockId) -> Option<AmplificationSpec> {
        self.blocks.iter().find(|b| b.block == block).map(BlockAmplification::spec)
    }

    pub fn scale_sum(&self) -> f64 {
        self.blocks.iter().filter_map(|b| b.scale).sum()
    }

    /// Replaces every block's cutoff.
    pub fn with_cutoff(&self, cutoff: CutoffRatio) -> Self {
        let mut out = self.clone();
        out.blocks.iter_mut().for_each(|b| b.cutoff = cutoff);
        out
    }

    pub fn validate(&self) -> Result<()> {
        for (i, entry) in self.blocks.iter().enumerate() {
            entry.spec().validate()?;
            if self.blocks[..i].iter().any(|b| b.block == entry.block) {
                return Err(Error::Domain(format!("block {} listed twice", entry.block)));
            }
        }
        Ok(())
    }
}

/// What the denoiser does at its hook points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HookSet {
    pub mode: HookMode,
    pub profile: AmplificationProfile,
    pub freeu: FreeUSpec,
    /// `None` means every sampled step.
    pub step_range: Option<StepRange>,
    /// Whether the skip connection carries the amplified block output.
    pub amplify_skips: bool,
}

impl Default for HookSet {
    fn default() -> Self {
        Self {
            mode: HookMode::None,
            profile: AmplificationProfile::default(),
            freeu: FreeUSpec::default(),
            step_range: None,
            amplify_skips: true,
        }
    }
}

impl HookSet {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn c3(profile: AmplificationProfile) -> Self {
        Self {
            mode: HookMode::C3,
            profile,
            ..Self::default()
        }
    }

    pub fn freeu(spec: FreeUSpec) -> Self {
        Self {
            mode: HookMode::FreeU,
            freeu: spec,
            ..Self::default()
        }
    }

    pub fn with_step_range(mut self, range: Option<StepRange>) -> Self {
        self.step_range = range;
        self
    }

    pub fn active_at(&self, step: usize) -> bool {
        self.mode != HookMode::None && self.step_range.is_none_or(|r| r.contains(step))
    }

    pub fn validate(&self, steps: usize) -> Result<()> {
        self.profile.validate()?;
        self.freeu.validate()?;
        if let Some(r) = self.step_range {
            if r.start > r.end || r.end >= steps {
                return Err(Error::Domain(format!(
                    "step range [{}, {}] outside [0, {}]",
                    r.start,
                    r.end,
                    steps.saturating_sub(1)
                )));
            }
        }
        Ok(())
    }
}
