//! A deterministic, untrained, block-structured denoiser.
//!
//! Three stride-2 down blocks, a middle block and three up blocks with skip
//! connections (`Down_i` feeds `Up_{2-i}`). Weights are He-scaled Gaussians
//! drawn from a seeded [`RngStream`](crate::tensor::RngStream). Each block
//! output is a hook point where low-band amplification (or the FreeU-style
//! baseline, at the up blocks) can be applied during sampling.

mod conditioning;
mod hooks;
mod model;
mod sampler;

pub use conditioning::{embed_conditioning, ConditioningSpec, CONDITIONING_BASE_SEED};
pub use hooks::{AmplificationProfile, BlockAmplification, HookMode, HookSet, StepRange};
pub use model::{DenoiserModel, ForwardOutput, StepContext, TIME_EMBED_DIM};
pub use sampler::{guided_eps, SampleOutput, SamplerConfig, Schedule, TRAIN_TIMESTEPS};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Denoiser stage. `Down0..Mid` are the default amplification targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BlockId {
    Down0,
    Down1,
    Down2,
    Mid,
    Up0,
    Up1,
    Up2,
}

impl BlockId {
    pub const ALL: [BlockId; 7] = [
        BlockId::Down0,
        BlockId::Down1,
        BlockId::Down2,
        BlockId::Mid,
        BlockId::Up0,
        BlockId::Up1,
        BlockId::Up2,
    ];

    /// Blocks targeted by default: the down blocks and the middle block.
    pub const TARGETS: [BlockId; 4] = [BlockId::Down0, BlockId::Down1, BlockId::Down2, BlockId::Mid];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_up(self) -> bool {
        matches!(self, BlockId::Up0 | BlockId::Up1 | BlockId::Up2)
    }

    pub fn name(self) -> &'static str {
        match self {
            BlockId::Down0 => "Down0",
            BlockId::Down1 => "Down1",
            BlockId::Down2 => "Down2",
            BlockId::Mid => "Mid",
            BlockId::Up0 => "Up0",
            BlockId::Up1 => "Up1",
            BlockId::Up2 => "Up2",
        }
    }
}

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BlockId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BlockId::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown block {s:?}")))
    }
}

/// Pinned weight seed of the shipped reference model.
pub const DEFAULT_WEIGHT_SEED: u64 = 20_250_611;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub latent_channels: usize,
    pub latent_size: usize,
    /// Channel widths of Down0, Down1, Down2 and Mid.
    pub widths: [usize; 4],
    pub cond_dim: usize,
    pub weight_seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            latent_channels: 4,
            latent_size: 32,
            widths: [32, 64, 128, 128],
            cond_dim: 64,
            weight_seed: DEFAULT_WEIGHT_SEED,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        // Down2 and Mid run at latent_size / 8 and must stay FFT-able (>= 2).
        if self.latent_size < 16 || !self.latent_size.is_power_of_two() || self.latent_size > 64 {
            return Err(Error::Dimension(format!(
                "latent_size {} must be a power of two in [16, 64]",
                self.latent_size
            )));
        }
        if self.latent_channels == 0 || self.cond_dim == 0 || self.widths.contains(&0) {
            return Err(Error::Dimension(
                "latent_channels, cond_dim and widths must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Output `(channels, height, width)` of a block.
    pub fn block_shape(&self, block: BlockId) -> (usize, usize, usize) {
        let s = self.latent_size;
        let [w0, w1, w2, w3] = self.widths;
        match block {
            BlockId::Down0 => (w0, s / 2, s / 2),
            BlockId::Down1 => (w1, s / 4, s / 4),
            BlockId::Down2 => (w2, s / 8, s / 8),
            BlockId::Mid => (w3, s / 8, s / 8),
            BlockId::Up0 => (w1, s / 4, s / 4),
            BlockId::Up1 => (w0, s / 2, s / 2),
            BlockId::Up2 => (w0, s, s),
        }
    }
}
