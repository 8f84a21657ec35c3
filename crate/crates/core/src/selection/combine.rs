use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::BlockSelection;
use crate::denoiser::{AmplificationProfile, BlockAmplification, BlockId};
use crate::freq::CutoffRatio;
use crate::{Error, Result};

/// Budget `S` for the 1-step regime.
pub const SINGLE_STEP_SCALE_SUM: f64 = 1.0;
/// Budget `S` for multi-step regimes.
pub const MULTI_STEP_SCALE_SUM: f64 = 0.6;

/// Default budget for a sampler with `steps` steps.
pub fn default_scale_sum(steps: usize) -> f64 {
    if steps == 1 {
        SINGLE_STEP_SCALE_SUM
    } else {
        MULTI_STEP_SCALE_SUM
    }
}

/// How selected per-block factors are merged when several blocks are
/// amplified together.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CombinationConfig {
    /// Budget `S`; `None` picks the default for the sampler's step count.
    pub target_sum: Option<f64>,
    /// Relative weights `w_l`; uniform when absent.
    pub weights: Option<BTreeMap<BlockId, f64>>,
}

impl CombinationConfig {
    pub fn resolved_sum(&self, steps: usize) -> f64 {
        self.target_sum.unwrap_or_else(|| default_scale_sum(steps))
    }
}

/// Distributes the budget `S` over the selected blocks, `s_l = S·w_l/Σw`,
/// and shrinks each factor's excess over 1 by its share:
/// `λ_l = 1 + s_l·(λ*_l − 1)`.
pub fn combine(
    selections: &[BlockSelection],
    target_sum: f64,
    weights: Option<&BTreeMap<BlockId, f64>>,
    cutoff: impl Fn(BlockId) -> CutoffRatio,
) -> Result<AmplificationProfile> {
    if selections.is_empty() {
        return Err(Error::InsufficientData("no selections to combine".into()));
    }
    if !target_sum.is_finite() || target_sum <= 0.0 {
        return Err(Error::Domain(format!("target sum {target_sum} must be > 0")));
    }
    let mut w = Vec::with_capacity(selections.len());
    for sel in selections {
        let wl = match weights {
            Some(map) => *map.get(&sel.block).ok_or_else(|| {
                Error::Domain(format!("no combination weight for block {}", sel.block))
            })?,
            None => 1.0,
        };
        if !wl.is_finite() || wl <= 0.0 {
            return Err(Error::Domain(format!("weight {wl} for {} must be > 0", sel.block)));
        }
        w.push(wl);
    }
    let total: f64 = w.iter().sum();
    let blocks = selections
        .iter()
        .zip(&w)
        .map(|(sel, wl)| {
            let scale = target_sum * wl / total;
            BlockAmplification {
                block: sel.block,
                lambda: 1.0 + scale * (sel.lambda_star - 1.0),
                cutoff: cutoff(sel.block),
                scale: Some(scale),
                lambda_star: Some(sel.lambda_star),
            }
        })
        .collect();
    let profile = AmplificationProfile {
        blocks,
        target_sum: Some(target_sum),
    };
    profile.validate()?;
    Ok(profile)
}
