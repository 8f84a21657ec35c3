use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::scorer::{Scorer, UsabilityContext};
use crate::denoiser::{BlockId, ConditioningSpec};
use crate::image::Image;
use crate::{Error, Result};

/// Candidate amplification factors for one block: strictly increasing,
/// starting at 1 (no amplification) and ending at the cap `K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SearchGrid(Vec<f64>);

impl SearchGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Domain("search grid needs at least two points".into()));
        }
        if values[0] != 1.0 {
            return Err(Error::Domain(format!("search grid must start at 1, starts at {}", values[0])));
        }
        if values.windows(2).any(|w| w[1] <= w[0] || !w[1].is_finite()) {
            return Err(Error::Domain("search grid must be strictly increasing and finite".into()));
        }
        Ok(Self(values))
    }

    /// `points` evenly spaced values on `[1, cap]`.
    pub fn linspace(cap: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::Domain("search grid needs at least two points".into()));
        }
        let step = (cap - 1.0) / (points - 1) as f64;
        let mut v: Vec<f64> = (0..points).map(|i| 1.0 + step * i as f64).collect();
        *v.last_mut().unwrap() = cap;
        Self::new(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// The cap `K`.
    pub fn cap(&self) -> f64 {
        *self.0.last().unwrap()
    }

    /// Default per-block grids: caps 2 for Down0/Down1 (5 points) and 10
    /// for Down2/Mid (10 points).
    pub fn default_for(block: BlockId) -> Self {
        match block {
            BlockId::Down0 | BlockId::Down1 => Self::linspace(2.0, 5),
            _ => Self::linspace(10.0, 10),
        }
        .expect("default grids are valid")
    }
}

impl TryFrom<Vec<f64>> for SearchGrid {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SearchGrid> for Vec<f64> {
    fn from(g: SearchGrid) -> Vec<f64> {
        g.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    /// Usability bumper `ε ∈ [0, 1]`.
    pub epsilon: f64,
    pub grids: BTreeMap<BlockId, SearchGrid>,
    /// Images averaged per grid point (seeds `0..m`).
    pub seeds_per_point: usize,
    /// Evaluate every grid point instead of stopping at the first feasible one.
    pub full_trace: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.85,
            grids: BlockId::TARGETS.iter().map(|&b| (b, SearchGrid::default_for(b))).collect(),
            seeds_per_point: 4,
            full_trace: false,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::Domain(format!("epsilon {} outside [0, 1]", self.epsilon)));
        }
        if self.seeds_per_point == 0 {
            return Err(Error::Domain("seeds_per_point must be >= 1".into()));
        }
        Ok(())
    }

    pub fn grid(&self, block: BlockId) -> SearchGrid {
        self.grids
            .get(&block)
            .cloned()
            .unwrap_or_else(|| SearchGrid::default_for(block))
    }
}

/// One evaluated grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, f64, bool)", into = "(f64, f64, bool)")]
pub struct TracePoint {
    pub lambda: f64,
    pub usability: f64,
    pub feasible: bool,
}

impl From<(f64, f64, bool)> for TracePoint {
    fn from((lambda, usability, feasible): (f64, f64, bool)) -> Self {
        Self {
            lambda,
            usability,
            feasible,
        }
    }
}

impl From<TracePoint> for (f64, f64, bool) {
    fn from(p: TracePoint) -> Self {
        (p.lambda, p.usability, p.feasible)
    }
}

/// Result of the constrained search for one block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSelection {
    pub block: BlockId,
    pub lambda_star: f64,
    /// Evaluated points in ascending `λ`; always contains `λ = 1`.
    pub trace: Vec<TracePoint>,
}

impl BlockSelection {
    pub fn baseline_usability(&self) -> f64 {
        self.trace
            .iter()
            .find(|p| p.lambda == 1.0)
            .map(|p| p.usability)
            .expect("trace always contains the baseline")
    }

    /// Checks the optimality condition from the trace alone: `λ*` is
    /// feasible and every evaluated larger factor is not.
    pub fn is_optimal(&self) -> bool {
        let star_ok = self
            .trace
            .iter()
            .any(|p| p.lambda == self.lambda_star && p.feasible);
        star_ok
            && self
                .trace
                .iter()
                .filter(|p| p.lambda > self.lambda_star)
                .all(|p| !p.feasible)
    }
}

/// Largest grid factor whose mean usability is at least `ε` times the
/// usability at `λ = 1`.
///
/// `mean_usability` maps a factor to its mean usability. The baseline is
/// evaluated first, then the grid is scanned from the cap downward; unless
/// `full_trace` is set the scan stops at the first feasible factor. Either
/// way the selected factor is the same.
pub fn select_lambda<F>(
    block: BlockId,
    grid: &SearchGrid,
    epsilon: f64,
    full_trace: bool,
    mut mean_usability: F,
) -> Result<BlockSelection>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Domain(format!("epsilon {epsilon} outside [0, 1]")));
    }
    let baseline = mean_usability(1.0)?;
    if !baseline.is_finite() || baseline < 0.0 {
        return Err(Error::Domain(format!("baseline usability {baseline} must be finite and >= 0")));
    }
    let threshold = epsilon * baseline;
    let mut trace = vec![TracePoint {
        lambda: 1.0,
        usability: baseline,
        feasible: baseline >= threshold,
    }];
    let mut lambda_star = None;
    for &lambda in grid.values()[1..].iter().rev() {
        if lambda_star.is_some() && !full_trace {
            break;
        }
        let u = mean_usability(lambda)?;
        let feasible = u >= threshold;
        trace.push(TracePoint {
            lambda,
            usability: u,
            feasible,
        });
        if feasible && lambda_star.is_none() {
            lambda_star = Some(lambda);
        }
    }
    trace.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(BlockSelection {
        block,
        lambda_star: lambda_star.unwrap_or(1.0),
        trace,
    })
}

/// Runs [`select_lambda`] with usability averaged over `cfg.seeds_per_point`
/// seeds per factor for every conditioning in `conds`. Alignment is measured
/// against the `λ = 1` image of the same seed and conditioning.
pub fn select_lambda_with_generator(
    block: BlockId,
    cfg: &SearchConfig,
    conds: &[ConditioningSpec],
    generator: &dyn Fn(&ConditioningSpec, f64, u64) -> Result<Image>,
    scorer: &dyn Scorer,
) -> Result<BlockSelection> {
    cfg.validate()?;
    if conds.is_empty() {
        return Err(Error::InsufficientData("no conditioning to search over".into()));
    }
    let seeds = 0..cfg.seeds_per_point as u64;
    let mut contexts = Vec::new();
    for cond in conds {
        for seed in seeds.clone() {
            contexts.push((
                seed,
                UsabilityContext {
                    conditioning: cond.clone(),
                    baseline_image: generator(cond, 1.0, seed)?,
                },
            ));
        }
    }
    let grid = cfg.grid(block);
    select_lambda(block, &grid, cfg.epsilon, cfg.full_trace, |lambda| {
        let mut total = 0.0;
        for (seed, ctx) in &contexts {
            let image = if lambda == 1.0 {
                ctx.baseline_image.clone()
            } else {
                generator(&ctx.conditioning, lambda, *seed)?
            };
            total += scorer.score(&image, ctx)?.usability();
        }
        Ok(total / contexts.len() as f64)
    })
}
