use serde::{Deserialize, Serialize};

use super::{embed_conditioning, ConditioningSpec, DenoiserModel, HookSet, StepContext, CONDITIONING_BASE_SEED};
use crate::image::Image;
use crate::tensor::{FeatureMap, RngStream};
use crate::{Error, Result};

/// Length of the virtual training schedule.
pub const TRAIN_TIMESTEPS: usize = 1000;
const BETA_START: f64 = 1e-4;
const BETA_END: f64 = 0.02;
const LATENT_STREAM: u64 = 0x4c41_5445;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    /// Number of sampled DDIM steps `T`.
    pub steps: usize,
    /// Guidance scale `g`; `0` disables guidance (single conditional pass).
    pub cfg_scale: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            steps: 4,
            cfg_scale: 0.0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 || self.steps > TRAIN_TIMESTEPS {
            return Err(Error::Domain(format!(
                "steps {} outside [1, {TRAIN_TIMESTEPS}]",
                self.steps
            )));
        }
        if !self.cfg_scale.is_finite() || self.cfg_scale < 0.0 {
            return Err(Error::Domain(format!("cfg_scale {} must be >= 0", self.cfg_scale)));
        }
        Ok(())
    }
}

/// Linear-beta schedule over 1000 virtual steps and its evenly spaced
/// `T`-step subsequence, from `t = 999` downward.
#[derive(Clone, Debug)]
pub struct Schedule {
    alpha_bar: Vec<f64>,
    timesteps: Vec<usize>,
}

impl Schedule {
    pub fn new(steps: usize) -> Result<Self> {
        if steps == 0 || steps > TRAIN_TIMESTEPS {
            return Err(Error::Domain(format!("steps {steps} outside [1, {TRAIN_TIMESTEPS}]")));
        }
        let mut alpha_bar = Vec::with_capacity(TRAIN_TIMESTEPS);
        let mut acc = 1.0;
        for i in 0..TRAIN_TIMESTEPS {
            let beta = BETA_START + (BETA_END - BETA_START) * i as f64 / (TRAIN_TIMESTEPS - 1) as f64;
            acc *= 1.0 - beta;
            alpha_bar.push(acc);
        }
        let ratio = TRAIN_TIMESTEPS / steps;
        let timesteps = (0..steps).map(|i| TRAIN_TIMESTEPS - 1 - i * ratio).collect();
        Ok(Self { alpha_bar, timesteps })
    }

    pub fn timesteps(&self) -> &[usize] {
        &self.timesteps
    }

    pub fn alpha_bar(&self, timestep: usize) -> f64 {
        self.alpha_bar[timestep]
    }

    pub fn step(&self, index: usize) -> StepContext {
        let timestep = self.timesteps[index];
        StepContext {
            index,
            timestep,
            alpha_bar: self.alpha_bar[timestep],
        }
    }

    /// `ᾱ` of the step after `index`; 1 after the final step.
    pub fn alpha_bar_prev(&self, index: usize) -> f64 {
        self.timesteps
            .get(index + 1)
            .map_or(1.0, |&t| self.alpha_bar[t])
    }
}

/// Guidance blend `eps_neg + g·(eps_cond − eps_neg)`, evaluated as
/// `(1−g)·eps_neg + g·eps_cond` so `g = 0` and `g = 1` reproduce the inputs exactly.
pub fn guided_eps(eps_cond: &FeatureMap<f32>, eps_neg: &FeatureMap<f32>, g: f64) -> Result<FeatureMap<f32>> {
    eps_cond.same_shape(eps_neg)?;
    let (c, h, w) = eps_cond.shape();
    let g32 = g as f32;
    let keep = (1.0 - g) as f32;
    FeatureMap::new(
        c,
        h,
        w,
        eps_cond
            .data()
            .iter()
            .zip(eps_neg.data())
            .map(|(cv, nv)| keep * nv + g32 * cv)
            .collect(),
    )
}

#[derive(Clone, Debug)]
pub struct SampleOutput {
    pub image: Image,
    pub latent: FeatureMap<f32>,
}

impl DenoiserModel {
    /// Initial latent for `seed`.
    pub fn initial_latent(&self, seed: u64) -> Result<FeatureMap<f32>> {
        let c = self.config();
        let mut rng = RngStream::new(seed, LATENT_STREAM);
        FeatureMap::new(
            c.latent_channels,
            c.latent_size,
            c.latent_size,
            rng.normals_f32(c.latent_channels * c.latent_size * c.latent_size, 1.0),
        )
    }

    pub fn conditioning_vector(&self, spec: &ConditioningSpec) -> Vec<f32> {
        embed_conditioning(spec, self.config().cond_dim, CONDITIONING_BASE_SEED)
    }

    /// Negative branch of guidance: the negative concept if set, else zeros.
    pub fn negative_vector(&self, spec: &ConditioningSpec) -> Vec<f32> {
        match &spec.negative_concept {
            Some(neg) => self.conditioning_vector(&ConditioningSpec::new(neg.clone())),
            None => vec![0.0; self.config().cond_dim],
        }
    }

    /// Noise prediction for one step, with guidance when `cfg_scale > 0`.
    pub fn predict_eps(
        &self,
        latent: &FeatureMap<f32>,
        step: &StepContext,
        cond: &[f32],
        neg: &[f32],
        cfg_scale: f64,
        hooks: &HookSet,
    ) -> Result<FeatureMap<f32>> {
        let eps_cond = self.forward(latent, step, cond, hooks, false)?.eps;
        if cfg_scale > 0.0 {
            let eps_neg = self.forward(latent, step, neg, hooks, false)?.eps;
            guided_eps(&eps_cond, &eps_neg, cfg_scale)
        } else {
            Ok(eps_cond)
        }
    }

    /// Deterministic DDIM (η = 0) run from the seeded initial latent.
    pub fn sample(
        &self,
        sampler: &SamplerConfig,
        cond: &ConditioningSpec,
        seed: u64,
        hooks: &HookSet,
    ) -> Result<SampleOutput> {
        sampler.validate()?;
        hooks.validate(sampler.steps)?;
        let schedule = Schedule::new(sampler.steps)?;
        let cond_vec = self.conditioning_vector(cond);
        let neg_vec = self.negative_vector(cond);
        let mut x = self.initial_latent(seed)?;
        for i in 0..sampler.steps {
            let step = schedule.step(i);
            let eps = self.predict_eps(&x, &step, &cond_vec, &neg_vec, sampler.cfg_scale, hooks)?;
            let ab = step.alpha_bar;
            let ab_prev = schedule.alpha_bar_prev(i);
            let (sa, sb) = (ab.sqrt(), (1.0 - ab).sqrt());
            let (pa, pb) = (ab_prev.sqrt(), (1.0 - ab_prev).sqrt());
            let (c, h, w) = x.shape();
            let next = x
                .data()
                .iter()
                .zip(eps.data())
                .map(|(&xv, &ev)| {
                    let x0 = (xv as f64 - sb * ev as f64) / sa;
                    (pa * x0 + pb * ev as f64) as f32
                })
                .collect();
            x = FeatureMap::new(c, h, w, next)?;
        }
        Ok(SampleOutput {
            image: self.decode(&x)?,
            latent: x,
        })
    }
}
