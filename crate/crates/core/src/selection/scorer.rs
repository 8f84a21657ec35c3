use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::denoiser::ConditioningSpec;
use crate::image::{box_downsample, Image};
use crate::tensor::RngStream;
use crate::{Error, Result};

/// Upper bound of each score component.
pub const SCORE_MAX: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScorerSource {
    LocalProxy,
    Remote,
}

/// Aesthetic and alignment components of the usability score, each in `[0, 10]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub aesthetic: f64,
    pub alignment: f64,
}

impl Scores {
    pub fn usability(&self) -> f64 {
        self.aesthetic + self.alignment
    }
}

/// What alignment is measured against: the prompt and the same-seed
/// unamplified image.
#[derive(Clone, Debug)]
pub struct UsabilityContext {
    pub conditioning: ConditioningSpec,
    pub baseline_image: Image,
}

/// Scores images. Implementations never return negative or non-finite scores.
pub trait Scorer: Send + Sync {
    fn score(&self, image: &Image, ctx: &UsabilityContext) -> Result<Scores>;

    fn source(&self) -> ScorerSource;
}

/// `Use(I) = Aesthetic(I) + Alignment(I, c)`.
pub fn usability(image: &Image, ctx: &UsabilityContext, scorer: &dyn Scorer) -> Result<f64> {
    Ok(scorer.score(image, ctx)?.usability())
}

/// Coefficients `(a0, a1, a2, a3, a4)` of the aesthetic proxy logit
/// `a0 + a1·contrast + a2·colorfulness − a3·noise − a4·clipped`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AestheticWeights(pub [f64; 5]);

impl Default for AestheticWeights {
    fn default() -> Self {
        Self([0.0, 6.0, 2.0, 12.0, 4.0])
    }
}

/// Statistics feeding the aesthetic proxy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AestheticStats {
    pub contrast: f64,
    pub colorfulness: f64,
    pub noise: f64,
    pub clipped: f64,
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn aesthetic_stats(image: &Image) -> AestheticStats {
    let n = image.size();
    let y = image.luminance();
    let (_, contrast) = mean_std(y.iter().copied());

    let px = image.pixels();
    let (r, g, b) = (px.channel(0), px.channel(1), px.channel(2));
    let rg = r.iter().zip(g).map(|(&r, &g)| r as f64 - g as f64);
    let yb = r
        .iter()
        .zip(g)
        .zip(b)
        .map(|((&r, &g), &b)| 0.5 * (r as f64 + g as f64) - b as f64);
    let (mu_rg, sd_rg) = mean_std(rg);
    let (mu_yb, sd_yb) = mean_std(yb);
    let colorfulness = (sd_rg * sd_rg + sd_yb * sd_yb).sqrt() + 0.3 * (mu_rg * mu_rg + mu_yb * mu_yb).sqrt();

    let mut noise = 0.0;
    if n > 2 {
        for i in 1..n - 1 {
            for j in 1..n - 1 {
                let c = y[i * n + j];
                let lap = 4.0 * c - y[(i - 1) * n + j] - y[(i + 1) * n + j] - y[i * n + j - 1] - y[i * n + j + 1];
                noise += lap.abs();
            }
        }
        noise /= ((n - 2) * (n - 2)) as f64;
    }

    let clipped = px.data().iter().filter(|&&v| !(0.005..=0.995).contains(&v)).count() as f64 / px.len() as f64;

    AestheticStats {
        contrast,
        colorfulness,
        noise,
        clipped,
    }
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Hand-crafted stand-in for a learned aesthetic predictor, in `[0, 10]`.
pub fn aesthetic_proxy(image: &Image, weights: &AestheticWeights) -> f64 {
    let s = aesthetic_stats(image);
    let [a0, a1, a2, a3, a4] = weights.0;
    let z = a0 + a1 * s.contrast + a2 * s.colorfulness - a3 * s.noise - a4 * s.clipped;
    (SCORE_MAX * logistic(z)).clamp(0.0, SCORE_MAX)
}

const ALIGN_GRID: usize = 16;
const ALIGN_DIM: usize = 64;
const ALIGN_SEED: u64 = 0xA116_0E3B;

fn alignment_projection() -> &'static [f64] {
    static PROJ: OnceLock<Vec<f64>> = OnceLock::new();
    PROJ.get_or_init(|| {
        let inputs = ALIGN_GRID * ALIGN_GRID;
        RngStream::new(ALIGN_SEED, 0).normals(ALIGN_DIM * inputs, 1.0 / (inputs as f64).sqrt())
    })
}

/// 64-d unit embedding of the z-normalized 16×16 grayscale thumbnail.
pub fn alignment_embedding(image: &Image) -> Vec<f64> {
    let n = image.size();
    let thumb = if n >= ALIGN_GRID {
        box_downsample(&image.luminance(), n, ALIGN_GRID)
    } else {
        // Nearest upsampling for images smaller than the thumbnail grid.
        let y = image.luminance();
        let f = ALIGN_GRID / n;
        (0..ALIGN_GRID * ALIGN_GRID)
            .map(|i| y[(i / ALIGN_GRID / f) * n + (i % ALIGN_GRID) / f])
            .collect()
    };
    let k = thumb.len() as f64;
    let mean = thumb.iter().sum::<f64>() / k;
    let std = (thumb.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / k).sqrt();
    let z: Vec<f64> = thumb.iter().map(|v| (v - mean) / (std + 1e-8)).collect();
    let proj = alignment_projection();
    let mut e: Vec<f64> = (0..ALIGN_DIM)
        .map(|r| proj[r * z.len()..(r + 1) * z.len()].iter().zip(&z).map(|(a, b)| a * b).sum())
        .collect();
    let norm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        e.iter_mut().for_each(|v| *v /= norm);
    }
    e
}

/// `10·max(0, cos(embed(image), embed(baseline)))`.
pub fn alignment_proxy(image: &Image, ctx: &UsabilityContext) -> f64 {
    let a = alignment_embedding(image);
    let b = alignment_embedding(&ctx.baseline_image);
    let cos: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    (SCORE_MAX * cos.clamp(0.0, 1.0)).clamp(0.0, SCORE_MAX)
}

/// In-process scorer built from the two proxies.
#[derive(Clone, Debug, Default)]
pub struct LocalProxy {
    pub weights: AestheticWeights,
}

impl Scorer for LocalProxy {
    fn score(&self, image: &Image, ctx: &UsabilityContext) -> Result<Scores> {
        if image.size() != ctx.baseline_image.size() {
            return Err(Error::ShapeMismatch(format!(
                "image size {} vs baseline size {}",
                image.size(),
                ctx.baseline_image.size()
            )));
        }
        Ok(Scores {
            aesthetic: aesthetic_proxy(image, &self.weights),
            alignment: alignment_proxy(image, ctx),
        })
    }

    fn source(&self) -> ScorerSource {
        ScorerSource::LocalProxy
    }
}
