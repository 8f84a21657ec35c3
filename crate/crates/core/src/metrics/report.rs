use serde::{Deserialize, Serialize, Serializer};

use super::{frechet, knn_precision_recall, pairwise_diversity_features, vendi, Embedder, GaussianMoments};
use crate::denoiser::ConditioningSpec;
use crate::image::Image;
use crate::selection::{Scorer, UsabilityContext};
use crate::{Error, Result};

/// Column order of [`MetricsReport::csv_row`].
pub const CSV_HEADER: &str = "n_real,n_fake,k,fid_star,precision_star,recall,lpips_mean,vendi,alignment_mean";

/// Rounds to 6 significant decimal digits.
pub fn round_sig6(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.5e}").parse().unwrap_or(v)
}

/// Formats like C's `%g`: 6 significant digits, trailing zeros removed,
/// scientific notation outside `[1e-4, 1e6)`.
pub fn fmt_sig6(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_owned()
        } else {
            s.to_owned()
        }
    };
    if (-4..6).contains(&exp) {
        trim(&format!("{:.*}", (5 - exp) as usize, v))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    }
}

fn ser_sig6<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig6(*v))
}

fn ser_opt_sig6<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_some(&round_sig6(*v)),
        None => s.serialize_none(),
    }
}

/// Metric battery for one plain/creative pair of image sets.
///
/// `fid_star` (higher means further from the plain set) and
/// `precision_star` (lower means more outside the plain manifold) are read
/// opposite to their usual sense because the reference set is the plain
/// generation set rather than real data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n_real: usize,
    pub n_fake: usize,
    pub k: usize,
    #[serde(serialize_with = "ser_sig6")]
    pub fid_star: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub precision_star: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub recall: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub lpips_mean: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub vendi: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub alignment_mean: f64,
    /// Only filled when an external scorer supplies it.
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "ser_opt_sig6")]
    pub blip: Option<f64>,
}

impl MetricsReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n_real,
            self.n_fake,
            self.k,
            fmt_sig6(self.fid_star),
            fmt_sig6(self.precision_star),
            fmt_sig6(self.recall),
            fmt_sig6(self.lpips_mean),
            fmt_sig6(self.vendi),
            fmt_sig6(self.alignment_mean)
        )
    }
}

/// Computes every metric with `plain` standing in for real data and
/// `creative` as the generated set. `baselines[i]` is the unamplified image
/// sharing `creative[i]`'s seed; alignment is scored against it.
pub fn build_report(
    plain: &[Image],
    creative: &[Image],
    baselines: &[Image],
    embedder: &Embedder,
    k: usize,
    scorer: &dyn Scorer,
    conditioning: &ConditioningSpec,
) -> Result<MetricsReport> {
    if baselines.len() != creative.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} creative images but {} baselines",
            creative.len(),
            baselines.len()
        )));
    }
    let real: Vec<_> = plain.iter().map(|im| embedder.embed(im)).collect();
    let fake: Vec<_> = creative.iter().map(|im| embedder.embed(im)).collect();
    let (precision_star, recall) = knn_precision_recall(&real, &fake, k)?;
    let fid_star = frechet(&GaussianMoments::from_samples(&real)?, &GaussianMoments::from_samples(&fake)?)?;
    let mut alignment = 0.0;
    for (img, base) in creative.iter().zip(baselines) {
        let ctx = UsabilityContext {
            conditioning: conditioning.clone(),
            baseline_image: base.clone(),
        };
        alignment += scorer.score(img, &ctx)?.alignment;
    }
    Ok(MetricsReport {
        n_real: real.len(),
        n_fake: fake.len(),
        k,
        fid_star,
        precision_star,
        recall,
        lpips_mean: pairwise_diversity_features(&fake)?,
        vendi: vendi(&fake)?,
        alignment_mean: alignment / creative.len() as f64,
        blip: None,
    })
}
