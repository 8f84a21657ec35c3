use std::collections::BTreeMap;

use c3_core::denoiser::{AmplificationProfile, HookSet};
use c3_core::image::Image;
use c3_core::metrics::{
    build_report, frechet, pairwise_diversity, round_sig6, GaussianMoments, MetricsReport, CSV_HEADER,
};
use serde::{Deserialize, Serialize};

use crate::context::{mean, std_dev, RunContext};
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::output::Cell;

/// Metric columns aggregated across concepts, in CSV order.
pub const METRIC_COLUMNS: [&str; 9] = [
    "n_real",
    "n_fake",
    "k",
    "fid_star",
    "precision_star",
    "recall",
    "lpips_mean",
    "vendi",
    "alignment_mean",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConceptReport {
    pub concept: String,
    /// Plain set as reference, amplified set as generated.
    pub metrics: MetricsReport,
    /// Fréchet distance between the even- and odd-seed halves of the plain
    /// set; `None` when a half has fewer than two images.
    pub plain_split_half_fid: Option<f64>,
    pub plain_lpips_mean: f64,
    /// Fréchet distance between the plain set and the plain set of the
    /// configured reference concept.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_concept: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub real_to_ref_fid: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantReport {
    pub concepts: Vec<ConceptReport>,
    pub mean: BTreeMap<String, f64>,
    pub std: BTreeMap<String, f64>,
    pub profile: AmplificationProfile,
}

fn metric_values(r: &MetricsReport) -> [f64; 9] {
    [
        r.n_real as f64,
        r.n_fake as f64,
        r.k as f64,
        r.fid_star,
        r.precision_star,
        r.recall,
        r.lpips_mean,
        r.vendi,
        r.alignment_mean,
    ]
}

fn fid_between(ctx: &RunContext, a: &[Image], b: &[Image]) -> CliResult<f64> {
    let ea: Vec<_> = a.iter().map(|im| ctx.embedder.embed(im)).collect();
    let eb: Vec<_> = b.iter().map(|im| ctx.embedder.embed(im)).collect();
    Ok(frechet(&GaussianMoments::from_samples(&ea)?, &GaussianMoments::from_samples(&eb)?)?)
}

fn generate_set(ctx: &RunContext, concept: &str, hooks: &HookSet) -> CliResult<Vec<Image>> {
    let cond = ctx.conditioning(concept);
    ctx.par_map(&ctx.seeds(), |&seed| Ok(ctx.generate(&cond, seed, hooks)?.image))
}

/// Plain versus amplified metric battery per concept, plus mean and std.
pub fn run(ctx: &RunContext) -> CliResult<RunManifest> {
    let k = ctx.config.metrics.k;
    if ctx.config.seeds < k + 2 {
        return Err(CliError::Config(format!(
            "quant needs seeds >= metrics.k + 2 = {}, got {}",
            k + 2,
            ctx.config.seeds
        )));
    }
    let hooks = ctx.amplified_hooks()?;
    let none = HookSet::none();
    let mut concepts = Vec::new();
    for concept in &ctx.config.concepts {
        let plain = generate_set(ctx, concept, &none)?;
        let creative = generate_set(ctx, concept, &hooks)?;
        let cond = ctx.conditioning(concept);
        let metrics = build_report(&plain, &creative, &plain, &ctx.embedder, k, ctx.scorer.as_ref(), &cond)?;
        let (even, odd): (Vec<_>, Vec<_>) = plain.iter().cloned().enumerate().partition(|(i, _)| i % 2 == 0);
        let strip = |v: Vec<(usize, Image)>| v.into_iter().map(|(_, im)| im).collect::<Vec<_>>();
        let (even, odd) = (strip(even), strip(odd));
        let plain_split_half_fid = if odd.len() >= 2 {
            Some(round_sig6(fid_between(ctx, &even, &odd)?))
        } else {
            None
        };
        let reference_concept = ctx.config.ref_concepts.get(concept).cloned();
        let real_to_ref_fid = match &reference_concept {
            Some(r) => Some(round_sig6(fid_between(ctx, &plain, &generate_set(ctx, r, &none)?)?)),
            None => None,
        };
        concepts.push(ConceptReport {
            concept: concept.clone(),
            metrics,
            plain_split_half_fid,
            plain_lpips_mean: round_sig6(pairwise_diversity(&plain, &ctx.embedder)?),
            reference_concept,
            real_to_ref_fid,
        });
    }

    let columns: Vec<Vec<f64>> = (0..METRIC_COLUMNS.len())
        .map(|j| concepts.iter().map(|c| metric_values(&c.metrics)[j]).collect())
        .collect();
    let aggregate = |f: fn(&[f64]) -> f64| -> BTreeMap<String, f64> {
        METRIC_COLUMNS
            .iter()
            .zip(&columns)
            .map(|(name, col)| (name.to_string(), round_sig6(f(col))))
            .collect()
    };
    let report = QuantReport {
        mean: aggregate(mean),
        std: aggregate(std_dev),
        profile: hooks.profile.clone(),
        concepts,
    };

    let mut out = ctx.output("quant")?;
    let header: Vec<&str> = std::iter::once("concept").chain(CSV_HEADER.split(',')).collect();
    let mut rows: Vec<Vec<Cell>> = report
        .concepts
        .iter()
        .map(|c| {
            std::iter::once(Cell::from(c.concept.as_str()))
                .chain(c.metrics.csv_row().split(',').map(|s| Cell::Text(s.to_owned())))
                .collect()
        })
        .collect();
    for (label, agg) in [("mean", &report.mean), ("std", &report.std)] {
        rows.push(
            std::iter::once(Cell::from(label))
                .chain(METRIC_COLUMNS.iter().map(|c| Cell::Num(agg[*c])))
                .collect(),
        );
    }
    out.write_csv("report.csv", &header, &rows)?;
    out.write_json("report.json", &report)?;
    out.finish(&ctx.config, "quant")
}
