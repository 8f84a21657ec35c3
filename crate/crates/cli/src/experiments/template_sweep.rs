use c3_core::denoiser::HookSet;
use c3_core::metrics::pairwise_diversity;

use super::{first_concept, slug, write_sample};
use crate::context::{mean, RunContext};
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::row;

pub const HEADER: [&str; 5] = ["modifier", "images", "usability_mean", "diversity", "distance_mean"];

/// The combined profile under each template modifier, on the first concept.
pub fn run(ctx: &RunContext) -> CliResult<RunManifest> {
    let templates = &ctx.config.experiments.templates;
    if templates.is_empty() {
        return Err(CliError::Config("experiments.templates is empty".into()));
    }
    if ctx.config.seeds < 2 {
        return Err(CliError::Config("template-sweep needs at least 2 seeds".into()));
    }
    let hooks = ctx.amplified_hooks()?;
    let concept = first_concept(ctx);
    let mut out = ctx.output("template-sweep")?;
    let mut rows = Vec::new();
    for modifier in templates {
        let cond = ctx.conditioning_with(concept, Some(modifier));
        let results = ctx.par_map(&ctx.seeds(), |&seed| {
            let base = ctx.generate(&cond, seed, &HookSet::none())?;
            let sample = ctx.generate(&cond, seed, &hooks)?;
            let usability = ctx.score(&sample.image, &cond, &base.image)?.usability();
            let distance = ctx.distance(&sample.image, &base.image);
            Ok((sample, usability, distance))
        })?;
        for (seed, (sample, _, _)) in ctx.seeds().into_iter().zip(&results) {
            write_sample(&mut out, ctx, &format!("images/{}/{}_seed{seed:04}", slug(concept), slug(modifier)), sample)?;
        }
        let images: Vec<_> = results.iter().map(|r| r.0.image.clone()).collect();
        let uses: Vec<f64> = results.iter().map(|r| r.1).collect();
        let dists: Vec<f64> = results.iter().map(|r| r.2).collect();
        rows.push(row![
            modifier.as_str(),
            images.len(),
            mean(&uses),
            pairwise_diversity(&images, &ctx.embedder)?,
            mean(&dists)
        ]);
    }
    out.write_csv("template_sweep.csv", &HEADER, &rows)?;
    out.finish(&ctx.config, "template-sweep")
}
