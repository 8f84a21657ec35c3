use c3_core::denoiser::HookSet;

use super::{gen::INDEX_HEADER, select::load_selections, slug, write_sample};
use crate::context::RunContext;
use crate::error::CliResult;
use crate::manifest::RunManifest;
use crate::row;

pub const PROFILE_FILE: &str = "profile.json";

/// Merges the `select` outputs into one profile and samples with it.
pub fn run(ctx: &RunContext) -> CliResult<RunManifest> {
    let selections = load_selections(&ctx.config.out_dir.join("select"))?;
    let profile = ctx.combine(&selections)?;
    let hooks = ctx.profile_hooks(profile.clone());
    let mut out = ctx.output("combine")?;
    out.write_json(PROFILE_FILE, &profile)?;
    let mut rows = Vec::new();
    for concept in &ctx.config.concepts {
        let cond = ctx.conditioning(concept);
        let results = ctx.par_map(&ctx.seeds(), |&seed| {
            let base = ctx.generate(&cond, seed, &HookSet::none())?;
            let sample = ctx.generate(&cond, seed, &hooks)?;
            let scores = ctx.score(&sample.image, &cond, &base.image)?;
            Ok((seed, sample, scores))
        })?;
        for (seed, sample, scores) in results {
            let stem = format!("images/{}/seed{seed:04}", slug(concept));
            let file = write_sample(&mut out, ctx, &stem, &sample)?;
            rows.push(row![
                concept.as_str(),
                seed,
                "combined",
                file,
                scores.aesthetic,
                scores.alignment,
                scores.usability()
            ]);
        }
    }
    out.write_csv("index.csv", &INDEX_HEADER, &rows)?;
    out.finish(&ctx.config, "combine")
}
