use c3_core::denoiser::HookSet;

use super::{slug, write_sample};
use crate::context::RunContext;
use crate::error::CliResult;
use crate::manifest::RunManifest;
use crate::row;

pub const INDEX_HEADER: [&str; 7] = ["concept", "seed", "variant", "file", "aesthetic", "alignment", "usability"];

/// Baseline and amplified images for every concept and seed.
pub fn run(ctx: &RunContext) -> CliResult<RunManifest> {
    let hooks = ctx.amplified_hooks()?;
    let none = HookSet::none();
    let mut out = ctx.output("gen")?;
    let mut rows = Vec::new();
    for concept in &ctx.config.concepts {
        let cond = ctx.conditioning(concept);
        let results = ctx.par_map(&ctx.seeds(), |&seed| {
            let base = ctx.generate(&cond, seed, &none)?;
            let hooked = ctx.generate(&cond, seed, &hooks)?;
            let s_base = ctx.score(&base.image, &cond, &base.image)?;
            let s_hooked = ctx.score(&hooked.image, &cond, &base.image)?;
            Ok((seed, [("baseline", base, s_base), ("hooked", hooked, s_hooked)]))
        })?;
        for (seed, variants) in results {
            for (variant, sample, scores) in variants {
                let stem = format!("images/{}/seed{seed:04}_{variant}", slug(concept));
                let file = write_sample(&mut out, ctx, &stem, &sample)?;
                rows.push(row![
                    concept.as_str(),
                    seed,
                    variant,
                    file,
                    scores.aesthetic,
                    scores.alignment,
                    scores.usability()
                ]);
            }
        }
    }
    out.write_csv("index.csv", &INDEX_HEADER, &rows)?;
    out.write_json("hooks.json", &hooks)?;
    out.finish(&ctx.config, "gen")
}
