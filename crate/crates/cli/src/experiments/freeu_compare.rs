use c3_core::denoiser::HookSet;
use c3_core::freq::FreeUSpec;

use super::{ablate_blocks::lambda_tag, first_concept, slug, write_sample};
use crate::context::RunContext;
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::output::Cell;

pub const HEADER: [&str; 7] = ["method", "b", "s", "seed", "usability", "distance", "hbe"];

/// FreeU parameter grid against the combined amplification profile, on the
/// first concept.
pub fn run(ctx: &RunContext) -> CliResult<RunManifest> {
    let p = &ctx.config.experiments.freeu;
    let mut variants: Vec<(Option<(f64, f64)>, HookSet)> = Vec::new();
    for &b in &p.b {
        for &s in &p.s {
            let spec = FreeUSpec::new(b, s, p.skip_cutoff).map_err(|e| CliError::Config(e.to_string()))?;
            variants.push((
                Some((b, s)),
                HookSet {
                    step_range: ctx.config.hooks.step_range,
                    ..HookSet::freeu(spec)
                },
            ));
        }
    }
    variants.push((None, ctx.amplified_hooks()?));
    let concept = first_concept(ctx);
    let cond = ctx.conditioning(concept);
    let per_seed = ctx.par_map(&ctx.seeds(), |&seed| {
        let base = ctx.generate(&cond, seed, &HookSet::none())?;
        variants
            .iter()
            .map(|(_, hooks)| {
                let sample = ctx.generate(&cond, seed, hooks)?;
                let usability = ctx.score(&sample.image, &cond, &base.image)?.usability();
                let distance = ctx.distance(&sample.image, &base.image);
                let hbe = ctx.hbe(&sample.image)?;
                Ok((sample, usability, distance, hbe))
            })
            .collect::<CliResult<Vec<_>>>()
    })?;
    let mut out = ctx.output("freeu-compare")?;
    let mut rows = Vec::new();
    for (i, (bs, _)) in variants.iter().enumerate() {
        for (seed, results) in ctx.seeds().into_iter().zip(&per_seed) {
            let (sample, u, d, h) = &results[i];
            let (method, b, s, tag) = match bs {
                Some((b, s)) => ("freeu", Cell::Num(*b), Cell::Num(*s), format!("freeu_b{}_s{}", lambda_tag(*b), lambda_tag(*s))),
                None => ("c3", Cell::Text(String::new()), Cell::Text(String::new()), "c3".to_owned()),
            };
            write_sample(&mut out, ctx, &format!("images/{}/{tag}_seed{seed:04}", slug(concept)), sample)?;
            rows.push(vec![Cell::from(method), b, s, Cell::from(seed), Cell::Num(*u), Cell::Num(*d), Cell::Num(*h)]);
        }
    }
    out.write_csv("freeu_compare.csv", &HEADER, &rows)?;
    out.finish(&ctx.config, "freeu-compare")
}
