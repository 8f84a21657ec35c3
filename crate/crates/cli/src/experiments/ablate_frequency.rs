use c3_core::denoiser::HookSet;
use c3_core::freq::CutoffRatio;

use super::first_concept;
use crate::context::RunContext;
use crate::error::CliResult;
use crate::manifest::RunManifest;
use crate::row;

pub const HEADER: [&str; 4] = ["seed", "variant", "hbe", "usability"];

/// All-band versus low-band amplification of one block, on the first concept.
pub fn run(ctx: &RunContext) -> CliResult<RunManifest> {
    let p = &ctx.config.experiments.frequency;
    let cond = ctx.conditioning(first_concept(ctx));
    let variants = [
        ("allband", ctx.single_block_hooks(p.block, p.lambda, CutoffRatio::ALL_PASS)?),
        ("lowband", ctx.single_block_hooks(p.block, p.lambda, p.rho_low)?),
    ];
    let per_seed = ctx.par_map(&ctx.seeds(), |&seed| {
        let base = ctx.generate(&cond, seed, &HookSet::none())?;
        variants
            .iter()
            .map(|(name, hooks)| {
                let img = ctx.generate(&cond, seed, hooks)?.image;
                let usability = ctx.score(&img, &cond, &base.image)?.usability();
                Ok(row![seed, *name, ctx.hbe(&img)?, usability])
            })
            .collect::<CliResult<Vec<_>>>()
    })?;
    let mut out = ctx.output("ablate-frequency")?;
    let rows: Vec<_> = per_seed.into_iter().flatten().collect();
    out.write_csv("ablate_frequency.csv", &HEADER, &rows)?;
    out.finish(&ctx.config, "ablate-frequency")
}
