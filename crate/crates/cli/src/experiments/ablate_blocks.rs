use c3_core::denoiser::{BlockId, HookSet};

use super::{first_concept, slug, write_sample};
use crate::context::{mean, profile_cutoff, RunContext};
use crate::error::CliResult;
use crate::manifest::RunManifest;
use crate::output::Series;
use crate::row;

pub const HEADER: [&str; 6] = ["block", "lambda", "seed", "usability", "distance", "hbe"];

/// Single-block amplification over each target block's search grid, on the
/// first concept.
pub fn run(ctx: &RunContext) -> CliResult<RunManifest> {
    let concept = first_concept(ctx);
    let cond = ctx.conditioning(concept);
    let cells: Vec<(BlockId, f64)> = BlockId::TARGETS
        .iter()
        .flat_map(|&b| ctx.config.search.grid(b).values().iter().map(move |&l| (b, l)).collect::<Vec<_>>())
        .collect();
    let per_seed = ctx.par_map(&ctx.seeds(), |&seed| {
        let base = ctx.generate(&cond, seed, &HookSet::none())?;
        cells
            .iter()
            .map(|&(block, lambda)| {
                let hooks = ctx.single_block_hooks(block, lambda, profile_cutoff())?;
                let sample = ctx.generate(&cond, seed, &hooks)?;
                let usability = ctx.score(&sample.image, &cond, &base.image)?.usability();
                let distance = ctx.distance(&sample.image, &base.image);
                let hbe = ctx.hbe(&sample.image)?;
                Ok((sample, usability, distance, hbe))
            })
            .collect::<CliResult<Vec<_>>>()
    })?;

    let mut out = ctx.output("ablate-blocks")?;
    let mut rows = Vec::new();
    let mut series: Vec<Series> = Vec::new();
    for (i, &(block, lambda)) in cells.iter().enumerate() {
        let mut distances = Vec::new();
        for (seed, results) in ctx.seeds().into_iter().zip(&per_seed) {
            let (sample, usability, distance, hbe) = &results[i];
            let stem = format!("images/{}/{}_l{}_seed{seed:04}", slug(concept), block.name(), lambda_tag(lambda));
            write_sample(&mut out, ctx, &stem, sample)?;
            rows.push(row![block.name(), lambda, seed, *usability, *distance, *hbe]);
            distances.push(*distance);
        }
        match series.last_mut() {
            Some(s) if s.label == block.name() => s.points.push((lambda, mean(&distances))),
            _ => series.push(Series {
                label: block.name().into(),
                points: vec![(lambda, mean(&distances))],
            }),
        }
    }
    out.write_csv("ablate_blocks.csv", &HEADER, &rows)?;
    if ctx.options.svg {
        out.write_svg("distance.svg", "mean distance to baseline", "lambda", "distance", &series)?;
    }
    out.finish(&ctx.config, "ablate-blocks")
}

/// `2.5` → `2p5`, for file names.
pub fn lambda_tag(lambda: f64) -> String {
    c3_core::metrics::fmt_sig6(lambda).replace('.', "p")
}
