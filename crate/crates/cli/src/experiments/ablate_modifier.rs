use c3_core::denoiser::HookSet;
use c3_core::image::Image;
use c3_core::metrics::{frechet, pairwise_diversity, GaussianMoments};

use super::slug;
use crate::context::{mean, RunContext};
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::row;

pub const HEADER: [&str; 3] = ["concept", "fid_on_off_with_modifier", "fid_on_off_without_modifier"];
pub const CELLS_HEADER: [&str; 6] = ["concept", "modifier", "c3", "images", "usability_mean", "diversity"];

/// {modifier present, absent} × {amplification on, off} per concept.
pub fn run(ctx: &RunContext) -> CliResult<RunManifest> {
    let modifier = ctx.config.modifier.as_deref().ok_or_else(|| {
        CliError::Config("ablate-modifier needs a modifier".into())
    })?;
    if ctx.config.seeds < 2 {
        return Err(CliError::Config("ablate-modifier needs at least 2 seeds".into()));
    }
    let on = ctx.amplified_hooks()?;
    let off = HookSet::none();
    let mut out = ctx.output("ablate-modifier")?;
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for concept in &ctx.config.concepts {
        let mut fids = Vec::new();
        for (label, m) in [("with", Some(modifier)), ("without", None)] {
            let cond = ctx.conditioning_with(concept, m);
            let pairs = ctx.par_map(&ctx.seeds(), |&seed| {
                let img_off = ctx.generate(&cond, seed, &off)?.image;
                let img_on = ctx.generate(&cond, seed, &on)?.image;
                let u_off = ctx.score(&img_off, &cond, &img_off)?.usability();
                let u_on = ctx.score(&img_on, &cond, &img_off)?.usability();
                Ok((img_off, img_on, u_off, u_on))
            })?;
            let imgs_off: Vec<Image> = pairs.iter().map(|p| p.0.clone()).collect();
            let imgs_on: Vec<Image> = pairs.iter().map(|p| p.1.clone()).collect();
            for (state, imgs, uses) in [
                ("off", &imgs_off, pairs.iter().map(|p| p.2).collect::<Vec<_>>()),
                ("on", &imgs_on, pairs.iter().map(|p| p.3).collect::<Vec<_>>()),
            ] {
                for (seed, img) in ctx.seeds().into_iter().zip(imgs.iter()) {
                    out.write_ppm(&format!("images/{}/{label}_{state}_seed{seed:04}.ppm", slug(concept)), img)?;
                }
                cells.push(row![
                    concept.as_str(),
                    label,
                    state,
                    imgs.len(),
                    mean(&uses),
                    pairwise_diversity(imgs, &ctx.embedder)?
                ]);
            }
            let e_off: Vec<_> = imgs_off.iter().map(|im| ctx.embedder.embed(im)).collect();
            let e_on: Vec<_> = imgs_on.iter().map(|im| ctx.embedder.embed(im)).collect();
            fids.push(frechet(&GaussianMoments::from_samples(&e_on)?, &GaussianMoments::from_samples(&e_off)?)?);
        }
        rows.push(row![concept.as_str(), fids[0], fids[1]]);
    }
    out.write_csv("ablate_modifier.csv", &HEADER, &rows)?;
    out.write_csv("cells.csv", &CELLS_HEADER, &cells)?;
    out.finish(&ctx.config, "ablate-modifier")
}
