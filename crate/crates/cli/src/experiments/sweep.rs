use c3_core::denoiser::{HookSet, SamplerConfig};
use c3_core::freq::CutoffRatio;
use c3_core::selection::{select_lambda, BlockSelection, SearchConfig};

use super::first_concept;
use crate::config::SweepParam;
use crate::context::{mean, RunContext};
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::output::{Cell, Series};
use crate::row;

pub const HEADER: [&str; 6] = ["param", "value", "seed", "usability", "distance", "hbe"];
pub const SELECTIONS_HEADER: [&str; 3] = ["epsilon", "block", "lambda_star"];

struct Point {
    label: Cell,
    x: f64,
    hooks: HookSet,
    sampler: SamplerConfig,
}

/// Re-selects every block at `epsilon` from full-trace selections.
pub fn reselect(traces: &[BlockSelection], search: &SearchConfig, epsilon: f64) -> CliResult<Vec<BlockSelection>> {
    traces
        .iter()
        .map(|t| {
            let grid = search.grid(t.block);
            let sel = select_lambda(t.block, &grid, epsilon, false, |lambda| {
                t.trace
                    .iter()
                    .find(|p| p.lambda == lambda)
                    .map(|p| p.usability)
                    .ok_or_else(|| c3_core::Error::Domain(format!("factor {lambda} missing from trace")))
            })
            .map_err(|e| CliError::Config(e.to_string()))?;
            Ok(sel)
        })
        .collect()
}

fn full_traces(ctx: &RunContext) -> CliResult<(SearchConfig, Vec<BlockSelection>)> {
    let search = SearchConfig {
        full_trace: true,
        ..ctx.config.search.clone()
    };
    let traces = ctx.run_selection_with(&search)?;
    Ok((search, traces))
}

/// One-parameter sweep on the first concept.
pub fn run(ctx: &RunContext) -> CliResult<RunManifest> {
    let p = &ctx.config.experiments.sweep;
    let param = p.param;
    let values = p.resolved_values();
    let sampler = ctx.config.sampler.clone();
    let mut selection_rows = Vec::new();
    let points: Vec<Point> = match param {
        SweepParam::Cutoff => values
            .iter()
            .map(|&v| {
                let rho = CutoffRatio::new(v).map_err(|e| CliError::Config(e.to_string()))?;
                Ok(Point {
                    label: Cell::Num(v),
                    x: v,
                    hooks: ctx.single_block_hooks(p.block, p.lambda, rho)?,
                    sampler: sampler.clone(),
                })
            })
            .collect::<CliResult<_>>()?,
        SweepParam::Epsilon => {
            let (search, traces) = full_traces(ctx)?;
            let mut pts = Vec::new();
            for &eps in &values {
                if !(0.0..=1.0).contains(&eps) {
                    return Err(CliError::Config(format!("epsilon {eps} outside [0, 1]")));
                }
                let sels = reselect(&traces, &search, eps)?;
                for s in &sels {
                    selection_rows.push(row![eps, s.block.name(), s.lambda_star]);
                }
                pts.push(Point {
                    label: Cell::Num(eps),
                    x: eps,
                    hooks: ctx.profile_hooks(ctx.combine(&sels)?),
                    sampler: sampler.clone(),
                });
            }
            pts
        }
        SweepParam::ScaleSum => {
            let sels = ctx.run_selection()?;
            values
                .iter()
                .map(|&s| {
                    Ok(Point {
                        label: Cell::Num(s),
                        x: s,
                        hooks: ctx.profile_hooks(ctx.combine_with_sum(&sels, s)?),
                        sampler: sampler.clone(),
                    })
                })
                .collect::<CliResult<_>>()?
        }
        SweepParam::StepRange => {
            let base = ctx.amplified_hooks()?;
            p.resolved_step_ranges(sampler.steps)
                .into_iter()
                .enumerate()
                .map(|(i, r)| {
                    let hooks = base.clone().with_step_range(Some(r));
                    hooks.validate(sampler.steps).map_err(|e| CliError::Config(e.to_string()))?;
                    Ok(Point {
                        label: Cell::Text(format!("{}-{}", r.start, r.end)),
                        x: i as f64,
                        hooks,
                        sampler: sampler.clone(),
                    })
                })
                .collect::<CliResult<_>>()?
        }
        SweepParam::Cfg => {
            let hooks = ctx.amplified_hooks()?;
            values
                .iter()
                .map(|&g| {
                    let s = SamplerConfig {
                        cfg_scale: g,
                        ..sampler.clone()
                    };
                    s.validate().map_err(|e| CliError::Config(e.to_string()))?;
                    Ok(Point {
                        label: Cell::Num(g),
                        x: g,
                        hooks: hooks.clone(),
                        sampler: s,
                    })
                })
                .collect::<CliResult<_>>()?
        }
    };
    if points.is_empty() {
        return Err(CliError::Config(format!("no values to sweep for {}", param.name())));
    }

    let cond = ctx.conditioning(first_concept(ctx));
    let per_seed = ctx.par_map(&ctx.seeds(), |&seed| {
        let shared_base = if param == SweepParam::Cfg {
            None
        } else {
            Some(ctx.model.sample(&sampler, &cond, seed, &HookSet::none())?.image)
        };
        points
            .iter()
            .map(|pt| {
                let base = match &shared_base {
                    Some(b) => b.clone(),
                    None => ctx.model.sample(&pt.sampler, &cond, seed, &HookSet::none())?.image,
                };
                let img = ctx.model.sample(&pt.sampler, &cond, seed, &pt.hooks)?.image;
                let usability = ctx.score(&img, &cond, &base)?.usability();
                Ok((usability, ctx.distance(&img, &base), ctx.hbe(&img)?))
            })
            .collect::<CliResult<Vec<_>>>()
    })?;

    let mut out = ctx.output("sweep")?;
    let mut rows = Vec::new();
    let mut use_series = Series { label: "usability".into(), points: Vec::new() };
    let mut dist_series = Series { label: "distance".into(), points: Vec::new() };
    for (i, pt) in points.iter().enumerate() {
        let (mut uses, mut dists) = (Vec::new(), Vec::new());
        for (seed, results) in ctx.seeds().into_iter().zip(&per_seed) {
            let (u, d, h) = results[i];
            rows.push(vec![Cell::from(param.name()), pt.label.clone(), Cell::from(seed), Cell::Num(u), Cell::Num(d), Cell::Num(h)]);
            uses.push(u);
            dists.push(d);
        }
        use_series.points.push((pt.x, mean(&uses)));
        dist_series.points.push((pt.x, mean(&dists)));
    }
    out.write_csv("sweep.csv", &HEADER, &rows)?;
    if param == SweepParam::Epsilon {
        out.write_csv("selections.csv", &SELECTIONS_HEADER, &selection_rows)?;
    }
    if ctx.options.svg {
        out.write_svg("usability.svg", &format!("{} sweep", param.name()), param.name(), "mean usability", &[use_series])?;
        out.write_svg("distance.svg", &format!("{} sweep", param.name()), param.name(), "mean distance", &[dist_series])?;
    }
    out.finish(&ctx.config, "sweep")
}
