use std::path::Path;

use c3_core::denoiser::BlockId;
use c3_core::selection::BlockSelection;

use crate::context::RunContext;
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::output::{OutputDir, Series};
use crate::row;

pub const SUMMARY_HEADER: [&str; 5] = ["block", "K_l", "lambda_star", "baseline_use", "threshold"];

pub fn selection_file(block: BlockId) -> String {
    format!("selection_{}.json", block.name())
}

/// Per-block factor search; writes one selection file per block.
pub fn run(ctx: &RunContext) -> CliResult<RunManifest> {
    let selections = ctx.run_selection()?;
    let mut out = ctx.output("select")?;
    write_selections(&mut out, ctx, &selections)?;
    out.finish(&ctx.config, "select")
}

pub(crate) fn write_selections(out: &mut OutputDir, ctx: &RunContext, selections: &[BlockSelection]) -> CliResult<()> {
    let mut rows = Vec::new();
    for sel in selections {
        out.write_json(&selection_file(sel.block), sel)?;
        let base = sel.baseline_usability();
        rows.push(row![
            sel.block.name(),
            ctx.config.search.grid(sel.block).cap(),
            sel.lambda_star,
            base,
            ctx.config.search.epsilon * base
        ]);
    }
    out.write_csv("summary.csv", &SUMMARY_HEADER, &rows)?;
    if ctx.options.svg {
        let series: Vec<Series> = selections
            .iter()
            .map(|s| Series {
                label: s.block.name().into(),
                points: s.trace.iter().map(|p| (p.lambda, p.usability)).collect(),
            })
            .collect();
        out.write_svg("usability.svg", "mean usability per factor", "lambda", "usability", &series)?;
    }
    Ok(())
}

/// Reads the selection files written by `select` from `dir`. Blocks without
/// a file are left out; at least one must be present.
pub fn load_selections(dir: &Path) -> CliResult<Vec<BlockSelection>> {
    let mut out = Vec::new();
    for block in BlockId::TARGETS {
        let path = dir.join(selection_file(block));
        if !path.is_file() {
            continue;
        }
        let text = std::fs::read_to_string(&path)?;
        let sel: BlockSelection =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("bad selection {}: {e}", path.display())))?;
        if sel.block != block {
            return Err(CliError::Config(format!("{} holds block {}", path.display(), sel.block)));
        }
        out.push(sel);
    }
    if out.is_empty() {
        return Err(CliError::Config(format!("no selections in {}; run `select` first", dir.display())));
    }
    Ok(out)
}
