//! One module per subcommand. Each `run` writes into `<out_dir>/<name>/`
//! and returns the manifest.

pub mod ablate_blocks;
pub mod ablate_frequency;
pub mod ablate_modifier;
pub mod combine;
pub mod freeu_compare;
pub mod gen;
pub mod quant;
pub mod select;
pub mod sweep;
pub mod template_sweep;

use c3_core::denoiser::SampleOutput;

use crate::context::RunContext;
use crate::error::CliResult;
use crate::output::OutputDir;

/// File-name-safe form of a concept or label.
pub fn slug(s: &str) -> String {
    let out: String = s
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c.to_ascii_lowercase() } else { '_' })
        .collect();
    if out.is_empty() {
        "_".into()
    } else {
        out
    }
}

/// Writes `sample` as `<stem>.ppm`, plus `<stem>.c3tf` with `--dump-latents`.
/// Returns the image path.
pub(crate) fn write_sample(out: &mut OutputDir, ctx: &RunContext, stem: &str, sample: &SampleOutput) -> CliResult<String> {
    let file = format!("{stem}.ppm");
    out.write_ppm(&file, &sample.image)?;
    if ctx.options.dump_latents {
        out.write_tensor(&format!("{stem}.c3tf"), &sample.latent)?;
    }
    Ok(file)
}

pub(crate) fn first_concept(ctx: &RunContext) -> &str {
    &ctx.config.concepts[0]
}
