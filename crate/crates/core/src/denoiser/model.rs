use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BlockId, HookMode, HookSet, ModelConfig};
use crate::freq::{amplify_low, freeu_transform};
use crate::image::Image;
use crate::tensor::{load_raw, save_raw, FeatureMap, RawTensor, RngStream};
use crate::{Error, Result};

/// Width of the sinusoidal timestep embedding.
pub const TIME_EMBED_DIM: usize = 32;

const WEIGHT_STREAM: u64 = 0x5745_4947;
const TIME_PROJ_STD: f64 = 0.5;
const COND_PROJ_STD: f64 = 1.0;

/// Decoder calibration: `pixel = DECODE_MID + DECODE_SCALE · (W · latent)`.
const DECODE_MID: f32 = 0.5;
const DECODE_SCALE: f32 = 0.25;

#[derive(Clone, Debug)]
struct ConvBlock {
    in_channels: usize,
    out_channels: usize,
    stride: usize,
    upsample: bool,
    /// `[out][in][3][3]`
    weight: Vec<f32>,
    /// `[out][TIME_EMBED_DIM]`
    time_proj: Vec<f32>,
    /// `[out][cond_dim]`
    cond_proj: Vec<f32>,
}

impl ConvBlock {
    fn random(
        rng: &mut RngStream,
        in_channels: usize,
        out_channels: usize,
        cond_dim: usize,
        stride: usize,
        upsample: bool,
    ) -> Self {
        let fan_in = in_channels * 9;
        Self {
            in_channels,
            out_channels,
            stride,
            upsample,
            weight: rng.normals_f32(out_channels * fan_in, (2.0 / fan_in as f64).sqrt()),
            time_proj: rng.normals_f32(
                out_channels * TIME_EMBED_DIM,
                TIME_PROJ_STD / (TIME_EMBED_DIM as f64).sqrt(),
            ),
            cond_proj: rng.normals_f32(out_channels * cond_dim, COND_PROJ_STD),
        }
    }

    fn bias(&self, temb: &[f32], cond: &[f32]) -> Vec<f32> {
        let dot = |row: &[f32], v: &[f32]| -> f32 { row.iter().zip(v).map(|(a, b)| a * b).sum() };
        (0..self.out_channels)
            .map(|o| {
                dot(&self.time_proj[o * temb.len()..(o + 1) * temb.len()], temb)
                    + dot(&self.cond_proj[o * cond.len()..(o + 1) * cond.len()], cond)
            })
            .collect()
    }

    /// 3×3 zero-padded convolution, per-channel bias, SiLU, optional 2× nearest upsample.
    fn apply(&self, x: &FeatureMap<f32>, temb: &[f32], cond: &[f32]) -> Result<FeatureMap<f32>> {
        let (c, h, w) = x.shape();
        if c != self.in_channels {
            return Err(Error::ShapeMismatch(format!(
                "block expects {} input channels, got {c}",
                self.in_channels
            )));
        }
        let mut out = conv3x3(x.data(), c, h, w, &self.weight, self.out_channels, self.stride);
        let (oh, ow) = (h / self.stride, w / self.stride);
        let plane = oh * ow;
        for (o, b) in self.bias(temb, cond).into_iter().enumerate() {
            for v in &mut out[o * plane..(o + 1) * plane] {
                let z = *v + b;
                *v = z / (1.0 + (-z).exp());
            }
        }
        if self.upsample {
            let (uh, uw) = (oh * 2, ow * 2);
            let mut up = Vec::with_capacity(out.len() * 4);
            for o in 0..self.out_channels {
                let src = &out[o * plane..(o + 1) * plane];
                for y in 0..uh {
                    for x in 0..uw {
                        up.push(src[(y / 2) * ow + x / 2]);
                    }
                }
            }
            FeatureMap::new(self.out_channels, uh, uw, up)
        } else {
            FeatureMap::new(self.out_channels, oh, ow, out)
        }
    }

    fn params(&self, cond_dim: usize) -> [(&'static str, Vec<usize>, &[f32]); 3] {
        [
            ("conv", vec![self.out_channels, self.in_channels, 3, 3], &self.weight),
            ("time", vec![self.out_channels, TIME_EMBED_DIM], &self.time_proj),
            ("cond", vec![self.out_channels, cond_dim], &self.cond_proj),
        ]
    }
}

fn conv3x3(
    input: &[f32],
    in_c: usize,
    h: usize,
    w: usize,
    weight: &[f32],
    out_c: usize,
    stride: usize,
) -> Vec<f32> {
    let (oh, ow) = (h / stride, w / stride);
    let mut out = vec![0.0f32; out_c * oh * ow];
    for (o, dst) in out.chunks_exact_mut(oh * ow).enumerate() {
        for i in 0..in_c {
            let src = &input[i * h * w..(i + 1) * h * w];
            let kernel = &weight[(o * in_c + i) * 9..(o * in_c + i + 1) * 9];
            for ky in 0..3 {
                for kx in 0..3 {
                    let wv = kernel[ky * 3 + kx];
                    // Output columns whose input column `ox·stride + kx − 1` is in bounds.
                    let ox_lo = if kx == 0 { 1 } else { 0 };
                    let ox_hi = (w + 1 - kx).div_ceil(stride);
                    let ox_hi = ox_hi.min(ow);
                    for oy in 0..oh {
                        let iy = oy * stride + ky;
                        if iy == 0 || iy > h {
                            continue;
                        }
                        let row = &src[(iy - 1) * w..iy * w];
                        let drow = &mut dst[oy * ow..(oy + 1) * ow];
                        for ox in ox_lo..ox_hi {
                            drow[ox] += wv * row[ox * stride + kx - 1];
                        }
                    }
                }
            }
        }
    }
    out
}

fn time_embedding(timestep: usize) -> Vec<f32> {
    let half = TIME_EMBED_DIM / 2;
    let mut out = Vec::with_capacity(TIME_EMBED_DIM);
    for i in 0..half {
        let freq = (-(10_000f64.ln()) * i as f64 / half as f64).exp();
        out.push((timestep as f64 * freq).sin() as f32);
    }
    for i in 0..half {
        let freq = (-(10_000f64.ln()) * i as f64 / half as f64).exp();
        out.push((timestep as f64 * freq).cos() as f32);
    }
    out
}

/// Position of one forward call within a sampling run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepContext {
    /// Index among the sampled steps, `0..T`.
    pub index: usize,
    /// Virtual training timestep, `0..1000`.
    pub timestep: usize,
    pub alpha_bar: f64,
}

#[derive(Clone, Debug)]
pub struct ForwardOutput {
    pub eps: FeatureMap<f32>,
    /// Post-hook block outputs, when capture was requested.
    pub captured: Option<BTreeMap<BlockId, FeatureMap<f32>>>,
}

/// Immutable toy denoiser; safe to share across threads.
#[derive(Clone, Debug)]
pub struct DenoiserModel {
    config: ModelConfig,
    blocks: Vec<ConvBlock>,
    /// `[latent_channels][widths[0]]`, 1×1 output head.
    head: Vec<f32>,
    /// `[3][latent_channels]`
    decoder: Vec<f32>,
}

#[derive(Serialize, Deserialize)]
struct WeightManifest {
    config: ModelConfig,
    parameters: Vec<ParameterEntry>,
}

#[derive(Serialize, Deserialize)]
struct ParameterEntry {
    name: String,
    file: String,
    dims: Vec<usize>,
}

impl DenoiserModel {
    /// Builds the model with weights drawn from `RngStream(weight_seed)`.
    pub fn build(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = RngStream::new(config.weight_seed, WEIGHT_STREAM);
        let [w0, w1, w2, w3] = config.widths;
        let cd = config.cond_dim;
        let blocks = vec![
            ConvBlock::random(&mut rng, config.latent_channels, w0, cd, 2, false),
            ConvBlock::random(&mut rng, w0, w1, cd, 2, false),
            ConvBlock::random(&mut rng, w1, w2, cd, 2, false),
            ConvBlock::random(&mut rng, w2, w3, cd, 1, false),
            ConvBlock::random(&mut rng, w3 + w2, w1, cd, 1, true),
            ConvBlock::random(&mut rng, w1 + w1, w0, cd, 1, true),
            ConvBlock::random(&mut rng, w0 + w0, w0, cd, 1, true),
        ];
        let head = rng.normals_f32(config.latent_channels * w0, (1.0 / w0 as f64).sqrt());
        let decoder = rng.normals_f32(3 * config.latent_channels, (1.0 / config.latent_channels as f64).sqrt());
        Ok(Self {
            config,
            blocks,
            head,
            decoder,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    fn block(&self, id: BlockId) -> &ConvBlock {
        &self.blocks[id.index()]
    }

    fn hooked(
        &self,
        id: BlockId,
        x: FeatureMap<f32>,
        step: &StepContext,
        hooks: &HookSet,
    ) -> Result<FeatureMap<f32>> {
        if hooks.mode != HookMode::C3 || !hooks.active_at(step.index) {
            return Ok(x);
        }
        match hooks.profile.get(id) {
            Some(spec) => amplify_low(&x, &spec),
            None => Ok(x),
        }
    }

    /// One denoiser evaluation at `step`, returning the noise prediction.
    ///
    /// The prediction is parameterized residually, `eps = √(1−ᾱ)·x + √ᾱ·h`,
    /// with `h` the network output, so the implied clean latent
    /// `√ᾱ·x − √(1−ᾱ)·h` stays bounded for an untrained network.
    pub fn forward(
        &self,
        latent: &FeatureMap<f32>,
        step: &StepContext,
        cond: &[f32],
        hooks: &HookSet,
        capture: bool,
    ) -> Result<ForwardOutput> {
        let cfg = &self.config;
        if latent.shape() != (cfg.latent_channels, cfg.latent_size, cfg.latent_size) {
            return Err(Error::ShapeMismatch(format!(
                "latent {:?} does not match config",
                latent.shape()
            )));
        }
        if cond.len() != cfg.cond_dim {
            return Err(Error::ShapeMismatch(format!(
                "conditioning has {} dims, model expects {}",
                cond.len(),
                cfg.cond_dim
            )));
        }
        let temb = time_embedding(step.timestep);
        let mut captured = capture.then(BTreeMap::new);
        let mut record = |id: BlockId, x: &FeatureMap<f32>| {
            if let Some(map) = captured.as_mut() {
                map.insert(id, x.clone());
            }
        };

        let mut skips = Vec::with_capacity(3);
        let mut x = latent.clone();
        for id in [BlockId::Down0, BlockId::Down1, BlockId::Down2] {
            let raw = self.block(id).apply(&x, &temb, cond)?;
            let out = self.hooked(id, raw.clone(), step, hooks)?;
            record(id, &out);
            skips.push(if hooks.amplify_skips { out.clone() } else { raw });
            x = out;
        }
        let mid = self.block(BlockId::Mid).apply(&x, &temb, cond)?;
        x = self.hooked(BlockId::Mid, mid, step, hooks)?;
        record(BlockId::Mid, &x);

        let freeu_active = hooks.mode == HookMode::FreeU && hooks.active_at(step.index);
        for id in [BlockId::Up0, BlockId::Up1, BlockId::Up2] {
            let skip = skips.pop().expect("one skip per down block");
            let (backbone, skip) = if freeu_active {
                freeu_transform(&x, &skip, &hooks.freeu)?
            } else {
                (x, skip)
            };
            let raw = self.block(id).apply(&backbone.concat_channels(&skip)?, &temb, cond)?;
            x = self.hooked(id, raw, step, hooks)?;
            record(id, &x);
        }

        let head = self.apply_head(&x)?;
        let a = step.alpha_bar.sqrt() as f32;
        let b = (1.0 - step.alpha_bar).sqrt() as f32;
        let eps = FeatureMap::new(
            cfg.latent_channels,
            cfg.latent_size,
            cfg.latent_size,
            latent
                .data()
                .iter()
                .zip(head.data())
                .map(|(xv, hv)| b * xv + a * hv)
                .collect(),
        )?;
        Ok(ForwardOutput { eps, captured })
    }

    fn apply_head(&self, x: &FeatureMap<f32>) -> Result<FeatureMap<f32>> {
        let (c, h, w) = x.shape();
        let plane = h * w;
        let lc = self.config.latent_channels;
        let mut out = vec![0.0f32; lc * plane];
        for o in 0..lc {
            let dst = &mut out[o * plane..(o + 1) * plane];
            for i in 0..c {
                let wv = self.head[o * c + i];
                for (d, s) in dst.iter_mut().zip(x.channel(i)) {
                    *d += wv * s;
                }
            }
        }
        FeatureMap::new(lc, h, w, out)
    }

    /// Decoder output before clamping: `mid + scale · (W · latent)` per pixel.
    pub fn decode_linear(&self, latent: &FeatureMap<f32>) -> Result<FeatureMap<f32>> {
        let (c, h, w) = latent.shape();
        if c != self.config.latent_channels {
            return Err(Error::ShapeMismatch(format!(
                "latent has {c} channels, decoder expects {}",
                self.config.latent_channels
            )));
        }
        let plane = h * w;
        let mut out = vec![0.0f32; 3 * plane];
        for o in 0..3 {
            let dst = &mut out[o * plane..(o + 1) * plane];
            for i in 0..c {
                let wv = self.decoder[o * c + i];
                for (d, s) in dst.iter_mut().zip(latent.channel(i)) {
                    *d += wv * s;
                }
            }
            for d in dst.iter_mut() {
                *d = DECODE_MID + DECODE_SCALE * *d;
            }
        }
        FeatureMap::new(3, h, w, out)
    }

    /// Latent to RGB image in `[0, 1]`.
    pub fn decode(&self, latent: &FeatureMap<f32>) -> Result<Image> {
        Image::from_map(self.decode_linear(latent)?)
    }

    /// Writes every parameter as a `C3TF` file plus a `manifest.json`.
    pub fn export(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let mut parameters = Vec::new();
        for (name, dims, data) in self.named_parameters() {
            let file = format!("{name}.c3tf");
            save_raw(dir.join(&file), &RawTensor::new(dims.clone(), data.to_vec())?)?;
            parameters.push(ParameterEntry { name, file, dims });
        }
        let manifest = WeightManifest {
            config: self.config.clone(),
            parameters,
        };
        fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }

    /// Loads weights written by [`export`](Self::export).
    pub fn import(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let manifest: WeightManifest = serde_json::from_slice(&fs::read(dir.join("manifest.json"))?)?;
        let mut model = Self::build(manifest.config)?;
        let mut by_name: BTreeMap<String, RawTensor> = BTreeMap::new();
        for entry in manifest.parameters {
            let raw = load_raw(dir.join(&entry.file))?;
            if raw.dims != entry.dims {
                return Err(Error::ShapeMismatch(format!(
                    "{}: manifest dims {:?}, file dims {:?}",
                    entry.name, entry.dims, raw.dims
                )));
            }
            by_name.insert(entry.name, raw);
        }
        let expected: Vec<(String, Vec<usize>)> = model
            .named_parameters()
            .into_iter()
            .map(|(n, d, _)| (n, d))
            .collect();
        for (name, dims) in expected {
            let raw = by_name
                .remove(&name)
                .ok_or_else(|| Error::Dimension(format!("missing parameter {name}")))?;
            if raw.dims != dims {
                return Err(Error::ShapeMismatch(format!(
                    "{name}: expected {dims:?}, found {:?}",
                    raw.dims
                )));
            }
            *model.parameter_mut(&name) = raw.data;
        }
        Ok(model)
    }

    fn named_parameters(&self) -> Vec<(String, Vec<usize>, &[f32])> {
        let mut out = Vec::new();
        for id in BlockId::ALL {
            for (kind, dims, data) in self.block(id).params(self.config.cond_dim) {
                out.push((format!("{}.{kind}", id.name().to_lowercase()), dims, data));
            }
        }
        out.push((
            "head".into(),
            vec![self.config.latent_channels, self.config.widths[0]],
            &self.head,
        ));
        out.push(("decoder".into(), vec![3, self.config.latent_channels], &self.decoder));
        out
    }

    fn parameter_mut(&mut self, name: &str) -> &mut Vec<f32> {
        match name {
            "head" => &mut self.head,
            "decoder" => &mut self.decoder,
            _ => {
                let (block, kind) = name.split_once('.').expect("block.kind parameter name");
                let id: BlockId = block.parse().expect("known block");
                let b = &mut self.blocks[id.index()];
                match kind {
                    "conv" => &mut b.weight,
                    "time" => &mut b.time_proj,
                    _ => &mut b.cond_proj,
                }
            }
        }
    }
}
