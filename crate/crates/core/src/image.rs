use crate::tensor::FeatureMap;
use crate::{Error, Result};

/// RGB image, channel-major, values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    pixels: FeatureMap<f32>,
}

impl Image {
    /// Wraps a 3-channel square map, clamping every value into `[0, 1]`.
    pub fn from_map(map: FeatureMap<f32>) -> Result<Self> {
        let (c, h, w) = map.shape();
        if c != 3 || h != w {
            return Err(Error::ShapeMismatch(format!(
                "images are 3xSxS, got {c}x{h}x{w}"
            )));
        }
        Ok(Self {
            pixels: map.map(|v| v.clamp(0.0, 1.0))?,
        })
    }

    pub fn from_fn(size: usize, f: impl FnMut(usize, usize, usize) -> f32) -> Result<Self> {
        Self::from_map(FeatureMap::from_fn(3, size, size, f)?)
    }

    pub fn filled(size: usize, rgb: [f32; 3]) -> Result<Self> {
        Self::from_fn(size, |c, _, _| rgb[c])
    }

    pub fn size(&self) -> usize {
        self.pixels.height()
    }

    pub fn pixels(&self) -> &FeatureMap<f32> {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, c: usize, y: usize, x: usize) -> f32 {
        self.pixels.get(c, y, x)
    }

    /// Rec. 601 luma, row-major.
    pub fn luminance(&self) -> Vec<f64> {
        let (r, g, b) = (
            self.pixels.channel(0),
            self.pixels.channel(1),
            self.pixels.channel(2),
        );
        r.iter()
            .zip(g)
            .zip(b)
            .map(|((&r, &g), &b)| 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64)
            .collect()
    }

    /// Inverts every channel value, `v -> 1 - v`.
    pub fn inverted(&self) -> Self {
        Self {
            pixels: self.pixels.map(|v| 1.0 - v).expect("inversion stays finite"),
        }
    }

    /// Mean absolute per-value difference.
    pub fn mean_abs_diff(&self, other: &Self) -> f64 {
        self.pixels
            .data()
            .iter()
            .zip(other.pixels.data())
            .map(|(a, b)| (*a as f64 - *b as f64).abs())
            .sum::<f64>()
            / self.pixels.len() as f64
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.pixels.max_abs_diff(&other.pixels)
    }

    /// 8-bit quantization, `round(255·v)`, channel-interleaved for PPM output.
    pub fn to_rgb8(&self) -> Vec<u8> {
        let n = self.size();
        let mut out = Vec::with_capacity(3 * n * n);
        for y in 0..n {
            for x in 0..n {
                for c in 0..3 {
                    out.push((255.0 * self.get(c, y, x)).round() as u8);
                }
            }
        }
        out
    }
}

/// Box-downsamples a row-major `size × size` plane to `target × target`.
/// `target` must divide `size`.
pub(crate) fn box_downsample(plane: &[f64], size: usize, target: usize) -> Vec<f64> {
    let f = size / target;
    let inv = 1.0 / (f * f) as f64;
    let mut out = vec![0.0; target * target];
    for y in 0..size {
        for x in 0..size {
            out[(y / f) * target + x / f] += plane[y * size + x];
        }
    }
    out.iter_mut().for_each(|v| *v *= inv);
    out
}
