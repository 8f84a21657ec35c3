use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use super::FeatureVector;
use crate::image::{box_downsample, Image};
use crate::tensor::{stream_id, RngStream};

pub const DEFAULT_EMBED_SEED: u64 = 0xE3BE_D5EE;
/// Thumbnail sizes; each is capped at the image size.
pub const EMBED_SCALES: [usize; 3] = [32, 16, 8];
const DIMS_PER_SCALE: usize = 32;
pub const EMBED_DIM: usize = DIMS_PER_SCALE * EMBED_SCALES.len();

/// Fixed multi-scale random-projection embedder.
///
/// Each scale box-downsamples the image, centres pixels at 0.5, and projects
/// the flattened RGB thumbnail to 32 dimensions with a seeded Gaussian
/// matrix. The three blocks are concatenated and L2-normalized; a uniform
/// mid-gray image, whose projection is zero, maps to the first basis vector.
#[derive(Clone, Debug)]
pub struct Embedder {
    seed: u64,
    projections: Arc<RwLock<BTreeMap<usize, Arc<Vec<f64>>>>>,
}

impl Default for Embedder {
    fn default() -> Self {
        Self::new(DEFAULT_EMBED_SEED)
    }
}

impl Embedder {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            projections: Arc::default(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn projection(&self, size: usize) -> Arc<Vec<f64>> {
        if let Some(p) = self.projections.read().unwrap().get(&size) {
            return Arc::clone(p);
        }
        let inputs = 3 * size * size;
        let mut rng = RngStream::new(self.seed, stream_id(&format!("embed/{size}")));
        let p = Arc::new(rng.normals(DIMS_PER_SCALE * inputs, 1.0 / (inputs as f64).sqrt()));
        self.projections
            .write()
            .unwrap()
            .entry(size)
            .or_insert(p)
            .clone()
    }

    pub fn embed(&self, image: &Image) -> FeatureVector<f64> {
        let n = image.size();
        let mut out = Vec::with_capacity(EMBED_DIM);
        for &scale in &EMBED_SCALES {
            let s = scale.min(n);
            let mut thumb = Vec::with_capacity(3 * s * s);
            for c in 0..3 {
                let plane: Vec<f64> = image.pixels().channel(c).iter().map(|&v| v as f64 - 0.5).collect();
                thumb.extend(box_downsample(&plane, n, s));
            }
            let proj = self.projection(s);
            let len = thumb.len();
            out.extend((0..DIMS_PER_SCALE).map(|r| {
                proj[r * len..(r + 1) * len]
                    .iter()
                    .zip(&thumb)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
            }));
        }
        FeatureVector::normalized(out).unwrap_or_else(|_| {
            let mut e = vec![0.0; EMBED_DIM];
            e[0] = 1.0;
            FeatureVector::normalized(e).expect("basis vector")
        })
    }
}
