//! Low-band feature amplification for diffusion denoisers.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensor`]: feature maps, spectra, the radix-2 2D FFT, seeded RNG streams
//!   and the `C3TF` tensor file format.
//! * [`freq`]: low-frequency masks, band decomposition, low-band amplification
//!   and the FreeU-style baseline transform.
//! * [`denoiser`]: a deterministic block-structured toy denoiser with hook
//!   points, a DDIM sampler with classifier-free guidance and a latent decoder.
//! * [`selection`]: usability scoring, the constrained amplification-factor
//!   search and the multi-block combination rule.
//! * [`metrics`]: Fréchet distance, k-NN precision/recall, pairwise diversity
//!   and the Vendi score over a fixed image embedder.
//!
//! Numeric kernels are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below name the concrete instantiations the rest of the crate uses.

pub mod denoiser;
pub mod error;
pub mod freq;
pub mod image;
pub mod metrics;
pub mod scalar;
pub mod selection;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Single-precision feature map, the storage type used by the denoiser.
pub type FeatureMapF32 = tensor::FeatureMap<f32>;
/// Double-precision feature map.
pub type FeatureMapF64 = tensor::FeatureMap<f64>;
/// Spectrum of a single-precision feature map.
pub type SpectrumF32 = tensor::Spectrum<f32>;
/// Spectrum of a double-precision feature map.
pub type SpectrumF64 = tensor::Spectrum<f64>;
/// Gaussian moments in double precision (metric computations).
pub type MomentsF64 = metrics::GaussianMoments<f64>;
/// Embedding vector in double precision.
pub type FeatureVectorF64 = metrics::FeatureVector<f64>;
/// Symmetric eigendecomposition in double precision.
pub type SymmetricEigenF64 = metrics::linalg::SymmetricEigen<f64>;

pub use denoiser::{BlockId, ConditioningSpec, DenoiserModel, HookSet, ModelConfig, SamplerConfig};
pub use freq::{AmplificationSpec, CutoffRatio, FreeUSpec};
pub use image::Image;
