//! Frequency-domain feature manipulation.
//!
//! A block output `x` is transformed with [`fft2`](crate::tensor::fft2), split
//! into a low band (inside a square mask centred on DC) and a high band, the low
//! band is scaled by `λ`, and the result is transformed back. The mask is
//! symmetric under frequency negation, so the amplified spectrum stays
//! Hermitian and the inverse transform is real.

mod amplify;
mod mask;

pub use amplify::{amplify_low, amplify_uniform, freeu_transform, high_band_energy};
pub use mask::{build_low_mask, cached_low_mask, decompose, LowFreqMask, SpectrumPair};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Normalized Chebyshev frequency radius of the low band: `0` keeps only DC,
/// `1` keeps every coefficient.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct CutoffRatio(f64);

impl CutoffRatio {
    pub const DC_ONLY: Self = Self(0.0);
    pub const ALL_PASS: Self = Self(1.0);

    pub fn new(rho: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::Domain(format!("cutoff ratio {rho} outside [0, 1]")));
        }
        Ok(Self(rho))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for CutoffRatio {
    fn default() -> Self {
        Self(0.25)
    }
}

impl TryFrom<f64> for CutoffRatio {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<CutoffRatio> for f64 {
    fn from(c: CutoffRatio) -> f64 {
        c.0
    }
}

/// Low-band amplification factor and cutoff for one block.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplificationSpec {
    pub lambda: f64,
    #[serde(default)]
    pub cutoff: CutoffRatio,
}

impl AmplificationSpec {
    pub fn new(lambda: f64, cutoff: CutoffRatio) -> Result<Self> {
        let spec = Self { lambda, cutoff };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(Error::Domain(format!(
                "amplification factor {} must be finite and >= 0",
                self.lambda
            )));
        }
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.lambda == 1.0
    }
}

/// FreeU-style baseline: uniform backbone scale `b`, low-band skip scale `s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeUSpec {
    pub b: f64,
    pub s: f64,
    #[serde(default)]
    pub skip_cutoff: CutoffRatio,
}

impl FreeUSpec {
    pub fn new(b: f64, s: f64, skip_cutoff: CutoffRatio) -> Result<Self> {
        let spec = Self { b, s, skip_cutoff };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("b", self.b), ("s", self.s)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Domain(format!("FreeU {name} = {v} must be finite and > 0")));
            }
        }
        Ok(())
    }
}

impl Default for FreeUSpec {
    fn default() -> Self {
        Self {
            b: 1.0,
            s: 1.0,
            skip_cutoff: CutoffRatio::default(),
        }
    }
}
