use super::{cached_low_mask, AmplificationSpec, CutoffRatio, FreeUSpec};
use crate::tensor::{fft2, ifft2, spectral_energy, FeatureMap};
use crate::{Result, Scalar};

fn scale_low_band<T: Scalar>(x: &FeatureMap<T>, factor: f64, cutoff: CutoffRatio) -> Result<FeatureMap<T>> {
    let mask = cached_low_mask(x.height(), x.width(), cutoff)?;
    let mut f = fft2(x)?;
    let plane = x.height() * x.width();
    let factor = T::of(factor);
    // f* = λ·f_L + f_H, applied in place since the bands are disjoint.
    for (i, z) in f.data_mut().iter_mut().enumerate() {
        if mask.bits()[i % plane] {
            *z = *z * factor;
        }
    }
    ifft2(&f)
}

/// Scales the low band of `x` by `spec.lambda`, leaves the high band as is,
/// and returns the real inverse transform.
pub fn amplify_low<T: Scalar>(x: &FeatureMap<T>, spec: &AmplificationSpec) -> Result<FeatureMap<T>> {
    spec.validate()?;
    scale_low_band(x, spec.lambda, spec.cutoff)
}

/// Uniform amplification of every frequency, done as a spatial scalar multiply.
pub fn amplify_uniform<T: Scalar>(x: &FeatureMap<T>, lambda: f64) -> Result<FeatureMap<T>> {
    x.scale(T::of(lambda))
}

/// Fraction of spectral energy outside the low band selected by `cutoff`.
/// Zero-energy input yields 0.
pub fn high_band_energy<T: Scalar>(x: &FeatureMap<T>, cutoff: CutoffRatio) -> Result<f64> {
    let f = fft2(x)?;
    let total = spectral_energy(&f);
    if total == 0.0 {
        return Ok(0.0);
    }
    let mask = cached_low_mask(x.height(), x.width(), cutoff)?;
    let plane = x.height() * x.width();
    let high: f64 = f
        .data()
        .iter()
        .enumerate()
        .filter(|(i, _)| !mask.bits()[i % plane])
        .map(|(_, z)| {
            let (re, im) = (z.re.widen(), z.im.widen());
            re * re + im * im
        })
        .sum();
    Ok((high / total).clamp(0.0, 1.0))
}

/// FreeU-style transform of an up block's inputs: the backbone is scaled
/// uniformly by `b`, the skip feature has its low band scaled by `s`.
pub fn freeu_transform<T: Scalar>(
    backbone: &FeatureMap<T>,
    skip: &FeatureMap<T>,
    spec: &FreeUSpec,
) -> Result<(FeatureMap<T>, FeatureMap<T>)> {
    spec.validate()?;
    let backbone = amplify_uniform(backbone, spec.b)?;
    let skip = scale_low_band(skip, spec.s, spec.skip_cutoff)?;
    Ok((backbone, skip))
}
