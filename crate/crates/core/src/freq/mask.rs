use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex;

use super::CutoffRatio;
use crate::tensor::{check_pow2, Spectrum};
use crate::{Error, Result, Scalar};

/// Binary low-frequency mask over an unshifted `height × width` spectrum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowFreqMask {
    height: usize,
    width: usize,
    bits: Vec<bool>,
}

/// Wrapped frequency index: `k` for `k <= n/2`, `k - n` above.
fn signed_frequency(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Marks `(u, v)` as low-band iff `max(|2·su/H|, |2·sv/W|) <= ρ` with `su`,
/// `sv` the signed wrapped frequencies.
pub fn build_low_mask(height: usize, width: usize, rho: CutoffRatio) -> Result<LowFreqMask> {
    check_pow2("height", height)?;
    check_pow2("width", width)?;
    let rho = rho.value();
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Domain(format!("cutoff ratio {rho} outside [0, 1]")));
    }
    let axis = |n: usize| -> Vec<bool> {
        (0..n)
            .map(|k| (2 * signed_frequency(k, n).unsigned_abs()) as f64 / n as f64 <= rho)
            .collect()
    };
    let rows = axis(height);
    let cols = axis(width);
    let mut bits = Vec::with_capacity(height * width);
    for &r in &rows {
        bits.extend(cols.iter().map(|&c| r && c));
    }
    Ok(LowFreqMask {
        height,
        width,
        bits,
    })
}

type MaskKey = (usize, usize, u64);

fn mask_cache() -> &'static RwLock<HashMap<MaskKey, Arc<LowFreqMask>>> {
    static CACHE: OnceLock<RwLock<HashMap<MaskKey, Arc<LowFreqMask>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Process-wide cached [`build_low_mask`].
pub fn cached_low_mask(height: usize, width: usize, rho: CutoffRatio) -> Result<Arc<LowFreqMask>> {
    let key = (height, width, rho.value().to_bits());
    if let Some(mask) = mask_cache().read().expect("mask cache poisoned").get(&key) {
        return Ok(Arc::clone(mask));
    }
    let mask = Arc::new(build_low_mask(height, width, rho)?);
    let mut cache = mask_cache().write().expect("mask cache poisoned");
    Ok(Arc::clone(cache.entry(key).or_insert(mask)))
}

impl LowFreqMask {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.width + v]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// True when every low-band bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.height == other.height
            && self.width == other.width
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    /// `bits[u][v] == bits[-u][-v]` for every coefficient.
    pub fn is_negation_symmetric(&self) -> bool {
        let (h, w) = (self.height, self.width);
        (0..h).all(|u| (0..w).all(|v| self.get(u, v) == self.get((h - u) % h, (w - v) % w)))
    }

    fn check_spectrum<T: Scalar>(&self, f: &Spectrum<T>) -> Result<()> {
        if (f.height(), f.width()) != (self.height, self.width) {
            return Err(Error::ShapeMismatch(format!(
                "mask {}x{} vs spectrum {}x{}",
                self.height,
                self.width,
                f.height(),
                f.width()
            )));
        }
        Ok(())
    }
}

/// Low and high bands of a spectrum; `low + high` is the source exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumPair<T = f32> {
    pub low: Spectrum<T>,
    pub high: Spectrum<T>,
}

/// Splits `f` by exact selection: each coefficient goes to exactly one band.
pub fn decompose<T: Scalar>(f: &Spectrum<T>, mask: &LowFreqMask) -> Result<SpectrumPair<T>> {
    mask.check_spectrum(f)?;
    let zero = Complex::new(T::zero(), T::zero());
    let plane = mask.height * mask.width;
    let mut low = Vec::with_capacity(f.data().len());
    let mut high = Vec::with_capacity(f.data().len());
    for (i, &z) in f.data().iter().enumerate() {
        if mask.bits[i % plane] {
            low.push(z);
            high.push(zero);
        } else {
            low.push(zero);
            high.push(z);
        }
    }
    let (c, h, w) = f.shape();
    Ok(SpectrumPair {
        low: Spectrum::new(c, h, w, low)?,
        high: Spectrum::new(c, h, w, high)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rho(v: f64) -> CutoffRatio {
        CutoffRatio::new(v).unwrap()
    }

    #[test]
    fn mask_counts_on_8x8() {
        assert_eq!(build_low_mask(8, 8, rho(0.0)).unwrap().count(), 1);
        assert!(build_low_mask(8, 8, rho(0.0)).unwrap().get(0, 0));
        assert_eq!(build_low_mask(8, 8, rho(1.0)).unwrap().count(), 64);
        let half = build_low_mask(8, 8, rho(0.5)).unwrap();
        assert_eq!(half.count(), 25);
        let axis = [0usize, 1, 2, 6, 7];
        for u in 0..8 {
            for v in 0..8 {
                assert_eq!(half.get(u, v), axis.contains(&u) && axis.contains(&v));
            }
        }
    }

    #[test]
    fn masks_are_symmetric_and_nested() {
        let rhos = [0.0, 0.1, 0.25, 0.5, 0.75, 1.0];
        for (h, w) in [(4, 4), (8, 16), (32, 32), (2, 8)] {
            let masks: Vec<_> = rhos.iter().map(|&r| build_low_mask(h, w, rho(r)).unwrap()).collect();
            for m in &masks {
                assert!(m.get(0, 0));
                assert!(m.is_negation_symmetric());
            }
            for pair in masks.windows(2) {
                assert!(pair[0].is_subset_of(&pair[1]));
            }
        }
    }

    #[test]
    fn invalid_cutoff_is_a_domain_error() {
        assert!(matches!(CutoffRatio::new(1.5), Err(Error::Domain(_))));
        assert!(matches!(CutoffRatio::new(-0.1), Err(Error::Domain(_))));
        assert!(CutoffRatio::new(f64::NAN).is_err());
    }

    #[test]
    fn cache_returns_equal_masks() {
        let a = cached_low_mask(16, 16, rho(0.25)).unwrap();
        let b = cached_low_mask(16, 16, rho(0.25)).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(*a, build_low_mask(16, 16, rho(0.25)).unwrap());
    }

    #[test]
    fn decompose_rejects_mismatched_dims() {
        let f = Spectrum::<f32>::zeros(1, 8, 8).unwrap();
        let m = build_low_mask(4, 4, rho(0.5)).unwrap();
        assert!(matches!(decompose(&f, &m), Err(Error::ShapeMismatch(_))));
    }
}
