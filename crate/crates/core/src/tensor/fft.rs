use std::f64::consts::PI;

use num_complex::Complex;

use super::{check_pow2, FeatureMap, Spectrum};
use crate::{Error, Result, Scalar};

/// Largest imaginary residual `ifft2` accepts, relative to the RMS of the real part.
pub const IMAG_RESIDUAL_TOLERANCE: f64 = 1e-4;

/// In-place iterative radix-2 FFT. The forward transform is unnormalized and
/// the inverse is not scaled either; callers divide by `n`.
pub fn fft_in_place(buf: &mut [Complex<f64>], inverse: bool) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    debug_assert!(n.is_power_of_two());

    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }

    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let twiddles: Vec<Complex<f64>> = (0..half)
            .map(|k| {
                let (s, c) = (sign * 2.0 * PI * k as f64 / len as f64).sin_cos();
                Complex::new(c, s)
            })
            .collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let a = buf[start + k];
                let b = buf[start + k + half] * twiddles[k];
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

fn transform_plane(plane: &mut [Complex<f64>], height: usize, width: usize, inverse: bool) {
    for row in plane.chunks_exact_mut(width) {
        fft_in_place(row, inverse);
    }
    let mut column = vec![Complex::new(0.0, 0.0); height];
    for x in 0..width {
        for y in 0..height {
            column[y] = plane[y * width + x];
        }
        fft_in_place(&mut column, inverse);
        for y in 0..height {
            plane[y * width + x] = column[y];
        }
    }
}

/// Per-channel 2D DFT over the spatial axes.
pub fn fft2<T: Scalar>(x: &FeatureMap<T>) -> Result<Spectrum<T>> {
    let (channels, height, width) = x.shape();
    check_pow2("height", height)?;
    check_pow2("width", width)?;
    let plane_len = height * width;
    let mut out = Vec::with_capacity(x.len());
    let mut plane = vec![Complex::new(0.0, 0.0); plane_len];
    for c in 0..channels {
        for (dst, src) in plane.iter_mut().zip(x.channel(c)) {
            *dst = Complex::new(src.widen(), 0.0);
        }
        transform_plane(&mut plane, height, width, false);
        out.extend(plane.iter().map(|z| Complex::new(T::of(z.re), T::of(z.im))));
    }
    Spectrum::new(channels, height, width, out)
}

/// Inverse 2D DFT with `1/(H·W)` normalization, keeping the real part.
///
/// Fails with [`Error::SymmetryViolation`] when the discarded imaginary part
/// exceeds [`IMAG_RESIDUAL_TOLERANCE`] times the RMS of the real part.
pub fn ifft2<T: Scalar>(f: &Spectrum<T>) -> Result<FeatureMap<T>> {
    let (channels, height, width) = f.shape();
    check_pow2("height", height)?;
    check_pow2("width", width)?;
    let plane_len = height * width;
    let norm = 1.0 / plane_len as f64;
    let mut real = Vec::with_capacity(f.data().len());
    let mut max_imag = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut plane = vec![Complex::new(0.0, 0.0); plane_len];
    for c in 0..channels {
        let src = &f.data()[c * plane_len..(c + 1) * plane_len];
        for (dst, z) in plane.iter_mut().zip(src) {
            *dst = Complex::new(z.re.widen(), z.im.widen());
        }
        transform_plane(&mut plane, height, width, true);
        for z in &plane {
            let re = z.re * norm;
            max_imag = max_imag.max((z.im * norm).abs());
            sum_sq += re * re;
            real.push(re);
        }
    }
    let rms = (sum_sq / real.len() as f64).sqrt();
    let tolerance = IMAG_RESIDUAL_TOLERANCE * rms;
    if max_imag > tolerance {
        return Err(Error::SymmetryViolation {
            residual: max_imag,
            tolerance,
        });
    }
    FeatureMap::new(channels, height, width, real.into_iter().map(T::of).collect())
}

/// Σ|F|² over every channel and coefficient.
pub fn spectral_energy<T: Scalar>(f: &Spectrum<T>) -> f64 {
    f.data()
        .iter()
        .map(|z| {
            let (re, im) = (z.re.widen(), z.im.widen());
            re * re + im * im
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn impulse_has_flat_spectrum() {
        let x = FeatureMap::<f32>::from_fn(1, 4, 4, |_, y, x| if y == 0 && x == 0 { 1.0 } else { 0.0 })
            .unwrap();
        let f = fft2(&x).unwrap();
        for z in f.data() {
            assert_eq!(z.re, 1.0);
            assert_eq!(z.im, 0.0);
        }
        assert_eq!(spectral_energy(&f), 16.0);
    }

    #[test]
    fn constant_map_is_pure_dc() {
        let c = 0.7f64;
        let x = FeatureMap::<f64>::filled(1, 8, 8, c).unwrap();
        let f = fft2(&x).unwrap();
        assert!((f.get(0, 0, 0).re - 64.0 * c).abs() < 1e-5);
        for (i, z) in f.data().iter().enumerate().skip(1) {
            assert!(z.norm() < 1e-5, "coefficient {i} = {z}");
        }
    }

    #[test]
    fn all_ones_spectrum_inverts_to_impulse() {
        let f = Spectrum::<f32>::new(1, 4, 4, vec![Complex::new(1.0, 0.0); 16]).unwrap();
        let x = ifft2(&f).unwrap();
        assert!((x.get(0, 0, 0) - 1.0).abs() < 1e-6);
        for v in &x.data()[1..] {
            assert!(v.abs() < 1e-6);
        }
    }

    #[test]
    fn asymmetric_spectrum_is_rejected() {
        let mut f = Spectrum::<f32>::zeros(1, 4, 4).unwrap();
        f.set(0, 0, 1, Complex::new(1.0, 0.0));
        assert!(matches!(ifft2(&f), Err(Error::SymmetryViolation { .. })));
    }

    #[test]
    fn zero_spectrum_has_zero_energy() {
        let f = Spectrum::<f64>::zeros(3, 8, 8).unwrap();
        assert_eq!(spectral_energy(&f), 0.0);
        assert!(ifft2(&f).unwrap().data().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(matches!(
            FeatureMap::<f32>::zeros(1, 6, 8),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            Spectrum::<f32>::zeros(1, 8, 12),
            Err(Error::Dimension(_))
        ));
    }
}
