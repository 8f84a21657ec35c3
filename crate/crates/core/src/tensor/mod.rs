//! Dense feature maps and spectra, the 2D FFT, RNG streams and tensor files.

mod fft;
mod file;
mod rng;

pub use fft::{fft2, fft_in_place, ifft2, spectral_energy, IMAG_RESIDUAL_TOLERANCE};
pub use file::{decode_tensor, encode_tensor, load_raw, load_tensor, save_raw, save_tensor, RawTensor};
pub use rng::{stream_id, RngStream};

use num_complex::Complex;

use crate::{Error, Result, Scalar};

pub(crate) fn check_pow2(name: &str, n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::Dimension(format!(
            "{name} = {n} is not a power of two >= 2"
        )));
    }
    Ok(())
}

/// A block activation tensor, channel-major then row-major.
///
/// Height and width are powers of two (at least 2) and every value is finite.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMap<T = f32> {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Scalar> FeatureMap<T> {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<T>) -> Result<Self> {
        check_pow2("height", height)?;
        check_pow2("width", width)?;
        if channels == 0 {
            return Err(Error::Dimension("channels must be positive".into()));
        }
        let expected = channels * height * width;
        if data.len() != expected {
            return Err(Error::Dimension(format!(
                "data length {} does not match {channels}x{height}x{width}",
                data.len()
            )));
        }
        if let Some(idx) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(idx));
        }
        Ok(Self {
            channels,
            height,
            width,
            data,
        })
    }

    pub fn zeros(channels: usize, height: usize, width: usize) -> Result<Self> {
        Self::new(channels, height, width, vec![T::zero(); channels * height * width])
    }

    pub fn filled(channels: usize, height: usize, width: usize, value: T) -> Result<Self> {
        Self::new(channels, height, width, vec![value; channels * height * width])
    }

    /// Builds a map from `f(channel, row, col)`.
    pub fn from_fn(
        channels: usize,
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize, usize) -> T,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(channels * height * width);
        for c in 0..channels {
            for y in 0..height {
                for x in 0..width {
                    data.push(f(c, y, x));
                }
            }
        }
        Self::new(channels, height, width, data)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// `(channels, height, width)`
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn channel(&self, c: usize) -> &[T] {
        let plane = self.height * self.width;
        &self.data[c * plane..(c + 1) * plane]
    }

    #[inline]
    pub fn get(&self, c: usize, y: usize, x: usize) -> T {
        self.data[(c * self.height + y) * self.width + x]
    }

    /// Applies `f` elementwise; fails if the result is non-finite.
    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(
            self.channels,
            self.height,
            self.width,
            self.data.iter().map(|&v| f(v)).collect(),
        )
    }

    pub fn scale(&self, factor: T) -> Result<Self> {
        self.map(|v| v * factor)
    }

    /// Sum of squares, accumulated in `f64`.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v.widen() * v.widen()).sum()
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().map(|v| v.widen()).sum::<f64>() / self.data.len() as f64
    }

    pub fn rms(&self) -> f64 {
        (self.energy() / self.data.len() as f64).sqrt()
    }

    /// Largest absolute elementwise difference; infinite when shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.widen() - b.widen()).abs())
            .fold(0.0, f64::max)
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }

    /// Concatenates along the channel axis.
    pub fn concat_channels(&self, other: &Self) -> Result<Self> {
        if (self.height, self.width) != (other.height, other.width) {
            return Err(Error::ShapeMismatch(format!(
                "cannot concatenate {:?} with {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&other.data);
        Ok(Self {
            channels: self.channels + other.channels,
            height: self.height,
            width: self.width,
            data,
        })
    }

    pub fn cast<U: Scalar>(&self) -> FeatureMap<U> {
        FeatureMap {
            channels: self.channels,
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|v| U::of(v.widen())).collect(),
        }
    }
}

/// Complex 2D DFT of a feature map in unshifted layout: index `(0, 0)` is DC.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T = f32> {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<Complex<T>>) -> Result<Self> {
        check_pow2("height", height)?;
        check_pow2("width", width)?;
        if data.len() != channels * height * width {
            return Err(Error::Dimension(format!(
                "spectrum length {} does not match {channels}x{height}x{width}",
                data.len()
            )));
        }
        Ok(Self {
            channels,
            height,
            width,
            data,
        })
    }

    pub fn zeros(channels: usize, height: usize, width: usize) -> Result<Self> {
        Self::new(
            channels,
            height,
            width,
            vec![Complex::new(T::zero(), T::zero()); channels * height * width],
        )
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, c: usize, u: usize, v: usize) -> Complex<T> {
        self.data[(c * self.height + u) * self.width + v]
    }

    #[inline]
    pub fn set(&mut self, c: usize, u: usize, v: usize, value: Complex<T>) {
        self.data[(c * self.height + u) * self.width + v] = value;
    }

    /// Coefficientwise sum; shapes must match.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self::new(self.channels, self.height, self.width, data)
    }

    /// Largest deviation from Hermitian symmetry, relative to the largest magnitude.
    pub fn hermitian_defect(&self) -> f64 {
        let (h, w) = (self.height, self.width);
        let mut worst = 0.0f64;
        let mut peak = 0.0f64;
        for c in 0..self.channels {
            for u in 0..h {
                for v in 0..w {
                    let a = self.get(c, u, v);
                    let b = self.get(c, (h - u) % h, (w - v) % w).conj();
                    let d = ((a.re.widen() - b.re.widen()).powi(2)
                        + (a.im.widen() - b.im.widen()).powi(2))
                    .sqrt();
                    worst = worst.max(d);
                    peak = peak.max(a.norm().widen());
                }
            }
        }
        if peak == 0.0 {
            0.0
        } else {
            worst / peak
        }
    }
}
