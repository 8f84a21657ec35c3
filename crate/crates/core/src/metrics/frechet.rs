use super::linalg::{jacobi_eigen, matmul, sqrt_psd, trace};
use super::GaussianMoments;
use crate::{Error, Result, Scalar};

/// Fréchet distance between two Gaussians,
/// `|μa−μb|² + tr Σa + tr Σb − 2·tr((Σa^½ Σb Σa^½)^½)`, clamped to `≥ 0`.
pub fn frechet<T: Scalar>(a: &GaussianMoments<T>, b: &GaussianMoments<T>) -> Result<T> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::Dimension(format!("moment dims differ: {n} vs {}", b.dim())));
    }
    let mean_term = a
        .mean
        .iter()
        .zip(&b.mean)
        .fold(T::zero(), |s, (&x, &y)| s + (x - y) * (x - y));
    let sa = sqrt_psd(&a.cov, n)?;
    let inner = matmul(&matmul(&sa, &b.cov, n), &sa, n);
    let cross = jacobi_eigen(&inner, n)?
        .values
        .iter()
        .fold(T::zero(), |s, &v| s + v.max(T::zero()).sqrt());
    let d = mean_term + trace(&a.cov, n) + trace(&b.cov, n) - T::of(2.0) * cross;
    Ok(d.max(T::zero()))
}
