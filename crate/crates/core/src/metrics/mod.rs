//! Distribution and diversity metrics over a fixed image embedder.

mod embed;
mod frechet;
mod knn;
pub mod linalg;
mod report;
mod vendi;

pub use embed::{Embedder, DEFAULT_EMBED_SEED, EMBED_DIM, EMBED_SCALES};
pub use frechet::frechet;
pub use knn::{kth_neighbor_radii, knn_precision_recall};
pub use report::{build_report, fmt_sig6, round_sig6, MetricsReport, CSV_HEADER};
pub use vendi::{cosine_gram, pairwise_diversity, pairwise_diversity_features, vendi};

use crate::{Error, Result, Scalar};

/// Unit-norm embedding vector.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector<T: Scalar = f64>(Vec<T>);

impl<T: Scalar> FeatureVector<T> {
    /// Scales `v` to unit length.
    pub fn normalized(v: Vec<T>) -> Result<Self> {
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let norm = v.iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
        if norm == T::zero() {
            return Err(Error::Domain("cannot normalize a zero vector".into()));
        }
        Ok(Self(v.into_iter().map(|x| x / norm).collect()))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn dot(&self, other: &Self) -> T {
        dot(&self.0, &other.0)
    }
}

impl<T: Scalar> AsRef<[T]> for FeatureVector<T> {
    fn as_ref(&self) -> &[T] {
        &self.0
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s + x * y)
}

/// Mean vector and unbiased covariance of a sample set.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMoments<T: Scalar = f64> {
    pub mean: Vec<T>,
    /// Row-major `dim×dim`.
    pub cov: Vec<T>,
    /// Number of samples behind the estimate.
    pub n: usize,
}

impl<T: Scalar> GaussianMoments<T> {
    pub fn from_samples<V: AsRef<[T]>>(samples: &[V]) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(Error::InsufficientData(format!("moments need >= 2 samples, got {n}")));
        }
        let dim = samples[0].as_ref().len();
        if samples.iter().any(|s| s.as_ref().len() != dim) {
            return Err(Error::Dimension("samples have differing dimensions".into()));
        }
        let nt = T::of(n as f64);
        let mut mean = vec![T::zero(); dim];
        for s in samples {
            for (m, &x) in mean.iter_mut().zip(s.as_ref()) {
                *m = *m + x;
            }
        }
        mean.iter_mut().for_each(|m| *m = *m / nt);
        let mut cov = vec![T::zero(); dim * dim];
        for s in samples {
            let d: Vec<T> = s.as_ref().iter().zip(&mean).map(|(&x, &m)| x - m).collect();
            for i in 0..dim {
                for j in i..dim {
                    cov[i * dim + j] = cov[i * dim + j] + d[i] * d[j];
                }
            }
        }
        let denom = T::of((n - 1) as f64);
        for i in 0..dim {
            for j in i..dim {
                let v = cov[i * dim + j] / denom;
                cov[i * dim + j] = v;
                cov[j * dim + i] = v;
            }
        }
        Ok(Self { mean, cov, n })
    }

    /// Moments given directly; `cov` must be square and symmetric.
    pub fn new(mean: Vec<T>, cov: Vec<T>, n: usize) -> Result<Self> {
        let dim = mean.len();
        if cov.len() != dim * dim {
            return Err(Error::Dimension(format!("covariance must be {dim}x{dim}")));
        }
        for i in 0..dim {
            for j in i + 1..dim {
                if (cov[i * dim + j] - cov[j * dim + i]).abs() > T::of(1e-9) {
                    return Err(Error::Domain("covariance is not symmetric".into()));
                }
            }
        }
        Ok(Self { mean, cov, n })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}
