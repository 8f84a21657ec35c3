use super::linalg::jacobi_eigen;
use super::{dot, Embedder, FeatureVector};
use crate::image::Image;
use crate::{Error, Result, Scalar};

fn unit_rows<T: Scalar, V: AsRef<[T]>>(features: &[V]) -> Result<Vec<FeatureVector<T>>> {
    features
        .iter()
        .map(|f| FeatureVector::normalized(f.as_ref().to_vec()))
        .collect()
}

/// Cosine-similarity Gram matrix, row-major `n×n`.
pub fn cosine_gram<T: Scalar, V: AsRef<[T]>>(features: &[V]) -> Result<Vec<T>> {
    let rows = unit_rows(features)?;
    let n = rows.len();
    let mut k = vec![T::zero(); n * n];
    for i in 0..n {
        k[i * n + i] = T::one();
        for j in i + 1..n {
            let c = rows[i].dot(&rows[j]);
            k[i * n + j] = c;
            k[j * n + i] = c;
        }
    }
    Ok(k)
}

/// Exponential of the Shannon entropy of the eigenvalues of `K/n`, with `K`
/// the cosine Gram matrix. Ranges from 1 (all identical) to `n` (mutually
/// orthogonal).
pub fn vendi<T: Scalar, V: AsRef<[T]>>(features: &[V]) -> Result<T> {
    let n = features.len();
    if n == 0 {
        return Err(Error::InsufficientData("Vendi score needs at least one vector".into()));
    }
    let rows = unit_rows(features)?;
    let dim = rows[0].dim();
    if rows.iter().any(|r| r.dim() != dim) {
        return Err(Error::Dimension("feature vectors have differing dimensions".into()));
    }
    let nt = T::of(n as f64);
    // K/n = XXᵀ/n shares its nonzero spectrum with XᵀX/n, which is smaller
    // when there are more vectors than dimensions.
    let eig = if n > dim {
        let mut c = vec![T::zero(); dim * dim];
        for r in &rows {
            let x = r.as_slice();
            for i in 0..dim {
                for j in i..dim {
                    c[i * dim + j] = c[i * dim + j] + x[i] * x[j];
                }
            }
        }
        for i in 0..dim {
            for j in i..dim {
                let v = c[i * dim + j] / nt;
                c[i * dim + j] = v;
                c[j * dim + i] = v;
            }
        }
        jacobi_eigen(&c, dim)?
    } else {
        let k: Vec<T> = cosine_gram(&rows)?.into_iter().map(|v| v / nt).collect();
        jacobi_eigen(&k, n)?
    };
    let clamped: Vec<T> = eig.values.iter().map(|&v| v.max(T::zero())).collect();
    let total = clamped.iter().fold(T::zero(), |s, &v| s + v);
    let entropy = clamped.iter().fold(T::zero(), |s, &v| {
        let p = v / total;
        if p > T::zero() {
            s - p * p.ln()
        } else {
            s
        }
    });
    Ok(entropy.exp().max(T::one()).min(nt))
}

/// Mean of `1 − cos(f_i, f_j)` over all unordered pairs.
pub fn pairwise_diversity_features<T: Scalar, V: AsRef<[T]>>(features: &[V]) -> Result<T> {
    let n = features.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("pairwise diversity needs >= 2 items, got {n}")));
    }
    let rows = unit_rows(features)?;
    let mut total = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            total = total + (T::one() - dot(rows[i].as_slice(), rows[j].as_slice()));
        }
    }
    Ok(total / T::of((n * (n - 1) / 2) as f64))
}

/// Mean pairwise embedding distance of a set of images.
pub fn pairwise_diversity(images: &[Image], embedder: &Embedder) -> Result<f64> {
    let feats: Vec<_> = images.iter().map(|im| embedder.embed(im)).collect();
    pairwise_diversity_features(&feats)
}
