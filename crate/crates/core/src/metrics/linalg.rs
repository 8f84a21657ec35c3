//! Dense symmetric linear algebra on row-major `n×n` slices.

use crate::{Error, Result, Scalar};

pub const MAX_SWEEPS: usize = 100;

/// Eigendecomposition `A = V·diag(values)·Vᵀ`. `vectors` is row-major with
/// eigenvector `j` in column `j`; values are sorted descending.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricEigen<T: Scalar> {
    pub n: usize,
    pub values: Vec<T>,
    pub vectors: Vec<T>,
}

impl<T: Scalar> SymmetricEigen<T> {
    /// `V·diag(f(values))·Vᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> Vec<T> {
        let n = self.n;
        let mapped: Vec<T> = self.values.iter().map(|&v| f(v)).collect();
        let mut out = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let mut s = T::zero();
                for k in 0..n {
                    s = s + self.vectors[i * n + k] * mapped[k] * self.vectors[j * n + k];
                }
                out[i * n + j] = s;
                out[j * n + i] = s;
            }
        }
        out
    }
}

fn check_square<T>(a: &[T], n: usize) -> Result<()> {
    if a.len() != n * n {
        return Err(Error::Dimension(format!("expected {n}x{n} matrix, got {} values", a.len())));
    }
    Ok(())
}

fn frobenius<T: Scalar>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |s, &v| s + v * v).sqrt()
}

fn off_diagonal<T: Scalar>(a: &[T], n: usize) -> T {
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps stop once the off-diagonal Frobenius norm falls below
/// `max(1e-12, 8·eps)` times the matrix norm.
pub fn jacobi_eigen<T: Scalar>(a: &[T], n: usize) -> Result<SymmetricEigen<T>> {
    check_square(a, n)?;
    if let Some(i) = a.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let mut m = a.to_vec();
    // Symmetrize so tiny asymmetries from accumulation cannot stall convergence.
    for i in 0..n {
        for j in i + 1..n {
            let s = (m[i * n + j] + m[j * n + i]) * T::of(0.5);
            m[i * n + j] = s;
            m[j * n + i] = s;
        }
    }
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let tol = T::of(1e-12).max(T::epsilon() * T::of(8.0)) * frobenius(&m);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal(&m, n) <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (T::of(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off_diagonal(&m, n) > tol {
        return Err(Error::Domain(format!("Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].partial_cmp(&m[i * n + i]).unwrap());
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vectors = vec![T::zero(); n * n];
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vectors[k * n + new] = v[k * n + old];
        }
    }
    Ok(SymmetricEigen { n, values, vectors })
}

/// Principal square root of a symmetric PSD matrix; negative eigenvalues
/// are clamped to 0.
pub fn sqrt_psd<T: Scalar>(a: &[T], n: usize) -> Result<Vec<T>> {
    Ok(jacobi_eigen(a, n)?.reconstruct_with(|v| v.max(T::zero()).sqrt()))
}

/// Row-major product of two `n×n` matrices.
pub fn matmul<T: Scalar>(a: &[T], b: &[T], n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == T::zero() {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = out[i * n + j] + aik * b[k * n + j];
            }
        }
    }
    out
}

pub fn trace<T: Scalar>(a: &[T], n: usize) -> T {
    (0..n).fold(T::zero(), |s, i| s + a[i * n + i])
}
