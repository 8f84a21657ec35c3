use crate::{Error, Result, Scalar};

fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s + (x - y) * (x - y))
}

/// Euclidean distance from each point to its `k`-th nearest neighbour in the
/// same set, excluding itself.
pub fn kth_neighbor_radii<T: Scalar, V: AsRef<[T]>>(points: &[V], k: usize) -> Result<Vec<T>> {
    if k == 0 || points.len() <= k {
        return Err(Error::InsufficientData(format!(
            "k-NN radius needs more than k={k} points, got {}",
            points.len()
        )));
    }
    Ok(points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut d: Vec<T> = points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| sq_dist(p.as_ref(), q.as_ref()))
                .collect();
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            d[k - 1].sqrt()
        })
        .collect())
}

/// Fraction of `queries` lying inside at least one ball `(center, radius)`.
fn coverage<T: Scalar, V: AsRef<[T]>>(queries: &[V], centers: &[V], radii: &[T]) -> T {
    let hits = queries
        .iter()
        .filter(|q| {
            centers
                .iter()
                .zip(radii)
                .any(|(c, &r)| sq_dist(q.as_ref(), c.as_ref()).sqrt() <= r)
        })
        .count();
    T::of(hits as f64 / queries.len() as f64)
}

/// Manifold precision and recall: precision is the fraction of `fake`
/// points inside some real point's k-NN ball, recall the fraction of `real`
/// points inside some fake point's ball. Ball boundaries are inclusive.
pub fn knn_precision_recall<T: Scalar, V: AsRef<[T]>>(real: &[V], fake: &[V], k: usize) -> Result<(T, T)> {
    let dim = real.first().map(|v| v.as_ref().len()).unwrap_or(0);
    if real.iter().chain(fake).any(|v| v.as_ref().len() != dim) {
        return Err(Error::Dimension("point sets have differing dimensions".into()));
    }
    let real_r = kth_neighbor_radii(real, k)?;
    let fake_r = kth_neighbor_radii(fake, k)?;
    Ok((coverage(fake, real, &real_r), coverage(real, fake, &fake_r)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_sets() {
        let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, (i * i) as f64]).collect();
        assert_eq!(knn_precision_recall(&pts, &pts, 3).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn far_clusters() {
        let a: Vec<Vec<f64>> = (0..5).map(|i| vec![0.1 * i as f64, 0.0]).collect();
        let b: Vec<Vec<f64>> = (0..5).map(|i| vec![100.0 + 0.1 * i as f64, 0.0]).collect();
        assert_eq!(knn_precision_recall(&a, &b, 1).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn too_few_points() {
        let a = vec![vec![0.0f64], vec![1.0]];
        assert!(matches!(knn_precision_recall(&a, &a, 2), Err(Error::InsufficientData(_))));
    }
}
