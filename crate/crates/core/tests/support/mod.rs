//! Independent reference implementations shared by integration tests.
#![allow(dead_code)]

use c3_core::selection::SearchGrid;
use num_complex::Complex;

/// Direct O(N⁴) DFT of one `h×w` plane, `F[u][v] = Σ x[y][x]·e^{−2πi(uy/h + vx/w)}`.
pub fn naive_dft(plane: &[f64], h: usize, w: usize, inverse: bool) -> Vec<Complex<f64>> {
    naive_dft_complex(&plane.iter().map(|&v| Complex::new(v, 0.0)).collect::<Vec<_>>(), h, w, inverse)
}

pub fn naive_dft_complex(plane: &[Complex<f64>], h: usize, w: usize, inverse: bool) -> Vec<Complex<f64>> {
    let sign = if inverse { 1.0 } else { -1.0 };
    let norm = if inverse { 1.0 / (h * w) as f64 } else { 1.0 };
    let mut out = vec![Complex::new(0.0, 0.0); h * w];
    for u in 0..h {
        for v in 0..w {
            let mut acc = Complex::new(0.0, 0.0);
            for y in 0..h {
                for x in 0..w {
                    let phase = sign * 2.0 * std::f64::consts::PI * ((u * y) as f64 / h as f64 + (v * x) as f64 / w as f64);
                    acc += plane[y * w + x] * Complex::new(phase.cos(), phase.sin());
                }
            }
            out[u * w + v] = acc * norm;
        }
    }
    out
}

/// Exhaustive form of the constrained selection: the largest grid value whose
/// usability reaches `epsilon` times the baseline, found by checking every
/// point.
pub fn exhaustive_select(grid: &[f64], usability: &[f64], epsilon: f64) -> f64 {
    let threshold = epsilon * usability[0];
    grid.iter()
        .zip(usability)
        .filter(|(_, &u)| u >= threshold)
        .map(|(&l, _)| l)
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn lookup(grid: &[f64], usability: &[f64], lambda: f64) -> f64 {
    usability[grid.iter().position(|&g| g == lambda).expect("value on grid")]
}

/// Precision/recall straight from the definition, with explicit distance
/// matrices and a full sort per point.
pub fn knn_oracle(real: &[Vec<f64>], fake: &[Vec<f64>], k: usize) -> (f64, f64) {
    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    }
    fn radii(set: &[Vec<f64>], k: usize) -> Vec<f64> {
        set.iter()
            .enumerate()
            .map(|(i, p)| {
                let mut ds: Vec<f64> = set
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, q)| dist(p, q))
                    .collect();
                ds.sort_by(f64::total_cmp);
                ds[k - 1]
            })
            .collect()
    }
    fn inside(points: &[Vec<f64>], centres: &[Vec<f64>], r: &[f64]) -> f64 {
        let hits = points
            .iter()
            .filter(|p| centres.iter().zip(r).any(|(c, &rad)| dist(p, c) <= rad))
            .count();
        hits as f64 / points.len() as f64
    }
    let (rr, rf) = (radii(real, k), radii(fake, k));
    (inside(fake, real, &rr), inside(real, fake, &rf))
}

/// Search grid from raw values (first must be 1).
pub fn grid(values: &[f64]) -> SearchGrid {
    SearchGrid::new(values.to_vec()).expect("valid grid")
}
