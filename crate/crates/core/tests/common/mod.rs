//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Covariance with divisor n, by explicit double loop.
pub fn naive_covariance(x: ArrayView2<f64>) -> Array2<f64> {
    let (n, k) = x.dim();
    let mut mean = vec![0.0; k];
    for i in 0..n {
        for j in 0..k {
            mean[j] += x[[i, j]] / n as f64;
        }
    }
    let mut cov = Array2::zeros((k, k));
    for a in 0..k {
        for b in 0..k {
            let mut s = 0.0;
            for i in 0..n {
                s += (x[[i, a]] - mean[a]) * (x[[i, b]] - mean[b]);
            }
            cov[[a, b]] = s / n as f64;
        }
    }
    cov
}

/// Cyclic Jacobi eigenvalues of a symmetric matrix, sorted descending.
pub fn jacobi_eigenvalues(m: &Array2<f64>) -> Vec<f64> {
    let k = m.nrows();
    let mut a = m.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..k)
            .flat_map(|p| (0..k).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[[p, q]] * a[[p, q]])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..k {
            for q in p + 1..k {
                if a[[p, q]].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * a[[p, q]]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..k {
                    let arp = a[[r, p]];
                    let arq = a[[r, q]];
                    a[[r, p]] = c * arp - s * arq;
                    a[[r, q]] = s * arp + c * arq;
                }
                for r in 0..k {
                    let apr = a[[p, r]];
                    let aqr = a[[q, r]];
                    a[[p, r]] = c * apr - s * aqr;
                    a[[q, r]] = s * apr + c * aqr;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..k).map(|i| a[[i, i]]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Signature bits by loop: `|x_ij - mean_j| > beta` with the plain column mean.
pub fn naive_bits(x: ArrayView2<f64>, beta: f64) -> Vec<Vec<bool>> {
    let (n, k) = x.dim();
    let mean: Vec<f64> = (0..k).map(|j| (0..n).map(|i| x[[i, j]]).sum::<f64>() / n as f64).collect();
    (0..n)
        .map(|i| (0..k).map(|j| (x[[i, j]] - mean[j]).abs() > beta).collect())
        .collect()
}

/// Smallest-first scan: the largest candidate beta with ones-fraction >= ratio.
pub fn scan_suggest_beta(devs: &[f64], ratio: f64) -> Option<f64> {
    let n = devs.len() as f64;
    let mut candidates: Vec<f64> = devs.iter().flat_map(|&d| [d, d.next_down()]).filter(|&b| b >= 0.0).collect();
    candidates.push(0.0);
    candidates.sort_by(f64::total_cmp);
    candidates
        .into_iter()
        .filter(|&b| devs.iter().filter(|&&d| d > b).count() as f64 / n >= ratio)
        .max_by(f64::total_cmp)
}

/// Nearest class mean by double loop; uncovered classes cannot be predicted.
pub fn naive_nearest_centroid(
    train: ArrayView2<f64>,
    train_labels: &[usize],
    subset: &[usize],
    test: ArrayView2<f64>,
    test_labels: &[usize],
    classes: usize,
) -> f64 {
    let k = train.ncols();
    let mut means = vec![vec![0.0; k]; classes];
    let mut counts = vec![0usize; classes];
    for &i in subset {
        counts[train_labels[i]] += 1;
        for j in 0..k {
            means[train_labels[i]][j] += train[[i, j]];
        }
    }
    for c in 0..classes {
        for j in 0..k {
            if counts[c] > 0 {
                means[c][j] /= counts[c] as f64;
            }
        }
    }
    let mut correct = 0;
    for t in 0..test.nrows() {
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for c in 0..classes {
            if counts[c] == 0 {
                continue;
            }
            let mut d = 0.0;
            for j in 0..k {
                d += (test[[t, j]] - means[c][j]).powi(2);
            }
            if d < best_d {
                best_d = d;
                best = Some(c);
            }
        }
        if best == Some(test_labels[t]) {
            correct += 1;
        }
    }
    correct as f64 / test.nrows() as f64
}

pub fn random_matrix(rng: &mut impl Rng, n: usize, k: usize, scale: f64) -> Array2<f64> {
    Array2::from_shape_fn((n, k), |_| rng.random_range(-scale..scale))
}

/// Rows with a deliberately small number of distinct signatures: each row is a
/// random template scaled per row, so many rows repeat a template's pattern.
pub fn templated_matrix(rng: &mut impl Rng, n: usize, k: usize, templates: usize) -> Array2<f64> {
    let t = random_matrix(rng, templates.max(1), k, 3.0);
    let mut x = Array2::zeros((n, k));
    for i in 0..n {
        let row = rng.random_range(0..t.nrows());
        for j in 0..k {
            x[[i, j]] = t[[row, j]] + rng.random_range(-0.01..0.01);
        }
    }
    x
}

pub fn max_abs_diff<'a>(a: impl IntoIterator<Item = &'a f64>, b: impl IntoIterator<Item = &'a f64>) -> f64 {
    a.into_iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
