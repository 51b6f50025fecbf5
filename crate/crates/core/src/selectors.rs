//! Baseline coreset selectors over one sample group.
//!
//! Every selector returns positions local to the group (`0..m`) and breaks
//! score ties toward the lowest position.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cds::{CdsRelation, Centroid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Random,
    Kcg,
    Lc,
    Craig,
    Gc,
    Mds,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Random,
        Method::Kcg,
        Method::Lc,
        Method::Craig,
        Method::Gc,
        Method::Mds,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Random => "random",
            Method::Kcg => "kcg",
            Method::Lc => "lc",
            Method::Craig => "craig",
            Method::Gc => "gc",
            Method::Mds => "mds",
        }
    }

    pub fn needs_probs(self) -> bool {
        self == Method::Lc
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    #[default]
    ShiftedEuclidean,
    CosineShifted,
    InnerProductShifted,
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shifted-euclidean" => Ok(Kernel::ShiftedEuclidean),
            "cosine-shifted" => Ok(Kernel::CosineShifted),
            "inner-product-shifted" => Ok(Kernel::InnerProductShifted),
            other => Err(Error::InvalidParameter(format!("unknown kernel {other:?}"))),
        }
    }
}

/// Indices chosen from a group, with facility weights where the method provides them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Selection {
    pub indices: Vec<usize>,
    pub weights: Option<Vec<f64>>,
}

impl Selection {
    pub fn unweighted(indices: Vec<usize>) -> Self {
        Self {
            indices,
            weights: None,
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    data: Array2<f64>,
    kernel: Option<Kernel>,
}

impl SimilarityMatrix {
    /// Wraps a precomputed matrix; it must be square, symmetric, finite and nonnegative.
    pub fn from_raw(data: Array2<f64>) -> Result<Self> {
        let (r, c) = data.dim();
        if r != c {
            return Err(Error::DimensionMismatch(format!("similarity is {r}x{c}")));
        }
        for ((i, j), &v) in data.indexed_iter() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "similarity[{i}][{j}] = {v} is not a nonnegative finite value"
                )));
            }
            if (v - data[[j, i]]).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "similarity is not symmetric at ({i}, {j})"
                )));
            }
        }
        Ok(Self { data, kernel: None })
    }

    pub fn len(&self) -> usize {
        self.data.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.data.nrows() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[[i, j]]
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn kernel(&self) -> Option<Kernel> {
        self.kernel
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.data.rows().into_iter().map(|r| r.sum()).collect()
    }
}

pub(crate) fn euclidean(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn similarity_matrix(vectors: ArrayView2<f64>, kernel: Kernel) -> Result<SimilarityMatrix> {
    let m = vectors.nrows();
    if m == 0 {
        return Err(Error::EmptyGroup);
    }
    if vectors.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite input vector".into()));
    }
    let rows: Vec<ArrayView1<f64>> = vectors.rows().into_iter().collect();
    let mut data = Array2::zeros((m, m));
    match kernel {
        Kernel::ShiftedEuclidean => {
            let mut d_max = 0.0f64;
            for i in 0..m {
                for j in i + 1..m {
                    let d = euclidean(rows[i], rows[j]);
                    data[[i, j]] = d;
                    data[[j, i]] = d;
                    d_max = d_max.max(d);
                }
            }
            data.mapv_inplace(|d| d_max - d);
        }
        Kernel::CosineShifted => {
            let norms: Vec<f64> = rows.iter().map(|r| r.dot(r).sqrt()).collect();
            for i in 0..m {
                for j in i..m {
                    let cos = if norms[i] == 0.0 || norms[j] == 0.0 {
                        0.0
                    } else {
                        (rows[i].dot(&rows[j]) / (norms[i] * norms[j])).clamp(-1.0, 1.0)
                    };
                    let s = (1.0 + cos) / 2.0;
                    data[[i, j]] = s;
                    data[[j, i]] = s;
                }
            }
        }
        Kernel::InnerProductShifted => {
            let gram = vectors.dot(&vectors.t());
            let min = gram.iter().copied().fold(f64::INFINITY, f64::min);
            data = gram.mapv(|g| g - min);
            // enforce exact symmetry against rounding in the product
            for i in 0..m {
                for j in i + 1..m {
                    data[[j, i]] = data[[i, j]];
                }
            }
        }
    }
    Ok(SimilarityMatrix {
        data,
        kernel: Some(kernel),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProxyMode {
    Bias,
    Full,
}

/// Last-layer surrogate gradients, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientProxy(pub Array2<f64>);

/// `p_i - onehot(y_i)`; in full mode the row-major outer product with the
/// sample's features comes first, followed by that bias part.
pub fn gradient_proxy(
    probs: ArrayView2<f64>,
    labels: &[usize],
    features: Option<ArrayView2<f64>>,
    mode: ProxyMode,
) -> Result<GradientProxy> {
    let (m, classes) = probs.dim();
    if labels.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{} probability rows, {} labels",
            m,
            labels.len()
        )));
    }
    for (i, row) in probs.rows().into_iter().enumerate() {
        let sum = row.sum();
        if (sum - 1.0).abs() > crate::data_io::PROB_SUM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "probability row {i} sums to {sum}"
            )));
        }
    }
    if let Some(&bad) = labels.iter().find(|&&y| y >= classes) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: classes,
        });
    }
    let mut residual = probs.to_owned();
    for (i, &y) in labels.iter().enumerate() {
        residual[[i, y]] -= 1.0;
    }
    match mode {
        ProxyMode::Bias => Ok(GradientProxy(residual)),
        ProxyMode::Full => {
            let feats = features
                .ok_or_else(|| Error::MissingInput("features for full gradient proxy".into()))?;
            if feats.nrows() != m {
                return Err(Error::DimensionMismatch(format!(
                    "{} probability rows, {} feature rows",
                    m,
                    feats.nrows()
                )));
            }
            let k = feats.ncols();
            let mut out = Array2::zeros((m, classes * k + classes));
            for i in 0..m {
                for c in 0..classes {
                    for j in 0..k {
                        out[[i, c * k + j]] = residual[[i, c]] * feats[[i, j]];
                    }
                    out[[i, classes * k + c]] = residual[[i, c]];
                }
            }
            Ok(GradientProxy(out))
        }
    }
}

pub fn select_random(m: usize, b: usize, seed: u64) -> Selection {
    select_random_with(&mut ChaCha8Rng::seed_from_u64(seed), m, b)
}

pub fn select_random_with<R: Rng + ?Sized>(rng: &mut R, m: usize, b: usize) -> Selection {
    Selection::unweighted(index::sample(rng, m, b.min(m)).into_vec())
}

fn centroid_distances(points: ArrayView2<f64>, centroid: &Centroid) -> Result<Vec<f64>> {
    if points.nrows() == 0 {
        return Err(Error::EmptyGroup);
    }
    if points.ncols() != centroid.len() {
        return Err(Error::DimensionMismatch(format!(
            "points have {} dimensions, centroid has {}",
            points.ncols(),
            centroid.len()
        )));
    }
    let c = centroid.as_array().view();
    Ok(points.rows().into_iter().map(|r| euclidean(r, c)).collect())
}

/// Position of the maximum over candidates, lowest position on ties.
fn argmax_by<F: Fn(usize) -> f64>(candidates: impl Iterator<Item = usize>, score: F) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for e in candidates {
        let s = score(e);
        if best.is_none_or(|(_, bs)| s > bs) {
            best = Some((e, s));
        }
    }
    best.map(|(e, _)| e)
}

/// Farthest-point greedy seeded at the sample closest to the centroid.
pub fn select_kcenter(reduced: ArrayView2<f64>, b: usize, centroid: &Centroid) -> Result<Selection> {
    let to_centroid = centroid_distances(reduced, centroid)?;
    let m = reduced.nrows();
    let b = b.min(m);
    let mut selected = Vec::with_capacity(b);
    if b == 0 {
        return Ok(Selection::unweighted(selected));
    }
    let mut taken = vec![false; m];
    let first = argmax_by(0..m, |i| -to_centroid[i]).expect("m >= 1");
    let mut nearest = vec![f64::INFINITY; m];
    let mut pick = first;
    loop {
        taken[pick] = true;
        selected.push(pick);
        if selected.len() == b {
            break;
        }
        let p = reduced.row(pick);
        for i in 0..m {
            nearest[i] = nearest[i].min(euclidean(reduced.row(i), p));
        }
        pick = argmax_by((0..m).filter(|&i| !taken[i]), |i| nearest[i]).expect("b <= m");
    }
    Ok(Selection::unweighted(selected))
}

fn stable_smallest(scores: &[f64], b: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &c| scores[a].total_cmp(&scores[c]));
    order.truncate(b.min(scores.len()));
    order
}

pub fn select_least_confidence(probs: ArrayView2<f64>, b: usize) -> Result<Selection> {
    if probs.nrows() == 0 {
        return Err(Error::EmptyGroup);
    }
    let confidence: Vec<f64> = probs
        .rows()
        .into_iter()
        .map(|r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    Ok(Selection::unweighted(stable_smallest(&confidence, b)))
}

/// Samples whose centroid distance is closest to the median distance.
pub fn select_moderate(reduced: ArrayView2<f64>, b: usize, centroid: &Centroid) -> Result<Selection> {
    let d = centroid_distances(reduced, centroid)?;
    let mut sorted = d.clone();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let median = if m % 2 == 1 {
        sorted[m / 2]
    } else {
        (sorted[m / 2 - 1] + sorted[m / 2]) / 2.0
    };
    let score: Vec<f64> = d.iter().map(|x| (x - median).abs()).collect();
    Ok(Selection::unweighted(stable_smallest(&score, b)))
}

/// Facility-location value `sum_i max_{j in S} s(i, j)`, zero for the empty set.
pub fn facility_value(sim: &SimilarityMatrix, subset: &[usize]) -> f64 {
    (0..sim.len())
        .map(|i| {
            subset
                .iter()
                .map(|&j| sim.get(i, j))
                .fold(0.0f64, f64::max)
        })
        .sum()
}

/// Largest distance from any point to its nearest center.
pub fn covering_radius(points: ArrayView2<f64>, centers: &[usize]) -> f64 {
    points
        .rows()
        .into_iter()
        .map(|p| {
            centers
                .iter()
                .map(|&c| euclidean(p, points.row(c)))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0f64, f64::max)
}

/// Each selected element weighs itself plus every other sample whose most
/// similar selected element it is (lowest index on ties).
pub fn facility_weights(sim: &SimilarityMatrix, selected: &[usize]) -> Vec<f64> {
    let mut weights = vec![0.0; selected.len()];
    if selected.is_empty() {
        return weights;
    }
    let mut ranked: Vec<(usize, usize)> = selected.iter().copied().enumerate().map(|(p, j)| (j, p)).collect();
    ranked.sort_unstable();
    let mut slot_of = vec![None; sim.len()];
    for &(j, p) in &ranked {
        slot_of[j] = Some(p);
    }
    for i in 0..sim.len() {
        let slot = match slot_of[i] {
            Some(p) => p,
            None => {
                let mut best = ranked[0];
                for &cand in &ranked[1..] {
                    if sim.get(i, cand.0) > sim.get(i, best.0) {
                        best = cand;
                    }
                }
                best.1
            }
        };
        weights[slot] += 1.0;
    }
    weights
}

fn check_relation(sim: &SimilarityMatrix, relation: Option<&CdsRelation>) -> Result<()> {
    if let Some(r) = relation {
        if r.len() != sim.len() {
            return Err(Error::DimensionMismatch(format!(
                "similarity covers {} samples, relation {}",
                sim.len(),
                r.len()
            )));
        }
    }
    Ok(())
}

/// Greedy facility location. With a relation, each candidate's marginal gain is
/// scaled by `1 / (same-CDS members already selected + 1)`.
pub(crate) fn facility_greedy(
    sim: &SimilarityMatrix,
    b: usize,
    relation: Option<&CdsRelation>,
) -> Result<Selection> {
    let m = sim.len();
    if m == 0 {
        return Err(Error::EmptyGroup);
    }
    check_relation(sim, relation)?;
    let b = b.min(m);
    let mut cover = vec![0.0f64; m];
    let mut taken = vec![false; m];
    let mut same_cds = vec![0usize; m];
    let mut selected = Vec::with_capacity(b);
    let mut types_seen = std::collections::HashSet::new();
    let s = sim.matrix();
    while selected.len() < b {
        let gain = |e: usize| -> f64 {
            let g: f64 = s
                .row(e)
                .iter()
                .zip(&cover)
                .map(|(&v, &c)| (v - c).max(0.0))
                .sum();
            match relation {
                Some(_) => g * (1.0 / (same_cds[e] as f64 + 1.0)),
                None => g,
            }
        };
        let e = argmax_by((0..m).filter(|&i| !taken[i]), gain).expect("candidates remain");
        taken[e] = true;
        selected.push(e);
        for (c, &v) in cover.iter_mut().zip(s.row(e).iter()) {
            *c = c.max(v);
        }
        if let Some(r) = relation {
            let before = types_seen.len();
            types_seen.insert(r.type_ids()[e]);
            debug_assert!(types_seen.len() >= before);
            for (i, cnt) in same_cds.iter_mut().enumerate() {
                if r.get(i, e) {
                    *cnt += 1;
                }
            }
        }
    }
    let weights = facility_weights(sim, &selected);
    Ok(Selection {
        indices: selected,
        weights: Some(weights),
    })
}

/// Greedy graph cut: `rowsum(e) - lambda * sum_{j in S} s(e, j) * h(e, j)`,
/// where `h` is 2 for same-CDS pairs when a relation is given and 1 otherwise.
pub(crate) fn graphcut_greedy(
    sim: &SimilarityMatrix,
    b: usize,
    lambda: f64,
    relation: Option<&CdsRelation>,
) -> Result<Selection> {
    let m = sim.len();
    if m == 0 {
        return Err(Error::EmptyGroup);
    }
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
    }
    check_relation(sim, relation)?;
    let b = b.min(m);
    let row_sums = sim.row_sums();
    let mut penalty = vec![0.0f64; m];
    let mut taken = vec![false; m];
    let mut selected = Vec::with_capacity(b);
    while selected.len() < b {
        let e = argmax_by((0..m).filter(|&i| !taken[i]), |i| {
            row_sums[i] - lambda * penalty[i]
        })
        .expect("candidates remain");
        taken[e] = true;
        selected.push(e);
        for (i, p) in penalty.iter_mut().enumerate() {
            let h = match relation {
                Some(r) if r.get(i, e) => 2.0,
                _ => 1.0,
            };
            *p += sim.get(i, e) * h;
        }
    }
    Ok(Selection::unweighted(selected))
}

/// CRAIG: facility-location greedy from the empty set, with facility weights.
pub fn select_craig(sim: &SimilarityMatrix, b: usize) -> Result<Selection> {
    facility_greedy(sim, b, None)
}

pub fn select_graphcut(sim: &SimilarityMatrix, b: usize, lambda: f64) -> Result<Selection> {
    graphcut_greedy(sim, b, lambda, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    pub(crate) fn example_sim() -> SimilarityMatrix {
        SimilarityMatrix::from_raw(array![
            [1.0, 0.9, 0.1, 0.1],
            [0.9, 1.0, 0.1, 0.1],
            [0.1, 0.1, 1.0, 0.8],
            [0.1, 0.1, 0.8, 1.0]
        ])
        .unwrap()
    }

    #[test]
    fn shifted_euclidean_one_dimensional() {
        let s = similarity_matrix(array![[0.0], [1.0], [3.0]].view(), Kernel::ShiftedEuclidean).unwrap();
        assert_eq!(s.matrix(), &array![[3.0, 2.0, 0.0], [2.0, 3.0, 1.0], [0.0, 1.0, 3.0]]);
    }

    #[test]
    fn identical_vectors_reach_dmax() {
        let s = similarity_matrix(array![[1.0, 2.0], [1.0, 2.0], [4.0, 6.0]].view(), Kernel::ShiftedEuclidean)
            .unwrap();
        assert_eq!(s.get(0, 1), s.get(0, 0));
        assert_eq!(s.get(0, 0), 5.0);
    }

    #[test]
    fn cosine_zero_vector() {
        let s = similarity_matrix(array![[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0]].view(), Kernel::CosineShifted).unwrap();
        assert_eq!(s.get(0, 1), 0.5);
        assert_eq!(s.get(1, 2), 0.0);
        assert_eq!(s.get(1, 1), 1.0);
    }

    #[test]
    fn inner_product_shift_nonnegative() {
        let s = similarity_matrix(array![[1.0], [-2.0], [0.5]].view(), Kernel::InnerProductShifted).unwrap();
        // gram min is -2
        assert_eq!(s.get(0, 1), 0.0);
        assert_eq!(s.get(1, 1), 6.0);
        assert!(s.matrix().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn non_finite_similarity_input() {
        assert!(similarity_matrix(array![[f64::NAN]].view(), Kernel::ShiftedEuclidean).is_err());
        assert!(similarity_matrix(Array2::zeros((0, 2)).view(), Kernel::ShiftedEuclidean).is_err());
    }

    #[test]
    fn gradient_proxy_bias_and_full() {
        let p = array![[0.7, 0.3]];
        let g = gradient_proxy(p.view(), &[0], None, ProxyMode::Bias).unwrap();
        assert_abs_diff_eq!(g.0[[0, 0]], -0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(g.0[[0, 1]], 0.3, epsilon = 1e-12);
        let f = array![[2.0]];
        let g = gradient_proxy(p.view(), &[0], Some(f.view()), ProxyMode::Full).unwrap();
        let expect = [-0.6, 0.6, -0.3, 0.3];
        for (a, b) in g.0.row(0).iter().zip(expect) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        let confident = gradient_proxy(array![[0.0, 1.0]].view(), &[1], None, ProxyMode::Bias).unwrap();
        assert!(confident.0.iter().all(|&v| v == 0.0));
        assert!(matches!(
            gradient_proxy(p.view(), &[0], None, ProxyMode::Full),
            Err(Error::MissingInput(_))
        ));
    }

    #[test]
    fn random_exhaustion_and_determinism() {
        let mut all = select_random(5, 5, 3).indices;
        all.sort();
        assert_eq!(all, vec![0, 1, 2, 3, 4]);
        assert!(select_random(5, 0, 3).is_empty());
        assert_eq!(select_random(50, 7, 11), select_random(50, 7, 11));
        assert_eq!(select_random(3, 10, 1).len(), 3);
    }

    #[test]
    fn kcenter_line_example() {
        let pts = array![[0.0], [1.0], [2.0], [10.0]];
        let c = Centroid(array![3.25]);
        let s = select_kcenter(pts.view(), 2, &c).unwrap();
        assert_eq!(s.indices, vec![2, 3]);
        assert_eq!(covering_radius(pts.view(), &s.indices), 2.0);
        let all = select_kcenter(pts.view(), 4, &c).unwrap();
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn kcenter_identical_points() {
        let pts = array![[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]];
        let c = Centroid(array![1.0, 1.0]);
        let s = select_kcenter(pts.view(), 2, &c).unwrap();
        assert_eq!(s.indices, vec![0, 1]);
        assert_eq!(covering_radius(pts.view(), &s.indices), 0.0);
    }

    #[test]
    fn least_confidence_examples() {
        let p = array![[0.9, 0.1], [0.6, 0.4], [0.5, 0.5]];
        assert_eq!(select_least_confidence(p.view(), 1).unwrap().indices, vec![2]);
        assert_eq!(select_least_confidence(p.view(), 3).unwrap().len(), 3);
        let tie = array![[0.6, 0.4], [0.4, 0.6]];
        assert_eq!(select_least_confidence(tie.view(), 1).unwrap().indices, vec![0]);
    }

    #[test]
    fn craig_example() {
        let s = example_sim();
        let sel = select_craig(&s, 2).unwrap();
        assert_eq!(sel.indices, vec![0, 2]);
        assert_abs_diff_eq!(facility_value(&s, &sel.indices), 3.7, epsilon = 1e-12);
        assert_eq!(sel.weights, Some(vec![2.0, 2.0]));
    }

    #[test]
    fn craig_full_and_single() {
        let s = example_sim();
        let full = select_craig(&s, 4).unwrap();
        assert_abs_diff_eq!(facility_value(&s, &full.indices), 4.0, epsilon = 1e-12);
        assert_eq!(full.weights, Some(vec![1.0; 4]));
        let one = select_craig(&s, 1).unwrap();
        assert_eq!(one.indices, vec![0]);
        assert_eq!(one.weights, Some(vec![4.0]));
    }

    #[test]
    fn graphcut_example() {
        let s = example_sim();
        assert_eq!(select_graphcut(&s, 2, 2.0).unwrap().indices, vec![0, 2]);
        // lambda 0 keeps the largest row sums
        assert_eq!(select_graphcut(&s, 2, 0.0).unwrap().indices, vec![0, 1]);
        assert_eq!(select_graphcut(&s, 1, 100.0).unwrap().indices, vec![0]);
        assert!(select_graphcut(&s, 1, -1.0).is_err());
    }

    #[test]
    fn moderate_examples() {
        let pts = array![[1.0], [2.0], [3.0], [4.0], [5.0]];
        let c = Centroid(array![0.0]);
        assert_eq!(select_moderate(pts.view(), 2, &c).unwrap().indices, vec![2, 1]);
        let ring = array![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        let c = Centroid(array![0.0, 0.0]);
        assert_eq!(select_moderate(ring.view(), 3, &c).unwrap().indices, vec![0, 1, 2]);
        assert_eq!(select_moderate(pts.view(), 9, &Centroid(array![0.0])).unwrap().len(), 5);
    }

    #[test]
    fn empty_groups_rejected() {
        let empty = Array2::<f64>::zeros((0, 1));
        let c = Centroid(array![0.0]);
        assert!(select_kcenter(empty.view(), 1, &c).is_err());
        assert!(select_moderate(empty.view(), 1, &c).is_err());
        assert!(select_least_confidence(empty.view(), 1).is_err());
        let s = SimilarityMatrix::from_raw(Array2::zeros((0, 0))).unwrap();
        assert!(select_craig(&s, 1).is_err());
    }

    #[test]
    fn from_raw_validation() {
        assert!(SimilarityMatrix::from_raw(array![[1.0, 0.5], [0.4, 1.0]]).is_err());
        assert!(SimilarityMatrix::from_raw(array![[1.0, -0.5], [-0.5, 1.0]]).is_err());
        assert!(SimilarityMatrix::from_raw(Array2::zeros((2, 3))).is_err());
    }

    #[test]
    fn weights_tie_to_lowest_selected() {
        // sample 1 is equally similar to selected 0 and 2
        let s = SimilarityMatrix::from_raw(array![[1.0, 0.5, 0.0], [0.5, 1.0, 0.5], [0.0, 0.5, 1.0]]).unwrap();
        assert_eq!(facility_weights(&s, &[2, 0]), vec![1.0, 2.0]);
    }
}
