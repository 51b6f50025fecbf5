//! Contributing-dimension-structure (CDS) signatures and the relations built on them.
//!
//! A sample's signature marks each reduced dimension whose absolute deviation
//! from the group centroid is strictly greater than `beta`. Two samples share a
//! CDS exactly when their signatures are equal bit vectors; two all-zero
//! signatures count as equal.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-dimension mean of a group of reduced features.
#[derive(Debug, Clone, PartialEq)]
pub struct Centroid(pub Array1<f64>);

impl Centroid {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_array(&self) -> &Array1<f64> {
        &self.0
    }
}

pub fn class_centroid(reduced: ArrayView2<f64>) -> Result<Centroid> {
    if reduced.nrows() == 0 {
        return Err(Error::EmptyGroup);
    }
    Ok(Centroid(reduced.mean_axis(Axis(0)).expect("non-empty")))
}

/// Packed bit vector, most significant bit first so that the derived ordering
/// matches lexicographic order of the bit string.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CdsSignature {
    len: usize,
    words: Vec<u64>,
}

impl CdsSignature {
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (j, &b) in bits.iter().enumerate() {
            if b {
                words[j / 64] |= 1 << (63 - j % 64);
            }
        }
        Self {
            len: bits.len(),
            words,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, j: usize) -> bool {
        assert!(j < self.len, "bit {j} out of range for length {}", self.len);
        self.words[j / 64] >> (63 - j % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.len).map(|j| self.get(j)).collect()
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len)
            .map(|j| if self.get(j) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Debug for CdsSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CdsSignature({})", self.to_bit_string())
    }
}

fn check_centroid(reduced: &ArrayView2<f64>, centroid: &Centroid) -> Result<()> {
    if reduced.ncols() != centroid.len() {
        return Err(Error::DimensionMismatch(format!(
            "features have {} dimensions, centroid has {}",
            reduced.ncols(),
            centroid.len()
        )));
    }
    Ok(())
}

pub fn cds_signatures(
    reduced: ArrayView2<f64>,
    centroid: &Centroid,
    beta: f64,
) -> Result<Vec<CdsSignature>> {
    check_centroid(&reduced, centroid)?;
    if !(beta >= 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be >= 0, got {beta}")));
    }
    let mu = centroid.as_array();
    Ok(reduced
        .rows()
        .into_iter()
        .map(|row| {
            let bits: Vec<bool> = row
                .iter()
                .zip(mu.iter())
                .map(|(f, m)| (f - m).abs() > beta)
                .collect();
            CdsSignature::from_bits(&bits)
        })
        .collect())
}

/// Pairwise same-CDS matrix over a group of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct CdsRelation {
    matrix: Array2<u8>,
    group: Vec<usize>,
    type_of: Vec<usize>,
}

impl CdsRelation {
    pub fn len(&self) -> usize {
        self.type_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.type_of.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.matrix[[i, j]] == 1
    }

    pub fn matrix(&self) -> &Array2<u8> {
        &self.matrix
    }

    /// Sample indices (into the source dataset) this relation covers.
    pub fn group(&self) -> &[usize] {
        &self.group
    }

    pub fn with_group(mut self, group: Vec<usize>) -> Result<Self> {
        if group.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "relation covers {} samples, group lists {}",
                self.len(),
                group.len()
            )));
        }
        self.group = group;
        Ok(self)
    }

    /// CDS type id of every member; ids are assigned in first-appearance order.
    pub fn type_ids(&self) -> &[usize] {
        &self.type_of
    }

    pub fn num_types(&self) -> usize {
        self.type_of.iter().max().map_or(0, |&t| t + 1)
    }

    /// Relation where every member has its own CDS.
    pub fn all_distinct(m: usize) -> Self {
        Self {
            matrix: Array2::eye(m),
            group: (0..m).collect(),
            type_of: (0..m).collect(),
        }
    }
}

fn assign_types(signatures: &[CdsSignature]) -> Vec<usize> {
    let mut ids: HashMap<&CdsSignature, usize> = HashMap::new();
    signatures
        .iter()
        .map(|s| {
            let next = ids.len();
            *ids.entry(s).or_insert(next)
        })
        .collect()
}

fn check_lengths(signatures: &[CdsSignature]) -> Result<()> {
    if let Some(first) = signatures.first() {
        if let Some(bad) = signatures.iter().find(|s| s.len() != first.len()) {
            return Err(Error::DimensionMismatch(format!(
                "signature lengths {} and {} differ",
                first.len(),
                bad.len()
            )));
        }
    }
    Ok(())
}

pub fn cds_relation(signatures: &[CdsSignature]) -> Result<CdsRelation> {
    check_lengths(signatures)?;
    let type_of = assign_types(signatures);
    let m = signatures.len();
    let matrix = Array2::from_shape_fn((m, m), |(i, j)| u8::from(type_of[i] == type_of[j]));
    Ok(CdsRelation {
        matrix,
        group: (0..m).collect(),
        type_of,
    })
}

/// Groups member positions by identical signature, in first-appearance order.
pub fn partition_by_signature(signatures: &[CdsSignature]) -> Vec<Vec<usize>> {
    let type_of = assign_types(signatures);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &t) in type_of.iter().enumerate() {
        if t == groups.len() {
            groups.push(Vec::new());
        }
        groups[t].push(i);
    }
    groups
}

fn check_subset(signatures: &[CdsSignature], subset: &[usize]) -> Result<()> {
    match subset.iter().find(|&&i| i >= signatures.len()) {
        Some(&index) => Err(Error::IndexOutOfRange {
            index,
            len: signatures.len(),
        }),
        None => Ok(()),
    }
}

/// Number of distinct CDS types among `subset`.
pub fn psi_count(signatures: &[CdsSignature], subset: &[usize]) -> Result<usize> {
    check_subset(signatures, subset)?;
    Ok(subset
        .iter()
        .map(|&i| &signatures[i])
        .collect::<HashSet<_>>()
        .len())
}

pub fn cds_histogram(
    signatures: &[CdsSignature],
    subset: &[usize],
) -> Result<BTreeMap<CdsSignature, usize>> {
    check_subset(signatures, subset)?;
    let mut hist = BTreeMap::new();
    for &i in subset {
        *hist.entry(signatures[i].clone()).or_insert(0) += 1;
    }
    Ok(hist)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramEntry {
    pub signature_bits: String,
    pub count: usize,
}

pub fn histogram_entries(hist: &BTreeMap<CdsSignature, usize>) -> Vec<HistogramEntry> {
    hist.iter()
        .map(|(sig, &count)| HistogramEntry {
            signature_bits: sig.to_bit_string(),
            count,
        })
        .collect()
}

/// All absolute deviations `|f_ij - mu_j|`, row-major.
pub fn deviations(reduced: ArrayView2<f64>, centroid: &Centroid) -> Result<Vec<f64>> {
    check_centroid(&reduced, centroid)?;
    let mu = centroid.as_array();
    Ok(reduced
        .rows()
        .into_iter()
        .flat_map(|row| {
            row.iter()
                .zip(mu.iter())
                .map(|(f, m)| (f - m).abs())
                .collect::<Vec<_>>()
        })
        .collect())
}

/// Fraction of deviations strictly above `beta`.
pub fn ones_fraction(devs: &[f64], beta: f64) -> f64 {
    if devs.is_empty() {
        return 0.0;
    }
    devs.iter().filter(|&&d| d > beta).count() as f64 / devs.len() as f64
}

/// Smallest count `r` with `r / total >= ratio`, evaluated in floating point.
fn required_ones(total: usize, ratio: f64) -> usize {
    let n = total as f64;
    let mut r = ((ratio * n).ceil() as usize).min(total);
    while r > 0 && (r - 1) as f64 / n >= ratio {
        r -= 1;
    }
    while r < total && (r as f64) / n < ratio {
        r += 1;
    }
    r
}

/// Largest threshold whose ones-fraction is still at least `ratio`, computed
/// exactly from the sorted deviation multiset.
pub fn suggest_beta_from_deviations(devs: &[f64], ratio: f64) -> Result<f64> {
    if devs.is_empty() {
        return Err(Error::EmptyGroup);
    }
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::InvalidParameter(format!("ratio {ratio} outside (0, 1]")));
    }
    let mut sorted = devs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total = sorted.len();
    let r = required_ones(total, ratio);
    // the r-th largest deviation must stay strictly above beta
    let pivot = sorted[total - r];
    if pivot <= 0.0 {
        return Err(Error::RatioUnattainable {
            requested: ratio,
            max_attainable: ones_fraction(&sorted, 0.0),
        });
    }
    Ok(pivot.next_down())
}

pub fn suggest_beta(reduced: ArrayView2<f64>, centroid: &Centroid, ratio: f64) -> Result<f64> {
    suggest_beta_from_deviations(&deviations(reduced, centroid)?, ratio)
}

/// The search grid `{10 b, b, 0.1 b}` around a suggested threshold.
pub fn beta_grid(beta_tilde: f64) -> [f64; 3] {
    [10.0 * beta_tilde, beta_tilde, 0.1 * beta_tilde]
}

/// Largest candidate whose ones-fraction reaches `ratio`, if any.
pub fn best_beta_on_grid(devs: &[f64], ratio: f64, grid: &[f64]) -> Option<f64> {
    grid.iter()
        .copied()
        .filter(|&b| ones_fraction(devs, b) >= ratio)
        .max_by(f64::total_cmp)
}
