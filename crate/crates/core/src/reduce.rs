//! PCA and dimension selection.
//!
//! Covariance uses divisor `n`. Each principal direction is sign-normalized so
//! that its largest-magnitude coordinate is positive, which makes projections
//! reproducible across runs and platforms.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PcaMode {
    None,
    Most,
    Least,
}

impl FromStr for PcaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(PcaMode::None),
            "most" => Ok(PcaMode::Most),
            "least" => Ok(PcaMode::Least),
            other => Err(Error::InvalidParameter(format!("unknown pca mode {other:?}"))),
        }
    }
}

impl fmt::Display for PcaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PcaMode::None => "none",
            PcaMode::Most => "most",
            PcaMode::Least => "least",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    /// Per-coordinate mean, length K.
    pub mean: Array1<f64>,
    /// K x K, one principal direction per row, highest variance first.
    pub components: Array2<f64>,
    /// Variance along each direction, descending and clamped at zero.
    pub variances: Array1<f64>,
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn explained_variance_ratio(&self) -> Array1<f64> {
        let total = self.variances.sum();
        if total > 0.0 {
            &self.variances / total
        } else {
            Array1::zeros(self.variances.len())
        }
    }

    /// Coordinates of each row along every principal direction (n x K).
    pub fn transform(&self, features: ArrayView2<f64>) -> Array2<f64> {
        let centered = &features - &self.mean.view().insert_axis(Axis(0));
        centered.dot(&self.components.t())
    }

    pub fn inverse_transform(&self, projections: ArrayView2<f64>) -> Array2<f64> {
        projections.dot(&self.components) + &self.mean.view().insert_axis(Axis(0))
    }
}

/// Dimension-reduced features together with how they were produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedFeatures {
    pub data: Array2<f64>,
    pub mode: PcaMode,
    pub k: usize,
}

/// Fits PCA on the rows of `features`.
pub fn fit_pca(features: ArrayView2<f64>) -> Result<PcaModel> {
    let (n, dim) = features.dim();
    if n == 0 {
        return Err(Error::EmptyGroup);
    }
    if features.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("non-finite feature value".into()));
    }
    let mean = features.mean_axis(Axis(0)).expect("n >= 1");
    let centered = &features - &mean.view().insert_axis(Axis(0));
    let cov = centered.t().dot(&centered) / n as f64;

    if cov.iter().all(|&c| c == 0.0) {
        return Ok(PcaModel {
            mean,
            components: Array2::eye(dim),
            variances: Array1::zeros(dim),
        });
    }

    let eig = SymmetricEigen::new(DMatrix::from_fn(dim, dim, |i, j| cov[[i, j]]));
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut components = Array2::zeros((dim, dim));
    let mut variances = Array1::zeros(dim);
    for (row, &col) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(col);
        let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        // first coordinate within rounding of the peak decides the sign
        let pivot = v
            .iter()
            .position(|x| x.abs() >= peak - 1e-12)
            .expect("non-empty eigenvector");
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..dim {
            components[[row, j]] = sign * v[j];
        }
        variances[row] = eig.eigenvalues[col].max(0.0);
    }
    Ok(PcaModel {
        mean,
        components,
        variances,
    })
}

/// Projects onto the `k` highest- or lowest-variance directions. Mode `None`
/// returns the features unchanged and ignores `k`.
pub fn select_dimensions(
    model: &PcaModel,
    features: ArrayView2<f64>,
    mode: PcaMode,
    k: usize,
) -> Result<ReducedFeatures> {
    let dim = model.dim();
    if features.ncols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "model has {} dimensions, features have {}",
            dim,
            features.ncols()
        )));
    }
    if mode == PcaMode::None {
        return Ok(ReducedFeatures {
            data: features.to_owned(),
            mode,
            k: dim,
        });
    }
    if k == 0 || k > dim {
        return Err(Error::InvalidParameter(format!(
            "k = {k} outside 1..={dim}"
        )));
    }
    let range = match mode {
        PcaMode::Most => 0..k,
        PcaMode::Least => dim - k..dim,
        PcaMode::None => unreachable!(),
    };
    let basis = model.components.slice(ndarray::s![range, ..]);
    let centered = &features - &model.mean.view().insert_axis(Axis(0));
    Ok(ReducedFeatures {
        data: centered.dot(&basis.t()),
        mode,
        k,
    })
}

/// Fits PCA on `features` (unless mode is `None`) and selects `k` dimensions.
pub fn reduce(features: ArrayView2<f64>, mode: PcaMode, k: usize) -> Result<ReducedFeatures> {
    if mode == PcaMode::None {
        return Ok(ReducedFeatures {
            data: features.to_owned(),
            mode,
            k: features.ncols(),
        });
    }
    let model = fit_pca(features)?;
    select_dimensions(&model, features, mode, k)
}
