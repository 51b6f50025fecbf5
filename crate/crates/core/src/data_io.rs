//! Interchange formats: the `CDSF` binary tensor container, a CSV fallback,
//! dataset loading/validation and coreset JSON.
//!
//! Container layout (all integers little-endian):
//!
//! ```text
//! 0..4    magic "CDSF"
//! 4..8    version u32 (= 1)
//! 8..12   dtype u32 (1 = f32, 2 = u32)
//! 12..16  ndim u32 (1 or 2)
//! ..      ndim x u64 dims
//! ..      row-major payload, densely packed
//! ```

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::constraints::Constraint;
use crate::error::{Error, Result};
use crate::reduce::PcaMode;
use crate::selectors::Method;

pub const MAGIC: &[u8; 4] = b"CDSF";
pub const VERSION: u32 = 1;
pub const PROB_SUM_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum DType {
    F32 = 1,
    U32 = 2,
}

impl DType {
    fn from_tag(tag: u32) -> Result<Self> {
        match tag {
            1 => Ok(DType::F32),
            2 => Ok(DType::U32),
            other => Err(Error::Format(format!("unknown dtype tag {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TensorData {
    F32(Vec<f32>),
    U32(Vec<u32>),
}

impl TensorData {
    pub fn len(&self) -> usize {
        match self {
            TensorData::F32(v) => v.len(),
            TensorData::U32(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dtype(&self) -> DType {
        match self {
            TensorData::F32(_) => DType::F32,
            TensorData::U32(_) => DType::U32,
        }
    }
}

/// A 1-D or 2-D tensor as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: TensorData,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: TensorData) -> Result<Self> {
        if shape.is_empty() || shape.len() > 2 {
            return Err(Error::Format(format!(
                "ndim must be 1 or 2, got {}",
                shape.len()
            )));
        }
        let expected = element_count(&shape)?;
        if expected != data.len() {
            return Err(Error::Format(format!(
                "shape {:?} holds {} elements, data has {}",
                shape,
                expected,
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn from_matrix(matrix: &Array2<f64>) -> Self {
        let (rows, cols) = matrix.dim();
        let data = matrix.iter().map(|&v| v as f32).collect();
        Self {
            shape: vec![rows, cols],
            data: TensorData::F32(data),
        }
    }

    pub fn from_labels(labels: &[usize]) -> Self {
        Self {
            shape: vec![labels.len()],
            data: TensorData::U32(labels.iter().map(|&l| l as u32).collect()),
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &TensorData {
        &self.data
    }

    pub fn dtype(&self) -> DType {
        self.data.dtype()
    }

    /// Interprets the tensor as a real matrix; 1-D tensors become a single column.
    pub fn to_matrix(&self) -> Array2<f64> {
        let (rows, cols) = match self.shape.as_slice() {
            [n] => (*n, 1),
            [r, c] => (*r, *c),
            _ => unreachable!("ndim validated on construction"),
        };
        let values: Vec<f64> = match &self.data {
            TensorData::F32(v) => v.iter().map(|&x| x as f64).collect(),
            TensorData::U32(v) => v.iter().map(|&x| x as f64).collect(),
        };
        Array2::from_shape_vec((rows, cols), values).expect("shape checked on construction")
    }

    /// Interprets the tensor as a label vector. Accepts a vector or a single
    /// column; real-valued entries must be non-negative integers.
    pub fn to_labels(&self) -> Result<Vec<usize>> {
        match self.shape.as_slice() {
            [_] => {}
            [_, 1] => {}
            other => {
                return Err(Error::InvalidDataset(format!(
                    "labels must be a vector, got shape {other:?}"
                )))
            }
        }
        match &self.data {
            TensorData::U32(v) => Ok(v.iter().map(|&x| x as usize).collect()),
            TensorData::F32(v) => v
                .iter()
                .map(|&x| {
                    if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f32 {
                        Ok(x as usize)
                    } else {
                        Err(Error::InvalidDataset(format!("label {x} is not a class id")))
                    }
                })
                .collect(),
        }
    }
}

fn element_count(shape: &[usize]) -> Result<usize> {
    shape.iter().try_fold(1usize, |acc, &d| {
        acc.checked_mul(d)
            .ok_or_else(|| Error::Format(format!("shape {shape:?} overflows")))
    })
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| e.eq_ignore_ascii_case("csv"))
        .unwrap_or(false)
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(MAGIC) {
        decode_binary(&bytes)
    } else if is_csv(path) {
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| Error::Format(format!("csv is not utf-8: {e}")))?;
        parse_csv(text)
    } else {
        Err(Error::Format(format!(
            "{} has neither the CDSF magic nor a .csv extension",
            path.display()
        )))
    }
}

pub fn write_tensor(tensor: &Tensor, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let TensorData::F32(v) = &tensor.data {
        if let Some(pos) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
    }
    let bytes = if is_csv(path) {
        format_csv(tensor).into_bytes()
    } else {
        encode_binary(tensor)
    };
    write_atomic(path, &bytes)
}

pub fn encode_binary(tensor: &Tensor) -> Vec<u8> {
    let payload = tensor.data.len() * 4;
    let mut out = Vec::with_capacity(16 + 8 * tensor.shape.len() + payload);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(tensor.dtype() as u32).to_le_bytes());
    out.extend_from_slice(&(tensor.shape.len() as u32).to_le_bytes());
    for &d in &tensor.shape {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    match &tensor.data {
        TensorData::F32(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        TensorData::U32(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
    }
    out
}

fn read_u32(bytes: &[u8], at: usize) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
        .ok_or_else(|| Error::Format("truncated header".into()))
}

pub fn decode_binary(bytes: &[u8]) -> Result<Tensor> {
    if !bytes.starts_with(MAGIC) {
        return Err(Error::Format("missing CDSF magic".into()));
    }
    let version = read_u32(bytes, 4)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let dtype = DType::from_tag(read_u32(bytes, 8)?)?;
    let ndim = read_u32(bytes, 12)? as usize;
    if ndim == 0 || ndim > 2 {
        return Err(Error::Format(format!("ndim must be 1 or 2, got {ndim}")));
    }
    let header_len = 16 + 8 * ndim;
    if bytes.len() < header_len {
        return Err(Error::Format("truncated dims".into()));
    }
    let shape: Vec<usize> = (0..ndim)
        .map(|i| {
            let at = 16 + 8 * i;
            let d = u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
            usize::try_from(d).map_err(|_| Error::Format(format!("dim {d} too large")))
        })
        .collect::<Result<_>>()?;

    let payload = &bytes[header_len..];
    let expected = element_count(&shape)?
        .checked_mul(4)
        .ok_or_else(|| Error::Format("payload size overflows".into()))?;
    if payload.len() != expected {
        return Err(Error::SizeMismatch {
            shape,
            expected,
            found: payload.len(),
        });
    }
    let words = payload.chunks_exact(4).map(|c| c.try_into().unwrap());
    let data = match dtype {
        DType::F32 => {
            let v: Vec<f32> = words.map(f32::from_le_bytes).collect();
            if let Some(pos) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite(pos));
            }
            TensorData::F32(v)
        }
        DType::U32 => TensorData::U32(words.map(u32::from_le_bytes).collect()),
    };
    Ok(Tensor { shape, data })
}

/// Parses comma-separated decimals into a 2-D f32 tensor. Blank lines are skipped.
pub fn parse_csv(text: &str) -> Result<Tensor> {
    let mut cols: Option<usize> = None;
    let mut rows = 0usize;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let before = values.len();
        for field in line.split(',') {
            let v: f32 = field.trim().parse().map_err(|_| {
                Error::Format(format!("line {}: cannot parse {:?}", lineno + 1, field))
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite(values.len()));
            }
            values.push(v);
        }
        let width = values.len() - before;
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => {
                return Err(Error::Format(format!(
                    "line {}: expected {} fields, found {}",
                    lineno + 1,
                    c,
                    width
                )))
            }
            _ => {}
        }
        rows += 1;
    }
    Ok(Tensor {
        shape: vec![rows, cols.unwrap_or(0)],
        data: TensorData::F32(values),
    })
}

pub fn format_csv(tensor: &Tensor) -> String {
    let cols = match tensor.shape.as_slice() {
        [_] => 1,
        [_, c] => *c,
        _ => unreachable!(),
    };
    let fields: Vec<String> = match &tensor.data {
        TensorData::F32(v) => v.iter().map(|x| x.to_string()).collect(),
        TensorData::U32(v) => v.iter().map(|x| x.to_string()).collect(),
    };
    let mut out = String::new();
    if cols == 0 {
        return out;
    }
    for row in fields.chunks(cols) {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Writes through a sibling temp file and renames, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    let mut file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    file.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    file.sync_all().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// The universe of samples: embeddings, labels and optional class probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Vec<usize>,
    probs: Option<Array2<f64>>,
    num_classes: usize,
}

impl Dataset {
    /// Validates and builds a dataset. The class count is the probability
    /// width when probabilities are given, otherwise `max(label) + 1`.
    pub fn new(
        features: Array2<f64>,
        labels: Vec<usize>,
        probs: Option<Array2<f64>>,
    ) -> Result<Self> {
        let n = features.nrows();
        if labels.len() != n {
            return Err(Error::InvalidDataset(format!(
                "{} feature rows but {} labels",
                n,
                labels.len()
            )));
        }
        if let Some(pos) = features.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        let from_labels = labels.iter().max().map_or(0, |&m| m + 1);
        let num_classes = match &probs {
            Some(p) => {
                if p.nrows() != n {
                    return Err(Error::InvalidDataset(format!(
                        "{} feature rows but {} probability rows",
                        n,
                        p.nrows()
                    )));
                }
                if let Some(pos) = p.iter().position(|x| !x.is_finite()) {
                    return Err(Error::NonFinite(pos));
                }
                for (i, row) in p.rows().into_iter().enumerate() {
                    let sum: f64 = row.sum();
                    if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
                        return Err(Error::InvalidDataset(format!(
                            "probability row {i} sums to {sum}"
                        )));
                    }
                }
                let width = p.ncols();
                if from_labels > width {
                    return Err(Error::InvalidDataset(format!(
                        "label {} out of range for {} probability columns",
                        from_labels - 1,
                        width
                    )));
                }
                width
            }
            None => from_labels,
        };
        Ok(Self {
            features,
            labels,
            probs,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn probs(&self) -> Option<&Array2<f64>> {
        self.probs.as_ref()
    }

    /// Sample indices of every class `0..C`, in ascending order.
    pub fn class_members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.num_classes];
        for (i, &l) in self.labels.iter().enumerate() {
            members[l].push(i);
        }
        members
    }

    pub fn labels_array(&self) -> Array1<usize> {
        Array1::from(self.labels.clone())
    }
}

pub fn load_dataset(
    features_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
    probs_path: Option<&Path>,
) -> Result<Dataset> {
    let features = read_tensor(features_path)?;
    if features.dtype() != DType::F32 || features.shape().len() != 2 {
        return Err(Error::InvalidDataset(format!(
            "features must be a 2-D f32 matrix, got {:?} {:?}",
            features.dtype(),
            features.shape()
        )));
    }
    let labels = read_tensor(labels_path)?.to_labels()?;
    let probs = match probs_path {
        Some(p) => {
            let t = read_tensor(p)?;
            if t.dtype() != DType::F32 || t.shape().len() != 2 {
                return Err(Error::InvalidDataset(
                    "probabilities must be a 2-D f32 matrix".into(),
                ));
            }
            Some(t.to_matrix())
        }
        None => None,
    };
    Dataset::new(features.to_matrix(), labels, probs)
}

pub fn save_dataset(
    dataset: &Dataset,
    features_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
    probs_path: Option<&Path>,
) -> Result<()> {
    write_tensor(&Tensor::from_matrix(dataset.features()), features_path)?;
    write_tensor(&Tensor::from_labels(dataset.labels()), labels_path)?;
    if let (Some(path), Some(p)) = (probs_path, dataset.probs()) {
        write_tensor(&Tensor::from_matrix(p), path)?;
    }
    Ok(())
}

/// Requested coreset size: a fraction of the data in (0, 1] or an absolute count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Budget {
    Count(usize),
    Fraction(f64),
}

impl std::str::FromStr for Budget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(count) = s.parse::<usize>() {
            return Ok(Budget::Count(count));
        }
        let frac: f64 = s
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("budget {s:?} is not a number")))?;
        if frac > 0.0 && frac <= 1.0 {
            Ok(Budget::Fraction(frac))
        } else {
            Err(Error::InvalidParameter(format!(
                "fractional budget {frac} outside (0, 1]"
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub method: Method,
    pub constraint: Constraint,
    pub budget: Budget,
    pub beta: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub pca_mode: PcaMode,
    pub pca_k: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coreset {
    pub indices: Vec<usize>,
    pub weights: Option<Vec<f64>>,
    pub provenance: Provenance,
}

impl Coreset {
    /// Checks the indices are distinct and in `[0, n)` and that weights align and are positive.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = HashSet::with_capacity(self.indices.len());
        for &i in &self.indices {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            if !seen.insert(i) {
                return Err(Error::InvalidDataset(format!("duplicate coreset index {i}")));
            }
        }
        if let Some(w) = &self.weights {
            if w.len() != self.indices.len() {
                return Err(Error::InvalidDataset(format!(
                    "{} weights for {} indices",
                    w.len(),
                    self.indices.len()
                )));
            }
            if let Some(bad) = w.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
                return Err(Error::InvalidDataset(format!("non-positive weight {bad}")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path.as_ref(), s.as_bytes())
}

pub fn read_coreset(path: impl AsRef<Path>) -> Result<Coreset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn csv_literal_parse() {
        let t = parse_csv("1.0,2.0\n3.0,4.0").unwrap();
        assert_eq!(t.shape(), &[2, 2]);
        assert_eq!(t.to_matrix(), array![[1.0, 2.0], [3.0, 4.0]]);
    }

    #[test]
    fn csv_ragged_rows_rejected() {
        assert!(matches!(parse_csv("1,2\n3"), Err(Error::Format(_))));
    }

    #[test]
    fn declared_shape_larger_than_payload() {
        let t = Tensor::new(vec![3, 4], TensorData::F32(vec![0.5; 12])).unwrap();
        let mut bytes = encode_binary(&t);
        // rewrite dims to 4x4 while keeping 12 floats
        bytes[16..24].copy_from_slice(&4u64.to_le_bytes());
        match decode_binary(&bytes) {
            Err(Error::SizeMismatch {
                expected, found, ..
            }) => {
                assert_eq!(expected, 64);
                assert_eq!(found, 48);
            }
            other => panic!("expected size mismatch, got {other:?}"),
        }
    }

    #[test]
    fn one_by_one_matrix_layout() {
        let t = Tensor::new(vec![1, 1], TensorData::F32(vec![0.0])).unwrap();
        let bytes = encode_binary(&t);
        // 16 fixed header bytes + two u64 dims, then one f32
        assert_eq!(bytes.len(), 16 + 16 + 4);
        assert_eq!(&bytes[0..4], b"CDSF");
        assert_eq!(&bytes[4..8], &1u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &1u32.to_le_bytes());
        assert_eq!(&bytes[12..16], &2u32.to_le_bytes());
        assert_eq!(&bytes[32..36], &[0, 0, 0, 0]);
    }

    #[test]
    fn label_vector_layout() {
        let t = Tensor::from_labels(&[0, 1, 2]);
        let bytes = encode_binary(&t);
        assert_eq!(&bytes[8..12], &2u32.to_le_bytes());
        assert_eq!(bytes.len() - (16 + 8), 12);
        assert_eq!(decode_binary(&bytes).unwrap(), t);
    }

    #[test]
    fn empty_matrix_round_trip() {
        let t = Tensor::new(vec![0, 5], TensorData::F32(vec![])).unwrap();
        let bytes = encode_binary(&t);
        assert_eq!(bytes.len(), 32);
        let back = decode_binary(&bytes).unwrap();
        assert_eq!(back.shape(), &[0, 5]);
        assert!(back.data().is_empty());
    }

    #[test]
    fn non_finite_payload_rejected() {
        let t = Tensor::new(vec![2], TensorData::F32(vec![1.0, 2.0])).unwrap();
        let mut bytes = encode_binary(&t);
        let at = bytes.len() - 4;
        bytes[at..].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(matches!(decode_binary(&bytes), Err(Error::NonFinite(1))));
    }

    #[test]
    fn bad_header_fields() {
        let t = Tensor::from_labels(&[1]);
        let mut bytes = encode_binary(&t);
        bytes[8..12].copy_from_slice(&7u32.to_le_bytes());
        assert!(matches!(decode_binary(&bytes), Err(Error::Format(_))));
        let mut bytes = encode_binary(&t);
        bytes[12..16].copy_from_slice(&3u32.to_le_bytes());
        assert!(matches!(decode_binary(&bytes), Err(Error::Format(_))));
        assert!(decode_binary(b"CDSF\x01\0\0").is_err());
    }

    #[test]
    fn dataset_shape_bookkeeping() {
        let features = Array2::from_shape_fn((6, 4), |(i, j)| (i * 4 + j) as f64);
        let d = Dataset::new(features, vec![0, 0, 0, 1, 1, 1], None).unwrap();
        assert_eq!(d.len(), 6);
        assert_eq!(d.num_classes(), 2);
        assert_eq!(d.class_members(), vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn probs_row_must_sum_to_one() {
        let features = Array2::zeros((1, 2));
        let err = Dataset::new(features, vec![0], Some(array![[0.6, 0.6]])).unwrap_err();
        assert!(matches!(err, Error::InvalidDataset(_)));
    }

    #[test]
    fn label_beyond_probs_width() {
        let features = Array2::zeros((2, 1));
        let probs = array![[0.5, 0.5], [0.5, 0.5]];
        let err = Dataset::new(features, vec![0, 2], Some(probs)).unwrap_err();
        assert!(err.to_string().contains("out of range"));
    }

    #[test]
    fn probs_width_wins_class_count() {
        let features = Array2::zeros((2, 1));
        let probs = array![[0.2, 0.3, 0.5], [0.5, 0.5, 0.0]];
        let d = Dataset::new(features, vec![0, 1], Some(probs)).unwrap();
        assert_eq!(d.num_classes(), 3);
    }

    #[test]
    fn row_count_mismatch() {
        let err = Dataset::new(Array2::zeros((3, 2)), vec![0, 1], None).unwrap_err();
        assert!(matches!(err, Error::InvalidDataset(_)));
    }

    #[test]
    fn budget_parsing() {
        assert_eq!("0.1".parse::<Budget>().unwrap(), Budget::Fraction(0.1));
        assert_eq!("1.0".parse::<Budget>().unwrap(), Budget::Fraction(1.0));
        assert_eq!("25".parse::<Budget>().unwrap(), Budget::Count(25));
        assert!("1.5".parse::<Budget>().is_err());
        assert!("0.0".parse::<Budget>().is_err());
    }

    #[test]
    fn coreset_validation() {
        let prov = Provenance {
            method: Method::Random,
            constraint: Constraint::None,
            budget: Budget::Count(2),
            beta: 1e-4,
            alpha: 0.5,
            lambda: 2.0,
            pca_mode: PcaMode::Most,
            pca_k: 10,
            seed: 0,
        };
        let mut c = Coreset {
            indices: vec![0, 3],
            weights: Some(vec![1.0, 2.0]),
            provenance: prov,
        };
        assert!(c.validate(4).is_ok());
        assert!(c.validate(3).is_err());
        c.weights = Some(vec![1.0, 0.0]);
        assert!(c.validate(4).is_err());
        c.weights = None;
        c.indices = vec![1, 1];
        assert!(c.validate(4).is_err());
    }
}
