//! End-to-end selection over a dataset: budget resolution, per-group
//! reduction and CDS computation, method/constraint dispatch and reporting.

use std::time::Instant;

use ndarray::{Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cds::{
    cds_histogram, cds_relation, cds_signatures, class_centroid, psi_count, CdsSignature,
};
use crate::constraints::{
    allocate_proportional, check_pairing, hard_cds_select, soft_craig_select,
    soft_graphcut_select, Constraint, GroupData, HardParams, DEFAULT_ALPHA, DEFAULT_LAMBDA,
};
use crate::data_io::{Budget, Coreset, Dataset, Provenance};
use crate::error::{Error, Result};
use crate::reduce::{reduce, PcaMode};
use crate::selectors::{
    gradient_proxy, select_craig, select_graphcut, select_kcenter, select_least_confidence,
    select_moderate, select_random, similarity_matrix, Kernel, Method, ProxyMode, Selection,
};

pub const DEFAULT_BETA: f64 = 1e-4;
pub const DEFAULT_PCA_K: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct SelectorConfig {
    pub method: Method,
    pub constraint: Constraint,
    pub budget: Budget,
    pub pca_mode: PcaMode,
    pub pca_k: usize,
    pub beta: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub balanced: bool,
    pub seed: u64,
    pub kernel: Kernel,
    pub force: bool,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        Self {
            method: Method::Random,
            constraint: Constraint::None,
            budget: Budget::Fraction(0.1),
            pca_mode: PcaMode::Most,
            pca_k: DEFAULT_PCA_K,
            beta: DEFAULT_BETA,
            alpha: DEFAULT_ALPHA,
            lambda: DEFAULT_LAMBDA,
            balanced: true,
            seed: 0,
            kernel: Kernel::default(),
            force: false,
        }
    }
}

impl SelectorConfig {
    pub fn validate(&self) -> Result<()> {
        check_pairing(self.method, self.constraint, self.force)?;
        if let Budget::Fraction(f) = self.budget {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "fractional budget {f} outside (0, 1]"
                )));
            }
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be >= 0, got {}", self.beta)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        if self.pca_mode != PcaMode::None && self.pca_k == 0 {
            return Err(Error::InvalidParameter("pca k must be >= 1".into()));
        }
        Ok(())
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            method: self.method,
            constraint: self.constraint,
            budget: self.budget,
            beta: self.beta,
            alpha: self.alpha,
            lambda: self.lambda,
            pca_mode: self.pca_mode,
            pca_k: self.pca_k,
            seed: self.seed,
        }
    }
}

fn fraction_of(f: f64, n: usize) -> usize {
    if n == 0 {
        0
    } else {
        ((f * n as f64).round() as usize).clamp(1, n)
    }
}

/// Per-group budgets. Balanced fractions round per class with a minimum of one;
/// balanced counts are apportioned by class size.
pub fn resolve_budgets(group_sizes: &[usize], budget: Budget, balanced: bool) -> Result<Vec<usize>> {
    let n: usize = group_sizes.iter().sum();
    match (budget, balanced) {
        (Budget::Fraction(f), true) => Ok(group_sizes.iter().map(|&s| fraction_of(f, s)).collect()),
        (Budget::Count(b), true) => Ok(allocate_proportional(group_sizes, b.min(n))?.amounts()),
        (Budget::Fraction(f), false) => Ok(vec![fraction_of(f, n)]),
        (Budget::Count(b), false) => Ok(vec![b.min(n)]),
    }
}

/// Seed for group `g`, independent of how many groups precede it.
pub fn group_seed(seed: u64, g: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(g as u64);
    rng.random()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitsCount {
    pub bits: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReport {
    pub class: usize,
    pub n: usize,
    pub budget: usize,
    pub psi: usize,
    pub histogram: Vec<BitsCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub per_class: Vec<ClassReport>,
    pub wall_ms: u64,
}

impl Report {
    pub fn psi_total(&self) -> usize {
        self.per_class.iter().map(|c| c.psi).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionOutcome {
    pub coreset: Coreset,
    pub report: Report,
    /// Signature of every sample, computed in the group it was selected from.
    pub signatures: Vec<CdsSignature>,
}

/// Everything computed for one group before selection.
pub struct PreparedGroup {
    pub members: Vec<usize>,
    pub reduced: Array2<f64>,
    pub probs: Option<Array2<f64>>,
    pub labels: Vec<usize>,
    pub signatures: Vec<CdsSignature>,
}

pub fn prepare_group(dataset: &Dataset, members: &[usize], config: &SelectorConfig) -> Result<PreparedGroup> {
    let features = dataset.features().select(Axis(0), members);
    if config.pca_mode != PcaMode::None && config.pca_k > features.ncols() {
        return Err(Error::InvalidParameter(format!(
            "pca k = {} exceeds feature dimension {}",
            config.pca_k,
            features.ncols()
        )));
    }
    let reduced = reduce(features.view(), config.pca_mode, config.pca_k)?.data;
    let centroid = class_centroid(reduced.view())?;
    let signatures = cds_signatures(reduced.view(), &centroid, config.beta)?;
    let probs = dataset.probs().map(|p| p.select(Axis(0), members));
    let labels = members.iter().map(|&i| dataset.labels()[i]).collect();
    Ok(PreparedGroup {
        members: members.to_vec(),
        reduced,
        probs,
        labels,
        signatures,
    })
}

/// Selects within one prepared group; positions are local to the group.
pub fn select_in_group(group: &PreparedGroup, b: usize, config: &SelectorConfig, seed: u64) -> Result<Selection> {
    let method = config.method;
    if method.needs_probs() && group.probs.is_none() {
        return Err(Error::MissingInput("probabilities (--probs) for method lc".into()));
    }
    let sim_vectors = match (&group.probs, method) {
        (Some(p), Method::Craig | Method::Gc) => Some(
            gradient_proxy(p.view(), &group.labels, Some(group.reduced.view()), ProxyMode::Full)?.0,
        ),
        _ => None,
    };
    match config.constraint {
        Constraint::Hard => {
            let data = GroupData {
                reduced: group.reduced.view(),
                probs: group.probs.as_ref().map(|p| p.view()),
                sim_vectors: sim_vectors.as_ref().map(|v| v.view()),
            };
            let params = HardParams {
                alpha: config.alpha,
                beta: config.beta,
                lambda: config.lambda,
                kernel: config.kernel,
                seed,
                force: config.force,
            };
            hard_cds_select(&data, method, b, &params)
        }
        constraint => {
            let centroid = class_centroid(group.reduced.view())?;
            match method {
                Method::Random => Ok(select_random(group.members.len(), b, seed)),
                Method::Kcg => select_kcenter(group.reduced.view(), b, &centroid),
                Method::Mds => select_moderate(group.reduced.view(), b, &centroid),
                Method::Lc => select_least_confidence(group.probs.as_ref().expect("checked").view(), b),
                Method::Craig | Method::Gc => {
                    let vectors = sim_vectors.as_ref().unwrap_or(&group.reduced);
                    let sim = similarity_matrix(vectors.view(), config.kernel)?;
                    let soft = constraint == Constraint::Soft;
                    let relation = if soft { Some(cds_relation(&group.signatures)?) } else { None };
                    match (method, relation) {
                        (Method::Craig, Some(r)) => soft_craig_select(&sim, &r, b),
                        (Method::Craig, None) => select_craig(&sim, b),
                        (_, Some(r)) => soft_graphcut_select(&sim, &r, b, config.lambda),
                        (_, None) => select_graphcut(&sim, b, config.lambda),
                    }
                }
            }
        }
    }
}

/// Runs the configured selection over `dataset`: per class in balanced mode,
/// once over all samples otherwise.
pub fn run_selection(dataset: &Dataset, config: &SelectorConfig) -> Result<SelectionOutcome> {
    config.validate()?;
    let start = Instant::now();
    let classes = dataset.class_members();
    let groups: Vec<Vec<usize>> = if config.balanced {
        classes.clone()
    } else {
        vec![(0..dataset.len()).collect()]
    };
    let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let budgets = resolve_budgets(&sizes, config.budget, config.balanced)?;

    let mut indices = Vec::new();
    let mut weights: Option<Vec<f64>> = None;
    let mut signatures: Vec<Option<CdsSignature>> = vec![None; dataset.len()];
    for (g, (members, &b)) in groups.iter().zip(&budgets).enumerate() {
        if members.is_empty() {
            continue;
        }
        let prepared = prepare_group(dataset, members, config)?;
        let sel = select_in_group(&prepared, b, config, group_seed(config.seed, g))?;
        assert_eq!(sel.len(), b.min(members.len()), "selector broke budget conservation");
        indices.extend(sel.indices.iter().map(|&p| members[p]));
        if let Some(w) = sel.weights {
            weights.get_or_insert_with(Vec::new).extend(w);
        }
        for (p, sig) in prepared.signatures.into_iter().enumerate() {
            signatures[members[p]] = Some(sig);
        }
    }
    let signatures: Vec<CdsSignature> = signatures
        .into_iter()
        .map(|s| s.expect("every sample belongs to one group"))
        .collect();

    let coreset = Coreset {
        indices,
        weights,
        provenance: config.provenance(),
    };
    coreset.validate(dataset.len())?;
    let per_class = class_reports(dataset, &signatures, &coreset.indices)?;
    Ok(SelectionOutcome {
        coreset,
        report: Report {
            per_class,
            wall_ms: start.elapsed().as_millis() as u64,
        },
        signatures,
    })
}

pub fn class_reports(
    dataset: &Dataset,
    signatures: &[CdsSignature],
    selected: &[usize],
) -> Result<Vec<ClassReport>> {
    let classes = dataset.class_members();
    let mut chosen: Vec<Vec<usize>> = vec![Vec::new(); classes.len()];
    for &i in selected {
        if i >= dataset.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: dataset.len(),
            });
        }
        chosen[dataset.labels()[i]].push(i);
    }
    classes
        .iter()
        .zip(chosen)
        .enumerate()
        .map(|(c, (members, picks))| {
            let hist = cds_histogram(signatures, &picks)?;
            Ok(ClassReport {
                class: c,
                n: members.len(),
                budget: picks.len(),
                psi: psi_count(signatures, &picks)?,
                histogram: hist
                    .iter()
                    .map(|(s, &count)| BitsCount {
                        bits: s.to_bit_string(),
                        count,
                    })
                    .collect(),
            })
        })
        .collect()
}
