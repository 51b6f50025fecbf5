//! Synthetic data, a nearest-centroid proxy evaluator, exhaustive oracles,
//! the more-S-CDS / more-D-CDS / more-random analysis strategies and the
//! experiment grid runner.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use itertools::Itertools;
use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cds::{cds_relation, cds_signatures, class_centroid, psi_count, CdsSignature};
use crate::constraints::{plan_two_stage, Constraint, Stage2Rule};
use crate::data_io::{Budget, Dataset};
use crate::error::{Error, Result};
use crate::pipeline::{class_reports, group_seed, resolve_budgets, run_selection, BitsCount, SelectorConfig};
use crate::selectors::{
    covering_radius, facility_value, select_craig, select_kcenter, select_random, Method, Selection,
    SimilarityMatrix,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub classes: usize,
    pub n_per_class: usize,
    pub dims: usize,
    /// Distance of every class center from the origin.
    pub separation: f64,
    /// Per-coordinate standard deviation within a class.
    pub noise: f64,
    pub seed: u64,
}

impl MixtureSpec {
    /// The desk-scale mixture used by the figure-3a suite: 5 classes of 500 samples in 16 dimensions.
    pub fn standard(seed: u64) -> Self {
        Self {
            classes: 5,
            n_per_class: 500,
            dims: 16,
            separation: 2.5,
            noise: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes == 0 || self.n_per_class == 0 || self.dims == 0 {
            return Err(Error::InvalidParameter("mixture counts must be >= 1".into()));
        }
        if !(self.separation > 0.0 && self.noise > 0.0) {
            return Err(Error::InvalidParameter(
                "mixture separation and noise must be > 0".into(),
            ));
        }
        Ok(())
    }
}

fn mixture_centers(spec: &MixtureSpec, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let mut centers = Array2::zeros((spec.classes, spec.dims));
    for mut row in centers.rows_mut() {
        let z: Vec<f64> = (0..spec.dims).map(|_| StandardNormal.sample(rng)).collect();
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        for (r, v) in row.iter_mut().zip(z) {
            *r = spec.separation * v / norm;
        }
    }
    centers
}

fn sample_mixture(
    spec: &MixtureSpec,
    centers: &Array2<f64>,
    n_per_class: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Dataset> {
    let n = spec.classes * n_per_class;
    let mut features = Array2::zeros((n, spec.dims));
    let mut labels = Vec::with_capacity(n);
    for c in 0..spec.classes {
        for i in 0..n_per_class {
            let row = c * n_per_class + i;
            for j in 0..spec.dims {
                let z: f64 = StandardNormal.sample(rng);
                features[[row, j]] = centers[[c, j]] + spec.noise * z;
            }
            labels.push(c);
        }
    }
    let mut probs = Array2::zeros((n, spec.classes));
    for (i, x) in features.rows().into_iter().enumerate() {
        let logits: Vec<f64> = centers
            .rows()
            .into_iter()
            .map(|c| -crate::selectors::euclidean(x, c))
            .collect();
        let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = exps.iter().sum();
        for (c, e) in exps.into_iter().enumerate() {
            probs[[i, c]] = e / total;
        }
    }
    Dataset::new(features, labels, Some(probs))
}

/// Isotropic Gaussian classes around random centers; probabilities are a
/// softmax over negative center distances.
pub fn gen_gaussian_mixture(spec: &MixtureSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let centers = mixture_centers(spec, &mut rng);
    sample_mixture(spec, &centers, spec.n_per_class, &mut rng)
}

/// Train set as [`gen_gaussian_mixture`] plus a test set drawn from the same centers.
pub fn gen_train_test(spec: &MixtureSpec, test_per_class: usize) -> Result<(Dataset, Dataset)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let centers = mixture_centers(spec, &mut rng);
    let train = sample_mixture(spec, &centers, spec.n_per_class, &mut rng)?;
    let test = sample_mixture(spec, &centers, test_per_class, &mut rng)?;
    Ok((train, test))
}

/// Fits class means on the coreset rows of `train` and classifies `test` by
/// nearest mean. Classes absent from the coreset are never predicted.
pub fn nearest_centroid_accuracy(train: &Dataset, coreset: &[usize], test: &Dataset) -> Result<f64> {
    if coreset.is_empty() {
        return Err(Error::InvalidParameter("empty coreset".into()));
    }
    if test.is_empty() {
        return Err(Error::InvalidParameter("empty test set".into()));
    }
    if train.dim() != test.dim() {
        return Err(Error::DimensionMismatch(format!(
            "train has {} dimensions, test {}",
            train.dim(),
            test.dim()
        )));
    }
    let classes = train.num_classes().max(test.num_classes());
    let mut sums = Array2::<f64>::zeros((classes, train.dim()));
    let mut counts = vec![0usize; classes];
    for &i in coreset {
        if i >= train.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: train.len(),
            });
        }
        let c = train.labels()[i];
        sums.row_mut(c).scaled_add(1.0, &train.features().row(i));
        counts[c] += 1;
    }
    let centroids: Vec<(usize, Array1<f64>)> = (0..classes)
        .filter(|&c| counts[c] > 0)
        .map(|c| (c, sums.row(c).to_owned() / counts[c] as f64))
        .collect();
    let correct = test
        .features()
        .rows()
        .into_iter()
        .zip(test.labels())
        .filter(|(x, &y)| {
            let mut best = (usize::MAX, f64::INFINITY);
            for (c, mu) in &centroids {
                let d: f64 = x.iter().zip(mu.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                if d < best.1 {
                    best = (*c, d);
                }
            }
            best.0 == y
        })
        .count();
    Ok(correct as f64 / test.len() as f64)
}

pub const MAX_ORACLE_M: usize = 20;
pub const MAX_ORACLE_SUBSETS: u128 = 200_000;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn check_oracle_size(m: usize, b: usize) -> Result<()> {
    if m > MAX_ORACLE_M || binomial(m, b) > MAX_ORACLE_SUBSETS {
        return Err(Error::InstanceTooLarge(format!(
            "m = {m}, b = {b} ({} subsets)",
            binomial(m, b)
        )));
    }
    if b == 0 || b > m {
        return Err(Error::InvalidParameter(format!("need 1 <= b <= m, got b = {b}, m = {m}")));
    }
    Ok(())
}

/// Exhaustive facility-location maximum over all size-`b` subsets.
pub fn brute_force_facility_opt(sim: &SimilarityMatrix, b: usize) -> Result<(f64, Vec<usize>)> {
    let m = sim.len();
    check_oracle_size(m, b)?;
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for subset in (0..m).combinations(b) {
        let mut value = 0.0;
        for i in 0..m {
            let mut top = 0.0f64;
            for &j in &subset {
                if sim.get(i, j) > top {
                    top = sim.get(i, j);
                }
            }
            value += top;
        }
        if value > best.0 {
            best = (value, subset);
        }
    }
    Ok(best)
}

/// Exhaustive minimum covering radius over all size-`b` center sets.
pub fn brute_force_kcenter_opt(points: ArrayView2<f64>, b: usize) -> Result<(f64, Vec<usize>)> {
    let m = points.nrows();
    check_oracle_size(m, b)?;
    let m_dist = Array2::from_shape_fn((m, m), |(i, j)| {
        points
            .row(i)
            .iter()
            .zip(points.row(j).iter())
            .map(|(a, c)| (a - c) * (a - c))
            .sum::<f64>()
            .sqrt()
    });
    let mut best = (f64::INFINITY, Vec::new());
    for centers in (0..m).combinations(b) {
        let radius = (0..m)
            .map(|i| centers.iter().map(|&c| m_dist[[i, c]]).fold(f64::INFINITY, f64::min))
            .fold(0.0f64, f64::max);
        if radius < best.0 {
            best = (radius, centers);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    MoreDcds,
    MoreScds,
    MoreRandom,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::MoreDcds, Strategy::MoreScds, Strategy::MoreRandom];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::MoreDcds => "more-dcds",
            Strategy::MoreScds => "more-scds",
            Strategy::MoreRandom => "more-random",
        }
    }

    fn rule(self) -> Stage2Rule {
        match self {
            Strategy::MoreDcds => Stage2Rule::Even,
            Strategy::MoreScds => Stage2Rule::FillLargest,
            Strategy::MoreRandom => Stage2Rule::Whole,
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown strategy {s:?}")))
    }
}

fn run_strategy(features: ArrayView2<f64>, b: usize, alpha: f64, beta: f64, seed: u64, strategy: Strategy) -> Result<Selection> {
    let centroid = class_centroid(features)?;
    let plan = plan_two_stage(features, &centroid, b, alpha, beta, strategy.rule())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices = Vec::with_capacity(plan.total_budget());
    for cell in plan.cells.iter().filter(|c| c.budget > 0) {
        let pick = select_random(cell.members.len(), cell.budget, rng.random());
        indices.extend(pick.indices.into_iter().map(|p| cell.members[p]));
    }
    Ok(Selection::unweighted(indices))
}

/// Distance bins on the raw features, then as many distinct CDS as possible per bin.
pub fn strategy_more_dcds(features: ArrayView2<f64>, b: usize, alpha: f64, beta: f64, seed: u64) -> Result<Selection> {
    run_strategy(features, b, alpha, beta, seed, Strategy::MoreDcds)
}

/// Distance bins on the raw features, then each bin's budget goes to its largest CDS groups.
pub fn strategy_more_scds(features: ArrayView2<f64>, b: usize, alpha: f64, beta: f64, seed: u64) -> Result<Selection> {
    run_strategy(features, b, alpha, beta, seed, Strategy::MoreScds)
}

/// Distance bins with proportional budgets and random picks inside each bin.
pub fn strategy_more_random(features: ArrayView2<f64>, b: usize, alpha: f64, seed: u64) -> Result<Selection> {
    run_strategy(features, b, alpha, 0.0, seed, Strategy::MoreRandom)
}

/// Threshold used by the analysis strategies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaRule {
    Fixed(f64),
    /// Per-class largest beta whose ones-fraction is at least the ratio.
    Suggested(f64),
}

impl BetaRule {
    pub fn resolve(self, features: ArrayView2<f64>) -> Result<f64> {
        match self {
            BetaRule::Fixed(b) => Ok(b),
            BetaRule::Suggested(ratio) => {
                let c = class_centroid(features)?;
                crate::cds::suggest_beta(features, &c, ratio)
            }
        }
    }
}

/// Runs a strategy per class over the full feature space. Returns the selected
/// indices and the per-sample signatures used for reporting.
pub fn strategy_on_dataset(
    dataset: &Dataset,
    strategy: Strategy,
    budget: Budget,
    alpha: f64,
    beta: BetaRule,
    seed: u64,
) -> Result<(Vec<usize>, Vec<CdsSignature>)> {
    let classes = dataset.class_members();
    let sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
    let budgets = resolve_budgets(&sizes, budget, true)?;
    let mut indices = Vec::new();
    let mut signatures = vec![CdsSignature::from_bits(&[]); dataset.len()];
    for (c, (members, &b)) in classes.iter().zip(&budgets).enumerate() {
        if members.is_empty() {
            continue;
        }
        let feats = dataset.features().select(Axis(0), members);
        let beta = beta.resolve(feats.view())?;
        let sel = run_strategy(feats.view(), b, alpha, beta, group_seed(seed, c), strategy)?;
        indices.extend(sel.indices.iter().map(|&p| members[p]));
        let centroid = class_centroid(feats.view())?;
        for (p, s) in cds_signatures(feats.view(), &centroid, beta)?.into_iter().enumerate() {
            signatures[members[p]] = s;
        }
    }
    Ok((indices, signatures))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Arm {
    Selector { method: Method, constraint: Constraint },
    Strategy { strategy: Strategy },
}

impl Arm {
    fn labels(&self) -> (String, Constraint) {
        match self {
            Arm::Selector { method, constraint } => (method.to_string(), *constraint),
            Arm::Strategy { strategy } => (strategy.as_str().to_string(), Constraint::None),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub train: Dataset,
    pub test: Dataset,
    pub arms: Vec<Arm>,
    pub budgets: Vec<Budget>,
    pub seeds: Vec<u64>,
    /// Shared hyperparameters; method/constraint/budget/seed are overridden per cell.
    pub base: SelectorConfig,
    pub strategy_beta: BetaRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub method: String,
    pub constraint: Constraint,
    pub budget: Budget,
    pub seed: u64,
    pub accuracy: f64,
    pub psi: usize,
    pub wall_ms: u64,
    pub histograms: Vec<Vec<BitsCount>>,
}

pub fn run_cell(config: &ExperimentConfig, arm: Arm, budget: Budget, seed: u64) -> Result<ExperimentRecord> {
    let start = Instant::now();
    let (indices, signatures) = match arm {
        Arm::Selector { method, constraint } => {
            let cfg = SelectorConfig {
                method,
                constraint,
                budget,
                seed,
                ..config.base.clone()
            };
            let out = run_selection(&config.train, &cfg)?;
            (out.coreset.indices, out.signatures)
        }
        Arm::Strategy { strategy } => strategy_on_dataset(
            &config.train,
            strategy,
            budget,
            config.base.alpha,
            config.strategy_beta,
            seed,
        )?,
    };
    let accuracy = nearest_centroid_accuracy(&config.train, &indices, &config.test)?;
    let reports = class_reports(&config.train, &signatures, &indices)?;
    let (method, constraint) = arm.labels();
    Ok(ExperimentRecord {
        method,
        constraint,
        budget,
        seed,
        accuracy,
        psi: reports.iter().map(|r| r.psi).sum(),
        wall_ms: start.elapsed().as_millis() as u64,
        histograms: reports.into_iter().map(|r| r.histogram).collect(),
    })
}

/// Runs every arm x budget x seed cell, in that nesting order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    let mut rows = Vec::with_capacity(config.arms.len() * config.budgets.len() * config.seeds.len());
    for &arm in &config.arms {
        for &budget in &config.budgets {
            for &seed in &config.seeds {
                rows.push(run_cell(config, arm, budget, seed)?);
            }
        }
    }
    Ok(rows)
}

pub fn write_jsonl<T: Serialize>(rows: &[T], path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    for row in rows {
        serde_json::to_writer(&mut buf, row)?;
        buf.write_all(b"\n").expect("vec write");
    }
    crate::data_io::write_atomic(path, &buf)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure3aParams {
    pub mixture: MixtureSpec,
    pub test_per_class: usize,
    pub budgets: Vec<f64>,
    pub seeds: Vec<u64>,
    pub alpha: f64,
    pub beta: BetaRule,
}

impl Figure3aParams {
    pub fn standard(seeds: Vec<u64>) -> Self {
        Self {
            mixture: MixtureSpec::standard(0),
            test_per_class: 200,
            budgets: vec![0.01, 0.05, 0.1, 0.2],
            seeds,
            alpha: crate::constraints::DEFAULT_ALPHA,
            beta: BetaRule::Suggested(0.9),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure3aRow {
    pub strategy: Strategy,
    pub budget: f64,
    pub mean_accuracy: f64,
    pub mean_psi: f64,
    /// Accuracy gain over more-random, mean and population std across seeds.
    pub improvement_mean: f64,
    pub improvement_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure3aReport {
    pub rows: Vec<Figure3aRow>,
    pub cells: Vec<ExperimentRecord>,
}

impl Figure3aReport {
    pub fn row(&self, strategy: Strategy, budget: f64) -> Option<&Figure3aRow> {
        self.rows.iter().find(|r| r.strategy == strategy && r.budget == budget)
    }

    /// Mean over seeds of accuracy(more-dcds) - accuracy(more-scds) at `budget`.
    pub fn dcds_minus_scds(&self, budget: f64) -> Option<f64> {
        Some(self.row(Strategy::MoreDcds, budget)?.mean_accuracy - self.row(Strategy::MoreScds, budget)?.mean_accuracy)
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Regenerates the mixture per seed and compares the three strategies.
pub fn figure3a(params: &Figure3aParams) -> Result<Figure3aReport> {
    let base = SelectorConfig {
        alpha: params.alpha,
        ..SelectorConfig::default()
    };
    let arms: Vec<Arm> = Strategy::ALL.iter().map(|&strategy| Arm::Strategy { strategy }).collect();
    let mut cells = Vec::new();
    for &seed in &params.seeds {
        let spec = MixtureSpec {
            seed,
            ..params.mixture.clone()
        };
        let (train, test) = gen_train_test(&spec, params.test_per_class)?;
        let config = ExperimentConfig {
            train,
            test,
            arms: arms.clone(),
            budgets: params.budgets.iter().map(|&f| Budget::Fraction(f)).collect(),
            seeds: vec![seed],
            base: base.clone(),
            strategy_beta: params.beta,
        };
        cells.extend(run_experiment(&config)?);
    }
    let mut rows = Vec::new();
    for &budget in &params.budgets {
        let at = |s: Strategy| -> Vec<&ExperimentRecord> {
            cells
                .iter()
                .filter(|c| c.method == s.as_str() && c.budget == Budget::Fraction(budget))
                .collect()
        };
        let random = at(Strategy::MoreRandom);
        for strategy in Strategy::ALL {
            let runs = at(strategy);
            let acc: Vec<f64> = runs.iter().map(|r| r.accuracy).collect();
            let psi: Vec<f64> = runs.iter().map(|r| r.psi as f64).collect();
            let gains: Vec<f64> = runs
                .iter()
                .zip(&random)
                .map(|(r, base)| r.accuracy - base.accuracy)
                .collect();
            let (improvement_mean, improvement_std) = mean_std(&gains);
            rows.push(Figure3aRow {
                strategy,
                budget,
                mean_accuracy: mean_std(&acc).0,
                mean_psi: mean_std(&psi).0,
                improvement_mean,
                improvement_std,
            });
        }
    }
    Ok(Figure3aReport { rows, cells })
}

/// Outcome of the greedy-versus-exhaustive fuzz checks.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleSuiteReport {
    pub instances: usize,
    pub facility_violations: usize,
    pub min_facility_ratio: f64,
    pub kcenter_violations: usize,
    pub max_kcenter_ratio: f64,
    pub relation_violations: usize,
}

impl OracleSuiteReport {
    pub fn violations(&self) -> usize {
        self.facility_violations + self.kcenter_violations + self.relation_violations
    }
}

/// Random symmetric nonnegative similarity matrix.
pub fn random_similarity(rng: &mut impl Rng, m: usize) -> SimilarityMatrix {
    let mut s = Array2::zeros((m, m));
    for i in 0..m {
        for j in i..m {
            let v: f64 = rng.random();
            s[[i, j]] = v;
            s[[j, i]] = v;
        }
    }
    SimilarityMatrix::from_raw(s).expect("symmetric nonnegative by construction")
}

pub fn random_points(rng: &mut impl Rng, m: usize, dims: usize) -> Array2<f64> {
    Array2::from_shape_fn((m, dims), |_| rng.random_range(-5.0..5.0))
}

/// Relative slack for the approximation-ratio comparisons.
pub const RATIO_SLACK: f64 = 1e-9;

pub fn run_oracle_suite(instances: usize, seed: u64) -> Result<OracleSuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = 1.0 - (-1.0f64).exp();
    let mut report = OracleSuiteReport {
        instances,
        min_facility_ratio: f64::INFINITY,
        ..Default::default()
    };
    for _ in 0..instances {
        let m = rng.random_range(2..=12);
        let b = rng.random_range(1..=4.min(m));

        let sim = random_similarity(&mut rng, m);
        let greedy = select_craig(&sim, b)?;
        let (opt, _) = brute_force_facility_opt(&sim, b)?;
        let value = facility_value(&sim, &greedy.indices);
        report.min_facility_ratio = report.min_facility_ratio.min(value / opt);
        if value < bound * opt * (1.0 - RATIO_SLACK) {
            report.facility_violations += 1;
        }

        let dims = rng.random_range(1..=4);
        let points = random_points(&mut rng, m, dims);
        let centroid = class_centroid(points.view())?;
        let picked = select_kcenter(points.view(), b, &centroid)?;
        let radius = covering_radius(points.view(), &picked.indices);
        let (opt_radius, _) = brute_force_kcenter_opt(points.view(), b)?;
        if opt_radius > 0.0 {
            report.max_kcenter_ratio = report.max_kcenter_ratio.max(radius / opt_radius);
        }
        if radius > 2.0 * opt_radius * (1.0 + RATIO_SLACK) + 1e-12 {
            report.kcenter_violations += 1;
        }

        let beta = rng.random_range(0.0..3.0);
        let sigs = cds_signatures(points.view(), &centroid, beta)?;
        let r = cds_relation(&sigs)?;
        let ok = (0..m).all(|i| {
            r.get(i, i) && (0..m).all(|j| r.get(i, j) == r.get(j, i) && r.get(i, j) == (sigs[i] == sigs[j]))
        });
        if !ok || psi_count(&sigs, &(0..m).collect::<Vec<_>>())? != r.num_types() {
            report.relation_violations += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn mixture_shape_and_labels() {
        let d = gen_gaussian_mixture(&MixtureSpec {
            classes: 2,
            n_per_class: 3,
            dims: 4,
            separation: 1.0,
            noise: 0.5,
            seed: 1,
        })
        .unwrap();
        assert_eq!(d.labels(), &[0, 0, 0, 1, 1, 1]);
        assert_eq!(d.features().dim(), (6, 4));
        assert_eq!(d.num_classes(), 2);
    }

    #[test]
    fn tiny_noise_collapses_to_centers() {
        let spec = MixtureSpec {
            classes: 2,
            n_per_class: 4,
            dims: 3,
            separation: 2.0,
            noise: 1e-12,
            seed: 9,
        };
        let d = gen_gaussian_mixture(&spec).unwrap();
        for c in 0..2 {
            let first = d.features().row(c * 4).to_owned();
            for i in 0..4 {
                let row = d.features().row(c * 4 + i);
                assert!(row.iter().zip(first.iter()).all(|(a, b)| (a - b).abs() < 1e-9));
            }
            assert!((first.dot(&first).sqrt() - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn mixture_seed_determinism() {
        let spec = MixtureSpec::standard(4);
        assert_eq!(gen_gaussian_mixture(&spec).unwrap(), gen_gaussian_mixture(&spec).unwrap());
        assert!(MixtureSpec { noise: 0.0, ..spec }.validate().is_err());
    }

    #[test]
    fn separable_full_coreset_accuracy_one() {
        let spec = MixtureSpec {
            classes: 3,
            n_per_class: 30,
            dims: 5,
            separation: 50.0,
            noise: 0.5,
            seed: 2,
        };
        let (train, test) = gen_train_test(&spec, 20).unwrap();
        let all: Vec<usize> = (0..train.len()).collect();
        assert_eq!(nearest_centroid_accuracy(&train, &all, &test).unwrap(), 1.0);
        let class0: Vec<usize> = (0..30).collect();
        let acc = nearest_centroid_accuracy(&train, &class0, &test).unwrap();
        assert!(acc <= 1.0 / 3.0 + 1e-12);
        assert!(nearest_centroid_accuracy(&train, &[], &test).is_err());
    }

    #[test]
    fn oracle_micro_instances() {
        let sim = SimilarityMatrix::from_raw(array![
            [1.0, 0.9, 0.1, 0.1],
            [0.9, 1.0, 0.1, 0.1],
            [0.1, 0.1, 1.0, 0.8],
            [0.1, 0.1, 0.8, 1.0]
        ])
        .unwrap();
        let (v, _) = brute_force_facility_opt(&sim, 2).unwrap();
        assert!((v - 3.7).abs() < 1e-12);
        assert!((brute_force_facility_opt(&sim, 4).unwrap().0 - 4.0).abs() < 1e-12);
        assert!((brute_force_facility_opt(&sim, 1).unwrap().0 - 2.1).abs() < 1e-12);

        let pts = array![[0.0], [1.0], [2.0], [10.0]];
        let (r, centers) = brute_force_kcenter_opt(pts.view(), 2).unwrap();
        assert_eq!(r, 1.0);
        assert_eq!(centers, vec![1, 3]);
        assert_eq!(brute_force_kcenter_opt(pts.view(), 4).unwrap().0, 0.0);
        // 1-center: the point minimizing its farthest distance is 2 (radius 8)
        assert_eq!(brute_force_kcenter_opt(pts.view(), 1).unwrap().0, 8.0);
    }

    #[test]
    fn oracle_size_limits() {
        let sim = SimilarityMatrix::from_raw(Array2::zeros((21, 21))).unwrap();
        assert!(matches!(brute_force_facility_opt(&sim, 2), Err(Error::InstanceTooLarge(_))));
        let sim = SimilarityMatrix::from_raw(Array2::zeros((20, 20))).unwrap();
        // C(20, 10) = 184756 is admissible, C(20, 9) = 167960 too
        assert!(binomial(20, 10) <= MAX_ORACLE_SUBSETS);
        assert!(brute_force_facility_opt(&sim, 0).is_err());
    }

    #[test]
    fn more_scds_fills_largest_group() {
        // one distance bin; CDS groups of sizes 4, 2, 1 by construction
        let feats = array![
            [1.0, 0.0],
            [-1.0, 0.0],
            [1.0, 0.0],
            [-1.0, 0.0],
            [0.0, 1.0],
            [0.0, -1.0],
            [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2]
        ];
        let c = class_centroid(feats.view()).unwrap();
        let plan = plan_two_stage(feats.view(), &c, 3, 10.0, 0.5, Stage2Rule::FillLargest).unwrap();
        let budgets: Vec<(usize, usize)> = plan.cells.iter().map(|c| (c.members.len(), c.budget)).collect();
        assert_eq!(budgets, vec![(4, 3), (2, 0), (1, 0)]);
        let plan = plan_two_stage(feats.view(), &c, 3, 10.0, 0.5, Stage2Rule::Even).unwrap();
        let budgets: Vec<usize> = plan.cells.iter().map(|c| c.budget).collect();
        assert_eq!(budgets, vec![1, 1, 1]);
        let sel = strategy_more_scds(feats.view(), 7, 10.0, 0.5, 3).unwrap();
        assert_eq!(sel.len(), 7);
    }

    #[test]
    fn more_random_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let feats = random_points(&mut rng, 40, 3);
        let a = strategy_more_random(feats.view(), 9, 0.5, 8).unwrap();
        assert_eq!(a, strategy_more_random(feats.view(), 9, 0.5, 8).unwrap());
        assert_eq!(a.len(), 9);
        let mut all = strategy_more_random(feats.view(), 40, 0.5, 8).unwrap().indices;
        all.sort();
        assert_eq!(all, (0..40).collect::<Vec<_>>());
    }

    #[test]
    fn experiment_grid_bookkeeping() {
        let spec = MixtureSpec {
            classes: 2,
            n_per_class: 30,
            dims: 12,
            separation: 2.0,
            noise: 1.0,
            seed: 3,
        };
        let (train, test) = gen_train_test(&spec, 10).unwrap();
        let config = ExperimentConfig {
            train,
            test,
            arms: vec![
                Arm::Selector {
                    method: Method::Random,
                    constraint: Constraint::None,
                },
                Arm::Strategy {
                    strategy: Strategy::MoreDcds,
                },
            ],
            budgets: vec![Budget::Fraction(0.2)],
            seeds: vec![1, 2, 3],
            base: SelectorConfig::default(),
            strategy_beta: BetaRule::Suggested(0.9),
        };
        let rows = run_experiment(&config).unwrap();
        assert_eq!(rows.len(), 6);
        let again = run_experiment(&config).unwrap();
        for (a, b) in rows.iter().zip(&again) {
            assert_eq!((a.accuracy, a.psi, &a.histograms), (b.accuracy, b.psi, &b.histograms));
        }
    }

    #[test]
    fn oracle_suite_clean() {
        let r = run_oracle_suite(30, 7).unwrap();
        assert_eq!(r.violations(), 0, "{r:?}");
    }
}
