//! Hard and soft CDS diversity constraints.
//!
//! The hard constraint is a two-stage partition of a group: first into
//! distance bins of width `alpha` around the centroid, then each bin into
//! identical-signature (CDS) subgroups. Budgets flow bin-proportionally and
//! then as evenly as possible across the CDS subgroups, and a baseline selector
//! runs inside every subgroup.
//!
//! The soft constraint rescales the greedy scores of CRAIG and graph cut using
//! the CDS relation; see [`soft_craig_select`] and [`soft_graphcut_select`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cds::{cds_signatures, partition_by_signature, CdsRelation, Centroid};
use crate::error::{Error, Result};
use crate::selectors::{
    euclidean, facility_greedy, graphcut_greedy, select_craig, select_graphcut, select_kcenter,
    select_least_confidence, select_moderate, select_random, similarity_matrix, Kernel, Method,
    Selection, SimilarityMatrix,
};

pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_LAMBDA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constraint {
    #[default]
    None,
    Hard,
    Soft,
}

impl FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Constraint::None),
            "hard" => Ok(Constraint::Hard),
            "soft" => Ok(Constraint::Soft),
            other => Err(Error::InvalidParameter(format!("unknown constraint {other:?}"))),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::None => "none",
            Constraint::Hard => "hard",
            Constraint::Soft => "soft",
        })
    }
}

/// Soft constraints exist only for CRAIG and graph cut. Hard constraints are
/// paired with random/kcg/lc/mds unless `force` is set.
pub fn check_pairing(method: Method, constraint: Constraint, force: bool) -> Result<()> {
    match constraint {
        Constraint::None => Ok(()),
        Constraint::Soft if matches!(method, Method::Craig | Method::Gc) => Ok(()),
        Constraint::Soft => Err(Error::InvalidParameter(format!(
            "soft constraint is defined only for craig and gc, not {method}"
        ))),
        Constraint::Hard if force || !matches!(method, Method::Craig | Method::Gc) => Ok(()),
        Constraint::Hard => Err(Error::InvalidParameter(format!(
            "hard constraint is not paired with {method}; use the soft constraint or --force"
        ))),
    }
}

/// Distance bins: bin `h` holds samples whose centroid distance lies in `[h*alpha, (h+1)*alpha)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage1Clusters {
    pub bins: BTreeMap<usize, Vec<usize>>,
    pub alpha: f64,
}

pub fn stage1_cluster(
    reduced: ArrayView2<f64>,
    centroid: &Centroid,
    alpha: f64,
) -> Result<Stage1Clusters> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
    }
    if reduced.ncols() != centroid.len() {
        return Err(Error::DimensionMismatch(format!(
            "features have {} dimensions, centroid has {}",
            reduced.ncols(),
            centroid.len()
        )));
    }
    let c = centroid.as_array().view();
    let mut bins: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, row) in reduced.rows().into_iter().enumerate() {
        let h = (euclidean(row, c) / alpha).floor() as usize;
        bins.entry(h).or_default().push(i);
    }
    Ok(Stage1Clusters { bins, alpha })
}

/// `(cluster id, allocated budget)` pairs, ids being positions in the size list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetAllocation {
    pub entries: Vec<(usize, usize)>,
}

impl BudgetAllocation {
    pub fn total(&self) -> usize {
        self.entries.iter().map(|&(_, a)| a).sum()
    }

    pub fn amounts(&self) -> Vec<usize> {
        self.entries.iter().map(|&(_, a)| a).collect()
    }

    /// Checks conservation and per-cluster caps against the sizes it was built from.
    pub fn validate(&self, sizes: &[usize], budget: usize) -> Result<()> {
        if self.entries.len() != sizes.len() {
            return Err(Error::InvalidParameter("allocation/cluster count differ".into()));
        }
        for (pos, &(id, a)) in self.entries.iter().enumerate() {
            if id != pos || a > sizes[id] {
                return Err(Error::InvalidParameter(format!(
                    "cluster {id} allocated {a} of {}",
                    sizes[id]
                )));
            }
        }
        if self.total() != budget.min(sizes.iter().sum()) {
            return Err(Error::InvalidParameter(format!(
                "allocated {} of budget {budget}",
                self.total()
            )));
        }
        Ok(())
    }
}

fn check_budget(sizes: &[usize], b: usize) -> Result<()> {
    let available: usize = sizes.iter().sum();
    if b > available {
        Err(Error::BudgetTooLarge {
            budget: b,
            available,
        })
    } else {
        Ok(())
    }
}

fn from_amounts(amounts: Vec<usize>) -> BudgetAllocation {
    BudgetAllocation {
        entries: amounts.into_iter().enumerate().collect(),
    }
}

/// Grants one slot at a time along `order`, skipping full clusters, cycling until done.
fn grant_in_passes(amounts: &mut [usize], sizes: &[usize], order: &[usize], mut remaining: usize) {
    while remaining > 0 {
        let mut granted = false;
        for &c in order {
            if remaining == 0 {
                break;
            }
            if amounts[c] < sizes[c] {
                amounts[c] += 1;
                remaining -= 1;
                granted = true;
            }
        }
        assert!(granted, "budget exceeds capacity");
    }
}

/// Largest-remainder apportionment of `b` by cluster size.
pub fn allocate_proportional(sizes: &[usize], b: usize) -> Result<BudgetAllocation> {
    check_budget(sizes, b)?;
    let total: usize = sizes.iter().sum();
    if total == 0 {
        return Ok(from_amounts(vec![0; sizes.len()]));
    }
    // exact shares b*size/total as quotient and remainder over a common denominator
    let shares: Vec<(usize, usize)> = sizes
        .iter()
        .map(|&s| {
            let num = b as u128 * s as u128;
            ((num / total as u128) as usize, (num % total as u128) as usize)
        })
        .collect();
    let mut amounts: Vec<usize> = shares
        .iter()
        .zip(sizes)
        .map(|(&(q, _), &s)| q.min(s))
        .collect();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &c| {
        shares[c]
            .1
            .cmp(&shares[a].1)
            .then(sizes[c].cmp(&sizes[a]))
            .then(a.cmp(&c))
    });
    let residual = b - amounts.iter().sum::<usize>();
    grant_in_passes(&mut amounts, sizes, &order, residual);
    Ok(from_amounts(amounts))
}

fn size_descending(sizes: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &c| sizes[c].cmp(&sizes[a]).then(a.cmp(&c)));
    order
}

/// Round-robin over groups ordered by size (descending, then id), one slot per pass.
pub fn allocate_even(sizes: &[usize], b: usize) -> Result<BudgetAllocation> {
    check_budget(sizes, b)?;
    let mut amounts = vec![0; sizes.len()];
    grant_in_passes(&mut amounts, sizes, &size_descending(sizes), b);
    Ok(from_amounts(amounts))
}

/// Fills the largest group first, overflowing into the next largest.
pub fn allocate_fill_largest(sizes: &[usize], b: usize) -> Result<BudgetAllocation> {
    check_budget(sizes, b)?;
    let mut amounts = vec![0; sizes.len()];
    let mut remaining = b;
    for c in size_descending(sizes) {
        let take = remaining.min(sizes[c]);
        amounts[c] = take;
        remaining -= take;
    }
    Ok(from_amounts(amounts))
}

/// How a distance bin's budget is split across its CDS subgroups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage2Rule {
    /// Round-robin across subgroups.
    Even,
    /// Largest subgroup first.
    FillLargest,
    /// No CDS split: the bin is one cell.
    Whole,
}

/// A set of group members sampled together with their sub-budget.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanCell {
    pub bin: usize,
    pub members: Vec<usize>,
    pub budget: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoStagePlan {
    pub stage1: Stage1Clusters,
    pub bin_allocation: BudgetAllocation,
    /// Per bin (in bin order): the CDS-subgroup allocation.
    pub cds_allocations: Vec<(usize, Vec<usize>, BudgetAllocation)>,
    pub cells: Vec<PlanCell>,
}

impl TwoStagePlan {
    pub fn total_budget(&self) -> usize {
        self.cells.iter().map(|c| c.budget).sum()
    }
}

pub fn plan_two_stage(
    reduced: ArrayView2<f64>,
    centroid: &Centroid,
    b: usize,
    alpha: f64,
    beta: f64,
    rule: Stage2Rule,
) -> Result<TwoStagePlan> {
    let stage1 = stage1_cluster(reduced, centroid, alpha)?;
    let bin_sizes: Vec<usize> = stage1.bins.values().map(Vec::len).collect();
    let bin_allocation = allocate_proportional(&bin_sizes, b.min(reduced.nrows()))?;
    let signatures = match rule {
        Stage2Rule::Whole => None,
        _ => Some(cds_signatures(reduced, centroid, beta)?),
    };

    let mut cells = Vec::new();
    let mut cds_allocations = Vec::new();
    for ((&bin, members), bin_budget) in stage1.bins.iter().zip(bin_allocation.amounts()) {
        let Some(signatures) = &signatures else {
            cells.push(PlanCell {
                bin,
                members: members.clone(),
                budget: bin_budget,
            });
            continue;
        };
        let local: Vec<_> = members.iter().map(|&i| signatures[i].clone()).collect();
        let groups: Vec<Vec<usize>> = partition_by_signature(&local)
            .into_iter()
            .map(|g| g.into_iter().map(|p| members[p]).collect())
            .collect();
        let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
        let alloc = match rule {
            Stage2Rule::Even => allocate_even(&sizes, bin_budget)?,
            Stage2Rule::FillLargest => allocate_fill_largest(&sizes, bin_budget)?,
            Stage2Rule::Whole => unreachable!(),
        };
        for (g, budget) in groups.into_iter().zip(alloc.amounts()) {
            cells.push(PlanCell {
                bin,
                members: g,
                budget,
            });
        }
        cds_allocations.push((bin, sizes, alloc));
    }
    Ok(TwoStagePlan {
        stage1,
        bin_allocation,
        cds_allocations,
        cells,
    })
}

/// Inputs available for one group (a class, or the whole set).
#[derive(Debug, Clone, Copy)]
pub struct GroupData<'a> {
    pub reduced: ArrayView2<'a, f64>,
    pub probs: Option<ArrayView2<'a, f64>>,
    /// Vectors for similarity kernels (e.g. gradient proxies); reduced features when absent.
    pub sim_vectors: Option<ArrayView2<'a, f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardParams {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub kernel: Kernel,
    pub seed: u64,
    pub force: bool,
}

impl Default for HardParams {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            beta: crate::pipeline::DEFAULT_BETA,
            lambda: DEFAULT_LAMBDA,
            kernel: Kernel::default(),
            seed: 0,
            force: false,
        }
    }
}

fn take_rows(m: ArrayView2<f64>, rows: &[usize]) -> Array2<f64> {
    m.select(Axis(0), rows)
}

/// Runs `method` on the subset `members` of a group, returning group positions.
pub(crate) fn run_baseline(
    group: &GroupData<'_>,
    members: &[usize],
    method: Method,
    budget: usize,
    centroid: &Centroid,
    lambda: f64,
    kernel: Kernel,
    seed: u64,
) -> Result<Vec<usize>> {
    let local = match method {
        Method::Random => select_random(members.len(), budget, seed),
        Method::Kcg => select_kcenter(take_rows(group.reduced, members).view(), budget, centroid)?,
        Method::Mds => select_moderate(take_rows(group.reduced, members).view(), budget, centroid)?,
        Method::Lc => {
            let probs = group
                .probs
                .ok_or_else(|| Error::MissingInput("probabilities (--probs) for method lc".into()))?;
            select_least_confidence(take_rows(probs, members).view(), budget)?
        }
        Method::Craig | Method::Gc => {
            let vectors = group.sim_vectors.unwrap_or(group.reduced);
            let sim = similarity_matrix(take_rows(vectors, members).view(), kernel)?;
            if method == Method::Craig {
                select_craig(&sim, budget)?
            } else {
                select_graphcut(&sim, budget, lambda)?
            }
        }
    };
    Ok(local.indices.into_iter().map(|p| members[p]).collect())
}

/// Hard CDS pipeline over one group: distance bins, CDS subgroups, even
/// sub-budgets, then the baseline inside each subgroup.
pub fn hard_cds_select(
    group: &GroupData<'_>,
    method: Method,
    b: usize,
    params: &HardParams,
) -> Result<Selection> {
    check_pairing(method, Constraint::Hard, params.force)?;
    if method.needs_probs() && group.probs.is_none() {
        return Err(Error::MissingInput("probabilities (--probs) for method lc".into()));
    }
    let m = group.reduced.nrows();
    if m == 0 {
        return Err(Error::EmptyGroup);
    }
    let centroid = crate::cds::class_centroid(group.reduced)?;
    let plan = plan_two_stage(
        group.reduced,
        &centroid,
        b.min(m),
        params.alpha,
        params.beta,
        Stage2Rule::Even,
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut indices = Vec::with_capacity(plan.total_budget());
    for cell in plan.cells.iter().filter(|c| c.budget > 0) {
        let sub_seed: u64 = rng.random();
        indices.extend(run_baseline(
            group,
            &cell.members,
            method,
            cell.budget,
            &centroid,
            params.lambda,
            params.kernel,
            sub_seed,
        )?);
    }
    Ok(Selection::unweighted(indices))
}

/// CRAIG greedy with each marginal gain scaled by `1 / (same-CDS selected + 1)`.
pub fn soft_craig_select(
    sim: &SimilarityMatrix,
    relation: &CdsRelation,
    b: usize,
) -> Result<Selection> {
    facility_greedy(sim, b, Some(relation))
}

/// Graph-cut greedy whose redundancy penalty doubles for same-CDS pairs.
pub fn soft_graphcut_select(
    sim: &SimilarityMatrix,
    relation: &CdsRelation,
    b: usize,
    lambda: f64,
) -> Result<Selection> {
    graphcut_greedy(sim, b, lambda, Some(relation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cds::{cds_relation, CdsSignature};
    use ndarray::array;

    fn sim4() -> SimilarityMatrix {
        SimilarityMatrix::from_raw(array![
            [1.0, 0.9, 0.1, 0.1],
            [0.9, 1.0, 0.1, 0.1],
            [0.1, 0.1, 1.0, 0.8],
            [0.1, 0.1, 0.8, 1.0]
        ])
        .unwrap()
    }

    fn relation_from_types(types: &[u8]) -> CdsRelation {
        let sigs: Vec<CdsSignature> = types
            .iter()
            .map(|&t| CdsSignature::from_bits(&[t & 1 == 1, t & 2 == 2, t & 4 == 4]))
            .collect();
        cds_relation(&sigs).unwrap()
    }

    #[test]
    fn stage1_bins() {
        let c = Centroid(array![0.0]);
        let s = stage1_cluster(array![[1.3], [1.0], [-0.2]].view(), &c, 0.5).unwrap();
        assert_eq!(s.bins[&2], vec![0, 1]);
        assert_eq!(s.bins[&0], vec![2]);
        let same = stage1_cluster(array![[0.0], [0.0]].view(), &c, 0.5).unwrap();
        assert_eq!(same.bins.len(), 1);
        assert_eq!(same.bins[&0], vec![0, 1]);
        assert!(stage1_cluster(array![[0.0]].view(), &c, 0.0).is_err());
    }

    #[test]
    fn proportional_examples() {
        assert_eq!(allocate_proportional(&[6, 3, 1], 5).unwrap().amounts(), vec![3, 2, 0]);
        assert_eq!(allocate_proportional(&[4], 4).unwrap().amounts(), vec![4]);
        assert!(matches!(
            allocate_proportional(&[1, 1], 3),
            Err(Error::BudgetTooLarge { .. })
        ));
        assert_eq!(allocate_proportional(&[], 0).unwrap().amounts(), Vec::<usize>::new());
    }

    #[test]
    fn even_examples() {
        assert_eq!(allocate_even(&[4, 2, 1], 5).unwrap().amounts(), vec![2, 2, 1]);
        assert_eq!(allocate_even(&[4, 2, 1], 3).unwrap().amounts(), vec![1, 1, 1]);
        assert_eq!(allocate_even(&[5, 1], 4).unwrap().amounts(), vec![3, 1]);
        // ties by id: the first of equal sizes gets the extra slot
        assert_eq!(allocate_even(&[2, 3, 2], 2).unwrap().amounts(), vec![1, 1, 0]);
    }

    #[test]
    fn fill_largest_examples() {
        assert_eq!(allocate_fill_largest(&[4, 2, 1], 3).unwrap().amounts(), vec![3, 0, 0]);
        assert_eq!(allocate_fill_largest(&[4, 2, 1], 5).unwrap().amounts(), vec![4, 1, 0]);
        assert_eq!(allocate_fill_largest(&[1, 4, 2], 7).unwrap().amounts(), vec![1, 4, 2]);
    }

    #[test]
    fn pairing_rules() {
        assert!(check_pairing(Method::Kcg, Constraint::Hard, false).is_ok());
        assert!(check_pairing(Method::Craig, Constraint::Hard, false).is_err());
        assert!(check_pairing(Method::Craig, Constraint::Hard, true).is_ok());
        assert!(check_pairing(Method::Gc, Constraint::Soft, false).is_ok());
        assert!(check_pairing(Method::Lc, Constraint::Soft, true).is_err());
    }

    #[test]
    fn hard_one_sample_per_bin() {
        // centroid of these values is 0.35; put the group so the mean sits at zero
        let xs = [0.1, 0.2, 0.6, 0.7, 1.2, 1.3];
        let mut rows: Vec<f64> = xs.to_vec();
        rows.extend(xs.iter().map(|x| -x));
        let reduced = Array2::from_shape_vec((12, 1), rows).unwrap();
        let group = GroupData {
            reduced: reduced.view(),
            probs: None,
            sim_vectors: None,
        };
        let params = HardParams {
            beta: 0.0,
            ..HardParams::default()
        };
        // beta 0: every sample has signature [1], so bins have one CDS group each
        let sel = hard_cds_select(&group, Method::Random, 3, &params).unwrap();
        let mut bins: Vec<usize> = sel
            .indices
            .iter()
            .map(|&i| (reduced[[i, 0]].abs() / 0.5).floor() as usize)
            .collect();
        bins.sort();
        assert_eq!(bins, vec![0, 1, 2]);
    }

    #[test]
    fn hard_exhaustion_and_missing_probs() {
        let reduced = array![[0.0, 1.0], [1.0, 0.0], [0.5, 0.5], [2.0, 2.0]];
        let group = GroupData {
            reduced: reduced.view(),
            probs: None,
            sim_vectors: None,
        };
        let mut all = hard_cds_select(&group, Method::Kcg, 4, &HardParams::default())
            .unwrap()
            .indices;
        all.sort();
        assert_eq!(all, vec![0, 1, 2, 3]);
        assert!(matches!(
            hard_cds_select(&group, Method::Lc, 2, &HardParams::default()),
            Err(Error::MissingInput(_))
        ));
    }

    #[test]
    fn soft_craig_tie_example() {
        // after picking 0, gains are {1: 0.1, 2: 1.6, 3: 1.6}; 1 shares 0's CDS
        let r = relation_from_types(&[1, 1, 2, 3]);
        let sel = soft_craig_select(&sim4(), &r, 2).unwrap();
        assert_eq!(sel.indices, vec![0, 2]);
    }

    #[test]
    fn soft_graphcut_penalty_example() {
        // candidates 1 and 2 both have row sum 2.0 and similarity 0.1 to the first pick 0
        let s = SimilarityMatrix::from_raw(array![
            [2.5, 0.1, 0.1],
            [0.1, 1.8, 0.1],
            [0.1, 0.1, 1.8]
        ])
        .unwrap();
        let plain = select_graphcut(&s, 2, 2.0).unwrap();
        assert_eq!(plain.indices, vec![0, 1]);
        // 1 shares 0's CDS: 2.0 - 2*0.1*2 = 1.6 against 2.0 - 2*0.1*1 = 1.8
        let r = relation_from_types(&[1, 1, 2]);
        let soft = soft_graphcut_select(&s, &r, 2, 2.0).unwrap();
        assert_eq!(soft.indices, vec![0, 2]);
    }

    #[test]
    fn soft_reduces_to_base_when_all_distinct() {
        let r = CdsRelation::all_distinct(4);
        assert_eq!(soft_craig_select(&sim4(), &r, 3).unwrap(), select_craig(&sim4(), 3).unwrap());
        assert_eq!(
            soft_graphcut_select(&sim4(), &r, 3, 2.0).unwrap(),
            select_graphcut(&sim4(), 3, 2.0).unwrap()
        );
        let same = relation_from_types(&[1, 1, 1, 1]);
        assert_eq!(
            soft_graphcut_select(&sim4(), &same, 3, 0.0).unwrap(),
            select_graphcut(&sim4(), 3, 0.0).unwrap()
        );
    }

    #[test]
    fn soft_dimension_mismatch() {
        let r = CdsRelation::all_distinct(3);
        assert!(soft_craig_select(&sim4(), &r, 2).is_err());
        assert!(soft_graphcut_select(&sim4(), &r, 2, 2.0).is_err());
    }
}
