//! Profit-based index-set selection.
//!
//! Given per-dimension contribution decay `g_j` and work growth `w_j`, the
//! quasi-optimal truncation set maximizes total contribution under a work
//! budget. Finding optimal sets is NP-hard in general; this module provides
//! the threshold (Dantzig) relaxation with its a-priori guarantee, an exact
//! exhaustive oracle for test-scale boxes, and a greedy adaptive builder
//! driven by measured mixed differences.

use crate::decomposition::{EvalError, Evaluator, ValueSpace};
use crate::engine::SmolyakEngine;
use crate::multiindex::{admissible_forward_neighbors_of, Ambient, IndexSet, MultiIndex};
use std::collections::BTreeSet;
use thiserror::Error;

/// Prefix length over which monotonicity of profile functions is validated.
const MONOTONICITY_PREFIX: u32 = 12;

/// Cells allowed in the exact knapsack oracle's bounding box (the oracle
/// enumerates all 2^cells subsets).
pub const KNAPSACK_CELL_CAP: u32 = 16;

/// Cap on the number of candidate indices examined by the threshold search.
pub const CANDIDATE_CAP: usize = 100_000;

#[derive(Debug, Error)]
pub enum TruncationError {
    #[error("decay function for dimension {dim} must be positive and strictly decreasing")]
    InvalidDecay { dim: u32 },
    #[error("work function for dimension {dim} must be positive and increasing")]
    InvalidWork { dim: u32 },
    #[error("constant K{which} must be positive, got {value}")]
    InvalidConstant { which: u8, value: f64 },
    #[error("model has {model} dimensions but was applied to dimension {dim}")]
    DimensionMismatch { model: usize, dim: u32 },
    #[error("profile table for dimension {dim} has no entry at level {level}")]
    TableExhausted { dim: u32, level: u32 },
    #[error("budget {budget} is below the work of the origin evaluation ({required})")]
    BudgetTooSmall { budget: f64, required: f64 },
    #[error("threshold search candidate region exceeds {cap} indices")]
    ThresholdSearchOverflow { cap: usize },
    #[error("knapsack box has {cells} cells, above the exact-oracle cap of {cap}")]
    BoxTooLarge { cells: u64, cap: u32 },
}

#[derive(Debug, Error)]
pub enum AdaptiveBuildError {
    #[error("budget {budget} cannot afford the origin evaluation ({required})")]
    InsufficientBudget { budget: f64, required: f64 },
    #[error("evaluator failed during adaptive construction: {source}")]
    Eval {
        /// The downward closed set built before the failure.
        partial: IndexSet,
        source: EvalError,
    },
}

/// One per-dimension profile `ℕ → (0, ∞)`.
#[derive(Clone, Debug)]
pub enum ProfileFn {
    /// `scale · exp(rate · i) · (i + 1)^poly`
    ExpPoly { scale: f64, rate: f64, poly: f64 },
    /// Explicit values; levels beyond the table are an error.
    Table(Vec<f64>),
}

impl ProfileFn {
    /// Pure exponential `exp(rate · i)`.
    pub fn exponential(rate: f64) -> Self {
        ProfileFn::ExpPoly { scale: 1.0, rate, poly: 0.0 }
    }

    pub fn value(&self, level: u32) -> Result<f64, TruncationError> {
        match self {
            ProfileFn::ExpPoly { scale, rate, poly } => {
                Ok(scale * (rate * f64::from(level)).exp() * f64::from(level + 1).powf(*poly))
            }
            ProfileFn::Table(values) => values
                .get(level as usize)
                .copied()
                .ok_or(TruncationError::TableExhausted { dim: u32::MAX, level }),
        }
    }

    fn value_in_dim(&self, dim: u32, level: u32) -> Result<f64, TruncationError> {
        self.value(level).map_err(|e| match e {
            TruncationError::TableExhausted { level, .. } => {
                TruncationError::TableExhausted { dim, level }
            }
            other => other,
        })
    }

    fn check_len(&self) -> u32 {
        match self {
            ProfileFn::ExpPoly { .. } => MONOTONICITY_PREFIX,
            ProfileFn::Table(values) => (values.len() as u32).min(MONOTONICITY_PREFIX),
        }
    }
}

/// Per-dimension decay and work profiles with global constants `K₁`, `K₂`.
/// Contribution of a set is `K₁ Σ_{i∈I} Π_j g_j(i_j)`, its work
/// `K₂ Σ_{i∈I} Π_j w_j(i_j)`.
#[derive(Clone, Debug)]
pub struct ProfitModel {
    decay: Vec<ProfileFn>,
    work: Vec<ProfileFn>,
    k1: f64,
    k2: f64,
}

impl ProfitModel {
    /// Validates positivity and monotonicity (decay strictly decreasing,
    /// work non-decreasing) on a sampled prefix.
    pub fn new(
        decay: Vec<ProfileFn>,
        work: Vec<ProfileFn>,
        k1: f64,
        k2: f64,
    ) -> Result<Self, TruncationError> {
        assert_eq!(decay.len(), work.len(), "decay and work must cover the same dimensions");
        if !(k1 > 0.0) {
            return Err(TruncationError::InvalidConstant { which: 1, value: k1 });
        }
        if !(k2 > 0.0) {
            return Err(TruncationError::InvalidConstant { which: 2, value: k2 });
        }
        for (j, g) in decay.iter().enumerate() {
            let n = g.check_len();
            for i in 0..n {
                let v = g.value_in_dim(j as u32, i)?;
                if !(v > 0.0) {
                    return Err(TruncationError::InvalidDecay { dim: j as u32 });
                }
                if i + 1 < n && g.value_in_dim(j as u32, i + 1)? >= v {
                    return Err(TruncationError::InvalidDecay { dim: j as u32 });
                }
            }
        }
        for (j, w) in work.iter().enumerate() {
            let n = w.check_len();
            for i in 0..n {
                let v = w.value_in_dim(j as u32, i)?;
                if !(v > 0.0) {
                    return Err(TruncationError::InvalidWork { dim: j as u32 });
                }
                if i + 1 < n && w.value_in_dim(j as u32, i + 1)? < v * (1.0 - 1e-12) {
                    return Err(TruncationError::InvalidWork { dim: j as u32 });
                }
            }
        }
        Ok(ProfitModel { decay, work, k1, k2 })
    }

    /// `g_j(i) = exp(−c_j i)`, `w_j(i) = exp(ω_j i)`.
    pub fn exponential(
        decay_rates: &[f64],
        work_rates: &[f64],
        k1: f64,
        k2: f64,
    ) -> Result<Self, TruncationError> {
        ProfitModel::new(
            decay_rates.iter().map(|&c| ProfileFn::exponential(-c)).collect(),
            work_rates.iter().map(|&w| ProfileFn::exponential(w)).collect(),
            k1,
            k2,
        )
    }

    pub fn dims(&self) -> usize {
        self.decay.len()
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    pub fn k2(&self) -> f64 {
        self.k2
    }

    pub fn decay(&self, dim: u32, level: u32) -> Result<f64, TruncationError> {
        self.decay[dim as usize].value_in_dim(dim, level)
    }

    pub fn work(&self, dim: u32, level: u32) -> Result<f64, TruncationError> {
        self.work[dim as usize].value_in_dim(dim, level)
    }

    fn check_index(&self, index: &MultiIndex) -> Result<(), TruncationError> {
        if let Some(dim) = index.max_dim() {
            if dim as usize >= self.dims() {
                return Err(TruncationError::DimensionMismatch { model: self.dims(), dim });
            }
        }
        Ok(())
    }

    /// `Π_j g_j(i_j)` (without `K₁`).
    pub fn index_contribution(&self, index: &MultiIndex) -> Result<f64, TruncationError> {
        self.check_index(index)?;
        let mut product = 1.0;
        for j in 0..self.dims() as u32 {
            product *= self.decay(j, index.get(j))?;
        }
        Ok(product)
    }

    /// `Π_j w_j(i_j)` (without `K₂`).
    pub fn index_work(&self, index: &MultiIndex) -> Result<f64, TruncationError> {
        self.check_index(index)?;
        let mut product = 1.0;
        for j in 0..self.dims() as u32 {
            product *= self.work(j, index.get(j))?;
        }
        Ok(product)
    }

    /// Contribution-to-work ratio `Π_j g_j(i_j)/w_j(i_j)`; strictly
    /// decreasing along every axis, so threshold sets are downward closed.
    pub fn index_ratio(&self, index: &MultiIndex) -> Result<f64, TruncationError> {
        Ok(self.index_contribution(index)? / self.index_work(index)?)
    }

    /// `|I|_g = K₁ Σ_{i∈I} Π_j g_j(i_j)`, summed in canonical order.
    pub fn set_contribution(&self, set: &IndexSet) -> Result<f64, TruncationError> {
        let mut total = 0.0;
        for i in set.iter() {
            total += self.index_contribution(i)?;
        }
        Ok(self.k1 * total)
    }

    /// `|I|_w = K₂ Σ_{i∈I} Π_j w_j(i_j)`, summed in canonical order.
    pub fn set_work(&self, set: &IndexSet) -> Result<f64, TruncationError> {
        let mut total = 0.0;
        for i in set.iter() {
            total += self.index_work(i)?;
        }
        Ok(self.k2 * total)
    }

    /// Enumerates the affordable region `{ i : K₂ Π_j w_j(i_j) ≤ budget }` —
    /// every index any valid threshold set could contain (a costlier index
    /// would blow the budget by itself). Downward closed since work profiles
    /// are increasing.
    fn affordable_region(&self, budget: f64) -> Result<Vec<MultiIndex>, TruncationError> {
        let slack = 1.0 + 1e-12;
        let mut out = Vec::new();
        let mut dense = vec![0u32; self.dims()];
        self.enumerate_affordable(budget * slack / self.k2, 0, &mut dense, &mut out)?;
        Ok(out)
    }

    fn enumerate_affordable(
        &self,
        budget_units: f64,
        dim: usize,
        dense: &mut Vec<u32>,
        out: &mut Vec<MultiIndex>,
    ) -> Result<(), TruncationError> {
        if dim == self.dims() {
            out.push(MultiIndex::from_dense(dense));
            if out.len() > CANDIDATE_CAP {
                return Err(TruncationError::ThresholdSearchOverflow { cap: CANDIDATE_CAP });
            }
            return Ok(());
        }
        let mut level = 0u32;
        loop {
            let factor = self.work(dim as u32, level)?;
            if factor > budget_units {
                break;
            }
            dense[dim] = level;
            self.enumerate_affordable(budget_units / factor, dim + 1, dense, out)?;
            if level as usize > CANDIDATE_CAP {
                return Err(TruncationError::ThresholdSearchOverflow { cap: CANDIDATE_CAP });
            }
            level += 1;
        }
        dense[dim] = 0;
        Ok(())
    }

    /// The threshold set `I_W = { i : Π_j g_j(i_j)/w_j(i_j) > δ }` with the
    /// minimal `δ` keeping `|I_W|_w ≤ budget`, together with that `δ`.
    ///
    /// Candidates are ranked by ratio and admitted in blocks of equal ratio
    /// (the strict inequality makes ties atomic); `δ` lands strictly between
    /// admitted and excluded ratios. Ratios attained outside the affordable
    /// region bound `δ` from below, since any threshold admitting such an
    /// index would exceed the budget on that index alone.
    pub fn dantzig_set(&self, budget: f64) -> Result<(IndexSet, f64), TruncationError> {
        let origin_work = self.k2 * self.index_work(&MultiIndex::origin())?;
        if budget < origin_work * (1.0 - 1e-12) {
            return Err(TruncationError::BudgetTooSmall { budget, required: origin_work });
        }
        let region = self.affordable_region(budget)?;
        let members: BTreeSet<MultiIndex> = region.iter().cloned().collect();
        let frontier = admissible_forward_neighbors_of(&members, Ambient::Finite(self.dims() as u32));
        let mut outside_ratio = 0.0f64;
        for neighbor in &frontier {
            outside_ratio = outside_ratio.max(self.index_ratio(neighbor)?);
        }

        let mut ranked: Vec<(f64, f64, MultiIndex)> = Vec::with_capacity(region.len());
        for index in region {
            ranked.push((self.index_ratio(&index)?, self.index_work(&index)?, index));
        }
        ranked.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then_with(|| a.2.cmp(&b.2)));

        let mut chosen: Vec<MultiIndex> = Vec::new();
        let mut spent = 0.0;
        let budget_units = budget * (1.0 + 1e-12) / self.k2;
        let mut delta = outside_ratio;
        let mut pos = 0;
        while pos < ranked.len() {
            let block_ratio = ranked[pos].0;
            let mut end = pos;
            while end < ranked.len() && ranked[end].0 > block_ratio * (1.0 - 1e-12) {
                end += 1;
            }
            if block_ratio <= outside_ratio * (1.0 + 1e-12) {
                delta = outside_ratio;
                break;
            }
            let block_work: f64 = ranked[pos..end].iter().map(|(_, w, _)| w).sum();
            if spent + block_work > budget_units {
                delta = block_ratio.max(outside_ratio);
                break;
            }
            spent += block_work;
            chosen.extend(ranked[pos..end].iter().map(|(_, _, i)| i.clone()));
            pos = end;
        }
        let set = IndexSet::from_members(chosen, Ambient::Finite(self.dims() as u32))
            .expect("dimensions in range");
        debug_assert!(set.is_downward_closed());
        Ok((set, delta))
    }

    /// Exhaustive knapsack oracle over the box `{0..b₁}×…×{0..b_d}`:
    /// enumerates every downward closed subset (optimal sets are downward
    /// closed, so nothing is lost) and returns a maximizer of `|I|_g` under
    /// `|I|_w ≤ budget` along with the optimum `E*`.
    pub fn knapsack_exact(
        &self,
        budget: f64,
        bounds: &[u32],
    ) -> Result<(IndexSet, f64), TruncationError> {
        assert_eq!(bounds.len(), self.dims(), "bounds must cover every model dimension");
        let cells: u64 = bounds.iter().map(|&b| u64::from(b) + 1).product();
        if cells > u64::from(KNAPSACK_CELL_CAP) {
            return Err(TruncationError::BoxTooLarge { cells, cap: KNAPSACK_CELL_CAP });
        }
        let box_set = IndexSet::full_box(bounds);
        let cells: Vec<&MultiIndex> = box_set.iter().collect();
        let position: std::collections::HashMap<&MultiIndex, usize> =
            cells.iter().enumerate().map(|(k, i)| (*i, k)).collect();
        // per-cell data and backward-neighbor masks
        let mut contribution = Vec::with_capacity(cells.len());
        let mut work = Vec::with_capacity(cells.len());
        let mut below = Vec::with_capacity(cells.len());
        for index in &cells {
            contribution.push(self.index_contribution(index)?);
            work.push(self.index_work(index)?);
            let mut mask = 0u32;
            for neighbor in index.backward_neighbors() {
                mask |= 1 << position[&neighbor];
            }
            below.push(mask);
        }
        let budget_units = budget * (1.0 + 1e-12) / self.k2;
        let mut best_mask = 0u32;
        let mut best_value = 0.0f64;
        for mask in 0u32..(1u32 << cells.len()) {
            let mut closed = true;
            for k in 0..cells.len() {
                if mask >> k & 1 == 1 && below[k] & mask != below[k] {
                    closed = false;
                    break;
                }
            }
            if !closed {
                continue;
            }
            let mut total_work = 0.0;
            let mut total_value = 0.0;
            for k in 0..cells.len() {
                if mask >> k & 1 == 1 {
                    total_work += work[k];
                    total_value += contribution[k];
                }
            }
            if total_work <= budget_units && total_value > best_value {
                best_value = total_value;
                best_mask = mask;
            }
        }
        let members: Vec<MultiIndex> = cells
            .iter()
            .enumerate()
            .filter(|(k, _)| best_mask >> k & 1 == 1)
            .map(|(_, i)| (*i).clone())
            .collect();
        let set = IndexSet::from_members(members, Ambient::Finite(self.dims() as u32))
            .expect("box members in range");
        Ok((set, self.k1 * best_value))
    }

    /// Checks the threshold set's a-priori guarantee
    /// `|I_W|_g ≥ (|I_W|_w / W) · E*(W)` against the exact oracle.
    pub fn dantzig_guarantee_check(
        &self,
        budget: f64,
        bounds: &[u32],
    ) -> Result<bool, TruncationError> {
        let (_, optimum) = self.knapsack_exact(budget, bounds)?;
        let (threshold_set, _) = match self.dantzig_set(budget) {
            Ok(pair) => pair,
            // nothing affordable: the guarantee is vacuous on the empty set
            Err(TruncationError::BudgetTooSmall { .. }) => return Ok(optimum <= 0.0),
            Err(other) => return Err(other),
        };
        let contribution = self.set_contribution(&threshold_set)?;
        let work = self.set_work(&threshold_set)?;
        Ok(contribution >= (work / budget) * optimum - 1e-12)
    }
}

/// Greedy adaptive construction: starting from the origin, repeatedly probe
/// all admissible forward neighbors with the measured profit
/// `‖Δ_mix N(j)‖ / work(N(j))` and admit the maximizer, until the evaluation
/// budget is exhausted. Probe work counts toward the budget; zero-profit
/// neighbors are never admitted; profit ties break toward the canonically
/// smaller index.
pub fn adaptive_build<E: Evaluator>(
    evaluator: &E,
    budget: f64,
) -> Result<IndexSet, AdaptiveBuildError> {
    let engine = SmolyakEngine::new(evaluator);
    let ambient = evaluator.ambient();
    let space = evaluator.space();
    let origin = MultiIndex::origin();

    let partial_on = |members: &BTreeSet<MultiIndex>, source: EvalError| AdaptiveBuildError::Eval {
        partial: IndexSet::from_members(members.iter().cloned(), ambient)
            .expect("grown set stays valid"),
        source,
    };

    let mut members: BTreeSet<MultiIndex> = BTreeSet::new();
    engine
        .mixed_difference(&origin)
        .map_err(|e| partial_on(&members, e))?;
    members.insert(origin);
    let origin_work = engine.cache().total_work();
    if origin_work > budget * (1.0 + 1e-12) {
        return Err(AdaptiveBuildError::InsufficientBudget { budget, required: origin_work });
    }

    let mut profits: std::collections::BTreeMap<MultiIndex, f64> = Default::default();
    while engine.cache().total_work() < budget * (1.0 - 1e-12) {
        let neighbors = admissible_forward_neighbors_of(&members, ambient);
        for neighbor in &neighbors {
            if profits.contains_key(neighbor) {
                continue;
            }
            let difference =
                engine.mixed_difference(neighbor).map_err(|e| partial_on(&members, e))?;
            let probe_work = engine
                .cache()
                .get(neighbor)
                .map(|e| e.work)
                .unwrap_or(f64::MIN_POSITIVE);
            profits.insert(neighbor.clone(), space.norm(&difference) / probe_work);
        }
        if engine.cache().total_work() > budget * (1.0 + 1e-12) {
            break;
        }
        // canonical iteration with strict improvement keeps ties on the
        // smaller index
        let mut best: Option<(&MultiIndex, f64)> = None;
        for neighbor in &neighbors {
            let profit = profits[neighbor];
            if best.map(|(_, p)| profit > p).unwrap_or(true) {
                best = Some((neighbor, profit));
            }
        }
        match best {
            Some((index, profit)) if profit > 0.0 => {
                let index = index.clone();
                profits.remove(&index);
                members.insert(index);
            }
            _ => break,
        }
    }
    Ok(IndexSet::from_members(members, ambient).expect("grown set stays valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::MultiIndex;
    use crate::synthetic::{AdditiveDecay, Constant, FailingAt};
    use approx::assert_relative_eq;

    fn mi(values: &[u32]) -> MultiIndex {
        MultiIndex::from_dense(values)
    }

    fn set(members: &[&[u32]], d: u32) -> IndexSet {
        IndexSet::from_members(members.iter().map(|m| mi(m)), Ambient::Finite(d)).unwrap()
    }

    /// g_j(i) = 2^{−i}, w_j(i) = 2^{i}.
    fn halving_model(d: usize, k1: f64, k2: f64) -> ProfitModel {
        ProfitModel::exponential(
            &vec![std::f64::consts::LN_2; d],
            &vec![std::f64::consts::LN_2; d],
            k1,
            k2,
        )
        .unwrap()
    }

    #[test]
    fn contribution_and_work_examples() {
        let m = halving_model(2, 1.0, 1.0);
        assert_eq!(m.set_contribution(&IndexSet::empty(Ambient::Finite(2))).unwrap(), 0.0);
        let s = set(&[&[0, 0], &[1, 0], &[0, 1]], 2);
        assert_relative_eq!(m.set_contribution(&s).unwrap(), 2.0, max_relative = 1e-12);
        assert_relative_eq!(m.set_work(&s).unwrap(), 5.0, max_relative = 1e-12);

        let m = halving_model(2, 3.0, 1.0);
        let origin_only = set(&[&[0, 0]], 2);
        assert_relative_eq!(m.set_contribution(&origin_only).unwrap(), 3.0);
        assert_relative_eq!(m.set_work(&origin_only).unwrap(), 1.0);
    }

    #[test]
    fn model_validation_rejects_bad_profiles() {
        assert!(matches!(
            ProfitModel::new(
                vec![ProfileFn::exponential(0.5)], // increasing decay profile
                vec![ProfileFn::exponential(0.5)],
                1.0,
                1.0
            ),
            Err(TruncationError::InvalidDecay { dim: 0 })
        ));
        assert!(matches!(
            ProfitModel::new(
                vec![ProfileFn::exponential(-0.5)],
                vec![ProfileFn::Table(vec![2.0, 1.0])], // decreasing work
                1.0,
                1.0
            ),
            Err(TruncationError::InvalidWork { dim: 0 })
        ));
        assert!(matches!(
            ProfitModel::exponential(&[1.0], &[1.0], 0.0, 1.0),
            Err(TruncationError::InvalidConstant { which: 1, .. })
        ));
    }

    #[test]
    fn dantzig_worked_example() {
        // g_j(i) = 4^{−i}, w_j(i) = 2^{i}, d = 2, W = 5: ratios per level sum
        // are 1, 1/8, 1/64, ... — the 1/64 block overflows the budget.
        let ln4 = 2.0 * std::f64::consts::LN_2;
        let m = ProfitModel::exponential(&[ln4, ln4], &[std::f64::consts::LN_2; 2], 1.0, 1.0)
            .unwrap();
        let (s, delta) = m.dantzig_set(5.0).unwrap();
        assert_eq!(s, set(&[&[0, 0], &[1, 0], &[0, 1]], 2));
        assert_relative_eq!(delta, 1.0 / 64.0, max_relative = 1e-12);
        assert_relative_eq!(m.set_work(&s).unwrap(), 5.0, max_relative = 1e-12);
    }

    #[test]
    fn dantzig_origin_budget_and_too_small() {
        let m = halving_model(2, 1.0, 1.0);
        let (s, _) = m.dantzig_set(1.0).unwrap();
        assert_eq!(s, set(&[&[0, 0]], 2));
        assert!(matches!(
            m.dantzig_set(0.5),
            Err(TruncationError::BudgetTooSmall { .. })
        ));
    }

    #[test]
    fn dantzig_matches_sort_and_prefix_oracle() {
        // oracle: sort the affordable region by ratio, admit equal-ratio
        // blocks greedily, never past a ratio attainable outside the region
        let mut rng = crate::stream::SplitMix64::new(0x9a7);
        for _ in 0..100 {
            let d = 1 + (rng.next_u64() % 3) as usize;
            let decay: Vec<f64> = (0..d).map(|_| 0.4 + 1.6 * rng.next_f64()).collect();
            let work: Vec<f64> = (0..d).map(|_| 0.3 + 1.2 * rng.next_f64()).collect();
            let m = ProfitModel::exponential(&decay, &work, 1.0, 1.0).unwrap();
            let budget = 1.0 + rng.next_f64() * 30.0;
            let (s, delta) = m.dantzig_set(budget).unwrap();
            assert!(s.is_downward_closed());
            assert!(m.set_work(&s).unwrap() <= budget * (1.0 + 1e-9));
            // strict-threshold semantics: members above delta, non-members at
            // or below, within the affordable region
            for i in s.iter() {
                assert!(m.index_ratio(i).unwrap() > delta * (1.0 - 1e-9));
            }
            for i in m.affordable_region(budget).unwrap() {
                if !s.contains(&i) {
                    assert!(m.index_ratio(&i).unwrap() <= delta * (1.0 + 1e-9));
                }
            }
        }
    }

    #[test]
    fn dantzig_sets_grow_with_budget() {
        let m = halving_model(2, 1.0, 1.0);
        let mut previous: Option<IndexSet> = None;
        for budget in [1.0, 2.0, 5.0, 9.0, 17.0, 33.0] {
            let (s, _) = m.dantzig_set(budget).unwrap();
            assert!(m.set_work(&s).unwrap() <= budget * (1.0 + 1e-9));
            if let Some(p) = &previous {
                assert!(p.is_subset_of(&s), "threshold sets must be monotone in the budget");
            }
            previous = Some(s);
        }
    }

    #[test]
    fn knapsack_oracle_worked_example() {
        let m = halving_model(2, 1.0, 1.0);
        let (s, optimum) = m.knapsack_exact(5.0, &[2, 2]).unwrap();
        assert_relative_eq!(optimum, 2.0, max_relative = 1e-12);
        assert_eq!(s, set(&[&[0, 0], &[1, 0], &[0, 1]], 2));

        // budget below the origin: empty optimum
        let (s, optimum) = m.knapsack_exact(0.25, &[2, 2]).unwrap();
        assert!(s.is_empty());
        assert_eq!(optimum, 0.0);

        // budget above the whole box: everything
        let (s, _) = m.knapsack_exact(1e6, &[2, 2]).unwrap();
        assert_eq!(s.len(), 9);
    }

    #[test]
    fn knapsack_oracle_rejects_large_boxes() {
        let m = halving_model(2, 1.0, 1.0);
        assert!(matches!(
            m.knapsack_exact(5.0, &[4, 4]),
            Err(TruncationError::BoxTooLarge { cells: 25, .. })
        ));
    }

    #[test]
    fn guarantee_holds_on_worked_example() {
        let ln4 = 2.0 * std::f64::consts::LN_2;
        let m = ProfitModel::exponential(&[ln4, ln4], &[std::f64::consts::LN_2; 2], 1.0, 1.0)
            .unwrap();
        assert!(m.dantzig_guarantee_check(5.0, &[3, 3]).unwrap());
    }

    #[test]
    fn full_budget_dantzig_is_optimal() {
        // when the threshold set uses the whole budget it solves the
        // knapsack problem outright
        let m = halving_model(2, 1.0, 1.0);
        let (s, _) = m.dantzig_set(5.0).unwrap();
        assert_relative_eq!(m.set_work(&s).unwrap(), 5.0, max_relative = 1e-12);
        let (_, optimum) = m.knapsack_exact(5.0, &[3, 3]).unwrap();
        assert_relative_eq!(m.set_contribution(&s).unwrap(), optimum, max_relative = 1e-12);
    }

    #[test]
    fn adaptive_constant_stops_after_first_round() {
        let n = Constant::new(3.0, 2);
        let s = adaptive_build(&n, 50.0).unwrap();
        assert_eq!(s, set(&[&[0, 0]], 2));
    }

    #[test]
    fn adaptive_origin_budget_only() {
        let n = AdditiveDecay::new(vec![2.0, 4.0]);
        let s = adaptive_build(&n, 1.0).unwrap();
        assert_eq!(s, set(&[&[0, 0]], 2));
    }

    #[test]
    fn adaptive_prefers_slow_decay_direction() {
        // N(i) = 2^{−i₁} + 4^{−i₂}: dimension 1 errors decay slower, so the
        // greedy set elongates along dimension 1
        let n = AdditiveDecay::new(vec![2.0, 4.0]);
        let s = adaptive_build(&n, 40.0).unwrap();
        assert!(s.is_downward_closed());
        let max0 = s.iter().map(|i| i.get(0)).max().unwrap();
        let max1 = s.iter().map(|i| i.get(1)).max().unwrap();
        assert!(max0 > max1, "expected elongation along dimension 1: {max0} vs {max1}");
        // hand-simulated first admissions: (0,1), (1,0), (2,0), (0,2), (3,0)
        for expected in [&[0u32, 1], &[1, 0], &[2, 0], &[0, 2], &[3, 0]] {
            assert!(s.contains(&mi(expected)));
        }
    }

    #[test]
    fn adaptive_stays_within_budget_and_reports_failures() {
        let n = AdditiveDecay::new(vec![2.0, 4.0]);
        for budget in [1.0, 3.0, 10.0, 25.0] {
            let s = adaptive_build(&n, budget).unwrap();
            assert!(s.is_downward_closed());
            // unit work per index: the member count can be at most the budget
            assert!(s.len() as f64 <= budget + 1e-9);
        }

        let n = FailingAt::new(mi(&[0, 1]), 2);
        match adaptive_build(&n, 10.0) {
            Err(AdaptiveBuildError::Eval { partial, source }) => {
                assert_eq!(source.index, mi(&[0, 1]));
                assert_eq!(partial, set(&[&[0, 0]], 2));
            }
            other => panic!("expected evaluator failure, got {other:?}"),
        }
    }

    #[test]
    fn table_profiles_error_past_their_end() {
        let m = ProfitModel::new(
            vec![ProfileFn::Table(vec![1.0, 0.5, 0.25])],
            vec![ProfileFn::Table(vec![1.0, 2.0, 4.0])],
            1.0,
            1.0,
        )
        .unwrap();
        // budget admitting levels beyond the table must surface the gap
        assert!(matches!(
            m.dantzig_set(100.0),
            Err(TruncationError::TableExhausted { dim: 0, level: 3 })
        ));
        let (s, _) = m.dantzig_set(3.0).unwrap();
        assert_eq!(s, set(&[&[0], &[1]], 1));
    }
}
