//! Executes the recombination `S_I(N)` over any evaluator and index set,
//! with memoization, work accounting, error estimation and convergence
//! studies.
//!
//! Evaluations of distinct indices may run in parallel; every reduction is
//! sequential in canonical index order, so results are identical for any
//! thread count.

use crate::decomposition::{
    combination_coefficients, mixed_difference, rectangular_sum, ElemOf, EvalError, Evaluation,
    Evaluator, PlanError, ValueSpace,
};
use crate::multiindex::{Ambient, IndexSet, MultiIndex};
use dashmap::DashMap;
use rayon::prelude::*;
use serde::{de::DeserializeOwned, Serialize};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("operation requires a downward closed index set")]
    NotDownwardClosed,
    #[error("convergence study against the richest set requires nested sets")]
    NonNestedSets,
    #[error("cache persistence failed: {0}")]
    CacheIo(String),
}

impl From<PlanError> for EngineError {
    fn from(_: PlanError) -> Self {
        EngineError::NotDownwardClosed
    }
}

/// Memoization cache mapping indices to evaluations. A key, once inserted,
/// is never overwritten, so every index's work is accounted exactly once.
/// Concurrent insertion of distinct keys is supported.
pub struct EvaluationCache<V> {
    map: DashMap<MultiIndex, Evaluation<V>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl<V: Clone + Send + Sync> Default for EvaluationCache<V> {
    fn default() -> Self {
        Self::new()
    }
}

impl<V: Clone + Send + Sync> EvaluationCache<V> {
    pub fn new() -> Self {
        EvaluationCache { map: DashMap::new(), hits: AtomicU64::new(0), misses: AtomicU64::new(0) }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn get(&self, index: &MultiIndex) -> Option<Evaluation<V>> {
        self.map.get(index).map(|e| e.clone())
    }

    pub fn contains(&self, index: &MultiIndex) -> bool {
        self.map.contains_key(index)
    }

    fn insert_if_absent(&self, index: MultiIndex, evaluation: Evaluation<V>) {
        self.map.entry(index).or_insert(evaluation);
    }

    /// Total work over all distinct evaluated indices. Summed in canonical
    /// index order so the floating result is reproducible.
    pub fn total_work(&self) -> f64 {
        let mut entries: Vec<(MultiIndex, f64)> =
            self.map.iter().map(|e| (e.key().clone(), e.value().work)).collect();
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        entries.iter().map(|&(_, w)| w).sum()
    }
}

const CACHE_SCHEMA_VERSION: u64 = 1;

impl<V: Clone + Send + Sync + Serialize + DeserializeOwned> EvaluationCache<V> {
    /// Writes the cache as versioned JSON. Only available when the value
    /// space elements are serializable; other evaluators cache in memory
    /// per run.
    pub fn save_json(&self, path: &Path) -> Result<(), EngineError> {
        let mut entries: Vec<(MultiIndex, Evaluation<V>)> =
            self.map.iter().map(|e| (e.key().clone(), e.value().clone())).collect();
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let entries: Vec<serde_json::Value> = entries
            .into_iter()
            .map(|(i, e)| {
                serde_json::json!({
                    "index": i.entries().iter().map(|&(d, v)| vec![d, v]).collect::<Vec<_>>(),
                    "value": serde_json::to_value(&e.value).unwrap_or(serde_json::Value::Null),
                    "work": e.work,
                })
            })
            .collect();
        let doc = serde_json::json!({ "schema_version": CACHE_SCHEMA_VERSION, "entries": entries });
        std::fs::write(path, serde_json::to_string_pretty(&doc).expect("serializable"))
            .map_err(|e| EngineError::CacheIo(e.to_string()))
    }

    pub fn load_json(path: &Path) -> Result<Self, EngineError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| EngineError::CacheIo(e.to_string()))?;
        let doc: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| EngineError::CacheIo(e.to_string()))?;
        if doc.get("schema_version").and_then(serde_json::Value::as_u64)
            != Some(CACHE_SCHEMA_VERSION)
        {
            return Err(EngineError::CacheIo("unsupported cache schema version".into()));
        }
        let cache = EvaluationCache::new();
        let entries = doc
            .get("entries")
            .and_then(serde_json::Value::as_array)
            .ok_or_else(|| EngineError::CacheIo("missing entries".into()))?;
        for entry in entries {
            let pairs = entry
                .get("index")
                .and_then(serde_json::Value::as_array)
                .ok_or_else(|| EngineError::CacheIo("missing index".into()))?;
            let mut parsed = Vec::with_capacity(pairs.len());
            for p in pairs {
                let p = p.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                    EngineError::CacheIo("index entries must be [dim, value] pairs".into())
                })?;
                parsed.push((
                    p[0].as_u64().unwrap_or(u64::MAX) as u32,
                    p[1].as_u64().unwrap_or(0) as u32,
                ));
            }
            let index = MultiIndex::from_pairs(parsed)
                .ok_or_else(|| EngineError::CacheIo("duplicate dimension".into()))?;
            let value: V = serde_json::from_value(
                entry.get("value").cloned().unwrap_or(serde_json::Value::Null),
            )
            .map_err(|e| EngineError::CacheIo(e.to_string()))?;
            let work = entry
                .get("work")
                .and_then(serde_json::Value::as_f64)
                .ok_or_else(|| EngineError::CacheIo("missing work".into()))?;
            cache.insert_if_absent(index, Evaluation { value, work });
        }
        Ok(cache)
    }
}

/// An evaluator view that reads through a shared cache, so the 2^d shift
/// expansion of neighboring mixed differences reuses values.
pub struct CachedEvaluator<'a, E: Evaluator> {
    inner: &'a E,
    cache: &'a EvaluationCache<ElemOf<E>>,
}

impl<'a, E: Evaluator> CachedEvaluator<'a, E> {
    pub fn new(inner: &'a E, cache: &'a EvaluationCache<ElemOf<E>>) -> Self {
        CachedEvaluator { inner, cache }
    }
}

impl<E: Evaluator> Evaluator for CachedEvaluator<'_, E> {
    type Space = E::Space;

    fn space(&self) -> &E::Space {
        self.inner.space()
    }
    fn ambient(&self) -> Ambient {
        self.inner.ambient()
    }
    fn eval(&self, index: &MultiIndex) -> Result<Evaluation<ElemOf<E>>, EvalError> {
        if let Some(hit) = self.cache.get(index) {
            self.cache.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(hit);
        }
        self.cache.misses.fetch_add(1, Ordering::Relaxed);
        let evaluation = self.inner.eval(index)?;
        self.cache.insert_if_absent(index.clone(), evaluation.clone());
        Ok(evaluation)
    }
}

/// Result of one recombination run.
#[derive(Clone, Debug)]
pub struct SmolyakResult<V> {
    pub value: V,
    /// Cumulative work over all distinct indices the engine's cache has
    /// evaluated (each index counted once, coefficient-zero indices never
    /// evaluated).
    pub total_work: f64,
    /// Number of distinct indices evaluated so far.
    pub evaluation_count: usize,
    pub index_set: IndexSet,
    pub error_estimate: Option<f64>,
}

/// Reference value for convergence studies.
pub enum Reference<V> {
    Value(V),
    /// Use the richest (last) set's own result; requires nested sets.
    Richest,
}

/// One row of a convergence study.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StudyRow {
    pub set_size: usize,
    pub work: f64,
    pub error: f64,
}

/// Smolyak executor bound to one evaluator, owning the memoization cache.
pub struct SmolyakEngine<'a, E: Evaluator> {
    evaluator: &'a E,
    cache: EvaluationCache<ElemOf<E>>,
}

impl<'a, E: Evaluator> SmolyakEngine<'a, E> {
    pub fn new(evaluator: &'a E) -> Self {
        SmolyakEngine { evaluator, cache: EvaluationCache::new() }
    }

    /// Resumes from a previously populated (e.g. persisted) cache.
    pub fn with_cache(evaluator: &'a E, cache: EvaluationCache<ElemOf<E>>) -> Self {
        SmolyakEngine { evaluator, cache }
    }

    pub fn cache(&self) -> &EvaluationCache<ElemOf<E>> {
        &self.cache
    }

    pub fn into_cache(self) -> EvaluationCache<ElemOf<E>> {
        self.cache
    }

    fn cached(&self) -> CachedEvaluator<'_, E> {
        CachedEvaluator::new(self.evaluator, &self.cache)
    }

    /// Evaluates any uncached indices, in parallel when a rayon pool with
    /// more than one thread is active. On failure the canonically smallest
    /// failing index is reported; successful evaluations stay cached so
    /// partial work remains accounted.
    fn prefetch(&self, indices: &[&MultiIndex]) -> Result<(), EvalError> {
        let missing: Vec<&MultiIndex> =
            indices.iter().copied().filter(|i| !self.cache.contains(i)).collect();
        if missing.is_empty() {
            return Ok(());
        }
        let results: Vec<(usize, Result<Evaluation<ElemOf<E>>, EvalError>)> = missing
            .par_iter()
            .enumerate()
            .map(|(k, i)| (k, self.evaluator.eval(i)))
            .collect();
        let mut first_error: Option<EvalError> = None;
        for (k, result) in results {
            match result {
                Ok(evaluation) => {
                    self.cache.misses.fetch_add(1, Ordering::Relaxed);
                    self.cache.insert_if_absent(missing[k].clone(), evaluation);
                }
                Err(err) => {
                    let replace = match &first_error {
                        Some(existing) => err.index < existing.index,
                        None => true,
                    };
                    if replace {
                        first_error = Some(err);
                    }
                }
            }
        }
        match first_error {
            Some(err) => Err(err),
            None => Ok(()),
        }
    }

    fn result(&self, value: ElemOf<E>, set: &IndexSet) -> SmolyakResult<ElemOf<E>> {
        SmolyakResult {
            value,
            total_work: self.cache.total_work(),
            evaluation_count: self.cache.len(),
            index_set: set.clone(),
            error_estimate: None,
        }
    }

    /// `S_I(N) = Σ c_i N(i)` via the combination rule. Coefficient-zero
    /// indices are never evaluated; accumulation runs in canonical order.
    pub fn apply(&self, set: &IndexSet) -> Result<SmolyakResult<ElemOf<E>>, EngineError> {
        let plan = combination_coefficients(set)?;
        let indices: Vec<&MultiIndex> = plan.terms().iter().map(|(i, _)| i).collect();
        self.prefetch(&indices)?;
        let space = self.evaluator.space();
        let mut acc = space.zero();
        for (index, coeff) in plan.terms() {
            let value = self.cache.get(index).expect("prefetched").value;
            acc = space.add(&acc, &space.scale(*coeff as f64, &value));
        }
        Ok(self.result(acc, set))
    }

    /// `S_I(N) = Σ_{i∈I} Δ_mix N(i)` — the truncated-decomposition route.
    /// Agrees with [`SmolyakEngine::apply`] up to floating error and serves
    /// as its independent oracle.
    pub fn apply_via_differences(
        &self,
        set: &IndexSet,
    ) -> Result<SmolyakResult<ElemOf<E>>, EngineError> {
        if !set.is_downward_closed() {
            return Err(EngineError::NotDownwardClosed);
        }
        let indices: Vec<&MultiIndex> = set.iter().collect();
        self.prefetch(&indices)?;
        let space = self.evaluator.space();
        let cached = self.cached();
        let mut acc = space.zero();
        for index in set.iter() {
            let term = mixed_difference(&cached, index)?;
            acc = space.add(&acc, &term);
        }
        Ok(self.result(acc, set))
    }

    /// Cached mixed difference `Δ_mix N(i)`.
    pub fn mixed_difference(&self, index: &MultiIndex) -> Result<ElemOf<E>, EvalError> {
        mixed_difference(&self.cached(), index)
    }

    /// Cached rectangular sum `Σ_{s ≤ i} Δ_mix N(s)`; reproduces `N(i)`.
    pub fn rectangular_sum(&self, index: &MultiIndex) -> Result<ElemOf<E>, EvalError> {
        rectangular_sum(&self.cached(), index)
    }

    /// Truncation-error surrogate: the norm sum of mixed differences over
    /// the admissible forward neighbors of `I` — the leading shell of the
    /// complement sum, which itself is not computable.
    pub fn boundary_error_estimate(&self, set: &IndexSet) -> Result<f64, EngineError> {
        let neighbors =
            set.admissible_forward_neighbors().map_err(|_| EngineError::NotDownwardClosed)?;
        let member_refs: Vec<&MultiIndex> = set.iter().chain(neighbors.iter()).collect();
        self.prefetch(&member_refs)?;
        let space = self.evaluator.space();
        let cached = self.cached();
        let mut total = 0.0;
        for neighbor in &neighbors {
            let difference = mixed_difference(&cached, neighbor)?;
            total += space.norm(&difference);
        }
        Ok(total)
    }

    /// Applies `S_I(N)` for each set and reports `(|I|, work, error)` rows.
    /// The cache is shared across rows, so the work column is cumulative
    /// distinct-evaluation work.
    pub fn convergence_study(
        &self,
        sets: &[IndexSet],
        reference: Reference<ElemOf<E>>,
    ) -> Result<Vec<StudyRow>, EngineError> {
        if let Reference::Richest = reference {
            for pair in sets.windows(2) {
                if !pair[0].is_subset_of(&pair[1]) {
                    return Err(EngineError::NonNestedSets);
                }
            }
        }
        let mut partial: Vec<(usize, f64, ElemOf<E>)> = Vec::with_capacity(sets.len());
        for set in sets {
            let result = self.apply(set)?;
            partial.push((set.len(), result.total_work, result.value));
        }
        let space = self.evaluator.space();
        let reference_value = match reference {
            Reference::Value(v) => v,
            Reference::Richest => {
                partial.last().map(|(_, _, v)| v.clone()).unwrap_or_else(|| space.zero())
            }
        };
        Ok(partial
            .into_iter()
            .map(|(set_size, work, value)| StudyRow {
                set_size,
                work,
                error: space.norm(&space.sub(&value, &reference_value)),
            })
            .collect())
    }
}
