//! Sparse-grid quadrature on `[0,1]^d` via the combination technique.
//!
//! Tensor rules built from nested closed trapezoid rules serve as the
//! evaluator; recombining them over a downward closed set evaluates the
//! integrand on a union of tensor grids (a sparse grid). Work is counted in
//! distinct integrand evaluations: nodes are dyadic rationals, exactly
//! representable, so merging keys on exact bit patterns is safe.

use crate::decomposition::{EvalError, Evaluation, Evaluator, RealLine};
use crate::engine::{EngineError, SmolyakEngine, SmolyakResult};
use crate::multiindex::{Ambient, IndexSet, MultiIndex};
use dashmap::DashMap;

/// Weights below this threshold are dropped from merged sparse grids.
const WEIGHT_DROP: f64 = 1e-15;

/// A univariate quadrature rule on [0,1].
#[derive(Clone, Debug)]
pub struct UnivariateRule {
    pub level: u32,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub nested: bool,
}

impl UnivariateRule {
    /// Closed composite trapezoid rule at level ℓ: `2^ℓ + 1` equispaced
    /// nodes at spacing `2^{−ℓ}`; node sets are nested across levels.
    pub fn trapezoid(level: u32) -> Self {
        assert!(level < 30, "trapezoid level {level} would need 2^{level}+1 nodes");
        let n = (1usize << level) + 1;
        let h = 1.0 / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n).map(|k| k as f64 * h).collect();
        let mut weights = vec![h; n];
        weights[0] = h / 2.0;
        weights[n - 1] = h / 2.0;
        UnivariateRule { level, nodes, weights, nested: true }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

/// Shared store of integrand values keyed by the exact bit patterns of the
/// node coordinates. Tracks the number of distinct evaluations.
struct NodeStore<F> {
    f: F,
    values: DashMap<Vec<u64>, f64>,
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> NodeStore<F> {
    fn new(f: F) -> Self {
        NodeStore { f, values: DashMap::new() }
    }

    /// Value plus whether this call inserted it. Exactly one concurrent
    /// caller per node observes `fresh`, so summed work equals the distinct
    /// node count under any parallelism.
    fn value_at(&self, point: &[f64]) -> (f64, bool) {
        let key: Vec<u64> = point.iter().map(|x| x.to_bits()).collect();
        if let Some(v) = self.values.get(&key) {
            return (*v, false);
        }
        let v = (self.f)(point);
        match self.values.entry(key) {
            dashmap::Entry::Occupied(e) => (*e.get(), false),
            dashmap::Entry::Vacant(slot) => {
                slot.insert(v);
                (v, true)
            }
        }
    }

    fn distinct(&self) -> usize {
        self.values.len()
    }
}

/// Tensor-product trapezoid quadrature as an evaluator: index `i` selects
/// the per-dimension levels, work is the number of distinct integrand
/// evaluations the call added (nested rules make reuse across neighboring
/// indices the common case).
pub struct TensorQuadrature<F> {
    store: NodeStore<F>,
    dim: u32,
    space: RealLine,
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> TensorQuadrature<F> {
    pub fn new(f: F, dim: u32) -> Self {
        TensorQuadrature { store: NodeStore::new(f), dim, space: RealLine }
    }

    /// Distinct integrand evaluations so far.
    pub fn distinct_evaluations(&self) -> usize {
        self.store.distinct()
    }

    /// Full tensor rule at `index`; also reports the number of nodes it
    /// touched (the naive per-term work `Π_j (2^{i_j}+1)`).
    pub fn tensor_value(&self, index: &MultiIndex) -> (f64, u64) {
        let (value, nodes, _) = self.tensor_accumulate(index);
        (value, nodes)
    }

    fn tensor_accumulate(&self, index: &MultiIndex) -> (f64, u64, u64) {
        let rules: Vec<UnivariateRule> =
            (0..self.dim).map(|j| UnivariateRule::trapezoid(index.get(j))).collect();
        let node_count: u64 = rules.iter().map(|r| r.node_count() as u64).product();
        let mut point = vec![0.0; self.dim as usize];
        let mut positions = vec![0usize; self.dim as usize];
        let mut total = 0.0;
        let mut fresh = 0u64;
        // row-major walk over the product grid keeps the accumulation order
        // fixed
        'grid: loop {
            let mut weight = 1.0;
            for (j, rule) in rules.iter().enumerate() {
                point[j] = rule.nodes[positions[j]];
                weight *= rule.weights[positions[j]];
            }
            let (value, inserted) = self.store.value_at(&point);
            total += weight * value;
            fresh += u64::from(inserted);
            let mut j = 0;
            loop {
                if j == rules.len() {
                    break 'grid;
                }
                if positions[j] + 1 < rules[j].node_count() {
                    positions[j] += 1;
                    break;
                }
                positions[j] = 0;
                j += 1;
            }
        }
        (total, node_count, fresh)
    }
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> Evaluator for TensorQuadrature<F> {
    type Space = RealLine;

    fn space(&self) -> &RealLine {
        &self.space
    }
    fn ambient(&self) -> Ambient {
        Ambient::Finite(self.dim)
    }
    fn eval(&self, index: &MultiIndex) -> Result<Evaluation<f64>, EvalError> {
        let (value, _, fresh) = self.tensor_accumulate(index);
        if !value.is_finite() {
            return Err(EvalError::new(index, "integrand produced a non-finite value"));
        }
        Ok(Evaluation { value, work: fresh as f64 })
    }
}

/// One-shot full tensor rule: `(value, integrand evaluations)`.
pub fn tensor_quadrature<F: Fn(&[f64]) -> f64 + Send + Sync>(
    f: F,
    index: &MultiIndex,
    dim: u32,
) -> (f64, u64) {
    TensorQuadrature::new(f, dim).tensor_value(index)
}

/// Sparse quadrature `S_I` of `f` over a downward closed set; work counts
/// distinct integrand evaluations after node merging.
pub fn sparse_quadrature<F: Fn(&[f64]) -> f64 + Send + Sync>(
    f: F,
    set: &IndexSet,
    dim: u32,
) -> Result<SmolyakResult<f64>, EngineError> {
    let evaluator = TensorQuadrature::new(f, dim);
    let engine = SmolyakEngine::new(&evaluator);
    engine.apply(set)
}

/// A merged sparse grid: nodes with accumulated weights, near-zero weights
/// dropped.
#[derive(Clone, Debug)]
pub struct SparseQuadratureGrid {
    pub points: Vec<(Vec<f64>, f64)>,
}

impl SparseQuadratureGrid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.points.iter().map(|(_, w)| w).sum()
    }

    /// Applies the merged rule to an integrand — the second route to the
    /// sparse quadrature value.
    pub fn apply<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.points.iter().map(|(x, w)| w * f(x)).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let points: Vec<serde_json::Value> = self
            .points
            .iter()
            .map(|(x, w)| serde_json::json!({ "node": x, "weight": w }))
            .collect();
        serde_json::json!(points)
    }
}

/// Merges the tensor grids of every plan term into one weighted point set:
/// node weight `Σ_terms c_i · (tensor weight at the node)`.
pub fn sparse_grid_nodes(set: &IndexSet, dim: u32) -> Result<SparseQuadratureGrid, EngineError> {
    let plan = crate::decomposition::combination_coefficients(set)?;
    let mut merged: std::collections::BTreeMap<Vec<u64>, (Vec<f64>, f64)> = Default::default();
    for (index, coeff) in plan.terms() {
        let rules: Vec<UnivariateRule> =
            (0..dim).map(|j| UnivariateRule::trapezoid(index.get(j))).collect();
        let mut positions = vec![0usize; dim as usize];
        'grid: loop {
            let mut point = Vec::with_capacity(dim as usize);
            let mut weight = *coeff as f64;
            for (j, rule) in rules.iter().enumerate() {
                point.push(rule.nodes[positions[j]]);
                weight *= rule.weights[positions[j]];
            }
            let key: Vec<u64> = point.iter().map(|x| x.to_bits()).collect();
            merged
                .entry(key)
                .and_modify(|(_, w)| *w += weight)
                .or_insert((point, weight));
            let mut j = 0;
            loop {
                if j == rules.len() {
                    break 'grid;
                }
                if positions[j] + 1 < rules[j].node_count() {
                    positions[j] += 1;
                    break;
                }
                positions[j] = 0;
                j += 1;
            }
        }
    }
    let points: Vec<(Vec<f64>, f64)> = merged
        .into_values()
        .filter(|(_, w)| w.abs() >= WEIGHT_DROP)
        .collect();
    Ok(SparseQuadratureGrid { points })
}

/// Two-parameter evaluator `N(i, k) = S_i r_k`: quadrature rule at level `i`
/// applied to the `k`-th member of a converging approximant sequence. Point
/// evaluations of `r_k` cost `cost(k)` work units.
pub struct ApproximantQuadrature<R, C> {
    approximant: R,
    cost: C,
    space: RealLine,
}

impl<R, C> ApproximantQuadrature<R, C>
where
    R: Fn(u32, f64) -> f64 + Send + Sync,
    C: Fn(u32) -> f64 + Send + Sync,
{
    pub fn new(approximant: R, cost: C) -> Self {
        ApproximantQuadrature { approximant, cost, space: RealLine }
    }
}

impl<R, C> Evaluator for ApproximantQuadrature<R, C>
where
    R: Fn(u32, f64) -> f64 + Send + Sync,
    C: Fn(u32) -> f64 + Send + Sync,
{
    type Space = RealLine;

    fn space(&self) -> &RealLine {
        &self.space
    }
    fn ambient(&self) -> Ambient {
        Ambient::Finite(2)
    }
    fn eval(&self, index: &MultiIndex) -> Result<Evaluation<f64>, EvalError> {
        let rule = UnivariateRule::trapezoid(index.get(0));
        let k = index.get(1);
        let mut total = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            total += w * (self.approximant)(k, *x);
        }
        Ok(Evaluation { value: total, work: rule.node_count() as f64 * (self.cost)(k) })
    }
}

/// Bilinear multilevel quadrature demonstrator: recombines
/// `N(i, k) = S_i r_k` over a two-parameter downward closed set. With
/// approximants converging to `r` this approximates `∫ r` while spending
/// most evaluations on the cheap early approximants.
pub fn bilinear_multilevel_demo<R, C>(
    approximant: R,
    cost: C,
    set: &IndexSet,
) -> Result<SmolyakResult<f64>, EngineError>
where
    R: Fn(u32, f64) -> f64 + Send + Sync,
    C: Fn(u32) -> f64 + Send + Sync,
{
    let evaluator = ApproximantQuadrature::new(approximant, cost);
    let engine = SmolyakEngine::new(&evaluator);
    engine.apply(set)
}

/// Named integrands for studies: each returns `(f, exact integral)` on
/// `[0,1]^d`.
pub fn integrand_registry(
    name: &str,
    dim: u32,
) -> Option<(Box<dyn Fn(&[f64]) -> f64 + Send + Sync>, f64)> {
    let d = dim as i32;
    match name {
        // e^{Σ x_j}, ∫ = (e−1)^d
        "exp-sum" => Some((
            Box::new(|x: &[f64]| x.iter().sum::<f64>().exp()),
            (std::f64::consts::E - 1.0).powi(d),
        )),
        // Π 1/(1+25x²), ∫ = (atan(5)/5)^d
        "runge-product" => Some((
            Box::new(|x: &[f64]| x.iter().map(|&t| 1.0 / (1.0 + 25.0 * t * t)).product()),
            (5.0f64.atan() / 5.0).powi(d),
        )),
        // Π 2x_j, ∫ = 1; degree-1 per dimension, integrated exactly by
        // trapezoid rules at any level
        "polynomial" => Some((
            Box::new(|x: &[f64]| x.iter().map(|&t| 2.0 * t).product()),
            1.0,
        )),
        _ => None,
    }
}
