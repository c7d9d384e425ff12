//! Discrete difference calculus on evaluators and the combination rule.
//!
//! A multi-parameter method is decomposed into mixed differences
//! `Δ_mix N(i)`; summing them over a rectangle reproduces point values, and
//! summing over a downward closed set recombines into an integer-weighted
//! linear combination of method values (the combination rule).

use crate::multiindex::{Ambient, IndexSet, MultiIndex};
use serde_json::{json, Value};
use thiserror::Error;

/// Abstract normed vector space the evaluator maps into. Operations are
/// supplied by the space object so elements of dynamic shape (vectors,
/// tables) need no global context.
pub trait ValueSpace: Send + Sync {
    type Elem: Clone + Send + Sync + 'static;

    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, alpha: f64, a: &Self::Elem) -> Self::Elem;
    fn norm(&self, a: &Self::Elem) -> f64;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.scale(-1.0, b))
    }
}

/// The real line with absolute value.
#[derive(Clone, Copy, Debug, Default)]
pub struct RealLine;

impl ValueSpace for RealLine {
    type Elem = f64;

    fn zero(&self) -> f64 {
        0.0
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn scale(&self, alpha: f64, a: &f64) -> f64 {
        alpha * a
    }
    fn norm(&self, a: &f64) -> f64 {
        a.abs()
    }
}

/// ℝ^n with the Euclidean norm.
#[derive(Clone, Copy, Debug)]
pub struct EuclideanSpace {
    pub dim: usize,
}

impl ValueSpace for EuclideanSpace {
    type Elem = Vec<f64>;

    fn zero(&self) -> Vec<f64> {
        vec![0.0; self.dim]
    }
    fn add(&self, a: &Vec<f64>, b: &Vec<f64>) -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }
    fn scale(&self, alpha: f64, a: &Vec<f64>) -> Vec<f64> {
        a.iter().map(|x| alpha * x).collect()
    }
    fn norm(&self, a: &Vec<f64>) -> f64 {
        a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// One evaluator call: the value and the work it cost.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct Evaluation<V> {
    pub value: V,
    pub work: f64,
}

#[derive(Debug, Error)]
#[error("evaluation failed at index {index}: {message}")]
pub struct EvalError {
    pub index: MultiIndex,
    pub message: String,
}

impl EvalError {
    pub fn new(index: &MultiIndex, message: impl Into<String>) -> Self {
        EvalError { index: index.clone(), message: message.into() }
    }
}

/// A black-box numerical method `i ↦ (value, work)`. Implementations must be
/// deterministic per index (and per their own seed) and report strictly
/// positive, additive work.
pub trait Evaluator: Send + Sync {
    type Space: ValueSpace;

    fn space(&self) -> &Self::Space;
    fn ambient(&self) -> Ambient;
    fn eval(&self, index: &MultiIndex) -> Result<Evaluation<ElemOf<Self>>, EvalError>;
}

pub type ElemOf<E> = <<E as Evaluator>::Space as ValueSpace>::Elem;

/// Mixed difference `Δ_mix N(i)` by the shift expansion
/// `Σ_{e ∈ {0,1}^d, e ≤ i} (−1)^{|e|₁} N(i − e)`; shifts below zero are
/// dropped, so only the support dimensions of `i` contribute and the origin
/// returns `N(0)`.
pub fn mixed_difference<E: Evaluator + ?Sized>(
    evaluator: &E,
    index: &MultiIndex,
) -> Result<ElemOf<E>, EvalError> {
    let space = evaluator.space();
    let support: Vec<u32> = index.support().collect();
    assert!(support.len() < 63, "mixed difference over more than 62 active dimensions");
    let mut acc = space.zero();
    for mask in 0u64..(1u64 << support.len()) {
        let mut shifted = index.clone();
        for (bit, &dim) in support.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                shifted = shifted.decremented(dim).expect("support dimension is nonzero");
            }
        }
        let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        let term = evaluator.eval(&shifted)?.value;
        acc = space.add(&acc, &space.scale(sign, &term));
    }
    Ok(acc)
}

/// Sums `Δ_mix N(s)` over the full rectangle `{0..i₁} × … × {0..i_d}`.
/// By the inversion identity this reproduces `N(i)` (up to floating error),
/// which makes it a brute-force oracle for the decomposition.
pub fn rectangular_sum<E: Evaluator + ?Sized>(
    evaluator: &E,
    index: &MultiIndex,
) -> Result<ElemOf<E>, EvalError> {
    let space = evaluator.space();
    let support: Vec<u32> = index.support().collect();
    let mut acc = space.zero();
    let mut values: Vec<u32> = vec![0; support.len()];
    loop {
        let point = MultiIndex::from_pairs(
            support.iter().copied().zip(values.iter().copied()),
        )
        .expect("distinct dimensions");
        let term = mixed_difference(evaluator, &point)?;
        acc = space.add(&acc, &term);
        let mut k = 0;
        loop {
            if k == support.len() {
                return Ok(acc);
            }
            if values[k] < index.get(support[k]) {
                values[k] += 1;
                break;
            }
            values[k] = 0;
            k += 1;
        }
    }
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("combination coefficients require a downward closed set")]
    NotDownwardClosed,
}

/// The executable form of the recombination `S_I(N) = Σ c_i N(i)`: indices
/// with integer coefficients. Zero-coefficient indices are omitted.
#[derive(Clone, Debug, PartialEq)]
pub struct CombinationPlan {
    terms: Vec<(MultiIndex, i64)>,
    source_set: IndexSet,
}

impl CombinationPlan {
    /// Terms in canonical index order, zero coefficients omitted.
    pub fn terms(&self) -> &[(MultiIndex, i64)] {
        &self.terms
    }

    pub fn source_set(&self) -> &IndexSet {
        &self.source_set
    }

    pub fn coefficient(&self, index: &MultiIndex) -> i64 {
        self.terms
            .binary_search_by(|(i, _)| i.cmp(index))
            .map(|k| self.terms[k].1)
            .unwrap_or(0)
    }

    /// Sums to 1 for nonempty downward closed source sets (the constant
    /// method is reproduced exactly).
    pub fn coefficient_sum(&self) -> i64 {
        self.terms.iter().map(|&(_, c)| c).sum()
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(i, c)| match self.source_set.ambient() {
                Ambient::Finite(d) => json!({ "index": i.to_dense(d), "coeff": c }),
                Ambient::Unbounded => {
                    let obj: serde_json::Map<String, Value> = i
                        .entries()
                        .iter()
                        .map(|&(d, v)| (d.to_string(), Value::from(v)))
                        .collect();
                    json!({ "index": obj, "coeff": c })
                }
            })
            .collect();
        json!({ "source_set": self.source_set.to_json(), "terms": terms })
    }
}

/// Combination-rule coefficients `c_i = Σ_{e ∈ {0,1}^d, i+e ∈ I} (−1)^{|e|₁}`
/// for a downward closed set, computed by decomposing every member
/// `j = i + e` over its support (inclusion–exclusion). Interior indices
/// (those with `i + (1,…,1) ∈ I`) cancel to zero and are omitted.
pub fn combination_coefficients(set: &IndexSet) -> Result<CombinationPlan, PlanError> {
    if !set.is_downward_closed() {
        return Err(PlanError::NotDownwardClosed);
    }
    let mut coeffs: std::collections::BTreeMap<MultiIndex, i64> = Default::default();
    for member in set.iter() {
        let support: Vec<u32> = member.support().collect();
        assert!(support.len() < 63, "combination rule over more than 62 active dimensions");
        for mask in 0u64..(1u64 << support.len()) {
            let mut target = member.clone();
            for (bit, &dim) in support.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    target = target.decremented(dim).expect("support dimension");
                }
            }
            let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
            *coeffs.entry(target).or_insert(0) += sign;
        }
    }
    let terms: Vec<(MultiIndex, i64)> =
        coeffs.into_iter().filter(|&(_, c)| c != 0).collect();
    Ok(CombinationPlan { terms, source_set: set.clone() })
}

fn binomial(n: u64, k: u64) -> i64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: u64 = 1;
    for j in 0..k {
        out = out * (n - j) / (j + 1);
    }
    out as i64
}

/// Closed-form coefficients on the standard simplex `{|i|₁ ≤ L}`:
/// `c_i = (−1)^{L−|i|₁} · C(d−1, L−|i|₁)` for `L−d+1 ≤ |i|₁ ≤ L`, zero
/// otherwise. Matches [`combination_coefficients`] index by index.
pub fn simplex_coefficients(d: u32, level: u32) -> CombinationPlan {
    assert!(d >= 1, "simplex coefficients need at least one dimension");
    let set = IndexSet::simplex(d, level);
    let terms: Vec<(MultiIndex, i64)> = set
        .iter()
        .filter_map(|i| {
            let defect = u64::from(level) - i.l1();
            let c = binomial(u64::from(d) - 1, defect);
            if c == 0 {
                return None;
            }
            let signed = if defect % 2 == 0 { c } else { -c };
            Some((i.clone(), signed))
        })
        .collect();
    CombinationPlan { terms, source_set: set }
}
