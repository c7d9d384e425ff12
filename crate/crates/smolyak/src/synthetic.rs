//! Synthetic evaluators with known structure.
//!
//! These back the convergence studies and the verification suite: methods
//! with prescribed error expansions, additive or product decay, hashed
//! random tables, and a generator for random downward closed sets.

use crate::decomposition::{EvalError, Evaluation, Evaluator, RealLine, ValueSpace};
use crate::multiindex::{admissible_forward_neighbors_of, Ambient, IndexSet, MultiIndex};
use crate::stream::{chain, SplitMix64};
use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

/// Deterministic "random" method: the value at each index is a hash of
/// (seed, index), uniform in [−1, 1]. Work is 1 per evaluation.
#[derive(Clone, Debug)]
pub struct RandomTable {
    seed: u64,
    dim: u32,
    space: RealLine,
}

impl RandomTable {
    pub fn new(seed: u64, dim: u32) -> Self {
        RandomTable { seed, dim, space: RealLine }
    }
}

impl Evaluator for RandomTable {
    type Space = RealLine;

    fn space(&self) -> &RealLine {
        &self.space
    }
    fn ambient(&self) -> Ambient {
        Ambient::Finite(self.dim)
    }
    fn eval(&self, index: &MultiIndex) -> Result<Evaluation<f64>, EvalError> {
        let mut key = self.seed;
        for &(d, v) in index.entries() {
            key = chain(key, (u64::from(d) << 32) | u64::from(v));
        }
        let unit = (chain(key, 0x7ab1) >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0);
        Ok(Evaluation { value: 2.0 * unit - 1.0, work: 1.0 })
    }
}

/// The constant method `N ≡ y₀`.
#[derive(Clone, Debug)]
pub struct Constant {
    value: f64,
    dim: u32,
    space: RealLine,
}

impl Constant {
    pub fn new(value: f64, dim: u32) -> Self {
        Constant { value, dim, space: RealLine }
    }
}

impl Evaluator for Constant {
    type Space = RealLine;

    fn space(&self) -> &RealLine {
        &self.space
    }
    fn ambient(&self) -> Ambient {
        Ambient::Finite(self.dim)
    }
    fn eval(&self, _index: &MultiIndex) -> Result<Evaluation<f64>, EvalError> {
        Ok(Evaluation { value: self.value, work: 1.0 })
    }
}

/// `N(i) = Π_j i_j` — the product method with unit mixed differences on the
/// all-ones box and zero elsewhere.
#[derive(Clone, Debug)]
pub struct Product {
    dim: u32,
    space: RealLine,
}

impl Product {
    pub fn new(dim: u32) -> Self {
        Product { dim, space: RealLine }
    }
}

impl Evaluator for Product {
    type Space = RealLine;

    fn space(&self) -> &RealLine {
        &self.space
    }
    fn ambient(&self) -> Ambient {
        Ambient::Finite(self.dim)
    }
    fn eval(&self, index: &MultiIndex) -> Result<Evaluation<f64>, EvalError> {
        let mut value = 1.0;
        for d in 0..self.dim {
            value *= f64::from(index.get(d));
        }
        Ok(Evaluation { value, work: 1.0 })
    }
}

/// `N(i) = Σ_j base_j^{−i_j}`: additive decay toward 0, so mixed differences
/// vanish off the coordinate axes.
#[derive(Clone, Debug)]
pub struct AdditiveDecay {
    bases: Vec<f64>,
    space: RealLine,
}

impl AdditiveDecay {
    pub fn new(bases: Vec<f64>) -> Self {
        assert!(bases.iter().all(|&b| b > 1.0), "decay bases must exceed 1");
        AdditiveDecay { bases, space: RealLine }
    }
}

impl Evaluator for AdditiveDecay {
    type Space = RealLine;

    fn space(&self) -> &RealLine {
        &self.space
    }
    fn ambient(&self) -> Ambient {
        Ambient::Finite(self.bases.len() as u32)
    }
    fn eval(&self, index: &MultiIndex) -> Result<Evaluation<f64>, EvalError> {
        let value = self
            .bases
            .iter()
            .enumerate()
            .map(|(j, &b)| b.powi(-(index.get(j as u32) as i32)))
            .sum();
        Ok(Evaluation { value, work: 1.0 })
    }
}

/// One term of an error expansion: `coeff · Π_{(j, b) ∈ factors} b^{−i_j}`.
#[derive(Clone, Debug)]
pub struct ExpansionTerm {
    pub coeff: f64,
    pub factors: Vec<(u32, f64)>,
}

/// A method with a prescribed error expansion
/// `N(i) = limit + Σ_terms coeff · Π b_j^{−i_j}`, the synthetic stand-in for
/// discretizations whose error splits into per-subset contributions.
#[derive(Clone, Debug)]
pub struct ErrorExpansion {
    limit: f64,
    terms: Vec<ExpansionTerm>,
    dim: u32,
    space: RealLine,
}

impl ErrorExpansion {
    pub fn new(limit: f64, terms: Vec<ExpansionTerm>, dim: u32) -> Self {
        for t in &terms {
            assert!(t.factors.iter().all(|&(d, b)| d < dim && b > 1.0));
        }
        ErrorExpansion { limit, terms, dim, space: RealLine }
    }

    /// Expansion with one term per nonempty subset of dimensions, geometric
    /// decay `base_j` per dimension and coefficients hashed from `seed`.
    pub fn full_grid(limit: f64, bases: &[f64], seed: u64) -> Self {
        let dim = bases.len() as u32;
        let mut rng = SplitMix64::new(seed);
        let mut terms = Vec::new();
        for mask in 1u32..(1 << dim) {
            let factors: Vec<(u32, f64)> = (0..dim)
                .filter(|d| mask >> d & 1 == 1)
                .map(|d| (d, bases[d as usize]))
                .collect();
            let coeff = 0.2 + rng.next_f64();
            let coeff = if rng.next_u64() % 2 == 0 { coeff } else { -coeff };
            terms.push(ExpansionTerm { coeff, factors });
        }
        ErrorExpansion::new(limit, terms, dim)
    }

    pub fn limit(&self) -> f64 {
        self.limit
    }
}

impl Evaluator for ErrorExpansion {
    type Space = RealLine;

    fn space(&self) -> &RealLine {
        &self.space
    }
    fn ambient(&self) -> Ambient {
        Ambient::Finite(self.dim)
    }
    fn eval(&self, index: &MultiIndex) -> Result<Evaluation<f64>, EvalError> {
        let mut value = self.limit;
        for term in &self.terms {
            let mut product = term.coeff;
            for &(d, b) in &term.factors {
                product *= b.powi(-(index.get(d) as i32));
            }
            value += product;
        }
        Ok(Evaluation { value, work: 1.0 })
    }
}

/// Wraps an evaluator and counts calls; the verification suite uses it to
/// check that caching pays for each index exactly once.
pub struct Counting<E> {
    inner: E,
    calls: AtomicU64,
}

impl<E> Counting<E> {
    pub fn new(inner: E) -> Self {
        Counting { inner, calls: AtomicU64::new(0) }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<E: Evaluator> Evaluator for Counting<E> {
    type Space = E::Space;

    fn space(&self) -> &E::Space {
        self.inner.space()
    }
    fn ambient(&self) -> Ambient {
        self.inner.ambient()
    }
    fn eval(
        &self,
        index: &MultiIndex,
    ) -> Result<Evaluation<<E::Space as ValueSpace>::Elem>, EvalError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.eval(index)
    }
}

/// A method that fails on a chosen index, for error-path tests.
#[derive(Clone, Debug)]
pub struct FailingAt {
    pub poison: MultiIndex,
    dim: u32,
    space: RealLine,
}

impl FailingAt {
    pub fn new(poison: MultiIndex, dim: u32) -> Self {
        FailingAt { poison, dim, space: RealLine }
    }
}

impl Evaluator for FailingAt {
    type Space = RealLine;

    fn space(&self) -> &RealLine {
        &self.space
    }
    fn ambient(&self) -> Ambient {
        Ambient::Finite(self.dim)
    }
    fn eval(&self, index: &MultiIndex) -> Result<Evaluation<f64>, EvalError> {
        if *index == self.poison {
            return Err(EvalError::new(index, "synthetic failure"));
        }
        Ok(Evaluation { value: 1.0 / (1.0 + index.l1() as f64), work: 1.0 })
    }
}

/// Random downward closed set: grows from the origin by admissible forward
/// neighbors chosen with a seeded generator, keeping entries at most
/// `max_value` and stopping at `size` members.
pub fn random_downward_closed(seed: u64, d: u32, max_value: u32, size: usize) -> IndexSet {
    let mut rng = SplitMix64::new(seed);
    let mut members: BTreeSet<MultiIndex> = BTreeSet::new();
    members.insert(MultiIndex::origin());
    while members.len() < size {
        let candidates: Vec<MultiIndex> =
            admissible_forward_neighbors_of(&members, Ambient::Finite(d))
                .into_iter()
                .filter(|c| c.entries().iter().all(|&(_, v)| v <= max_value))
                .collect();
        if candidates.is_empty() {
            break;
        }
        let pick = (rng.next_u64() % candidates.len() as u64) as usize;
        members.insert(candidates[pick].clone());
    }
    IndexSet::from_members(members, Ambient::Finite(d)).expect("dimensions in range")
}
