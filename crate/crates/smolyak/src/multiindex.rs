//! Multi-indices and downward closed index sets.
//!
//! A [`MultiIndex`] is a vector of discretization parameters with finitely
//! many nonzero entries, stored sparsely so that fixed finite dimension and
//! unbounded dimension share one representation. An [`IndexSet`] is a finite
//! set of multi-indices ordered canonically (by total level, then
//! lexicographically) with downward-closure bookkeeping.

use serde_json::{json, Value};
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// Default cap on the number of dimensions explored when materializing
/// weighted level sets with unbounded ambient dimension.
pub const DEFAULT_DIMENSION_CAP: u32 = 64;

/// Ambient dimension of an index set: a fixed number of parameters, or
/// unboundedly many (indices with finite support).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ambient {
    Finite(u32),
    Unbounded,
}

impl Ambient {
    pub fn contains_dim(&self, dim: u32) -> bool {
        match self {
            Ambient::Finite(d) => dim < *d,
            Ambient::Unbounded => true,
        }
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ambient::Finite(d) => write!(f, "{d}"),
            Ambient::Unbounded => write!(f, "unbounded"),
        }
    }
}

#[derive(Debug, Error)]
pub enum IndexSetError {
    #[error("index uses dimension {dim}, outside ambient dimension {ambient}")]
    DimensionOutOfRange { dim: u32, ambient: u32 },
    #[error("set is not downward closed")]
    NotDownwardClosed,
    #[error("weight for dimension {dim} must be positive, got {weight}")]
    NonpositiveWeight { dim: u32, weight: f64 },
    #[error("weights did not exceed the level bound within {cap} dimensions; the level set may be infinite")]
    DimensionCapExceeded { cap: u32 },
    #[error("invalid index-set JSON: {0}")]
    Json(String),
}

/// A multi-index `i ∈ ℕ^d`: only nonzero entries are stored, as
/// `(dimension, value)` pairs with strictly increasing dimensions and
/// values ≥ 1. Dense access returns 0 for absent dimensions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    entries: Vec<(u32, u32)>,
}

impl MultiIndex {
    /// The zero index.
    pub fn origin() -> Self {
        MultiIndex { entries: Vec::new() }
    }

    /// The unit index `e_dim`.
    pub fn unit(dim: u32) -> Self {
        MultiIndex { entries: vec![(dim, 1)] }
    }

    /// Builds from a dense value vector; zeros are dropped.
    pub fn from_dense(values: &[u32]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0)
            .map(|(d, &v)| (d as u32, v))
            .collect();
        MultiIndex { entries }
    }

    /// Builds from `(dimension, value)` pairs in any order; zero values are
    /// dropped and duplicate dimensions are rejected.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Option<Self> {
        let mut entries: Vec<(u32, u32)> = pairs.into_iter().filter(|&(_, v)| v > 0).collect();
        entries.sort_unstable_by_key(|&(d, _)| d);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return None;
        }
        Some(MultiIndex { entries })
    }

    /// Value in dimension `dim` (0 when absent).
    pub fn get(&self, dim: u32) -> u32 {
        self.entries
            .binary_search_by_key(&dim, |&(d, _)| d)
            .map(|k| self.entries[k].1)
            .unwrap_or(0)
    }

    /// Nonzero entries as `(dimension, value)` pairs, dimensions ascending.
    pub fn entries(&self) -> &[(u32, u32)] {
        &self.entries
    }

    /// Dimensions with nonzero value.
    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.iter().map(|&(d, _)| d)
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// Largest dimension with a nonzero entry.
    pub fn max_dim(&self) -> Option<u32> {
        self.entries.last().map(|&(d, _)| d)
    }

    /// Total level `|i|₁`.
    pub fn l1(&self) -> u64 {
        self.entries.iter().map(|&(_, v)| u64::from(v)).sum()
    }

    pub fn is_origin(&self) -> bool {
        self.entries.is_empty()
    }

    /// Dense value vector of length `dim`.
    pub fn to_dense(&self, dim: u32) -> Vec<u32> {
        let mut out = vec![0; dim as usize];
        for &(d, v) in &self.entries {
            if (d as usize) < out.len() {
                out[d as usize] = v;
            }
        }
        out
    }

    /// `i + e_dim`.
    pub fn incremented(&self, dim: u32) -> Self {
        let mut entries = self.entries.clone();
        match entries.binary_search_by_key(&dim, |&(d, _)| d) {
            Ok(k) => entries[k].1 += 1,
            Err(k) => entries.insert(k, (dim, 1)),
        }
        MultiIndex { entries }
    }

    /// `i − e_dim`, or `None` if `i_dim = 0`.
    pub fn decremented(&self, dim: u32) -> Option<Self> {
        let k = self.entries.binary_search_by_key(&dim, |&(d, _)| d).ok()?;
        let mut entries = self.entries.clone();
        if entries[k].1 == 1 {
            entries.remove(k);
        } else {
            entries[k].1 -= 1;
        }
        Some(MultiIndex { entries })
    }

    /// All backward neighbors `{ i − e_j : i_j > 0 }`.
    pub fn backward_neighbors(&self) -> Vec<MultiIndex> {
        self.support()
            .collect::<Vec<_>>()
            .into_iter()
            .map(|d| self.decremented(d).expect("support dimension"))
            .collect()
    }

    /// Componentwise `self ≤ other`.
    pub fn le_componentwise(&self, other: &MultiIndex) -> bool {
        self.entries.iter().all(|&(d, v)| v <= other.get(d))
    }
}

/// Canonical total order: by total level `|i|₁`, then lexicographically on
/// the dense vector. Gives every reduction in the crate a deterministic
/// iteration order.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.l1().cmp(&other.l1()).then_with(|| {
            let mut a = self.entries.iter();
            let mut b = other.entries.iter();
            let (mut na, mut nb) = (a.next(), b.next());
            loop {
                match (na, nb) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (Some(&(da, va)), Some(&(db, vb))) => {
                        if da < db {
                            // self is nonzero in an earlier dimension
                            return Ordering::Greater;
                        }
                        if db < da {
                            return Ordering::Less;
                        }
                        match va.cmp(&vb) {
                            Ordering::Equal => {
                                na = a.next();
                                nb = b.next();
                            }
                            ord => return ord,
                        }
                    }
                }
            }
        })
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{{")?;
        for (k, (d, v)) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}:{v}")?;
        }
        write!(f, "}}")
    }
}

/// A finite set of multi-indices with cached downward-closure flag.
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct IndexSet {
    members: BTreeSet<MultiIndex>,
    ambient: Ambient,
    downward_closed: bool,
}

impl PartialEq for IndexSet {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.members == other.members
    }
}
impl Eq for IndexSet {}

impl IndexSet {
    pub fn empty(ambient: Ambient) -> Self {
        IndexSet { members: BTreeSet::new(), ambient, downward_closed: true }
    }

    /// Builds a set from arbitrary members, validating dimensions against
    /// the ambient and computing the downward-closure flag.
    pub fn from_members(
        members: impl IntoIterator<Item = MultiIndex>,
        ambient: Ambient,
    ) -> Result<Self, IndexSetError> {
        let members: BTreeSet<MultiIndex> = members.into_iter().collect();
        if let Ambient::Finite(d) = ambient {
            for m in &members {
                if let Some(dim) = m.max_dim() {
                    if dim >= d {
                        return Err(IndexSetError::DimensionOutOfRange { dim, ambient: d });
                    }
                }
            }
        }
        let downward_closed = is_downward_closed_members(&members);
        Ok(IndexSet { members, ambient, downward_closed })
    }

    /// `{ i : |i|₁ ≤ level }` in `d` dimensions.
    pub fn simplex(d: u32, level: u32) -> Self {
        let weights = vec![1.0; d as usize];
        Self::weighted_level_set(&weights, level as f64).expect("unit weights")
    }

    /// The full box `{0..b₁} × … × {0..b_d}`.
    pub fn full_box(bounds: &[u32]) -> Self {
        let mut members = Vec::new();
        let mut cur = vec![0u32; bounds.len()];
        loop {
            members.push(MultiIndex::from_dense(&cur));
            let mut k = 0;
            loop {
                if k == bounds.len() {
                    let set = IndexSet::from_members(members, Ambient::Finite(bounds.len() as u32))
                        .expect("box members in range");
                    debug_assert!(set.downward_closed);
                    return set;
                }
                if cur[k] < bounds[k] {
                    cur[k] += 1;
                    break;
                }
                cur[k] = 0;
                k += 1;
            }
        }
    }

    /// `{ i : Σ_j weights_j · i_j ≤ level }` for positive weights; the result
    /// is downward closed by construction.
    pub fn weighted_level_set(weights: &[f64], level: f64) -> Result<Self, IndexSetError> {
        for (j, &w) in weights.iter().enumerate() {
            if !(w > 0.0) {
                return Err(IndexSetError::NonpositiveWeight { dim: j as u32, weight: w });
            }
        }
        let slack = 1e-9 * level.abs().max(1.0);
        let mut members = Vec::new();
        let mut dense = vec![0u32; weights.len()];
        enumerate_weighted(weights, level + slack, 0, &mut dense, &mut members);
        let set = IndexSet::from_members(members, Ambient::Finite(weights.len() as u32))?;
        debug_assert!(set.downward_closed);
        Ok(set)
    }

    /// Weighted level set over unboundedly many dimensions. The weight
    /// generator must eventually exceed `level` (weights → ∞); dimensions are
    /// probed in order until that happens, capped at `dim_cap`.
    pub fn weighted_level_set_unbounded(
        weight: impl Fn(u32) -> f64,
        level: f64,
        dim_cap: u32,
    ) -> Result<Self, IndexSetError> {
        let slack = 1e-9 * level.abs().max(1.0);
        let mut weights = Vec::new();
        let mut bounded = false;
        for j in 0..dim_cap {
            let w = weight(j);
            if !(w > 0.0) {
                return Err(IndexSetError::NonpositiveWeight { dim: j, weight: w });
            }
            if w > level + slack {
                bounded = true;
                break;
            }
            weights.push(w);
        }
        if !bounded {
            return Err(IndexSetError::DimensionCapExceeded { cap: dim_cap });
        }
        let mut members = Vec::new();
        let mut dense = vec![0u32; weights.len()];
        enumerate_weighted(&weights, level + slack, 0, &mut dense, &mut members);
        let members: BTreeSet<MultiIndex> = members.into_iter().collect();
        let downward_closed = is_downward_closed_members(&members);
        debug_assert!(downward_closed);
        Ok(IndexSet { members, ambient: Ambient::Unbounded, downward_closed })
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, index: &MultiIndex) -> bool {
        self.members.contains(index)
    }

    /// Members in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = &MultiIndex> {
        self.members.iter()
    }

    pub fn members(&self) -> &BTreeSet<MultiIndex> {
        &self.members
    }

    /// True iff every member's every backward neighbor is a member
    /// (cached at construction).
    pub fn is_downward_closed(&self) -> bool {
        self.downward_closed
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.members.iter().all(|m| other.members.contains(m))
    }

    /// Number of leading dimensions the set actively spans (at least 1 for
    /// nonempty sets).
    pub fn active_span(&self) -> u32 {
        if self.members.is_empty() {
            return 0;
        }
        self.members
            .iter()
            .filter_map(MultiIndex::max_dim)
            .max()
            .map(|d| d + 1)
            .unwrap_or(0)
            .max(1)
    }

    /// All indices `j ∉ S` whose every backward neighbor lies in `S`; adding
    /// any of them preserves downward closure. For unbounded ambient
    /// dimension, dimensions up to the active span are candidates plus a
    /// single representative `e_k` in the first dimension beyond it (all
    /// fresh dimensions are interchangeable until a model distinguishes
    /// them).
    pub fn admissible_forward_neighbors(&self) -> Result<Vec<MultiIndex>, IndexSetError> {
        if !self.downward_closed {
            return Err(IndexSetError::NotDownwardClosed);
        }
        Ok(admissible_forward_neighbors_of(&self.members, self.ambient))
    }

    /// JSON form: `{"ambient": d | "unbounded", "members": [...]}` with dense
    /// integer arrays for finite ambient and sparse `{dim: value}` maps
    /// otherwise. Round-trips losslessly via [`IndexSet::from_json`].
    pub fn to_json(&self) -> Value {
        let members: Vec<Value> = match self.ambient {
            Ambient::Finite(d) => self
                .members
                .iter()
                .map(|m| Value::from(m.to_dense(d)))
                .collect(),
            Ambient::Unbounded => self
                .members
                .iter()
                .map(|m| {
                    let obj: serde_json::Map<String, Value> = m
                        .entries()
                        .iter()
                        .map(|&(d, v)| (d.to_string(), Value::from(v)))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        };
        json!({ "ambient": match self.ambient {
            Ambient::Finite(d) => Value::from(d),
            Ambient::Unbounded => Value::from("unbounded"),
        }, "members": members })
    }

    pub fn from_json(value: &Value) -> Result<Self, IndexSetError> {
        let bad = |msg: &str| IndexSetError::Json(msg.to_string());
        let ambient = match value.get("ambient") {
            Some(Value::Number(n)) => Ambient::Finite(
                n.as_u64().ok_or_else(|| bad("ambient must be a natural number"))? as u32,
            ),
            Some(Value::String(s)) if s == "unbounded" => Ambient::Unbounded,
            _ => return Err(bad("missing or invalid \"ambient\"")),
        };
        let members = value
            .get("members")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"members\" array"))?;
        let mut parsed = Vec::with_capacity(members.len());
        for m in members {
            match m {
                Value::Array(vals) => {
                    let mut dense = Vec::with_capacity(vals.len());
                    for v in vals {
                        dense.push(
                            v.as_u64().ok_or_else(|| bad("entries must be naturals"))? as u32
                        );
                    }
                    parsed.push(MultiIndex::from_dense(&dense));
                }
                Value::Object(map) => {
                    let mut pairs = Vec::with_capacity(map.len());
                    for (k, v) in map {
                        let dim: u32 =
                            k.parse().map_err(|_| bad("sparse keys must be dimensions"))?;
                        let val =
                            v.as_u64().ok_or_else(|| bad("entries must be naturals"))? as u32;
                        pairs.push((dim, val));
                    }
                    parsed.push(
                        MultiIndex::from_pairs(pairs)
                            .ok_or_else(|| bad("duplicate dimension in sparse index"))?,
                    );
                }
                _ => return Err(bad("members must be arrays or {dim: value} maps")),
            }
        }
        IndexSet::from_members(parsed, ambient)
    }
}

fn enumerate_weighted(
    weights: &[f64],
    remaining: f64,
    dim: usize,
    dense: &mut Vec<u32>,
    out: &mut Vec<MultiIndex>,
) {
    if dim == weights.len() {
        out.push(MultiIndex::from_dense(dense));
        return;
    }
    let mut v = 0u32;
    loop {
        let cost = weights[dim] * f64::from(v);
        if cost > remaining {
            break;
        }
        dense[dim] = v;
        enumerate_weighted(weights, remaining - cost, dim + 1, dense, out);
        v += 1;
    }
    dense[dim] = 0;
}

pub(crate) fn is_downward_closed_members(members: &BTreeSet<MultiIndex>) -> bool {
    members
        .iter()
        .all(|m| m.backward_neighbors().iter().all(|b| members.contains(b)))
}

/// Forward-neighbor computation shared between [`IndexSet`] and the adaptive
/// builder, which grows a raw member set. Assumes `members` is downward
/// closed.
pub(crate) fn admissible_forward_neighbors_of(
    members: &BTreeSet<MultiIndex>,
    ambient: Ambient,
) -> Vec<MultiIndex> {
    if members.is_empty() {
        return vec![MultiIndex::origin()];
    }
    let candidate_dims: Vec<u32> = match ambient {
        Ambient::Finite(d) => (0..d).collect(),
        Ambient::Unbounded => {
            let span = members
                .iter()
                .filter_map(MultiIndex::max_dim)
                .max()
                .map(|d| d + 1)
                .unwrap_or(0)
                .max(1);
            (0..=span).collect()
        }
    };
    let mut out = BTreeSet::new();
    for member in members {
        for &dim in &candidate_dims {
            let candidate = member.incremented(dim);
            if !members.contains(&candidate)
                && candidate
                    .backward_neighbors()
                    .iter()
                    .all(|b| members.contains(b))
            {
                out.insert(candidate);
            }
        }
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(values: &[u32]) -> MultiIndex {
        MultiIndex::from_dense(values)
    }

    fn set(members: &[&[u32]], d: u32) -> IndexSet {
        IndexSet::from_members(members.iter().map(|m| mi(m)), Ambient::Finite(d)).unwrap()
    }

    #[test]
    fn sparse_storage_drops_zeros() {
        let i = mi(&[0, 3, 0]);
        assert_eq!(i.entries(), &[(1, 3)]);
        assert_eq!(i.get(0), 0);
        assert_eq!(i.get(1), 3);
        assert_eq!(i.get(7), 0);
        assert_eq!(i.l1(), 3);
        assert_eq!(i.to_dense(3), vec![0, 3, 0]);
    }

    #[test]
    fn canonical_order_is_level_then_lex() {
        let mut v = vec![mi(&[1, 0]), mi(&[0, 0]), mi(&[0, 2]), mi(&[0, 1]), mi(&[1, 1])];
        v.sort();
        assert_eq!(v, vec![mi(&[0, 0]), mi(&[0, 1]), mi(&[1, 0]), mi(&[0, 2]), mi(&[1, 1])]);
    }

    #[test]
    fn backward_neighbors_examples() {
        assert!(mi(&[0, 0]).backward_neighbors().is_empty());
        let n = mi(&[2, 1]).backward_neighbors();
        assert_eq!(n.len(), 2);
        assert!(n.contains(&mi(&[1, 1])));
        assert!(n.contains(&mi(&[2, 0])));
        assert_eq!(mi(&[0, 3, 0]).backward_neighbors(), vec![mi(&[0, 2, 0])]);
    }

    #[test]
    fn downward_closure_examples() {
        assert!(set(&[&[0, 0]], 2).is_downward_closed());
        assert!(set(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]], 2).is_downward_closed());
        assert!(!set(&[&[0, 0], &[1, 1]], 2).is_downward_closed());
    }

    #[test]
    fn forward_neighbors_examples() {
        let n = set(&[&[0, 0]], 2).admissible_forward_neighbors().unwrap();
        assert_eq!(n, vec![mi(&[0, 1]), mi(&[1, 0])]);

        let n = set(&[&[0, 0], &[1, 0], &[0, 1]], 2)
            .admissible_forward_neighbors()
            .unwrap();
        assert_eq!(n, vec![mi(&[0, 2]), mi(&[1, 1]), mi(&[2, 0])]);
    }

    #[test]
    fn forward_neighbors_rejects_open_set() {
        let s = set(&[&[0, 0], &[1, 1]], 2);
        assert!(matches!(
            s.admissible_forward_neighbors(),
            Err(IndexSetError::NotDownwardClosed)
        ));
    }

    #[test]
    fn unbounded_frontier_has_one_fresh_representative() {
        let s = IndexSet::from_members([MultiIndex::origin()], Ambient::Unbounded).unwrap();
        let n = s.admissible_forward_neighbors().unwrap();
        // One step in the first active dimension plus a single fresh-dimension
        // candidate.
        assert_eq!(n.len(), 2);
        assert!(n.contains(&MultiIndex::unit(0)));
        assert!(n.contains(&MultiIndex::unit(1)));

        let s = IndexSet::from_members(
            [MultiIndex::origin(), MultiIndex::unit(0)],
            Ambient::Unbounded,
        )
        .unwrap();
        let n = s.admissible_forward_neighbors().unwrap();
        assert_eq!(n, vec![MultiIndex::unit(1), mi(&[2])]);
    }

    #[test]
    fn weighted_level_set_examples() {
        let s = IndexSet::weighted_level_set(&[1.0, 1.0], 2.0).unwrap();
        let expect = set(&[&[0, 0], &[1, 0], &[0, 1], &[2, 0], &[1, 1], &[0, 2]], 2);
        assert_eq!(s, expect);
        assert!(s.is_downward_closed());

        let s = IndexSet::weighted_level_set(&[1.0, 2.0], 2.0).unwrap();
        let expect = set(&[&[0, 0], &[1, 0], &[2, 0], &[0, 1]], 2);
        assert_eq!(s, expect);
    }

    #[test]
    fn weighted_level_set_rejects_bad_weights() {
        assert!(matches!(
            IndexSet::weighted_level_set(&[1.0, 0.0], 2.0),
            Err(IndexSetError::NonpositiveWeight { dim: 1, .. })
        ));
    }

    #[test]
    fn unbounded_level_set_uses_finitely_many_dims() {
        // weights 1, 2, 3, ... so only the first two dimensions are active at
        // level 2
        let s = IndexSet::weighted_level_set_unbounded(|j| (j + 1) as f64, 2.0, 64).unwrap();
        let members: Vec<_> = s.iter().cloned().collect();
        assert_eq!(
            members,
            vec![MultiIndex::origin(), MultiIndex::unit(1), MultiIndex::unit(0), mi(&[2])]
        );
        assert!(s.is_downward_closed());
    }

    #[test]
    fn unbounded_level_set_flags_possible_infinity() {
        assert!(matches!(
            IndexSet::weighted_level_set_unbounded(|_| 0.5, 2.0, 16),
            Err(IndexSetError::DimensionCapExceeded { cap: 16 })
        ));
    }

    #[test]
    fn simplex_matches_weighted_level_set() {
        let s = IndexSet::simplex(3, 2);
        assert_eq!(s.len(), 10);
        assert!(s.is_downward_closed());
    }

    #[test]
    fn level_sets_are_downward_closed_randomized() {
        let mut rng = crate::stream::SplitMix64::new(0x1d5e);
        for _ in 0..100 {
            let d = 1 + (rng.next_u64() % 4) as usize;
            let weights: Vec<f64> = (0..d).map(|_| 0.25 + rng.next_f64() * 2.0).collect();
            let level = rng.next_f64() * 6.0;
            let s = IndexSet::weighted_level_set(&weights, level).unwrap();
            assert!(s.is_downward_closed());
        }
    }

    #[test]
    fn forward_neighbors_preserve_closure_randomized() {
        let mut rng = crate::stream::SplitMix64::new(0xfeed);
        for _ in 0..100 {
            let d = 1 + (rng.next_u64() % 4) as u32;
            let size = 1 + (rng.next_u64() % 24) as usize;
            let s = crate::synthetic::random_downward_closed(rng.next_u64(), d, 5, size);
            assert!(s.is_downward_closed());
            for j in s.admissible_forward_neighbors().unwrap() {
                // neighbor consistency: all backward neighbors inside
                assert!(j.backward_neighbors().iter().all(|b| s.contains(b)));
                let mut grown: Vec<_> = s.iter().cloned().collect();
                grown.push(j.clone());
                let grown = IndexSet::from_members(grown, s.ambient()).unwrap();
                assert!(grown.is_downward_closed());
            }
        }
    }

    #[test]
    fn json_round_trip_dense_and_sparse() {
        let s = IndexSet::weighted_level_set(&[1.0, 2.0], 3.0).unwrap();
        let back = IndexSet::from_json(&s.to_json()).unwrap();
        assert_eq!(s, back);

        let s = IndexSet::weighted_level_set_unbounded(|j| (j + 1) as f64, 3.0, 64).unwrap();
        let v = s.to_json();
        let back = IndexSet::from_json(&v).unwrap();
        assert_eq!(s, back);

        let empty = IndexSet::empty(Ambient::Finite(3));
        assert_eq!(IndexSet::from_json(&empty.to_json()).unwrap(), empty);
    }
}
