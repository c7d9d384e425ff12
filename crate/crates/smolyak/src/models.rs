//! Exponential-with-polynomial decay and work models, the convergence-rate
//! quantities they induce, and numerical verification of the underlying
//! exponential-sum bounds.
//!
//! For `g_j(i) = K₁ⱼ e^{−c_j i}(i+1)^{γc_j}` and
//! `w_j(i) = K₂ⱼ e^{ω_j i}(i+1)^{γw_j}`, the level sets
//! `I_L = { i : (c+ω)·i ≤ L }` yield work growing like
//! `e^{μL}(L+1)^{d*−1+γw*}` and error shrinking like
//! `e^{−νL}(L+1)^{d*−1+γc*}`, where `ρ = max_j ω_j/c_j`, `μ = ρ/(1+ρ)`,
//! `ν = 1/(1+ρ)` and `d*`, `γ*` collect the ratio-critical dimensions. The
//! bound constants are not reproducible, so verification is by ratio
//! boundedness: enumerated sums divided by the bound shapes must flatten as
//! `L` grows.

use crate::multiindex::{IndexSet, IndexSetError, MultiIndex};
use crate::truncation::{ProfileFn, ProfitModel, TruncationError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dimension {dim}: exponent must be strictly positive, got {value}")]
    NonpositiveExponent { dim: u32, value: f64 },
    #[error("dimension {dim}: polynomial degree must be nonnegative, got {value}")]
    NegativePolyDegree { dim: u32, value: f64 },
    #[error("dimension {dim}: constant must be strictly positive, got {value}")]
    NonpositiveConstant { dim: u32, value: f64 },
    #[error("accuracy must lie in (0, 1), got {0}")]
    AccuracyOutOfRange(f64),
    #[error("log-log fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("log-log fit requires positive entries, got ({work}, {error})")]
    NonpositivePoint { work: f64, error: f64 },
    #[error(transparent)]
    IndexSet(#[from] IndexSetError),
}

/// One dimension of an exponential-with-polynomial model.
#[derive(Clone, Copy, Debug)]
pub struct ExpPolyDim {
    pub k1: f64,
    /// decay exponent `c_j`
    pub decay_rate: f64,
    /// decay polynomial degree `γc_j`
    pub decay_poly: f64,
    pub k2: f64,
    /// work exponent `ω_j`
    pub work_rate: f64,
    /// work polynomial degree `γw_j`
    pub work_poly: f64,
}

impl ExpPolyDim {
    pub fn plain(decay_rate: f64, work_rate: f64) -> Self {
        ExpPolyDim { k1: 1.0, decay_rate, decay_poly: 0.0, k2: 1.0, work_rate, work_poly: 0.0 }
    }
}

/// Derived rate quantities of a model.
#[derive(Clone, Debug, PartialEq)]
pub struct RateSummary {
    /// worst work-to-decay exponent ratio `max_j ω_j/c_j`
    pub rho: f64,
    /// work exponent per unit level, `ρ/(1+ρ)`
    pub mu: f64,
    /// error exponent per unit level, `1/(1+ρ)`
    pub nu: f64,
    /// dimensions attaining the worst ratio
    pub critical_dims: Vec<u32>,
    /// `d* = |J|`
    pub d_star: u32,
    /// `γc* = Σ_{j∈J} γc_j`
    pub decay_poly_star: f64,
    /// `γw* = Σ_{j∈J} γw_j`
    pub work_poly_star: f64,
}

/// Model with per-dimension decay `K₁ⱼ e^{−c_j i}(i+1)^{γc_j}` and work
/// `K₂ⱼ e^{ω_j i}(i+1)^{γw_j}`.
#[derive(Clone, Debug)]
pub struct ExpPolyModel {
    dims: Vec<ExpPolyDim>,
}

impl ExpPolyModel {
    pub fn new(dims: Vec<ExpPolyDim>) -> Result<Self, ModelError> {
        assert!(!dims.is_empty(), "model needs at least one dimension");
        for (j, dim) in dims.iter().enumerate() {
            let j = j as u32;
            if !(dim.decay_rate > 0.0) {
                return Err(ModelError::NonpositiveExponent { dim: j, value: dim.decay_rate });
            }
            if !(dim.work_rate > 0.0) {
                return Err(ModelError::NonpositiveExponent { dim: j, value: dim.work_rate });
            }
            if dim.decay_poly < 0.0 {
                return Err(ModelError::NegativePolyDegree { dim: j, value: dim.decay_poly });
            }
            if dim.work_poly < 0.0 {
                return Err(ModelError::NegativePolyDegree { dim: j, value: dim.work_poly });
            }
            if !(dim.k1 > 0.0) {
                return Err(ModelError::NonpositiveConstant { dim: j, value: dim.k1 });
            }
            if !(dim.k2 > 0.0) {
                return Err(ModelError::NonpositiveConstant { dim: j, value: dim.k2 });
            }
        }
        Ok(ExpPolyModel { dims })
    }

    /// All dimensions share the same decay and work exponents, γ ≡ 0, K ≡ 1.
    pub fn symmetric(d: u32, decay_rate: f64, work_rate: f64) -> Result<Self, ModelError> {
        ExpPolyModel::new(vec![ExpPolyDim::plain(decay_rate, work_rate); d as usize])
    }

    pub fn dims(&self) -> &[ExpPolyDim] {
        &self.dims
    }

    pub fn dim_count(&self) -> u32 {
        self.dims.len() as u32
    }

    /// `Π_j K₁ⱼ`.
    pub fn k1(&self) -> f64 {
        self.dims.iter().map(|d| d.k1).product()
    }

    /// `Π_j K₂ⱼ`.
    pub fn k2(&self) -> f64 {
        self.dims.iter().map(|d| d.k2).product()
    }

    /// `g_j(i)`.
    pub fn decay(&self, dim: u32, level: u32) -> f64 {
        let d = &self.dims[dim as usize];
        d.k1 * (-d.decay_rate * f64::from(level)).exp()
            * f64::from(level + 1).powf(d.decay_poly)
    }

    /// `w_j(i)`.
    pub fn work(&self, dim: u32, level: u32) -> f64 {
        let d = &self.dims[dim as usize];
        d.k2 * (d.work_rate * f64::from(level)).exp() * f64::from(level + 1).powf(d.work_poly)
    }

    /// The profit model with these profiles; fails when a polynomial factor
    /// overwhelms its exponent and breaks monotonicity.
    pub fn to_profit_model(&self) -> Result<ProfitModel, TruncationError> {
        ProfitModel::new(
            self.dims
                .iter()
                .map(|d| ProfileFn::ExpPoly { scale: d.k1, rate: -d.decay_rate, poly: d.decay_poly })
                .collect(),
            self.dims
                .iter()
                .map(|d| ProfileFn::ExpPoly { scale: d.k2, rate: d.work_rate, poly: d.work_poly })
                .collect(),
            1.0,
            1.0,
        )
    }

    /// ρ, μ, ν and the critical-dimension aggregates. Membership in the
    /// argmax set uses relative tolerance 1e−12.
    pub fn rate_summary(&self) -> RateSummary {
        let ratios: Vec<f64> =
            self.dims.iter().map(|d| d.work_rate / d.decay_rate).collect();
        let rho = ratios.iter().copied().fold(f64::MIN, f64::max);
        let critical_dims: Vec<u32> = ratios
            .iter()
            .enumerate()
            .filter(|(_, &r)| r >= rho * (1.0 - 1e-12))
            .map(|(j, _)| j as u32)
            .collect();
        let decay_poly_star =
            critical_dims.iter().map(|&j| self.dims[j as usize].decay_poly).sum();
        let work_poly_star =
            critical_dims.iter().map(|&j| self.dims[j as usize].work_poly).sum();
        RateSummary {
            rho,
            mu: rho / (1.0 + rho),
            nu: 1.0 / (1.0 + rho),
            d_star: critical_dims.len() as u32,
            critical_dims,
            decay_poly_star,
            work_poly_star,
        }
    }

    /// The simplified quasi-optimal truncation `I_L = { i : (c+ω)·i ≤ L }`.
    pub fn level_set(&self, level: f64) -> Result<IndexSet, IndexSetError> {
        let weights: Vec<f64> =
            self.dims.iter().map(|d| d.decay_rate + d.work_rate).collect();
        IndexSet::weighted_level_set(&weights, level)
    }

    /// Shape predictions `(work, error)` for the level-`L` truncation:
    /// `K₂ e^{μL}(L+1)^{d*−1+γw*}` and `K₁ e^{−νL}(L+1)^{d*−1+γc*}`, with the
    /// unknowable bound constants normalized to 1.
    pub fn predicted_bounds(&self, level: f64) -> (f64, f64) {
        let r = self.rate_summary();
        let poly = f64::from(r.d_star) - 1.0;
        let work = self.k2()
            * (r.mu * level).exp()
            * (level + 1.0).powf(poly + r.work_poly_star);
        let error = self.k1()
            * (-r.nu * level).exp()
            * (level + 1.0).powf(poly + r.decay_poly_star);
        (work, error)
    }

    /// Work needed for accuracy ε (shape prediction, constants normalized):
    /// `K₁^ρ K₂ ε^{−ρ} |log ε|^{(d*−1)(1+ρ) + ρ γc* + γw*}`.
    pub fn work_for_accuracy(&self, epsilon: f64) -> Result<f64, ModelError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(ModelError::AccuracyOutOfRange(epsilon));
        }
        let r = self.rate_summary();
        let log_power =
            (f64::from(r.d_star) - 1.0) * (1.0 + r.rho) + r.rho * r.decay_poly_star + r.work_poly_star;
        Ok(self.k1().powf(r.rho)
            * self.k2()
            * epsilon.powf(-r.rho)
            * epsilon.ln().abs().powf(log_power))
    }

    /// Exact work sum `Σ_{(c+ω)·i ≤ L} Π_j e^{ω_j i_j}(i_j+1)^{γw_j}` by
    /// enumeration over the level set.
    pub fn work_sum(&self, level: f64) -> Result<f64, ModelError> {
        let set = self.level_set(level)?;
        let mut total = 0.0;
        for index in set.iter() {
            total += self.work_summand(index);
        }
        Ok(total)
    }

    fn work_summand(&self, index: &MultiIndex) -> f64 {
        let mut product = 1.0;
        for (j, d) in self.dims.iter().enumerate() {
            let i = f64::from(index.get(j as u32));
            product *= (d.work_rate * i).exp() * (i + 1.0).powf(d.work_poly);
        }
        product
    }

    fn decay_summand(&self, index: &MultiIndex) -> f64 {
        let mut product = 1.0;
        for (j, d) in self.dims.iter().enumerate() {
            let i = f64::from(index.get(j as u32));
            product *= (-d.decay_rate * i).exp() * (i + 1.0).powf(d.decay_poly);
        }
        product
    }

    /// Residual sum `Σ_{(c+ω)·i > L} Π_j e^{−c_j i_j}(i_j+1)^{γc_j}`,
    /// computed as the factorized full-space sum minus the enumerated level
    /// set. Accurate to additive `tol`.
    pub fn residual_sum(&self, level: f64, tol: f64) -> Result<f64, ModelError> {
        assert!(tol > 0.0, "tolerance must be positive");
        let d = self.dims.len() as f64;
        // first pass to size the factors, second pass with shares small
        // enough that the product error stays below tol
        let rough: Vec<f64> = self
            .dims
            .iter()
            .map(|dim| univariate_series(dim.decay_rate, dim.decay_poly, 1e-3))
            .collect();
        let mut full = 1.0;
        for (j, dim) in self.dims.iter().enumerate() {
            let others: f64 = rough
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &t)| t.max(1.0) * 1.01)
                .product();
            full *= univariate_series(dim.decay_rate, dim.decay_poly, tol / (d * others));
        }
        let set = self.level_set(level)?;
        let mut covered = 0.0;
        for index in set.iter() {
            covered += self.decay_summand(index);
        }
        Ok(full - covered)
    }

    /// Ratio scan against the bound shapes: for each `L`,
    /// `work_sum / (e^{μL}(L+1)^{d*−1+γw*})` and
    /// `residual_sum / (e^{−νL}(L+1)^{d*−1+γc*})`. Bounded ratios that
    /// flatten as `L` grows verify the exponents μ, ν and the polynomial
    /// orders — the reproducible content of the bounds.
    pub fn ratio_scan(&self, levels: &[f64]) -> Result<Vec<ScanRow>, ModelError> {
        let r = self.rate_summary();
        let poly = f64::from(r.d_star) - 1.0;
        let mut rows = Vec::with_capacity(levels.len());
        for &level in levels {
            let work_bound = (r.mu * level).exp() * (level + 1.0).powf(poly + r.work_poly_star);
            let residual_bound =
                (-r.nu * level).exp() * (level + 1.0).powf(poly + r.decay_poly_star);
            let work_sum = self.work_sum(level)?;
            let residual_sum = self.residual_sum(level, residual_bound * 1e-6)?;
            rows.push(ScanRow {
                level,
                work_sum,
                work_bound,
                work_ratio: work_sum / work_bound,
                residual_sum,
                residual_bound,
                residual_ratio: residual_sum / residual_bound,
            });
        }
        Ok(rows)
    }
}

/// One row of [`ExpPolyModel::ratio_scan`].
#[derive(Clone, Copy, Debug)]
pub struct ScanRow {
    pub level: f64,
    pub work_sum: f64,
    pub work_bound: f64,
    pub work_ratio: f64,
    pub residual_sum: f64,
    pub residual_bound: f64,
    pub residual_ratio: f64,
}

/// `Σ_{i≥0} e^{−c i}(i+1)^γ` to additive `tol`, using the geometric tail
/// bound with the polynomial growth folded into the ratio.
fn univariate_series(c: f64, gamma: f64, tol: f64) -> f64 {
    let mut total = 0.0;
    let mut i: u64 = 0;
    loop {
        let x = i as f64;
        total += (-c * x).exp() * (x + 1.0).powf(gamma);
        // ratio of consecutive terms beyond i is at most q; once q < 1 the
        // tail is geometric
        let next = (-c * (x + 1.0)).exp() * (x + 2.0).powf(gamma);
        let q = (-c).exp() * ((x + 3.0) / (x + 2.0)).powf(gamma);
        if q < 1.0 && next / (1.0 - q) < tol {
            return total;
        }
        i += 1;
        assert!(i < 1_000_000, "series did not converge within 1e6 terms");
    }
}

/// Hyperbolic cross `{ i ∈ ℕ₊^d : Π_j i_j^{γc_j+γw_j} ≤ e^L }` over 1-based
/// parameters — the preimage of a weighted level set under the exponential
/// reparametrization of algebraic decay/work rates.
pub fn hyperbolic_cross_set(
    decay_poly: &[f64],
    work_poly: &[f64],
    budget_exponent: f64,
) -> Result<IndexSet, ModelError> {
    assert_eq!(decay_poly.len(), work_poly.len());
    let gamma: Vec<f64> = decay_poly.iter().zip(work_poly).map(|(a, b)| a + b).collect();
    for (j, &g) in gamma.iter().enumerate() {
        if !(g > 0.0) {
            return Err(ModelError::NonpositiveExponent { dim: j as u32, value: g });
        }
    }
    let slack = 1e-9 * budget_exponent.abs().max(1.0);
    let mut members = Vec::new();
    let mut dense = vec![1u32; gamma.len()];
    enumerate_cross(&gamma, budget_exponent + slack, 0, &mut dense, &mut members);
    Ok(IndexSet::from_members(
        members,
        crate::multiindex::Ambient::Finite(gamma.len() as u32),
    )?)
}

fn enumerate_cross(
    gamma: &[f64],
    remaining: f64,
    dim: usize,
    dense: &mut Vec<u32>,
    out: &mut Vec<MultiIndex>,
) {
    if dim == gamma.len() {
        out.push(MultiIndex::from_dense(dense));
        return;
    }
    let mut v = 1u32;
    loop {
        let cost = gamma[dim] * f64::from(v).ln();
        if cost > remaining {
            break;
        }
        dense[dim] = v;
        enumerate_cross(gamma, remaining - cost, dim + 1, dense, out);
        v += 1;
    }
    dense[dim] = 1;
}

/// Least-squares slope of `log(error)` against `log(work)`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<f64, ModelError> {
    if points.len() < 3 {
        return Err(ModelError::TooFewPoints(points.len()));
    }
    for &(work, error) in points {
        if !(work > 0.0 && error > 0.0) {
            return Err(ModelError::NonpositivePoint { work, error });
        }
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let mut covariance = 0.0;
    let mut variance = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        covariance += (x - x_mean) * (y - y_mean);
        variance += (x - x_mean) * (x - x_mean);
    }
    Ok(covariance / variance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    fn mi(values: &[u32]) -> MultiIndex {
        MultiIndex::from_dense(values)
    }

    #[test]
    fn rate_summary_examples() {
        // the Monte Carlo parametrization: c = 1/3, ω = 2/3 in both
        // parameters
        let m = ExpPolyModel::symmetric(2, 1.0 / 3.0, 2.0 / 3.0).unwrap();
        let r = m.rate_summary();
        assert_relative_eq!(r.rho, 2.0, max_relative = 1e-12);
        assert_relative_eq!(r.mu, 2.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(r.nu, 1.0 / 3.0, max_relative = 1e-12);
        assert_eq!(r.d_star, 2);

        let m = ExpPolyModel::new(vec![ExpPolyDim::plain(1.0, 1.0), ExpPolyDim::plain(2.0, 1.0)])
            .unwrap();
        let r = m.rate_summary();
        assert_relative_eq!(r.rho, 1.0);
        assert_eq!(r.critical_dims, vec![0]);
        assert_eq!(r.d_star, 1);
        assert_relative_eq!(r.mu, 0.5);
        assert_relative_eq!(r.nu, 0.5);

        let m = ExpPolyModel::symmetric(3, 1.4, 1.4).unwrap();
        let r = m.rate_summary();
        assert_relative_eq!(r.rho, 1.0);
        assert_eq!(r.d_star, 3);
        assert_relative_eq!(r.mu + r.nu, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn mu_plus_nu_is_one_randomized() {
        let mut rng = crate::stream::SplitMix64::new(0x11);
        for _ in 0..50 {
            let d = 1 + (rng.next_u64() % 4) as usize;
            let dims: Vec<ExpPolyDim> = (0..d)
                .map(|_| ExpPolyDim::plain(0.2 + rng.next_f64() * 2.0, 0.2 + rng.next_f64() * 2.0))
                .collect();
            let r = ExpPolyModel::new(dims).unwrap().rate_summary();
            assert_relative_eq!(r.mu + r.nu, 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn level_set_for_model_examples() {
        // weights c + ω = 1 per dimension: the standard simplex
        let m = ExpPolyModel::symmetric(2, 1.0 / 3.0, 2.0 / 3.0).unwrap();
        assert_eq!(m.level_set(2.0).unwrap(), IndexSet::simplex(2, 2));
        let m = ExpPolyModel::symmetric(2, 0.5, 0.5).unwrap();
        assert_eq!(m.level_set(2.0).unwrap(), IndexSet::simplex(2, 2));
        assert_eq!(m.level_set(0.0).unwrap().len(), 1);
    }

    #[test]
    fn level_set_cardinality_monotone_in_level() {
        let m = ExpPolyModel::symmetric(3, 0.7, 1.1).unwrap();
        let mut previous = 0usize;
        for l in [0.0, 1.0, 2.5, 4.0, 8.0] {
            let n = m.level_set(l).unwrap().len();
            assert!(n >= previous);
            previous = n;
        }
    }

    #[test]
    fn predicted_bounds_examples() {
        // L = 0 collapses both bounds onto the constants
        let m = ExpPolyModel::new(vec![ExpPolyDim {
            k1: 3.0,
            decay_rate: 1.0,
            decay_poly: 0.0,
            k2: 2.0,
            work_rate: 1.0,
            work_poly: 0.0,
        }])
        .unwrap();
        let (w, e) = m.predicted_bounds(0.0);
        assert_relative_eq!(w, 2.0);
        assert_relative_eq!(e, 3.0);

        // c = ω = (1,1): μ = ν = 1/2, d* = 2
        let m = ExpPolyModel::symmetric(2, 1.0, 1.0).unwrap();
        let (w, e) = m.predicted_bounds(10.0);
        assert_relative_eq!(w, E.powi(5) * 11.0, max_relative = 1e-12);
        assert_relative_eq!(e, E.powi(-5) * 11.0, max_relative = 1e-12);

        // doubling L scales the work bound by ~e^{μΔL} modulo the
        // polynomial factor
        let m = ExpPolyModel::symmetric(1, 1.0, 2.0).unwrap();
        let (w1, _) = m.predicted_bounds(10.0);
        let (w2, _) = m.predicted_bounds(20.0);
        let r = m.rate_summary();
        assert_relative_eq!(w2 / w1, (r.mu * 10.0).exp(), max_relative = 1e-12);
    }

    #[test]
    fn work_for_accuracy_examples() {
        // ρ = 2, d* = 2, γ ≡ 0, ε = e^{−1}: K₁²K₂ e² |log ε|³ with |log ε|=1
        let m = ExpPolyModel::symmetric(2, 1.0 / 3.0, 2.0 / 3.0).unwrap();
        let w = m.work_for_accuracy(E.powi(-1)).unwrap();
        assert_relative_eq!(w, E.powi(2), max_relative = 1e-12);

        // single critical dimension, γ ≡ 0: pure power law, no log factor
        let m = ExpPolyModel::new(vec![ExpPolyDim::plain(1.0, 1.0), ExpPolyDim::plain(2.0, 1.0)])
            .unwrap();
        let a = m.work_for_accuracy(0.1).unwrap();
        assert_relative_eq!(a, 0.1f64.powf(-1.0), max_relative = 1e-12);
        // shrinking ε by e grows work by e when ρ = 1
        let b = m.work_for_accuracy(0.1 / E).unwrap();
        assert_relative_eq!(b / a, E, max_relative = 1e-12);

        assert!(matches!(m.work_for_accuracy(1.0), Err(ModelError::AccuracyOutOfRange(_))));
    }

    #[test]
    fn work_sum_examples() {
        // c = ω = (1,1), γ ≡ 0, L = 5: levels |i|₁ ≤ 2 with multiplicity
        // k+1 at level k
        let m = ExpPolyModel::symmetric(2, 1.0, 1.0).unwrap();
        let expected = 1.0 + 2.0 * E + 3.0 * E * E;
        assert_relative_eq!(m.work_sum(5.0).unwrap(), expected, max_relative = 1e-12);
        assert_relative_eq!(m.work_sum(0.0).unwrap(), 1.0);

        let m = ExpPolyModel::symmetric(1, 1.0, 1.0).unwrap();
        assert_relative_eq!(m.work_sum(4.0).unwrap(), 1.0 + E + E * E, max_relative = 1e-12);
    }

    #[test]
    fn residual_sum_examples() {
        // d = 1, c = 1, L = 0: the geometric tail Σ_{i≥1} e^{−i} = 1/(e−1)
        let m = ExpPolyModel::symmetric(1, 1.0, 1.0).unwrap();
        let r = m.residual_sum(0.0, 1e-12).unwrap();
        assert_relative_eq!(r, 1.0 / (E - 1.0), epsilon = 1e-10);

        // residual vanishes as L → ∞
        assert!(m.residual_sum(60.0, 1e-12).unwrap() < 1e-11);

        // d = 2 factorized total minus the enumerated simplex
        let m = ExpPolyModel::symmetric(2, 1.0, 1.0).unwrap();
        let total = (1.0 / (1.0 - E.powi(-1))).powi(2);
        let covered = 1.0 + 2.0 * E.powi(-1) + 3.0 * E.powi(-2);
        assert_relative_eq!(m.residual_sum(4.0, 1e-12).unwrap(), total - covered, epsilon = 1e-9);
    }

    #[test]
    fn residual_sum_monotone_and_consistent_at_zero() {
        let m = ExpPolyModel::symmetric(2, 1.0, 1.5).unwrap();
        let mut previous = f64::INFINITY;
        for l in [0.0, 2.0, 4.0, 8.0, 16.0] {
            let r = m.residual_sum(l, 1e-10).unwrap();
            assert!(r <= previous + 1e-10, "residual must not grow with L");
            previous = r;
        }
        // total = residual(0) + covered(0)
        let total = (0..200)
            .map(|i| (-(i as f64)).exp())
            .sum::<f64>()
            .powi(2);
        let at_zero = m.residual_sum(0.0, 1e-10).unwrap();
        assert_relative_eq!(at_zero + 1.0, total, epsilon = 1e-8);
    }

    #[test]
    fn ratio_scan_flattens_for_reference_models() {
        let levels = [5.0, 10.0, 20.0, 40.0];
        let symmetric = ExpPolyModel::symmetric(2, 1.0, 1.0).unwrap();
        // polynomial decay factor on the single critical dimension
        let poly = ExpPolyModel::new(vec![
            ExpPolyDim { k1: 1.0, decay_rate: 1.0, decay_poly: 1.0, k2: 1.0, work_rate: 1.0, work_poly: 0.0 },
            ExpPolyDim::plain(1.0, 0.5),
        ])
        .unwrap();
        let distinct = ExpPolyModel::new(vec![
            ExpPolyDim::plain(1.0, 1.0),
            ExpPolyDim::plain(1.0, 0.5),
            ExpPolyDim::plain(1.0, 0.25),
        ])
        .unwrap();
        for (name, model) in [("symmetric", symmetric), ("poly", poly), ("distinct", distinct)] {
            let rows = model.ratio_scan(&levels).unwrap();
            for row in &rows {
                assert!(row.work_ratio.is_finite() && row.work_ratio > 0.0, "{name}");
                assert!(row.residual_ratio.is_finite() && row.residual_ratio > 0.0, "{name}");
            }
            let last = rows[rows.len() - 1];
            let prev = rows[rows.len() - 2];
            let work_change = (last.work_ratio - prev.work_ratio).abs() / prev.work_ratio;
            let residual_change =
                (last.residual_ratio - prev.residual_ratio).abs() / prev.residual_ratio;
            assert!(work_change < 0.10, "{name}: work ratio still moving by {work_change}");
            assert!(residual_change < 0.10, "{name}: residual ratio moving by {residual_change}");
        }
    }

    #[test]
    fn univariate_scan_matches_closed_form() {
        // d = 1, c = ω = 1: work_sum(L) = Σ_{i ≤ L/2} e^i exactly
        let m = ExpPolyModel::symmetric(1, 1.0, 1.0).unwrap();
        for l in [6.0f64, 10.0] {
            let n = (l / 2.0).floor() as i32;
            let closed: f64 = (0..=n).map(|i| E.powi(i)).sum();
            assert_relative_eq!(m.work_sum(l).unwrap(), closed, max_relative = 1e-12);
        }
    }

    #[test]
    fn hyperbolic_cross_examples() {
        // d = 2, γ sums = (1,1), e^L = 4: all 1-based pairs with i₁·i₂ ≤ 4
        let s = hyperbolic_cross_set(&[1.0, 0.0], &[0.0, 1.0], 4.0f64.ln()).unwrap();
        let expect: Vec<MultiIndex> = [
            [1u32, 1], [1, 2], [2, 1], [1, 3], [3, 1], [1, 4], [4, 1], [2, 2],
        ]
        .iter()
        .map(|p| mi(p))
        .collect();
        let got: Vec<MultiIndex> = s.iter().cloned().collect();
        let mut expect_sorted = expect.clone();
        expect_sorted.sort();
        assert_eq!(got, expect_sorted);

        // e^L = 1: only the all-ones index
        let s = hyperbolic_cross_set(&[1.0, 1.0], &[0.0, 0.0], 0.0).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.contains(&mi(&[1, 1])));

        // univariate: {1 .. e^{L/γ}}
        let s = hyperbolic_cross_set(&[2.0], &[0.0], 9.0f64.ln() * 2.0).unwrap();
        assert_eq!(s.len(), 9);
    }

    #[test]
    fn loglog_slope_examples() {
        let s = fit_loglog_slope(&[(1.0, 1.0), (10.0, 0.1), (100.0, 0.01)]).unwrap();
        assert_relative_eq!(s, -1.0, max_relative = 1e-12);

        let s = fit_loglog_slope(&[(1.0, 1.0), (E, E.powi(-2)), (E * E, E.powi(-4))]).unwrap();
        assert_relative_eq!(s, -2.0, max_relative = 1e-12);

        // perturbed power law stays near the true slope
        let mut rng = crate::stream::SplitMix64::new(0x77);
        let points: Vec<(f64, f64)> = (1..=12)
            .map(|k| {
                let w = 2.0f64.powi(k);
                let noise = 1.0 + 0.05 * (2.0 * rng.next_f64() - 1.0);
                (w, w.powf(-1.5) * noise)
            })
            .collect();
        let s = fit_loglog_slope(&points).unwrap();
        assert!((s + 1.5).abs() < 0.05, "slope {s}");

        assert!(matches!(
            fit_loglog_slope(&[(1.0, 1.0), (2.0, 0.5)]),
            Err(ModelError::TooFewPoints(2))
        ));
        assert!(matches!(
            fit_loglog_slope(&[(1.0, 1.0), (2.0, 0.5), (3.0, -0.1)]),
            Err(ModelError::NonpositivePoint { .. })
        ));
    }
}
