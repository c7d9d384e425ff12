//! Multilevel Monte Carlo for SDEs as the two-parameter special case.
//!
//! The estimator `N(k, l)` averages `M_k` Euler paths with `N_l` time steps,
//! with `M_k = ⌈M₀ e^{2k/3}⌉` and `N_l = ⌈N₀ e^{2l/3}⌉` so both parameters
//! carry decay exponent 1/3 and work exponent 2/3. Truncating the mixed
//! differences of `N` to the triangle `{k + l ≤ L}` telescopes into the
//! familiar multilevel form: many cheap coarse samples plus few samples of
//! fine-minus-coarse corrections.
//!
//! All randomness comes from counter-based streams keyed by
//! (level group, sample, step): sample `i` of level group `l` is the same
//! Brownian path wherever it appears, independent across `(l, i)` and across
//! replications, and identical for any thread count.

use crate::decomposition::{EvalError, Evaluation, Evaluator, RealLine};
use crate::engine::{EngineError, SmolyakEngine, SmolyakResult};
use crate::multiindex::{Ambient, IndexSet, MultiIndex};
use crate::stream::{chain, NormalStream};
use rayon::prelude::*;
use std::sync::Arc;
use std::sync::Mutex;
use thiserror::Error;

const KIND_LEVEL_GROUP: u64 = 0x11;
const KIND_BASELINE: u64 = 0x22;
const KIND_REPLICATION: u64 = 0x33;

#[derive(Debug, Error)]
pub enum MlmcError {
    #[error("increment vector has length {got}, expected {expected}")]
    IncrementLengthMismatch { expected: usize, got: usize },
}

/// Drift or diffusion coefficient `(t, s) ↦ value`.
#[derive(Clone)]
pub enum Coefficient {
    Zero,
    /// `rate · s`
    LinearInState(f64),
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl Coefficient {
    #[inline]
    fn value(&self, t: f64, s: f64) -> f64 {
        match self {
            Coefficient::Zero => 0.0,
            Coefficient::LinearInState(rate) => rate * s,
            Coefficient::Custom(f) => f(t, s),
        }
    }
}

impl std::fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coefficient::Zero => write!(f, "Zero"),
            Coefficient::LinearInState(r) => write!(f, "LinearInState({r})"),
            Coefficient::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Quantity of interest of the final state.
#[derive(Clone)]
pub enum Quantity {
    Identity,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Quantity {
    #[inline]
    fn value(&self, s: f64) -> f64 {
        match self {
            Quantity::Identity => s,
            Quantity::Custom(f) => f(s),
        }
    }
}

impl std::fmt::Debug for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Quantity::Identity => write!(f, "Identity"),
            Quantity::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// The SDE `dS = a(t,S) dt + b(t,S) dW` on `[0, horizon]` with quantity of
/// interest `Q(S(T))`.
#[derive(Clone, Debug)]
pub struct SdeProblem {
    pub drift: Coefficient,
    pub diffusion: Coefficient,
    pub initial: f64,
    pub horizon: f64,
    pub quantity: Quantity,
    /// Analytic `E[Q(S(T))]` when known.
    pub reference_value: Option<f64>,
}

impl SdeProblem {
    /// Geometric Brownian motion `dS = rate·S dt + vol·S dW`;
    /// `E[S(T)] = S₀ e^{rate·T}` is analytic.
    pub fn gbm(rate: f64, vol: f64, initial: f64, horizon: f64) -> Self {
        SdeProblem {
            drift: Coefficient::LinearInState(rate),
            diffusion: Coefficient::LinearInState(vol),
            initial,
            horizon,
            quantity: Quantity::Identity,
            reference_value: Some(initial * (rate * horizon).exp()),
        }
    }
}

/// Sample and step budgets `M_k = ⌈M₀ e^{2k/3}⌉`, `N_l = ⌈N₀ e^{2l/3}⌉`,
/// plus the master seed all streams derive from.
#[derive(Clone, Copy, Debug)]
pub struct MlmcParams {
    pub base_samples: u64,
    pub base_steps: u64,
    pub seed: u64,
}

impl MlmcParams {
    pub fn new(base_samples: u64, base_steps: u64, seed: u64) -> Self {
        assert!(base_samples >= 1 && base_steps >= 1);
        MlmcParams { base_samples, base_steps, seed }
    }

    /// `M_k`, strictly increasing in `k`.
    pub fn samples(&self, k: u32) -> u64 {
        (self.base_samples as f64 * (2.0 * f64::from(k) / 3.0).exp()).ceil() as u64
    }

    /// `N_l`, strictly increasing in `l`.
    pub fn steps(&self, l: u32) -> u64 {
        (self.base_steps as f64 * (2.0 * f64::from(l) / 3.0).exp()).ceil() as u64
    }

    /// Stream for sample `i` of level group `l`.
    fn level_stream(&self, l: u32, sample: u64) -> NormalStream {
        NormalStream::new(chain(chain(chain(self.seed, KIND_LEVEL_GROUP), u64::from(l)), sample))
    }

    fn baseline_stream(&self, l: u32, sample: u64) -> NormalStream {
        NormalStream::new(chain(chain(chain(self.seed, KIND_BASELINE), u64::from(l)), sample))
    }

    /// Parameters for an independent replication.
    pub fn replication(&self, index: u64) -> MlmcParams {
        MlmcParams { seed: chain(chain(self.seed, KIND_REPLICATION), index), ..*self }
    }
}

/// Forward Euler recursion `S ← S + a(t,S) Δt + b(t,S) ΔW` over the given
/// Brownian increments (uniform steps `horizon / increments.len()`).
pub fn euler_path(
    problem: &SdeProblem,
    steps: usize,
    increments: &[f64],
) -> Result<f64, MlmcError> {
    if increments.len() != steps {
        return Err(MlmcError::IncrementLengthMismatch { expected: steps, got: increments.len() });
    }
    let dt = problem.horizon / steps as f64;
    let mut s = problem.initial;
    let mut t = 0.0;
    for dw in increments {
        s += problem.drift.value(t, s) * dt + problem.diffusion.value(t, s) * dw;
        t += dt;
    }
    Ok(s)
}

fn euler_path_variable(problem: &SdeProblem, dts: &[f64], increments: &[f64]) -> f64 {
    let mut s = problem.initial;
    let mut t = 0.0;
    for (dt, dw) in dts.iter().zip(increments) {
        s += problem.drift.value(t, s) * dt + problem.diffusion.value(t, s) * dw;
        t += dt;
    }
    s
}

/// Brownian increments at resolution `steps` for the given stream:
/// `ΔW_k = √(T/steps) · z_k`.
pub fn brownian_increments(stream: &NormalStream, steps: usize, horizon: f64) -> Vec<f64> {
    let mut z = vec![0.0; steps];
    stream.fill_normals(&mut z);
    let scale = (horizon / steps as f64).sqrt();
    for v in &mut z {
        *v *= scale;
    }
    z
}

/// Aggregates fine increments into `coarse_steps` consecutive groups (as
/// even as integer boundaries allow) and returns the coarse increments with
/// their time steps. The coarse path is the same Brownian path seen on the
/// grouped grid.
pub fn aggregate_increments(
    fine: &[f64],
    coarse_steps: usize,
    horizon: f64,
) -> (Vec<f64>, Vec<f64>) {
    let n_fine = fine.len();
    let fine_dt = horizon / n_fine as f64;
    let mut increments = Vec::with_capacity(coarse_steps);
    let mut dts = Vec::with_capacity(coarse_steps);
    for c in 0..coarse_steps {
        let start = c * n_fine / coarse_steps;
        let end = (c + 1) * n_fine / coarse_steps;
        increments.push(fine[start..end].iter().sum());
        dts.push((end - start) as f64 * fine_dt);
    }
    (increments, dts)
}

/// One coupled fine/coarse pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoupledSample {
    pub fine: f64,
    pub coarse: f64,
}

fn coupled_values(
    problem: &SdeProblem,
    stream: &NormalStream,
    fine_steps: usize,
    coarse_steps: usize,
) -> CoupledSample {
    let fine_increments = brownian_increments(stream, fine_steps, problem.horizon);
    let fine = euler_path(problem, fine_steps, &fine_increments).expect("lengths match");
    let (coarse_increments, dts) = aggregate_increments(&fine_increments, coarse_steps, problem.horizon);
    let coarse = euler_path_variable(problem, &dts, &coarse_increments);
    CoupledSample {
        fine: problem.quantity.value(fine),
        coarse: problem.quantity.value(coarse),
    }
}

/// Simulates one Brownian path at resolution `N_l` (stream keyed by the
/// level group and sample id), solves the fine Euler recursion on it and the
/// coarse one on the aggregated increments. Fine and coarse share the
/// identical underlying path.
pub fn coupled_level_sample(
    problem: &SdeProblem,
    level: u32,
    params: &MlmcParams,
    sample_id: u64,
) -> CoupledSample {
    assert!(level >= 1, "coupled samples need a coarser neighbor level");
    let stream = params.level_stream(level, sample_id);
    coupled_values(
        problem,
        &stream,
        params.steps(level) as usize,
        params.steps(level - 1) as usize,
    )
}

/// `Q` of one plain level-0 path.
pub fn level_zero_sample(problem: &SdeProblem, params: &MlmcParams, sample_id: u64) -> f64 {
    let stream = params.level_stream(0, sample_id);
    let steps = params.steps(0) as usize;
    let increments = brownian_increments(&stream, steps, problem.horizon);
    problem.quantity.value(euler_path(problem, steps, &increments).expect("lengths match"))
}

fn ordered_sum(values: Vec<f64>) -> f64 {
    values.iter().sum()
}

/// Sample variance of the coupled differences `Q_fine − Q_coarse` at a
/// level, over the given number of samples.
pub fn level_difference_variance(
    problem: &SdeProblem,
    level: u32,
    params: &MlmcParams,
    samples: u64,
) -> f64 {
    let diffs: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let s = coupled_level_sample(problem, level, params, i);
            s.fine - s.coarse
        })
        .collect();
    let n = samples as f64;
    let mean = ordered_sum(diffs.clone()) / n;
    let squares: Vec<f64> = diffs.iter().map(|d| (d - mean) * (d - mean)).collect();
    ordered_sum(squares) / (n - 1.0)
}

/// A multilevel estimate with its work in Euler steps.
#[derive(Clone, Copy, Debug)]
pub struct MlmcEstimate {
    pub value: f64,
    pub work: f64,
}

/// The coupled multilevel estimator: `M_L` plain samples at resolution `N₀`
/// plus `M_{L−l}` coupled fine-minus-coarse corrections per level
/// `l = 1..L`, each level group drawing independent paths. Work is counted
/// in Euler steps.
pub fn multilevel_estimate(problem: &SdeProblem, params: &MlmcParams, level: u32) -> MlmcEstimate {
    let mut value = 0.0;
    let mut work = 0.0;
    for l in 0..=level {
        let m = params.samples(level - l);
        if l == 0 {
            let values: Vec<f64> =
                (0..m).into_par_iter().map(|i| level_zero_sample(problem, params, i)).collect();
            value += ordered_sum(values) / m as f64;
            work += (m * params.steps(0)) as f64;
        } else {
            let diffs: Vec<f64> = (0..m)
                .into_par_iter()
                .map(|i| {
                    let s = coupled_level_sample(problem, l, params, i);
                    s.fine - s.coarse
                })
                .collect();
            value += ordered_sum(diffs) / m as f64;
            work += (m * (params.steps(l) + params.steps(l - 1))) as f64;
        }
    }
    MlmcEstimate { value, work }
}

/// Per-level sample tables shared by the triangle and telescoping routes:
/// sample `i` of level `l` is one path (stream keyed `(l, i)`) evaluated at
/// resolution `N_l`, the same for every sample-budget parameter `k`.
struct LevelSampleTable<'a> {
    problem: &'a SdeProblem,
    params: &'a MlmcParams,
    // prefix[l][m] = Σ_{i<m} Q_l(i)
    prefix: Mutex<Vec<Vec<f64>>>,
}

impl<'a> LevelSampleTable<'a> {
    fn new(problem: &'a SdeProblem, params: &'a MlmcParams, max_level: u32) -> Self {
        let prefix = (0..=max_level).map(|_| vec![0.0]).collect();
        LevelSampleTable { problem, params, prefix: Mutex::new(prefix) }
    }

    /// Mean of the first `m` samples of level `l`. Fills sequentially: the
    /// table is shared behind a lock, and parallel work under a lock inside
    /// a rayon pool can self-deadlock through work stealing.
    fn sample_mean(&self, l: u32, m: u64) -> f64 {
        let mut prefix = self.prefix.lock().expect("table lock");
        let row = &mut prefix[l as usize];
        if row.len() <= m as usize {
            let have = row.len() - 1;
            let steps = self.params.steps(l) as usize;
            for i in have as u64..m {
                let stream = self.params.level_stream(l, i);
                let increments = brownian_increments(&stream, steps, self.problem.horizon);
                let q = self.problem.quantity.value(
                    euler_path(self.problem, steps, &increments).expect("lengths match"),
                );
                let last = *row.last().expect("prefix row nonempty");
                row.push(last + q);
            }
        }
        row[m as usize] / m as f64
    }
}

struct TriangleEvaluator<'a> {
    table: LevelSampleTable<'a>,
    space: RealLine,
}

impl Evaluator for TriangleEvaluator<'_> {
    type Space = RealLine;

    fn space(&self) -> &RealLine {
        &self.space
    }
    fn ambient(&self) -> Ambient {
        Ambient::Finite(2)
    }
    fn eval(&self, index: &MultiIndex) -> Result<Evaluation<f64>, EvalError> {
        let k = index.get(0);
        let l = index.get(1);
        let m = self.table.params.samples(k);
        let value = self.table.sample_mean(l, m);
        let work = (m * self.table.params.steps(l)) as f64;
        Ok(Evaluation { value, work })
    }
}

/// Truncates the mixed-difference decomposition of `N(k, l)` to the
/// triangle `{k + l ≤ L}` and recombines through the engine. Sample `i` at
/// level `l` uses the same Brownian path for every `k`, so the sample-budget
/// differences telescope exactly.
pub fn smolyak_triangle_estimate(
    problem: &SdeProblem,
    params: &MlmcParams,
    level: u32,
) -> Result<SmolyakResult<f64>, EngineError> {
    let evaluator =
        TriangleEvaluator { table: LevelSampleTable::new(problem, params, level), space: RealLine };
    let engine = SmolyakEngine::new(&evaluator);
    engine.apply(&IndexSet::simplex(2, level))
}

/// The telescoped form of the same truncation:
/// `(1/M_L) Σ_i Q_0(i) + Σ_{l=1}^{L} (1/M_{L−l}) Σ_i (Q_l(i) − Q_{l−1}(i))`
/// over the identical path streams. Agrees with
/// [`smolyak_triangle_estimate`] to floating accuracy.
pub fn multilevel_telescoping_estimate(
    problem: &SdeProblem,
    params: &MlmcParams,
    level: u32,
) -> f64 {
    let table = LevelSampleTable::new(problem, params, level);
    let mut value = table.sample_mean(0, params.samples(level));
    for l in 1..=level {
        let m = params.samples(level - l);
        value += table.sample_mean(l, m) - table.sample_mean(l - 1, m);
    }
    value
}

/// One row of the accuracy-versus-work study.
#[derive(Clone, Copy, Debug)]
pub struct MseStudyRow {
    pub level: u32,
    /// RMSE of the multilevel estimator against the analytic reference,
    /// over the replications.
    pub rmse: f64,
    pub work: f64,
    /// RMSE of the single-level baseline (`M ≈ ε⁻²`, `N ≈ ε⁻¹` scaling).
    pub baseline_rmse: f64,
    pub baseline_work: f64,
}

/// Baseline sample budget at study level `L`: `⌈M₀ e^{4L/3}⌉`, matching the
/// statistical error to the weak-bias scale of `N_L` steps (the
/// `M ≈ ε⁻²`, `N ≈ ε⁻¹` single-level choice).
fn baseline_samples(params: &MlmcParams, level: u32) -> u64 {
    (params.base_samples as f64 * (4.0 * f64::from(level) / 3.0).exp()).ceil() as u64
}

fn baseline_estimate(problem: &SdeProblem, params: &MlmcParams, level: u32) -> MlmcEstimate {
    let m = baseline_samples(params, level);
    let steps = params.steps(level) as usize;
    let values: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|i| {
            let stream = params.baseline_stream(level, i);
            let increments = brownian_increments(&stream, steps, problem.horizon);
            problem.quantity.value(
                euler_path(problem, steps, &increments).expect("lengths match"),
            )
        })
        .collect();
    MlmcEstimate { value: ordered_sum(values) / m as f64, work: (m * steps as u64) as f64 }
}

/// Empirical RMSE and work per level for the multilevel estimator and the
/// single-level baseline, over independent replications. Requires a
/// problem with an analytic reference value.
pub fn mse_work_study(
    problem: &SdeProblem,
    params: &MlmcParams,
    levels: &[u32],
    replications: u64,
) -> Vec<MseStudyRow> {
    assert!(replications >= 2, "need at least two replications for an RMSE");
    let reference =
        problem.reference_value.expect("mse study requires a problem with a reference value");
    let mut rows = Vec::with_capacity(levels.len());
    for &level in levels {
        let mut mlmc_sq = 0.0;
        let mut base_sq = 0.0;
        let mut work = 0.0;
        let mut baseline_work = 0.0;
        for r in 0..replications {
            let rep = params.replication(r);
            let estimate = multilevel_estimate(problem, &rep, level);
            mlmc_sq += (estimate.value - reference).powi(2);
            work = estimate.work;
            let baseline = baseline_estimate(problem, &rep, level);
            base_sq += (baseline.value - reference).powi(2);
            baseline_work = baseline.work;
        }
        rows.push(MseStudyRow {
            level,
            rmse: (mlmc_sq / replications as f64).sqrt(),
            work,
            baseline_rmse: (base_sq / replications as f64).sqrt(),
            baseline_work,
        });
    }
    rows
}
