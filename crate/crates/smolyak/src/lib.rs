//! Convergence acceleration for multi-parameter numerical methods.
//!
//! Any numerical method `N : ℕ^d → Y` that converges as all of its
//! discretization parameters are refined can be decomposed into mixed
//! differences, truncated to a profit-chosen downward closed index set, and
//! recombined as an integer-weighted linear combination of method values.
//! Done well, the work to reach accuracy ε drops from the product of the
//! per-parameter costs to the single worst parameter's cost, up to
//! logarithmic factors.
//!
//! The crate is organized around that pipeline:
//!
//! - [`multiindex`]: sparse multi-indices, downward closed sets, weighted
//!   level sets.
//! - [`decomposition`]: difference calculus on black-box evaluators and the
//!   combination rule's integer coefficients.
//! - [`truncation`]: knapsack-style set selection — threshold (Dantzig)
//!   sets, an exact oracle, and a greedy adaptive builder.
//! - [`models`]: exponential-with-polynomial decay/work models, derived
//!   convergence rates, and numerical verification of the underlying
//!   exponential-sum bounds.
//! - [`engine`]: the executor with memoization, work accounting, error
//!   estimation and convergence studies.
//! - [`quadrature`]: sparse-grid quadrature on `[0,1]^d` built from nested
//!   trapezoid rules.
//! - [`mlmc`]: multilevel Monte Carlo for SDEs as the two-parameter special
//!   case.
//! - [`synthetic`]: evaluators with prescribed structure for studies and
//!   tests.
//! - [`cli`]: the command-line front end (`coeffs`, `truncate`, `quad`,
//!   `mlmc`, `study`, `appendix-check`).
//!
//! See the crate examples for one runnable walk-through per capability.

pub mod cli;
pub mod decomposition;
pub mod engine;
pub mod mlmc;
pub mod models;
pub mod multiindex;
pub mod quadrature;
pub mod stream;
pub mod synthetic;
pub mod truncation;

pub use decomposition::{
    combination_coefficients, mixed_difference, rectangular_sum, simplex_coefficients,
    CombinationPlan, EvalError, Evaluation, Evaluator, RealLine, ValueSpace,
};
pub use engine::{EvaluationCache, Reference, SmolyakEngine, SmolyakResult, StudyRow};
pub use multiindex::{Ambient, IndexSet, MultiIndex};
