//! Command-line front end: configuration, dispatch, and report emission.
//!
//! Six subcommands cover the library's studies: `coeffs`, `truncate`,
//! `quad`, `mlmc`, `study`, `appendix-check`. Every subcommand accepts its
//! parameters as flags and/or a JSON config file (flags win, unknown keys
//! are rejected), writes JSON or CSV artifacts with explicit schema
//! versions, and runs on a fixed-size thread pool (default 1) so outputs
//! are byte-stable.
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime error. Failures
//! emit a machine-readable error JSON on stderr.

use crate::decomposition::simplex_coefficients;
use crate::engine::{Reference, SmolyakEngine, StudyRow};
use crate::mlmc::{
    mse_work_study, multilevel_estimate, multilevel_telescoping_estimate,
    smolyak_triangle_estimate, MlmcParams, SdeProblem,
};
use crate::models::{hyperbolic_cross_set, ExpPolyDim, ExpPolyModel};
use crate::multiindex::{Ambient, IndexSet, MultiIndex};
use crate::quadrature::{integrand_registry, sparse_grid_nodes, TensorQuadrature};
use crate::synthetic::ErrorExpansion;
use crate::truncation::{ProfileFn, ProfitModel};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};
use std::path::PathBuf;

const SCHEMA_VERSION: u64 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug)]
enum CliError {
    Config(Vec<String>),
    Runtime(String),
}

impl CliError {
    fn runtime(err: impl std::fmt::Display) -> Self {
        CliError::Runtime(err.to_string())
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            CliError::Config(violations) => json!({
                "schema_version": SCHEMA_VERSION,
                "error": { "kind": "config", "violations": violations },
            }),
            CliError::Runtime(message) => json!({
                "schema_version": SCHEMA_VERSION,
                "error": { "kind": "runtime", "message": message },
            }),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "smolyak",
    version,
    about = "Convergence acceleration studies: combination coefficients, knapsack truncation, sparse-grid quadrature, multilevel Monte Carlo"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Combination-rule coefficients on a standard simplex
    Coeffs(CoeffsArgs),
    /// Threshold (Dantzig) truncation set for a profit model
    Truncate(TruncateArgs),
    /// Sparse-grid quadrature convergence study
    Quad(QuadArgs),
    /// Multilevel Monte Carlo estimate and accuracy-work study
    Mlmc(MlmcArgs),
    /// Convergence study on a synthetic error-expansion method
    Study(StudyArgs),
    /// Exponential-sum bound verification scan
    AppendixCheck(AppendixArgs),
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// JSON config file; explicit flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Primary output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default 1 for byte-stable outputs)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct CoeffsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of parameters
    #[arg(long = "d")]
    dim: Option<u32>,
    /// Simplex level
    #[arg(long = "L")]
    level: Option<u32>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct CoeffsFile {
    d: Option<u32>,
    #[serde(rename = "L")]
    level: Option<u32>,
}

#[derive(Args, Debug)]
struct TruncateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Per-dimension decay exponents c_j (comma separated)
    #[arg(long, value_delimiter = ',')]
    decay_rate: Option<Vec<f64>>,
    /// Per-dimension work exponents w_j
    #[arg(long, value_delimiter = ',')]
    work_rate: Option<Vec<f64>>,
    /// Per-dimension decay polynomial degrees (default 0)
    #[arg(long, value_delimiter = ',')]
    decay_poly: Option<Vec<f64>>,
    /// Per-dimension work polynomial degrees (default 0)
    #[arg(long, value_delimiter = ',')]
    work_poly: Option<Vec<f64>>,
    /// Explicit decay tables, one per dimension: "1,0.5,0.25;1,0.3,0.1"
    #[arg(long)]
    decay_table: Option<String>,
    /// Explicit work tables, same layout as --decay-table
    #[arg(long)]
    work_table: Option<String>,
    #[arg(long)]
    k1: Option<f64>,
    #[arg(long)]
    k2: Option<f64>,
    /// Work budget W
    #[arg(long = "W", alias = "budget")]
    budget: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct TruncateFile {
    decay_rate: Option<Vec<f64>>,
    work_rate: Option<Vec<f64>>,
    decay_poly: Option<Vec<f64>>,
    work_poly: Option<Vec<f64>>,
    decay_table: Option<String>,
    work_table: Option<String>,
    k1: Option<f64>,
    k2: Option<f64>,
    #[serde(rename = "W")]
    budget: Option<f64>,
}

#[derive(Args, Debug)]
struct QuadArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long = "d")]
    dim: Option<u32>,
    /// Integrand id: exp-sum | runge-product | polynomial
    #[arg(long)]
    integrand: Option<String>,
    /// Set family: simplex | dantzig | hyperbolic-cross
    #[arg(long)]
    family: Option<String>,
    /// Levels L for simplex / budget exponents for hyperbolic-cross
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<f64>>,
    /// Work budgets W for the dantzig family
    #[arg(long, value_delimiter = ',')]
    budgets: Option<Vec<f64>>,
    /// Per-dimension exponents for the hyperbolic-cross family (default 1)
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,
    /// Also write the merged sparse grid of the richest set as JSON
    #[arg(long)]
    grid_json: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct QuadFile {
    d: Option<u32>,
    integrand: Option<String>,
    family: Option<String>,
    levels: Option<Vec<f64>>,
    budgets: Option<Vec<f64>>,
    gamma: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct MlmcArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// GBM drift rate
    #[arg(long)]
    rate: Option<f64>,
    /// GBM volatility
    #[arg(long)]
    vol: Option<f64>,
    #[arg(long)]
    s0: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Base sample count M₀
    #[arg(long)]
    m0: Option<u64>,
    /// Base step count N₀
    #[arg(long)]
    n0: Option<u64>,
    /// Truncation level L
    #[arg(long = "L", alias = "level")]
    level: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Replications for the accuracy-work study CSV
    #[arg(long)]
    replications: Option<u64>,
    /// Study CSV path (written when replications ≥ 2)
    #[arg(long)]
    study_csv: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct MlmcFile {
    rate: Option<f64>,
    vol: Option<f64>,
    s0: Option<f64>,
    horizon: Option<f64>,
    m0: Option<u64>,
    n0: Option<u64>,
    #[serde(rename = "L")]
    level: Option<u32>,
    seed: Option<u64>,
    replications: Option<u64>,
}

#[derive(Args, Debug)]
struct StudyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Per-dimension decay exponents of the synthetic method
    #[arg(long, value_delimiter = ',')]
    decay_rate: Option<Vec<f64>>,
    /// Per-dimension work exponents (level-set weights)
    #[arg(long, value_delimiter = ',')]
    work_rate: Option<Vec<f64>>,
    /// Level-set levels L
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<f64>>,
    /// Seed for the synthetic expansion coefficients
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct StudyFile {
    decay_rate: Option<Vec<f64>>,
    work_rate: Option<Vec<f64>>,
    levels: Option<Vec<f64>>,
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct AppendixArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Reference model: symmetric-d2 | poly-d2 | distinct-d3
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, value_delimiter = ',')]
    decay_rate: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    work_rate: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    decay_poly: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    work_poly: Option<Vec<f64>>,
    /// Scan levels
    #[arg(long = "Ls", value_delimiter = ',')]
    levels: Option<Vec<f64>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct AppendixFile {
    preset: Option<String>,
    decay_rate: Option<Vec<f64>>,
    work_rate: Option<Vec<f64>>,
    decay_poly: Option<Vec<f64>>,
    work_poly: Option<Vec<f64>>,
    #[serde(rename = "Ls")]
    levels: Option<Vec<f64>>,
}

/// Reference models for the bound-verification scan.
pub fn appendix_preset(name: &str) -> Option<ExpPolyModel> {
    match name {
        "symmetric-d2" => Some(ExpPolyModel::symmetric(2, 1.0, 1.0).expect("valid preset")),
        "poly-d2" => Some(
            ExpPolyModel::new(vec![
                ExpPolyDim {
                    k1: 1.0,
                    decay_rate: 1.0,
                    decay_poly: 1.0,
                    k2: 1.0,
                    work_rate: 1.0,
                    work_poly: 0.0,
                },
                ExpPolyDim::plain(1.0, 0.5),
            ])
            .expect("valid preset"),
        ),
        "distinct-d3" => Some(
            ExpPolyModel::new(vec![
                ExpPolyDim::plain(1.0, 1.0),
                ExpPolyDim::plain(1.0, 0.5),
                ExpPolyDim::plain(1.0, 0.25),
            ])
            .expect("valid preset"),
        ),
        _ => None,
    }
}

fn load_config<T: for<'de> Deserialize<'de> + Default>(
    path: &Option<PathBuf>,
) -> Result<T, CliError> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                CliError::Config(vec![format!("cannot read config {}: {e}", p.display())])
            })?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(vec![format!("invalid config: {e}")]))
        }
    }
}

fn write_artifact(path: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match path {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(p) => std::fs::write(p, content)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", p.display()))),
    }
}

fn json_doc(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

fn csv_doc(kind: &str, header: &str, rows: &[String]) -> String {
    let mut out = format!("# smolyak {kind} csv v{SCHEMA_VERSION}\n{header}\n");
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    out
}

fn study_csv(rows: &[StudyRow], labels: &[f64]) -> String {
    let body: Vec<String> = rows
        .iter()
        .zip(labels)
        .map(|(r, l)| format!("{},{},{},{}", r.set_size, r.work, r.error, l))
        .collect();
    csv_doc("convergence", "set_size,work,error,L", &body)
}

fn parse_tables(text: &str) -> Result<Vec<ProfileFn>, String> {
    let mut out = Vec::new();
    for (j, row) in text.split(';').enumerate() {
        let values: Result<Vec<f64>, _> =
            row.split(',').map(|v| v.trim().parse::<f64>()).collect();
        match values {
            Ok(v) if !v.is_empty() => out.push(ProfileFn::Table(v)),
            _ => return Err(format!("table for dimension {j} is not a comma-separated list")),
        }
    }
    Ok(out)
}

struct ResolvedTruncate {
    model: ProfitModel,
    budget: f64,
}

fn resolve_truncate(args: &TruncateArgs, file: &TruncateFile) -> Result<ResolvedTruncate, CliError> {
    let mut violations = Vec::new();
    let decay_rate = args.decay_rate.clone().or_else(|| file.decay_rate.clone());
    let work_rate = args.work_rate.clone().or_else(|| file.work_rate.clone());
    let decay_table = args.decay_table.clone().or_else(|| file.decay_table.clone());
    let work_table = args.work_table.clone().or_else(|| file.work_table.clone());
    let k1 = args.k1.or(file.k1).unwrap_or(1.0);
    let k2 = args.k2.or(file.k2).unwrap_or(1.0);
    let budget = args.budget.or(file.budget);

    let decay: Option<Vec<ProfileFn>> = match (&decay_table, &decay_rate) {
        (Some(tables), _) => match parse_tables(tables) {
            Ok(t) => Some(t),
            Err(e) => {
                violations.push(format!("--decay-table: {e}"));
                None
            }
        },
        (None, Some(rates)) => {
            let poly = args.decay_poly.clone().or_else(|| file.decay_poly.clone());
            let poly = poly.unwrap_or_else(|| vec![0.0; rates.len()]);
            if poly.len() != rates.len() {
                violations.push("--decay-poly must match --decay-rate in length".into());
                None
            } else {
                Some(
                    rates
                        .iter()
                        .zip(&poly)
                        .map(|(&c, &g)| ProfileFn::ExpPoly { scale: 1.0, rate: -c, poly: g })
                        .collect(),
                )
            }
        }
        (None, None) => {
            violations.push("decay profile required: --decay-rate or --decay-table".into());
            None
        }
    };
    let work: Option<Vec<ProfileFn>> = match (&work_table, &work_rate) {
        (Some(tables), _) => match parse_tables(tables) {
            Ok(t) => Some(t),
            Err(e) => {
                violations.push(format!("--work-table: {e}"));
                None
            }
        },
        (None, Some(rates)) => {
            let poly = args.work_poly.clone().or_else(|| file.work_poly.clone());
            let poly = poly.unwrap_or_else(|| vec![0.0; rates.len()]);
            if poly.len() != rates.len() {
                violations.push("--work-poly must match --work-rate in length".into());
                None
            } else {
                Some(
                    rates
                        .iter()
                        .zip(&poly)
                        .map(|(&w, &g)| ProfileFn::ExpPoly { scale: 1.0, rate: w, poly: g })
                        .collect(),
                )
            }
        }
        (None, None) => {
            violations.push("work profile required: --work-rate or --work-table".into());
            None
        }
    };
    if let (Some(d), Some(w)) = (&decay, &work) {
        if d.len() != w.len() {
            violations.push(format!(
                "decay covers {} dimensions but work covers {}",
                d.len(),
                w.len()
            ));
        }
    }
    if budget.is_none() {
        violations.push("--W (work budget) is required".into());
    } else if let Some(b) = budget {
        if !(b > 0.0) {
            violations.push(format!("--W must be positive, got {b}"));
        }
    }
    if !violations.is_empty() {
        return Err(CliError::Config(violations));
    }
    let model = ProfitModel::new(decay.unwrap(), work.unwrap(), k1, k2)
        .map_err(|e| CliError::Config(vec![e.to_string()]))?;
    Ok(ResolvedTruncate { model, budget: budget.unwrap() })
}

fn run_coeffs(args: &CoeffsArgs) -> Result<(), CliError> {
    let file: CoeffsFile = load_config(&args.common.config)?;
    let mut violations = Vec::new();
    let dim = args.dim.or(file.d);
    let level = args.level.or(file.level);
    if dim.map(|d| d < 1).unwrap_or(true) {
        violations.push("--d (number of parameters, ≥ 1) is required".into());
    }
    if level.is_none() {
        violations.push("--L (simplex level) is required".into());
    }
    if !violations.is_empty() {
        return Err(CliError::Config(violations));
    }
    let (dim, level) = (dim.unwrap(), level.unwrap());
    let plan = simplex_coefficients(dim, level);
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "d": dim,
        "L": level,
        "plan": plan.to_json(),
        "coefficient_sum": plan.coefficient_sum(),
    });
    write_artifact(&args.common.out, &json_doc(&doc))
}

fn run_truncate(args: &TruncateArgs) -> Result<(), CliError> {
    let file: TruncateFile = load_config(&args.common.config)?;
    let resolved = resolve_truncate(args, &file)?;
    let (set, delta) = resolved.model.dantzig_set(resolved.budget).map_err(CliError::runtime)?;
    let contribution = resolved.model.set_contribution(&set).map_err(CliError::runtime)?;
    let work = resolved.model.set_work(&set).map_err(CliError::runtime)?;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "budget": resolved.budget,
        "set": set.to_json(),
        "delta": delta,
        "contribution": contribution,
        "work": work,
        "size": set.len(),
    });
    write_artifact(&args.common.out, &json_doc(&doc))
}

fn run_quad(args: &QuadArgs) -> Result<(), CliError> {
    let file: QuadFile = load_config(&args.common.config)?;
    let mut violations = Vec::new();
    let dim = args.dim.or(file.d).unwrap_or(2);
    if dim < 1 {
        violations.push("--d must be at least 1".into());
    }
    let integrand_name =
        args.integrand.clone().or(file.integrand).unwrap_or_else(|| "exp-sum".into());
    let family = args.family.clone().or(file.family).unwrap_or_else(|| "simplex".into());
    let levels = args.levels.clone().or(file.levels);
    let budgets = args.budgets.clone().or(file.budgets);
    let gamma =
        args.gamma.clone().or(file.gamma).unwrap_or_else(|| vec![1.0; dim as usize]);
    let integrand = integrand_registry(&integrand_name, dim);
    if integrand.is_none() {
        violations.push(format!(
            "unknown integrand \"{integrand_name}\" (known: exp-sum, runge-product, polynomial)"
        ));
    }
    if gamma.len() != dim as usize {
        violations.push("--gamma must list one exponent per dimension".into());
    }

    // resolve the set family into nested sets plus their labels
    let resolve_family = || -> Result<(Vec<IndexSet>, Vec<f64>), String> {
        match family.as_str() {
            "simplex" => {
                let ls = levels.clone().unwrap_or_else(|| (0..=6).map(f64::from).collect());
                let sets =
                    ls.iter().map(|&l| IndexSet::simplex(dim, l.max(0.0) as u32)).collect();
                Ok((sets, ls))
            }
            "dantzig" => match budgets.clone() {
                None => Err("--budgets is required for the dantzig family".into()),
                Some(ws) => {
                    // trapezoid profile: error halves twice, nodes double per
                    // level
                    let c = vec![4.0f64.ln(); dim as usize];
                    let w = vec![2.0f64.ln(); dim as usize];
                    let model =
                        ProfitModel::exponential(&c, &w, 1.0, 1.0).map_err(|e| e.to_string())?;
                    let mut sets = Vec::new();
                    for budget in &ws {
                        let (set, _) = model.dantzig_set(*budget).map_err(|e| e.to_string())?;
                        sets.push(set);
                    }
                    Ok((sets, ws))
                }
            },
            "hyperbolic-cross" => {
                let ls = levels.clone().unwrap_or_else(|| (0..=6).map(f64::from).collect());
                let mut sets = Vec::new();
                for &l in &ls {
                    let cross = hyperbolic_cross_set(&gamma, &vec![0.0; dim as usize], l)
                        .map_err(|e| e.to_string())?;
                    // shift the 1-based cross onto 0-based refinement levels
                    let shifted: Vec<MultiIndex> = cross
                        .iter()
                        .map(|i| {
                            MultiIndex::from_dense(
                                &(0..dim).map(|j| i.get(j) - 1).collect::<Vec<_>>(),
                            )
                        })
                        .collect();
                    sets.push(
                        IndexSet::from_members(shifted, Ambient::Finite(dim))
                            .map_err(|e| e.to_string())?,
                    );
                }
                Ok((sets, ls))
            }
            other => Err(format!(
                "unknown family \"{other}\" (known: simplex, dantzig, hyperbolic-cross)"
            )),
        }
    };
    let sets_and_labels = resolve_family();
    let (sets, labels) = match sets_and_labels {
        Ok(pair) => pair,
        Err(v) => {
            violations.push(v);
            return Err(CliError::Config(violations));
        }
    };
    if !violations.is_empty() {
        return Err(CliError::Config(violations));
    }

    let (f, exact) = integrand.unwrap();
    let evaluator = TensorQuadrature::new(f, dim);
    let engine = SmolyakEngine::new(&evaluator);
    let rows = engine
        .convergence_study(&sets, Reference::Value(exact))
        .map_err(CliError::runtime)?;
    write_artifact(&args.common.out, &study_csv(&rows, &labels))?;

    if let Some(grid_path) = &args.grid_json {
        let richest = sets.last().ok_or_else(|| CliError::Runtime("no sets".into()))?;
        let grid = sparse_grid_nodes(richest, dim).map_err(CliError::runtime)?;
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "nodes": grid.to_json(),
            "total_weight": grid.total_weight(),
        });
        write_artifact(&Some(grid_path.clone()), &json_doc(&doc))?;
    }
    Ok(())
}

fn run_mlmc(args: &MlmcArgs) -> Result<(), CliError> {
    let file: MlmcFile = load_config(&args.common.config)?;
    let mut violations = Vec::new();
    let rate = args.rate.or(file.rate).unwrap_or(0.05);
    let vol = args.vol.or(file.vol).unwrap_or(0.2);
    let s0 = args.s0.or(file.s0).unwrap_or(1.0);
    let horizon = args.horizon.or(file.horizon).unwrap_or(1.0);
    let m0 = args.m0.or(file.m0).unwrap_or(16);
    let n0 = args.n0.or(file.n0).unwrap_or(8);
    let level = args.level.or(file.level).unwrap_or(4);
    let seed = args.seed.or(file.seed).unwrap_or(2024);
    let replications = args.replications.or(file.replications).unwrap_or(0);
    if !(horizon > 0.0) {
        violations.push(format!("--horizon must be positive, got {horizon}"));
    }
    if m0 < 1 {
        violations.push("--m0 must be at least 1".into());
    }
    if n0 < 1 {
        violations.push("--n0 must be at least 1".into());
    }
    if args.study_csv.is_some() && replications < 2 {
        violations.push("--study-csv needs --replications ≥ 2".into());
    }
    if !violations.is_empty() {
        return Err(CliError::Config(violations));
    }

    let problem = SdeProblem::gbm(rate, vol, s0, horizon);
    let params = MlmcParams::new(m0, n0, seed);
    let triangle = smolyak_triangle_estimate(&problem, &params, level).map_err(CliError::runtime)?;
    let telescoped = multilevel_telescoping_estimate(&problem, &params, level);
    let coupled = multilevel_estimate(&problem, &params, level);
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "problem": { "rate": rate, "vol": vol, "s0": s0, "horizon": horizon },
        "params": { "m0": m0, "n0": n0, "seed": seed, "L": level },
        "reference": problem.reference_value,
        "triangle": { "value": triangle.value, "work": triangle.total_work },
        "telescoped": telescoped,
        "multilevel": { "value": coupled.value, "work": coupled.work },
    });
    write_artifact(&args.common.out, &json_doc(&doc))?;

    if let Some(path) = &args.study_csv {
        let levels: Vec<u32> = (0..=level).collect();
        let rows = mse_work_study(&problem, &params, &levels, replications);
        let body: Vec<String> = rows
            .iter()
            .map(|r| {
                format!(
                    "{},{},{},{},{}",
                    r.level, r.rmse, r.work, r.baseline_rmse, r.baseline_work
                )
            })
            .collect();
        let csv = csv_doc("mlmc-study", "level,rmse,work,baseline_rmse,baseline_work", &body);
        write_artifact(&Some(path.clone()), &csv)?;
    }
    Ok(())
}

fn run_study(args: &StudyArgs) -> Result<(), CliError> {
    let file: StudyFile = load_config(&args.common.config)?;
    let mut violations = Vec::new();
    let decay = args.decay_rate.clone().or(file.decay_rate).unwrap_or_else(|| vec![1.0, 1.0]);
    let work = args.work_rate.clone().or(file.work_rate).unwrap_or_else(|| vec![1.0, 1.0]);
    let levels = args
        .levels
        .clone()
        .or(file.levels)
        .unwrap_or_else(|| (0..=6).map(|l| f64::from(l) * 2.0).collect());
    let seed = args.seed.or(file.seed).unwrap_or(7);
    if decay.len() != work.len() {
        violations.push("--decay-rate and --work-rate must have equal length".into());
    }
    if decay.iter().any(|&c| c <= 0.0) || work.iter().any(|&w| w <= 0.0) {
        violations.push("all exponents must be positive".into());
    }
    if levels.is_empty() {
        violations.push("--levels must not be empty".into());
    }
    if !violations.is_empty() {
        return Err(CliError::Config(violations));
    }

    let dims: Vec<ExpPolyDim> = decay
        .iter()
        .zip(&work)
        .map(|(&c, &w)| ExpPolyDim::plain(c, w))
        .collect();
    let model = ExpPolyModel::new(dims).map_err(|e| CliError::Config(vec![e.to_string()]))?;
    // synthetic method whose mixed differences decay with the model's rates
    let bases: Vec<f64> = decay.iter().map(|c| c.exp()).collect();
    let limit = 1.0;
    let evaluator = ErrorExpansion::full_grid(limit, &bases, seed);
    let engine = SmolyakEngine::new(&evaluator);
    let mut sets = Vec::with_capacity(levels.len());
    for &l in &levels {
        sets.push(model.level_set(l).map_err(CliError::runtime)?);
    }
    let rows = engine
        .convergence_study(&sets, Reference::Value(limit))
        .map_err(CliError::runtime)?;
    write_artifact(&args.common.out, &study_csv(&rows, &levels))
}

fn run_appendix(args: &AppendixArgs) -> Result<(), CliError> {
    let file: AppendixFile = load_config(&args.common.config)?;
    let mut violations = Vec::new();
    let preset = args.preset.clone().or(file.preset);
    let levels = args
        .levels
        .clone()
        .or(file.levels)
        .unwrap_or_else(|| vec![5.0, 10.0, 20.0, 40.0]);
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        violations.push("--Ls must be strictly increasing".into());
    }
    let model = match preset {
        Some(name) => match appendix_preset(&name) {
            Some(m) => Some(m),
            None => {
                violations.push(format!(
                    "unknown preset \"{name}\" (known: symmetric-d2, poly-d2, distinct-d3)"
                ));
                None
            }
        },
        None => {
            let decay = args.decay_rate.clone().or(file.decay_rate);
            let work = args.work_rate.clone().or(file.work_rate);
            match (decay, work) {
                (Some(c), Some(w)) if c.len() == w.len() => {
                    let gc = args
                        .decay_poly
                        .clone()
                        .or(file.decay_poly)
                        .unwrap_or_else(|| vec![0.0; c.len()]);
                    let gw = args
                        .work_poly
                        .clone()
                        .or(file.work_poly)
                        .unwrap_or_else(|| vec![0.0; c.len()]);
                    if gc.len() != c.len() || gw.len() != c.len() {
                        violations.push("polynomial degree lists must match the rate lists".into());
                        None
                    } else {
                        let dims: Vec<ExpPolyDim> = (0..c.len())
                            .map(|j| ExpPolyDim {
                                k1: 1.0,
                                decay_rate: c[j],
                                decay_poly: gc[j],
                                k2: 1.0,
                                work_rate: w[j],
                                work_poly: gw[j],
                            })
                            .collect();
                        match ExpPolyModel::new(dims) {
                            Ok(m) => Some(m),
                            Err(e) => {
                                violations.push(e.to_string());
                                None
                            }
                        }
                    }
                }
                (Some(_), Some(_)) => {
                    violations.push("--decay-rate and --work-rate must have equal length".into());
                    None
                }
                _ => {
                    violations
                        .push("either --preset or both --decay-rate and --work-rate are required".into());
                    None
                }
            }
        }
    };
    if !violations.is_empty() {
        return Err(CliError::Config(violations));
    }
    let rows = model.unwrap().ratio_scan(&levels).map_err(CliError::runtime)?;
    let body: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{},{}",
                r.level,
                r.work_sum,
                r.work_bound,
                r.work_ratio,
                r.residual_sum,
                r.residual_bound,
                r.residual_ratio
            )
        })
        .collect();
    let csv = csv_doc(
        "appendix-check",
        "L,work_sum,work_bound,work_ratio,residual_sum,residual_bound,residual_ratio",
        &body,
    );
    write_artifact(&args.common.out, &csv)
}

fn common_of(command: &Command) -> &CommonArgs {
    match command {
        Command::Coeffs(a) => &a.common,
        Command::Truncate(a) => &a.common,
        Command::Quad(a) => &a.common,
        Command::Mlmc(a) => &a.common,
        Command::Study(a) => &a.common,
        Command::AppendixCheck(a) => &a.common,
    }
}

fn dispatch(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Coeffs(a) => run_coeffs(a),
        Command::Truncate(a) => run_truncate(a),
        Command::Quad(a) => run_quad(a),
        Command::Mlmc(a) => run_mlmc(a),
        Command::Study(a) => run_study(a),
        Command::AppendixCheck(a) => run_appendix(a),
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code; errors are reported as JSON on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with success status
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let threads = common_of(&cli.command).threads.unwrap_or(1).max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("{}", json_doc(&CliError::Runtime(e.to_string()).to_json()));
            return EXIT_RUNTIME;
        }
    };
    match pool.install(|| dispatch(&cli.command)) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("{}", json_doc(&err.to_json()));
            err.exit_code()
        }
    }
}

/// Entry point for the `smolyak` binary.
pub fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(run(std::env::args()) as u8)
}
