//! Exponential decay/work models: derived rate quantities, predicted
//! work/error bound shapes, the accuracy-to-work law, hyperbolic crosses,
//! and the numerical verification of the underlying exponential-sum bounds.
//!
//! ```bash
//! cargo run --example rate_models
//! ```

use smolyak::models::{hyperbolic_cross_set, ExpPolyModel};

fn main() {
    // the Monte Carlo parametrization: decay 1/3, work 2/3 per parameter
    let model = ExpPolyModel::symmetric(2, 1.0 / 3.0, 2.0 / 3.0).unwrap();
    let rates = model.rate_summary();
    println!("decay c = 1/3, work ω = 2/3 per parameter:");
    println!("  ρ = {} (worst work-to-decay ratio)", rates.rho);
    println!("  work exponent μ = {:.4} per unit level", rates.mu);
    println!("  error exponent ν = {:.4} per unit level", rates.nu);
    println!("  critical dimensions: {:?}", rates.critical_dims);

    println!("\nlevel sets I_L = {{ (c+ω)·i ≤ L }} and predicted bound shapes:");
    println!("  L   |I_L|   work bound    error bound");
    for level in [0.0, 2.0, 4.0, 8.0, 12.0] {
        let set = model.level_set(level).unwrap();
        let (work, error) = model.predicted_bounds(level);
        println!("  {level:3} {:5}   {work:12.2}  {error:.6}", set.len());
    }

    // accuracy-to-work: ε^{-ρ} with a logarithmic factor from the tied
    // critical dimensions
    println!("\nwork to reach accuracy ε (shape prediction):");
    for eps in [1e-1, 1e-2, 1e-3] {
        println!("  ε = {eps:7}: {:.3e}", model.work_for_accuracy(eps).unwrap());
    }

    // algebraic rates reparametrize exponentially; the level sets pull back
    // to hyperbolic crosses Π i_j^{γ_j} ≤ e^L over 1-based indices
    let cross = hyperbolic_cross_set(&[1.0, 1.0], &[0.0, 0.0], 4.0f64.ln()).unwrap();
    println!("\nhyperbolic cross i₁·i₂ ≤ 4: {:?}", cross.iter().map(|i| i.to_dense(2)).collect::<Vec<_>>());

    // bound verification: enumerated sums over the predicted shapes must
    // flatten as L grows — the exponents and polynomial orders are the
    // testable content, the constants are not
    println!("\nexponential-sum bound check (work_ratio / residual_ratio flatten):");
    println!("  L    work_sum      work_ratio  residual_sum  residual_ratio");
    for row in model.ratio_scan(&[5.0, 10.0, 20.0, 40.0]).unwrap() {
        println!(
            "  {:3}  {:12.4e}  {:.6}    {:10.4e}    {:.6}",
            row.level, row.work_sum, row.work_ratio, row.residual_sum, row.residual_ratio
        );
    }
}
