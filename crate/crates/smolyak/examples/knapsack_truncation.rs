//! Profit-based truncation: threshold (Dantzig) sets under a work budget,
//! the exact knapsack oracle, and the a-priori guarantee linking them.
//!
//! ```bash
//! cargo run --example knapsack_truncation
//! ```

use smolyak::truncation::ProfitModel;

fn main() {
    // contribution halves twice per level, work doubles: g(i) = 4^{-i},
    // w(i) = 2^{i} in both dimensions
    let ln2 = std::f64::consts::LN_2;
    let model = ProfitModel::exponential(&[2.0 * ln2, 2.0 * ln2], &[ln2, ln2], 1.0, 1.0).unwrap();

    println!("budget  |set|  work     contribution  threshold δ");
    for budget in [1.0, 5.0, 17.0, 49.0, 129.0] {
        let (set, delta) = model.dantzig_set(budget).unwrap();
        println!(
            "{budget:6}  {:4}  {:7.2}  {:<12.6}  {delta:.2e}",
            set.len(),
            model.set_work(&set).unwrap(),
            model.set_contribution(&set).unwrap(),
        );
    }

    // exact oracle on a small box: enumerate every downward closed subset
    let budget = 5.0;
    let (optimal, optimum) = model.knapsack_exact(budget, &[2, 2]).unwrap();
    let (threshold, delta) = model.dantzig_set(budget).unwrap();
    println!("\nbudget {budget}:");
    println!("  exact optimum       E* = {optimum:.6} on {:?}", dense(&optimal));
    println!("  threshold set (δ = {delta:.2e}) = {:?}", dense(&threshold));

    // the guarantee: the threshold set is optimal for the work it actually
    // uses
    let contribution = model.set_contribution(&threshold).unwrap();
    let used = model.set_work(&threshold).unwrap();
    println!(
        "  guarantee: {contribution:.6} ≥ ({used}/{budget})·{optimum:.6} = {:.6}",
        used / budget * optimum
    );
    assert!(model.dantzig_guarantee_check(budget, &[3, 3]).unwrap());
}

fn dense(set: &smolyak::multiindex::IndexSet) -> Vec<Vec<u32>> {
    set.iter().map(|i| i.to_dense(2)).collect()
}
