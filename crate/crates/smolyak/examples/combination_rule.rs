//! The combination rule: recombining a multi-parameter method from integer-
//! weighted point values, and its equivalence with direct mixed-difference
//! summation.
//!
//! ```bash
//! cargo run --example combination_rule
//! ```

use smolyak::decomposition::{combination_coefficients, simplex_coefficients};
use smolyak::engine::SmolyakEngine;
use smolyak::multiindex::IndexSet;
use smolyak::synthetic::{random_downward_closed, RandomTable};

fn main() {
    // coefficients on the level-2 simplex: only the outer two layers
    // survive, the interior cancels
    let set = IndexSet::simplex(2, 2);
    let plan = combination_coefficients(&set).unwrap();
    println!("combination coefficients on the d=2, L=2 simplex:");
    for (index, coeff) in plan.terms() {
        println!("  {:?} -> {coeff:+}", index.to_dense(2));
    }
    println!("coefficient sum: {} (constants are reproduced exactly)", plan.coefficient_sum());

    // the closed-form simplex coefficients agree index by index
    let closed_form = simplex_coefficients(2, 2);
    assert_eq!(closed_form.terms(), plan.terms());
    println!("closed-form binomial coefficients match: yes");

    // recombination equals the truncated difference decomposition on any
    // downward closed set, for any method
    let set = random_downward_closed(42, 3, 4, 25);
    let method = RandomTable::new(7, 3);
    let engine = SmolyakEngine::new(&method);
    let via_plan = engine.apply(&set).unwrap();
    let via_differences = engine.apply_via_differences(&set).unwrap();
    println!(
        "\nrandom 3-parameter method on a random {}-member set:\n  recombined      {:+.15}\n  difference sum  {:+.15}",
        set.len(),
        via_plan.value,
        via_differences.value
    );
    println!(
        "  distinct evaluations: {} (zero-coefficient indices never evaluated)",
        via_plan.evaluation_count
    );
}
