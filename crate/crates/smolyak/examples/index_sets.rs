//! Multi-index sets: downward closure, admissible neighbors, weighted level
//! sets in fixed and unbounded dimension, and JSON round-trips.
//!
//! ```bash
//! cargo run --example index_sets
//! ```

use smolyak::multiindex::{Ambient, IndexSet, MultiIndex};

fn main() {
    // the standard simplex {|i|₁ ≤ 2} in two parameters
    let simplex = IndexSet::simplex(2, 2);
    println!("simplex d=2 L=2 ({} members, downward closed: {}):", simplex.len(), simplex.is_downward_closed());
    for index in simplex.iter() {
        println!("  {:?}", index.to_dense(2));
    }

    // the admissible forward frontier: adding any of these keeps the set
    // downward closed
    println!("\nadmissible forward neighbors:");
    for neighbor in simplex.admissible_forward_neighbors().unwrap() {
        println!("  {:?}", neighbor.to_dense(2));
    }

    // anisotropic weighted level set { i : i₁ + 2 i₂ ≤ 4 }
    let weighted = IndexSet::weighted_level_set(&[1.0, 2.0], 4.0).unwrap();
    println!("\nweights (1,2), level 4 -> {} members", weighted.len());

    // unboundedly many parameters: weights grow with the dimension, so only
    // finitely many dimensions activate; beyond the active span a single
    // fresh-dimension representative is offered
    let unbounded =
        IndexSet::weighted_level_set_unbounded(|j| 1.0 + 0.75 * f64::from(j), 3.0, 64).unwrap();
    println!("\nunbounded ambient, weights 1 + 3j/4, level 3:");
    for index in unbounded.iter() {
        println!("  {index}");
    }
    println!("frontier:");
    for neighbor in unbounded.admissible_forward_neighbors().unwrap() {
        println!("  {neighbor}");
    }

    // lossless JSON round-trip (dense arrays for fixed dimension, sparse
    // maps otherwise)
    let json = weighted.to_json();
    let back = IndexSet::from_json(&json).unwrap();
    assert_eq!(weighted, back);
    println!("\nJSON round-trip ok: {}", json["members"][3]);

    // downward closure is checked at construction
    let open = IndexSet::from_members(
        [MultiIndex::origin(), MultiIndex::from_dense(&[1, 1])],
        Ambient::Finite(2),
    )
    .unwrap();
    println!("{{0, (1,1)}} downward closed: {}", open.is_downward_closed());
}
