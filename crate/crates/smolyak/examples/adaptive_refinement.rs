//! Greedy adaptive construction: grow a downward closed set by probing the
//! admissible frontier with measured mixed differences, without any a-priori
//! decay model.
//!
//! ```bash
//! cargo run --example adaptive_refinement
//! ```

use smolyak::synthetic::AdditiveDecay;
use smolyak::truncation::adaptive_build;

fn main() {
    // N(i) = 2^{-i₁} + 4^{-i₂}: errors decay slower along dimension 1, so
    // the greedy loop should spend its budget there
    let method = AdditiveDecay::new(vec![2.0, 4.0]);

    for budget in [1.0, 5.0, 15.0, 40.0, 100.0] {
        let set = adaptive_build(&method, budget).unwrap();
        let max0 = set.iter().map(|i| i.get(0)).max().unwrap();
        let max1 = set.iter().map(|i| i.get(1)).max().unwrap();
        println!(
            "budget {budget:5}: {:2} members, extent {max0} x {max1}, downward closed: {}",
            set.len(),
            set.is_downward_closed()
        );
    }

    let set = adaptive_build(&method, 40.0).unwrap();
    println!("\nbudget-40 set, as (i₁, i₂) pairs:");
    let mut grid = [[' '; 8]; 4];
    for index in set.iter() {
        grid[index.get(1) as usize][index.get(0) as usize] = 'x';
    }
    for (level, row) in grid.iter().enumerate().rev() {
        println!("  i₂={level} | {}", row.iter().collect::<String>());
    }
    println!("        +----------");
    println!("          i₁ = 0..7  (elongated along the slow-decay dimension)");
}
