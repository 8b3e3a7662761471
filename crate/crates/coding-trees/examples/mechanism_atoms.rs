//! Prints the branching mechanism for the codes of a semilinear problem
//! (n = 0) and a first-order gradient problem (n = 1), the same listings
//! `ct mech-dump` produces.
//!
//!     cargo run --example mechanism_atoms

use coding_trees::codes::{mechanism, Code};

fn show(code: &Code, n: u32) {
    let table = mechanism(code, n).unwrap();
    println!(
        "M({code}) at n = {n}: {} atoms, probability {} each",
        table.atom_count(),
        table.probability()
    );
    for outcome in &table.outcomes {
        let children: Vec<String> = outcome.children.iter().map(|c| c.to_string()).collect();
        println!("  w = {:+}  ->  {}", outcome.weight, children.join(", "));
    }
    println!();
}

fn main() {
    println!("== semilinear problem (n = 0)\n");
    show(&Code::Identity, 0);
    show(&Code::FDeriv(vec![0]), 0);
    show(&Code::Deriv(1), 0);

    println!("== first-order gradient problem (n = 1)\n");
    show(&Code::FDeriv(vec![0, 0]), 1);
    show(&Code::Deriv(1), 1);
    show(&Code::Deriv(2), 1);
}
