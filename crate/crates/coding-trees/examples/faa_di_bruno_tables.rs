//! A look at the Faà di Bruno combinatorics behind the branching mechanism:
//! table sizes, coefficient sums, and the terms themselves for a small case.
//!
//!     cargo run --example faa_di_bruno_tables

use coding_trees::fdb::enumerate_fdb;
use num_rational::BigRational;
use num_traits::Zero;

fn main() {
    // univariate tables: one term per integer partition of k,
    // coefficients summing to the Bell numbers
    println!("m = 1: |table|, coefficient sum");
    for k in 1..=6u32 {
        let table = enumerate_fdb(1, k).unwrap();
        let total: BigRational = table
            .iter()
            .map(|t| t.coefficient.clone())
            .fold(BigRational::zero(), |a, b| a + b);
        println!("  k = {k}: {:>3} terms, sum {}", table.len(), total);
    }

    println!("\nterms of the (m=2, k=3) table:");
    let table = enumerate_fdb(2, 3).unwrap();
    for term in table.iter() {
        let rows: Vec<String> = term
            .k_matrix
            .iter()
            .map(|r| format!("{r:?}"))
            .collect();
        println!(
            "  coeff {:>4}  lambda {:?}  parts {:?}  k-matrix {}",
            term.coefficient.to_string(),
            term.lambda,
            term.parts,
            rows.join(" ")
        );
    }
    println!("\nsizes for m = 5 (a fourth-order problem):");
    for k in 1..=4u32 {
        println!("  k = {k}: {} terms", enumerate_fdb(5, k).unwrap().len());
    }
}
