//! Hamilton-Jacobi-Bellman with squared gradient in one dimension:
//! the coding-tree estimate against the independent log-transform oracle
//! (an exact reduction of this equation to a heat expectation).
//!
//!     cargo run --release --example hjb_cole_hopf

use coding_trees::bench::{build_preset, cole_hopf_oracle, run_preset, PresetParams, PresetRunOptions};

fn main() {
    let preset = build_preset("hjb_1d", &PresetParams::default()).unwrap();
    let options = PresetRunOptions {
        samples: 100_000,
        seed: 1,
        ..Default::default()
    };
    let report = run_preset(&preset, &[0.0], &options).unwrap();
    let row = &report.rows[0];

    let phi = |x: &[f64]| ((1.0 + x[0] * x[0]) / 2.0).ln();
    let (oracle, oracle_se) = cole_hopf_oracle(phi, 1, preset.params.t_end, &[0.0], 1_000_000, 7);

    let combined = (row.std_error.powi(2) + oracle_se.powi(2)).sqrt();
    println!("coding trees u(0,0) = {:.6} (se {:.2e})", row.estimate, row.std_error);
    println!("log-transform oracle = {:.6} (se {:.2e})", oracle, oracle_se);
    println!(
        "difference {:.4} = {:.2} combined standard errors",
        row.estimate - oracle,
        (row.estimate - oracle) / combined
    );
}
