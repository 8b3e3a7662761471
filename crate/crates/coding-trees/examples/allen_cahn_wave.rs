//! Allen-Cahn traveling wave benchmark: estimate u(0, x) at T = 0.3 on a
//! grid and compare with the closed-form wave profile.
//!
//!     cargo run --release --example allen_cahn_wave [samples]

use coding_trees::bench::{build_preset, grid_points, run_preset, PresetParams, PresetRunOptions};

fn main() {
    let samples: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().unwrap())
        .unwrap_or(100_000);

    let preset = build_preset("allen_cahn_1d", &PresetParams::default()).unwrap();
    let grid = grid_points(-2.0, 2.0, 9);
    let options = PresetRunOptions {
        samples,
        seed: 1,
        ..Default::default()
    };
    let report = run_preset(&preset, &grid, &options).unwrap();
    println!("{}", report.to_text());
    println!(
        "u(0,0) reference -0.610639; max relative error over grid {:.2e}",
        report.max_rel_error().unwrap()
    );
}
