//! Functional (non-polynomial) nonlinearity with drift: the exponential
//! traveling wave solved by the d-dimensional semilinear engine, in one and
//! ten dimensions, against its closed form.
//!
//!     cargo run --release --example exp_nonlin_wave

use coding_trees::bench::{build_preset, grid_points, run_preset, PresetParams, PresetRunOptions};

fn main() {
    for dim in [1u32, 10] {
        let preset = build_preset(
            "exp_nonlin_dd",
            &PresetParams {
                dim: Some(dim),
                ..Default::default()
            },
        )
        .unwrap();
        // the closed form log(1 + (alpha*T + s)^2) vanishes at s = -0.5;
        // keep relative errors meaningful by staying right of it
        let grid = grid_points(0.5, 2.5, 9);
        let options = PresetRunOptions {
            samples: 100_000,
            seed: 1,
            ..Default::default()
        };
        let report = run_preset(&preset, &grid, &options).unwrap();
        println!(
            "== d = {dim} (T = {}, alpha = {}); coordinate is s = sum of x_i",
            preset.params.t_end,
            preset.params.alpha.unwrap()
        );
        println!("{}", report.to_text());
        println!(
            "max relative error {:.2e}\n",
            report.max_rel_error().unwrap()
        );
    }
}
