//! Estimates the four fully nonlinear / quasilinear traveling-wave presets
//! on their default grids and reports pointwise relative errors against the
//! closed forms.
//!
//!     cargo run --release --example fully_nonlinear_waves [preset] [samples]

use coding_trees::bench::{build_preset, grid_points, run_preset, PresetParams, PresetRunOptions};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let only: Option<&str> = args.get(1).map(|s| s.as_str());
    let samples: u64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(0);

    for name in ["dym_1d", "tan_1d", "quartic4_1d", "coslog_1d"] {
        if let Some(filter) = only {
            if filter != name {
                continue;
            }
        }
        let preset = build_preset(name, &PresetParams::default()).unwrap();
        let (lo, hi, steps) = preset.default_grid;
        let grid = grid_points(lo, hi, steps);
        let options = PresetRunOptions {
            samples,
            seed: 1,
            ..Default::default()
        };
        let start = std::time::Instant::now();
        let report = run_preset(&preset, &grid, &options).unwrap();
        println!(
            "== {name} (T = {}, {} samples, {:.1?})",
            preset.params.t_end,
            if samples == 0 {
                preset.default_samples
            } else {
                samples
            },
            start.elapsed()
        );
        println!("{}", report.to_text());
        println!(
            "max relative error: {:.4}\n",
            report.max_rel_error().unwrap_or(f64::NAN)
        );
    }
}
