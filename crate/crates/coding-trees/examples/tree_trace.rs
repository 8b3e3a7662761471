//! Samples coding trees for the Allen-Cahn problem and dumps them as
//! indented text: one line per particle with its code, birth/death times,
//! position and branch weight. Seeds are scanned until a tree with at least
//! one branching event shows up.
//!
//!     cargo run --example tree_trace

use coding_trees::bench::{build_preset, PresetParams, PresetProblem};
use coding_trees::codes::Code;
use coding_trees::rng::sample_rng;
use coding_trees::tree::TreeTrace;

fn main() {
    let preset = build_preset("allen_cahn_1d", &PresetParams::default()).unwrap();
    let PresetProblem::General(spec) = &preset.problem else {
        unreachable!()
    };
    for sample in 0..200 {
        let mut rng = sample_rng(1, 0, sample);
        let trace = TreeTrace::sample(spec, 0.0, 0.0, &Code::Identity, &mut rng);
        let outcome = trace.outcome.unwrap();
        if outcome.nodes >= 4 {
            println!("sample {sample}:");
            print!("{}", trace.text());
            break;
        }
    }
}
