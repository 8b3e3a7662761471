//! Sufficient conditions for the functional to stay in [-1, 1]: a few
//! verdicts of the reachable-code-set check, plus an empirical confirmation
//! that a `holds` verdict really does pin every sample inside the unit
//! interval.
//!
//!     cargo run --release --example bounds_check

use coding_trees::codes::{check_bounds, Code};
use coding_trees::expr::{parse, Var};
use coding_trees::rng::sample_rng;
use coding_trees::tree::{sample_h, ProblemSpec};

fn main() {
    for (k, rate, t_end, n, cap) in [
        (0.5, 3.0, 0.1, 0u32, 8u32),
        (0.5, 1.0, 0.1, 0, 8),
        (0.5, 60.0, 0.01, 2, 3),
    ] {
        let verdict = check_bounds(k, rate, t_end, n, cap).unwrap();
        println!("K={k} rate={rate} T={t_end} n={n} cap={cap}: {verdict}");
    }

    // a problem matching the first verdict: every phi derivative and every
    // f partial along phi is bounded by K = 0.5
    let spec = ProblemSpec::with_rate(
        parse("0.5*sin(z0)", &[Var::Z(0)]).unwrap(),
        parse("0.5*cos(x)", &[Var::X]).unwrap(),
        0,
        0.0,
        0.1,
        3.0,
    );
    let mut max_abs: f64 = 0.0;
    for i in 0..100_000 {
        let mut rng = sample_rng(11, 0, i);
        let out = sample_h(&spec, 0.0, 0.3, &Code::Identity, &mut rng);
        max_abs = max_abs.max(out.value.abs());
    }
    println!("\nempirical max |H| over 1e5 samples: {max_abs:.6} (bound 1)");
}
