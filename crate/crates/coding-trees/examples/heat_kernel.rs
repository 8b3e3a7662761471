//! Sanity check with the nonlinearity switched off: for f = 0 the estimator
//! must reproduce the plain heat semigroup, compared here against closed
//! forms of the Gaussian integral for two terminal conditions.
//!
//!     cargo run --release --example heat_kernel

use coding_trees::expr::{parse, Var};
use coding_trees::mc::{run_estimate, RunConfig};
use coding_trees::tree::ProblemSpec;

fn main() {
    let t_end: f64 = 0.25;
    let x: f64 = 0.4;

    for (phi_text, exact) in [
        // E[cos(x + W)] = cos(x) exp(-t/2)
        ("cos(x)", x.cos() * (-t_end / 2.0).exp()),
        // E[(x + W)^2] = x^2 + t
        ("x^2", x * x + t_end),
    ] {
        let spec = ProblemSpec::new(
            parse("0", &[Var::Z(0)]).unwrap(),
            parse(phi_text, &[Var::X]).unwrap(),
            0,
            0.0,
            t_end,
        );
        let config = RunConfig::new(spec, vec![(0.0, x)], 200_000, 3);
        let s = &run_estimate(&config).unwrap()[0];
        println!(
            "phi = {phi_text:<8} estimate {:.6} (se {:.2e}), closed form {exact:.6}",
            s.mean(),
            s.std_error()
        );
    }
}
