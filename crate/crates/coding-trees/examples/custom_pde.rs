//! Solve a PDE given as text: parse the nonlinearity and terminal condition,
//! then estimate the solution at a few points.
//!
//! The problem here is d/dt u + (1/2) d2u/dx2 + u - u^3 = 0 with terminal
//! data u(T, x) = 1/(2 + 2x^2/5), the kind of input `ct solve` accepts:
//!
//!     ct solve --f "z0 - z0^3" --phi "1/(2 + 2*x^2/5)" --n 0 --T 0.3 --x -1,0,1

use coding_trees::expr::{parse, Var};
use coding_trees::mc::{run_estimate, RunConfig};
use coding_trees::tree::ProblemSpec;

fn main() {
    let f = parse("z0 - z0^3", &[Var::Z(0)]).expect("nonlinearity parses");
    let phi = parse("1/(2 + 2*x^2/5)", &[Var::X]).expect("terminal condition parses");
    println!("f   = {f}");
    println!("phi = {phi}");

    let spec = ProblemSpec::new(f, phi, 0, 0.0, 0.3);
    let points: Vec<(f64, f64)> = [-1.0, 0.0, 1.0].iter().map(|&x| (0.0, x)).collect();
    let config = RunConfig::new(spec, points.clone(), 100_000, 42);

    let stats = run_estimate(&config).expect("no failed samples");
    println!("\n{:>6}  {:>12}  {:>10}", "x", "u(0, x)", "std error");
    for ((_, x), stat) in points.iter().zip(&stats) {
        println!("{x:>6}  {:>12.6}  {:>10.2e}", stat.mean(), stat.std_error());
    }
}
