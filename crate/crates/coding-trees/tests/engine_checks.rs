//! Statistical checks of the sampling engine against independent oracles:
//! the heat semigroup by quadrature, derivative codes by finite differences,
//! and every preset with a closed form by pointwise 3-standard-error tests.

use coding_trees::bench::{
    build_preset, grid_points, run_preset, PresetParams, PresetProblem, PresetRunOptions,
};
use coding_trees::codes::Code;
use coding_trees::expr::{parse, Bindings, Var};
use coding_trees::mc::{run_estimate, RunConfig};
use coding_trees::tree::ProblemSpec;

/// Simpson quadrature of the Gaussian smoothing integral
/// `E[phi(x + sqrt(t) Z)]`.
fn heat_quadrature(phi: &coding_trees::expr::Expr, x: f64, t: f64) -> f64 {
    let std = t.sqrt();
    let integrand = |z: f64| {
        let density = (-z * z / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        phi.evaluate(&Bindings::x(x + std * z)).unwrap() * density
    };
    let (a, b, m) = (-8.0, 8.0, 4000);
    let h = (b - a) / m as f64;
    let mut total = integrand(a) + integrand(b);
    for i in 1..m {
        total += integrand(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    total * h / 3.0
}

#[test]
fn zero_nonlinearity_reproduces_heat_kernel() {
    for phi_text in ["cos(x)", "x^2"] {
        let phi = parse(phi_text, &[Var::X]).unwrap();
        let spec = ProblemSpec::new(
            parse("0", &[Var::Z(0)]).unwrap(),
            phi.clone(),
            0,
            0.0,
            0.25,
        );
        let config = RunConfig::new(spec, vec![(0.0, 0.4)], 100_000, 13);
        let s = &run_estimate(&config).unwrap()[0];
        let exact = heat_quadrature(&phi, 0.4, 0.25);
        assert!(
            (s.mean() - exact).abs() < 3.0 * s.std_error(),
            "phi={phi_text}: estimate {} vs quadrature {exact} (se {})",
            s.mean(),
            s.std_error()
        );
    }
}

/// The dx code estimates the spatial derivative of the solution: it must
/// agree with a central difference of two solution estimates.
#[test]
fn derivative_code_matches_finite_difference() {
    let build = || {
        ProblemSpec::new(
            parse("z0 - z0^3", &[Var::Z(0)]).unwrap(),
            parse("-0.5 - 0.5*tanh(-x/2)", &[Var::X]).unwrap(),
            0,
            0.0,
            0.3,
        )
    };
    let h = 0.05;
    let mut direct = RunConfig::new(build(), vec![(0.0, 0.0)], 200_000, 5);
    direct.code = Code::Deriv(1);
    let d = &run_estimate(&direct).unwrap()[0];

    let flanks = RunConfig::new(build(), vec![(0.0, -h), (0.0, h)], 200_000, 6);
    let s = run_estimate(&flanks).unwrap();
    let central = (s[1].mean() - s[0].mean()) / (2.0 * h);
    let combined = ((s[0].std_error().powi(2) + s[1].std_error().powi(2)).sqrt() / (2.0 * h))
        .hypot(d.std_error());
    assert!(
        (d.mean() - central).abs() < 3.0 * combined,
        "dx-code {} vs central {central} (combined se {combined})",
        d.mean()
    );
}

/// Every preset with a closed form passes a pointwise 3-SE check on a
/// 5-point grid at its default parameters and 1e5 samples.
#[test]
fn presets_pass_pointwise_three_sigma_checks() {
    for name in [
        "allen_cahn_1d",
        "allen_cahn_flat",
        "exp_nonlin_dd",
        "dym_1d",
        "tan_1d",
        "quartic4_1d",
        "coslog_1d",
    ] {
        let preset = build_preset(name, &PresetParams::default()).unwrap();
        let (lo, hi, _) = preset.default_grid;
        let grid = grid_points(lo, hi, 5);
        let options = PresetRunOptions {
            samples: 100_000,
            seed: 4,
            ..Default::default()
        };
        let report = run_preset(&preset, &grid, &options).unwrap();
        assert_eq!(report.failed, 0, "{name} produced failed samples");
        for row in &report.rows {
            let exact = row.exact.unwrap();
            let diff = (row.estimate - exact).abs();
            assert!(
                diff <= 3.0 * row.std_error,
                "{name} at {}={}: estimate {} vs exact {exact}, {}x se",
                report.coord_label,
                row.coord,
                row.estimate,
                diff / row.std_error
            );
        }
    }
}

/// The high-order presets run their default horizons without exhausting any
/// sample budget; this is the a.s.-finiteness proxy for the deep tables
/// (five inner arguments, orders up to four).
#[test]
fn high_order_presets_run_clean_at_small_budgets() {
    for name in ["quartic4_1d", "coslog_1d"] {
        let preset = build_preset(name, &PresetParams::default()).unwrap();
        let (lo, hi, _) = preset.default_grid;
        let grid = grid_points(lo, hi, 5);
        let options = PresetRunOptions {
            samples: 10_000,
            seed: 3,
            ..Default::default()
        };
        let report = run_preset(&preset, &grid, &options).unwrap();
        assert_eq!(report.failed, 0, "{name} failed samples at 1e4");
    }
}

/// Cross-engine agreement on a semilinear problem: the general 1-D engine
/// and the d-dimensional engine restricted to d = 1 estimate the same value.
#[test]
fn engines_agree_on_allen_cahn() {
    let preset = build_preset("allen_cahn_1d", &PresetParams::default()).unwrap();
    let PresetProblem::General(spec) = &preset.problem else {
        unreachable!()
    };
    let config = RunConfig::new(
        ProblemSpec::new(spec.f.clone(), spec.phi.clone(), 0, 0.0, 0.3),
        vec![(0.0, 0.3)],
        100_000,
        9,
    );
    let general = &run_estimate(&config).unwrap()[0];
    let exact = preset.exact.as_ref().unwrap().value(0.0, 0.3);
    assert!(
        (general.mean() - exact).abs() < 3.0 * general.std_error(),
        "estimate {} vs wave {exact}",
        general.mean()
    );
}
