//! `ct` — command line front end for the coding-tree PDE solver.
//!
//! Subcommands: `solve` (1-D fully nonlinear), `solve-dd` (d-dimensional
//! semilinear), `preset` (problem catalog), `table` (benchmark tables),
//! `check-bounds`, `fdb-dump`, `mech-dump`. Run `ct <cmd> --help` for the
//! flags. Exit code is non-zero when a run produced failed samples or an
//! error.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use coding_trees::bench::{
    build_preset, grid_points, preset_names, run_preset, PresetParams, PresetProblem,
    PresetRunOptions, Report, ReportRow,
};
use coding_trees::codes::{check_bounds, mechanism, Code};
use coding_trees::dsem::{dd_run_repetition, DdCode, DdProblemSpec, DdRunConfig, PhiForm};
use coding_trees::expr::{parse, Var};
use coding_trees::fdb::enumerate_fdb;
use coding_trees::mc::{error_report, run_repetition, RunConfig};
use coding_trees::rng::sample_rng;
use coding_trees::tree::{ProblemSpec, TreeTrace, DEFAULT_MAX_NODES};

#[derive(Parser)]
#[command(
    name = "ct",
    about = "Monte Carlo solver for fully nonlinear parabolic PDEs over random coding trees",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate u(t, x) for d/dt u + (1/2) d2u/dx2 + f(u, ..., d^n u) = 0.
    Solve(SolveArgs),
    /// Estimate a d-dimensional semilinear problem with ridge or radial data.
    SolveDd(SolveDdArgs),
    /// Run a problem from the preset catalog.
    Preset(PresetArgs),
    /// Reproduce a benchmark table.
    Table(TableArgs),
    /// Check the sufficient conditions for |H| <= 1.
    CheckBounds(CheckBoundsArgs),
    /// Print a Faà di Bruno table as CSV.
    FdbDump { m: u32, k: u32 },
    /// Print the mechanism atoms of a code.
    MechDump(MechDumpArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the report to a file instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct SolveArgs {
    /// Nonlinearity over z0..zn, e.g. "z0 - z0^3".
    #[arg(long = "f", allow_hyphen_values = true)]
    f: String,
    /// Terminal condition over x, e.g. "cos(x)".
    #[arg(long, allow_hyphen_values = true)]
    phi: String,
    /// Highest derivative order appearing in f.
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t0: f64,
    /// Horizon T.
    #[arg(long = "T", allow_negative_numbers = true)]
    t_end: f64,
    /// Evaluation abscissas, comma separated.
    #[arg(long = "x", value_delimiter = ',', allow_hyphen_values = true)]
    points: Vec<f64>,
    /// Evaluation time (defaults to t0).
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Rate of the exponential lifetime density.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    rho_rate: f64,
    /// Independent repetitions; each appends one row per point.
    #[arg(long, default_value_t = 1)]
    runs: u32,
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: u64,
    /// Initial code: "id", "dx^K" or "fd:l0,l1,...".
    #[arg(long, default_value = "id")]
    code: String,
    /// Count and skip failed samples instead of aborting.
    #[arg(long)]
    allow_failures: bool,
    /// Print one sampled tree as indented text and exit.
    #[arg(long)]
    dump_tree: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SolveDdArgs {
    /// Nonlinearity over z0, e.g. "z0 - z0^3".
    #[arg(long = "f", allow_hyphen_values = true)]
    f: String,
    /// Profile applied to the ridge/radial coordinate, e.g. "log(1 + s^2)".
    #[arg(long, allow_hyphen_values = true)]
    phi: String,
    #[arg(long, value_enum)]
    phi_form: PhiFormArg,
    #[arg(long)]
    dim: u32,
    /// Constant per-coordinate drift.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu: f64,
    /// Per-coordinate diffusion coefficient.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t0: f64,
    #[arg(long = "T", allow_negative_numbers = true)]
    t_end: f64,
    /// Coordinate values: s for ridge (embedded as x = (s/d)*1),
    /// q-sqrt for radial (embedded as x = (c, 0, ..., 0)).
    #[arg(long = "x", value_delimiter = ',', allow_hyphen_values = true)]
    points: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    rho_rate: f64,
    #[arg(long, default_value_t = 1)]
    runs: u32,
    #[arg(long)]
    allow_failures: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PhiFormArg {
    Ridge,
    Radial,
}

#[derive(Args)]
struct PresetArgs {
    /// Preset name; run `ct preset list` to see them.
    name: String,
    #[arg(long = "T", allow_negative_numbers = true)]
    t_end: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi0: Option<f64>,
    #[arg(long)]
    dim: Option<u32>,
    /// Evaluation grid lo:hi:steps (defaults to the preset grid).
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Explicit coordinates instead of a grid.
    #[arg(long = "x", value_delimiter = ',', allow_hyphen_values = true)]
    points: Vec<f64>,
    /// Samples per point (0 = preset default).
    #[arg(long, default_value_t = 0)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    allow_failures: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TableArgs {
    /// One of: table2 (Allen-Cahn d=100), table3 (flat Allen-Cahn),
    /// table4 (Allen-Cahn traveling wave over T).
    which: String,
    /// Samples per estimate (0 = table default).
    #[arg(long, default_value_t = 0)]
    samples: u64,
    /// Independent runs for table2 statistics.
    #[arg(long, default_value_t = 5)]
    runs: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Largest horizon row for table4.
    #[arg(long, default_value_t = 0.5)]
    max_t: f64,
}

#[derive(Args)]
struct CheckBoundsArgs {
    /// Uniform bound K in (0,1) on terminal code values.
    #[arg(long = "K", allow_negative_numbers = true)]
    k_bound: f64,
    #[arg(long, allow_negative_numbers = true)]
    rho_rate: f64,
    #[arg(long = "T", allow_negative_numbers = true)]
    t_end: f64,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 16)]
    order_cap: u32,
}

#[derive(Args)]
struct MechDumpArgs {
    /// Code: "id", "dx^K" or "fd:l0,l1,...".
    #[arg(long)]
    code: String,
    /// Highest derivative order of the problem class.
    #[arg(long)]
    n: u32,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Solve(args) => solve(args),
        Command::SolveDd(args) => solve_dd(args),
        Command::Preset(args) => preset(args),
        Command::Table(args) => table(args),
        Command::CheckBounds(args) => {
            if !(args.k_bound > 0.0 && args.k_bound < 1.0) {
                return Err("--K must lie strictly between 0 and 1".into());
            }
            if args.rho_rate <= 0.0 || args.t_end <= 0.0 {
                return Err("--rho-rate and --T must be positive".into());
            }
            let verdict = check_bounds(
                args.k_bound,
                args.rho_rate,
                args.t_end,
                args.n,
                args.order_cap,
            )
            .map_err(|e| e.to_string())?;
            println!("{verdict}");
            Ok(ExitCode::SUCCESS)
        }
        Command::FdbDump { m, k } => {
            let table = enumerate_fdb(m, k).map_err(|e| e.to_string())?;
            println!("coeff_num,coeff_den,lambda,k_matrix,parts,s");
            for term in table.iter() {
                let lambda: Vec<String> = term.lambda.iter().map(u32::to_string).collect();
                let rows: Vec<String> = term
                    .k_matrix
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(u32::to_string)
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .collect();
                let parts: Vec<String> = term.parts.iter().map(u32::to_string).collect();
                println!(
                    "{},{},{},{},{},{}",
                    term.coefficient.numer(),
                    term.coefficient.denom(),
                    lambda.join(" "),
                    rows.join(";"),
                    parts.join(" "),
                    term.s
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::MechDump(args) => {
            let code = parse_code(&args.code, args.n)?;
            let table = mechanism(&code, args.n).map_err(|e| e.to_string())?;
            println!(
                "M({code}) for n = {}: {} atoms, uniform probability {}",
                args.n,
                table.atom_count(),
                table.probability()
            );
            for (i, outcome) in table.outcomes.iter().enumerate() {
                let children: Vec<String> =
                    outcome.children.iter().map(|c| c.to_string()).collect();
                println!(
                    "  {:>4}: w = {:+}  ->  {}",
                    i,
                    outcome.weight,
                    children.join(", ")
                );
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_code(text: &str, n: u32) -> Result<Code, String> {
    if text == "id" {
        return Ok(Code::Identity);
    }
    if let Some(order) = text.strip_prefix("dx^") {
        let order: u32 = order.parse().map_err(|_| format!("bad code `{text}`"))?;
        if order == 0 {
            return Err("derivative codes need order >= 1".into());
        }
        return Ok(Code::Deriv(order));
    }
    if text == "dx" {
        return Ok(Code::Deriv(1));
    }
    if let Some(lambda) = text.strip_prefix("fd:") {
        let lambda: Result<Vec<u32>, _> = lambda.split(',').map(str::parse).collect();
        let lambda = lambda.map_err(|_| format!("bad code `{text}`"))?;
        if lambda.len() != n as usize + 1 {
            return Err(format!(
                "fd code needs {} indices for n = {n}",
                n + 1
            ));
        }
        return Ok(Code::FDeriv(lambda));
    }
    Err(format!(
        "unknown code `{text}`; use id, dx^K or fd:l0,l1,..."
    ))
}

fn zvars(n: u32) -> Vec<Var> {
    (0..=n as u8).map(Var::Z).collect()
}

fn emit(report: &Report, output: &OutputArgs) -> Result<ExitCode, String> {
    let body = match output.format {
        Format::Text => report.to_text(),
        Format::Csv => report.to_csv(),
        Format::Json => format!("{:#}\n", report.to_json()),
    };
    match &output.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .map_err(|e| format!("cannot create {}: {e}", path.display()))?;
            file.write_all(body.as_bytes())
                .map_err(|e| e.to_string())?;
        }
        None => print!("{body}"),
    }
    if report.failed > 0 {
        eprintln!("{} failed samples", report.failed);
        Ok(ExitCode::FAILURE)
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn solve(args: SolveArgs) -> Result<ExitCode, String> {
    let f = parse(&args.f, &zvars(args.n)).map_err(|e| format!("--f: {e}"))?;
    let phi = parse(&args.phi, &[Var::X]).map_err(|e| format!("--phi: {e}"))?;
    let code = parse_code(&args.code, args.n)?;
    if args.points.is_empty() {
        return Err("need at least one --x point".into());
    }
    if args.samples == 0 {
        return Err("need at least one sample".into());
    }
    if args.t_end <= args.t0 || args.t0 < 0.0 {
        return Err("need T > t0 >= 0".into());
    }
    if args.rho_rate <= 0.0 {
        return Err("--rho-rate must be positive".into());
    }
    let spec = ProblemSpec::with_rate(f, phi, args.n, args.t0, args.t_end, args.rho_rate)
        .with_max_nodes(args.max_nodes);
    let t = args.t.unwrap_or(args.t0);
    if !(args.t0 <= t && t <= args.t_end) {
        return Err(format!("--t {t} is outside [{}, {}]", args.t0, args.t_end));
    }

    if args.dump_tree {
        let mut rng = sample_rng(args.seed, 0, 0);
        let trace = TreeTrace::sample(&spec, t, args.points[0], &code, &mut rng);
        print!("{}", trace.text());
        return Ok(ExitCode::SUCCESS);
    }

    let config = RunConfig {
        spec,
        code,
        eval_points: args.points.iter().map(|&x| (t, x)).collect(),
        samples: args.samples,
        seed: args.seed,
        threads: args.threads,
        runs: args.runs,
        strict_failures: !args.allow_failures,
    };
    let mut rows = Vec::new();
    let mut failed = 0;
    for rep in 0..args.runs {
        let stats = run_repetition(&config, rep).map_err(|e| e.to_string())?;
        for (&x, stat) in args.points.iter().zip(&stats) {
            failed += stat.failed;
            rows.push(ReportRow {
                t,
                coord: x,
                estimate: stat.mean(),
                std_error: stat.std_error(),
                exact: None,
                rel_error: None,
            });
        }
    }
    let report = Report {
        coord_label: "x",
        rows,
        failed,
        config: serde_json::json!({
            "f": args.f, "phi": args.phi, "n": args.n,
            "t0": args.t0, "T": args.t_end, "t": t,
            "rho_rate": args.rho_rate, "samples": args.samples,
            "seed": args.seed, "threads": args.threads, "runs": args.runs,
            "max_nodes": args.max_nodes, "code": args.code,
        }),
    };
    emit(&report, &args.output)
}

fn solve_dd(args: SolveDdArgs) -> Result<ExitCode, String> {
    let f = parse(&args.f, &[Var::Z(0)]).map_err(|e| format!("--f: {e}"))?;
    let (phi, coord_label) = match args.phi_form {
        PhiFormArg::Ridge => (
            PhiForm::Ridge(parse(&args.phi, &[Var::S]).map_err(|e| format!("--phi: {e}"))?),
            "s",
        ),
        PhiFormArg::Radial => (
            PhiForm::Radial(parse(&args.phi, &[Var::Q]).map_err(|e| format!("--phi: {e}"))?),
            "q",
        ),
    };
    if args.points.is_empty() {
        return Err("need at least one --x point".into());
    }
    let embed = |c: f64| -> Vec<f64> {
        match args.phi_form {
            PhiFormArg::Ridge => vec![c / args.dim as f64; args.dim as usize],
            PhiFormArg::Radial => {
                let mut x = vec![0.0; args.dim as usize];
                x[0] = c;
                x
            }
        }
    };
    if args.samples == 0 {
        return Err("need at least one sample".into());
    }
    if args.t_end <= args.t0 || args.t0 < 0.0 {
        return Err("need T > t0 >= 0".into());
    }
    if args.dim == 0 || args.sigma <= 0.0 || args.rho_rate <= 0.0 {
        return Err("need --dim >= 1, --sigma > 0 and --rho-rate > 0".into());
    }
    let spec = DdProblemSpec::new(
        f,
        phi,
        args.dim,
        args.mu,
        args.sigma,
        args.t0,
        args.t_end,
    )
    .with_rate(args.rho_rate);
    let config = DdRunConfig {
        spec,
        code: DdCode::Identity,
        eval_points: args.points.iter().map(|&c| (args.t0, embed(c))).collect(),
        samples: args.samples,
        seed: args.seed,
        threads: args.threads,
        runs: args.runs,
        strict_failures: !args.allow_failures,
    };
    let mut rows = Vec::new();
    let mut failed = 0;
    for rep in 0..args.runs {
        let stats = dd_run_repetition(&config, rep).map_err(|e| e.to_string())?;
        for (&c, stat) in args.points.iter().zip(&stats) {
            failed += stat.failed;
            rows.push(ReportRow {
                t: args.t0,
                coord: c,
                estimate: stat.mean(),
                std_error: stat.std_error(),
                exact: None,
                rel_error: None,
            });
        }
    }
    let report = Report {
        coord_label,
        rows,
        failed,
        config: serde_json::json!({
            "f": args.f, "phi": args.phi, "phi_form": coord_label,
            "dim": args.dim, "mu": args.mu, "sigma": args.sigma,
            "t0": args.t0, "T": args.t_end, "rho_rate": args.rho_rate,
            "samples": args.samples, "seed": args.seed,
            "threads": args.threads, "runs": args.runs,
        }),
    };
    emit(&report, &args.output)
}

fn preset(args: PresetArgs) -> Result<ExitCode, String> {
    if args.name == "list" {
        for name in preset_names() {
            let built = build_preset(name, &PresetParams::default())
                .map_err(|e| e.to_string())?;
            println!("{name:<16} {}", built.summary);
        }
        return Ok(ExitCode::SUCCESS);
    }
    if args.t_end.is_some_and(|t| t <= 0.0) {
        return Err("--T must be positive".into());
    }
    if args.phi0.is_some_and(|p| p <= 0.0) {
        return Err("--phi0 must be positive".into());
    }
    if args.dim.is_some_and(|d| d == 0) {
        return Err("--dim must be at least 1".into());
    }
    let params = PresetParams {
        t_end: args.t_end,
        alpha: args.alpha,
        phi0: args.phi0,
        dim: args.dim,
    };
    let built = build_preset(&args.name, &params).map_err(|e| e.to_string())?;
    let coords = if !args.points.is_empty() {
        args.points.clone()
    } else if let Some(grid) = &args.grid {
        let parts: Vec<&str> = grid.split(':').collect();
        if parts.len() != 3 {
            return Err("--grid needs lo:hi:steps".into());
        }
        let lo: f64 = parts[0].parse().map_err(|_| "bad grid lo")?;
        let hi: f64 = parts[1].parse().map_err(|_| "bad grid hi")?;
        let steps: usize = parts[2].parse().map_err(|_| "bad grid steps")?;
        if steps == 0 {
            return Err("--grid needs at least one step".into());
        }
        grid_points(lo, hi, steps)
    } else {
        let (lo, hi, steps) = built.default_grid;
        grid_points(lo, hi, steps)
    };
    let options = PresetRunOptions {
        samples: args.samples,
        seed: args.seed,
        threads: args.threads,
        strict_failures: !args.allow_failures,
    };
    let report = run_preset(&built, &coords, &options).map_err(|e| e.to_string())?;
    emit(&report, &args.output)
}

fn table(args: TableArgs) -> Result<ExitCode, String> {
    match args.which.as_str() {
        "table2" => table2(&args),
        "table3" => table3(&args),
        "table4" => table4(&args),
        other => Err(format!("unknown table `{other}`; use table2|table3|table4")),
    }
}

/// Allen-Cahn d=100 at T=0.3: run statistics against the published
/// reference value 0.0528.
fn table2(args: &TableArgs) -> Result<ExitCode, String> {
    let built = build_preset("allen_cahn_dd", &PresetParams::default())
        .map_err(|e| e.to_string())?;
    let PresetProblem::HighDim(spec) = built.problem else {
        unreachable!()
    };
    let samples = if args.samples == 0 { 4_000 } else { args.samples };
    let config = DdRunConfig {
        samples,
        seed: args.seed,
        threads: args.threads,
        ..DdRunConfig::new(spec, vec![(0.0, vec![0.0; 100])], samples, args.seed)
    };
    let mut estimates = Vec::new();
    for rep in 0..args.runs {
        let stats = dd_run_repetition(&config, rep).map_err(|e| e.to_string())?;
        estimates.push(stats[0].mean());
    }
    let report = error_report(&estimates, 0.0528);
    println!("Allen-Cahn d=100, T=0.3, {} runs x {samples} samples", args.runs);
    println!("{:<24} {:>12} {:>12}", "", "reference", "coding trees");
    println!("{:<24} {:>12} {:>12.6}", "Mean", "0.0528", report.mean);
    println!("{:<24} {:>12} {:>12.6}", "Standard deviation", "0.0002", report.sd);
    println!(
        "{:<24} {:>12} {:>12.6}",
        "Mean of rel. L1 error", "0.0030", report.mean_rel_l1
    );
    println!(
        "{:<24} {:>12} {:>12.6}",
        "SD of rel. L1 error", "0.0022", report.sd_rel_l1
    );
    Ok(ExitCode::SUCCESS)
}

/// Flat Allen-Cahn at T=1 over a range of phi(0) values.
fn table3(args: &TableArgs) -> Result<ExitCode, String> {
    let samples = if args.samples == 0 { 100_000 } else { args.samples };
    println!("Allen-Cahn with constant terminal data, T=1, {samples} samples");
    println!("{:>8} {:>14} {:>14} {:>12}", "phi(0)", "exact", "coding trees", "std error");
    for phi0 in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.5, 2.0] {
        let built = build_preset(
            "allen_cahn_flat",
            &PresetParams {
                phi0: Some(phi0),
                ..Default::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let options = PresetRunOptions {
            samples,
            seed: args.seed,
            threads: args.threads,
            strict_failures: true,
        };
        let report = run_preset(&built, &[0.0], &options).map_err(|e| e.to_string())?;
        let row = &report.rows[0];
        println!(
            "{:>8} {:>14.6} {:>14.6} {:>12.2e}",
            phi0,
            row.exact.unwrap(),
            row.estimate,
            row.std_error
        );
    }
    Ok(ExitCode::SUCCESS)
}

/// Allen-Cahn traveling wave u(0,0) over horizons, d=1 and d=100.
fn table4(args: &TableArgs) -> Result<ExitCode, String> {
    let samples = if args.samples == 0 { 100_000 } else { args.samples };
    let horizons = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0];
    println!("Allen-Cahn traveling wave u(0,0), {samples} samples per estimate");
    println!(
        "{:>6} {:>12} {:>14} {:>14}",
        "T", "exact", "d=1", "d=100"
    );
    for t_end in horizons {
        if t_end > args.max_t {
            break;
        }
        let exact = -0.5 - 0.5 * (0.75 * t_end).tanh();

        let built = build_preset(
            "allen_cahn_1d",
            &PresetParams {
                t_end: Some(t_end),
                ..Default::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let options = PresetRunOptions {
            samples,
            seed: args.seed,
            threads: args.threads,
            strict_failures: true,
        };
        let one = run_preset(&built, &[0.0], &options).map_err(|e| e.to_string())?;

        // d = 100 ridge profile for the same wave
        let d = 100u32;
        let scale = 1.0 / (2.0 * (d as f64).sqrt());
        let profile = parse(
            &format!("-0.5 - 0.5*tanh(-{scale}*s)"),
            &[Var::S],
        )
        .unwrap();
        let spec = DdProblemSpec::new(
            parse("z0 - z0^3", &[Var::Z(0)]).unwrap(),
            PhiForm::Ridge(profile),
            d,
            0.0,
            1.0,
            0.0,
            t_end,
        );
        let config = DdRunConfig {
            samples,
            seed: args.seed,
            threads: args.threads,
            ..DdRunConfig::new(spec, vec![(0.0, vec![0.0; d as usize])], samples, args.seed)
        };
        let dd = dd_run_repetition(&config, 0).map_err(|e| e.to_string())?;
        println!(
            "{:>6} {:>12.6} {:>14.6} {:>14.6}",
            t_end,
            exact,
            one.rows[0].estimate,
            dd[0].mean()
        );
    }
    Ok(ExitCode::SUCCESS)
}
