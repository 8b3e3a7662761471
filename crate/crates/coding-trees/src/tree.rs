//! Sampling one random coding tree and its multiplicative functional.
//!
//! A tree starts at `(t, x)` with a code on its first branch. Each branch
//! lives an exponential time; if it survives to the horizon it contributes
//! `terminal(code, X) / Fbar(T - birth)` at a Gaussian endpoint, otherwise it
//! branches into the children of a uniformly drawn mechanism atom and
//! contributes `weight / (prob * rho(lifetime))`. The functional is the
//! product of all contributions and its expectation solves the PDE system.
//!
//! Per-sample draws come from one RNG stream in a fixed order — lifetime,
//! Gaussian displacement, branch uniform, then children left to right, each
//! child's subtree fully before its next sibling — so a sample is
//! bit-reproducible from its seed. Gaussians are inverse-CDF transformed
//! single draws (see [`crate::rng`]).

use rand::RngCore;

use crate::codes::{sample_branch, Code, TerminalEvaluator};
use crate::expr::Expr;
use crate::rng::{exponential, standard_normal};

pub const DEFAULT_MAX_NODES: u64 = 10_000_000;
pub const MAX_DEPTH: u32 = 100_000;

/// A 1-D problem instance: terminal condition, nonlinearity over the jet
/// `z0..zn`, time window and lifetime rate.
#[derive(Debug)]
pub struct ProblemSpec {
    pub f: Expr,
    pub phi: Expr,
    /// Highest derivative order appearing in `f`.
    pub n: u32,
    pub t0: f64,
    /// Horizon `T > t0`.
    pub t_end: f64,
    /// Rate of the exponential lifetime density `rho(t) = rate*exp(-rate*t)`.
    pub rho_rate: f64,
    /// Per-sample node budget; exceeding it fails the sample.
    pub max_nodes: u64,
    terminal: TerminalEvaluator,
}

impl ProblemSpec {
    pub fn new(f: Expr, phi: Expr, n: u32, t0: f64, t_end: f64) -> Self {
        Self::with_rate(f, phi, n, t0, t_end, 1.0)
    }

    pub fn with_rate(f: Expr, phi: Expr, n: u32, t0: f64, t_end: f64, rho_rate: f64) -> Self {
        assert!(t_end > t0 && t0 >= 0.0, "need T > t0 >= 0");
        assert!(rho_rate > 0.0, "need a positive lifetime rate");
        for v in f.variables() {
            assert!(
                matches!(v, crate::expr::Var::Z(k) if (k as u32) <= n),
                "nonlinearity references `{v}` outside z0..z{n}"
            );
        }
        for v in phi.variables() {
            assert!(
                v == crate::expr::Var::X,
                "terminal condition references `{v}`; only x is allowed"
            );
        }
        let terminal = TerminalEvaluator::new(phi.clone(), f.clone(), n);
        ProblemSpec {
            f,
            phi,
            n,
            t0,
            t_end,
            rho_rate,
            max_nodes: DEFAULT_MAX_NODES,
            terminal,
        }
    }

    pub fn with_max_nodes(mut self, max_nodes: u64) -> Self {
        self.max_nodes = max_nodes;
        self
    }

    pub fn terminal(&self) -> &TerminalEvaluator {
        &self.terminal
    }

    /// Lifetime density at `t`.
    pub fn rho(&self, t: f64) -> f64 {
        self.rho_rate * (-self.rho_rate * t).exp()
    }

    /// Tail distribution `P(lifetime > t)`.
    pub fn fbar(&self, t: f64) -> f64 {
        (-self.rho_rate * t).exp()
    }
}

/// One realization of the functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleOutcome {
    /// The sampled value; non-finite when the sample failed.
    pub value: f64,
    /// Number of tree nodes visited.
    pub nodes: u64,
    /// Deepest generation reached.
    pub max_depth: u32,
    /// True when the node or depth budget was exhausted.
    pub budget_exceeded: bool,
}

impl SampleOutcome {
    pub fn is_failed(&self) -> bool {
        self.budget_exceeded || !self.value.is_finite()
    }
}

/// Exponential lifetime with the given rate; exactly one draw.
pub fn sample_lifetime<R: RngCore>(rng: &mut R, rho_rate: f64) -> f64 {
    exponential(rng, rho_rate)
}

/// Samples the functional of one coding tree rooted at `(t, x)` with initial
/// code `c`.
pub fn sample_h<R: RngCore>(
    spec: &ProblemSpec,
    t: f64,
    x: f64,
    c: &Code,
    rng: &mut R,
) -> SampleOutcome {
    sample_h_observed(spec, t, x, c, rng, &mut ())
}

/// Hooks into the sampler, used by the tree dumper. The default no-op
/// observer compiles away.
pub trait TreeObserver {
    fn leaf(&mut self, _depth: u32, _code: &Code, _birth: f64, _death: f64, _x: f64, _value: f64) {
    }
    #[allow(clippy::too_many_arguments)]
    fn branch(
        &mut self,
        _depth: u32,
        _code: &Code,
        _birth: f64,
        _death: f64,
        _x: f64,
        _weight: f64,
        _probability: f64,
    ) {
    }
}

impl TreeObserver for () {}

/// Work item: a particle born at `t` in position `x` carrying `code`.
struct Particle {
    t: f64,
    x: f64,
    code: Code,
    depth: u32,
}

/// The sampler proper. Traversal is an explicit depth-first stack (children
/// pushed in reverse, so they run left to right); the functional is a flat
/// product over node contributions, which makes the iterative rewrite of the
/// recursion exact, draw for draw.
pub fn sample_h_observed<R: RngCore, O: TreeObserver>(
    spec: &ProblemSpec,
    t: f64,
    x: f64,
    c: &Code,
    rng: &mut R,
    observer: &mut O,
) -> SampleOutcome {
    debug_assert!(spec.t0 <= t && t <= spec.t_end);
    let mut product = 1.0f64;
    let mut nodes = 0u64;
    let mut max_depth = 0u32;
    let mut stack = vec![Particle {
        t,
        x,
        code: c.clone(),
        depth: 0,
    }];

    while let Some(p) = stack.pop() {
        nodes += 1;
        max_depth = max_depth.max(p.depth);
        if nodes > spec.max_nodes || p.depth > MAX_DEPTH {
            return SampleOutcome {
                value: f64::NAN,
                nodes,
                max_depth,
                budget_exceeded: true,
            };
        }

        // exact-horizon root: evaluate the code on phi directly
        if p.t == spec.t_end {
            let v = spec.terminal.value(&p.code, p.x);
            observer.leaf(p.depth, &p.code, p.t, p.t, p.x, v);
            product *= v;
        } else {
            let tau = sample_lifetime(rng, spec.rho_rate);
            if p.t + tau >= spec.t_end {
                // survives to the horizon: Gaussian endpoint over T - t
                let dt = spec.t_end - p.t;
                let endpoint = p.x + dt.sqrt() * standard_normal(rng);
                let v = spec.terminal.value(&p.code, endpoint) / spec.fbar(dt);
                observer.leaf(p.depth, &p.code, p.t, spec.t_end, endpoint, v);
                product *= v;
            } else {
                let position = p.x + tau.sqrt() * standard_normal(rng);
                let branch = match sample_branch(&p.code, spec.n, rng) {
                    Ok(b) => b,
                    Err(_) => {
                        // combinatorial table blew the cap: fail the sample
                        return SampleOutcome {
                            value: f64::NAN,
                            nodes,
                            max_depth,
                            budget_exceeded: true,
                        };
                    }
                };
                let outcome = branch.outcome();
                observer.branch(
                    p.depth,
                    &p.code,
                    p.t,
                    p.t + tau,
                    position,
                    outcome.weight,
                    branch.probability(),
                );
                product *= outcome.weight / (branch.probability() * spec.rho(tau));
                for child in outcome.children.iter().rev() {
                    stack.push(Particle {
                        t: p.t + tau,
                        x: position,
                        code: child.clone(),
                        depth: p.depth + 1,
                    });
                }
            }
        }

        if !product.is_finite() {
            // tagged non-finite terminal: the sample is failed either way,
            // no point expanding the rest of the tree
            return SampleOutcome {
                value: product,
                nodes,
                max_depth,
                budget_exceeded: false,
            };
        }
    }

    SampleOutcome {
        value: product,
        nodes,
        max_depth,
        budget_exceeded: false,
    }
}

/// Renders one sampled tree as indented text, one line per particle.
pub struct TreeTrace {
    lines: Vec<String>,
    pub outcome: Option<SampleOutcome>,
}

impl TreeTrace {
    pub fn sample<R: RngCore>(spec: &ProblemSpec, t: f64, x: f64, c: &Code, rng: &mut R) -> Self {
        let mut trace = TreeTrace {
            lines: Vec::new(),
            outcome: None,
        };
        let outcome = sample_h_observed(spec, t, x, c, rng, &mut trace);
        trace.outcome = Some(outcome);
        trace
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        if let Some(o) = self.outcome {
            out.push_str(&format!(
                "H = {} ({} nodes, depth {})\n",
                o.value, o.nodes, o.max_depth
            ));
        }
        out
    }
}

impl TreeObserver for TreeTrace {
    fn leaf(&mut self, depth: u32, code: &Code, birth: f64, death: f64, x: f64, value: f64) {
        self.lines.push(format!(
            "{}{code}  [{birth:.5} -> {death:.5}]  x={x:.5}  leaf value {value:.6e}",
            "  ".repeat(depth as usize)
        ));
    }

    fn branch(
        &mut self,
        depth: u32,
        code: &Code,
        birth: f64,
        death: f64,
        x: f64,
        weight: f64,
        probability: f64,
    ) {
        self.lines.push(format!(
            "{}{code}  [{birth:.5} -> {death:.5}]  x={x:.5}  branch w={weight} p={probability:.4}",
            "  ".repeat(depth as usize)
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Var};
    use crate::rng::sample_rng;

    fn cubic_spec(t_end: f64) -> ProblemSpec {
        ProblemSpec::new(
            parse("z0 - z0^3", &[Var::Z(0)]).unwrap(),
            parse("-0.5 - 0.5*tanh(-x/2)", &[Var::X]).unwrap(),
            0,
            0.0,
            t_end,
        )
    }

    #[test]
    fn lifetime_moments_and_tail() {
        let mut rng = sample_rng(5, 0, 0);
        let n = 1_000_000usize;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += sample_lifetime(&mut rng, 1.0);
        }
        let mean = sum / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "rate 1 mean {mean}");

        let mut sum = 0.0;
        for _ in 0..n {
            sum += sample_lifetime(&mut rng, 2.0);
        }
        let mean = sum / n as f64;
        assert!((mean - 0.5).abs() < 0.005, "rate 2 mean {mean}");

        // Kolmogorov-Smirnov distance against 1 - exp(-t) at 1e5 draws
        let mut draws: Vec<f64> = (0..100_000)
            .map(|_| sample_lifetime(&mut rng, 1.0))
            .collect();
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = draws.len() as f64;
        let mut ks: f64 = 0.0;
        for (i, t) in draws.iter().enumerate() {
            let cdf = 1.0 - (-t).exp();
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            ks = ks.max((cdf - lo).abs()).max((cdf - hi).abs());
        }
        assert!(ks < 0.01, "KS distance {ks}");
    }

    #[test]
    fn horizon_root_is_exact() {
        let spec = ProblemSpec::new(
            parse("z0", &[Var::Z(0)]).unwrap(),
            parse("cos(x)", &[Var::X]).unwrap(),
            0,
            0.0,
            0.5,
        );
        let mut rng = sample_rng(1, 0, 0);
        let out = sample_h(&spec, 0.5, 0.0, &Code::Identity, &mut rng);
        assert_eq!(out.value, 1.0);
        assert_eq!(out.nodes, 1);
        assert!(!out.is_failed());
    }

    #[test]
    fn zero_nonlinearity_samples_have_two_point_support() {
        // f = 0, phi = 1, rate 1: any branching event hits a zero
        // f-derivative at some leaf, so values are 0 or exp(T - t).
        let spec = ProblemSpec::new(
            parse("0", &[Var::Z(0)]).unwrap(),
            parse("1", &[Var::X]).unwrap(),
            0,
            0.0,
            0.4,
        );
        let survivor = 0.4f64.exp();
        let mut sum = 0.0;
        let n = 100_000;
        for i in 0..n {
            let mut rng = sample_rng(99, 0, i);
            let out = sample_h(&spec, 0.0, 0.0, &Code::Identity, &mut rng);
            assert!(!out.is_failed());
            let v = out.value;
            assert!(
                v == 0.0 || (v - survivor).abs() < 1e-12,
                "unexpected sample value {v}"
            );
            sum += v;
        }
        let mean = sum / n as f64;
        // exact expectation 1, exact variance exp(T) - 1
        let se = ((0.4f64.exp() - 1.0) / n as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn constant_source_reproduces_duhamel_integral() {
        // f = 1, phi = 0: u(t, x) = T - t
        let spec = ProblemSpec::new(
            parse("1", &[Var::Z(0)]).unwrap(),
            parse("0", &[Var::X]).unwrap(),
            0,
            0.0,
            0.2,
        );
        let n = 100_000;
        let (mut sum, mut sum2) = (0.0, 0.0);
        for i in 0..n {
            let mut rng = sample_rng(7, 0, i);
            let out = sample_h(&spec, 0.0, 0.3, &Code::Identity, &mut rng);
            assert!(!out.is_failed());
            sum += out.value;
            sum2 += out.value * out.value;
        }
        let mean = sum / n as f64;
        let var = (sum2 - sum * sum / n as f64) / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - 0.2).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn samples_are_bit_reproducible() {
        let spec = cubic_spec(0.3);
        let mut a = sample_rng(2024, 1, 77);
        let mut b = sample_rng(2024, 1, 77);
        let oa = sample_h(&spec, 0.0, 0.1, &Code::Identity, &mut a);
        let ob = sample_h(&spec, 0.0, 0.1, &Code::Identity, &mut b);
        assert_eq!(oa, ob);
    }

    #[test]
    fn allen_cahn_run_has_no_budget_failures() {
        let spec = cubic_spec(0.3);
        let mut worst_nodes = 0;
        for i in 0..100_000 {
            let mut rng = sample_rng(31, 0, i);
            let out = sample_h(&spec, 0.0, 0.0, &Code::Identity, &mut rng);
            assert!(!out.is_failed(), "sample {i} failed");
            worst_nodes = worst_nodes.max(out.nodes);
        }
        assert!(worst_nodes < 10_000, "worst tree had {worst_nodes} nodes");
    }

    #[test]
    fn bounded_setup_keeps_functional_in_unit_interval() {
        // K = 0.5 bounds every phi derivative and every f partial along phi;
        // check_bounds holds for rate 3, T = 0.1.
        use crate::codes::{check_bounds, BoundsVerdict};
        assert_eq!(
            check_bounds(0.5, 3.0, 0.1, 0, 8).unwrap(),
            BoundsVerdict::Holds
        );
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
            let mut rng = sample_rng(8, 0, i);
            let out = sample_h(&spec, 0.0, 0.2, &Code::Identity, &mut rng);
            assert!(!out.is_failed());
            max_abs = max_abs.max(out.value.abs());
        }
        assert!(max_abs <= 1.0 + 1e-12, "max |H| = {max_abs}");
    }

    #[test]
    fn trace_renders_every_particle() {
        let spec = cubic_spec(0.5);
        let mut rng = sample_rng(3, 0, 21);
        let trace = TreeTrace::sample(&spec, 0.0, 0.0, &Code::Identity, &mut rng);
        let text = trace.text();
        assert!(text.contains("Id"));
        assert!(text.contains("H = "));
        // same stream must reproduce the traced value
        let mut rng = sample_rng(3, 0, 21);
        let out = sample_h(&spec, 0.0, 0.0, &Code::Identity, &mut rng);
        assert_eq!(out.value, trace.outcome.unwrap().value);
    }
}
