//! d-dimensional engine for semilinear problems
//!
//! ```text
//!   d/dt u + mu * sum_i d/dx_i u + (sigma^2/2) * Laplacian u + f(u) = 0
//! ```
//!
//! with a ridge (`phi(x) = Phi(sum_i x_i)`) or radial (`phi(x) = Phi(|x|^2)`)
//! terminal condition. Codes reduce to the identity, `(f^(k))*` and the
//! coordinate gradients `d/dx_i`; no Faà di Bruno tables are needed.
//!
//! Branch selection for `(f^(k))*` is two-stage: a fair coin picks the
//! source atom `(f*, (f^(k+1))*)`, otherwise a uniform coordinate `i`
//! picks the Hessian atom `(d_i, d_i, -sigma^2/2 (f^(k+2))*)`. Both stages
//! fold into one uniform draw, and the scheme keeps the source-branch
//! probability independent of the dimension. For `d = 1`, `sigma = 1` the
//! law coincides with the general 1-D engine at `n = 0`.

use rand::RngCore;

use crate::expr::{Bindings, DerivTower, Expr, Var};
use crate::mc::{run_samples, RunError, RunStatistics};
use crate::rng::{exponential, open_unit, sample_rng, standard_normal};
use crate::tree::{SampleOutcome, DEFAULT_MAX_NODES, MAX_DEPTH};

/// Codes of the semilinear engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DdCode {
    Identity,
    /// `(f^(k))*` up to the weight carried by the branch.
    FDeriv(u32),
    /// `d/dx_i`, `0 <= i < d`.
    Grad(u32),
}

impl std::fmt::Display for DdCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DdCode::Identity => write!(f, "Id"),
            DdCode::FDeriv(0) => write!(f, "f*"),
            DdCode::FDeriv(k) => write!(f, "(f^({k}))*"),
            DdCode::Grad(i) => write!(f, "dx_{i}"),
        }
    }
}

/// Terminal condition shape: a one-variable profile composed with a ridge or
/// radial coordinate.
#[derive(Debug, Clone)]
pub enum PhiForm {
    /// `phi(x) = Phi(s)`, `s = sum_i x_i`; profile over the variable `s`.
    Ridge(Expr),
    /// `phi(x) = Phi(q)`, `q = |x|^2`; profile over the variable `q`.
    Radial(Expr),
}

impl PhiForm {
    fn profile_var(&self) -> Var {
        match self {
            PhiForm::Ridge(_) => Var::S,
            PhiForm::Radial(_) => Var::Q,
        }
    }

    fn profile(&self) -> &Expr {
        match self {
            PhiForm::Ridge(e) | PhiForm::Radial(e) => e,
        }
    }

    /// The scalar coordinate the profile is evaluated at.
    pub fn coordinate(&self, x: &[f64]) -> f64 {
        match self {
            PhiForm::Ridge(_) => x.iter().sum(),
            PhiForm::Radial(_) => x.iter().map(|v| v * v).sum(),
        }
    }
}

/// A semilinear problem in `d` dimensions with constant per-coordinate drift
/// `mu` and diffusion `sigma`.
#[derive(Debug)]
pub struct DdProblemSpec {
    pub f: Expr,
    pub phi: PhiForm,
    pub d: u32,
    pub mu: f64,
    pub sigma: f64,
    pub t0: f64,
    pub t_end: f64,
    pub rho_rate: f64,
    pub max_nodes: u64,
    f_tower: DerivTower,
    phi_tower: DerivTower,
}

impl DdProblemSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        f: Expr,
        phi: PhiForm,
        d: u32,
        mu: f64,
        sigma: f64,
        t0: f64,
        t_end: f64,
    ) -> Self {
        assert!(d >= 1, "need at least one dimension");
        assert!(sigma > 0.0, "diffusion must be positive");
        assert!(t_end > t0 && t0 >= 0.0, "need T > t0 >= 0");
        for v in f.variables() {
            assert!(v == Var::Z(0), "semilinear nonlinearity references `{v}`; only z0 is allowed");
        }
        for v in phi.profile().variables() {
            assert!(
                v == phi.profile_var(),
                "terminal profile references `{v}`; only {} is allowed",
                phi.profile_var()
            );
        }
        let f_tower = DerivTower::new(f.clone(), Var::Z(0));
        let phi_tower = DerivTower::new(phi.profile().clone(), phi.profile_var());
        DdProblemSpec {
            f,
            phi,
            d,
            mu,
            sigma,
            t0,
            t_end,
            rho_rate: 1.0,
            max_nodes: DEFAULT_MAX_NODES,
            f_tower,
            phi_tower,
        }
    }

    pub fn with_rate(mut self, rho_rate: f64) -> Self {
        assert!(rho_rate > 0.0);
        self.rho_rate = rho_rate;
        self
    }

    pub fn rho(&self, t: f64) -> f64 {
        self.rho_rate * (-self.rho_rate * t).exp()
    }

    pub fn fbar(&self, t: f64) -> f64 {
        (-self.rho_rate * t).exp()
    }

    pub fn phi_value(&self, x: &[f64]) -> f64 {
        let c = self.phi.coordinate(x);
        self.phi_tower
            .derivative(0)
            .evaluate(&Bindings::new().set(self.phi.profile_var(), c))
            .unwrap()
    }

    /// Terminal value of a code: `Id -> phi(x)`, `(f^(k))* -> f^(k)(phi(x))`,
    /// `d_i -> d phi/dx_i` by the chain rule through the profile.
    pub fn terminal_value(&self, c: DdCode, x: &[f64]) -> f64 {
        match c {
            DdCode::Identity => self.phi_value(x),
            DdCode::FDeriv(k) => {
                let u = self.phi_value(x);
                self.f_tower
                    .derivative(k as usize)
                    .evaluate(&Bindings::jet(&[u]))
                    .unwrap()
            }
            DdCode::Grad(i) => {
                let c = self.phi.coordinate(x);
                let dprofile = self
                    .phi_tower
                    .derivative(1)
                    .evaluate(&Bindings::new().set(self.phi.profile_var(), c))
                    .unwrap();
                match self.phi {
                    PhiForm::Ridge(_) => dprofile,
                    PhiForm::Radial(_) => 2.0 * x[i as usize] * dprofile,
                }
            }
        }
    }
}

/// Inspection view of the semilinear mechanism. `weight` is the per-draw
/// weight with the selection probability already folded in, so a sampled
/// branch contributes `weight / rho(tau)` times its children.
#[derive(Debug, Clone, PartialEq)]
pub struct DdOutcome {
    pub weight: f64,
    pub probability: f64,
    pub children: Vec<DdCode>,
}

/// The full outcome family of a code under the two-stage sampling law.
pub fn dd_mechanism(c: DdCode, d: u32, sigma: f64) -> Vec<DdOutcome> {
    match c {
        DdCode::Identity => vec![DdOutcome {
            weight: 1.0,
            probability: 1.0,
            children: vec![DdCode::FDeriv(0)],
        }],
        DdCode::Grad(i) => vec![DdOutcome {
            weight: 1.0,
            probability: 1.0,
            children: vec![DdCode::FDeriv(1), DdCode::Grad(i)],
        }],
        DdCode::FDeriv(k) => {
            let mut outcomes = vec![DdOutcome {
                weight: 2.0,
                probability: 0.5,
                children: vec![DdCode::FDeriv(0), DdCode::FDeriv(k + 1)],
            }];
            for i in 0..d {
                outcomes.push(DdOutcome {
                    weight: -(d as f64) * sigma * sigma,
                    probability: 0.5 / d as f64,
                    children: vec![DdCode::Grad(i), DdCode::Grad(i), DdCode::FDeriv(k + 2)],
                });
            }
            outcomes
        }
    }
}

/// Branch selection. Gradient and identity codes are deterministic (no
/// draw); `(f^(k))*` consumes one uniform realizing both stages.
fn dd_sample_branch<R: RngCore>(
    spec: &DdProblemSpec,
    c: DdCode,
    rng: &mut R,
) -> (f64, Vec<DdCode>) {
    match c {
        DdCode::Identity => (1.0, vec![DdCode::FDeriv(0)]),
        DdCode::Grad(i) => (1.0, vec![DdCode::FDeriv(1), DdCode::Grad(i)]),
        DdCode::FDeriv(k) => {
            let u = open_unit(rng);
            if u < 0.5 {
                (2.0, vec![DdCode::FDeriv(0), DdCode::FDeriv(k + 1)])
            } else {
                let i = (((u - 0.5) * 2.0 * spec.d as f64) as u32).min(spec.d - 1);
                (
                    -(spec.d as f64) * spec.sigma * spec.sigma,
                    vec![DdCode::Grad(i), DdCode::Grad(i), DdCode::FDeriv(k + 2)],
                )
            }
        }
    }
}

struct DdParticle {
    t: f64,
    x: Vec<f64>,
    code: DdCode,
    depth: u32,
}

/// Samples the functional of one tree rooted at `(t, x)`. Draw order per
/// particle: lifetime, then the `d` Gaussian coordinates, then the branch
/// uniform, then children left to right depth-first.
pub fn dd_sample_h<R: RngCore>(
    spec: &DdProblemSpec,
    t: f64,
    x: &[f64],
    c: DdCode,
    rng: &mut R,
) -> SampleOutcome {
    debug_assert_eq!(x.len(), spec.d as usize);
    let mut product = 1.0f64;
    let mut nodes = 0u64;
    let mut max_depth = 0u32;
    let mut stack = vec![DdParticle {
        t,
        x: x.to_vec(),
        code: c,
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

        if p.t == spec.t_end {
            product *= spec.terminal_value(p.code, &p.x);
        } else {
            let tau = exponential(rng, spec.rho_rate);
            let dt = (spec.t_end - p.t).min(tau);
            let scale = spec.sigma * dt.sqrt();
            let drift = spec.mu * dt;
            let mut position = p.x;
            for xi in position.iter_mut() {
                *xi += drift + scale * standard_normal(rng);
            }
            if p.t + tau >= spec.t_end {
                product *= spec.terminal_value(p.code, &position) / spec.fbar(dt);
            } else {
                let (weight, children) = dd_sample_branch(spec, p.code, rng);
                product *= weight / spec.rho(tau);
                for &child in children.iter().rev() {
                    stack.push(DdParticle {
                        t: p.t + tau,
                        x: position.clone(),
                        code: child,
                        depth: p.depth + 1,
                    });
                }
            }
        }

        if !product.is_finite() {
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

/// Estimation request for the d-dimensional engine.
#[derive(Debug)]
pub struct DdRunConfig {
    pub spec: DdProblemSpec,
    pub code: DdCode,
    /// Points `(t, x)`; each `x` must have length `d`.
    pub eval_points: Vec<(f64, Vec<f64>)>,
    pub samples: u64,
    pub seed: u64,
    pub threads: usize,
    pub runs: u32,
    pub strict_failures: bool,
}

impl DdRunConfig {
    pub fn new(
        spec: DdProblemSpec,
        eval_points: Vec<(f64, Vec<f64>)>,
        samples: u64,
        seed: u64,
    ) -> Self {
        DdRunConfig {
            spec,
            code: DdCode::Identity,
            eval_points,
            samples,
            seed,
            threads: 0,
            runs: 5,
            strict_failures: true,
        }
    }
}

pub fn dd_run_estimate(config: &DdRunConfig) -> Result<Vec<RunStatistics>, RunError> {
    dd_run_repetition(config, 0)
}

/// Same repetition indexing as the 1-D driver: repetition `rep` consumes
/// sample indices `[rep*samples, (rep+1)*samples)`.
pub fn dd_run_repetition(config: &DdRunConfig, rep: u32) -> Result<Vec<RunStatistics>, RunError> {
    let spec = &config.spec;
    let offset = rep as u64 * config.samples;
    run_samples(
        config.eval_points.len(),
        config.samples,
        config.threads,
        config.strict_failures,
        |point, i| {
            let (t, x) = &config.eval_points[point];
            let mut rng = sample_rng(config.seed, point as u32, offset + i);
            dd_sample_h(spec, *t, x, config.code, &mut rng)
        },
    )
}
