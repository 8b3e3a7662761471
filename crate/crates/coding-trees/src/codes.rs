//! Branch codes and the branching mechanism.
//!
//! A tree branch carries a *code*: the identity, a spatial derivative
//! `dx^k`, or a mixed z-derivative of the nonlinearity composed with the
//! solution jet (written `(d^lambda f)*`). The *mechanism* maps a code to
//! the finite family of weighted child-code tuples created when a branch
//! dies before the horizon; it is read off the Duhamel formulation of the
//! PDE plus the Faà di Bruno expansion of `dx^k f(u, ..., d^n u)`.
//!
//! Scalar prefactors (the `k!`, the `-1/2` of the Hessian term, the inverse
//! factorials of the expansion) are folded into branch weights, so the code
//! space stays discrete and hashable. Branch selection is uniform over the
//! atoms of a mechanism table, exactly one uniform draw per branching event.

use std::fmt;
use std::sync::{Arc, OnceLock};

use dashmap::DashMap;
use rand::RngCore;

use crate::expr::{Bindings, DerivTower, Expr, PartialTable, Var};
use crate::fdb::{enumerate_fdb, FdbError, FdbTerm};
use crate::rng::uniform_index;

/// Operator attached to a branch.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Code {
    /// Identity on functions of (t, x).
    Identity,
    /// Spatial derivative of the given order (>= 1).
    Deriv(u32),
    /// `(d_{z0}^{l0} ... d_{zn}^{ln} f)*` composed with the solution jet;
    /// the all-zero multi-index is `f*` itself.
    FDeriv(Vec<u32>),
}

impl Code {
    pub fn fderiv_zero(n: u32) -> Code {
        Code::FDeriv(vec![0; n as usize + 1])
    }

    fn bumped(lambda: &[u32], i: usize) -> Vec<u32> {
        let mut out = lambda.to_vec();
        out[i] += 1;
        out
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Code::Identity => write!(f, "Id"),
            Code::Deriv(1) => write!(f, "dx"),
            Code::Deriv(k) => write!(f, "dx^{k}"),
            Code::FDeriv(lambda) => {
                if lambda.iter().all(|&l| l == 0) {
                    write!(f, "f*")
                } else {
                    let idx: Vec<String> = lambda.iter().map(|l| l.to_string()).collect();
                    write!(f, "(d^({})f)*", idx.join(","))
                }
            }
        }
    }
}

/// One atom of a mechanism table: a signed weight and the codes of the
/// branches it creates.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchOutcome {
    pub weight: f64,
    pub children: Vec<Code>,
}

/// The full family `M(c)` with its uniform sampling law.
#[derive(Debug, Clone, PartialEq)]
pub struct MechanismTable {
    pub code: Code,
    pub n: u32,
    pub outcomes: Vec<BranchOutcome>,
}

impl MechanismTable {
    pub fn atom_count(&self) -> usize {
        self.outcomes.len()
    }

    /// Uniform probability of each atom.
    pub fn probability(&self) -> f64 {
        1.0 / self.atom_count() as f64
    }
}

fn mechanism_cache() -> &'static DashMap<(Code, u32), Arc<MechanismTable>> {
    static CACHE: OnceLock<DashMap<(Code, u32), Arc<MechanismTable>>> = OnceLock::new();
    CACHE.get_or_init(DashMap::new)
}

/// The mechanism `M(c)` for the problem class with top derivative order `n`,
/// memoized per `(c, n)`.
pub fn mechanism(c: &Code, n: u32) -> Result<Arc<MechanismTable>, FdbError> {
    if let Some(t) = mechanism_cache().get(&(c.clone(), n)) {
        return Ok(t.clone());
    }
    let table = Arc::new(build_mechanism(c, n)?);
    let entry = mechanism_cache()
        .entry((c.clone(), n))
        .or_insert(table);
    Ok(entry.clone())
}

fn build_mechanism(c: &Code, n: u32) -> Result<MechanismTable, FdbError> {
    let m = n + 1;
    let outcomes = match c {
        Code::Identity => vec![BranchOutcome {
            weight: 1.0,
            children: vec![Code::fderiv_zero(n)],
        }],
        Code::Deriv(k) => {
            assert!(*k >= 1, "derivative codes have order >= 1");
            let table = enumerate_fdb(m, *k)?;
            table
                .iter()
                .map(|term| BranchOutcome {
                    weight: term.coefficient_f64(),
                    children: {
                        let mut children = vec![Code::FDeriv(term.lambda.clone())];
                        push_deriv_children(&mut children, term, n);
                        children
                    },
                })
                .collect()
        }
        Code::FDeriv(lambda) => {
            assert_eq!(
                lambda.len(),
                m as usize,
                "multi-index length must be n + 1"
            );
            let mut outcomes = Vec::new();
            // source term: f* times d_{z0} of the carried code
            outcomes.push(BranchOutcome {
                weight: 1.0,
                children: vec![Code::fderiv_zero(n), Code::FDeriv(Code::bumped(lambda, 0))],
            });
            // Hessian correction: ordered pairs, each with weight -1/2
            for j in 0..=n as usize {
                for l in 0..=n as usize {
                    let mut bumped = Code::bumped(lambda, j);
                    bumped[l] += 1;
                    outcomes.push(BranchOutcome {
                        weight: -0.5,
                        children: vec![
                            Code::Deriv(j as u32 + 1),
                            Code::Deriv(l as u32 + 1),
                            Code::FDeriv(bumped),
                        ],
                    });
                }
            }
            // chain rule through dx^k f for every inner order k
            for k in 1..=n {
                let table = enumerate_fdb(m, k)?;
                for term in table.iter() {
                    let mut children = vec![
                        Code::FDeriv(term.lambda.clone()),
                        Code::FDeriv(Code::bumped(lambda, k as usize)),
                    ];
                    push_deriv_children(&mut children, term, n);
                    outcomes.push(BranchOutcome {
                        weight: term.coefficient_f64(),
                        children,
                    });
                }
            }
            outcomes
        }
    };
    Ok(MechanismTable {
        code: c.clone(),
        n,
        outcomes,
    })
}

/// Spatial-derivative children of a Faà di Bruno term: for block `j` and
/// argument `q`, `k[j][q]` copies of `dx^(q + l_j)`.
fn push_deriv_children(children: &mut Vec<Code>, term: &FdbTerm, _n: u32) {
    for (j, row) in term.k_matrix.iter().enumerate() {
        for (q, &mult) in row.iter().enumerate() {
            for _ in 0..mult {
                children.push(Code::Deriv(q as u32 + term.parts[j]));
            }
        }
    }
}

/// A branch selection: uniform atom of `M(c)`.
#[derive(Debug, Clone)]
pub struct SampledBranch {
    pub table: Arc<MechanismTable>,
    pub index: usize,
}

impl SampledBranch {
    pub fn outcome(&self) -> &BranchOutcome {
        &self.table.outcomes[self.index]
    }

    pub fn probability(&self) -> f64 {
        self.table.probability()
    }
}

/// Draws one atom uniformly from `M(c)`; consumes exactly one uniform.
pub fn sample_branch<R: RngCore>(
    c: &Code,
    n: u32,
    rng: &mut R,
) -> Result<SampledBranch, FdbError> {
    let table = mechanism(c, n)?;
    let index = uniform_index(rng, table.atom_count());
    Ok(SampledBranch { table, index })
}

/// Evaluates codes on the terminal condition: `Id -> phi(x)`,
/// `dx^k -> phi^(k)(x)`, `(d^lambda f)* -> (d^lambda f)(phi(x), ..., phi^(n)(x))`.
///
/// Holds the memoized derivative tower of `phi` and partial table of `f`;
/// safe to share across sampler threads.
#[derive(Debug)]
pub struct TerminalEvaluator {
    phi: DerivTower,
    f: PartialTable,
    n: u32,
}

impl TerminalEvaluator {
    pub fn new(phi: Expr, f: Expr, n: u32) -> Self {
        TerminalEvaluator {
            phi: DerivTower::new(phi, Var::X),
            f: PartialTable::new(f),
            n,
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn phi_derivative(&self, order: usize) -> Arc<Expr> {
        self.phi.derivative(order)
    }

    /// Terminal value of a code at `x`. Domain violations surface as
    /// non-finite doubles.
    pub fn value(&self, c: &Code, x: f64) -> f64 {
        let at_x = Bindings::x(x);
        match c {
            Code::Identity => self.phi.derivative(0).evaluate(&at_x).unwrap(),
            Code::Deriv(k) => self.phi.derivative(*k as usize).evaluate(&at_x).unwrap(),
            Code::FDeriv(lambda) => {
                let jet: Vec<f64> = (0..=self.n as usize)
                    .map(|i| self.phi.derivative(i).evaluate(&at_x).unwrap())
                    .collect();
                self.f
                    .partial(lambda)
                    .evaluate(&Bindings::jet(&jet))
                    .unwrap()
            }
        }
    }
}

/// Outcome of the sufficient-condition check for `|H| <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundsVerdict {
    Holds,
    Fails,
    /// The reachable code set escapes the derivative-order cap, so the
    /// conditions cannot be decided on a finite closure.
    Inconclusive,
}

impl fmt::Display for BoundsVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsVerdict::Holds => write!(f, "holds"),
            BoundsVerdict::Fails => write!(f, "fails"),
            BoundsVerdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Checks the sufficient conditions for the functional to stay in `[-1, 1]`:
/// with every terminal code value bounded by `k_bound` in (0,1) and an
/// exponential lifetime density `rho(t) = rate*exp(-rate*t)`, requires
/// `rho(T) >= 1/min_c q_c` and `k_bound <= exp(-rate*T)` over the closure of
/// codes reachable from `Id`.
///
/// The closure is explored up to spatial-derivative order `order_cap`; if it
/// escapes the cap the verdict is [`BoundsVerdict::Inconclusive`].
pub fn check_bounds(
    k_bound: f64,
    rho_rate: f64,
    t_end: f64,
    n: u32,
    order_cap: u32,
) -> Result<BoundsVerdict, FdbError> {
    assert!(k_bound > 0.0 && k_bound < 1.0, "k_bound must be in (0, 1)");
    assert!(rho_rate > 0.0, "rho_rate must be positive");
    let m = n + 1;

    // Atom counts and reachable spatial orders. All f-derivative codes share
    // one table shape, so the closure collapses to {Id, f-shape, dx^k}.
    let fderiv_atoms = {
        let mut count = 1 + (m as usize) * (m as usize);
        for k in 1..=n {
            count += enumerate_fdb(m, k)?.len();
        }
        count
    };

    let mut max_atoms = fderiv_atoms.max(1);
    let mut pending: Vec<u32> = Vec::new();
    let mut seen = std::collections::HashSet::new();

    // orders created by any f-derivative code
    for j in 1..=m {
        if j > order_cap {
            return Ok(BoundsVerdict::Inconclusive);
        }
        if seen.insert(j) {
            pending.push(j);
        }
    }
    for k in 1..=n {
        for term in enumerate_fdb(m, k)?.iter() {
            for (j, row) in term.k_matrix.iter().enumerate() {
                for (q, &mult) in row.iter().enumerate() {
                    if mult == 0 {
                        continue;
                    }
                    let order = q as u32 + term.parts[j];
                    if order > order_cap {
                        return Ok(BoundsVerdict::Inconclusive);
                    }
                    if seen.insert(order) {
                        pending.push(order);
                    }
                }
            }
        }
    }

    // expand dx^k codes
    while let Some(k) = pending.pop() {
        let table = enumerate_fdb(m, k)?;
        max_atoms = max_atoms.max(table.len());
        for term in table.iter() {
            for (j, row) in term.k_matrix.iter().enumerate() {
                for (q, &mult) in row.iter().enumerate() {
                    if mult == 0 {
                        continue;
                    }
                    let order = q as u32 + term.parts[j];
                    if order > order_cap {
                        return Ok(BoundsVerdict::Inconclusive);
                    }
                    if seen.insert(order) {
                        pending.push(order);
                    }
                }
            }
        }
    }

    let rho_at_t = rho_rate * (-rho_rate * t_end).exp();
    let tail_at_t = (-rho_rate * t_end).exp();
    let ok = rho_at_t >= max_atoms as f64 && k_bound <= tail_at_t;
    Ok(if ok {
        BoundsVerdict::Holds
    } else {
        BoundsVerdict::Fails
    })
}
