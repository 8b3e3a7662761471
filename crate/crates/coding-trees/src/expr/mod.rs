//! Symbolic expressions for nonlinearities and terminal conditions.
//!
//! Expressions are immutable trees over a small closed node set: constants,
//! variables, unary functions, binary operators and a hard clamp. The set is
//! closed under symbolic differentiation, so arbitrary-order derivatives of a
//! parsed formula stay in the same representation and can be evaluated
//! pointwise in IEEE double precision.
//!
//! Construction goes through the smart constructors on [`Expr`], which fold
//! constants and apply the 0/1 identities. No further simplification is done.

// the constructor names mirror the operators they build, and the 0/1
// identity guards read clearest as guards
#![allow(clippy::should_implement_trait, clippy::redundant_guards)]

mod diff;
mod parse;

pub use diff::{differentiate, substitute, DerivTower, PartialTable};
pub use parse::{parse, ParseError};

use std::fmt;
use std::sync::Arc;

/// A variable name. The grammar admits `z0`..`z9` (arguments of a
/// nonlinearity), `x` (1-D space), `s` (ridge coordinate), `q` (radial
/// coordinate) and `t` (time, used by closed-form references).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    Z(u8),
    X,
    S,
    Q,
    T,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Z(k) => write!(f, "z{k}"),
            Var::X => write!(f, "x"),
            Var::S => write!(f, "s"),
            Var::Q => write!(f, "q"),
            Var::T => write!(f, "t"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Tanh,
    Sqrt,
}

impl UnaryOp {
    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Tan => "tan",
            UnaryOp::Tanh => "tanh",
            UnaryOp::Sqrt => "sqrt",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            UnaryOp::Neg => -v,
            UnaryOp::Exp => v.exp(),
            UnaryOp::Log => v.ln(),
            UnaryOp::Sin => v.sin(),
            UnaryOp::Cos => v.cos(),
            UnaryOp::Tan => v.tan(),
            UnaryOp::Tanh => v.tanh(),
            UnaryOp::Sqrt => v.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    /// Integer power. The right operand is always `Const(k)` with `k` a
    /// non-negative integer; other exponents are rewritten to
    /// `exp(b*log(a))` at construction time.
    Pow,
}

/// Immutable expression tree. Subtrees are shared via `Arc`, so cloning is
/// cheap and expressions can be read concurrently from sampler threads.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Unary(UnaryOp, Arc<Expr>),
    Binary(BinOp, Arc<Expr>, Arc<Expr>),
    /// Hard clamp of `arg` to `[lo, hi]`. NaN arguments propagate.
    Clamp { arg: Arc<Expr>, lo: f64, hi: f64 },
}

/// Variable bindings for pointwise evaluation.
#[derive(Debug, Clone, Default)]
pub struct Bindings {
    z: Vec<f64>,
    x: Option<f64>,
    s: Option<f64>,
    q: Option<f64>,
    t: Option<f64>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `z0..z{values.len()-1}` to the given jet values.
    pub fn jet(values: &[f64]) -> Self {
        Bindings {
            z: values.to_vec(),
            ..Self::default()
        }
    }

    pub fn x(x: f64) -> Self {
        Bindings {
            x: Some(x),
            ..Self::default()
        }
    }

    pub fn set(mut self, v: Var, value: f64) -> Self {
        match v {
            Var::Z(k) => {
                let k = k as usize;
                if self.z.len() <= k {
                    self.z.resize(k + 1, f64::NAN);
                }
                self.z[k] = value;
            }
            Var::X => self.x = Some(value),
            Var::S => self.s = Some(value),
            Var::Q => self.q = Some(value),
            Var::T => self.t = Some(value),
        }
        self
    }

    fn get(&self, v: Var) -> Option<f64> {
        match v {
            Var::Z(k) => self.z.get(k as usize).copied(),
            Var::X => self.x,
            Var::S => self.s,
            Var::Q => self.q,
            Var::T => self.t,
        }
    }
}

/// Evaluation failure: a variable without a binding. Domain violations such
/// as `log(-1)` are not errors; they evaluate to a non-finite `f64` which
/// callers detect with `is_finite`.
#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
#[error("unbound variable `{0}`")]
pub struct UnboundVar(pub Var);

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn z(k: u8) -> Expr {
        Expr::Var(Var::Z(k))
    }

    pub fn x() -> Expr {
        Expr::Var(Var::X)
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(v) if *v == 0.0)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Const(v) if *v == 1.0)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x + y),
            (Some(x), None) if x == 0.0 => b,
            (None, Some(y)) if y == 0.0 => a,
            _ => Expr::Binary(BinOp::Add, Arc::new(a), Arc::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x - y),
            (None, Some(y)) if y == 0.0 => a,
            (Some(x), None) if x == 0.0 => Expr::neg(b),
            _ => Expr::Binary(BinOp::Sub, Arc::new(a), Arc::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x * y),
            (Some(x), None) if x == 0.0 => Expr::Const(0.0),
            (None, Some(y)) if y == 0.0 => Expr::Const(0.0),
            (Some(x), None) if x == 1.0 => b,
            (None, Some(y)) if y == 1.0 => a,
            _ => Expr::Binary(BinOp::Mul, Arc::new(a), Arc::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x / y),
            (Some(x), None) if x == 0.0 => Expr::Const(0.0),
            (None, Some(y)) if y == 1.0 => a,
            _ => Expr::Binary(BinOp::Div, Arc::new(a), Arc::new(b)),
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(v) => Expr::Const(-v),
            Expr::Unary(UnaryOp::Neg, inner) => (*inner).clone(),
            _ => Expr::Unary(UnaryOp::Neg, Arc::new(a)),
        }
    }

    pub fn unary(op: UnaryOp, a: Expr) -> Expr {
        if op == UnaryOp::Neg {
            return Expr::neg(a);
        }
        match a.as_const() {
            Some(v) => Expr::Const(op.apply(v)),
            None => Expr::Unary(op, Arc::new(a)),
        }
    }

    /// Integer power `a^k`, `k >= 0`. `a^0` folds to 1 and `a^1` to `a`.
    pub fn powi(a: Expr, k: u32) -> Expr {
        match k {
            0 => Expr::Const(1.0),
            1 => a,
            _ => match a.as_const() {
                Some(v) => Expr::Const(v.powi(k as i32)),
                None => Expr::Binary(BinOp::Pow, Arc::new(a), Arc::new(Expr::Const(k as f64))),
            },
        }
    }

    /// General power. Constant integer exponents `>= 0` keep a `Pow` node,
    /// anything else becomes `exp(b*log(a))` so differentiation stays
    /// closed-form.
    pub fn pow(a: Expr, b: Expr) -> Expr {
        if let Some(e) = b.as_const() {
            if e >= 0.0 && e.fract() == 0.0 && e <= u32::MAX as f64 {
                return Expr::powi(a, e as u32);
            }
        }
        Expr::unary(UnaryOp::Exp, Expr::mul(b, Expr::unary(UnaryOp::Log, a)))
    }

    pub fn clamp(arg: Expr, lo: f64, hi: f64) -> Expr {
        if let Some(v) = arg.as_const() {
            return Expr::Const(clamp_value(v, lo, hi));
        }
        Expr::Clamp {
            arg: Arc::new(arg),
            lo,
            hi,
        }
    }

    /// Pointwise IEEE evaluation. Non-finite results (domain violations,
    /// overflow) come back as ordinary non-finite doubles.
    pub fn evaluate(&self, bindings: &Bindings) -> Result<f64, UnboundVar> {
        match self {
            Expr::Const(v) => Ok(*v),
            Expr::Var(v) => bindings.get(*v).ok_or(UnboundVar(*v)),
            Expr::Unary(op, a) => Ok(op.apply(a.evaluate(bindings)?)),
            Expr::Binary(op, a, b) => {
                let x = a.evaluate(bindings)?;
                let y = b.evaluate(bindings)?;
                Ok(match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => x / y,
                    BinOp::Pow => x.powi(y as i32),
                })
            }
            Expr::Clamp { arg, lo, hi } => {
                Ok(clamp_value(arg.evaluate(bindings)?, *lo, *hi))
            }
        }
    }

    /// Variables occurring in the expression, without duplicates.
    pub fn variables(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Expr::Unary(_, a) => a.collect_vars(out),
            Expr::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Clamp { arg, .. } => arg.collect_vars(out),
        }
    }
}

fn clamp_value(v: f64, lo: f64, hi: f64) -> f64 {
    if v.is_nan() {
        v
    } else {
        v.clamp(lo, hi)
    }
}

// Precedence levels used by the printer: additive 1, multiplicative 2,
// unary minus 3, power 4, atoms 5.
fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Binary(BinOp::Add | BinOp::Sub, _, _) => 1,
        Expr::Binary(BinOp::Mul | BinOp::Div, _, _) => 2,
        Expr::Unary(UnaryOp::Neg, _) => 3,
        Expr::Binary(BinOp::Pow, _, _) => 4,
        Expr::Const(v) if *v < 0.0 => 3,
        _ => 5,
    }
}

fn write_prec(e: &Expr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let p = precedence(e);
    if p < min {
        write!(f, "(")?;
        write_expr(e, f)?;
        write!(f, ")")
    } else {
        write_expr(e, f)
    }
}

fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Const(v) => write!(f, "{v}"),
        Expr::Var(v) => write!(f, "{v}"),
        Expr::Unary(UnaryOp::Neg, a) => {
            // the grammar binds unary minus tighter than ^, so the operand
            // must be an atom (or the power re-associates on re-parse)
            write!(f, "-")?;
            write_prec(a, 5, f)
        }
        Expr::Unary(op, a) => {
            write!(f, "{}(", op.name())?;
            write_expr(a, f)?;
            write!(f, ")")
        }
        Expr::Binary(op, a, b) => match op {
            BinOp::Add => {
                write_prec(a, 1, f)?;
                write!(f, " + ")?;
                write_prec(b, 2, f)
            }
            BinOp::Sub => {
                write_prec(a, 1, f)?;
                write!(f, " - ")?;
                write_prec(b, 2, f)
            }
            BinOp::Mul => {
                write_prec(a, 2, f)?;
                write!(f, "*")?;
                write_prec(b, 3, f)
            }
            BinOp::Div => {
                write_prec(a, 2, f)?;
                write!(f, "/")?;
                write_prec(b, 3, f)
            }
            BinOp::Pow => {
                write_prec(a, 5, f)?;
                write!(f, "^")?;
                write_prec(b, 4, f)
            }
        },
        Expr::Clamp { arg, lo, hi } => {
            write!(f, "clamp(")?;
            write_expr(arg, f)?;
            write!(f, ", {lo}, {hi})")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f)
    }
}
