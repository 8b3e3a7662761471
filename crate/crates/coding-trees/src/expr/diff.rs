//! Symbolic differentiation and substitution.
//!
//! Differentiation is closed over the expression node set. The derivative of
//! `clamp(g, lo, hi)` is `ind(lo < g < hi) * g'` where the indicator is itself
//! built from clamp/multiply nodes: with `c = clamp(g, lo, hi)` the product
//! `p = (c - lo)*(hi - c)` is positive exactly on the open interval, and
//! `clamp(p*1e308*1e308, 0, 1)` lifts every representable positive `p` to 1
//! while keeping 0 at the breakpoints and the exterior. NaN propagates.
//!
//! Samplers need whole towers of derivatives (`phi`, `phi'`, ... and the
//! partials of `f`), so the memoization lives in [`DerivTower`] and
//! [`PartialTable`]: each (expression, variable, order) is differentiated at
//! most once per run and shared behind `Arc` across threads.

use std::sync::{Arc, RwLock};

use dashmap::DashMap;

use super::{BinOp, Expr, UnaryOp, Var};

const LIFT: f64 = 1e308;

/// Symbolic derivative of `e` with respect to `var`.
pub fn differentiate(e: &Expr, var: Var) -> Expr {
    match e {
        Expr::Const(_) => Expr::Const(0.0),
        Expr::Var(v) => Expr::Const(if *v == var { 1.0 } else { 0.0 }),
        Expr::Unary(op, a) => {
            let da = differentiate(a, var);
            if da.is_zero() {
                return Expr::Const(0.0);
            }
            let a = (**a).clone();
            let outer = match op {
                UnaryOp::Neg => return Expr::neg(da),
                UnaryOp::Exp => Expr::unary(UnaryOp::Exp, a),
                UnaryOp::Log => return Expr::div(da, a),
                UnaryOp::Sin => Expr::unary(UnaryOp::Cos, a),
                UnaryOp::Cos => Expr::neg(Expr::unary(UnaryOp::Sin, a)),
                // tan' = 1 + tan^2, tanh' = 1 - tanh^2
                UnaryOp::Tan => Expr::add(
                    Expr::Const(1.0),
                    Expr::powi(Expr::unary(UnaryOp::Tan, a), 2),
                ),
                UnaryOp::Tanh => Expr::sub(
                    Expr::Const(1.0),
                    Expr::powi(Expr::unary(UnaryOp::Tanh, a), 2),
                ),
                UnaryOp::Sqrt => Expr::div(
                    Expr::Const(0.5),
                    Expr::unary(UnaryOp::Sqrt, a),
                ),
            };
            Expr::mul(outer, da)
        }
        Expr::Binary(op, a, b) => {
            let (a, b) = ((**a).clone(), (**b).clone());
            match op {
                BinOp::Add => Expr::add(differentiate(&a, var), differentiate(&b, var)),
                BinOp::Sub => Expr::sub(differentiate(&a, var), differentiate(&b, var)),
                BinOp::Mul => Expr::add(
                    Expr::mul(differentiate(&a, var), b.clone()),
                    Expr::mul(a, differentiate(&b, var)),
                ),
                BinOp::Div => {
                    // scaled quotient rule d(a/b) = (a' - (a/b)*b')/b:
                    // repeated differentiation keeps denominators first
                    // power, where (a'b - ab')/b^2 would tower them to
                    // b^(2^k) and overflow pointwise evaluation
                    let h = Expr::div(a.clone(), b.clone());
                    Expr::div(
                        Expr::sub(
                            differentiate(&a, var),
                            Expr::mul(h, differentiate(&b, var)),
                        ),
                        b,
                    )
                }
                BinOp::Pow => {
                    // invariant: b is a non-negative integer constant
                    let k = match b {
                        Expr::Const(k) => k,
                        _ => unreachable!("non-constant exponent"),
                    };
                    Expr::mul(
                        Expr::mul(Expr::Const(k), Expr::powi(a.clone(), k as u32 - 1)),
                        differentiate(&a, var),
                    )
                }
            }
        }
        Expr::Clamp { arg, lo, hi } => {
            let da = differentiate(arg, var);
            if da.is_zero() {
                return Expr::Const(0.0);
            }
            Expr::mul(open_indicator((**arg).clone(), *lo, *hi), da)
        }
    }
}

/// 1 on `lo < e < hi`, 0 outside and at the breakpoints, NaN-propagating.
fn open_indicator(e: Expr, lo: f64, hi: f64) -> Expr {
    let c = Expr::clamp(e, lo, hi);
    let p = Expr::mul(
        Expr::sub(c.clone(), Expr::Const(lo)),
        Expr::sub(Expr::Const(hi), c),
    );
    let lifted = Expr::mul(Expr::mul(p, Expr::Const(LIFT)), Expr::Const(LIFT));
    Expr::clamp(lifted, 0.0, 1.0)
}

/// Replaces every occurrence of `var` in `e` by `replacement`, rebuilding
/// through the smart constructors.
pub fn substitute(e: &Expr, var: Var, replacement: &Expr) -> Expr {
    match e {
        Expr::Const(v) => Expr::Const(*v),
        Expr::Var(v) => {
            if *v == var {
                replacement.clone()
            } else {
                Expr::Var(*v)
            }
        }
        Expr::Unary(op, a) => Expr::unary(*op, substitute(a, var, replacement)),
        Expr::Binary(op, a, b) => {
            let a = substitute(a, var, replacement);
            let b = substitute(b, var, replacement);
            match op {
                BinOp::Add => Expr::add(a, b),
                BinOp::Sub => Expr::sub(a, b),
                BinOp::Mul => Expr::mul(a, b),
                BinOp::Div => Expr::div(a, b),
                BinOp::Pow => Expr::pow(a, b),
            }
        }
        Expr::Clamp { arg, lo, hi } => {
            Expr::clamp(substitute(arg, var, replacement), *lo, *hi)
        }
    }
}

/// Memoized tower of derivatives of a single expression with respect to one
/// variable: entry `k` is the `k`-th derivative. Readers share the entries;
/// a missing order is computed under the write lock.
#[derive(Debug)]
pub struct DerivTower {
    var: Var,
    derivs: RwLock<Vec<Arc<Expr>>>,
}

impl DerivTower {
    pub fn new(base: Expr, var: Var) -> Self {
        DerivTower {
            var,
            derivs: RwLock::new(vec![Arc::new(base)]),
        }
    }

    pub fn var(&self) -> Var {
        self.var
    }

    /// The `order`-th derivative, computing and caching anything missing.
    pub fn derivative(&self, order: usize) -> Arc<Expr> {
        {
            let derivs = self.derivs.read().unwrap();
            if let Some(e) = derivs.get(order) {
                return e.clone();
            }
        }
        let mut derivs = self.derivs.write().unwrap();
        while derivs.len() <= order {
            let next = differentiate(derivs.last().unwrap(), self.var);
            derivs.push(Arc::new(next));
        }
        derivs[order].clone()
    }
}

/// Memoized mixed partials of a function of `z0..z{m-1}`, keyed by the
/// multi-index `lambda`. `partial(&[0,...,0])` is the function itself.
/// Entries are computed by peeling one order off the first non-zero index,
/// so shared prefixes are differentiated once.
#[derive(Debug)]
pub struct PartialTable {
    base: Arc<Expr>,
    table: DashMap<Vec<u32>, Arc<Expr>>,
}

impl PartialTable {
    pub fn new(base: Expr) -> Self {
        PartialTable {
            base: Arc::new(base),
            table: DashMap::new(),
        }
    }

    pub fn base(&self) -> Arc<Expr> {
        self.base.clone()
    }

    pub fn partial(&self, lambda: &[u32]) -> Arc<Expr> {
        if lambda.iter().all(|&l| l == 0) {
            return self.base.clone();
        }
        if let Some(e) = self.table.get(lambda) {
            return e.clone();
        }
        let i = lambda.iter().position(|&l| l > 0).unwrap();
        let mut parent = lambda.to_vec();
        parent[i] -= 1;
        let of = self.partial(&parent);
        let e = Arc::new(differentiate(&of, Var::Z(i as u8)));
        self.table.insert(lambda.to_vec(), e.clone());
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Bindings};

    fn d(e: &Expr) -> Expr {
        differentiate(e, Var::Z(0))
    }

    #[test]
    fn exp_is_a_fixed_point() {
        let e = Expr::unary(UnaryOp::Exp, Expr::z(0));
        assert_eq!(d(&e), e);
    }

    #[test]
    fn polynomial_rule() {
        // d/dz0 (z0 - z0^3) = 1 - 3 z0^2
        let e = parse("z0 - z0^3", &[Var::Z(0)]).unwrap();
        let expect = parse("1 - 3*z0^2", &[Var::Z(0)]).unwrap();
        assert_eq!(d(&e), expect);
    }

    #[test]
    fn derivative_of_other_variable_is_zero() {
        let e = parse("z0^2", &[Var::Z(0)]).unwrap();
        assert!(differentiate(&e, Var::Z(1)).is_zero());
    }

    #[test]
    fn clamp_derivative_is_open_indicator() {
        let e = Expr::clamp(Expr::z(0), -4.0, 4.0);
        let de = d(&e);
        let at = |z: f64| de.evaluate(&Bindings::jet(&[z])).unwrap();
        assert_eq!(at(0.0), 1.0);
        assert_eq!(at(3.999), 1.0);
        assert_eq!(at(4.0), 0.0);
        assert_eq!(at(5.0), 0.0);
        assert_eq!(at(-4.0), 0.0);
        assert_eq!(at(-7.0), 0.0);
        assert!(at(f64::NAN).is_nan());
    }

    #[test]
    fn tower_memoizes_orders() {
        let tower = DerivTower::new(parse("cos(x)", &[Var::X]).unwrap(), Var::X);
        let d4 = tower.derivative(4);
        // cos'''' = cos
        let v = d4.evaluate(&Bindings::x(0.3)).unwrap();
        assert!((v - 0.3f64.cos()).abs() < 1e-15);
        assert!(Arc::ptr_eq(&d4, &tower.derivative(4)));
    }

    #[test]
    fn partial_table_mixed_orders() {
        // f = z0^2 * z1, d2/dz0 d/dz1 f = 2
        let f = parse("z0^2 * z1", &[Var::Z(0), Var::Z(1)]).unwrap();
        let table = PartialTable::new(f);
        let e = table.partial(&[2, 1]);
        assert_eq!(*e, Expr::Const(2.0));
    }

    #[test]
    fn substitute_composes() {
        // f(z0) = z0^2, z0 <- sin(x) gives sin(x)^2
        let f = parse("z0^2", &[Var::Z(0)]).unwrap();
        let g = substitute(&f, Var::Z(0), &parse("sin(x)", &[Var::X]).unwrap());
        let v = g.evaluate(&Bindings::x(0.7)).unwrap();
        assert!((v - 0.7f64.sin().powi(2)).abs() < 1e-15);
    }
}
