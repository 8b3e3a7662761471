//! Shared helpers for the integration suites: random smooth expressions and
//! the numeric Faà di Bruno identity check.
//!
//! Each suite uses its own subset of these.
#![allow(dead_code)]

use coding_trees::expr::{differentiate, substitute, Bindings, Expr, Var};
use coding_trees::fdb::enumerate_fdb;
use rand::rngs::StdRng;
use rand::Rng;

/// Random polynomial in the given variables with small integer-ish
/// coefficients: a sum of monomials of total degree <= `max_degree`.
pub fn random_polynomial<R: Rng>(rng: &mut R, vars: &[Var], max_degree: u32, terms: usize) -> Expr {
    let mut acc = Expr::constant(rng.gen_range(-2.0..2.0));
    for _ in 0..terms {
        let coeff = rng.gen_range(-2.0..2.0_f64);
        let mut mono = Expr::constant((coeff * 8.0).round() / 8.0);
        let mut budget = max_degree;
        for &v in vars {
            let d = rng.gen_range(0..=budget.min(2));
            budget -= d;
            mono = Expr::mul(mono, Expr::powi(Expr::var(v), d));
        }
        acc = Expr::add(acc, mono);
    }
    acc
}

/// Verifies the multivariate Faà di Bruno expansion numerically for one
/// random composite: the k-th x-derivative of g(v, v', ..., v^(n)),
/// computed symbolically, against the sum assembled from the enumerated
/// terms, at `points` random abscissas. Returns the worst relative error.
pub fn fdb_identity_error(rng: &mut StdRng, n: u32, k: u32, points: usize) -> f64 {
    let m = n + 1;
    let zvars: Vec<Var> = (0..m as u8).map(Var::Z).collect();
    let g = random_polynomial(rng, &zvars, 3, 4);
    let v = random_polynomial(rng, &[Var::X], (n + k).min(6), 5);

    // jet of v as expressions: v, v', ..., up to order n + k
    let mut jet_exprs = vec![v.clone()];
    for _ in 0..(n + k) as usize {
        jet_exprs.push(differentiate(jet_exprs.last().unwrap(), Var::X));
    }

    // left side: substitute the jet into g, then differentiate k times
    let mut composite = g.clone();
    for (i, zv) in zvars.iter().enumerate() {
        composite = substitute(&composite, *zv, &jet_exprs[i]);
    }
    let mut lhs = composite;
    for _ in 0..k {
        lhs = differentiate(&lhs, Var::X);
    }

    // partials of g needed by the table
    let table = enumerate_fdb(m, k).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let x = rng.gen_range(-1.5..1.5);
        let at_x = Bindings::x(x);
        let jet: Vec<f64> = jet_exprs
            .iter()
            .map(|e| e.evaluate(&at_x).unwrap())
            .collect();
        let want = lhs.evaluate(&at_x).unwrap();

        let mut got = 0.0;
        for term in table.iter() {
            let mut partial = g.clone();
            for (q, &order) in term.lambda.iter().enumerate() {
                for _ in 0..order {
                    partial = differentiate(&partial, Var::Z(q as u8));
                }
            }
            let mut product = term.coefficient_f64()
                * partial.evaluate(&Bindings::jet(&jet[..m as usize])).unwrap();
            for (j, row) in term.k_matrix.iter().enumerate() {
                for (q, &mult) in row.iter().enumerate() {
                    let inner = jet[q + term.parts[j] as usize];
                    product *= inner.powi(mult as i32);
                }
            }
            got += product;
        }
        let err = (got - want).abs() / (1.0 + want.abs());
        worst = worst.max(err);
    }
    worst
}
